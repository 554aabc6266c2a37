//! Gamma function and the Beta coefficients `c_{a,b}`.

use core::f64::consts::PI;

use crate::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Γ(x+1) form)
    let mut sum = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    sum
}

/// Γ(x) for real x that is not a non-positive integer.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        PI / (libm::sin(PI * x) * gamma(1.0 - x))
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        libm::sqrt(2.0 * PI) * libm::pow(t, z + 0.5) * libm::exp(-t) * lanczos_sum(z)
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return libm::log(PI / libm::sin(PI * x).abs()) - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * libm::log(2.0 * PI) + (z + 0.5) * libm::log(t) - t + libm::log(lanczos_sum(z))
}

/// `c_{a,b} = ∫₀¹ sᵃ(1−s)ᵇ ds = Γ(a+1)Γ(b+1)/Γ(a+b+2)`, defined for `a, b > −1`.
pub fn beta_coeff(a: f64, b: f64) -> Result<f64> {
    if !(a > -1.0) {
        return Err(Error::Domain { what: "beta_coeff requires a > -1", value: a });
    }
    if !(b > -1.0) {
        return Err(Error::Domain { what: "beta_coeff requires b > -1", value: b });
    }
    Ok(beta_unchecked(a, b))
}

pub(crate) fn beta_unchecked(a: f64, b: f64) -> f64 {
    let s = a + b + 2.0;
    if s < 30.0 {
        gamma(a + 1.0) * gamma(b + 1.0) / gamma(s)
    } else {
        libm::exp(ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(s))
    }
}
