//! The energy kernels `h_m`, `g_m` that carry every momentum-space integral
//! once the ansatz is imposed.
//!
//! All kernels are evaluated through the substitution `E² = u² + (E₀² − u²)t`,
//! which turns
//!
//! ```text
//! ∫ᵤ^{E₀} Ψ(E) Eʲ (E² − u²)ᵐ dE = ½ D^{m+b+1} ∫₀¹ tᵐ (1−t)ᵇ Ψ̂(E(t)) Eʲ dt,   D = E₀² − u²
//! ```
//!
//! where `Ψ(E)/E = (E₀² − E²)ᵇ Ψ̂(E)` with Ψ̂ bounded. Both endpoint factors are
//! then handled by [`beta_weighted`].

use alloc::vec::Vec;

use super::gamma::beta_coeff;
use super::quadrature::{beta_weighted_split, QuadratureConfig};
use crate::{Error, PolytropicAnsatz, Result};

/// Kernel evaluator bound to one ansatz and one quadrature configuration.
#[derive(Debug, Clone, Copy)]
pub struct Kernels<'a> {
    pub ansatz: &'a PolytropicAnsatz,
    pub quadrature: QuadratureConfig,
}

impl<'a> Kernels<'a> {
    pub fn new(ansatz: &'a PolytropicAnsatz) -> Self {
        Self { ansatz, quadrature: QuadratureConfig::default() }
    }

    pub fn with_quadrature(ansatz: &'a PolytropicAnsatz, quadrature: QuadratureConfig) -> Self {
        Self { ansatz, quadrature }
    }

    /// `∫ᵤ^∞ Ψ(E) E^power (E² − u²)ᵐ dE`.
    pub fn energy_moment(&self, m: f64, power: i32, u: f64) -> Result<f64> {
        if !(m > -1.0) {
            return Err(Error::Domain { what: "kernel order must exceed -1", value: m });
        }
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::Domain { what: "kernel argument must be positive", value: u });
        }
        let a = self.ansatz;
        if u >= a.e0 || a.amplitude == 0.0 {
            return Ok(0.0);
        }
        let d = (a.e0 - u) * (a.e0 + u);
        let b = a.edge_exponent();
        let u2 = u * u;
        let f = |t: f64| {
            let e = libm::sqrt(u2 + d * t);
            a.reduced_psi(e, d * (1.0 - t)) * libm::pow(e, power as f64)
        };
        // abs_tol is sized for O(1) integrands; tighten it where Ψ̂ is small on the window
        let size = [0.25, 0.5, 0.75].iter().map(|&t| libm::fabs(f(t))).fold(0.0, f64::max);
        let mut cfg = self.quadrature;
        if size > 0.0 {
            cfg.abs_tol *= size.min(1.0);
        }
        let breaks: Vec<f64> = a.knots().iter().map(|&e| (e - u) * (e + u) / d).collect();
        let integral = beta_weighted_split(m, b, f, &breaks, &cfg)?;
        Ok(0.5 * libm::pow(d, m + b + 1.0) * integral)
    }

    /// `h_m(u) = ∫ᵤ^∞ Ψ(E)(E² − u²)ᵐ dE`.
    pub fn h(&self, m: f64, u: f64) -> Result<f64> {
        self.energy_moment(m, 0, u)
    }

    /// `g_m(u) = ∫ᵤ^∞ Ψ(E) E² (E² − u²)ᵐ dE`.
    pub fn g(&self, m: f64, u: f64) -> Result<f64> {
        self.energy_moment(m, 2, u)
    }

    /// `h′_m(u) = −2 m u h_{m−1}(u)`, for `m > 0`.
    pub fn h_prime(&self, m: f64, u: f64) -> Result<f64> {
        if !(m > 0.0) {
            return Err(Error::Domain { what: "kernel derivative requires m > 0", value: m });
        }
        Ok(-2.0 * m * u * self.h(m - 1.0, u)?)
    }

    /// `g′_m(u) = −2 m u g_{m−1}(u)`, for `m > 0`.
    pub fn g_prime(&self, m: f64, u: f64) -> Result<f64> {
        if !(m > 0.0) {
            return Err(Error::Domain { what: "kernel derivative requires m > 0", value: m });
        }
        Ok(-2.0 * m * u * self.g(m - 1.0, u)?)
    }
}

pub fn eval_h(m: f64, u: f64, ansatz: &PolytropicAnsatz) -> Result<f64> {
    Kernels::new(ansatz).h(m, u)
}

pub fn eval_g(m: f64, u: f64, ansatz: &PolytropicAnsatz) -> Result<f64> {
    Kernels::new(ansatz).g(m, u)
}

pub fn eval_h_derivative(m: f64, u: f64, ansatz: &PolytropicAnsatz) -> Result<f64> {
    Kernels::new(ansatz).h_prime(m, u)
}

/// `∫ᵤ^{E₀} E(E₀² − E²)^μ (E² − u²)ᵐ dE = ½ c_{μ,m} (E₀² − u²)^{μ+m+1}`: the unit-amplitude
/// energy-weighted `h_m` in closed form.
pub fn closed_form_h(m: f64, u: f64, mu: f64, e0: f64) -> Result<f64> {
    if u > e0 {
        return Err(Error::Domain { what: "closed-form kernel requires u <= E0", value: u });
    }
    let c = beta_coeff(mu, m)?;
    let d = (e0 - u) * (e0 + u);
    if d == 0.0 {
        return Ok(0.0);
    }
    Ok(0.5 * c * libm::pow(d, mu + m + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ew(mu: f64, e0: f64) -> PolytropicAnsatz {
        PolytropicAnsatz::energy_weighted(0.0, mu, e0, 1.0).unwrap()
    }

    #[test]
    fn frozen_examples() {
        let a = ew(0.0, 2.0);
        // ∫₁² E(E²−1) dE = 2.25
        assert!((eval_h(1.0, 1.0, &a).unwrap() - 2.25).abs() < 1e-12);
        // ∫₁² E³ dE = 3.75
        assert!((eval_g(0.0, 1.0, &a).unwrap() - 3.75).abs() < 1e-12);
        assert!((eval_h_derivative(1.0, 1.0, &a).unwrap() + 3.0).abs() < 1e-12);
        assert!((closed_form_h(1.0, 1.0, 0.0, 2.0).unwrap() - 2.25).abs() < 1e-14);
        let expect = 0.5 * (core::f64::consts::PI / 8.0) * 0.75 * 0.75;
        assert!((closed_form_h(0.5, 0.5, 0.5, 1.0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn vanishes_at_and_beyond_cutoff() {
        let a = ew(0.5, 1.3);
        for &u in &[1.3, 1.31, 5.0] {
            assert_eq!(eval_h(0.7, u, &a).unwrap(), 0.0);
            assert_eq!(eval_g(0.7, u, &a).unwrap(), 0.0);
        }
        assert_eq!(closed_form_h(2.0, 1.3, 0.5, 1.3).unwrap(), 0.0);
        assert!(closed_form_h(2.0, 1.4, 0.5, 1.3).is_err());
    }

    #[test]
    fn zero_amplitude_is_zero() {
        let a = PolytropicAnsatz::plain_power_law(0.0, 0.5, 1.0, 0.0).unwrap();
        assert_eq!(eval_h(1.0, 0.5, &a).unwrap(), 0.0);
        assert_eq!(eval_g(1.0, 0.5, &a).unwrap(), 0.0);
        assert_eq!(eval_h_derivative(1.0, 0.5, &a).unwrap(), 0.0);
    }

    #[test]
    fn domain_checks() {
        let a = ew(0.0, 1.0);
        assert!(eval_h(-1.0, 0.5, &a).is_err());
        assert!(eval_h(0.5, 0.0, &a).is_err());
        assert!(eval_h_derivative(0.0, 0.5, &a).is_err());
    }

    #[test]
    fn plain_power_law_against_direct_quadrature() {
        use crate::special::quadrature::integrate;
        // μ = 2 keeps the direct integrand smooth enough for plain adaptive quadrature
        let a = PolytropicAnsatz::plain_power_law(0.0, 2.0, 1.5, 1.0).unwrap();
        let cfg = QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-13, max_panels: 500 };
        for &(m, u) in &[(0.5, 0.3), (1.5, 1.0), (3.0, 1.4)] {
            let direct = integrate(|e| a.psi(e) * libm::pow(e * e - u * u, m), u, 1.5, &cfg).unwrap();
            let k = eval_h(m, u, &a).unwrap();
            assert!(((k - direct) / direct).abs() < 1e-8, "m={m} u={u}: {k} vs {direct}");
        }
    }
}
