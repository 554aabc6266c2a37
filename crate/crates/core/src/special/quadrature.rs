//! Adaptive Gauss–Kronrod quadrature and Beta-weighted integrals.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Kronrod abscissae on [0, 1) (symmetric about 0); odd indices are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_548_839_560,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-8, max_panels: 200 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = libm::pow(200.0 * scaled / res_asc, 1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor > scaled {
            scaled = floor;
        }
    }
    scaled
}

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let error = rescale_error((res_k - res_g) * half, res_abs, res_asc);
    Panel { a, b, value, error }
}

/// Adaptive bisection of `∫ₐᵇ f` driven by the Gauss–Kronrod error estimate.
///
/// Converges when the summed error estimate drops below
/// `max(abs_tol, rel_tol·|I|)`; running out of panels is an error.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(cfg.max_panels.min(64));
    panels.push(gk21(&mut f, a, b));
    loop {
        let (total, err) = panels.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !total.is_finite() {
            return Err(Error::QuadratureNonConvergence { estimate: total, error: err, panels: panels.len() });
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= cfg.max_panels {
            return Err(Error::QuadratureNonConvergence { estimate: total, error: err, panels: panels.len() });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, be), (i, p)| if p.error > be { (i, p.error) } else { (bi, be) });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a.min(p.b) || mid >= p.a.max(p.b) {
            // panel no longer splittable in floating point; accept what we have
            return Ok(total);
        }
        panels.push(gk21(&mut f, p.a, mid));
        panels.push(gk21(&mut f, mid, p.b));
    }
}

fn is_nonneg_integer(x: f64) -> bool {
    x >= 0.0 && libm::floor(x) == x
}

/// `∫₀¹ tᵃ (1−t)ᵇ g(t) dt` for `a, b > −1` and `g` bounded and smooth on [0, 1].
///
/// The interval is split at ½. On each half an integer power substitution
/// (`t = vⁿ` near 0, `1 − t = wⁿ` near 1) with `n = ⌈4/(a+1)⌉` turns the endpoint
/// factor into `v^{n(a+1)−1}`, exponent at least 3, and keeps `g(vⁿ)` smooth.
/// Integer non-negative exponents are left alone.
pub fn beta_weighted<G: FnMut(f64) -> f64>(a: f64, b: f64, g: G, cfg: &QuadratureConfig) -> Result<f64> {
    beta_weighted_split(a, b, g, &[], cfg)
}

/// [`beta_weighted`] for `g` that is only piecewise smooth, with kinks at `breaks`.
/// Break points outside `(0, 1)` are ignored.
pub fn beta_weighted_split<G: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    mut g: G,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(a > -1.0) {
        return Err(Error::Domain { what: "beta-weighted quadrature requires a > -1", value: a });
    }
    if !(b > -1.0) {
        return Err(Error::Domain { what: "beta-weighted quadrature requires b > -1", value: b });
    }
    let mut points: Vec<f64> = breaks.iter().copied().filter(|&t| t > 0.0 && t < 1.0).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    if points.is_empty() {
        points.push(0.5);
    }
    let segments = points.len() + 1;
    let seg_cfg = QuadratureConfig { abs_tol: cfg.abs_tol / segments as f64, ..*cfg };

    let mut total = endpoint_segment(a, b, &mut g, points[0], false, &seg_cfg)?;
    for w in points.windows(2) {
        total += integrate(|t| libm::pow(t, a) * libm::pow(1.0 - t, b) * g(t), w[0], w[1], &seg_cfg)?;
    }
    total += endpoint_segment(b, a, &mut g, 1.0 - points[points.len() - 1], true, &seg_cfg)?;
    Ok(total)
}

/// `∫₀^len sᵉ (1−s)ᶠ g(s) ds`, or with `g(1 − s)` when `mirrored`.
fn endpoint_segment<G: FnMut(f64) -> f64>(
    e: f64,
    f: f64,
    g: &mut G,
    len: f64,
    mirrored: bool,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut at = |s: f64| if mirrored { g(1.0 - s) } else { g(s) };
    if is_nonneg_integer(e) {
        return integrate(|s| libm::pow(s, e) * libm::pow(1.0 - s, f) * at(s), 0.0, len, cfg);
    }
    let n = libm::ceil(4.0 / (e + 1.0)).max(1.0);
    let c = n * (e + 1.0) - 1.0;
    let top = libm::pow(len, 1.0 / n);
    Ok(n * integrate(
        |v| {
            let s = libm::pow(v, n);
            libm::pow(v, c) * libm::pow(1.0 - s, f) * at(s)
        },
        0.0,
        top,
        cfg,
    )?)
}
