//! The `(x, y)` system governing compact support.
//!
//! With `q = ρ − (2k+3)𝒫`, `m(r) = ∫₀ʳ s²q`, `η = log E₀ − φ`,
//!
//! ```text
//! x = m/(rη),   y = r²q²/𝒫,   rx′ = −x + x² + αy,   ry′ = (2+2k)y − βxy,   rη′ = −ηx
//! ```
//!
//! Two coefficients are reported for the `y` equation. `beta` is the closed
//! expression in terms of `g_{k+1/2}`, `g_{k-1/2}`, `h_{k+1/2}`, `h_{k+3/2}` whose
//! boundary limit is `−E₀²(μ+k+5/2) + 2μ+2k+3`. `beta_dyn` is obtained by
//! differentiating `y` along the solution with the kernel chain rule:
//!
//! ```text
//! β_dyn = −(2k+3)η e^{2φ} h_{k+1/2}/h_{k+3/2} − 4η + 2(2k+1)η e^{2φ} h_{k-1/2}/h_{k+1/2}  →  μ + k + 1/2
//! ```

use alloc::vec::Vec;

use crate::observables::ObservableProfile;
use crate::solver::RadialProfile;
use crate::special::gamma::beta_unchecked;

/// Admissibility of `(μ, k, E₀)`: `μ > −1`, `k > −1/2` and
/// `(2μ+1)/(μ+k+5/2) < E₀² < (2μ+2k+3)/(μ+k+5/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCheck {
    pub ok: bool,
    /// Window endpoints for `E₀²`.
    pub lower: f64,
    pub upper: f64,
    /// `E₀² − lower` and `upper − E₀²`; both positive inside.
    pub margin_lower: f64,
    pub margin_upper: f64,
}

pub fn check_window(mu: f64, k: f64, e0: f64) -> WindowCheck {
    let s = mu + k + 2.5;
    let lower = (2.0 * mu + 1.0) / s;
    let upper = (2.0 * mu + 2.0 * k + 3.0) / s;
    let e2 = e0 * e0;
    let admissible = mu > -1.0 && k > -0.5;
    let ok = admissible && lower < e2 && e2 < upper;
    WindowCheck { ok, lower, upper, margin_lower: e2 - lower, margin_upper: upper - e2 }
}

/// `lim α = 1/(μ + k + 5/2)`.
pub fn alpha_limit(mu: f64, k: f64) -> f64 {
    1.0 / (mu + k + 2.5)
}

/// `lim β = −E₀²(μ + k + 5/2) + 2μ + 2k + 3`.
pub fn beta_limit(mu: f64, k: f64, e0: f64) -> f64 {
    -e0 * e0 * (mu + k + 2.5) + 2.0 * mu + 2.0 * k + 3.0
}

/// `lim β_dyn = μ + k + 1/2`.
pub fn beta_dyn_limit(mu: f64, k: f64) -> f64 {
    mu + k + 0.5
}

/// `2 c_{μ,k+3/2} / ((2k+3) c_{μ,k+1/2})`, the Beta-ratio form of [`alpha_limit`].
pub fn alpha_limit_from_beta(mu: f64, k: f64) -> f64 {
    2.0 * beta_unchecked(mu, k + 1.5) / beta_unchecked(mu, k + 0.5) / (2.0 * k + 3.0)
}

/// Below `ε = E₀² − e^{2φ} < ASYMPTOTIC_SWITCH·E₀²` the coefficients take their limits.
pub const ASYMPTOTIC_SWITCH: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteRadiusDiagnostics {
    /// Index of each entry in the profile grid.
    pub node_index: Vec<usize>,
    pub r: Vec<f64>,
    pub eta: Vec<f64>,
    pub q: Vec<f64>,
    pub m: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// The term `−2(2k+3)η g_{k+1/2}/h_{k+1/2}` of `beta`.
    pub beta_middle: Vec<f64>,
    pub beta_dyn: Vec<f64>,
    pub alpha0_theory: f64,
    pub beta0_theory: f64,
    pub beta_dyn_theory: f64,
    /// Support nodes dropped because `η ≤ 0`.
    pub excluded: usize,
}

impl FiniteRadiusDiagnostics {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Entries whose η lies within a factor 10 of the smallest η.
    pub fn last_decade(&self) -> Vec<usize> {
        let min = self.eta.iter().copied().fold(f64::INFINITY, f64::min);
        (0..self.len()).filter(|&i| self.eta[i] <= 10.0 * min).collect()
    }

    pub fn alpha_inf(&self) -> f64 {
        self.alpha.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Diagnostics at every node with `r > 0`, matter present and `η > 0`.
pub fn build_diagnostics(profile: &RadialProfile, obs: &ObservableProfile) -> FiniteRadiusDiagnostics {
    let a = &profile.ansatz;
    let k = a.k;
    let log_e0 = libm::log(a.e0);
    let e02 = a.e0 * a.e0;
    let mut d = FiniteRadiusDiagnostics {
        alpha0_theory: alpha_limit(a.mu, k),
        beta0_theory: beta_limit(a.mu, k, a.e0),
        beta_dyn_theory: beta_dyn_limit(a.mu, k),
        ..Default::default()
    };
    for i in 0..profile.len() {
        let r = profile.grid[i];
        let nk = &obs.kernels[i];
        if r == 0.0 || nk.is_empty() {
            continue;
        }
        let eta = log_e0 - profile.phi[i];
        if !(eta > 0.0) {
            d.excluded += 1;
            continue;
        }
        let u2 = nk.u * nk.u;
        let q = obs.source[i];
        let m = obs.mass_cumulative[i];
        let p = obs.pressure[i];
        let eps = (a.e0 - nk.u) * (a.e0 + nk.u);
        let (alpha, beta, middle, beta_dyn) = if eps < ASYMPTOTIC_SWITCH * e02 || nk.h_hi == 0.0 {
            (d.alpha0_theory, d.beta0_theory, 0.0, d.beta_dyn_theory)
        } else {
            let alpha = nk.h_hi / ((2.0 * k + 3.0) * eta * u2 * nk.h);
            let first = -(2.0 * k + 3.0) * eta * u2 * nk.g / nk.h_hi;
            let middle = -2.0 * (2.0 * k + 3.0) * eta * nk.g / nk.h;
            let third = 2.0 * (2.0 * k + 1.0) * eta * nk.g_lo / nk.h;
            let dyn_first = -(2.0 * k + 3.0) * eta * u2 * nk.h / nk.h_hi;
            let dyn_third = 2.0 * (2.0 * k + 1.0) * eta * u2 * nk.h_lo / nk.h;
            (alpha, first + middle + third, middle, dyn_first - 4.0 * eta + dyn_third)
        };
        d.node_index.push(i);
        d.r.push(r);
        d.eta.push(eta);
        d.q.push(q);
        d.m.push(m);
        d.x.push(m / (r * eta));
        d.y.push(if p > 0.0 { r * r * q * q / p } else { 0.0 });
        d.alpha.push(alpha);
        d.beta.push(beta);
        d.beta_middle.push(middle);
        d.beta_dyn.push(beta_dyn);
    }
    d
}

/// Residuals of the `(x, y, η)` equations at resolved interior entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct XyResiduals {
    /// Diagnostics entry of each residual.
    pub entry: Vec<usize>,
    pub r: Vec<f64>,
    /// `rx′ − (−x + x² + αy)`
    pub res_x: Vec<f64>,
    /// `ry′ − ((2+2k)y − βxy)` with the closed-form β
    pub res_y: Vec<f64>,
    /// same with `β_dyn`
    pub res_y_dyn: Vec<f64>,
    /// `rη′ + ηx`, equal to `(m − r²φ′)/r`
    pub res_eta: Vec<f64>,
    /// Sums of the magnitudes of the right-hand-side terms.
    pub scale_x: Vec<f64>,
    pub scale_y: Vec<f64>,
    pub scale_y_dyn: Vec<f64>,
    pub scale_eta: Vec<f64>,
    /// `max(x², y)` at each entry.
    pub magnitude: Vec<f64>,
    /// `max(x², y)` over the evaluated entries.
    pub global_scale: f64,
}

fn max_ratio(res: &[f64], scale: &[f64]) -> f64 {
    res.iter().zip(scale).filter(|(_, s)| **s > 0.0).map(|(r, s)| (r / s).abs()).fold(0.0, f64::max)
}

impl XyResiduals {
    pub fn max_local_x(&self) -> f64 {
        max_ratio(&self.res_x, &self.scale_x)
    }

    pub fn max_local_y(&self) -> f64 {
        max_ratio(&self.res_y, &self.scale_y)
    }

    pub fn max_local_y_dyn(&self) -> f64 {
        max_ratio(&self.res_y_dyn, &self.scale_y_dyn)
    }

    pub fn max_local_eta(&self) -> f64 {
        max_ratio(&self.res_eta, &self.scale_eta)
    }

    /// The entries with `r_min ≤ r ≤ r_max`, for comparing grids on a common window.
    pub fn within(&self, r_min: f64, r_max: f64) -> Self {
        let keep: Vec<usize> = (0..self.r.len()).filter(|&i| self.r[i] >= r_min && self.r[i] <= r_max).collect();
        let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        let mut out = Self {
            entry: keep.iter().map(|&i| self.entry[i]).collect(),
            r: pick(&self.r),
            res_x: pick(&self.res_x),
            res_y: pick(&self.res_y),
            res_y_dyn: pick(&self.res_y_dyn),
            res_eta: pick(&self.res_eta),
            scale_x: pick(&self.scale_x),
            scale_y: pick(&self.scale_y),
            scale_y_dyn: pick(&self.scale_y_dyn),
            scale_eta: pick(&self.scale_eta),
            magnitude: pick(&self.magnitude),
            global_scale: 0.0,
        };
        out.global_scale = out.magnitude.iter().copied().fold(0.0, f64::max);
        out
    }

    fn max_global(&self, res: &[f64]) -> f64 {
        if self.global_scale > 0.0 {
            res.iter().map(|r| r.abs()).fold(0.0, f64::max) / self.global_scale
        } else {
            0.0
        }
    }

    pub fn max_global_x(&self) -> f64 {
        self.max_global(&self.res_x)
    }

    pub fn max_global_y(&self) -> f64 {
        self.max_global(&self.res_y)
    }

    pub fn max_global_y_dyn(&self) -> f64 {
        self.max_global(&self.res_y_dyn)
    }
}

/// Largest neighbour spacing allowed, as a fraction of the distance to the radius.
pub const RESOLUTION_FRACTION: f64 = 0.05;

/// Derivative at `x[c]` of the Lagrange interpolant through all nodes of the stencil.
fn stencil_derivative(x: &[f64], f: &[f64], c: usize) -> f64 {
    let xc = x[c];
    let mut d = 0.0;
    for i in 0..x.len() {
        let w = if i == c {
            (0..x.len()).filter(|&m| m != c).map(|m| 1.0 / (xc - x[m])).sum::<f64>()
        } else {
            let mut num = 1.0;
            let mut den = 1.0;
            for m in 0..x.len() {
                if m != i {
                    den *= x[i] - x[m];
                    if m != c {
                        num *= xc - x[m];
                    }
                }
            }
            num / den
        };
        d += w * f[i];
    }
    d
}

/// Half-width of the centred difference stencil (fourth order).
pub const STENCIL_HALF_WIDTH: usize = 2;

/// Residuals with five-point centred differences for `x′`, `y′` and the stored `φ′`
/// for `η′ = −φ′`, at entries whose stencil consists of consecutive grid nodes and
/// spans at most [`RESOLUTION_FRACTION`] of the distance to `radius` per gap.
pub fn xy_residuals(diag: &FiniteRadiusDiagnostics, profile: &RadialProfile, radius: f64) -> XyResiduals {
    let k = profile.ansatz.k;
    let s = STENCIL_HALF_WIDTH;
    let mut out = XyResiduals::default();
    if diag.len() < 2 * s + 1 {
        return out;
    }
    let mut gscale: f64 = 0.0;
    for j in s..diag.len() - s {
        let win = j - s..j + s + 1;
        let idx = &diag.node_index[win.clone()];
        if idx.windows(2).any(|w| w[1] != w[0] + 1) {
            continue;
        }
        let r = &diag.r[win.clone()];
        let r1 = diag.r[j];
        let gap = r.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        if gap > RESOLUTION_FRACTION * (radius - r1) {
            continue;
        }
        let dx = stencil_derivative(r, &diag.x[win.clone()], s);
        let dy = stencil_derivative(r, &diag.y[win], s);
        let deta = -profile.dphi[diag.node_index[j]];
        let (x, y, eta) = (diag.x[j], diag.y[j], diag.eta[j]);
        let (alpha, beta, beta_dyn) = (diag.alpha[j], diag.beta[j], diag.beta_dyn[j]);

        out.entry.push(j);
        out.r.push(r1);
        out.res_x.push(r1 * dx - (-x + x * x + alpha * y));
        out.res_y.push(r1 * dy - ((2.0 + 2.0 * k) * y - beta * x * y));
        out.res_y_dyn.push(r1 * dy - ((2.0 + 2.0 * k) * y - beta_dyn * x * y));
        out.res_eta.push(r1 * deta + eta * x);
        out.scale_x.push(x.abs() + x * x + (alpha * y).abs());
        out.scale_y.push(((2.0 + 2.0 * k) * y).abs() + (beta * x * y).abs());
        out.scale_y_dyn.push(((2.0 + 2.0 * k) * y).abs() + (beta_dyn * x * y).abs());
        out.scale_eta.push((eta * x).abs());
        out.magnitude.push((x * x).max(y));
        gscale = gscale.max(x * x).max(y);
    }
    out.global_scale = gscale;
    out
}
