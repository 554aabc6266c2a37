//! Dormand–Prince 5(4) with the 4th-order continuous extension.
//!
//! The stepper is deliberately low level: callers drive it one accepted step
//! at a time, which is what both the field solver (stops on a level crossing)
//! and the orbit integrator (fixed parameter span) need.

use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// A first-order system `y' = f(t, y)` of fixed dimension.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]>;
}

/// Step-size controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepController {
    /// Classical elementary controller `fac = 0.9·err^{-1/5}`.
    Integral,
    /// Gustafsson-type PI controller (β = 0.04).
    ProportionalIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub controller: StepController,
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment<const N: usize> {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t ∈ [t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let mut y = [0.0; N];
        for i in 0..N {
            let r = &self.rcont;
            y[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        y
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AcceptedStep<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dense: DenseSegment<N>,
}

/// Adaptive stepper state (current step size, FSAL derivative, controller memory).
#[derive(Debug, Clone)]
pub struct Stepper<const N: usize> {
    cfg: StepperConfig,
    h: f64,
    fsal: Option<[f64; N]>,
    err_old: f64,
    rejected_last: bool,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl<const N: usize> Stepper<N> {
    pub fn new(cfg: StepperConfig, h_init: f64) -> Self {
        Self { cfg, h: h_init.min(cfg.max_step), fsal: None, err_old: 1e-4, rejected_last: false }
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    /// Take one accepted step from `(t, y)`, never going beyond `t_limit`.
    pub fn step<S: OdeSystem<N>>(&mut self, sys: &S, t: f64, y: &[f64; N], t_limit: f64) -> Result<AcceptedStep<N>> {
        let k1 = match self.fsal {
            Some(k) => k,
            None => sys.rhs(t, y)?,
        };
        loop {
            let mut h = self.h.min(self.cfg.max_step);
            let mut last = false;
            if t + h >= t_limit {
                h = t_limit - t;
                last = true;
            }
            if h <= 16.0 * f64::EPSILON * t.abs().max(1e-300) || !(h > 0.0) {
                return Err(Error::StepSizeUnderflow { r: t, h });
            }

            let k2 = sys.rhs(t + C2 * h, &axpy(y, h, &[(A21, &k1)]))?;
            let k3 = sys.rhs(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = sys.rhs(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = sys.rhs(t + C5 * h, &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
            let k6 = sys.rhs(
                t + h,
                &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            )?;
            let y1 = axpy(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let t1 = if last { t_limit } else { t + h };
            let k7 = sys.rhs(t1, &y1)?;

            let mut err = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.cfg.abs_tol + self.cfg.rel_tol * y[i].abs().max(y1[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = libm::sqrt(err / N as f64);
            if !err.is_finite() {
                self.h = 0.1 * h;
                self.rejected_last = true;
                continue;
            }

            let fac = match self.cfg.controller {
                StepController::Integral => 0.9 * libm::pow(err.max(1e-10), -0.2),
                StepController::ProportionalIntegral => {
                    let beta = 0.04;
                    0.9 * libm::pow(err.max(1e-10), -(0.2 - 0.75 * beta)) * libm::pow(self.err_old, beta)
                }
            };

            if err <= 1.0 {
                let mut fac = fac.clamp(0.2, 10.0);
                if self.rejected_last {
                    fac = fac.min(1.0);
                }
                self.err_old = err.max(1e-4);
                self.rejected_last = false;
                self.fsal = Some(k7);
                if !last {
                    self.h = (h * fac).min(self.cfg.max_step);
                }

                let mut rcont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    rcont[0][i] = y[i];
                    rcont[1][i] = ydiff;
                    rcont[2][i] = bspl;
                    rcont[3][i] = ydiff - h * k7[i] - bspl;
                    rcont[4][i] =
                        h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                return Ok(AcceptedStep { t: t1, y: y1, dense: DenseSegment { t0: t, h: t1 - t, rcont } });
            }
            self.rejected_last = true;
            self.h = h * fac.clamp(0.1, 0.9);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator;
    impl OdeSystem<2> for Oscillator {
        fn rhs(&self, _t: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
            Ok([y[1], -y[0]])
        }
    }

    fn run(controller: StepController, tol: f64) -> (f64, usize, f64) {
        let cfg = StepperConfig { abs_tol: tol, rel_tol: tol, max_step: 1.0, controller };
        let mut st = Stepper::new(cfg, 0.01);
        let (mut t, mut y) = (0.0, [1.0, 0.0]);
        let mut n = 0;
        let mut dense_err: f64 = 0.0;
        while t < 10.0 {
            let s = st.step(&Oscillator, t, &y, 10.0).unwrap();
            let tm = 0.5 * (s.dense.t0 + s.dense.t1());
            dense_err = dense_err.max((s.dense.eval(tm)[0] - libm::cos(tm)).abs());
            t = s.t;
            y = s.y;
            n += 1;
        }
        ((y[0] - libm::cos(10.0)).abs(), n, dense_err)
    }

    #[test]
    fn harmonic_oscillator_accuracy() {
        for c in [StepController::Integral, StepController::ProportionalIntegral] {
            let (err, n, dense) = run(c, 1e-10);
            assert!(err < 1e-8, "{c:?}: end error {err}");
            assert!(dense < 1e-8, "{c:?}: dense error {dense}");
            assert!(n < 2000);
        }
    }

    #[test]
    fn error_tracks_tolerance() {
        let (e1, n1, _) = run(StepController::Integral, 1e-6);
        let (e2, n2, _) = run(StepController::Integral, 1e-10);
        assert!(e2 < e1 && n2 > n1);
    }

    #[test]
    fn dense_output_hits_endpoints() {
        let cfg = StepperConfig { abs_tol: 1e-9, rel_tol: 1e-9, max_step: 0.5, controller: StepController::Integral };
        let mut st = Stepper::new(cfg, 0.1);
        let s = st.step(&Oscillator, 0.0, &[1.0, 0.0], 1.0).unwrap();
        assert_eq!(s.dense.eval(s.dense.t0), [1.0, 0.0]);
        let end = s.dense.eval(s.dense.t1());
        assert!((end[0] - s.y[0]).abs() < 1e-15 && (end[1] - s.y[1]).abs() < 1e-15);
    }

    #[test]
    fn respects_limit() {
        let cfg = StepperConfig { abs_tol: 1e-6, rel_tol: 1e-6, max_step: 10.0, controller: StepController::Integral };
        let mut st = Stepper::new(cfg, 5.0);
        let s = st.step(&Oscillator, 0.0, &[1.0, 0.0], 0.25).unwrap();
        assert_eq!(s.t, 0.25);
    }
}
