//! Beta coefficients, the kernels `h_m`/`g_m`, and the quadrature behind them.

pub mod gamma;
pub mod kernels;
pub mod quadrature;

pub use gamma::{beta_coeff, gamma};
pub use kernels::{closed_form_h, eval_g, eval_h, eval_h_derivative, Kernels};
pub use quadrature::QuadratureConfig;
