//! Spherically symmetric steady states of the Nordström–Vlasov system.
//!
//! The crate solves the reduced field equation
//!
//! ```text
//! (r² φ')' = π c_{k,-1/2} r^{2k+2} e^{2φ} h_{k+1/2}(e^φ)
//! ```
//!
//! for particle densities of the polytropic form `Φ(E, F) = Ψ(E) F^k`,
//! evaluates the matter observables on the solution, builds the
//! finite-radius diagnostics `(q, m, η, x, y, α, β)` and integrates stellar
//! orbits in the computed field.
//!
//! Everything here is `no_std` + `alloc`; file formats, the CLI and parameter
//! scans live in the `nvsteady-cli` crate.
//!
//! ```
//! use nvsteady::{PolytropicAnsatz, SolverNumerics, solver};
//!
//! let e0 = 0.9_f64.sqrt();
//! let ansatz = PolytropicAnsatz::energy_weighted(0.0, 0.5, e0, 1.0).unwrap();
//! let numerics = SolverNumerics::default();
//! let profile = solver::integrate_steady_state((0.5 * e0).ln(), &ansatz, &numerics).unwrap();
//! let radius = solver::detect_radius(&profile, &ansatz, &numerics);
//! assert!(radius.is_some());
//! ```
#![no_std]
#![allow(clippy::too_many_arguments, clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod interp;

pub mod ansatz;
pub mod characteristics;
pub mod finite_radius;
pub mod observables;
pub mod ode;
pub mod solver;
pub mod special;

pub use ansatz::{PolytropicAnsatz, PsiTable, PsiVariant};
pub use error::{Error, Result};
pub use finite_radius::FiniteRadiusDiagnostics;
pub use observables::{ObservableProfile, SteadyStateSummary};
pub use solver::{Closure, RadialProfile, SolverNumerics};
