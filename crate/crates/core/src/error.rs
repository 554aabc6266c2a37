use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Ansatz parameters violate an admissibility condition.
    InvalidAnsatz(&'static str),
    /// Solver tolerances or lengths are not usable.
    InvalidNumerics(&'static str),
    /// Adaptive quadrature ran out of panels before meeting its tolerance.
    QuadratureNonConvergence { estimate: f64, error: f64, panels: usize },
    /// The central Picard operator did not contract even after shrinking the seed interval.
    ContractionFailure { delta: f64 },
    /// The adaptive integrator needed a step below the representable resolution.
    StepSizeUnderflow { r: f64, h: f64 },
    /// A global integral needs a closed support but the run ended at `max_radius`.
    OpenSupport { radius: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::InvalidAnsatz(msg) => write!(f, "invalid ansatz: {msg}"),
            Error::InvalidNumerics(msg) => write!(f, "invalid solver numerics: {msg}"),
            Error::QuadratureNonConvergence { estimate, error, panels } => write!(
                f,
                "quadrature did not converge: estimate {estimate}, error {error} after {panels} panels"
            ),
            Error::ContractionFailure { delta } => {
                write!(f, "central Picard iteration failed to contract (delta = {delta})")
            }
            Error::StepSizeUnderflow { r, h } => {
                write!(f, "step size underflow at r = {r} (h = {h})")
            }
            Error::OpenSupport { radius } => {
                write!(f, "matter extends to max_radius = {radius}; global integral is not converged")
            }
        }
    }
}

impl core::error::Error for Error {}
