use thiserror::Error;

/// Errors raised by the model, the solvers and the identity checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("coordinate x = {x} outside collar |x| <= {half_width}")]
    OutOfDomain { x: f64, half_width: f64 },

    #[error("seam: curvature discontinuous at x = {x}")]
    Seam { x: f64 },

    #[error("point ({x}, {y}) outside the flat stratum")]
    OutsideFlatStratum { x: f64, y: f64 },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("no periodic solution: forcing mean {mean} does not vanish")]
    NoPeriodicSolution { mean: f64 },

    #[error("expected {expected} trace, got {found}")]
    TraceKind { expected: &'static str, found: &'static str },

    #[error("mismatched truncation: {left} vs {right} modes")]
    MismatchedTruncation { left: usize, right: usize },

    #[error("variation field is {found}, operation requires {expected}")]
    Amendment { expected: &'static str, found: &'static str },

    #[error("conformal factor 1 + tH non-positive ({value}) at ({x}, {y})")]
    NonPositiveFactor { value: f64, x: f64, y: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate Dirichlet-to-Neumann ratio: seam value vanished for mode {n}")]
    DegenerateDtn { n: usize },

    #[error("graft height s = 0 with nonzero s_rate: d/dt log s undefined")]
    ZeroHeightRate,

    #[error("quadratic-differential data not supported by {0}")]
    QuadUnsupported(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
