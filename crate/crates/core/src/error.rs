use crate::game::Region;

/// Errors produced by the solver, geometry and simulation layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:.3e})")]
    SolverFailure {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("target set has no smooth boundary description ({0})")]
    NoSmoothBoundary(&'static str),

    #[error("point is not on the target boundary (level value {level:.3e})")]
    NotOnBoundary { level: f64 },

    #[error("boundary gradient vanishes")]
    VanishingGradient,

    #[error("ray from the interior anchor does not reach the boundary")]
    RayCast,

    #[error("query point lies inside the target set")]
    QueryInsideTarget,

    #[error("state is in {found:?}, operation requires {expected:?} (barrier value {value:.3e})")]
    WrongRegion {
        expected: Region,
        found: Region,
        value: f64,
    },

    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),

    #[error("feasible set of the attack-point problem is empty")]
    EmptyFeasibleSet,

    #[error("policy {policy} cannot be used by the {role}")]
    PolicyRoleMismatch {
        policy: &'static str,
        role: &'static str,
    },

    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },

    #[error("strategy evaluation failed at step {step}: {source}")]
    Strategy {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
