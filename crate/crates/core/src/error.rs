use thiserror::Error;

/// Errors raised by the junction solvers and evaluators.
#[derive(Debug, Error)]
pub enum Error {
    /// A doubling bracket search ran past its cap; the input is most likely
    /// not coercive (or, for junction functions, not monotone).
    #[error("bracket expansion exceeded its cap while {0}")]
    BracketExpansion(&'static str),

    #[error("level {level} is below the branch minimum {minimum}")]
    LevelBelowMinimum { level: f64, minimum: f64 },

    /// The objective kept increasing up to the search cap.
    #[error("divergent maximization: {0}")]
    Divergence(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("node {0} does not lie on the junction interface")]
    NotInterface(usize),

    #[error("gradient requested on the singular set x = y > 0 of a single branch")]
    SingularSet,

    #[error("time step {dt} exceeds the CFL bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad
    /// input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BracketExpansion(_)
                | Error::LevelBelowMinimum { .. }
                | Error::Divergence(_)
                | Error::NonConvergence(_)
                | Error::CflViolation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
