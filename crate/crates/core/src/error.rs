use thiserror::Error;

/// Failures surfaced by every numeric operation in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series diverges: {0}")]
    Divergent(String),

    /// The term or node budget ran out before the error estimate reached tolerance.
    /// `best` is the last value computed, `estimate` its (relative) error estimate.
    #[error("budget exhausted after {used} terms/nodes: best {best:.6e}, estimate {estimate:.3e}")]
    BudgetExhausted { best: f64, estimate: f64, used: usize },

    #[error("quadrature did not converge by level {level}: best {best:.6e}, estimate {estimate:.3e}")]
    Quadrature { best: f64, estimate: f64, level: u32 },

    #[error("strategy precondition violated: {0}")]
    Strategy(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
