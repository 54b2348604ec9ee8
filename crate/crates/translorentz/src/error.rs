use thiserror::Error;

/// Errors shared by the geometric layers of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] crate::expr::ParseError),

    #[error(transparent)]
    Eval(#[from] crate::jet::EvalError),

    /// The metric violates the adapted normal form (g_m != 2 on the
    /// hypersurface, screen block not positive definite, ...).
    #[error("normal-form violation at {point:?}: {message}")]
    NormalForm { message: String, point: Vec<f64> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The metric has no inverse at this point (it lies on Sigma).
    #[error("singular metric at {0:?}")]
    SingularMetric(Vec<f64>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
