use thiserror::Error;

/// Errors produced by the numerical kernels and separators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// The pencil (R, J) has complex or defective generalized eigenvalues.
    #[error("degenerate pencil: {0}")]
    DegeneratePencil(String),

    /// `R + lambda J` is singular or too badly conditioned to solve.
    #[error("singular shift (condition estimate {condition:e})")]
    SingularShift { condition: f64 },

    #[error("degenerate covariance: {found} significant eigenvalues, {needed} required")]
    DegenerateCovariance { found: usize, needed: usize },

    #[error("singular matrix: {0}")]
    Singular(String),
}

impl Error {
    /// Short stable identifier, used in CSV error columns.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::IndexOutOfRange(_) => "index_out_of_range",
            Error::DegeneratePencil(_) => "degenerate_pencil",
            Error::SingularShift { .. } => "singular_shift",
            Error::DegenerateCovariance { .. } => "degenerate_covariance",
            Error::Singular(_) => "singular_matrix",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
