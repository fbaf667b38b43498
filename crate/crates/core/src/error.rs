use thiserror::Error;

/// Errors raised by the algebra, design and testing layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("universe mismatch: expected {expected} indeterminates, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("leading term of the zero polynomial is undefined")]
    ZeroPolynomial,

    #[error("coefficient field error: {0}")]
    Coefficient(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("ideal is not zero-dimensional: no pure power of {0} among the leading terms")]
    NotZeroDimensional(String),

    #[error("term order is not an elimination order for {0}")]
    OrderMismatch(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("defining words are dependent over GF(2)")]
    Rank,

    #[error("problem too large: {0}")]
    Scale(String),

    #[error("not an indicator function: {0}")]
    InvalidIndicator(String),

    #[error("terms are not simultaneously estimable: {0}")]
    Estimability(String),

    #[error("cannot recode covariate matrix: {0}")]
    Recoding(String),

    #[error("GLM fit did not converge: {0}")]
    Convergence(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors caused by resource caps rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Budget(_) | Error::Scale(_))
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
