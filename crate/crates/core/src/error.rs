use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dyadic index {k} outside [{lo}, {hi}]")]
    IndexOutOfRange { k: i32, lo: i32, hi: i32 },

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("non-finite value at cell {0}")]
    NonFinite(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exponent outside its admissible class: {0}")]
    ExponentClass(String),

    #[error("root not isolated after {iterations} iterations, bracket [{lo:e}, {hi:e}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("filter bank: {0}")]
    FilterBank(String),

    #[error("band limit violated, relative spillover energy {0:e}")]
    BandLimit(f64),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    /// Failures of a computation on valid input, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Self::NonFinite(_) | Self::NoConvergence { .. } | Self::BandLimit(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
