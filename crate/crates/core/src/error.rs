use thiserror::Error;

pub type Result<T> = std::result::Result<T, FfcError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FfcError {
    /// A scalar parameter lies outside its admissible interval.
    #[error("{name} = {value} is outside the admissible range {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("not a valid density matrix: {reason}")]
    InvalidState { reason: String },

    #[error("prior probabilities must be nonnegative and sum to 1 (got {q_plus} + {q_minus})")]
    InvalidPriors { q_plus: f64, q_minus: f64 },

    #[error("Kraus elements are not complete (deviation {deviation:.3e})")]
    IncompleteChannel { deviation: f64 },

    #[error("invalid branch index {0}, expected 1 or 2")]
    InvalidBranch(u8),

    /// Selective update whose acceptance probability is at or below the cutoff.
    #[error("impossible outcome (selection probability {prob:.3e})")]
    ImpossibleOutcome { prob: f64 },

    #[error("protocol never succeeds: both branches have zero selection probability")]
    NeverSucceeds,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl FfcError {
    pub(crate) fn domain(name: &'static str, value: f64, range: impl Into<String>) -> Self {
        FfcError::Domain {
            name,
            value,
            range: range.into(),
        }
    }
}

/// Checks `value ∈ [lo, hi]` and rejects NaN.
pub(crate) fn check_closed(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(FfcError::domain(name, value, format!("[{lo}, {hi}]")))
    }
}
