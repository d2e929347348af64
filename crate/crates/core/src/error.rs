use alloc::string::String;

use thiserror::Error;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The effective transmittance reached 1, where the asymptotic
    /// formulas contain a divergent `1/(1 - eta')`.
    #[error("singular channel: effective transmittance {eta_eff} must be below 1")]
    SingularChannel { eta_eff: f64 },

    #[error("PLOB bound diverges for transmittance {eta}")]
    InfiniteCapacity { eta: f64 },

    #[error("key rate never crosses zero in excess noise at eta = {eta}")]
    NoThreshold { eta: f64 },

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}

pub(crate) use invalid;
