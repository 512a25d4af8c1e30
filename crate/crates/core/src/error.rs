use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mirror: {0}")]
    InvalidMirror(String),

    #[error("invalid propagation segment: {0}")]
    InvalidSegment(String),

    #[error("invalid cavity chain: {0}")]
    InvalidChain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("no coupling transmission in (0, 1) yields a splitting of {omega_sp} rad/s: {reason}")]
    NoRootInBracket { omega_sp: f64, reason: String },

    #[error("expected two resonance peaks, found {found}")]
    PeaksNotFound { found: usize },

    #[error("field equations are singular at {omega} rad/s")]
    SingularSystem { omega: f64 },

    #[error("sideband frequency must be nonzero")]
    DegenerateFrequency,

    #[error("readout carries no signal at {frequency_hz} Hz")]
    NoSignal { frequency_hz: f64 },

    #[error("peak-sensitivity matching failed: {0}")]
    MatchingFailed(String),
}

impl Error {
    /// True for errors raised by a numerical procedure rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoRootInBracket { .. }
                | Error::PeaksNotFound { .. }
                | Error::SingularSystem { .. }
                | Error::DegenerateFrequency
                | Error::NoSignal { .. }
                | Error::MatchingFailed(_)
        )
    }
}
