use thiserror::Error;

/// Errors produced by the engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller broke an operation's documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("barrier method stalled after {newton_steps} Newton steps (last certified gap {gap:e})")]
    Barrier { newton_steps: usize, gap: f64 },

    #[error("instance too large: estimated {estimate} evaluations exceeds cap {cap}")]
    TooLarge { estimate: u128, cap: u128 },

    #[error("setting {setting}: {source}")]
    Setting {
        setting: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// True when the error (or the error it wraps) is a precondition failure
    /// on caller-supplied data.
    pub fn is_contract_violation(&self) -> bool {
        match self {
            Error::Contract(_) | Error::Parse(_) => true,
            Error::Setting { source, .. } => source.is_contract_violation(),
            _ => false,
        }
    }

    pub fn is_too_large(&self) -> bool {
        matches!(self, Error::TooLarge { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
