use thiserror::Error;

/// Errors raised by the library. Each variant maps to a stable code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("undefined transition for state {state} on letter {letter}")]
    UndefinedTransition { state: String, letter: String },
    #[error("state {0} is not invertible")]
    NotInvertible(String),
    #[error("no periodic residual found within {0} period passes")]
    NonPeriodicResidual(usize),
    #[error("exploration exceeded the cap of {0} configurations")]
    CapExceeded(usize),
    #[error("nucleus still growing after {0} rounds")]
    NotContractingUpToBound(usize),
    #[error("group is not bounded")]
    NotBounded,
    #[error("missing colour for vertex {0}")]
    MissingColour(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("extent {0} too large")]
    ExtentTooLarge(usize),
    #[error("black set is not connected")]
    DisconnectedBlackSet,
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::UndefinedTransition { .. } => "undefined_transition",
            Error::NotInvertible(_) => "not_invertible",
            Error::NonPeriodicResidual(_) => "non_periodic_residual",
            Error::CapExceeded(_) => "cap_exceeded",
            Error::NotContractingUpToBound(_) => "not_contracting_up_to_bound",
            Error::NotBounded => "not_bounded",
            Error::MissingColour(_) => "missing_colour",
            Error::DomainMismatch(_) => "domain_mismatch",
            Error::UnknownName(_) => "unknown_name",
            Error::ExtentTooLarge(_) => "extent_too_large",
            Error::DisconnectedBlackSet => "disconnected_black_set",
            Error::Internal(_) => "internal",
        }
    }

    /// True for errors caused by a resource cap rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded(_)
                | Error::NotContractingUpToBound(_)
                | Error::NonPeriodicResidual(_)
                | Error::ExtentTooLarge(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
