use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument is outside its domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,

    /// A σ function violates the admissibility conditions at parameter `t`.
    #[error("invalid sigma at t = {t}: {reason}")]
    InvalidSigma { t: f64, reason: String },

    /// A closed-form angle needs a declared derivative that is absent.
    #[error("angle existence unknown: {0}; measure it numerically instead")]
    ExistenceUnknown(&'static str),

    #[error("construction failed: {message} ({suggestion})")]
    Construction { message: String, suggestion: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::DegenerateSegment => "degenerate-segment",
            Error::InvalidSigma { .. } => "invalid-sigma",
            Error::ExistenceUnknown(_) => "existence-unknown",
            Error::Construction { .. } => "construction",
        }
    }
}
