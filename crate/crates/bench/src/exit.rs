use std::io;

/// Process exit codes of `stiefelbench`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    Usage = 1,
    PropertyFailure = 2,
    NumericFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("invalid configuration: {0}")]
    Usage(String),
    #[error("property failure: {0}")]
    Property(String),
    #[error("non-finite value at step {step}")]
    NonFinite { step: u64 },
    #[error(transparent)]
    Core(#[from] stiefel_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Failure {
    pub fn status(&self) -> ExitStatus {
        use stiefel_core::Error as E;
        match self {
            Failure::Usage(_) | Failure::Io(_) | Failure::Csv(_) => ExitStatus::Usage,
            Failure::Core(E::InvalidArgument(_)) | Failure::Core(E::DimensionMismatch { .. }) => ExitStatus::Usage,
            Failure::Core(E::NonFiniteGradient) | Failure::NonFinite { .. } => ExitStatus::NumericFailure,
            Failure::Property(_) | Failure::Core(_) => ExitStatus::PropertyFailure,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}
