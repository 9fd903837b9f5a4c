use std::path::PathBuf;

use framecurve_core::Error as CoreError;
use framecurve_core::hopf::Periodicity;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error(
        "parity mismatch: first input is {} and second is {}; pass --allow-parity-transfer to transfer the second",
        .left.as_str(),
        .right.as_str()
    )]
    ParityMismatch { left: Periodicity, right: Periodicity },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// 2 for rejected input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) => match e {
                CoreError::ZeroLocus { .. }
                | CoreError::DiscontinuousLift { .. }
                | CoreError::NotUnitary { .. }
                | CoreError::DegenerateSpan { .. }
                | CoreError::NonTransverse { .. }
                | CoreError::BandTooNarrow
                | CoreError::NonConvergent { .. }
                | CoreError::IllConditioned { .. } => 3,
                _ => 2,
            },
            Error::Io { .. } | Error::Format { .. } | Error::ParityMismatch { .. } | Error::Config(_) => 2,
        }
    }
}
