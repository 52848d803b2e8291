use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not positive semidefinite ({0})")]
    NotPsd(String),

    #[error("degenerate spectrum: total power is zero")]
    DegenerateSpectrum,

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("training diverged at epoch {epoch}: {detail}")]
    Diverged { epoch: usize, detail: String },

    #[error("stale tape: parameters were updated after the recorded forward pass")]
    StaleTape,

    #[error("degenerate peak: ground-truth log dynamic range is zero")]
    DegeneratePeak,

    #[error("non-positive input in {0}")]
    NonPositiveInput(String),

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code class used by the command-line front end:
    /// 2 config, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) | Error::Format(_) | Error::ShapeMismatch(_) | Error::OutOfBounds(_) => 3,
            _ => 4,
        }
    }
}
