use std::path::PathBuf;

/// Errors produced anywhere in the workbench.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("tape does not match the model it is applied to: {0}")]
    StaleTape(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trajectory of length {len} is shorter than window size {window}")]
    TrajectoryTooShort { len: usize, window: usize },

    #[error("recording '{0}' has no end-of-life marker")]
    NoEndOfLife(String),

    #[error("fleet of {available} trajectories cannot provide {requested}")]
    InsufficientFleet { available: usize, requested: usize },

    #[error("sequence is not consecutive within one trajectory at position {0}")]
    NonConsecutive(usize),

    #[error("no data: {0}")]
    EmptyData(&'static str),

    #[error("training diverged at epoch {epoch} (non-finite loss)")]
    Divergence { epoch: usize },

    #[error("design matrix is rank deficient; use a nonzero ridge")]
    RankDeficient,

    #[error("eigenvalue iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("simulation did not reach end of life within {0} cycles")]
    NonTerminating(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => 2,
            Error::Divergence { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
