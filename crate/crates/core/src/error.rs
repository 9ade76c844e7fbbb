use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("directory not found: {0}")]
    MissingDirectory(PathBuf),

    #[error("no recordings found in {0}")]
    NoRecordings(PathBuf),

    #[error("empty recording file: {0}")]
    EmptyRecording(PathBuf),

    #[error("{path}:{line}: cannot parse {content:?} as an integer amplitude")]
    Parse {
        path: PathBuf,
        line: usize,
        content: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("missing set {0} for task")]
    MissingSet(String),

    #[error("unsupported wavelet {0:?}")]
    UnsupportedWavelet(String),

    #[error("singular denominator in {context}: right operand not positive definite after ridge {ridge:e}")]
    SingularDenominator { context: String, ridge: f64 },

    #[error("eigen residual {residual:e} exceeds bound {bound:e}")]
    Residual { residual: f64, bound: f64 },

    #[error("degenerate hyperplane in {0}: normal vector vanishes")]
    DegeneratePlane(String),

    #[error("zero denominator in Rayleigh quotient")]
    ZeroDenominator,

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no nonzero differences")]
    NoNonzeroDifferences,

    #[error("empty grid")]
    EmptyGrid,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
