use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the planning toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("hull must contain at least one point")]
    EmptyHull,
    #[error("pose list must not be empty")]
    EmptyPath,
    #[error("interpolation fraction {0} outside [0, 1]")]
    FractionOutOfRange(f64),
    #[error("configuration has {got} values but the chain has {expected} joints")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid kinematic chain: {0}")]
    InvalidChain(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("J J^T is singular and no damping was given")]
    SingularJacobian,
    #[error("damping must be non-negative, got {0}")]
    NegativeDamping(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("roadmap needs at least 2 vertices, got {0}")]
    RoadmapTooSmall(usize),
    #[error("goal set is empty")]
    EmptyGoalSet,
    #[error("closed list is empty")]
    EmptyClosedList,
    #[error("start configuration is in collision")]
    StartInCollision,
    #[error("start configuration violates joint limits")]
    StartOutOfLimits,
    #[error("roadmap file format version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("roadmap was built for chain {found}, but the loaded chain hashes to {expected}")]
    ChainHashMismatch { expected: String, found: String },
    #[error("corrupt roadmap file: {0}")]
    CorruptFile(String),
    #[error("scene parse error at line {line}, column {column}: {message}")]
    SceneParse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate obstacle id {0}")]
    DuplicateId(u32),
    #[error("clutter placement stalled at fraction {achieved:.4} (target {target:.4})")]
    ClutterPlacement { achieved: f64, target: f64 },
    #[error("only {achieved} of {requested} collision-free samples found")]
    InsufficientSamples { requested: usize, achieved: usize },
    #[error("malformed csv: {0}")]
    MalformedCsv(String),
    #[error("no rows to aggregate")]
    EmptyReport,
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
