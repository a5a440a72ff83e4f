use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the navigation pipeline.
///
/// Variants split into two families: validation errors (bad arguments,
/// malformed files, degenerate geometry) and numerical-divergence errors.
/// The CLI maps the former to exit code 2 and the latter to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid rotation matrix: {0}")]
    InvalidRotation(String),

    #[error("latitude {lat_rad} rad too close to a pole for this operation")]
    SingularLatitude { lat_rad: f64 },

    #[error("timestamps not strictly increasing at index {index} (t={t})")]
    NonMonotoneTimestamps { index: usize, t: f64 },

    #[error("sequence length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("degenerate observation geometry: {0}")]
    DegenerateGeometry(String),

    #[error("ambiguous attitude: Wahba profile has a repeated dominant eigenvalue")]
    AmbiguousAttitude,

    #[error("insufficient excitation: {0}")]
    InsufficientExcitation(String),

    #[error("only {valid} valid beams, at least {required} required")]
    InsufficientBeams { valid: usize, required: usize },

    #[error("rank-deficient system: {0}")]
    RankDeficient(String),

    #[error("filter diverged: {0}")]
    FilterDiverged(String),

    #[error("CSV schema mismatch: expected header '{expected}', found '{found}'")]
    SchemaMismatch { expected: String, found: String },

    #[error("malformed record at row {row}: {message}")]
    MalformedRecord { row: usize, message: String },

    #[error("unknown strategy '{name}' for {family}; known: {known}")]
    UnknownStrategy {
        family: &'static str,
        name: String,
        known: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("stage dependency violation: {0}")]
    StageDependency(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 2 for validation errors, 3 for
    /// numerical divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::FilterDiverged(_) => 3,
            _ => 2,
        }
    }

    /// Wraps an I/O error with the path it occurred on.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
