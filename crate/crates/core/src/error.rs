use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for {n_bits}-bit encoding")]
    IndexOutOfRange { index: u64, n_bits: usize },

    #[error("{what} needs {n_spins} spins, above the limit of {limit}")]
    GuardExceeded {
        what: &'static str,
        n_spins: usize,
        limit: usize,
    },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("innovation covariance is singular")]
    SingularInnovation,

    #[error("weights do not sum to one (sum = {0})")]
    WeightNormalization(f64),

    #[error("empty hypothesis list")]
    EmptyHypotheses,

    #[error("sampler returned no feasible configuration in {n_shots} shots")]
    NoFeasibleConfiguration { n_shots: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InvalidModel(_) => "invalid-model",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::GuardExceeded { .. } => "guard-exceeded",
            Error::NotNormalized(_) => "not-normalized",
            Error::InvalidDensityMatrix(_) => "invalid-density-matrix",
            Error::Eigensolver(_) => "eigensolver",
            Error::SingularInnovation => "singular-innovation",
            Error::WeightNormalization(_) => "weight-normalization",
            Error::EmptyHypotheses => "empty-hypotheses",
            Error::NoFeasibleConfiguration { .. } => "no-feasible-configuration",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
