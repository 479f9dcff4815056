use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spin value {0} is not -1 or +1")]
    InvalidSpin(i64),

    #[error("configuration has {got} spins, expected {expected} for side {side}")]
    ShapeMismatch {
        side: usize,
        expected: usize,
        got: usize,
    },

    #[error("torus side must be positive")]
    EmptyTorus,

    #[error("block of radius {n} (width {}) does not fit a torus of side {side}", 2 * n + 1)]
    BlockTooLarge { n: usize, side: usize },

    #[error("sublattice basis is singular")]
    SingularBasis,

    #[error("torus side {side} is not compatible with the sublattice (minimal side {minimal})")]
    IncompatibleTorus { side: usize, minimal: usize },

    #[error("invalid antisymmetric spec: {0}")]
    InvalidAntisym(String),

    #[error("cylinder set is empty")]
    EmptyCylinder,

    #[error("inverse temperature must be positive and finite, got {0}")]
    InvalidBeta(f64),

    #[error("neighbor sum {0} is not achievable on the square lattice")]
    InvalidField(i32),

    #[error("invalid time horizon {0}")]
    InvalidHorizon(f64),

    #[error("invalid noise stream: {0}")]
    InvalidNoise(String),

    #[error("noise side {noise} does not match configuration side {config}")]
    NoiseMismatch { noise: usize, config: usize },

    #[error("tie detected: two rings at time {time} (sites {first} and {second})")]
    TieDetected {
        time: f64,
        first: usize,
        second: usize,
    },

    #[error("mark-boundary collision at time {time}, site {site}: mark equals update probability")]
    MarkBoundary { time: f64, site: usize },

    #[error("invalid mesh width {0}")]
    InvalidMesh(f64),

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("sector proxy requires beta above the critical point, got {0}")]
    NotOrdered(f64),

    #[error("band half-width {epsilon} must lie in (0, {limit})")]
    InvalidBand { epsilon: f64, limit: f64 },

    #[error("exact enumeration supports sides {min}..={max}, got {got}")]
    EnumerationTooLarge { min: usize, max: usize, got: usize },

    #[error("unknown observable {0:?}")]
    UnknownObservable(String),

    #[error("configuration error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("partial results come from different configurations")]
    MixedConfigs,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
