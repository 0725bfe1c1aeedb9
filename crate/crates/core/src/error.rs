use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("cannot parse region descriptor `{0}`")]
    BadDescriptor(String),

    #[error("cannot parse configuration `{0}`")]
    BadConfiguration(String),

    #[error("rectangle {k} by {l} does not fit in torus of side {n} (limit {limit})", limit = .n - 2)]
    TorusRectTooLarge { n: usize, k: usize, l: usize },

    #[error("region has {edges} edges, above the enumeration cap of {cap}")]
    CapExceeded { edges: usize, cap: usize },

    #[error("event `{0}` is not increasing")]
    NotIncreasing(String),

    #[error("invalid probability {0}")]
    BadProbability(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series diverges for p0 = {p0} (ratio {ratio} >= 1)")]
    Divergent { p0: f64, ratio: f64 },

    #[error("no sign change of f(x) - x found on (0, 1)")]
    NoFixedPoint,

    #[error("interface walk invariant violated: {reason}; configuration {config}")]
    InterfaceInvariant { reason: String, config: String },
}

pub type Result<T> = std::result::Result<T, Error>;
