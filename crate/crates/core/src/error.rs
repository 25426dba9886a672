use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("metric axiom violated ({kind}) at points ({i}, {j}, {k})")]
    MetricViolation {
        kind: &'static str,
        i: usize,
        j: usize,
        k: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate pair: {0}")]
    DegeneratePair(String),

    #[error("empty triple: {0}")]
    EmptyTriple(String),

    #[error("covering chain has {have} levels but level {need} is required")]
    InsufficientChain { have: usize, need: usize },

    #[error("oracle limited to {limit} support points, got {got}")]
    OracleTooLarge { limit: usize, got: usize },
}
