use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index out of range: {0}")]
    Range(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("ambiguous kernel: gap ratio {gap_ratio:.3e} below required {required:.1e}")]
    AmbiguousKernel { gap_ratio: f64, required: f64 },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("singular Bogoliubov block; resample")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;
