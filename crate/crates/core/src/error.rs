use thiserror::Error;

/// Errors produced while building meshes, partitions and preconditioners or
/// while running experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix not SPD: non-positive pivot at index {pivot}")]
    NotSpd { pivot: usize },

    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its mirror")]
    NotSymmetric { row: usize, col: usize },

    #[error("constraint matrix is rank deficient (constraint {row})")]
    RankDeficient { row: usize },

    #[error("floating subdomain underconstrained: {0}")]
    Underconstrained(String),

    #[error("no acceptable path between subsubdomains {first} and {second}")]
    NoAcceptablePath { first: usize, second: usize },

    #[error("subdomain {subdomain}: {source}")]
    Subdomain {
        subdomain: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("preconditioner not SPD: <r, Br> = {0:e}")]
    PreconditionerNotSpd(f64),

    #[error("operator not SPD: <p, Ap> = {0:e}")]
    OperatorNotSpd(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{phase} failed: {source}")]
    Phase {
        phase: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_subdomain(self, subdomain: usize) -> Error {
        Error::Subdomain {
            subdomain,
            source: Box::new(self),
        }
    }

    pub(crate) fn in_phase(self, phase: &'static str) -> Error {
        Error::Phase {
            phase,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
