use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid {field}: {msg}")]
    Validation { field: &'static str, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot encode non-finite value {0}")]
    NonFinite(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unstable point process: branching ratio {ratio} >= 1")]
    UnstableProcess { ratio: f64 },

    #[error("invalid parameter {name}: {msg}")]
    InvalidParameter { name: &'static str, msg: String },

    #[error("empty spatial region")]
    EmptyRegion,

    #[error("commuter {0:?} has no head in this model; retrain with their labels first")]
    UnregisteredCommuter(String),

    #[error("AUC undefined: {0}")]
    UndefinedAuc(&'static str),

    #[error("sensitivity index undefined: model output has zero variance")]
    ZeroVariance,

    #[error("value {value} outside {what}")]
    OutOfRange { what: &'static str, value: i64 },

    #[error("insufficient trip length: {duration_s:.0} s recorded, {required_s:.0} s of bootstrap required")]
    InsufficientTripLength { duration_s: f64, required_s: f64 },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(field: &'static str, msg: impl Into<String>) -> Self {
        Error::Validation {
            field,
            msg: msg.into(),
        }
    }

    pub(crate) fn param(name: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            msg: msg.into(),
        }
    }
}
