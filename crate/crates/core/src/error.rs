use std::path::PathBuf;

use crate::functions::FunctionId;

pub type Result<T, E = DiffError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum DiffError {
    #[error("{function} is not defined at x = {x:e}")]
    Domain { function: FunctionId, x: f64 },

    #[error("step size must be positive and finite, got {0:e}")]
    InvalidStep(f64),

    #[error("invalid integration interval [{a:e}, {b:e}]: need a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid step strategy: {0}")]
    InvalidStrategy(String),

    #[error("estimate at step h = {h:e} is not finite ({value})")]
    NonFinite { h: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot aggregate tables: {0}")]
    Aggregation(String),

    #[error("malformed fixture {}: {msg}", path.display())]
    Fixture { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
