// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A tuning or configuration value violates its contract.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Input data is malformed (non-finite values, bad labels, invalid graphs).
    #[error("input error: {0}")]
    Input(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("rank error: requested {requested} directions but only {available} are available")]
    Rank { requested: usize, available: usize },

    /// Iterates became non-finite. `trace` carries whatever objective values
    /// were recorded before the failure.
    #[error("divergence: {what}")]
    Divergence { what: String, trace: Vec<f64> },

    #[error("stratification error: class {class} has {count} samples but {folds} folds were requested")]
    Stratification {
        class: usize,
        count: usize,
        folds: usize,
    },

    #[error("parse error in {path} at line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("format error at byte offset {offset}: {msg}")]
    Format { offset: u64, msg: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

macro_rules! ensure_shape {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Shape(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure_shape;
