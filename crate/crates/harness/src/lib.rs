//! Dataset generation, training, evaluation, and experiment drivers for
//! learned group representations, plus the `grouprep` command line.

pub mod config;
pub mod data;
pub mod experiments;
pub mod train;

use grouprep_autodiff::AdError;
use grouprep_core::GroupError;
use grouprep_matrixnet::MatrixNetError;
use grouprep_zigzag::ZigzagError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Zigzag(#[from] ZigzagError),
    #[error(transparent)]
    Ad(#[from] AdError),
    #[error(transparent)]
    Model(#[from] MatrixNetError),
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("data error: {0}")]
    Data(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("task mismatch: {0}")]
    TaskMismatch(String),
    #[error("non-finite value at epoch {epoch}, batch {batch}: {detail}")]
    NonFinite { epoch: usize, batch: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
