//! Reverse-mode automatic differentiation over dense `f64` matrices, with a
//! differentiable matrix exponential, Adam, and JSON checkpoints.

mod checkpoint;
mod expm;
mod matrix;
mod optim;
mod tape;

pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use expm::{expm, expm_frechet};
pub use matrix::Matrix;
pub use optim::{glorot_uniform, AdamState};
pub use tape::{Activation, DiffMatrix, Gradients, Tape};

#[derive(Debug, thiserror::Error)]
pub enum AdError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("singular matrix")]
    Singular,
    #[error("non-finite value produced by {0}")]
    NonFinite(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("checkpoint format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
