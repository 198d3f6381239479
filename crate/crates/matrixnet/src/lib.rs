//! MatrixNet: sequence models over group words that learn a matrix
//! representation of each generator through a matrix exponential, together
//! with an MLP baseline and a fixed permutation-representation baseline.

mod config;
mod model;
mod params;

pub use config::{MatrixBlockConfig, ModelConfig, ModelKind, TaskKind, Variant};
pub use model::{Model, PairDistance, RelationLossConfig};
pub use params::{Linear, Mlp, ParamSet};

use grouprep_autodiff::AdError;
use grouprep_core::GroupError;

#[derive(Debug, thiserror::Error)]
pub enum MatrixNetError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ad(#[from] AdError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
