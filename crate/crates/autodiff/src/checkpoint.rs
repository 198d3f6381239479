//! JSON checkpoints.
//!
//! ```json
//! {
//!   "format": "grouprep-checkpoint",
//!   "version": 1,
//!   "metadata": {"variant": "LN", "...": "..."},
//!   "params": {"block.w1": {"shape": [128, 4], "data": [0.1, ...]}}
//! }
//! ```
//!
//! `data` is row-major. Floats are written in shortest round-trip form and
//! parsed exactly, so save followed by load is bit-exact.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{AdError, Matrix};

pub const CHECKPOINT_FORMAT: &str = "grouprep-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct StoredTensor {
    shape: [usize; 2],
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Stored {
    format: String,
    version: u32,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
    params: BTreeMap<String, StoredTensor>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Checkpoint {
    pub metadata: BTreeMap<String, String>,
    pub params: BTreeMap<String, Matrix>,
}

impl Checkpoint {
    pub fn new() -> Self {
        Checkpoint::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Matrix) {
        self.params.insert(name.into(), value);
    }

    pub fn param(&self, name: &str) -> Result<&Matrix, AdError> {
        self.params
            .get(name)
            .ok_or_else(|| AdError::Format(format!("missing parameter `{name}`")))
    }

    pub fn meta(&self, key: &str) -> Result<&str, AdError> {
        self.metadata
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| AdError::Format(format!("missing metadata `{key}`")))
    }

    pub fn to_json(&self) -> Result<String, AdError> {
        let stored = Stored {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            metadata: self.metadata.clone(),
            params: self
                .params
                .iter()
                .map(|(k, m)| {
                    (k.clone(), StoredTensor { shape: [m.rows(), m.cols()], data: m.data().to_vec() })
                })
                .collect(),
        };
        serde_json::to_string(&stored).map_err(|e| AdError::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, AdError> {
        let stored: Stored =
            serde_json::from_str(text).map_err(|e| AdError::Format(e.to_string()))?;
        if stored.format != CHECKPOINT_FORMAT {
            return Err(AdError::Format(format!("unexpected format `{}`", stored.format)));
        }
        if stored.version != CHECKPOINT_VERSION {
            return Err(AdError::Format(format!("unsupported version {}", stored.version)));
        }
        let mut params = BTreeMap::new();
        for (name, t) in stored.params {
            let m = Matrix::from_vec(t.shape[0], t.shape[1], t.data)
                .map_err(|e| AdError::Format(format!("parameter `{name}`: {e}")))?;
            params.insert(name, m);
        }
        Ok(Checkpoint { metadata: stored.metadata, params })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), AdError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AdError> {
        Checkpoint::from_json(&std::fs::read_to_string(path)?)
    }
}
