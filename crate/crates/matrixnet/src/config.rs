//! Model configuration and its flat key/value form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use grouprep_autodiff::Activation;
use grouprep_core::{order_class_set, Family};

use crate::MatrixNetError;

/// Matrix block variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `exp(reshape(W v))`
    Base,
    /// `exp(reshape(W₂ W₁ v))`
    LN,
    /// `exp(reshape(W₂ f(W₁ v)))`
    NL,
    /// per-channel `exp(reshape(W_j v))`, block-diagonal
    MC,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Base => "base",
            Variant::LN => "ln",
            Variant::NL => "nl",
            Variant::MC => "mc",
        })
    }
}

impl FromStr for Variant {
    type Err = MatrixNetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "base" => Ok(Variant::Base),
            "ln" => Ok(Variant::LN),
            "nl" => Ok(Variant::NL),
            "mc" => Ok(Variant::MC),
            other => Err(MatrixNetError::Config(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixBlockConfig {
    pub variant: Variant,
    pub matrix_dim: usize,
    pub channels: usize,
    pub hidden_dim: usize,
    pub activation: Activation,
}

impl MatrixBlockConfig {
    /// Defaults for a variant: braid groups use 14×14 (Base), 10×10 with
    /// hidden 128 (LN, NL with tanh) and 3×8×8 (MC); symmetric groups `S_n`
    /// use 2n×2n with hidden 256 (SiLU for NL) and 5×2×2 (MC).
    pub fn default_for(variant: Variant, family: &Family) -> Self {
        let symmetric = family.self_inverse();
        let n = match family {
            Family::Symmetric(n) => 2 * *n,
            _ => 10,
        };
        let (matrix_dim, channels, hidden_dim, activation) = match (variant, symmetric) {
            (Variant::Base, false) => (14, 1, 0, Activation::Linear),
            (Variant::LN, false) => (10, 1, 128, Activation::Linear),
            (Variant::NL, false) => (10, 1, 128, Activation::Tanh),
            (Variant::MC, false) => (8, 3, 0, Activation::Linear),
            (Variant::Base, true) => (n, 1, 0, Activation::Linear),
            (Variant::LN, true) => (n, 1, 256, Activation::Linear),
            (Variant::NL, true) => (n, 1, 256, Activation::Silu),
            (Variant::MC, true) => (2, 5, 0, Activation::Linear),
        };
        MatrixBlockConfig { variant, matrix_dim, channels, hidden_dim, activation }
    }

    pub fn validate(&self, family: &Family) -> Result<(), MatrixNetError> {
        if self.matrix_dim == 0 {
            return Err(MatrixNetError::Config("matrix_dim must be positive".into()));
        }
        match self.variant {
            Variant::MC if self.channels < 2 => {
                return Err(MatrixNetError::Config("MC needs at least two channels".into()))
            }
            Variant::Base | Variant::LN | Variant::NL if self.channels != 1 => {
                return Err(MatrixNetError::Config(format!(
                    "{} uses a single channel",
                    self.variant
                )))
            }
            Variant::LN | Variant::NL if self.hidden_dim == 0 => {
                return Err(MatrixNetError::Config("hidden_dim must be positive".into()))
            }
            _ => {}
        }
        if self.variant == Variant::NL && !self.activation.is_odd() && !family.self_inverse() {
            return Err(MatrixNetError::Config(format!(
                "activation {} is not odd; generator inverses in {family} need an odd one",
                self.activation
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskKind {
    Classification(usize),
    Regression(usize),
}

impl TaskKind {
    pub fn outputs(self) -> usize {
        match self {
            TaskKind::Classification(c) | TaskKind::Regression(c) => c,
        }
    }

    /// Order classification for finite groups, multiplicity regression for
    /// braid groups.
    pub fn default_for(family: &Family) -> Result<Self, MatrixNetError> {
        match family {
            Family::Braid(n) => Ok(TaskKind::Regression(*n)),
            f => Ok(TaskKind::Classification(order_class_set(f)?.len())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Classification(_) => "classification",
            TaskKind::Regression(_) => "regression",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    MatrixNet(MatrixBlockConfig),
    /// Padded signed one-hot input to an MLP.
    Mlp { max_len: usize },
    /// Permutation matrix input to an MLP.
    FixedRep,
}

impl ModelKind {
    pub fn name(&self) -> String {
        match self {
            ModelKind::MatrixNet(b) => format!("matrixnet-{}", b.variant),
            ModelKind::Mlp { .. } => "mlp".into(),
            ModelKind::FixedRep => "fixed-rep".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub presentation: String,
    pub kind: ModelKind,
    pub task: TaskKind,
    pub head_hidden: usize,
    pub head_layers: usize,
    pub head_activation: Activation,
}

impl ModelConfig {
    /// Defaults by model name (`base`, `ln`, `nl`, `mc`, `mlp`, `fixed-rep`)
    /// and presentation.
    pub fn default_for(model: &str, presentation: &str, max_len: usize) -> Result<Self, MatrixNetError> {
        let family: Family = presentation.parse()?;
        let symmetric = family.self_inverse();
        let (head_hidden, head_activation) =
            if symmetric { (256, Activation::Silu) } else { (128, Activation::Relu) };
        let (kind, head_layers) = match model.to_ascii_lowercase().as_str() {
            "mlp" => (ModelKind::Mlp { max_len }, 3),
            "fixed-rep" | "fixed" => (ModelKind::FixedRep, 2),
            v => (ModelKind::MatrixNet(MatrixBlockConfig::default_for(v.parse()?, &family)), 2),
        };
        Ok(ModelConfig {
            presentation: family.to_string(),
            kind,
            task: TaskKind::default_for(&family)?,
            head_hidden,
            head_layers,
            head_activation,
        })
    }

    pub fn to_metadata(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("presentation", self.presentation.clone());
        put("model", self.kind.name());
        put("task", self.task.name().into());
        put("outputs", self.task.outputs().to_string());
        put("head_hidden", self.head_hidden.to_string());
        put("head_layers", self.head_layers.to_string());
        put("head_activation", self.head_activation.to_string());
        match &self.kind {
            ModelKind::MatrixNet(b) => {
                put("variant", b.variant.to_string());
                put("matrix_dim", b.matrix_dim.to_string());
                put("channels", b.channels.to_string());
                put("hidden_dim", b.hidden_dim.to_string());
                put("block_activation", b.activation.to_string());
            }
            ModelKind::Mlp { max_len } => put("max_len", max_len.to_string()),
            ModelKind::FixedRep => {}
        }
        m
    }

    pub fn from_metadata(m: &BTreeMap<String, String>) -> Result<Self, MatrixNetError> {
        let get = |k: &str| {
            m.get(k)
                .map(String::as_str)
                .ok_or_else(|| MatrixNetError::Config(format!("missing key `{k}`")))
        };
        let num = |k: &str| -> Result<usize, MatrixNetError> {
            get(k)?
                .parse()
                .map_err(|_| MatrixNetError::Config(format!("`{k}` is not a number")))
        };
        let outputs = num("outputs")?;
        let task = match get("task")? {
            "classification" => TaskKind::Classification(outputs),
            "regression" => TaskKind::Regression(outputs),
            other => return Err(MatrixNetError::Config(format!("unknown task `{other}`"))),
        };
        let model = get("model")?;
        let kind = if model == "mlp" {
            ModelKind::Mlp { max_len: num("max_len")? }
        } else if model == "fixed-rep" {
            ModelKind::FixedRep
        } else {
            ModelKind::MatrixNet(MatrixBlockConfig {
                variant: get("variant")?.parse()?,
                matrix_dim: num("matrix_dim")?,
                channels: num("channels")?,
                hidden_dim: num("hidden_dim")?,
                activation: get("block_activation")?.parse()?,
            })
        };
        Ok(ModelConfig {
            presentation: get("presentation")?.to_string(),
            kind,
            task,
            head_hidden: num("head_hidden")?,
            head_layers: num("head_layers")?,
            head_activation: get("head_activation")?.parse()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metadata_round_trip() {
        for (model, pres) in [("ln", "B3"), ("nl", "S8"), ("mc", "B3"), ("mlp", "S10"), ("fixed-rep", "S8")] {
            let c = ModelConfig::default_for(model, pres, 28).unwrap();
            assert_eq!(ModelConfig::from_metadata(&c.to_metadata()).unwrap(), c);
        }
    }

    #[test]
    fn defaults() {
        let c = ModelConfig::default_for("nl", "S10", 64).unwrap();
        assert_eq!(c.task, TaskKind::Classification(16));
        let ModelKind::MatrixNet(b) = &c.kind else { panic!() };
        assert_eq!((b.hidden_dim, b.activation), (256, Activation::Silu));
        let c = ModelConfig::default_for("mc", "S10", 64).unwrap();
        let ModelKind::MatrixNet(b) = &c.kind else { panic!() };
        assert_eq!((b.channels, b.matrix_dim), (5, 2));
        let c = ModelConfig::default_for("base", "B3", 8).unwrap();
        assert_eq!(c.task, TaskKind::Regression(3));
    }

    #[test]
    fn nl_needs_odd_activation_on_braids() {
        let mut b = MatrixBlockConfig::default_for(Variant::NL, &Family::Braid(3));
        b.activation = Activation::Silu;
        assert!(b.validate(&Family::Braid(3)).is_err());
        assert!(b.validate(&Family::Symmetric(5)).is_ok());
        let mut mc = MatrixBlockConfig::default_for(Variant::MC, &Family::Braid(3));
        mc.channels = 1;
        assert!(mc.validate(&Family::Braid(3)).is_err());
    }
}
