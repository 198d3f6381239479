//! Named parameter storage and dense layers.

use grouprep_autodiff::{glorot_uniform, Activation, Checkpoint, DiffMatrix, Matrix, Tape};
use rand::Rng;

use crate::MatrixNetError;

/// Parameters in registration order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamSet {
    names: Vec<String>,
    values: Vec<Matrix>,
}

impl ParamSet {
    pub fn push(&mut self, name: impl Into<String>, value: Matrix) -> usize {
        self.names.push(name.into());
        self.values.push(value);
        self.values.len() - 1
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[Matrix] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Matrix] {
        &mut self.values
    }

    pub fn get(&self, idx: usize) -> &Matrix {
        &self.values[idx]
    }

    pub fn get_mut(&mut self, idx: usize) -> &mut Matrix {
        &mut self.values[idx]
    }

    pub fn count(&self) -> usize {
        self.values.iter().map(|m| m.rows() * m.cols()).sum()
    }

    /// Records every parameter on the tape, as leaves or as constants.
    pub fn record(&self, tape: &mut Tape, trainable: bool) -> Result<Vec<DiffMatrix>, MatrixNetError> {
        self.values
            .iter()
            .map(|m| {
                let m = m.clone();
                if trainable {
                    tape.leaf(m)
                } else {
                    tape.constant(m)
                }
                .map_err(MatrixNetError::from)
            })
            .collect()
    }

    pub fn write_into(&self, ckpt: &mut Checkpoint) {
        for (n, v) in self.names.iter().zip(&self.values) {
            ckpt.insert(n.clone(), v.clone());
        }
    }

    /// Replaces every value with the checkpoint's, checking shapes.
    pub fn read_from(&mut self, ckpt: &Checkpoint) -> Result<(), MatrixNetError> {
        for (n, v) in self.names.iter().zip(self.values.iter_mut()) {
            let loaded = ckpt.param(n)?;
            if loaded.shape() != v.shape() {
                return Err(MatrixNetError::Config(format!(
                    "parameter `{n}` has shape {:?}, expected {:?}",
                    loaded.shape(),
                    v.shape()
                )));
            }
            *v = loaded.clone();
        }
        if ckpt.params.len() != self.names.len() {
            return Err(MatrixNetError::Config(format!(
                "checkpoint has {} parameters, model has {}",
                ckpt.params.len(),
                self.names.len()
            )));
        }
        Ok(())
    }
}

/// `x ↦ x W + b` on row batches, `W` stored `in × out`.
#[derive(Clone, Debug)]
pub struct Linear {
    w: usize,
    b: usize,
}

impl Linear {
    pub fn new<R: Rng + ?Sized>(
        params: &mut ParamSet,
        name: &str,
        input: usize,
        output: usize,
        rng: &mut R,
    ) -> Self {
        let w = params.push(format!("{name}.weight"), glorot_uniform(input, output, rng));
        let b = params.push(format!("{name}.bias"), Matrix::zeros(1, output));
        Linear { w, b }
    }

    pub fn forward(
        &self,
        tape: &mut Tape,
        p: &[DiffMatrix],
        x: DiffMatrix,
    ) -> Result<DiffMatrix, MatrixNetError> {
        let y = tape.matmul(x, p[self.w])?;
        Ok(tape.add_row_bias(y, p[self.b])?)
    }
}

/// `hidden_layers` activated linear layers followed by a linear output.
#[derive(Clone, Debug)]
pub struct Mlp {
    layers: Vec<Linear>,
    activation: Activation,
}

impl Mlp {
    pub fn new<R: Rng + ?Sized>(
        params: &mut ParamSet,
        name: &str,
        input: usize,
        hidden: usize,
        hidden_layers: usize,
        output: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let mut layers = Vec::new();
        let mut width = input;
        for k in 0..hidden_layers {
            layers.push(Linear::new(params, &format!("{name}.{k}"), width, hidden, rng));
            width = hidden;
        }
        layers.push(Linear::new(params, &format!("{name}.{hidden_layers}"), width, output, rng));
        Mlp { layers, activation }
    }

    pub fn forward(
        &self,
        tape: &mut Tape,
        p: &[DiffMatrix],
        mut x: DiffMatrix,
    ) -> Result<DiffMatrix, MatrixNetError> {
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            x = layer.forward(tape, p, x)?;
            if k < last {
                x = tape.activation(x, self.activation)?;
            }
        }
        Ok(x)
    }
}
