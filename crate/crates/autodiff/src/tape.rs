//! Reverse-mode computation tape over dense matrices.

use std::fmt;
use std::str::FromStr;

use crate::expm::{expm, expm_frechet};
use crate::{AdError, Matrix};

/// Element-wise activation functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Activation {
    Tanh,
    Silu,
    Relu,
    Linear,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Silu => x * sigmoid(x),
            Activation::Relu => x.max(0.0),
            Activation::Linear => x,
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Silu => {
                let s = sigmoid(x);
                s * (1.0 + x * (1.0 - s))
            }
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Linear => 1.0,
        }
    }

    /// Whether `f(-x) = -f(x)`.
    pub fn is_odd(self) -> bool {
        matches!(self, Activation::Tanh | Activation::Linear)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Tanh => "tanh",
            Activation::Silu => "silu",
            Activation::Relu => "relu",
            Activation::Linear => "linear",
        })
    }
}

impl FromStr for Activation {
    type Err = AdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tanh" => Ok(Activation::Tanh),
            "silu" => Ok(Activation::Silu),
            "relu" => Ok(Activation::Relu),
            "linear" | "identity" | "none" => Ok(Activation::Linear),
            other => Err(AdError::Parse(format!("unknown activation `{other}`"))),
        }
    }
}

/// Handle to a value recorded on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiffMatrix {
    id: usize,
    rows: usize,
    cols: usize,
}

impl DiffMatrix {
    pub fn id(self) -> usize {
        self.id
    }

    pub fn rows(self) -> usize {
        self.rows
    }

    pub fn cols(self) -> usize {
        self.cols
    }

    pub fn shape(self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    Constant,
    MatMul(usize, usize),
    Add(usize, usize),
    Sub(usize, usize),
    Scale(usize, f64),
    AddRowBias(usize, usize),
    Reshape(usize),
    Transpose(usize),
    BlockDiag(Vec<usize>),
    ConcatCols(Vec<usize>),
    StackRows(Vec<usize>),
    Activation(usize, Activation),
    Exp(usize),
    SoftmaxCrossEntropy { logits: usize, labels: Vec<usize>, probs: Matrix },
    Mse(usize, usize),
    Frobenius(usize),
    Sum(usize),
}

#[derive(Debug)]
struct Node {
    value: Matrix,
    op: Op,
    requires_grad: bool,
}

/// Records operations in execution order; [`Tape::backward`] replays them
/// in reverse.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Gradients of a scalar with respect to every recorded value.
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Matrix>>,
}

impl Gradients {
    /// Gradient for `x`, or `None` if the output does not depend on it.
    pub fn get(&self, x: DiffMatrix) -> Option<&Matrix> {
        self.grads.get(x.id).and_then(Option::as_ref)
    }

    /// Gradient for `x`, zero-filled if the output does not depend on it.
    pub fn get_or_zero(&self, x: DiffMatrix) -> Matrix {
        self.get(x).cloned().unwrap_or_else(|| Matrix::zeros(x.rows, x.cols))
    }
}

fn shape_err(what: &str, a: (usize, usize), b: (usize, usize)) -> AdError {
    AdError::Shape(format!("{what}: {}x{} vs {}x{}", a.0, a.1, b.0, b.1))
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, x: DiffMatrix) -> &Matrix {
        &self.nodes[x.id].value
    }

    fn push(&mut self, value: Matrix, op: Op, requires_grad: bool) -> Result<DiffMatrix, AdError> {
        if !value.is_finite() {
            return Err(AdError::NonFinite(format!("{op:?}")));
        }
        let (rows, cols) = value.shape();
        self.nodes.push(Node { value, op, requires_grad });
        Ok(DiffMatrix { id: self.nodes.len() - 1, rows, cols })
    }

    fn grad_of(&self, ids: &[usize]) -> bool {
        ids.iter().any(|&i| self.nodes[i].requires_grad)
    }

    /// A differentiable input.
    pub fn leaf(&mut self, value: Matrix) -> Result<DiffMatrix, AdError> {
        self.push(value, Op::Leaf, true)
    }

    /// A constant input; no gradient is propagated to it.
    pub fn constant(&mut self, value: Matrix) -> Result<DiffMatrix, AdError> {
        self.push(value, Op::Constant, false)
    }

    pub fn matmul(&mut self, a: DiffMatrix, b: DiffMatrix) -> Result<DiffMatrix, AdError> {
        let v = self.value(a).matmul(self.value(b))?;
        let g = self.grad_of(&[a.id, b.id]);
        self.push(v, Op::MatMul(a.id, b.id), g)
    }

    pub fn add(&mut self, a: DiffMatrix, b: DiffMatrix) -> Result<DiffMatrix, AdError> {
        let v = self.value(a).add(self.value(b))?;
        let g = self.grad_of(&[a.id, b.id]);
        self.push(v, Op::Add(a.id, b.id), g)
    }

    pub fn sub(&mut self, a: DiffMatrix, b: DiffMatrix) -> Result<DiffMatrix, AdError> {
        let v = self.value(a).sub(self.value(b))?;
        let g = self.grad_of(&[a.id, b.id]);
        self.push(v, Op::Sub(a.id, b.id), g)
    }

    pub fn scale(&mut self, a: DiffMatrix, s: f64) -> Result<DiffMatrix, AdError> {
        let v = self.value(a).scale(s);
        let g = self.grad_of(&[a.id]);
        self.push(v, Op::Scale(a.id, s), g)
    }

    pub fn neg(&mut self, a: DiffMatrix) -> Result<DiffMatrix, AdError> {
        self.scale(a, -1.0)
    }

    /// Adds the `1 × k` row `bias` to every row of `x`.
    pub fn add_row_bias(&mut self, x: DiffMatrix, bias: DiffMatrix) -> Result<DiffMatrix, AdError> {
        if bias.rows != 1 || bias.cols != x.cols {
            return Err(shape_err("row bias", x.shape(), bias.shape()));
        }
        let b = self.value(bias).data().to_vec();
        let mut v = self.value(x).clone();
        for row in v.data_mut().chunks_mut(x.cols.max(1)) {
            for (a, b) in row.iter_mut().zip(&b) {
                *a += b;
            }
        }
        let g = self.grad_of(&[x.id, bias.id]);
        self.push(v, Op::AddRowBias(x.id, bias.id), g)
    }

    /// Row-major reshape.
    pub fn reshape(&mut self, a: DiffMatrix, rows: usize, cols: usize) -> Result<DiffMatrix, AdError> {
        if rows * cols != a.rows * a.cols {
            return Err(shape_err("reshape", a.shape(), (rows, cols)));
        }
        let v = self.value(a).reshaped(rows, cols)?;
        let g = self.grad_of(&[a.id]);
        self.push(v, Op::Reshape(a.id), g)
    }

    /// Reshapes a vector of length `n²` (either orientation) to `n × n`.
    pub fn reshape_to_square(&mut self, v: DiffMatrix) -> Result<DiffMatrix, AdError> {
        let len = v.rows * v.cols;
        if v.rows != 1 && v.cols != 1 {
            return Err(AdError::Shape(format!("reshape_to_square of a {}x{} matrix", v.rows, v.cols)));
        }
        let n = (len as f64).sqrt().round() as usize;
        if n * n != len {
            return Err(AdError::Shape(format!("length {len} is not a perfect square")));
        }
        self.reshape(v, n, n)
    }

    /// Flattens to a single `1 × rows·cols` row.
    pub fn flatten_row(&mut self, a: DiffMatrix) -> Result<DiffMatrix, AdError> {
        self.reshape(a, 1, a.rows * a.cols)
    }

    pub fn transpose(&mut self, a: DiffMatrix) -> Result<DiffMatrix, AdError> {
        let v = self.value(a).transpose();
        let g = self.grad_of(&[a.id]);
        self.push(v, Op::Transpose(a.id), g)
    }

    pub fn block_diag(&mut self, blocks: &[DiffMatrix]) -> Result<DiffMatrix, AdError> {
        if let Some(b) = blocks.iter().find(|b| b.rows != b.cols) {
            return Err(AdError::Shape(format!("block_diag of a {}x{} block", b.rows, b.cols)));
        }
        let values: Vec<Matrix> = blocks.iter().map(|&b| self.value(b).clone()).collect();
        let ids: Vec<usize> = blocks.iter().map(|b| b.id).collect();
        let g = self.grad_of(&ids);
        self.push(Matrix::block_diag(&values), Op::BlockDiag(ids), g)
    }

    /// Horizontal concatenation of matrices with equal row counts.
    pub fn concat_cols(&mut self, parts: &[DiffMatrix]) -> Result<DiffMatrix, AdError> {
        let rows = parts.first().map_or(0, |p| p.rows);
        if let Some(p) = parts.iter().find(|p| p.rows != rows) {
            return Err(shape_err("concat_cols", (rows, 0), p.shape()));
        }
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for p in parts {
                data.extend_from_slice(self.value(*p).row(r));
            }
        }
        let ids: Vec<usize> = parts.iter().map(|p| p.id).collect();
        let g = self.grad_of(&ids);
        self.push(Matrix::from_vec(rows, cols, data)?, Op::ConcatCols(ids), g)
    }

    /// Vertical concatenation of matrices with equal column counts.
    pub fn stack_rows(&mut self, parts: &[DiffMatrix]) -> Result<DiffMatrix, AdError> {
        let cols = parts.first().map_or(0, |p| p.cols);
        if let Some(p) = parts.iter().find(|p| p.cols != cols) {
            return Err(shape_err("stack_rows", (0, cols), p.shape()));
        }
        let rows: usize = parts.iter().map(|p| p.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for p in parts {
            data.extend_from_slice(self.value(*p).data());
        }
        let ids: Vec<usize> = parts.iter().map(|p| p.id).collect();
        let g = self.grad_of(&ids);
        self.push(Matrix::from_vec(rows, cols, data)?, Op::StackRows(ids), g)
    }

    pub fn activation(&mut self, x: DiffMatrix, kind: Activation) -> Result<DiffMatrix, AdError> {
        let v = self.value(x).map(|a| kind.apply(a));
        let g = self.grad_of(&[x.id]);
        self.push(v, Op::Activation(x.id, kind), g)
    }

    pub fn matrix_exp(&mut self, a: DiffMatrix) -> Result<DiffMatrix, AdError> {
        let v = expm(self.value(a))?;
        let g = self.grad_of(&[a.id]);
        self.push(v, Op::Exp(a.id), g)
    }

    /// Mean cross-entropy of row-wise softmax over `logits` against class
    /// indices, one per row.
    pub fn softmax_cross_entropy(
        &mut self,
        logits: DiffMatrix,
        labels: &[usize],
    ) -> Result<DiffMatrix, AdError> {
        if labels.len() != logits.rows || logits.rows == 0 {
            return Err(AdError::Shape(format!(
                "{} labels for {} rows of logits",
                labels.len(),
                logits.rows
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= logits.cols) {
            return Err(AdError::Shape(format!("class {bad} out of range for {} logits", logits.cols)));
        }
        let z = self.value(logits);
        let mut probs = Matrix::zeros(z.rows(), z.cols());
        let mut loss = 0.0;
        for (r, &label) in labels.iter().enumerate() {
            let row = z.row(r);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let denom: f64 = row.iter().map(|&x| (x - max).exp()).sum();
            for (c, &x) in row.iter().enumerate() {
                probs.set(r, c, (x - max).exp() / denom);
            }
            loss += denom.ln() + max - row[label];
        }
        loss /= labels.len() as f64;
        let g = self.grad_of(&[logits.id]);
        self.push(
            Matrix::scalar(loss),
            Op::SoftmaxCrossEntropy { logits: logits.id, labels: labels.to_vec(), probs },
            g,
        )
    }

    /// Mean squared error over all entries.
    pub fn mse(&mut self, pred: DiffMatrix, target: DiffMatrix) -> Result<DiffMatrix, AdError> {
        if pred.shape() != target.shape() || pred.rows * pred.cols == 0 {
            return Err(shape_err("mse", pred.shape(), target.shape()));
        }
        let d = self.value(pred).sub(self.value(target))?;
        let loss = d.data().iter().map(|x| x * x).sum::<f64>() / d.data().len() as f64;
        let g = self.grad_of(&[pred.id, target.id]);
        self.push(Matrix::scalar(loss), Op::Mse(pred.id, target.id), g)
    }

    pub fn frobenius_norm(&mut self, a: DiffMatrix) -> Result<DiffMatrix, AdError> {
        let v = self.value(a).frobenius_norm();
        let g = self.grad_of(&[a.id]);
        self.push(Matrix::scalar(v), Op::Frobenius(a.id), g)
    }

    pub fn sum(&mut self, a: DiffMatrix) -> Result<DiffMatrix, AdError> {
        let v = self.value(a).sum();
        let g = self.grad_of(&[a.id]);
        self.push(Matrix::scalar(v), Op::Sum(a.id), g)
    }

    /// Gradients of the scalar `output` with respect to every node.
    pub fn backward(&self, output: DiffMatrix) -> Result<Gradients, AdError> {
        if output.shape() != (1, 1) {
            return Err(AdError::Shape(format!(
                "backward from a {}x{} value; expected a scalar",
                output.rows, output.cols
            )));
        }
        let mut grads: Vec<Option<Matrix>> = vec![None; output.id + 1];
        grads[output.id] = Some(Matrix::scalar(1.0));
        for id in (0..=output.id).rev() {
            let node = &self.nodes[id];
            if !node.requires_grad {
                continue;
            }
            let Some(g) = grads[id].take() else { continue };
            let mut contrib: Vec<(usize, Matrix)> = Vec::new();
            match &node.op {
                Op::Leaf | Op::Constant => {
                    grads[id] = Some(g);
                    continue;
                }
                Op::MatMul(a, b) => {
                    let (av, bv) = (&self.nodes[*a].value, &self.nodes[*b].value);
                    if self.nodes[*a].requires_grad {
                        contrib.push((*a, g.mul_unchecked(&bv.transpose())));
                    }
                    if self.nodes[*b].requires_grad {
                        contrib.push((*b, av.transpose().mul_unchecked(&g)));
                    }
                }
                Op::Add(a, b) => {
                    contrib.push((*a, g.clone()));
                    contrib.push((*b, g));
                }
                Op::Sub(a, b) => {
                    contrib.push((*b, g.scale(-1.0)));
                    contrib.push((*a, g));
                }
                Op::Scale(a, s) => contrib.push((*a, g.scale(*s))),
                Op::AddRowBias(x, bias) => {
                    let cols = g.cols();
                    let mut gb = vec![0.0; cols];
                    for r in 0..g.rows() {
                        for (acc, v) in gb.iter_mut().zip(g.row(r)) {
                            *acc += v;
                        }
                    }
                    contrib.push((*bias, Matrix::from_vec(1, cols, gb)?));
                    contrib.push((*x, g));
                }
                Op::Reshape(a) => {
                    let (r, c) = self.nodes[*a].value.shape();
                    contrib.push((*a, g.reshaped(r, c)?));
                }
                Op::Transpose(a) => contrib.push((*a, g.transpose())),
                Op::BlockDiag(ids) => {
                    let mut off = 0;
                    for &b in ids {
                        let n = self.nodes[b].value.rows();
                        contrib.push((b, g.block(off, off, n, n)));
                        off += n;
                    }
                }
                Op::ConcatCols(ids) => {
                    let mut off = 0;
                    for &p in ids {
                        let c = self.nodes[p].value.cols();
                        contrib.push((p, g.block(0, off, g.rows(), c)));
                        off += c;
                    }
                }
                Op::StackRows(ids) => {
                    let mut off = 0;
                    for &p in ids {
                        let r = self.nodes[p].value.rows();
                        contrib.push((p, g.block(off, 0, r, g.cols())));
                        off += r;
                    }
                }
                Op::Activation(x, kind) => {
                    let xv = &self.nodes[*x].value;
                    contrib.push((*x, g.zip_map(xv, |g, x| g * kind.derivative(x))));
                }
                Op::Exp(a) => {
                    let at = self.nodes[*a].value.transpose();
                    contrib.push((*a, expm_frechet(&at, &g)?));
                }
                Op::SoftmaxCrossEntropy { logits, labels, probs } => {
                    let scale = g.item() / labels.len() as f64;
                    let mut d = probs.clone();
                    for (r, &l) in labels.iter().enumerate() {
                        d.set(r, l, d.get(r, l) - 1.0);
                    }
                    contrib.push((*logits, d.scale(scale)));
                }
                Op::Mse(p, t) => {
                    let (pv, tv) = (&self.nodes[*p].value, &self.nodes[*t].value);
                    let k = 2.0 * g.item() / pv.data().len() as f64;
                    let d = pv.zip_map(tv, |p, t| k * (p - t));
                    contrib.push((*t, d.scale(-1.0)));
                    contrib.push((*p, d));
                }
                Op::Frobenius(a) => {
                    let norm = node.value.item();
                    let av = &self.nodes[*a].value;
                    let d = if norm > 0.0 {
                        av.scale(g.item() / norm)
                    } else {
                        Matrix::zeros(av.rows(), av.cols())
                    };
                    contrib.push((*a, d));
                }
                Op::Sum(a) => {
                    let (r, c) = self.nodes[*a].value.shape();
                    contrib.push((*a, Matrix::filled(r, c, g.item())));
                }
            }
            for (target, d) in contrib {
                if !self.nodes[target].requires_grad {
                    continue;
                }
                match &mut grads[target] {
                    Some(acc) => acc.add_assign(&d),
                    slot @ None => *slot = Some(d),
                }
            }
        }
        Ok(Gradients { grads })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_gradient_by_hand() {
        let mut t = Tape::new();
        let a = t.leaf(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap()).unwrap();
        let b = t.constant(Matrix::from_rows(&[vec![5.0, 6.0], vec![7.0, 8.0]]).unwrap()).unwrap();
        let p = t.matmul(a, b).unwrap();
        let s = t.sum(p).unwrap();
        assert_eq!(t.value(s).item(), 19.0 + 22.0 + 43.0 + 50.0);
        let g = t.backward(s).unwrap();
        // d sum(AB)/dA = 1 Bᵀ: each row is the row sums of B
        assert_eq!(g.get(a).unwrap().data(), &[11.0, 15.0, 11.0, 15.0]);
        assert!(g.get(b).is_none());
    }

    #[test]
    fn identity_times_x() {
        let mut t = Tape::new();
        let i = t.constant(Matrix::identity(3)).unwrap();
        let x = t.leaf(Matrix::from_vec(3, 2, vec![1.0, -2.0, 3.0, 0.5, 0.0, 9.0]).unwrap()).unwrap();
        let y = t.matmul(i, x).unwrap();
        assert_eq!(t.value(y), t.value(x));
    }

    #[test]
    fn shape_errors() {
        let mut t = Tape::new();
        let a = t.leaf(Matrix::zeros(2, 3)).unwrap();
        let b = t.leaf(Matrix::zeros(4, 2)).unwrap();
        assert!(matches!(t.matmul(a, b), Err(AdError::Shape(_))));
        assert!(matches!(t.matrix_exp(a), Err(AdError::Shape(_))));
        let v = t.leaf(Matrix::zeros(6, 1)).unwrap();
        assert!(matches!(t.reshape_to_square(v), Err(AdError::Shape(_))));
        assert!(t.backward(a).is_err());
        assert!(t.mse(a, b).is_err());
    }

    #[test]
    fn simple_values() {
        let mut t = Tape::new();
        let x = t.leaf(Matrix::from_vec(1, 3, vec![0.0, 1.5, -1.5]).unwrap()).unwrap();
        let y = t.activation(x, Activation::Tanh).unwrap();
        assert_eq!(t.value(y).get(0, 0), 0.0);
        assert_eq!(t.value(y).get(0, 1), -t.value(y).get(0, 2));
        let m = t.mse(x, x).unwrap();
        assert_eq!(t.value(m).item(), 0.0);
        let i = t.constant(Matrix::identity(3)).unwrap();
        let f = t.frobenius_norm(i).unwrap();
        assert_eq!(t.value(f).item(), 3f64.sqrt());
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let mut t = Tape::new();
        let x = t.leaf(Matrix::scalar(1e300)).unwrap();
        assert!(matches!(t.matmul(x, x), Err(AdError::NonFinite(_))));
    }

    #[test]
    fn activation_parsing() {
        for a in [Activation::Tanh, Activation::Silu, Activation::Relu, Activation::Linear] {
            assert_eq!(a.to_string().parse::<Activation>().unwrap(), a);
        }
        assert!("gelu".parse::<Activation>().is_err());
    }
}
