//! Mini-batch Adam training and evaluation metrics.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use grouprep_autodiff::{AdError, AdamState, Matrix, Tape};
use grouprep_core::Word;
use grouprep_matrixnet::{MatrixNetError, Model, ModelConfig, RelationLossConfig, TaskKind};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Label, Sample};
use crate::HarnessError;

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub model: ModelConfig,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Relation loss schedule; ignored for models without a matrix block.
    pub relation: Option<RelationLossConfig>,
    pub checkpoint: Option<PathBuf>,
    pub metrics: Option<PathBuf>,
    /// Validate every this many epochs (and after the last one).
    pub eval_every: usize,
}

impl TrainConfig {
    pub fn new(model: ModelConfig) -> Self {
        TrainConfig {
            model,
            epochs: 100,
            batch_size: 128,
            learning_rate: 1e-4,
            seed: 0,
            relation: None,
            checkpoint: None,
            metrics: None,
            eval_every: 1,
        }
    }

    /// Default relation loss for the model's presentation, if it has a
    /// matrix block. Self-inverse families train without one.
    pub fn with_default_relations(mut self) -> Result<Self, HarnessError> {
        let p = grouprep_core::GroupPresentation::parse(&self.model.presentation)?;
        if !p.self_inverse_generators && matches!(self.model.kind, grouprep_matrixnet::ModelKind::MatrixNet(_)) {
            self.relation = Some(RelationLossConfig::default_for(&p));
        }
        Ok(self)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.epochs == 0 || self.batch_size == 0 || self.eval_every == 0 {
            return Err(HarnessError::Config("epochs, batch size and eval cadence must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(HarnessError::Config("learning rate must be positive".into()));
        }
        if let Some(r) = &self.relation {
            if r.apply_every == 0 {
                return Err(HarnessError::Config("relation apply_every must be at least 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRecord {
    pub epoch: usize,
    pub split: String,
    /// Cross-entropy or MSE.
    pub loss: f64,
    /// Argmax accuracy, or the fraction of vectors with every rounded entry
    /// correct.
    pub accuracy: f64,
    /// Mean over entries of the per-entry rounded match rate (regression).
    pub avg_rounded_accuracy: Option<f64>,
    pub relational_error: Option<f64>,
    pub wall_clock_s: f64,
}

pub const METRICS_HEADER: &str = "epoch,split,loss,accuracy,avg_rounded_accuracy,relational_error,wall_clock_s";

impl MetricsRecord {
    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{:.3}",
            self.epoch,
            self.split,
            self.loss,
            self.accuracy,
            opt(self.avg_rounded_accuracy),
            opt(self.relational_error),
            self.wall_clock_s
        )
    }
}

pub fn write_metrics_csv(records: &[MetricsRecord], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{METRICS_HEADER}")?;
    for r in records {
        writeln!(f, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Targets for a batch, checked against the task.
enum Targets {
    Classes(Vec<usize>),
    Values(Matrix),
}

fn targets(task: TaskKind, samples: &[&Sample]) -> Result<Targets, HarnessError> {
    match task {
        TaskKind::Classification(c) => samples
            .iter()
            .map(|s| match s.label {
                Label::Class(k) if k < c => Ok(k),
                ref l => Err(HarnessError::TaskMismatch(format!("label {l:?} for {c}-way classification"))),
            })
            .collect::<Result<_, _>>()
            .map(Targets::Classes),
        TaskKind::Regression(c) => {
            let mut m = Matrix::zeros(samples.len(), c);
            for (r, s) in samples.iter().enumerate() {
                match &s.label {
                    Label::Vector(v) if v.len() == c => {
                        for (j, &x) in v.iter().enumerate() {
                            m.set(r, j, x as f64);
                        }
                    }
                    l => {
                        return Err(HarnessError::TaskMismatch(format!(
                            "label {l:?} for regression with {c} outputs"
                        )))
                    }
                }
            }
            Ok(Targets::Values(m))
        }
    }
}

/// Running sums of prediction quality.
#[derive(Default)]
struct Tally {
    loss_sum: f64,
    count: usize,
    correct: usize,
    entry_hits: usize,
    entries: usize,
}

impl Tally {
    fn add(&mut self, outputs: &Matrix, targets: &Targets, batch_loss: f64) {
        let b = outputs.rows();
        self.loss_sum += batch_loss * b as f64;
        self.count += b;
        match targets {
            Targets::Classes(labels) => {
                for (r, &l) in labels.iter().enumerate() {
                    if argmax(outputs.row(r)) == l {
                        self.correct += 1;
                    }
                }
            }
            Targets::Values(t) => {
                for r in 0..b {
                    let hits = rounded_matches(outputs.row(r), t.row(r));
                    self.entry_hits += hits;
                    self.entries += t.cols();
                    if hits == t.cols() {
                        self.correct += 1;
                    }
                }
            }
        }
    }

    fn record(&self, epoch: usize, split: &str, regression: bool, wall: f64) -> MetricsRecord {
        let n = self.count.max(1) as f64;
        MetricsRecord {
            epoch,
            split: split.into(),
            loss: self.loss_sum / n,
            accuracy: self.correct as f64 / n,
            avg_rounded_accuracy: regression.then(|| self.entry_hits as f64 / self.entries.max(1) as f64),
            relational_error: None,
            wall_clock_s: wall,
        }
    }
}

pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate() {
        if x > row[best] {
            best = i;
        }
    }
    best
}

/// Nearest integer with half-integers rounded away from zero.
pub fn round_half_away(x: f64) -> f64 {
    x.round()
}

/// Number of entries whose rounded prediction equals the label.
pub fn rounded_matches(pred: &[f64], label: &[f64]) -> usize {
    pred.iter().zip(label).filter(|(p, l)| round_half_away(**p) == **l).count()
}

fn batch_loss(
    model: &Model,
    t: &mut Tape,
    p: &[grouprep_autodiff::DiffMatrix],
    words: &[Word],
    targets: &Targets,
) -> Result<(grouprep_autodiff::DiffMatrix, grouprep_autodiff::DiffMatrix), MatrixNetError> {
    let out = model.forward_batch(t, p, words)?;
    let loss = match targets {
        Targets::Classes(labels) => t.softmax_cross_entropy(out, labels)?,
        Targets::Values(v) => {
            let target = t.constant(v.clone())?;
            t.mse(out, target)?
        }
    };
    Ok((out, loss))
}

/// Loss and accuracy of a model on a dataset.
pub fn evaluate(model: &Model, samples: &[Sample], split: &str) -> Result<MetricsRecord, HarnessError> {
    let start = Instant::now();
    let task = model.config().task;
    let refs: Vec<&Sample> = samples.iter().collect();
    let targets = targets(task, &refs)?;
    let words: Vec<Word> = samples.iter().map(|s| s.word.clone()).collect();
    let outputs = model.predict(&words)?;
    let loss = if samples.is_empty() {
        0.0
    } else {
        let mut t = Tape::new();
        let out = t.constant(outputs.clone())?;
        let l = match &targets {
            Targets::Classes(labels) => t.softmax_cross_entropy(out, labels)?,
            Targets::Values(v) => {
                let target = t.constant(v.clone())?;
                t.mse(out, target)?
            }
        };
        t.value(l).item()
    };
    let mut tally = Tally::default();
    tally.add(&outputs, &targets, loss);
    let mut rec = tally.record(0, split, matches!(task, TaskKind::Regression(_)), start.elapsed().as_secs_f64());
    if model.is_matrixnet() {
        rec.relational_error = model.relational_error().ok().map(|d| d.total);
    }
    Ok(rec)
}

pub struct TrainOutcome {
    /// Parameters with the lowest validation loss.
    pub best: Model,
    pub best_epoch: usize,
    pub last: Model,
    pub history: Vec<MetricsRecord>,
}

fn param_norms(model: &Model) -> String {
    model
        .params()
        .names()
        .iter()
        .zip(model.params().values())
        .map(|(n, v)| format!("{n}={:.4e}", v.frobenius_norm()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Seeded mini-batch Adam training with per-epoch metrics. The relation
/// loss is added on every `apply_every`-th batch.
pub fn train(cfg: &TrainConfig, train_set: &[Sample], val_set: &[Sample]) -> Result<TrainOutcome, HarnessError> {
    cfg.validate()?;
    if train_set.is_empty() {
        return Err(HarnessError::Data("empty training set".into()));
    }
    let start = Instant::now();
    let mut model = Model::new(cfg.model.clone(), cfg.seed)?;
    let task = model.config().task;
    let regression = matches!(task, TaskKind::Regression(_));
    let relation = cfg.relation.as_ref().filter(|_| model.is_matrixnet());
    let mut adam = AdamState::new(cfg.learning_rate, model.params().values());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = Vec::new();

    let validate = |model: &Model, epoch: usize, history: &mut Vec<MetricsRecord>| -> Result<f64, HarnessError> {
        let eval_set = if val_set.is_empty() { train_set } else { val_set };
        let mut rec = evaluate(model, eval_set, "val")?;
        rec.epoch = epoch;
        rec.wall_clock_s = start.elapsed().as_secs_f64();
        let loss = rec.loss;
        history.push(rec);
        Ok(loss)
    };

    let mut best_loss = validate(&model, 0, &mut history)?;
    let mut best = model.clone();
    let mut best_epoch = 0;
    let mut batch_counter = 0usize;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut tally = Tally::default();
        for (b, chunk) in order.chunks(cfg.batch_size).enumerate() {
            batch_counter += 1;
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &train_set[i]).collect();
            let words: Vec<Word> = batch.iter().map(|s| s.word.clone()).collect();
            let tg = targets(task, &batch)?;
            let mut t = Tape::new();
            let p = model.params().record(&mut t, true)?;
            let diag = |what: String| HarnessError::NonFinite {
                epoch,
                batch: b,
                detail: format!("{what}; parameter norms: {}", param_norms(&model)),
            };
            let (out, task_loss) = match batch_loss(&model, &mut t, &p, &words, &tg) {
                Err(MatrixNetError::Ad(AdError::NonFinite(op))) => return Err(diag(op)),
                r => r?,
            };
            let mut loss = task_loss;
            if let Some(rel) = relation {
                if batch_counter % rel.apply_every == 0 {
                    let r = match model.relation_loss_on(&mut t, &p, &rel.relations) {
                        Err(MatrixNetError::Ad(AdError::NonFinite(op))) => return Err(diag(op)),
                        r => r?,
                    };
                    let r = t.scale(r, rel.weight)?;
                    loss = t.add(loss, r)?;
                }
            }
            let loss_value = t.value(loss).item();
            if !loss_value.is_finite() {
                return Err(diag(format!("loss {loss_value}")));
            }
            tally.add(t.value(out), &tg, t.value(task_loss).item());
            let grads = match t.backward(loss) {
                Err(AdError::NonFinite(op)) => return Err(diag(op)),
                r => r?,
            };
            let g: Vec<Matrix> = p.iter().map(|&x| grads.get_or_zero(x)).collect();
            if g.iter().any(|m| !m.is_finite()) {
                return Err(diag("non-finite gradient".into()));
            }
            adam.step(model.params_mut().values_mut(), &g)?;
        }
        history.push(tally.record(epoch, "train", regression, start.elapsed().as_secs_f64()));
        if epoch % cfg.eval_every == 0 || epoch == cfg.epochs {
            let val_loss = validate(&model, epoch, &mut history)?;
            if val_loss < best_loss {
                best_loss = val_loss;
                best = model.clone();
                best_epoch = epoch;
                if let Some(path) = &cfg.checkpoint {
                    best.to_checkpoint().save(path)?;
                }
            }
        }
    }
    if let Some(path) = &cfg.checkpoint {
        if best_epoch == 0 {
            best.to_checkpoint().save(path)?;
        }
    }
    if let Some(path) = &cfg.metrics {
        write_metrics_csv(&history, path)?;
    }
    Ok(TrainOutcome { best, best_epoch, last: model, history })
}
