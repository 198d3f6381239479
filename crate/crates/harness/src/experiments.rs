//! Experiment drivers: length generalization, relational error, and
//! representation export.

use std::io::Write;
use std::path::{Path, PathBuf};

use grouprep_autodiff::Matrix;
use grouprep_core::Word;
use grouprep_matrixnet::{Model, PairDistance};
use image::{GrayImage, Luma};

use crate::data::Sample;
use crate::train::{evaluate, MetricsRecord, METRICS_HEADER};
use crate::HarnessError;

/// Metrics on one held-out set, keyed by its longest word.
#[derive(Clone, Debug)]
pub struct LengthResult {
    pub name: String,
    pub max_word_len: usize,
    pub metrics: MetricsRecord,
}

/// Evaluates a trained model on held-out sets of other word lengths. Used
/// for both extrapolation (longer words) and interpolation (shorter words).
pub fn run_length_generalization(
    model: &Model,
    sets: &[(String, Vec<Sample>)],
) -> Result<Vec<LengthResult>, HarnessError> {
    sets.iter()
        .map(|(name, samples)| {
            let max_word_len = samples.iter().map(|s| s.word.len()).max().unwrap_or(0);
            let metrics = evaluate(model, samples, name)?;
            Ok(LengthResult { name: name.clone(), max_word_len, metrics })
        })
        .collect()
}

pub fn run_extrapolation(model: &Model, sets: &[(String, Vec<Sample>)]) -> Result<Vec<LengthResult>, HarnessError> {
    run_length_generalization(model, sets)
}

pub fn run_interpolation(model: &Model, sets: &[(String, Vec<Sample>)]) -> Result<Vec<LengthResult>, HarnessError> {
    run_length_generalization(model, sets)
}

pub const LENGTH_HEADER: &str = "set,word_length";

pub fn length_results_csv(results: &[LengthResult]) -> String {
    let mut out = format!("{LENGTH_HEADER},{}\n", METRICS_HEADER.trim_start_matches("epoch,split,"));
    for r in results {
        let row = r.metrics.csv_row();
        let rest: Vec<&str> = row.splitn(3, ',').collect();
        out.push_str(&format!("{},{},{}\n", r.name, r.max_word_len, rest[2]));
    }
    out
}

pub fn length_results_table(results: &[LengthResult]) -> String {
    let mut out = format!("{:<24} {:>6} {:>12} {:>10} {:>10}\n", "set", "length", "loss", "accuracy", "avg-round");
    for r in results {
        out.push_str(&format!(
            "{:<24} {:>6} {:>12.6} {:>10.4} {:>10}\n",
            r.name,
            r.max_word_len,
            r.metrics.loss,
            r.metrics.accuracy,
            r.metrics.avg_rounded_accuracy.map_or("-".to_string(), |a| format!("{a:.4}"))
        ));
    }
    out
}

#[derive(Clone, Debug)]
pub struct RelErrorReport {
    pub relational: PairDistance,
    pub non_relational: PairDistance,
}

impl RelErrorReport {
    pub fn ratio(&self) -> f64 {
        self.relational.total / self.non_relational.total
    }
}

pub fn run_rel_error(model: &Model) -> Result<RelErrorReport, HarnessError> {
    Ok(RelErrorReport {
        relational: model.relational_error()?,
        non_relational: model.non_relational_difference()?,
    })
}

/// Pairs exported by default: the two sides of the braid relation, a
/// derived equivalent pair, and the empty word against itself.
pub fn default_export_pairs() -> Vec<(Word, Word)> {
    let w = |s: &str| s.parse::<Word>().expect("fixed word literal");
    vec![
        (w("s1 s2 s1"), w("s2 s1 s2")),
        (w("s1 s2 s1 s1"), w("s2 s1 s2 s1")),
        (w(""), w("")),
    ]
}

pub fn matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<Matrix, HarnessError> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| HarnessError::Data(format!("`{x}`: {e}"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(Matrix::from_rows(&rows)?)
}

const CELL: u32 = 16;
const GAP: u32 = 8;

/// Side-by-side grayscale heatmaps on a shared linear scale, black at the
/// minimum entry and white at the maximum.
pub fn heatmap(mats: &[&Matrix]) -> GrayImage {
    let lo = mats.iter().flat_map(|m| m.data()).copied().fold(f64::INFINITY, f64::min);
    let hi = mats.iter().flat_map(|m| m.data()).copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let height = mats.iter().map(|m| m.rows() as u32).max().unwrap_or(0) * CELL;
    let width: u32 = mats.iter().map(|m| m.cols() as u32 * CELL).sum::<u32>()
        + GAP * mats.len().saturating_sub(1) as u32;
    let mut img = GrayImage::from_pixel(width.max(1), height.max(1), Luma([255]));
    let mut x0 = 0;
    for m in mats {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let v = ((m.get(r, c) - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8;
                for dy in 0..CELL {
                    for dx in 0..CELL {
                        img.put_pixel(x0 + c as u32 * CELL + dx, r as u32 * CELL + dy, Luma([v]));
                    }
                }
            }
        }
        x0 += m.cols() as u32 * CELL + GAP;
    }
    img
}

/// Writes `pair{k}_a.csv`, `pair{k}_b.csv`, their heatmaps, and a
/// side-by-side `pair{k}.png` for each word pair, plus an index file.
pub fn export_representations(
    model: &Model,
    pairs: &[(Word, Word)],
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, HarnessError> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut index = std::fs::File::create(dir.join("index.csv"))?;
    writeln!(index, "pair,side,word,csv,relative_difference")?;
    for (k, (a, b)) in pairs.iter().enumerate() {
        let ma = model.represent_word_full(a)?;
        let mb = model.represent_word_full(b)?;
        let rel = ma.sub(&mb)?.frobenius_norm() / ma.frobenius_norm();
        for (side, word, m) in [("a", a, &ma), ("b", b, &mb)] {
            let csv = dir.join(format!("pair{k}_{side}.csv"));
            std::fs::write(&csv, matrix_csv(m))?;
            let png = dir.join(format!("pair{k}_{side}.png"));
            heatmap(&[m]).save(&png).map_err(|e| HarnessError::Data(e.to_string()))?;
            writeln!(index, "{k},{side},{word},{},{rel}", csv.file_name().unwrap().to_string_lossy())?;
            written.push(csv);
            written.push(png);
        }
        let both = dir.join(format!("pair{k}.png"));
        heatmap(&[&ma, &mb]).save(&both).map_err(|e| HarnessError::Data(e.to_string()))?;
        written.push(both);
    }
    Ok(written)
}
