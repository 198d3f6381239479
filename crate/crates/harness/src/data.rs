//! Dataset generation, splits, and JSONL serialization.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use grouprep_core::{
    order_class_index, order_class_set, sample_word, word_order, Family, GroupPresentation,
    SignedGen, Word,
};
use grouprep_zigzag::{apply_braid_word, Composition};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::HarnessError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    /// Index into the order-class set.
    Class(usize),
    /// Jordan–Hölder multiplicities.
    Vector(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub word: Word,
    pub label: Label,
}

#[derive(Serialize, Deserialize)]
struct Record {
    word: Vec<i64>,
    label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum BraidMode {
    /// Every word of length at most `max_len`.
    Enumerate { max_len: usize },
    /// `count` words of length exactly `length`.
    Sample { length: usize, count: usize },
}

/// Everything needed to regenerate a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "task")]
pub enum GenSpec {
    Order {
        presentation: String,
        count: usize,
        max_len: usize,
        seed: u64,
        include_identity: bool,
    },
    Braid {
        presentation: String,
        #[serde(flatten)]
        mode: BraidMode,
        start_vertex: usize,
        seed: u64,
        /// Keep words that are not freely reduced.
        raw_words: bool,
        include_identity: bool,
    },
}

/// Sidecar describing how a dataset file was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub spec: GenSpec,
    pub samples: usize,
    /// SHA-256 of the JSONL bytes.
    pub content_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub fractions: Vec<f64>,
    pub seed: u64,
}

/// Words of fixed length `max_len` drawn uniformly over the generators
/// (plus the identity when requested), labelled by element order class.
pub fn gen_order_dataset(
    family: &Family,
    count: usize,
    max_len: usize,
    seed: u64,
    include_identity: bool,
) -> Result<Vec<Sample>, HarnessError> {
    let presentation = GroupPresentation::new(family.clone())?;
    let classes = order_class_set(family)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Word> = (0..count)
        .map(|_| {
            sample_word(
                &mut rng,
                presentation.num_generators,
                max_len,
                include_identity,
                !presentation.self_inverse_generators,
            )
        })
        .collect();
    par_map(&words, |w| {
        let order = word_order(w, &presentation)?;
        let idx = order_class_index(&classes, order)
            .ok_or_else(|| HarnessError::Data(format!("order {order} is not a class of {family}")))?;
        Ok(Sample { word: w.clone(), label: Label::Class(idx) })
    })
}

/// All words over `σ_1^{±1}..σ_{n-1}^{±1}` of length `0..=max_len`, in
/// length-lexicographic order; freely reduced unless `raw`.
pub fn enumerate_braid_words(generators: usize, max_len: usize, raw: bool) -> Vec<Word> {
    let alphabet: Vec<SignedGen> = (1..=generators)
        .flat_map(|i| [SignedGen::gen(i), SignedGen::inv(i)])
        .collect();
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &g in &alphabet {
                if !raw && w.symbols().last() == Some(&g.inverse()) {
                    continue;
                }
                let mut s = w.symbols().to_vec();
                s.push(g);
                next.push(Word::new(s));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// A uniformly random word of exactly `length` symbols; freely reduced
/// unless `raw`. With `include_identity`, identity symbols are drawn too.
pub fn sample_braid_word<R: Rng + ?Sized>(
    rng: &mut R,
    generators: usize,
    length: usize,
    raw: bool,
    include_identity: bool,
) -> Word {
    let mut syms: Vec<SignedGen> = Vec::with_capacity(length);
    let mut last: Option<SignedGen> = None;
    while syms.len() < length {
        let choices = 2 * generators + usize::from(include_identity);
        let k = rng.gen_range(0..choices);
        let g = if k == 2 * generators {
            SignedGen::IDENTITY
        } else if k % 2 == 0 {
            SignedGen::gen(k / 2 + 1)
        } else {
            SignedGen::inv(k / 2 + 1)
        };
        if !raw && !g.is_identity() && last == Some(g.inverse()) {
            continue;
        }
        if !g.is_identity() {
            last = Some(g);
        }
        syms.push(g);
    }
    Word::new(syms)
}

/// Braid words labelled by the Jordan–Hölder multiplicities of their image
/// of `P_start` in the category with as many projectives as strands.
pub fn gen_braid_dataset(
    presentation: &str,
    mode: &BraidMode,
    start_vertex: usize,
    seed: u64,
    raw_words: bool,
    include_identity: bool,
) -> Result<Vec<Sample>, HarnessError> {
    let p = GroupPresentation::parse(presentation)?;
    let Family::Braid(n) = p.family else {
        return Err(HarnessError::Data(format!("{presentation} is not a braid group")));
    };
    let words = match *mode {
        BraidMode::Enumerate { max_len } => enumerate_braid_words(p.num_generators, max_len, raw_words),
        BraidMode::Sample { length, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| sample_braid_word(&mut rng, p.num_generators, length, raw_words, include_identity))
                .collect()
        }
    };
    braid_labels(&words, n, start_vertex)
}

pub fn braid_labels(words: &[Word], n: usize, start_vertex: usize) -> Result<Vec<Sample>, HarnessError> {
    par_map(words, |w| {
        let jh = apply_braid_word(w, n, start_vertex, Composition::RightmostFirst)?;
        Ok(Sample { word: w.clone(), label: Label::Vector(jh.counts) })
    })
}

/// Regenerates a dataset from its specification.
pub fn generate(spec: &GenSpec) -> Result<Vec<Sample>, HarnessError> {
    match spec {
        GenSpec::Order { presentation, count, max_len, seed, include_identity } => {
            gen_order_dataset(&presentation.parse()?, *count, *max_len, *seed, *include_identity)
        }
        GenSpec::Braid { presentation, mode, start_vertex, seed, raw_words, include_identity } => {
            gen_braid_dataset(presentation, mode, *start_vertex, *seed, *raw_words, *include_identity)
        }
    }
}

/// Order-stable parallel map over the available cores.
fn par_map<T: Sync, U: Send>(
    items: &[T],
    f: impl Fn(&T) -> Result<U, HarnessError> + Sync,
) -> Result<Vec<U>, HarnessError> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    if threads <= 1 || items.len() < 64 {
        return items.iter().map(&f).collect();
    }
    let per = items.len().div_ceil(threads);
    let f = &f;
    let parts: Vec<Result<Vec<U>, HarnessError>> = std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(per)
            .map(|chunk| s.spawn(move || chunk.iter().map(f).collect::<Result<Vec<U>, _>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("labelling worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(items.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Seeded shuffle, then contiguous train / validation / test pieces. Two
/// fractions give an empty test split.
pub fn split_dataset(
    samples: &[Sample],
    fractions: &[f64],
    seed: u64,
) -> Result<(Vec<Sample>, Vec<Sample>, Vec<Sample>), HarnessError> {
    if !(2..=3).contains(&fractions.len())
        || fractions.iter().any(|f| !(0.0..=1.0).contains(f))
        || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(HarnessError::Data(format!(
            "split fractions {fractions:?} must be two or three values in [0, 1] summing to 1"
        )));
    }
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n = samples.len();
    let n_train = ((fractions[0] * n as f64).round() as usize).min(n);
    let n_val = if fractions.len() == 3 {
        ((fractions[1] * n as f64).round() as usize).min(n - n_train)
    } else {
        n - n_train
    };
    let pick = |r: std::ops::Range<usize>| idx[r].iter().map(|&i| samples[i].clone()).collect();
    Ok((pick(0..n_train), pick(n_train..n_train + n_val), pick(n_train + n_val..n)))
}

pub fn to_jsonl(samples: &[Sample]) -> String {
    let mut out = String::new();
    for s in samples {
        let rec = Record { word: s.word.to_signed_ints(), label: s.label.clone() };
        out.push_str(&serde_json::to_string(&rec).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn content_hash(samples: &[Sample]) -> String {
    hex::encode(Sha256::digest(to_jsonl(samples).as_bytes()))
}

pub fn write_jsonl(samples: &[Sample], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(to_jsonl(samples).as_bytes())?;
    f.flush()?;
    Ok(())
}

pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Vec<Sample>, HarnessError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line).map_err(|e| HarnessError::Parse {
            path: path.display().to_string(),
            line: k + 1,
            message: e.to_string(),
        })?;
        out.push(Sample { word: Word::from_signed_ints(&rec.word), label: rec.label });
    }
    Ok(out)
}

pub fn manifest_path(data: &Path) -> std::path::PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".manifest.json");
    s.into()
}

pub fn write_manifest(manifest: &DatasetManifest, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(manifest).map_err(|e| HarnessError::Data(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Data(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        let w = enumerate_braid_words(2, 1, false);
        assert_eq!(w.len(), 5);
        for k in 1..=6 {
            let exact = enumerate_braid_words(2, k, false).iter().filter(|w| w.len() == k).count();
            assert_eq!(exact, 4 * 3usize.pow(k as u32 - 1));
        }
        let raw = enumerate_braid_words(2, 3, true);
        assert_eq!(raw.len(), 1 + 4 + 16 + 64);
        let cancel: Word = "s1 s1'".parse().unwrap();
        assert!(!enumerate_braid_words(2, 4, false).contains(&cancel));
        assert!(raw.contains(&cancel));
    }

    #[test]
    fn sampled_braid_words_are_reduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let w = sample_braid_word(&mut rng, 2, 9, false, false);
            assert_eq!(w.len(), 9);
            assert_eq!(w.free_reduce(), w);
        }
    }

    #[test]
    fn split_sizes_and_determinism() {
        let samples: Vec<Sample> = (0..100)
            .map(|i| Sample { word: Word::empty(), label: Label::Class(i) })
            .collect();
        let (a, b, c) = split_dataset(&samples, &[0.6, 0.2, 0.2], 3).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (60, 20, 20));
        let again = split_dataset(&samples, &[0.6, 0.2, 0.2], 3).unwrap();
        assert_eq!(a, again.0);
        let mut all: Vec<usize> = a
            .iter()
            .chain(&b)
            .chain(&c)
            .map(|s| match s.label {
                Label::Class(i) => i,
                _ => unreachable!(),
            })
            .collect();
        all.sort();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert!(split_dataset(&samples, &[0.5, 0.2, 0.2], 3).is_err());
        let (t, v, e) = split_dataset(&samples, &[0.8, 0.2], 3).unwrap();
        assert_eq!((t.len(), v.len(), e.len()), (80, 20, 0));
    }
}
