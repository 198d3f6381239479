use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grouprep_autodiff::{Activation, Checkpoint};
use grouprep_core::{word_order, Family, GroupPresentation, Word};
use grouprep_harness::config::config_args;
use grouprep_harness::data::{self, BraidMode, DatasetManifest, GenSpec, Sample, SplitSpec};
use grouprep_harness::experiments::{self, LengthResult};
use grouprep_harness::train::{self, TrainConfig};
use grouprep_harness::HarnessError;
use grouprep_matrixnet::{Model, ModelConfig, ModelKind, RelationLossConfig};
use grouprep_zigzag::{apply_braid_word, Composition};

#[derive(Parser)]
#[command(name = "grouprep", version, about = "Learned group representations: datasets, training, experiments")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled dataset as JSONL with a manifest sidecar.
    GenDataset(GenArgs),
    /// Train a model.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset.
    Eval(EvalArgs),
    /// Evaluate a checkpoint on longer held-out words.
    Extrapolate(LengthArgs),
    /// Evaluate a checkpoint on shorter held-out words.
    Interpolate(LengthArgs),
    /// Relational error of a braid-group checkpoint.
    RelError(CheckpointArgs),
    /// Export represented matrices as CSV and heatmap images.
    ExportReps(ExportArgs),
    /// Print the exact label of a word.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SeedArg {
    /// Random seed.
    #[arg(long, env = "GROUPREP_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    /// Read flags from a `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Group family, e.g. S10, B3, C11x12x13x14x15, S5^4.
    #[arg(long)]
    family: String,
    /// Braid datasets: `enumerate` all words up to --max-len or `sample`
    /// --count words of exactly --length.
    #[arg(long, default_value = "enumerate")]
    mode: String,
    /// Maximum (braid enumerate) or fixed (order) word length.
    #[arg(long)]
    max_len: Option<usize>,
    /// Word length in braid sample mode.
    #[arg(long)]
    length: Option<usize>,
    /// Number of samples (order datasets and braid sample mode).
    #[arg(long)]
    count: Option<usize>,
    /// Vertex whose projective module the braid word acts on.
    #[arg(long, default_value_t = 1)]
    start_vertex: usize,
    /// Keep braid words that are not freely reduced.
    #[arg(long)]
    raw_words: bool,
    /// Exclude the identity generator from order-task words.
    #[arg(long)]
    no_identity: bool,
    /// Include the identity generator in sampled braid words.
    #[arg(long)]
    braid_identity: bool,
    /// Also write train/val(/test) files with these fractions, e.g. 0.6,0.2,0.2.
    #[arg(long, value_delimiter = ',')]
    split: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// base, ln, nl, mc, mlp or fixed-rep.
    #[arg(long)]
    model: String,
    #[arg(long)]
    family: String,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    val: PathBuf,
    /// Optional test set evaluated with the best checkpoint.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 128)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-4)]
    lr: f64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value = "checkpoint.json")]
    checkpoint: PathBuf,
    #[arg(long, default_value = "metrics.csv")]
    metrics: PathBuf,
    #[arg(long, default_value_t = 1)]
    eval_every: usize,
    /// Disable the relation loss.
    #[arg(long, conflicts_with = "relation_loss")]
    no_relation_loss: bool,
    /// Enable the relation loss for self-inverse families, where it is off
    /// by default.
    #[arg(long)]
    relation_loss: bool,
    #[arg(long, default_value_t = 10)]
    relation_every: usize,
    #[arg(long, default_value_t = 1.0)]
    relation_weight: f64,
    #[arg(long)]
    matrix_dim: Option<usize>,
    #[arg(long)]
    channels: Option<usize>,
    #[arg(long)]
    hidden_dim: Option<usize>,
    #[arg(long)]
    block_activation: Option<String>,
    #[arg(long)]
    head_hidden: Option<usize>,
    #[arg(long)]
    head_layers: Option<usize>,
    #[arg(long)]
    head_activation: Option<String>,
    /// Input length of the MLP baseline.
    #[arg(long, default_value_t = 8)]
    max_len: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct LengthArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Held-out dataset; repeat for several lengths.
    #[arg(long = "data", required = true)]
    data: Vec<PathBuf>,
    /// Write the per-set metrics as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckpointArgs {
    #[arg(long)]
    checkpoint: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Word pair as `u|v`; repeatable. Defaults to braid-relation pairs.
    #[arg(long)]
    pair: Vec<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 1)]
    start_vertex: usize,
    /// Word such as "s1 s2' s1"; empty for the identity.
    word: String,
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Splices `--config FILE` contents in front of the other flags, so that
/// explicit flags override the file.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, HarnessError> {
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(args) };
    let (path, consumed) = match args[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => match args.get(pos + 1) {
            Some(p) => (p.clone(), 2),
            None => return Ok(args),
        },
    };
    let mut rest = args.clone();
    rest.drain(pos..pos + consumed);
    let insert_at = 2.min(rest.len());
    let mut out: Vec<String> = rest[..insert_at].to_vec();
    out.extend(config_args(path)?);
    out.extend(rest[insert_at..].iter().cloned());
    Ok(out)
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::GenDataset(a) => gen_dataset(a),
        Command::Train(a) => train_cmd(a),
        Command::Eval(a) => {
            let model = load_model(&a.checkpoint)?;
            let samples = data::read_jsonl(&a.data)?;
            let rec = train::evaluate(&model, &samples, "eval")?;
            println!("{}", train::METRICS_HEADER);
            println!("{}", rec.csv_row());
            Ok(())
        }
        Command::Extrapolate(a) | Command::Interpolate(a) => length_cmd(a),
        Command::RelError(a) => {
            let model = load_model(&a.checkpoint)?;
            let r = experiments::run_rel_error(&model)?;
            println!("relational_error,non_relational_difference,ratio");
            println!("{},{},{}", r.relational.total, r.non_relational.total, r.ratio());
            for (c, (x, y)) in r.relational.per_channel.iter().zip(&r.non_relational.per_channel).enumerate() {
                println!("# channel {c}: {x} vs {y}");
            }
            Ok(())
        }
        Command::ExportReps(a) => {
            let model = load_model(&a.checkpoint)?;
            let pairs = if a.pair.is_empty() {
                experiments::default_export_pairs()
            } else {
                a.pair
                    .iter()
                    .map(|p| {
                        let (u, v) = p
                            .split_once('|')
                            .ok_or_else(|| HarnessError::Config(format!("pair `{p}` must look like `u|v`")))?;
                        Ok((u.trim().parse()?, v.trim().parse()?))
                    })
                    .collect::<Result<Vec<(Word, Word)>, HarnessError>>()?
            };
            for path in experiments::export_representations(&model, &pairs, &a.out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Oracle(a) => oracle_cmd(a),
    }
}

fn oracle_label(family: &str, start_vertex: usize, word: &Word) -> Result<String, HarnessError> {
    let p = GroupPresentation::parse(family)?;
    p.validate(word)?;
    match p.family {
        Family::Braid(n) => {
            let jh = apply_braid_word(word, n, start_vertex, Composition::RightmostFirst)?;
            Ok(serde_json::to_string(&jh.counts).expect("integers serialize"))
        }
        _ => Ok(word_order(word, &p)?.to_string()),
    }
}

fn oracle_cmd(a: OracleArgs) -> Result<(), HarnessError> {
    let word: Word = a.word.parse()?;
    println!("{}", oracle_label(&a.family, a.start_vertex, &word)?);
    Ok(())
}

fn gen_dataset(a: GenArgs) -> Result<(), HarnessError> {
    let family: Family = a.family.parse()?;
    let spec = match family {
        Family::Braid(_) => {
            let mode = match a.mode.as_str() {
                "enumerate" => BraidMode::Enumerate {
                    max_len: a.max_len.ok_or_else(|| HarnessError::Config("--max-len is required".into()))?,
                },
                "sample" => BraidMode::Sample {
                    length: a.length.ok_or_else(|| HarnessError::Config("--length is required".into()))?,
                    count: a.count.ok_or_else(|| HarnessError::Config("--count is required".into()))?,
                },
                other => return Err(HarnessError::Config(format!("unknown mode `{other}`"))),
            };
            GenSpec::Braid {
                presentation: family.to_string(),
                mode,
                start_vertex: a.start_vertex,
                seed: a.seed.seed,
                raw_words: a.raw_words,
                include_identity: a.braid_identity,
            }
        }
        _ => GenSpec::Order {
            presentation: family.to_string(),
            count: a.count.ok_or_else(|| HarnessError::Config("--count is required".into()))?,
            max_len: a.max_len.ok_or_else(|| HarnessError::Config("--max-len is required".into()))?,
            seed: a.seed.seed,
            include_identity: !a.no_identity,
        },
    };
    let samples = data::generate(&spec)?;
    data::write_jsonl(&samples, &a.out)?;
    let mut manifest = DatasetManifest {
        spec,
        samples: samples.len(),
        content_hash: data::content_hash(&samples),
        split: None,
    };
    if let Some(fractions) = a.split {
        let (tr, va, te) = data::split_dataset(&samples, &fractions, a.split_seed)?;
        let parts: [(&str, &Vec<Sample>); 3] = [("train", &tr), ("val", &va), ("test", &te)];
        for (name, part) in parts.iter().take(fractions.len()) {
            let path = sibling(&a.out, name);
            data::write_jsonl(part, &path)?;
            println!("{}: {} samples", path.display(), part.len());
        }
        manifest.split = Some(SplitSpec { fractions, seed: a.split_seed });
    }
    data::write_manifest(&manifest, data::manifest_path(&a.out))?;
    println!("{}: {} samples, sha256 {}", a.out.display(), samples.len(), manifest.content_hash);
    Ok(())
}

/// `data/b3.jsonl` → `data/b3.train.jsonl`.
fn sibling(path: &Path, part: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned());
    let ext = path.extension().map_or_else(|| "jsonl".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{part}.{ext}"))
}

fn model_config(a: &TrainArgs) -> Result<ModelConfig, HarnessError> {
    let mut cfg = ModelConfig::default_for(&a.model, &a.family, a.max_len)?;
    if let ModelKind::MatrixNet(b) = &mut cfg.kind {
        if let Some(x) = a.matrix_dim {
            b.matrix_dim = x;
        }
        if let Some(x) = a.channels {
            b.channels = x;
        }
        if let Some(x) = a.hidden_dim {
            b.hidden_dim = x;
        }
        if let Some(x) = &a.block_activation {
            b.activation = x.parse::<Activation>()?;
        }
    }
    if let Some(x) = a.head_hidden {
        cfg.head_hidden = x;
    }
    if let Some(x) = a.head_layers {
        cfg.head_layers = x;
    }
    if let Some(x) = &a.head_activation {
        cfg.head_activation = x.parse::<Activation>()?;
    }
    Ok(cfg)
}

fn train_cmd(a: TrainArgs) -> Result<(), HarnessError> {
    let model = model_config(&a)?;
    let presentation = GroupPresentation::parse(&model.presentation)?;
    let mut cfg = TrainConfig::new(model);
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch_size;
    cfg.learning_rate = a.lr;
    cfg.seed = a.seed.seed;
    cfg.eval_every = a.eval_every;
    cfg.checkpoint = Some(a.checkpoint.clone());
    cfg.metrics = Some(a.metrics.clone());
    let relations_on = if presentation.self_inverse_generators { a.relation_loss } else { !a.no_relation_loss };
    if relations_on && matches!(cfg.model.kind, ModelKind::MatrixNet(_)) {
        let mut rel = RelationLossConfig::default_for(&presentation);
        rel.apply_every = a.relation_every;
        rel.weight = a.relation_weight;
        cfg.relation = Some(rel);
    }
    let train_set = data::read_jsonl(&a.train)?;
    let val_set = data::read_jsonl(&a.val)?;
    let outcome = train::train(&cfg, &train_set, &val_set)?;
    println!("{}", train::METRICS_HEADER);
    for r in &outcome.history {
        println!("{}", r.csv_row());
    }
    println!("# best epoch {} saved to {}", outcome.best_epoch, a.checkpoint.display());
    if let Some(test) = &a.test {
        let rec = train::evaluate(&outcome.best, &data::read_jsonl(test)?, "test")?;
        println!("{}", rec.csv_row());
    }
    Ok(())
}

fn length_cmd(a: LengthArgs) -> Result<(), HarnessError> {
    let model = load_model(&a.checkpoint)?;
    let sets = a
        .data
        .iter()
        .map(|p| Ok((p.display().to_string(), data::read_jsonl(p)?)))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let results: Vec<LengthResult> = experiments::run_length_generalization(&model, &sets)?;
    print!("{}", experiments::length_results_table(&results));
    if let Some(out) = &a.out {
        std::fs::write(out, experiments::length_results_csv(&results))?;
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<Model, HarnessError> {
    Ok(Model::from_checkpoint(&Checkpoint::load(path)?)?)
}
