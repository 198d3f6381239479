//! MatrixNet and the baseline models behind one interface.

use std::collections::HashMap;

use grouprep_autodiff::{glorot_uniform, Checkpoint, DiffMatrix, Matrix, Tape};
use grouprep_core::{word_to_perm, Family, GroupPresentation, SignedGen, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{MatrixBlockConfig, ModelConfig, ModelKind, Variant};
use crate::params::{Mlp, ParamSet};
use crate::MatrixNetError;

#[derive(Clone, Debug)]
enum BlockParams {
    Base { w: usize },
    Ln { w1: usize, w2: usize },
    Nl { w1: usize, w2: usize },
    Mc { ws: Vec<usize> },
}

/// Maps a generator's signed one-hot vector to one invertible matrix per
/// channel.
#[derive(Clone, Debug)]
struct MatrixBlock {
    cfg: MatrixBlockConfig,
    generators: usize,
    params: BlockParams,
}

impl MatrixBlock {
    fn new(cfg: &MatrixBlockConfig, generators: usize, ps: &mut ParamSet, rng: &mut ChaCha8Rng) -> Self {
        let n2 = cfg.matrix_dim * cfg.matrix_dim;
        let k = generators;
        let h = cfg.hidden_dim;
        let params = match cfg.variant {
            Variant::Base => BlockParams::Base { w: ps.push("block.w", glorot_uniform(n2, k, rng)) },
            Variant::LN | Variant::NL => {
                let w1 = ps.push("block.w1", glorot_uniform(h, k, rng));
                let w2 = ps.push("block.w2", glorot_uniform(n2, h, rng));
                if cfg.variant == Variant::LN {
                    BlockParams::Ln { w1, w2 }
                } else {
                    BlockParams::Nl { w1, w2 }
                }
            }
            Variant::MC => BlockParams::Mc {
                ws: (0..cfg.channels)
                    .map(|j| ps.push(format!("block.w{j}"), glorot_uniform(n2, k, rng)))
                    .collect(),
            },
        };
        MatrixBlock { cfg: cfg.clone(), generators, params }
    }

    /// Pre-exponential matrices `A` per channel for the one-hot vector `v`.
    fn pre_exp(&self, t: &mut Tape, p: &[DiffMatrix], v: DiffMatrix) -> Result<Vec<DiffMatrix>, MatrixNetError> {
        let cols = match &self.params {
            BlockParams::Base { w } => vec![t.matmul(p[*w], v)?],
            BlockParams::Ln { w1, w2 } => {
                let h = t.matmul(p[*w1], v)?;
                vec![t.matmul(p[*w2], h)?]
            }
            BlockParams::Nl { w1, w2 } => {
                let h = t.matmul(p[*w1], v)?;
                let h = t.activation(h, self.cfg.activation)?;
                vec![t.matmul(p[*w2], h)?]
            }
            BlockParams::Mc { ws } => ws.iter().map(|w| t.matmul(p[*w], v)).collect::<Result<_, _>>()?,
        };
        cols.into_iter().map(|c| Ok(t.reshape_to_square(c)?)).collect()
    }

    fn generator(&self, t: &mut Tape, p: &[DiffMatrix], index: usize, sign: i8) -> Result<Vec<DiffMatrix>, MatrixNetError> {
        let mut v = vec![0.0; self.generators];
        v[index - 1] = f64::from(sign);
        let v = t.constant(Matrix::column(&v))?;
        self.pre_exp(t, p, v)?
            .into_iter()
            .map(|a| Ok(t.matrix_exp(a)?))
            .collect()
    }
}

/// Per-batch cache of generator matrices on a tape.
struct GeneratorCache {
    matrices: HashMap<(usize, i8), Vec<DiffMatrix>>,
    identity: Option<DiffMatrix>,
}

/// Frobenius distances between the represented sides of a word pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDistance {
    pub per_channel: Vec<f64>,
    /// Frobenius norm of the full block-diagonal difference.
    pub total: f64,
}

/// Relation words for the relation loss and its schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationLossConfig {
    pub relations: Vec<Word>,
    pub apply_every: usize,
    pub weight: f64,
}

impl RelationLossConfig {
    /// The presentation's relations, plus their inverse forms when
    /// generators have distinct inverses. A relation `u v⁻¹` with
    /// `|u| = |v|` has inverse form `u⁻¹ v`, e.g. the braid relation
    /// `σ₁σ₂σ₁ = σ₂σ₁σ₂` pairs with `σ₁⁻¹σ₂⁻¹σ₁⁻¹ = σ₂⁻¹σ₁⁻¹σ₂⁻¹`.
    pub fn default_for(presentation: &GroupPresentation) -> Self {
        let mut relations = presentation.relations.clone();
        if !presentation.self_inverse_generators {
            relations.extend(presentation.relations.iter().map(inverse_form));
        }
        RelationLossConfig { relations, apply_every: 10, weight: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    config: ModelConfig,
    presentation: GroupPresentation,
    params: ParamSet,
    block: Option<MatrixBlock>,
    head: Mlp,
}

impl Model {
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self, MatrixNetError> {
        let presentation = GroupPresentation::parse(&config.presentation)?;
        let k = presentation.num_generators;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ParamSet::default();
        let (block, input) = match &config.kind {
            ModelKind::MatrixNet(b) => {
                b.validate(&presentation.family)?;
                let block = MatrixBlock::new(b, k, &mut params, &mut rng);
                (Some(block), b.channels * b.matrix_dim * b.matrix_dim)
            }
            ModelKind::Mlp { max_len } => (None, max_len * k),
            ModelKind::FixedRep => match presentation.family {
                Family::Symmetric(n) => (None, n * n),
                ref f => {
                    return Err(MatrixNetError::Unsupported(format!(
                        "fixed permutation representation needs a symmetric group, got {f}"
                    )))
                }
            },
        };
        if config.head_hidden == 0 && config.head_layers > 0 {
            return Err(MatrixNetError::Config("head_hidden must be positive".into()));
        }
        let head = Mlp::new(
            &mut params,
            "head",
            input,
            config.head_hidden,
            config.head_layers,
            config.task.outputs(),
            config.head_activation,
            &mut rng,
        );
        Ok(Model { config, presentation, params, block, head })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamSet {
        &mut self.params
    }

    pub fn is_matrixnet(&self) -> bool {
        self.block.is_some()
    }

    fn require_block(&self) -> Result<&MatrixBlock, MatrixNetError> {
        self.block
            .as_ref()
            .ok_or_else(|| MatrixNetError::Unsupported(format!("{} has no matrix block", self.config.kind.name())))
    }

    fn normalize(&self, g: SignedGen) -> (usize, i8) {
        let sign = if self.presentation.self_inverse_generators { 1 } else { g.sign() };
        (g.index(), sign)
    }

    fn new_cache(&self) -> GeneratorCache {
        GeneratorCache { matrices: HashMap::new(), identity: None }
    }

    fn generator_on(
        &self,
        t: &mut Tape,
        p: &[DiffMatrix],
        cache: &mut GeneratorCache,
        g: SignedGen,
    ) -> Result<Vec<DiffMatrix>, MatrixNetError> {
        let block = self.require_block()?;
        if g.is_identity() {
            let id = match cache.identity {
                Some(id) => id,
                None => {
                    let id = t.constant(Matrix::identity(block.cfg.matrix_dim))?;
                    cache.identity = Some(id);
                    id
                }
            };
            return Ok(vec![id; block.cfg.channels]);
        }
        let key = self.normalize(g);
        if let Some(m) = cache.matrices.get(&key) {
            return Ok(m.clone());
        }
        let m = block.generator(t, p, key.0, key.1)?;
        cache.matrices.insert(key, m.clone());
        Ok(m)
    }

    /// `M_w = M_{g_1} ⋯ M_{g_ℓ}` per channel. Identity symbols are skipped,
    /// which is exact since they represent as `I`.
    fn word_on(
        &self,
        t: &mut Tape,
        p: &[DiffMatrix],
        cache: &mut GeneratorCache,
        word: &Word,
    ) -> Result<Vec<DiffMatrix>, MatrixNetError> {
        let mut acc: Option<Vec<DiffMatrix>> = None;
        for &g in word.symbols().iter().filter(|g| !g.is_identity()) {
            let m = self.generator_on(t, p, cache, g)?;
            acc = Some(match acc {
                None => m,
                Some(prev) => prev
                    .iter()
                    .zip(&m)
                    .map(|(&a, &b)| t.matmul(a, b))
                    .collect::<Result<_, _>>()?,
            });
        }
        match acc {
            Some(m) => Ok(m),
            None => self.generator_on(t, p, cache, SignedGen::IDENTITY),
        }
    }

    /// Outputs (`B × c`) for a batch of words, with parameters `p` recorded
    /// on the tape by [`ParamSet::record`].
    pub fn forward_batch(&self, t: &mut Tape, p: &[DiffMatrix], words: &[Word]) -> Result<DiffMatrix, MatrixNetError> {
        for w in words {
            self.presentation.validate(w)?;
        }
        let input = match &self.config.kind {
            ModelKind::MatrixNet(_) => {
                let mut cache = self.new_cache();
                let mut rows = Vec::with_capacity(words.len());
                for w in words {
                    let channels = self.word_on(t, p, &mut cache, w)?;
                    let flat = channels
                        .into_iter()
                        .map(|m| t.flatten_row(m))
                        .collect::<Result<Vec<_>, _>>()?;
                    rows.push(if flat.len() == 1 { flat[0] } else { t.concat_cols(&flat)? });
                }
                t.stack_rows(&rows)?
            }
            ModelKind::Mlp { max_len } => {
                let k = self.presentation.num_generators;
                let mut x = Matrix::zeros(words.len(), max_len * k);
                for (r, w) in words.iter().enumerate() {
                    if w.len() > *max_len {
                        return Err(MatrixNetError::InvalidInput(format!(
                            "word of length {} exceeds max_len {max_len}",
                            w.len()
                        )));
                    }
                    let enc = self.presentation.signed_one_hot(w)?;
                    for (c, &e) in enc.data.iter().enumerate() {
                        x.set(r, c, f64::from(e));
                    }
                }
                t.constant(x)?
            }
            ModelKind::FixedRep => {
                let Family::Symmetric(n) = self.presentation.family else { unreachable!() };
                let mut x = Matrix::zeros(words.len(), n * n);
                for (r, w) in words.iter().enumerate() {
                    for (c, v) in word_to_perm(w, n)?.matrix().into_iter().enumerate() {
                        x.set(r, c, v);
                    }
                }
                t.constant(x)?
            }
        };
        self.head.forward(t, p, input)
    }

    /// Output rows for a batch of words, without gradients.
    pub fn predict(&self, words: &[Word]) -> Result<Matrix, MatrixNetError> {
        const CHUNK: usize = 256;
        let chunks: Vec<&[Word]> = words.chunks(CHUNK).collect();
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(chunks.len().max(1));
        let run = |chunk: &[Word]| -> Result<Matrix, MatrixNetError> {
            let mut t = Tape::new();
            let p = self.params.record(&mut t, false)?;
            let y = self.forward_batch(&mut t, &p, chunk)?;
            Ok(t.value(y).clone())
        };
        let results: Vec<Result<Matrix, MatrixNetError>> = if threads <= 1 {
            chunks.iter().map(|c| run(c)).collect()
        } else {
            let per = chunks.len().div_ceil(threads);
            std::thread::scope(|s| {
                let handles: Vec<_> = chunks
                    .chunks(per)
                    .map(|group| s.spawn(|| group.iter().map(|c| run(c)).collect::<Vec<_>>()))
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("prediction worker panicked")).collect()
            })
        };
        let c = self.config.task.outputs();
        let mut data = Vec::with_capacity(words.len() * c);
        for r in results {
            data.extend_from_slice(r?.data());
        }
        Ok(Matrix::from_vec(words.len(), c, data)?)
    }

    /// Output vector for a single word.
    pub fn forward(&self, word: &Word) -> Result<Vec<f64>, MatrixNetError> {
        Ok(self.predict(std::slice::from_ref(word))?.into_data())
    }

    /// The matrices of one generator symbol, one per channel.
    pub fn generator_matrix(&self, g: SignedGen) -> Result<Vec<Matrix>, MatrixNetError> {
        self.represent_word(&Word::new(vec![g]))
    }

    /// The matrices `A` with `M_g = exp(A)`, one per channel, for a
    /// non-identity generator symbol.
    pub fn pre_exponential(&self, g: SignedGen) -> Result<Vec<Matrix>, MatrixNetError> {
        let block = self.require_block()?;
        self.presentation.validate(&Word::new(vec![g]))?;
        if g.is_identity() {
            let n = block.cfg.matrix_dim;
            return Ok(vec![Matrix::zeros(n, n); block.cfg.channels]);
        }
        let (index, sign) = self.normalize(g);
        let mut t = Tape::new();
        let p = self.params.record(&mut t, false)?;
        let mut v = vec![0.0; block.generators];
        v[index - 1] = f64::from(sign);
        let v = t.constant(Matrix::column(&v))?;
        let a = block.pre_exp(&mut t, &p, v)?;
        Ok(a.into_iter().map(|x| t.value(x).clone()).collect())
    }

    /// `M_w` per channel.
    pub fn represent_word(&self, word: &Word) -> Result<Vec<Matrix>, MatrixNetError> {
        self.presentation.validate(word)?;
        let mut t = Tape::new();
        let p = self.params.record(&mut t, false)?;
        let mut cache = self.new_cache();
        let m = self.word_on(&mut t, &p, &mut cache, word)?;
        Ok(m.into_iter().map(|x| t.value(x).clone()).collect())
    }

    /// `M_w` assembled block-diagonally over channels.
    pub fn represent_word_full(&self, word: &Word) -> Result<Matrix, MatrixNetError> {
        Ok(Matrix::block_diag(&self.represent_word(word)?))
    }

    /// `Σ_r Σ_channels ‖M_r − I‖_F` recorded on a tape.
    pub fn relation_loss_on(
        &self,
        t: &mut Tape,
        p: &[DiffMatrix],
        relations: &[Word],
    ) -> Result<DiffMatrix, MatrixNetError> {
        let block = self.require_block()?;
        let mut cache = self.new_cache();
        let id = t.constant(Matrix::identity(block.cfg.matrix_dim))?;
        let mut total = t.constant(Matrix::scalar(0.0))?;
        for r in relations {
            self.presentation.validate(r)?;
            for m in self.word_on(t, p, &mut cache, r)? {
                let d = t.sub(m, id)?;
                let n = t.frobenius_norm(d)?;
                total = t.add(total, n)?;
            }
        }
        Ok(total)
    }

    pub fn relation_loss(&self, relations: &[Word]) -> Result<f64, MatrixNetError> {
        let mut t = Tape::new();
        let p = self.params.record(&mut t, false)?;
        let l = self.relation_loss_on(&mut t, &p, relations)?;
        Ok(t.value(l).item())
    }

    /// Distance between the represented matrices of two words.
    pub fn pair_distance(&self, u: &Word, v: &Word) -> Result<PairDistance, MatrixNetError> {
        let mu = self.represent_word(u)?;
        let mv = self.represent_word(v)?;
        let per_channel: Vec<f64> = mu
            .iter()
            .zip(&mv)
            .map(|(a, b)| Ok(a.sub(b)?.frobenius_norm()))
            .collect::<Result<_, MatrixNetError>>()?;
        let total = per_channel.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(PairDistance { per_channel, total })
    }

    fn require_braid(&self) -> Result<(), MatrixNetError> {
        match self.presentation.family {
            Family::Braid(n) if n >= 3 => Ok(()),
            ref f => Err(MatrixNetError::Unsupported(format!(
                "relational error is defined for braid groups, got {f}"
            ))),
        }
    }

    /// `‖M_{σ₁σ₂σ₁} − M_{σ₂σ₁σ₂}‖_F`.
    pub fn relational_error(&self) -> Result<PairDistance, MatrixNetError> {
        self.require_braid()?;
        self.pair_distance(&parse("s1 s2 s1"), &parse("s2 s1 s2"))
    }

    /// `‖M_{σ₁σ₁σ₂} − M_{σ₂σ₂σ₁}‖_F`, a reference distance between
    /// inequivalent braids.
    pub fn non_relational_difference(&self) -> Result<PairDistance, MatrixNetError> {
        self.require_braid()?;
        self.pair_distance(&parse("s1 s1 s2"), &parse("s2 s2 s1"))
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        let mut c = Checkpoint::new();
        c.metadata = self.config.to_metadata();
        self.params.write_into(&mut c);
        c
    }

    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self, MatrixNetError> {
        let config = ModelConfig::from_metadata(&ckpt.metadata)?;
        let mut model = Model::new(config, 0)?;
        model.params.read_from(ckpt)?;
        Ok(model)
    }
}

fn inverse_form(r: &Word) -> Word {
    let inv = r.inverse();
    let mut syms = inv.symbols().to_vec();
    syms.rotate_left(r.len() / 2);
    Word::new(syms)
}

fn parse(text: &str) -> Word {
    text.parse().expect("fixed word literal")
}
