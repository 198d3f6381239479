//! Acceptance suite. Every criterion prints one PASS/FAIL line with the
//! measured values and the pinned thresholds, then asserts the outcome.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use grouprep_autodiff::{Activation, AdError, DiffMatrix, Matrix, Tape};
use grouprep_core::{order_class_set, word_order, Family, GroupPresentation, SignedGen, Word};
use grouprep_harness::data::{generate, split_dataset, BraidMode, GenSpec, Sample};
use grouprep_harness::experiments::{export_representations, parse_matrix_csv, run_extrapolation, run_rel_error};
use grouprep_harness::train::{evaluate, train, TrainConfig};
use grouprep_matrixnet::{Model, ModelConfig};
use grouprep_zigzag::{apply_braid_word, braid_image, Composition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 3] = [1, 2, 3];

/// Writes past the test harness's output capture so the line is always shown.
fn report(criterion: usize, pass: bool, text: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("[acceptance] criterion {criterion}: {verdict} | {text}\n");
    let mut err = std::io::stderr().lock();
    let _ = err.write_all(line.as_bytes());
    let _ = err.flush();
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn fmt_all(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join("/")
}

fn random_word(rng: &mut ChaCha8Rng, generators: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let syms = (0..len)
        .map(|_| {
            let i = rng.gen_range(1..=generators);
            if rng.gen_bool(0.5) {
                SignedGen::gen(i)
            } else {
                SignedGen::inv(i)
            }
        })
        .collect();
    Word::new(syms)
}

// ---------------------------------------------------------------- 1

#[test]
fn criterion_1_free_group_representation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut identity_exact, mut worst_hom, mut worst_inv) = (true, 0.0f64, 0.0f64);
    let cases = [("base", "B3"), ("ln", "B3"), ("nl", "B3"), ("mc", "B3"), ("nl", "B4"), ("ln", "S6"), ("mc", "S6")];
    for (variant, group) in cases {
        let model = Model::new(ModelConfig::default_for(variant, group, 8).unwrap(), rng.gen()).unwrap();
        let k = model.presentation().num_generators;
        let empty = model.represent_word_full(&Word::empty()).unwrap();
        identity_exact &= empty == Matrix::identity(empty.rows());
        for _ in 0..100 {
            let u = random_word(&mut rng, k, 8);
            let v = random_word(&mut rng, k, 8);
            let mu = model.represent_word_full(&u).unwrap();
            let mv = model.represent_word_full(&v).unwrap();
            let muv = model.represent_word_full(&u.concat(&v)).unwrap();
            worst_hom = worst_hom.max(muv.sub(&mu.matmul(&mv).unwrap()).unwrap().frobenius_norm());
            if !model.presentation().self_inverse_generators {
                let minv = model.represent_word_full(&u.inverse()).unwrap();
                worst_inv = worst_inv.max(minv.sub(&mu.inverse().unwrap()).unwrap().frobenius_norm());
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = identity_exact && worst_hom < 1e-8 && worst_inv < 1e-6 && elapsed < Duration::from_secs(10);
    report(
        1,
        pass,
        &format!(
            "M_empty = I exactly: {identity_exact}; max ‖M_uv − M_u M_v‖ = {worst_hom:.2e} (< 1e-8); \
             max ‖M_u⁻¹ − (M_u)⁻¹‖ = {worst_inv:.2e} (< 1e-6); runtime {:.2}s (< 10s)",
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 2

type Build = dyn Fn(&mut Tape, &[DiffMatrix]) -> Result<DiffMatrix, AdError>;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn scalarize(t: &mut Tape, y: DiffMatrix) -> Result<DiffMatrix, AdError> {
    if y.shape() == (1, 1) {
        return Ok(y);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let l = t.constant(random_matrix(&mut rng, 1, y.rows()))?;
    let r = t.constant(random_matrix(&mut rng, y.cols(), 1))?;
    let ly = t.matmul(l, y)?;
    let lin = t.matmul(ly, r)?;
    let sq = t.activation(y, Activation::Tanh)?;
    let quad = t.sum(sq)?;
    t.add(lin, quad)
}

fn value_at(inputs: &[Matrix], f: &Build) -> f64 {
    let mut t = Tape::new();
    let xs: Vec<_> = inputs.iter().map(|m| t.leaf(m.clone()).unwrap()).collect();
    let y = f(&mut t, &xs).unwrap();
    let s = scalarize(&mut t, y).unwrap();
    t.value(s).item()
}

/// Largest relative error between reverse mode and central differences.
fn grad_error(inputs: Vec<Matrix>, f: &Build) -> f64 {
    let mut t = Tape::new();
    let xs: Vec<_> = inputs.iter().map(|m| t.leaf(m.clone()).unwrap()).collect();
    let y = f(&mut t, &xs).unwrap();
    let s = scalarize(&mut t, y).unwrap();
    let grads = t.backward(s).unwrap();
    let h = 1e-5;
    let mut worst = 0.0f64;
    for (k, x) in xs.iter().enumerate() {
        let analytic = grads.get_or_zero(*x);
        let mut numeric = Matrix::zeros(x.rows(), x.cols());
        for i in 0..inputs[k].data().len() {
            let mut plus = inputs.clone();
            plus[k].data_mut()[i] += h;
            let mut minus = inputs.clone();
            minus[k].data_mut()[i] -= h;
            numeric.data_mut()[i] = (value_at(&plus, f) - value_at(&minus, f)) / (2.0 * h);
        }
        let rel = analytic.sub(&numeric).unwrap().frobenius_norm() / numeric.frobenius_norm().max(1e-8);
        worst = worst.max(rel);
    }
    worst
}

#[test]
fn criterion_2_autodiff() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut r = |rows, cols| random_matrix(&mut rng, rows, cols);
    let mut results: Vec<(String, f64)> = vec![
        ("matmul".into(), grad_error(vec![r(3, 4), r(4, 2)], &|t, x| t.matmul(x[0], x[1]))),
        ("add".into(), grad_error(vec![r(3, 2), r(3, 2)], &|t, x| t.add(x[0], x[1]))),
        ("sub".into(), grad_error(vec![r(3, 2), r(3, 2)], &|t, x| t.sub(x[0], x[1]))),
        ("scale".into(), grad_error(vec![r(2, 3)], &|t, x| t.scale(x[0], 2.5))),
        ("neg".into(), grad_error(vec![r(2, 3)], &|t, x| t.neg(x[0]))),
        ("add_row_bias".into(), grad_error(vec![r(4, 3), r(1, 3)], &|t, x| t.add_row_bias(x[0], x[1]))),
        ("reshape".into(), grad_error(vec![r(2, 6)], &|t, x| t.reshape(x[0], 4, 3))),
        ("reshape_to_square".into(), grad_error(vec![r(16, 1)], &|t, x| t.reshape_to_square(x[0]))),
        ("flatten_row".into(), grad_error(vec![r(3, 3)], &|t, x| t.flatten_row(x[0]))),
        ("transpose".into(), grad_error(vec![r(2, 5)], &|t, x| t.transpose(x[0]))),
        ("block_diag".into(), grad_error(vec![r(2, 2), r(3, 3)], &|t, x| t.block_diag(x))),
        ("concat_cols".into(), grad_error(vec![r(2, 2), r(2, 3)], &|t, x| t.concat_cols(x))),
        ("stack_rows".into(), grad_error(vec![r(1, 3), r(2, 3)], &|t, x| t.stack_rows(x))),
        ("sum".into(), grad_error(vec![r(3, 3)], &|t, x| t.sum(x[0]))),
        ("frobenius_norm".into(), grad_error(vec![r(3, 3)], &|t, x| t.frobenius_norm(x[0]))),
        ("mse".into(), grad_error(vec![r(4, 3), r(4, 3)], &|t, x| t.mse(x[0], x[1]))),
        (
            "softmax_cross_entropy".into(),
            grad_error(vec![r(4, 5)], &|t, x| t.softmax_cross_entropy(x[0], &[4, 0, 2, 2])),
        ),
    ];
    for act in [Activation::Tanh, Activation::Silu, Activation::Relu, Activation::Linear] {
        results.push((format!("activation {act}"), grad_error(vec![r(3, 4)], &move |t, x| t.activation(x[0], act))));
    }
    let mut worst_exp = 0.0f64;
    for trial in 0..12 {
        let a = r(5, 5);
        let norm = 0.1 + 2.9 * trial as f64 / 11.0;
        let a = a.scale(norm / a.frobenius_norm());
        worst_exp = worst_exp.max(grad_error(vec![a], &|t, x| t.matrix_exp(x[0])));
    }
    results.push(("matrix_exp 5x5, ‖A‖ ≤ 3".into(), worst_exp));
    let elapsed = start.elapsed();
    let (worst_name, worst) =
        results.iter().max_by(|a, b| a.1.total_cmp(&b.1)).map(|(n, e)| (n.clone(), *e)).unwrap();
    let pass = results.iter().all(|(_, e)| *e <= 1e-5) && elapsed < Duration::from_secs(30);
    report(
        2,
        pass,
        &format!(
            "{} ops checked; worst relative error {worst:.2e} ({worst_name}), matrix_exp {worst_exp:.2e} (≤ 1e-5); \
             runtime {:.2}s (< 30s)",
            results.len(),
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass, "{results:?}");
}

// ---------------------------------------------------------------- 3

/// Laurent polynomial in `t` with integer coefficients.
type Laurent = BTreeMap<i32, i64>;
type Burau = [[Laurent; 2]; 2];

fn lp(terms: &[(i32, i64)]) -> Laurent {
    terms.iter().copied().filter(|&(_, c)| c != 0).collect()
}

fn lp_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            *out.entry(ea + eb).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn lp_add(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = a.clone();
    for (e, c) in b {
        *out.entry(*e).or_insert(0) += c;
    }
    out.retain(|_, c| *c != 0);
    out
}

fn burau_mul(a: &Burau, b: &Burau) -> Burau {
    let entry = |i: usize, j: usize| lp_add(&lp_mul(&a[i][0], &b[0][j]), &lp_mul(&a[i][1], &b[1][j]));
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// Reduced Burau representation of `B_3`, which is faithful.
fn burau(g: SignedGen) -> Burau {
    let one = lp(&[(0, 1)]);
    let zero = Laurent::new();
    match (g.index(), g.sign() > 0) {
        (1, true) => [[lp(&[(1, -1)]), one.clone()], [zero, one]],
        (1, false) => [[lp(&[(-1, -1)]), lp(&[(-1, 1)])], [zero, one]],
        (2, true) => [[one, zero], [lp(&[(1, 1)]), lp(&[(1, -1)])]],
        (2, false) => [[one.clone(), zero], [one, lp(&[(-1, -1)])]],
        _ => unreachable!("B3 has two generators"),
    }
}

fn burau_word(w: &Word) -> Burau {
    let one = lp(&[(0, 1)]);
    let mut m: Burau = [[one.clone(), Laurent::new()], [Laurent::new(), one]];
    for &g in w.symbols() {
        m = burau_mul(&m, &burau(g));
    }
    m
}

fn all_words(generators: usize, max_len: usize) -> Vec<Word> {
    let alphabet: Vec<SignedGen> =
        (1..=generators).flat_map(|i| [SignedGen::gen(i), SignedGen::inv(i)]).collect();
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_len {
        let next: Vec<Word> = frontier
            .iter()
            .flat_map(|w| alphabet.iter().map(move |&g| w.concat(&Word::new(vec![g]))))
            .collect();
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn criterion_3_categorical_oracle() {
    let start = Instant::now();
    let rm = Composition::RightmostFirst;
    let s: Word = "s1 s2 s1".parse().unwrap();
    let t: Word = "s2 s1 s2".parse().unwrap();
    assert_eq!(burau_word(&s), burau_word(&t), "Burau matrices must satisfy the braid relation");

    let words = all_words(2, 5);
    let mut classes: HashMap<Vec<Vec<Vec<(i32, i64)>>>, Vec<usize>> = HashMap::new();
    for (k, w) in words.iter().enumerate() {
        let m = burau_word(w);
        let key = m.iter().map(|row| row.iter().map(|p| p.iter().map(|(e, c)| (*e, *c)).collect()).collect()).collect();
        classes.entry(key).or_default().push(k);
    }
    let nontrivial_pairs: usize = classes.values().map(|c| c.len() * (c.len() - 1) / 2).sum();
    let (mut d_squared_ok, mut invariant, mut complexes) = (true, true, 0usize);
    for vertex in 1..=3 {
        let mut labels = Vec::with_capacity(words.len());
        for w in &words {
            let c = braid_image(w, 3, vertex, rm).unwrap();
            d_squared_ok &= c.check().is_ok();
            complexes += 1;
            labels.push(grouprep_zigzag::jh_multiplicities(&c).counts);
        }
        for members in classes.values() {
            invariant &= members.iter().all(|&k| labels[k] == labels[members[0]]);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut cancel = true;
    for _ in 0..100 {
        let w = random_word(&mut rng, 2, 6);
        let vertex = rng.gen_range(1..=3);
        let ww = w.concat(&w.inverse());
        let c = braid_image(&ww, 3, vertex, rm).unwrap();
        d_squared_ok &= c.check().is_ok();
        let mut expected = vec![0u64; 3];
        expected[vertex - 1] = 1;
        cancel &= grouprep_zigzag::jh_multiplicities(&c).counts == expected;
    }

    let s1: Word = "s1".parse().unwrap();
    let hand = [(1, vec![1, 0, 0]), (2, vec![1, 1, 0]), (3, vec![0, 0, 1])];
    let hand_ok = hand.iter().all(|(v, e)| apply_braid_word(&s1, 3, *v, rm).unwrap().counts == *e);
    let elapsed = start.elapsed();
    let pass = d_squared_ok && invariant && cancel && hand_ok && elapsed < Duration::from_secs(120);
    report(
        3,
        pass,
        &format!(
            "d∘d = 0 on {complexes} complexes: {d_squared_ok}; JH invariant across {} words of length ≤ 5 \
             ({nontrivial_pairs} equal-braid pairs by faithful Burau, start vertices 1..3): {invariant}; \
             w·w⁻¹ cancellation (100 words): {cancel}; σ1(P1,P2,P3) = (1,0,0),(1,1,0),(0,0,1): {hand_ok}; \
             runtime {:.1}s (< 120s)",
            words.len(),
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 4

fn brute_force_order(word: &Word, n: usize) -> u64 {
    let mut images: Vec<usize> = (0..n).collect();
    for g in word.symbols().iter().filter(|g| !g.is_identity()) {
        images.swap(g.index() - 1, g.index());
    }
    let mut power = images.clone();
    let mut k = 1;
    while power.iter().enumerate().any(|(i, &p)| i != p) {
        power = power.iter().map(|&p| images[p]).collect();
        k += 1;
    }
    k
}

#[test]
fn criterion_4_order_oracle() {
    let start = Instant::now();
    let p = GroupPresentation::new(Family::Symmetric(5)).unwrap();
    let alphabet: Vec<SignedGen> = std::iter::once(SignedGen::IDENTITY).chain((1..=4).map(SignedGen::gen)).collect();
    let mut words = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..6 {
        frontier = frontier
            .iter()
            .flat_map(|w| alphabet.iter().map(move |&g| w.concat(&Word::new(vec![g]))))
            .collect();
        words.extend(frontier.iter().cloned());
    }
    let mismatches = words.iter().filter(|w| word_order(w, &p).unwrap() != brute_force_order(w, 5)).count();
    let s10 = order_class_set(&Family::Symmetric(10)).unwrap().len();
    let s12 = order_class_set(&Family::Symmetric(12)).unwrap().len();
    let elapsed = start.elapsed();
    let pass = mismatches == 0 && s10 == 16 && s12 == 23 && elapsed < Duration::from_secs(60);
    report(
        4,
        pass,
        &format!(
            "{} S5 words of length ≤ 6, {mismatches} order mismatches vs brute force (0); \
             |classes(S10)| = {s10} (16); |classes(S12)| = {s12} (23); runtime {:.2}s (< 60s)",
            words.len(),
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 5, 6, 7, 9

struct Trained {
    variant: &'static str,
    seed: u64,
    model: Model,
    test_mse: f64,
    test_avg_rounded: f64,
    seconds: f64,
}

/// MatrixNet-LN and -NL on every B_3 word of length ≤ 6, 60/20/20 split,
/// 100 epochs, one model per seed.
fn braid_models() -> &'static [Trained] {
    static MODELS: OnceLock<Vec<Trained>> = OnceLock::new();
    MODELS.get_or_init(|| {
        let samples = generate(&GenSpec::Braid {
            presentation: "B3".into(),
            mode: BraidMode::Enumerate { max_len: 6 },
            start_vertex: 1,
            seed: 0,
            raw_words: true,
            include_identity: false,
        })
        .unwrap();
        let (tr, va, te) = split_dataset(&samples, &[0.6, 0.2, 0.2], 0).unwrap();
        let mut out = Vec::new();
        for variant in ["ln", "nl"] {
            for seed in SEEDS {
                let start = Instant::now();
                let mut cfg =
                    TrainConfig::new(ModelConfig::default_for(variant, "B3", 8).unwrap()).with_default_relations().unwrap();
                cfg.epochs = 100;
                cfg.seed = seed;
                let outcome = train(&cfg, &tr, &va).unwrap();
                let rec = evaluate(&outcome.best, &te, "test").unwrap();
                out.push(Trained {
                    variant,
                    seed,
                    model: outcome.best,
                    test_mse: rec.loss,
                    test_avg_rounded: rec.avg_rounded_accuracy.unwrap(),
                    seconds: start.elapsed().as_secs_f64(),
                });
            }
        }
        out
    })
}

fn of_variant(variant: &str) -> Vec<&'static Trained> {
    braid_models().iter().filter(|t| t.variant == variant).collect()
}

#[test]
fn criterion_5_braid_regression() {
    let mut pass = true;
    let mut parts = Vec::new();
    for variant in ["ln", "nl"] {
        let runs = of_variant(variant);
        let mse: Vec<f64> = runs.iter().map(|t| t.test_mse).collect();
        let acc: Vec<f64> = runs.iter().map(|t| t.test_avg_rounded).collect();
        let slowest = runs.iter().map(|t| t.seconds).fold(0.0, f64::max);
        let ok = median(&acc) >= 0.99 && median(&mse) <= 0.01 && slowest <= 3600.0;
        pass &= ok;
        parts.push(format!(
            "{variant}: median avg-rounded acc {:.4} (≥ 0.99) [{}], median MSE {:.5} (≤ 0.01) [{}], \
             slowest run {slowest:.0}s (≤ 3600s)",
            median(&acc),
            fmt_all(&acc),
            median(&mse),
            fmt_all(&mse)
        ));
    }
    report(5, pass, &parts.join("; "));
    assert!(pass);
}

#[test]
fn criterion_6_relational_error() {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for variant in ["ln", "nl"] {
        let reports: Vec<_> = of_variant(variant).iter().map(|t| run_rel_error(&t.model).unwrap()).collect();
        let ratios: Vec<f64> = reports.iter().map(|r| r.ratio()).collect();
        let rel: Vec<f64> = reports.iter().map(|r| r.relational.total).collect();
        let non: Vec<f64> = reports.iter().map(|r| r.non_relational.total).collect();
        pass &= median(&ratios) < 0.1;
        parts.push(format!(
            "{variant}: median ratio {:.4} (< 0.1) [{}], relational {} vs non-relational {}",
            median(&ratios),
            fmt_all(&ratios),
            fmt_all(&rel),
            fmt_all(&non)
        ));
    }
    report(6, pass, &format!("{}; evaluation {:.2}s", parts.join("; "), start.elapsed().as_secs_f64()));
    assert!(pass);
}

#[test]
fn criterion_7_length_extrapolation() {
    let sets: Vec<(String, Vec<Sample>)> = [7usize, 8]
        .iter()
        .map(|&len| {
            let samples = generate(&GenSpec::Braid {
                presentation: "B3".into(),
                mode: BraidMode::Sample { length: len, count: 2000 },
                start_vertex: 1,
                seed: 700 + len as u64,
                raw_words: false,
                include_identity: false,
            })
            .unwrap();
            (format!("length {len}"), samples)
        })
        .collect();
    let runs = of_variant("nl");
    let mut per_len: Vec<Vec<f64>> = vec![Vec::new(); sets.len()];
    for t in &runs {
        for (k, r) in run_extrapolation(&t.model, &sets).unwrap().iter().enumerate() {
            per_len[k].push(r.metrics.avg_rounded_accuracy.unwrap());
        }
    }
    let slowest = runs.iter().map(|t| t.seconds).fold(0.0, f64::max);
    let pass = per_len.iter().all(|a| median(a) >= 0.90) && slowest <= 5400.0;
    let parts: Vec<String> = sets
        .iter()
        .zip(&per_len)
        .map(|((name, _), a)| format!("{name}: median avg-rounded acc {:.4} (≥ 0.90) [{}]", median(a), fmt_all(a)))
        .collect();
    report(
        7,
        pass,
        &format!("NL trained on length ≤ 6, 2000 freely reduced words per set; {}; slowest training {slowest:.0}s", parts.join("; ")),
    );
    assert!(pass);
}

#[test]
fn criterion_9_equivalent_word_matrices() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let pair: (Word, Word) = ("s1 s2 s1".parse().unwrap(), "s2 s1 s2".parse().unwrap());
    let mut pass = true;
    let mut parts = Vec::new();
    for variant in ["ln", "nl"] {
        let mut rel = Vec::new();
        for t in of_variant(variant) {
            let out = dir.path().join(format!("{variant}{}", t.seed));
            export_representations(&t.model, std::slice::from_ref(&pair), &out).unwrap();
            let a = parse_matrix_csv(&std::fs::read_to_string(out.join("pair0_a.csv")).unwrap()).unwrap();
            let b = parse_matrix_csv(&std::fs::read_to_string(out.join("pair0_b.csv")).unwrap()).unwrap();
            rel.push(a.sub(&b).unwrap().frobenius_norm() / a.frobenius_norm());
        }
        pass &= median(&rel) < 0.05;
        parts.push(format!("{variant}: median ‖ΔM‖/‖M‖ {:.4} (< 0.05) [{}]", median(&rel), fmt_all(&rel)));
    }
    report(
        9,
        pass,
        &format!("σ1σ2σ1 vs σ2σ1σ2 from exported CSV; {}; evaluation {:.2}s", parts.join("; "), start.elapsed().as_secs_f64()),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 8

#[test]
fn criterion_8_order_prediction() {
    let start = Instant::now();
    let samples = generate(&GenSpec::Order {
        presentation: "S8".into(),
        count: 50_000,
        max_len: 28,
        seed: 0,
        include_identity: true,
    })
    .unwrap();
    let (tr, va, te) = split_dataset(&samples, &[0.6, 0.2, 0.2], 0).unwrap();
    let mut acc: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for model in ["nl", "fixed-rep"] {
        for seed in SEEDS {
            let mut cfg = TrainConfig::new(ModelConfig::default_for(model, "S8", 28).unwrap()).with_default_relations().unwrap();
            cfg.epochs = 50;
            cfg.seed = seed;
            let outcome = train(&cfg, &tr, &va).unwrap();
            acc.entry(model).or_default().push(evaluate(&outcome.best, &te, "test").unwrap().accuracy);
        }
    }
    let elapsed = start.elapsed();
    let (nl, fixed) = (median(&acc["nl"]), median(&acc["fixed-rep"]));
    let pass = nl >= 0.95 && nl - fixed >= 0.02 && elapsed <= Duration::from_secs(7200);
    report(
        8,
        pass,
        &format!(
            "S8, 50000 words of length 28, 50 epochs; NL median test acc {nl:.4} (≥ 0.95) [{}]; \
             fixed-rep {fixed:.4} [{}]; NL − fixed-rep {:.4} (≥ 0.02); runtime {:.0}s (≤ 7200s)",
            fmt_all(&acc["nl"]),
            fmt_all(&acc["fixed-rep"]),
            nl - fixed,
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}
