use grouprep_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..=n, prop::bool::ANY), 0..=max_len).prop_map(|syms| {
        Word::new(
            syms.into_iter()
                .map(|(i, inv)| if inv { SignedGen::inv(i) } else { SignedGen::gen(i) })
                .collect(),
        )
    })
}

/// Repeated composition until the identity comes back.
fn brute_force_order(p: &Permutation) -> u64 {
    let mut acc = p.clone();
    let mut k = 1;
    while !acc.is_identity() {
        acc = acc.compose(p);
        k += 1;
    }
    k
}

proptest! {
    #[test]
    fn one_hot_of_inverse_is_reversed_negation(word in arb_word(4, 12)) {
        let b5 = GroupPresentation::parse("B5").unwrap();
        let enc = b5.signed_one_hot(&word).unwrap();
        let inv = b5.signed_one_hot(&word.inverse()).unwrap();
        for k in 0..word.len() {
            let flipped: Vec<i8> = enc.row(word.len() - 1 - k).iter().map(|x| -x).collect();
            prop_assert_eq!(inv.row(k), &flipped[..]);
        }
    }

    #[test]
    fn free_reduce_is_idempotent(word in arb_word(3, 20)) {
        let once = word.free_reduce();
        prop_assert_eq!(once.free_reduce(), once.clone());
        prop_assert!(once.symbols().iter().all(|g| !g.is_identity()));
    }

    #[test]
    fn perm_invariant_under_free_reduction(word in arb_word(5, 20)) {
        prop_assert_eq!(
            word_to_perm(&word, 6).unwrap(),
            word_to_perm(&word.free_reduce(), 6).unwrap()
        );
    }

    #[test]
    fn text_round_trip(word in arb_word(12, 16)) {
        let parsed: Word = word.to_string().parse().unwrap();
        prop_assert_eq!(parsed, word);
    }
}

#[test]
fn symmetric_relations_evaluate_to_identity() {
    for n in 2..=8 {
        let p = GroupPresentation::new(Family::Symmetric(n)).unwrap();
        for r in &p.relations {
            assert!(word_to_perm(r, n).unwrap().is_identity(), "S{n}: {r}");
        }
    }
}

#[test]
fn product_relations_evaluate_to_identity() {
    for name in ["C11x12x13x14x15", "S5^4", "C2x3"] {
        let p = GroupPresentation::parse(name).unwrap();
        for r in &p.relations {
            assert!(word_to_element(r, &p).unwrap().is_identity(), "{name}: {r}");
        }
    }
}

#[test]
fn order_matches_brute_force_for_all_short_words_in_s5() {
    let alphabet = alphabet(4, true, false);
    let mut frontier = vec![Word::empty()];
    let mut checked = 0;
    for _len in 0..=6 {
        let mut next = Vec::new();
        for word in &frontier {
            let p = word_to_perm(word, 5).unwrap();
            assert_eq!(p.order(), brute_force_order(&p), "{word}");
            checked += 1;
            for &g in &alphabet {
                let mut syms = word.symbols().to_vec();
                syms.push(g);
                next.push(Word::new(syms));
            }
        }
        frontier = next;
    }
    assert_eq!(checked, (0..=6).map(|k| 5usize.pow(k)).sum::<usize>());
}

#[test]
fn orders_divide_group_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["S10", "S12", "C11x12x13x14x15", "S5^4"] {
        let p = GroupPresentation::parse(name).unwrap();
        let size = group_order(&p.family).unwrap();
        let classes = order_class_set(&p.family).unwrap();
        for _ in 0..1000 {
            let word = sample_word(&mut rng, p.num_generators, 40, true, !p.self_inverse_generators);
            let order = word_order(&word, &p).unwrap();
            assert_eq!(size % order as u128, 0, "{name}: {word}");
            assert!(order_class_index(&classes, order).is_some());
        }
    }
}

#[test]
fn table_class_counts() {
    let count = |name: &str| order_class_set(&name.parse().unwrap()).unwrap().len();
    assert_eq!(count("S10"), 16);
    assert_eq!(count("S12"), 23);
    assert_eq!(count("S5^4"), 12);
    // exact lcm set over divisor choices; sampled datasets see far fewer
    assert_eq!(count("C11x12x13x14x15"), 96);
}
