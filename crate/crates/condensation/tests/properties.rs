//! Property tests: the antichain classifier against a brute-force oracle,
//! exactness of multiplicative weights, mass conservation over random
//! maximal antichains, and sampler consistency against exact masses.

use condensation::measure::{decompose, sample_measure, PieceKind};
use condensation::rng::Rng;
use condensation::system::compose_word;
use condensation::words::{
    classify_antichain, enumerate, Antichain, AntichainClass, Relation, WeightSystem, Word,
};
use condensation::{fixtures, ratio, Rational};

use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

// Brute force: check all pairs, then enumerate every word of the maximal
// length and demand a prefix in the set.
fn oracle_classify(words: &[Word]) -> AntichainClass {
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if words[i].relation(&words[j]).unwrap() != Relation::Incomparable {
                let (a, b) = if words[i] <= words[j] {
                    (words[i].clone(), words[j].clone())
                } else {
                    (words[j].clone(), words[i].clone())
                };
                return AntichainClass::NotAntichain { first: a, second: b };
            }
        }
    }
    let alphabet = words[0].alphabet();
    let depth = words.iter().map(Word::len).max().unwrap();
    for probe in enumerate(alphabet, depth).unwrap() {
        if !words.iter().any(|w| w.is_prefix_of(&probe)) {
            return AntichainClass::NonMaximal { uncovered: probe };
        }
    }
    AntichainClass::Maximal
}

fn word_set_strategy() -> impl Strategy<Value = Vec<Word>> {
    (1u8..=3)
        .prop_flat_map(|alphabet| {
            prop::collection::vec(
                prop::collection::vec(1u8..=alphabet, 0..=6),
                1..=10,
            )
            .prop_map(move |sets| {
                let mut words: Vec<Word> = sets
                    .into_iter()
                    .map(|letters| Word::new(alphabet, &letters).unwrap())
                    .collect();
                words.sort_unstable();
                words.dedup();
                words
            })
        })
        .prop_filter("non-empty", |words| !words.is_empty())
}

// Random maximal antichain: cut the tree with a seeded coin, stopping at
// depth six at the latest.
fn random_cut(alphabet: u8, seed: u64) -> Vec<Word> {
    let mut rng = Rng::new(seed);
    let mut cut = Vec::new();
    let mut stack = vec![Word::empty(alphabet).unwrap()];
    while let Some(word) = stack.pop() {
        if word.len() >= 6 || (!word.is_empty() && rng.next_f64() < 0.5) {
            cut.push(word);
        } else {
            for letter in 1..=alphabet {
                stack.push(word.child(letter).unwrap());
            }
        }
    }
    cut
}

fn random_probs(rng: &mut Rng, len: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..len).map(|_| 1 + rng.next_index(9) as i64).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|a| ratio(a, total)).collect()
}

proptest! {
    #[test]
    fn classifier_agrees_with_oracle(words in word_set_strategy()) {
        let ours = classify_antichain(&words).unwrap();
        let oracle = oracle_classify(&words);
        // Witness choices may differ; the class must agree and the witness
        // must be valid.
        match (&ours, &oracle) {
            (AntichainClass::Maximal, AntichainClass::Maximal) => {}
            (AntichainClass::NonMaximal { uncovered }, AntichainClass::NonMaximal { .. }) => {
                prop_assert!(!words.iter().any(|w| w.is_prefix_of(uncovered)));
            }
            (
                AntichainClass::NotAntichain { first, second },
                AntichainClass::NotAntichain { .. },
            ) => {
                prop_assert_ne!(
                    first.relation(second).unwrap(),
                    Relation::Incomparable
                );
            }
            _ => prop_assert!(false, "{ours:?} vs {oracle:?}"),
        }
    }

    #[test]
    fn weights_multiply_exactly(
        seed in any::<u64>(),
        a in prop::collection::vec(1u8..=2, 0..=8),
        b in prop::collection::vec(1u8..=2, 0..=8),
    ) {
        let mut rng = Rng::new(seed);
        let mut weights = random_probs(&mut rng, 2);
        // Scale below one so the weight constraint holds strictly.
        for w in &mut weights {
            *w *= ratio(1, 2);
        }
        let ws = WeightSystem::new(weights, vec![ratio(1, 3), ratio(2, 5)]).unwrap();
        let left = Word::new(2, &a).unwrap();
        let right = Word::new(2, &b).unwrap();
        let joined = left.concat(&right).unwrap();
        prop_assert_eq!(
            ws.weight_of(&joined).unwrap(),
            ws.weight_of(&left).unwrap() * ws.weight_of(&right).unwrap()
        );
        prop_assert_eq!(
            ws.ratio_of(&joined).unwrap(),
            ws.ratio_of(&left).unwrap() * ws.ratio_of(&right).unwrap()
        );
    }

    #[test]
    fn maximal_cut_conserves_probability(seed in any::<u64>(), alphabet in 2u8..=3) {
        let cut = random_cut(alphabet, seed);
        let chain = Antichain::new(cut).unwrap();
        prop_assert_eq!(
            chain.maximality(),
            condensation::words::Maximality::Maximal
        );
        // Inner-style weights sum to one over any maximal cut.
        let mut rng = Rng::new(seed ^ 0xABCD);
        let probs = random_probs(&mut rng, alphabet as usize);
        let ratios = vec![ratio(1, 4); alphabet as usize];
        let ws = WeightSystem::new(probs, ratios).unwrap();
        let total: Rational = chain
            .words()
            .iter()
            .map(|w| ws.weight_of(w).unwrap())
            .sum();
        prop_assert_eq!(total, Rational::one());
    }

    #[test]
    fn composition_along_concatenation(
        a in prop::collection::vec(1u8..=2, 0..=6),
        b in prop::collection::vec(1u8..=2, 0..=6),
    ) {
        let maps = fixtures::skew_scale_system().outer_maps().to_vec();
        let left = Word::new(2, &a).unwrap();
        let right = Word::new(2, &b).unwrap();
        let joined = left.concat(&right).unwrap();
        let direct = compose_word(&maps, &joined).unwrap();
        let composed = compose_word(&maps, &left)
            .unwrap()
            .compose(&compose_word(&maps, &right).unwrap());
        prop_assert_eq!(direct, composed);
    }
}

#[test]
fn decompose_mass_conservation_on_random_cuts() {
    let sys = fixtures::demo_validated();
    for seed in 0..40u64 {
        let cut = Antichain::new(random_cut(2, seed)).unwrap();
        if cut.max_len() > 8 {
            continue;
        }
        let pieces = decompose(&sys, &cut).unwrap();
        let total: Rational = pieces.iter().map(|p| p.mass.clone()).sum();
        assert_eq!(total, Rational::one(), "seed {seed}");
    }
}

#[test]
fn sampler_frequencies_match_decomposition() {
    let sys = fixtures::demo_validated();
    let cut = Antichain::new(enumerate(2, 2).unwrap()).unwrap();
    let pieces = decompose(&sys, &cut).unwrap();
    let count = 100_000usize;
    let points = sample_measure(&sys, 99, count, None);

    for piece in pieces {
        let hull = match &piece.kind {
            PieceKind::Cylinder { outer, .. } => sys
                .inner_hull()
                .image(&compose_word(sys.system().outer_maps(), outer).unwrap()),
            PieceKind::Tail { outer } => sys
                .full_hull()
                .image(&compose_word(sys.system().outer_maps(), outer).unwrap()),
        };
        let lo = hull.lo().to_f64().unwrap();
        let hi = hull.hi().to_f64().unwrap();
        let freq = points.iter().filter(|&&x| x >= lo && x <= hi).count() as f64 / count as f64;
        let mass = piece.mass.to_f64().unwrap();
        let sigma = (mass * (1.0 - mass) / count as f64).sqrt();
        assert!(
            (freq - mass).abs() <= 4.0 * sigma,
            "{:?}: freq {freq} vs mass {mass}",
            piece.kind
        );
    }
}
