//! Stopping-time partitions of the word tree.
//!
//! For a threshold `η^k` — `η` being the smallest letter product
//! `w_i ρ_i^r` across both families — the outer tree is cut at the first
//! words whose running product drops below the threshold. Words strictly
//! above the cut, together with the overhang levels of a ragged cut, carry
//! one inner cut each, produced the same way with the outer product as
//! seed. The resulting bundle is the combinatorial backbone for both the
//! upper and the lower distortion bounds.
//!
//! All threshold comparisons go through [`RTerm`], so membership of a word
//! in a cut is decided exactly whenever the order `r` is rational.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::system::Validated;
use crate::words::{enumerate, Antichain, Word, WeightSystem};
use crate::{Error, Exponent, RTerm, Result};

/// Default node budget for cut construction.
pub const NODE_BUDGET: usize = 10_000_000;

/// Threshold base and growth data shared by all cuts of one system.
#[derive(Debug, Clone)]
pub struct GrowthConstants {
    /// Smallest letter product `w_i ρ_i^r` over both families.
    pub floor: RTerm,
    /// Largest letter product over both families.
    pub ceil: RTerm,
    /// Least `h ≥ 1` with `ceil^h < floor`.
    pub span: u32,
    /// `Σ_{i=1..span} M^i` for inner alphabet size `M`.
    pub fan: BigUint,
    /// Upper bound on the piece-count growth factor between consecutive
    /// levels: `fan · max(M, N)^span + 1`.
    pub growth_cap: BigUint,
}

fn letter_terms(ws: &WeightSystem, exp: &Exponent) -> Result<Vec<RTerm>> {
    ws.weights()
        .iter()
        .zip(ws.ratios())
        .map(|(w, c)| exp.term(w.clone(), c.clone()))
        .collect()
}

fn min_term(terms: &[RTerm]) -> RTerm {
    let mut best = terms[0].clone();
    for t in &terms[1..] {
        if t.cmp_guarded(&best).0 == core::cmp::Ordering::Less {
            best = t.clone();
        }
    }
    best
}

fn max_term(terms: &[RTerm]) -> RTerm {
    let mut best = terms[0].clone();
    for t in &terms[1..] {
        if t.cmp_guarded(&best).0 == core::cmp::Ordering::Greater {
            best = t.clone();
        }
    }
    best
}

/// Computes the threshold base and the growth constants of a family pair.
pub fn growth_constants(
    outer: &WeightSystem,
    inner: &WeightSystem,
    exp: &Exponent,
) -> Result<GrowthConstants> {
    let outer_terms = letter_terms(outer, exp)?;
    let inner_terms = letter_terms(inner, exp)?;
    let floor = {
        let a = min_term(&outer_terms);
        let b = min_term(&inner_terms);
        if a.cmp_guarded(&b).0 == core::cmp::Ordering::Less {
            a
        } else {
            b
        }
    };
    let ceil = {
        let a = max_term(&outer_terms);
        let b = max_term(&inner_terms);
        if a.cmp_guarded(&b).0 == core::cmp::Ordering::Greater {
            a
        } else {
            b
        }
    };
    let mut span = 0u32;
    let mut power = exp.one();
    loop {
        span += 1;
        power = power.mul(&ceil);
        if power.cmp_guarded(&floor).0 == core::cmp::Ordering::Less {
            break;
        }
        if span > 10_000 {
            return Err(Error::BadParameter(
                "growth span did not terminate; letter products too close to one".into(),
            ));
        }
    }
    let m = BigUint::from(inner.alphabet() as u32);
    let n = BigUint::from(outer.alphabet() as u32);
    let mut fan = BigUint::zero();
    let mut m_pow = BigUint::one();
    for _ in 0..span {
        m_pow = &m_pow * &m;
        fan += &m_pow;
    }
    let n_pow = n.pow(span);
    let growth_cap = &fan * m_pow.max(n_pow) + BigUint::one();
    Ok(GrowthConstants {
        floor,
        ceil,
        span,
        fan,
        growth_cap,
    })
}

// Depth-first cut construction: descend while `seed·product ≥ threshold`,
// emit the first words falling below. Members come out in lexicographic
// order together with their running products.
fn build_cut(
    alphabet: u8,
    letters: &[RTerm],
    seed: RTerm,
    threshold: &RTerm,
    budget: &mut usize,
    boundary_hits: &mut usize,
) -> Result<Vec<(Word, RTerm)>> {
    let mut members = Vec::new();
    let root = Word::empty(alphabet)?;
    let mut stack = alloc::vec![(root, seed)];
    while let Some((word, term)) = stack.pop() {
        if *budget == 0 {
            return Err(Error::BudgetExceeded {
                budget: NODE_BUDGET,
            });
        }
        *budget -= 1;
        let (above, boundary) = term.at_least(threshold);
        if boundary {
            *boundary_hits += 1;
        }
        if above {
            for letter in (1..=alphabet).rev() {
                let child = word.child(letter)?;
                let child_term = term.mul(&letters[letter as usize - 1]);
                stack.push((child, child_term));
            }
        } else {
            members.push((word, term));
        }
    }
    Ok(members)
}

/// One stopping level of a system: the outer cut, the cylinder words above
/// and beside it, their inner cuts, and the piece counts.
#[derive(Debug, Clone)]
pub struct PartitionBundle {
    pub k: u32,
    /// Order the bundle was built at.
    pub r: f64,
    /// The outer stopping antichain; its words carry tail pieces.
    pub tail_words: Antichain,
    /// Words carrying cylinder pieces: all levels below the cut's minimum
    /// depth followed by the overhang of a ragged cut, sorted.
    pub cylinder_words: Vec<Word>,
    /// The ragged part of `cylinder_words`.
    pub overhang: Vec<Word>,
    /// Inner cut per cylinder word, in the same order.
    pub inner_cuts: Vec<Antichain>,
    /// Log products `ln(p_σ s_σ^r)` per tail word.
    pub tail_logs: Vec<f64>,
    /// Log products `ln(p_σ s_σ^r t_ρ c_ρ^r)` per cylinder word and inner word.
    pub inner_logs: Vec<Vec<f64>>,
    pub min_tail_len: usize,
    pub max_tail_len: usize,
    /// Tail count plus all inner-cut counts.
    pub piece_count: usize,
    /// Float-mode comparisons that landed inside the guard band.
    pub boundary_hits: usize,
}

impl PartitionBundle {
    pub fn tail_count(&self) -> usize {
        self.tail_words.len()
    }

    pub fn inner_count(&self, index: usize) -> usize {
        self.inner_cuts[index].len()
    }

    /// `Σ_pieces value^{s/(s+r)}` over cylinder and tail pieces.
    ///
    /// At `s` equal to the dominant branch dimension this sum is the
    /// bounded/divergent indicator separating the two coefficient regimes.
    pub fn power_sum(&self, s: f64) -> f64 {
        let e = s / (s + self.r);
        let mut sum = 0.0;
        for logs in &self.inner_logs {
            for &l in logs {
                sum += libm::exp(e * l);
            }
        }
        for &l in &self.tail_logs {
            sum += libm::exp(e * l);
        }
        sum
    }
}

/// Builds the outer stopping antichain at level `k`.
pub fn build_tail_cut(
    outer: &WeightSystem,
    inner: &WeightSystem,
    exp: &Exponent,
    k: u32,
    budget: usize,
) -> Result<Antichain> {
    if k == 0 {
        return Err(Error::BadParameter(
            "stopping level must be at least 1".into(),
        ));
    }
    let growth = growth_constants(outer, inner, exp)?;
    let threshold = growth.floor.powi(k);
    let letters = letter_terms(outer, exp)?;
    let mut budget = budget;
    let mut boundary = 0;
    let members = build_cut(
        outer.alphabet(),
        &letters,
        exp.one(),
        &threshold,
        &mut budget,
        &mut boundary,
    )?;
    Antichain::new(members.into_iter().map(|(w, _)| w).collect())
}

/// Words carrying cylinder pieces for a given outer cut: full levels below
/// the cut depth, then the overhang. Returns `(all, overhang)`.
pub fn cylinder_words(cut: &Antichain) -> Result<(Vec<Word>, Vec<Word>)> {
    let low = cut.min_len();
    let mut all = Vec::new();
    for level in 0..low {
        all.extend(enumerate(cut.alphabet(), level)?);
    }
    let overhang = cut.overhang();
    all.extend(overhang.iter().cloned());
    Ok((all, overhang))
}

/// Builds the inner cut seeded by an outer product.
///
/// The seed is the outer word's product `p_σ s_σ^r`; descent continues
/// while `seed · t_ρ c_ρ^r` stays at or above the threshold. For seeds
/// exactly at the threshold the cut is the first inner level.
pub fn build_inner_cut(
    inner: &WeightSystem,
    exp: &Exponent,
    seed: RTerm,
    threshold: &RTerm,
    budget: &mut usize,
) -> Result<(Antichain, Vec<f64>)> {
    let letters = letter_terms(inner, exp)?;
    let mut boundary = 0;
    let members = build_cut(
        inner.alphabet(),
        &letters,
        seed,
        threshold,
        budget,
        &mut boundary,
    )?;
    let logs = members.iter().map(|(_, t)| t.log_value()).collect();
    Antichain::new(members.into_iter().map(|(w, _)| w).collect()).map(|a| (a, logs))
}

/// Assembles the full bundle for a weight-system pair at level `k`.
pub fn build_bundle_weights(
    outer: &WeightSystem,
    inner: &WeightSystem,
    exp: &Exponent,
    k: u32,
    budget: usize,
) -> Result<PartitionBundle> {
    if k == 0 {
        return Err(Error::BadParameter(
            "stopping level must be at least 1".into(),
        ));
    }
    let growth = growth_constants(outer, inner, exp)?;
    let threshold = growth.floor.powi(k);
    let outer_letters = letter_terms(outer, exp)?;
    let mut budget = budget;
    let mut boundary_hits = 0;

    let tail_members = build_cut(
        outer.alphabet(),
        &outer_letters,
        exp.one(),
        &threshold,
        &mut budget,
        &mut boundary_hits,
    )?;
    let tail_logs: Vec<f64> = tail_members.iter().map(|(_, t)| t.log_value()).collect();
    let tail_words = Antichain::new(tail_members.into_iter().map(|(w, _)| w).collect())?;

    let (cylinders, overhang) = cylinder_words(&tail_words)?;
    let mut inner_cuts = Vec::with_capacity(cylinders.len());
    let mut inner_logs = Vec::with_capacity(cylinders.len());
    for word in &cylinders {
        // Seed = running outer product along the word.
        let mut seed = exp.one();
        for &letter in word.letters() {
            seed = seed.mul(&outer_letters[letter as usize - 1]);
        }
        let (cut, logs) = build_inner_cut(inner, exp, seed, &threshold, &mut budget)?;
        inner_cuts.push(cut);
        inner_logs.push(logs);
    }

    let piece_count = tail_words.len() + inner_cuts.iter().map(Antichain::len).sum::<usize>();
    Ok(PartitionBundle {
        k,
        r: exp.value(),
        min_tail_len: tail_words.min_len(),
        max_tail_len: tail_words.max_len(),
        tail_words,
        cylinder_words: cylinders,
        overhang,
        inner_cuts,
        tail_logs,
        inner_logs,
        piece_count,
        boundary_hits,
    })
}

/// Assembles the bundle for a validated system.
///
/// ```
/// use condensation::partition::{build_bundle, NODE_BUDGET};
/// use condensation::{fixtures, Exponent};
///
/// let sys = fixtures::demo_validated();
/// let exp = Exponent::integer(2).unwrap();
/// let bundle = build_bundle(&sys, &exp, 1, NODE_BUDGET).unwrap();
/// assert_eq!(bundle.piece_count, 12);
/// assert_eq!(bundle.tail_count(), 4);
/// ```
pub fn build_bundle(
    sys: &Validated,
    exp: &Exponent,
    k: u32,
    budget: usize,
) -> Result<PartitionBundle> {
    build_bundle_weights(sys.outer_weights(), sys.inner_weights(), exp, k, budget)
}
