//! Exact masses of cylinder and tail pieces of the invariant measure,
//! antichain decompositions of the attractor, and a seeded sampler.
//!
//! The invariant measure satisfies `μ = p_0 ν + Σ p_i μ∘f_i⁻¹`. Its mass on
//! an outer-cylinder copy of an inner cylinder is the exact product
//! `p_0 · p_σ · t_ω`, and on an outer-cylinder copy of the whole attractor
//! it is `p_σ`. Decomposing along a maximal antichain splits the attractor
//! into finitely many such pieces whose masses add to one exactly.

use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::rng::Rng;
use crate::system::{attractor_hull, Similitude, Validated};
use crate::words::{enumerate, Antichain, Maximality, Word};
use crate::{Error, Rational, Result};

/// Hard cap on pieces produced by a decomposition.
const PIECE_BUDGET: usize = 1 << 22;

/// Fraction of the inner hull length used as default sampler resolution.
const DEFAULT_RESOLUTION: f64 = 1.0 / (1u64 << 40) as f64;

/// Identifies one piece of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PieceKind {
    /// `f_σ(g_ω(C))` — an outer-shifted inner cylinder.
    Cylinder { outer: Word, inner: Word },
    /// `f_σ(K)` — an outer cylinder of the full attractor.
    Tail { outer: Word },
}

/// A piece with its exact mass and hull diameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceMass {
    pub kind: PieceKind,
    pub mass: Rational,
    pub diameter: Rational,
}

/// Exact mass `p_0 · p_σ · t_ω` of `f_σ(g_ω(C))`.
pub fn cylinder_mass(sys: &Validated, outer: &Word, inner: &Word) -> Result<Rational> {
    let p = sys.outer_weights().weight_of(outer)?;
    let t = sys.inner_weights().weight_of(inner)?;
    Ok(sys.p0() * p * t)
}

/// Exact mass `p_σ` of `f_σ(K)`.
pub fn tail_mass(sys: &Validated, outer: &Word) -> Result<Rational> {
    sys.outer_weights().weight_of(outer)
}

/// Splits the attractor along a maximal antichain: one cylinder piece
/// `f_σ(C)` for every word above or beside the cut and one tail piece
/// `f_σ(K)` per cut word. The masses sum to one exactly.
pub fn decompose(sys: &Validated, cut: &Antichain) -> Result<Vec<PieceMass>> {
    if cut.alphabet() as usize != sys.system().outer_maps().len() {
        return Err(Error::AlphabetMismatch {
            left: cut.alphabet(),
            right: sys.system().outer_maps().len() as u8,
        });
    }
    if let Maximality::NonMaximal { .. } = cut.maximality() {
        return Err(Error::NotMaximal);
    }
    let alphabet = cut.alphabet();
    let low = cut.min_len();
    let mut cylinders: Vec<Word> = Vec::new();
    for level in 0..low {
        if cylinders.len() + (alphabet as usize).pow(level as u32) > PIECE_BUDGET {
            return Err(Error::BudgetExceeded {
                budget: PIECE_BUDGET,
            });
        }
        cylinders.extend(enumerate(alphabet, level)?);
    }
    cylinders.extend(cut.overhang());

    let inner_len = sys.inner_hull().length();
    let full_len = sys.full_hull().length();
    let outer_ws = sys.outer_weights();
    let inner_root = Word::empty(sys.system().inner_maps().len() as u8)?;

    let mut pieces = Vec::with_capacity(cylinders.len() + cut.len());
    for word in cylinders {
        let weight = outer_ws.weight_of(&word)?;
        let scale = outer_ws.ratio_of(&word)?;
        pieces.push(PieceMass {
            mass: sys.p0() * &weight,
            diameter: scale * &inner_len,
            kind: PieceKind::Cylinder {
                outer: word,
                inner: inner_root.clone(),
            },
        });
    }
    for word in cut.words() {
        let weight = outer_ws.weight_of(word)?;
        let scale = outer_ws.ratio_of(word)?;
        pieces.push(PieceMass {
            mass: weight,
            diameter: scale * &full_len,
            kind: PieceKind::Tail {
                outer: word.clone(),
            },
        });
    }
    Ok(pieces)
}

// Affine map in float form for the sampler's inner loop.
#[derive(Clone, Copy)]
struct MapF {
    a: f64,
    b: f64,
}

impl MapF {
    fn from(map: &Similitude) -> MapF {
        MapF {
            a: map.scale().to_f64().unwrap(),
            b: map.offset().to_f64().unwrap(),
        }
    }

    fn apply(&self, x: f64) -> f64 {
        self.a * x + self.b
    }

    fn after(&self, inner: &MapF) -> MapF {
        MapF {
            a: self.a * inner.a,
            b: self.a * inner.b + self.b,
        }
    }
}

const IDENTITY: MapF = MapF { a: 1.0, b: 0.0 };

fn cumulative(probs: &[Rational]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p.to_f64().unwrap();
            acc
        })
        .collect()
}

fn pick(cums: &[f64], u: f64) -> usize {
    cums.iter().position(|&c| u < c).unwrap_or(cums.len() - 1)
}

// Descends the inner tree until the cylinder is shorter than `resolution`,
// then emits the cylinder midpoint.
fn descend_inner(
    maps: &[MapF],
    cums: &[f64],
    mid: f64,
    hull_len: f64,
    resolution: f64,
    rng: &mut Rng,
) -> f64 {
    let mut g = IDENTITY;
    while g.a.abs() * hull_len >= resolution {
        let j = pick(cums, rng.next_f64());
        g = g.after(&maps[j]);
    }
    g.apply(mid)
}

/// Draws `count` points of the invariant measure.
///
/// Each draw walks the outer tree, stopping with probability `p_0` at the
/// current prefix and descending into branch `i` with probability `p_i`;
/// on stopping it draws a point of the inner measure at the given absolute
/// resolution (default `2⁻⁴⁰` of the inner hull) and pushes it through the
/// accumulated outer map. Deterministic for a fixed seed.
pub fn sample_measure(
    sys: &Validated,
    seed: u64,
    count: usize,
    resolution: Option<f64>,
) -> Vec<f64> {
    let outer: Vec<MapF> = sys.system().outer_maps().iter().map(MapF::from).collect();
    let inner: Vec<MapF> = sys.system().inner_maps().iter().map(MapF::from).collect();
    let p0 = sys.p0().to_f64().unwrap();
    let mut outer_cums = cumulative(sys.system().outer_probs());
    for c in &mut outer_cums {
        *c += p0;
    }
    let inner_cums = cumulative(sys.system().inner_probs());
    let hull_len = sys.inner_hull().length().to_f64().unwrap();
    let mid = sys.inner_hull().midpoint().to_f64().unwrap();
    let eps = resolution.unwrap_or(DEFAULT_RESOLUTION * hull_len);

    let mut rng = Rng::new(seed);
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let mut f = IDENTITY;
        loop {
            let u = rng.next_f64();
            if u < p0 {
                break;
            }
            let i = pick(&outer_cums, u);
            f = f.after(&outer[i]);
        }
        let y = descend_inner(&inner, &inner_cums, mid, hull_len, eps, &mut rng);
        points.push(f.apply(y));
    }
    points
}

/// Draws `count` points of the self-similar measure of `maps` with the
/// given probabilities, at the given absolute resolution.
pub fn sample_self_similar(
    maps: &[Similitude],
    probs: &[Rational],
    seed: u64,
    count: usize,
    resolution: Option<f64>,
) -> Result<Vec<f64>> {
    if maps.len() != probs.len() || maps.is_empty() {
        return Err(Error::BadWeights(
            "one probability per map required".into(),
        ));
    }
    let hull = attractor_hull(maps)?;
    let hull_len = hull.length().to_f64().unwrap();
    let mid = hull.midpoint().to_f64().unwrap();
    let eps = resolution.unwrap_or(DEFAULT_RESOLUTION * hull_len);
    let mapfs: Vec<MapF> = maps.iter().map(MapF::from).collect();
    let cums = cumulative(probs);
    let mut rng = Rng::new(seed);
    Ok((0..count)
        .map(|_| descend_inner(&mapfs, &cums, mid, hull_len, eps, &mut rng))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ratio;
    use num_traits::{One, Zero};

    fn demo() -> Validated {
        fixtures::demo_validated()
    }

    fn ow(letters: &[u8]) -> Word {
        Word::new(2, letters).unwrap()
    }

    #[test]
    fn mass_examples() {
        let sys = demo();
        let theta = Word::empty(2).unwrap();
        assert_eq!(cylinder_mass(&sys, &theta, &theta).unwrap(), ratio(1, 3));
        assert_eq!(
            cylinder_mass(&sys, &ow(&[1]), &ow(&[2])).unwrap(),
            ratio(1, 18)
        );
        assert_eq!(
            cylinder_mass(&sys, &ow(&[1, 2]), &theta).unwrap(),
            ratio(1, 3) * ratio(1, 9)
        );
        assert_eq!(tail_mass(&sys, &theta).unwrap(), Rational::one());
        assert_eq!(tail_mass(&sys, &ow(&[1])).unwrap(), ratio(1, 3));
        assert_eq!(tail_mass(&sys, &ow(&[1, 2])).unwrap(), ratio(1, 9));
    }

    fn total_mass(pieces: &[PieceMass]) -> Rational {
        pieces.iter().map(|p| p.mass.clone()).sum()
    }

    #[test]
    fn decompose_level_cuts() {
        let sys = demo();
        let level1 = Antichain::new(enumerate(2, 1).unwrap()).unwrap();
        let pieces = decompose(&sys, &level1).unwrap();
        assert_eq!(pieces.len(), 3);
        assert!(pieces.iter().all(|p| p.mass == ratio(1, 3)));
        assert_eq!(total_mass(&pieces), Rational::one());

        let level2 = Antichain::new(enumerate(2, 2).unwrap()).unwrap();
        let pieces = decompose(&sys, &level2).unwrap();
        let cylinders = pieces
            .iter()
            .filter(|p| matches!(p.kind, PieceKind::Cylinder { .. }))
            .count();
        assert_eq!((cylinders, pieces.len()), (3, 7));
        assert_eq!(total_mass(&pieces), Rational::one());
    }

    #[test]
    fn decompose_ragged_cut() {
        let sys = demo();
        let cut = Antichain::new(alloc::vec![ow(&[1]), ow(&[2, 1]), ow(&[2, 2])]).unwrap();
        let pieces = decompose(&sys, &cut).unwrap();
        // Cylinders at θ and at the overhang word (2); tails at the cut.
        assert_eq!(pieces.len(), 5);
        assert_eq!(total_mass(&pieces), Rational::one());
        let overhang_piece = pieces
            .iter()
            .find(|p| matches!(&p.kind, PieceKind::Cylinder { outer, .. } if outer == &ow(&[2])))
            .unwrap();
        assert_eq!(overhang_piece.mass, ratio(1, 3) * ratio(1, 3));
    }

    #[test]
    fn decompose_rejects_gappy_cut() {
        let sys = demo();
        let cut = Antichain::new(alloc::vec![ow(&[1]), ow(&[2, 1])]).unwrap();
        assert_eq!(decompose(&sys, &cut), Err(Error::NotMaximal));
    }

    #[test]
    fn piece_diameters_scale_exactly() {
        let sys = demo();
        let cut = Antichain::new(enumerate(2, 2).unwrap()).unwrap();
        for piece in decompose(&sys, &cut).unwrap() {
            match &piece.kind {
                PieceKind::Cylinder { outer, .. } => {
                    let expected = sys.outer_weights().ratio_of(outer).unwrap()
                        * sys.inner_hull().length();
                    assert_eq!(piece.diameter, expected);
                }
                PieceKind::Tail { outer } => {
                    let expected = sys.outer_weights().ratio_of(outer).unwrap()
                        * sys.full_hull().length();
                    assert_eq!(piece.diameter, expected);
                }
            }
        }
    }

    #[test]
    fn tail_mass_expands_one_step() {
        let sys = demo();
        for word in [ow(&[1]), ow(&[2, 1]), Word::empty(2).unwrap()] {
            let direct = tail_mass(&sys, &word).unwrap();
            let mut expanded = sys.p0() * tail_mass(&sys, &word).unwrap();
            for i in 1..=2u8 {
                expanded += tail_mass(&sys, &word.child(i).unwrap()).unwrap();
            }
            assert_eq!(direct, expanded);
        }
    }

    #[test]
    fn cylinder_mass_is_inner_additive() {
        let sys = demo();
        let outer = ow(&[2, 1]);
        for inner in [Word::empty(2).unwrap(), ow(&[1]), ow(&[2, 2])] {
            let direct = cylinder_mass(&sys, &outer, &inner).unwrap();
            let mut sum = Rational::zero();
            for j in 1..=2u8 {
                sum += cylinder_mass(&sys, &outer, &inner.child(j).unwrap()).unwrap();
            }
            assert_eq!(direct, sum);
        }
    }

    #[test]
    fn sampler_matches_exact_masses() {
        let sys = demo();
        let n = 100_000usize;
        let points = sample_measure(&sys, 20_240_315, n, None);
        assert_eq!(points.len(), n);

        let freq = |lo: f64, hi: f64| {
            points.iter().filter(|&&x| x >= lo && x <= hi).count() as f64 / n as f64
        };
        // First outer tail copy occupies [0, 1/4] with mass 1/3.
        let p = 1.0 / 3.0;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq(0.0, 0.25) - p).abs() <= 4.0 * sigma);
        // The inner support hull [8/21, 13/21] carries the condensation mass 1/3.
        assert!((freq(8.0 / 21.0, 13.0 / 21.0) - p).abs() <= 4.0 * sigma);
        // Deterministic per seed.
        let again = sample_measure(&sys, 20_240_315, 1_000, None);
        assert_eq!(&points[..1_000], &again[..]);
    }

    #[test]
    fn self_similar_sampler_stays_in_hull() {
        let maps = fixtures::cantor_maps();
        let probs = alloc::vec![ratio(1, 2), ratio(1, 2)];
        let points = sample_self_similar(&maps, &probs, 7, 20_000, None).unwrap();
        assert!(points.iter().all(|&x| (0.0..=1.0).contains(&x)));
        // Middle third is empty for the Cantor measure.
        let in_gap = points
            .iter()
            .filter(|&&x| x > 1.0 / 3.0 + 1e-9 && x < 2.0 / 3.0 - 1e-9)
            .count();
        assert_eq!(in_gap, 0);
        // Left half carries mass 1/2.
        let left = points.iter().filter(|&&x| x < 0.5).count() as f64 / 20_000.0;
        assert!((left - 0.5).abs() < 0.02);
    }
}
