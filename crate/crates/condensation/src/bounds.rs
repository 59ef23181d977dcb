//! Analytic distortion bounds for the stopping-time piece families.
//!
//! The upper bound places one code point in every piece of the antichain
//! decomposition and sums mass times diameter to the `r`-th power. The
//! lower-bound machinery shifts every piece by a pair of marker words into
//! a well-separated test family: pairwise distances dominate a fixed
//! multiple of the larger diameter, and piece energies `mass·diam^r` sit in
//! an explicit band around the stopping threshold. The constant prefactor
//! of the lower bound is not constructive, so only the bracketed sum is
//! reported; the companion estimator checks it empirically.

use alloc::vec::Vec;

use num_traits::{Pow, Signed, ToPrimitive, Zero};

use crate::measure::PieceKind;
use crate::partition::{growth_constants, GrowthConstants, PartitionBundle};
use crate::system::{compose_word, containment_certificate, Interval, Validated};
use crate::words::Word;
use crate::{Error, Exponent, RTerm, Rational, Result};

/// Default word-tree depth searched for marker words.
pub const MARKER_DEPTH: usize = 16;

/// Marker words and the clearance radii of the shifted test family.
///
/// The outer marker sends the full attractor strictly inside the open set;
/// the inner marker sends the inner support strictly inside the window
/// carved out of the support hull. The four gaps measure how far the
/// relevant sets stay from the complements of their enclosures; their
/// minimum is the separation factor of the test family.
#[derive(Debug, Clone)]
pub struct SeparationData {
    pub outer_marker: Word,
    pub inner_marker: Word,
    /// Open neighbourhood of the support hull kept clear of outer images.
    pub hood: Interval,
    /// Window `int(hull) ∩ open set ∩ hood` receiving the inner marker.
    pub window: Interval,
    /// Smallest distance from the support hull to an outer image of the
    /// closed open set.
    pub image_gap: Rational,
    /// Distance from the support hull to the hood's complement.
    pub gap_hood: Rational,
    /// Distance from the shifted attractor copy to the open set's complement.
    pub gap_outer: Rational,
    /// Distance from the shifted support copy to the window's complement.
    pub gap_inner: Rational,
    /// Distance from the support hull to the open set's complement.
    pub gap_support: Rational,
    /// Minimum of the four gaps.
    pub separation: Rational,
}

/// Finds the marker words and clearance radii of a validated system.
pub fn find_markers(sys: &Validated, depth_budget: usize) -> Result<SeparationData> {
    let u = sys.system().open_set();
    let support = sys.inner_hull().closure();

    let image_gap = sys
        .system()
        .outer_maps()
        .iter()
        .map(|map| support.distance(&u.closure().image(map)))
        .min()
        .ok_or_else(|| Error::BadParameter("system has no outer maps".into()))?;
    if !image_gap.is_positive() {
        return Err(Error::IoscRejected(
            "support touches an outer image of the closed open set".into(),
        ));
    }

    let half_gap = &image_gap / Rational::from_integer(2.into());
    let hood = Interval::open(support.lo() - &half_gap, support.hi() + &half_gap)?;
    let window = support
        .interior()
        .intersect(u)
        .and_then(|v| v.intersect(&hood))
        .ok_or_else(|| Error::IoscRejected("support window is empty".into()))?;

    let outer_marker =
        containment_certificate(sys.system().outer_maps(), sys.full_hull(), u, depth_budget, false)?
            .ok_or(Error::MarkerNotFound {
                depth: depth_budget,
            })?;
    let inner_marker = containment_certificate(
        sys.system().inner_maps(),
        &support,
        &window,
        depth_budget,
        false,
    )?
    .ok_or(Error::MarkerNotFound {
        depth: depth_budget,
    })?;

    let shifted_attractor = sys
        .full_hull()
        .image(&compose_word(sys.system().outer_maps(), &outer_marker)?);
    let shifted_support = support.image(&compose_word(sys.system().inner_maps(), &inner_marker)?);

    let gap_hood = support.margin_within(&hood);
    let gap_outer = shifted_attractor.margin_within(u);
    let gap_inner = shifted_support.margin_within(&window);
    let gap_support = support.margin_within(u);
    let separation = gap_hood
        .clone()
        .min(gap_outer.clone())
        .min(gap_inner.clone())
        .min(gap_support.clone());

    Ok(SeparationData {
        outer_marker,
        inner_marker,
        hood,
        window,
        image_gap,
        gap_hood,
        gap_outer,
        gap_inner,
        gap_support,
        separation,
    })
}

/// One marker-shifted piece with its exact hull, mass and diameter.
#[derive(Debug, Clone)]
pub struct TestPiece {
    pub kind: PieceKind,
    pub hull: Interval,
    pub mass: Rational,
    pub diameter: Rational,
}

impl TestPiece {
    /// Piece energy `mass · diameter^r` as a comparable term.
    pub fn energy(&self, exp: &Exponent) -> Result<RTerm> {
        exp.term(self.mass.clone(), self.diameter.clone())
    }
}

/// Builds the marker-shifted test family of a bundle: one piece per
/// (cylinder word, inner word) pair and one per tail word.
pub fn test_pieces(
    sys: &Validated,
    bundle: &PartitionBundle,
    markers: &SeparationData,
) -> Result<Vec<TestPiece>> {
    let outer_maps = sys.system().outer_maps();
    let inner_maps = sys.system().inner_maps();
    let outer_ws = sys.outer_weights();
    let inner_ws = sys.inner_weights();
    let inner_len = sys.inner_hull().length();
    let full_len = sys.full_hull().length();
    let p0 = sys.p0();

    let mut pieces = Vec::with_capacity(bundle.piece_count);
    for (word, cut) in bundle.cylinder_words.iter().zip(&bundle.inner_cuts) {
        let shifted_outer = word.concat(&markers.outer_marker)?;
        let outer_map = compose_word(outer_maps, &shifted_outer)?;
        let p = outer_ws.weight_of(&shifted_outer)?;
        let s = outer_ws.ratio_of(&shifted_outer)?;
        for rho in cut.words() {
            let shifted_inner = rho.concat(&markers.inner_marker)?;
            let inner_map = compose_word(inner_maps, &shifted_inner)?;
            let t = inner_ws.weight_of(&shifted_inner)?;
            let c = inner_ws.ratio_of(&shifted_inner)?;
            pieces.push(TestPiece {
                hull: sys.inner_hull().image(&outer_map.compose(&inner_map)),
                mass: p0 * &p * &t,
                diameter: &s * &c * &inner_len,
                kind: PieceKind::Cylinder {
                    outer: shifted_outer.clone(),
                    inner: shifted_inner,
                },
            });
        }
    }
    for word in bundle.tail_words.words() {
        let shifted = word.concat(&markers.outer_marker)?;
        let map = compose_word(outer_maps, &shifted)?;
        pieces.push(TestPiece {
            hull: sys.full_hull().image(&map),
            mass: outer_ws.weight_of(&shifted)?,
            diameter: outer_ws.ratio_of(&shifted)? * &full_len,
            kind: PieceKind::Tail { outer: shifted },
        });
    }
    debug_assert_eq!(pieces.len(), bundle.piece_count);
    Ok(pieces)
}

/// Exact total mass of a piece family.
pub fn family_mass(pieces: &[TestPiece]) -> Rational {
    pieces.iter().map(|p| p.mass.clone()).sum()
}

/// Guaranteed lower bound on the test family's mass:
/// `p_0 · p_marker · t_marker`.
pub fn mass_floor(sys: &Validated, markers: &SeparationData) -> Result<Rational> {
    let p = sys.outer_weights().weight_of(&markers.outer_marker)?;
    let t = sys.inner_weights().weight_of(&markers.inner_marker)?;
    Ok(sys.p0() * p * t)
}

/// Result of the pairwise separation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub pairs: usize,
    pub pass: bool,
    /// Indices of the first violating pair.
    pub violation: Option<(usize, usize)>,
}

/// Checks `distance(A, B) ≥ separation · max(|A|, |B|)` for every pair,
/// with exact rational arithmetic.
pub fn verify_separation(pieces: &[TestPiece], separation: &Rational) -> SeparationReport {
    let mut pairs = 0;
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            pairs += 1;
            let required = separation * pieces[i].diameter.clone().max(pieces[j].diameter.clone());
            if pieces[i].hull.distance(&pieces[j].hull) < required {
                return SeparationReport {
                    pairs,
                    pass: false,
                    violation: Some((i, j)),
                };
            }
        }
    }
    SeparationReport {
        pairs,
        pass: true,
        violation: None,
    }
}

/// Energy-band data: every piece energy lies in
/// `[lower_coeff · η^k, upper_coeff · η^k)`.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    /// Scale of cylinder energies: `p_0 p_τ t_ρ (s_τ c_ρ |C|)^r` for the
    /// marker pair `(τ, ρ)`.
    pub cyl_scale: RTerm,
    /// Smallest inner letter product.
    pub inner_floor: RTerm,
    /// Scale of tail energies: `p_τ s_τ^r`.
    pub tail_scale: RTerm,
    /// Smallest outer letter product.
    pub outer_floor: RTerm,
    /// `max(cyl_scale, tail_scale)`.
    pub upper_coeff: RTerm,
    /// `min(cyl_scale·inner_floor, tail_scale·outer_floor)`.
    pub lower_coeff: RTerm,
    pub band_ok: bool,
    /// Index of the first piece outside the band.
    pub violation: Option<usize>,
    pub min_energy_log: f64,
    pub max_energy_log: f64,
}

/// Verifies the energy band for a test family.
pub fn energy_bounds(
    sys: &Validated,
    markers: &SeparationData,
    growth: &GrowthConstants,
    pieces: &[TestPiece],
    exp: &Exponent,
    k: u32,
) -> Result<EnergyReport> {
    let outer_ws = sys.outer_weights();
    let inner_ws = sys.inner_weights();
    let p_marker = outer_ws.weight_of(&markers.outer_marker)?;
    let s_marker = outer_ws.ratio_of(&markers.outer_marker)?;
    let t_marker = inner_ws.weight_of(&markers.inner_marker)?;
    let c_marker = inner_ws.ratio_of(&markers.inner_marker)?;

    let cyl_scale = exp.term(
        sys.p0() * &p_marker * &t_marker,
        &s_marker * &c_marker * sys.inner_hull().length(),
    )?;
    let tail_scale = exp.term(p_marker, s_marker)?;

    let min_of = |ws: &crate::words::WeightSystem| -> Result<RTerm> {
        let mut best: Option<RTerm> = None;
        for (w, c) in ws.weights().iter().zip(ws.ratios()) {
            let t = exp.term(w.clone(), c.clone())?;
            best = Some(match best {
                None => t,
                Some(b) => {
                    if t.cmp_guarded(&b).0 == core::cmp::Ordering::Less {
                        t
                    } else {
                        b
                    }
                }
            });
        }
        Ok(best.unwrap())
    };
    let inner_floor = min_of(inner_ws)?;
    let outer_floor = min_of(outer_ws)?;

    let upper_coeff = if cyl_scale.cmp_guarded(&tail_scale).0 == core::cmp::Ordering::Greater {
        cyl_scale.clone()
    } else {
        tail_scale.clone()
    };
    let a = cyl_scale.mul(&inner_floor);
    let b = tail_scale.mul(&outer_floor);
    let lower_coeff = if a.cmp_guarded(&b).0 == core::cmp::Ordering::Less {
        a
    } else {
        b
    };

    let threshold = growth.floor.powi(k);
    let upper = upper_coeff.mul(&threshold);
    let lower = lower_coeff.mul(&threshold);

    let mut band_ok = true;
    let mut violation = None;
    let mut min_log = f64::INFINITY;
    let mut max_log = f64::NEG_INFINITY;
    for (i, piece) in pieces.iter().enumerate() {
        let energy = piece.energy(exp)?;
        min_log = min_log.min(energy.log_value());
        max_log = max_log.max(energy.log_value());
        let (at_least_lower, _) = energy.at_least(&lower);
        let strictly_below_upper =
            energy.cmp_guarded(&upper).0 == core::cmp::Ordering::Less;
        if !(at_least_lower && strictly_below_upper) {
            band_ok = false;
            violation = Some(i);
            break;
        }
    }

    Ok(EnergyReport {
        cyl_scale,
        inner_floor,
        tail_scale,
        outer_floor,
        upper_coeff,
        lower_coeff,
        band_ok,
        violation,
        min_energy_log: min_log,
        max_energy_log: max_log,
    })
}

/// The analytic distortion bounds of one stopping level, with the explicit
/// codebook realizing the upper bound.
///
/// `upper = p_0·|C|^r·cylinder_sum + |K|^r·tail_sum` bounds the power
/// distortion achievable with `piece_count` points; `lower_sum` is the same
/// pair of sums without prefactors — the quantity the non-constructive
/// lower bound multiplies. Exact values are carried when `r` is an integer.
#[derive(Debug, Clone)]
pub struct DistortionBounds {
    pub upper: f64,
    pub upper_exact: Option<Rational>,
    pub lower_sum: f64,
    pub lower_sum_exact: Option<Rational>,
    pub cylinder_sum: f64,
    pub tail_sum: f64,
    pub cylinder_sum_exact: Option<Rational>,
    pub tail_sum_exact: Option<Rational>,
    /// Midpoints of the unshifted pieces, sorted and deduplicated.
    pub codebook: Vec<f64>,
}

/// Computes the distortion bounds and codebook of a bundle.
pub fn distortion_bounds(
    sys: &Validated,
    bundle: &PartitionBundle,
    exp: &Exponent,
) -> Result<DistortionBounds> {
    let r = exp.value();
    let cylinder_sum: f64 = bundle
        .inner_logs
        .iter()
        .flat_map(|logs| logs.iter())
        .map(|&l| libm::exp(l))
        .sum();
    let tail_sum: f64 = bundle.tail_logs.iter().map(|&l| libm::exp(l)).sum();

    let outer_maps = sys.system().outer_maps();
    let inner_maps = sys.system().inner_maps();
    let mut codebook = Vec::with_capacity(bundle.piece_count);
    for (word, cut) in bundle.cylinder_words.iter().zip(&bundle.inner_cuts) {
        let outer_map = compose_word(outer_maps, word)?;
        for rho in cut.words() {
            let map = outer_map.compose(&compose_word(inner_maps, rho)?);
            codebook.push(sys.inner_hull().image(&map).midpoint().to_f64().unwrap());
        }
    }
    for word in bundle.tail_words.words() {
        let map = compose_word(outer_maps, word)?;
        codebook.push(sys.full_hull().image(&map).midpoint().to_f64().unwrap());
    }
    codebook.sort_unstable_by(f64::total_cmp);
    codebook.dedup();

    let (cylinder_sum_exact, tail_sum_exact) = match exp.as_integer() {
        Some(ri) => {
            let outer_ws = sys.outer_weights();
            let inner_ws = sys.inner_weights();
            let mut cyl = Rational::zero();
            for (word, cut) in bundle.cylinder_words.iter().zip(&bundle.inner_cuts) {
                let p = outer_ws.weight_of(word)?;
                let s = outer_ws.ratio_of(word)?.pow(ri as i32);
                let mut inner_total = Rational::zero();
                for rho in cut.words() {
                    let t = inner_ws.weight_of(rho)?;
                    let c = inner_ws.ratio_of(rho)?.pow(ri as i32);
                    inner_total += t * c;
                }
                cyl += p * s * inner_total;
            }
            let mut tail = Rational::zero();
            for word in bundle.tail_words.words() {
                let p = outer_ws.weight_of(word)?;
                let s = outer_ws.ratio_of(word)?.pow(ri as i32);
                tail += p * s;
            }
            (Some(cyl), Some(tail))
        }
        None => (None, None),
    };

    let inner_len = sys.inner_hull().length().to_f64().unwrap();
    let full_len = sys.full_hull().length().to_f64().unwrap();
    let p0 = sys.p0().to_f64().unwrap();
    let upper = p0 * libm::pow(inner_len, r) * cylinder_sum + libm::pow(full_len, r) * tail_sum;
    let lower_sum = cylinder_sum + tail_sum;

    let (upper_exact, lower_sum_exact) = match (exp.as_integer(), &cylinder_sum_exact, &tail_sum_exact)
    {
        (Some(ri), Some(cyl), Some(tail)) => {
            let cl = sys.inner_hull().length().pow(ri as i32);
            let kl = sys.full_hull().length().pow(ri as i32);
            (
                Some(sys.p0() * cl * cyl + kl * tail),
                Some(cyl + tail),
            )
        }
        _ => (None, None),
    };

    Ok(DistortionBounds {
        upper,
        upper_exact,
        lower_sum,
        lower_sum_exact,
        cylinder_sum,
        tail_sum,
        cylinder_sum_exact,
        tail_sum_exact,
        codebook,
    })
}

/// Everything the bound analysis produces for one stopping level.
#[derive(Debug, Clone)]
pub struct LevelReport {
    pub k: u32,
    pub piece_count: usize,
    pub bounds: DistortionBounds,
    pub energy: EnergyReport,
    pub separation: SeparationReport,
    /// Exact total mass of the shifted family.
    pub family_mass: Rational,
    /// Guaranteed floor for that mass.
    pub mass_floor: Rational,
}

/// Runs the full bound analysis of one stopping level.
pub fn level_report(
    sys: &Validated,
    bundle: &PartitionBundle,
    markers: &SeparationData,
    exp: &Exponent,
) -> Result<LevelReport> {
    let growth = growth_constants(sys.outer_weights(), sys.inner_weights(), exp)?;
    let pieces = test_pieces(sys, bundle, markers)?;
    let energy = energy_bounds(sys, markers, &growth, &pieces, exp, bundle.k)?;
    let separation = verify_separation(&pieces, &markers.separation);
    let bounds = distortion_bounds(sys, bundle, exp)?;
    Ok(LevelReport {
        k: bundle.k,
        piece_count: bundle.piece_count,
        bounds,
        energy,
        separation,
        family_mass: family_mass(&pieces),
        mass_floor: mass_floor(sys, markers)?,
    })
}
