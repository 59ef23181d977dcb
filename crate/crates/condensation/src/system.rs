//! Exact one-dimensional similitudes, interval geometry, attractor hulls,
//! and validation of the coupled open-set conditions.
//!
//! Maps are affine `x ↦ scale·x + offset` with `0 < |scale| < 1`; a negative
//! scale encodes a reflection. All geometry is exact: interval endpoints are
//! rationals and every containment or disjointness decision is a rational
//! comparison, so acceptance of a system is reproducible and certificate
//! based — a system is never accepted on evidence that is merely plausible.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::words::{WeightSystem, Word};
use crate::{Error, Rational, Result};

/// Default word-tree depth searched for a cylinder certifying that the
/// outer attractor meets the open set.
pub const REACH_DEPTH: usize = 12;

/// Node budget for certificate searches.
const SEARCH_BUDGET: usize = 1 << 18;

/// An affine contraction `x ↦ scale·x + offset` on the line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Similitude {
    scale: Rational,
    offset: Rational,
}

impl Similitude {
    pub fn new(scale: Rational, offset: Rational) -> Result<Similitude> {
        if scale.is_zero() {
            return Err(Error::BadParameter("similitude scale must be non-zero".into()));
        }
        Ok(Similitude { scale, offset })
    }

    /// Identity map; the composition along the empty word.
    pub fn identity() -> Similitude {
        Similitude {
            scale: Rational::one(),
            offset: Rational::zero(),
        }
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    /// `|scale|`.
    pub fn contraction(&self) -> Rational {
        self.scale.abs()
    }

    pub fn is_contraction(&self) -> bool {
        self.contraction() < Rational::one()
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.scale * x + &self.offset
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Similitude) -> Similitude {
        Similitude {
            scale: &self.scale * &other.scale,
            offset: &self.scale * &other.offset + &self.offset,
        }
    }

    /// Fixed point `offset / (1 - scale)`; defined for contractions.
    pub fn fixed_point(&self) -> Rational {
        debug_assert!(self.is_contraction());
        &self.offset / (Rational::one() - &self.scale)
    }
}

/// Composition `f_{w_1} ∘ f_{w_2} ∘ … ∘ f_{w_n}` along a word.
pub fn compose_word(maps: &[Similitude], word: &Word) -> Result<Similitude> {
    if word.alphabet() as usize != maps.len() {
        return Err(Error::AlphabetMismatch {
            left: word.alphabet(),
            right: maps.len() as u8,
        });
    }
    let mut acc = Similitude::identity();
    for &letter in word.letters() {
        acc = acc.compose(&maps[letter as usize - 1]);
    }
    Ok(acc)
}

/// Evaluates the word composition at a point.
pub fn apply_word(maps: &[Similitude], word: &Word, x: &Rational) -> Result<Rational> {
    Ok(compose_word(maps, word)?.apply(x))
}

/// A non-degenerate interval with independently open or closed ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    lo_open: bool,
    hi_open: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_open: bool, hi_open: bool) -> Result<Interval> {
        if lo >= hi {
            return Err(Error::BadParameter("interval needs lo < hi".into()));
        }
        Ok(Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Interval> {
        Interval::new(lo, hi, false, false)
    }

    pub fn open(lo: Rational, hi: Rational) -> Result<Interval> {
        Interval::new(lo, hi, true, true)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.hi + &self.lo) / Rational::from_integer(2.into())
    }

    pub fn closure(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn interior(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        let above = if self.lo_open { x > &self.lo } else { x >= &self.lo };
        let below = if self.hi_open { x < &self.hi } else { x <= &self.hi };
        above && below
    }

    /// Set containment `other ⊆ self`, exact at the endpoints.
    pub fn contains(&self, other: &Interval) -> bool {
        let lower = match self.lo.cmp(&other.lo) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Equal => other.lo_open || !self.lo_open,
            core::cmp::Ordering::Greater => false,
        };
        let upper = match other.hi.cmp(&self.hi) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Equal => other.hi_open || !self.hi_open,
            core::cmp::Ordering::Greater => false,
        };
        lower && upper
    }

    pub fn is_disjoint(&self, other: &Interval) -> bool {
        if self.hi < other.lo || other.hi < self.lo {
            return true;
        }
        if self.hi == other.lo {
            return self.hi_open || other.lo_open;
        }
        if other.hi == self.lo {
            return other.hi_open || self.lo_open;
        }
        false
    }

    /// Infimum distance between the two sets; zero when they overlap or touch.
    pub fn distance(&self, other: &Interval) -> Rational {
        if self.hi < other.lo {
            &other.lo - &self.hi
        } else if other.hi < self.lo {
            &self.lo - &other.hi
        } else {
            Rational::zero()
        }
    }

    /// Distance from `self` to the complement of `outer`; requires
    /// `outer.contains(self)`.
    pub fn margin_within(&self, outer: &Interval) -> Rational {
        debug_assert!(outer.closure().contains(&self.closure()));
        let left = &self.lo - &outer.lo;
        let right = &outer.hi - &self.hi;
        left.min(right)
    }

    /// Image under an affine map; a negative scale swaps the ends.
    pub fn image(&self, map: &Similitude) -> Interval {
        let a = map.apply(&self.lo);
        let b = map.apply(&self.hi);
        if map.scale().is_positive() {
            Interval {
                lo: a,
                hi: b,
                lo_open: self.lo_open,
                hi_open: self.hi_open,
            }
        } else {
            Interval {
                lo: b,
                hi: a,
                lo_open: self.hi_open,
                hi_open: self.lo_open,
            }
        }
    }

    /// Intersection, or `None` when it is empty or a single point.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_open) = match self.lo.cmp(&other.lo) {
            core::cmp::Ordering::Greater => (self.lo.clone(), self.lo_open),
            core::cmp::Ordering::Less => (other.lo.clone(), other.lo_open),
            core::cmp::Ordering::Equal => (self.lo.clone(), self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.cmp(&other.hi) {
            core::cmp::Ordering::Less => (self.hi.clone(), self.hi_open),
            core::cmp::Ordering::Greater => (other.hi.clone(), other.hi_open),
            core::cmp::Ordering::Equal => (self.hi.clone(), self.hi_open || other.hi_open),
        };
        if lo < hi {
            Some(Interval {
                lo,
                hi,
                lo_open,
                hi_open,
            })
        } else {
            None
        }
    }

    /// Closed hull of the union.
    pub fn hull_with(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            lo_open: false,
            hi_open: false,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' },
        )
    }
}

// Endpoint pair used while iterating the hull map; may be degenerate.
type Bounds = (Rational, Rational);

fn map_bounds(map: &Similitude, b: &Bounds) -> Bounds {
    let x = map.apply(&b.0);
    let y = map.apply(&b.1);
    if map.scale().is_positive() {
        (x, y)
    } else {
        (y, x)
    }
}

// Which map (and which source endpoint) produced an extremal image point;
// `None` means the seed interval did.
type Attainer = Option<(usize, bool)>;

// One application of I ↦ hull(seed ∪ ⋃ f_i(I)), reporting which map and
// which source endpoint produced each side.
fn hull_step(
    maps: &[Similitude],
    seed: Option<&Bounds>,
    current: &Bounds,
) -> (Bounds, Attainer, Attainer) {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    let mut lo_from = None;
    let mut hi_from = None;
    if let Some(seed) = seed {
        lo = Some(seed.0.clone());
        hi = Some(seed.1.clone());
    }
    for (i, map) in maps.iter().enumerate() {
        let (a, b) = map_bounds(map, current);
        // `true` marks that the image endpoint came from `current.1`.
        let neg = !map.scale().is_positive();
        if lo.as_ref().is_none_or(|v| &a < v) {
            lo = Some(a);
            lo_from = Some((i, neg));
        }
        if hi.as_ref().is_none_or(|v| &b > v) {
            hi = Some(b);
            hi_from = Some((i, !neg));
        }
    }
    ((lo.unwrap(), hi.unwrap()), lo_from, hi_from)
}

// Solves the linear fixed-point equations selected by the attainer pattern
// and verifies the candidate exactly.
fn solve_pattern(
    maps: &[Similitude],
    seed: Option<&Bounds>,
    lo_from: Attainer,
    hi_from: Attainer,
) -> Option<Bounds> {
    // a = alpha1 + p·a + q·b ; b = alpha2 + u·a + v·b
    let zero = Rational::zero();
    let (alpha1, p, q) = match lo_from {
        None => (seed?.0.clone(), zero.clone(), zero.clone()),
        Some((i, from_hi)) => {
            let map = &maps[i];
            if from_hi {
                (map.offset().clone(), zero.clone(), map.scale().clone())
            } else {
                (map.offset().clone(), map.scale().clone(), zero.clone())
            }
        }
    };
    let (alpha2, u, v) = match hi_from {
        None => (seed?.1.clone(), zero.clone(), zero.clone()),
        Some((i, from_hi)) => {
            let map = &maps[i];
            if from_hi {
                (map.offset().clone(), zero.clone(), map.scale().clone())
            } else {
                (map.offset().clone(), map.scale().clone(), zero.clone())
            }
        }
    };
    let one = Rational::one();
    let det = (&one - &p) * (&one - &v) - &q * &u;
    if det.is_zero() {
        return None;
    }
    let a = (&alpha1 * (&one - &v) + &q * &alpha2) / &det;
    let b = (&alpha2 * (&one - &p) + &u * &alpha1) / &det;
    Some((a, b))
}

fn hull_fixed_point(maps: &[Similitude], seed: Option<&Bounds>) -> Result<Bounds> {
    if maps.is_empty() {
        return Err(Error::BadParameter("need at least one map".into()));
    }
    if maps.iter().any(|m| !m.is_contraction()) {
        return Err(Error::NotContractive);
    }
    // Start from the hull of the per-map fixed points (and the seed), which
    // lies inside the attractor hull, and expand.
    let mut lo: Option<Rational> = seed.map(|s| s.0.clone());
    let mut hi: Option<Rational> = seed.map(|s| s.1.clone());
    for map in maps {
        let fp = map.fixed_point();
        if lo.as_ref().is_none_or(|v| &fp < v) {
            lo = Some(fp.clone());
        }
        if hi.as_ref().is_none_or(|v| &fp > v) {
            hi = Some(fp);
        }
    }
    let mut current = (lo.unwrap(), hi.unwrap());
    for _ in 0..1000 {
        let (next, lo_from, hi_from) = hull_step(maps, seed, &current);
        if let Some(candidate) = solve_pattern(maps, seed, lo_from, hi_from) {
            if candidate.0 <= candidate.1 {
                let (image, _, _) = hull_step(maps, seed, &candidate);
                if image == candidate {
                    return Ok(candidate);
                }
            }
        }
        if next == current {
            return Ok(next);
        }
        current = next;
    }
    Err(Error::HullSearchFailed)
}

/// Smallest closed interval containing the attractor of the map family,
/// computed exactly. Errors if the attractor is a single point.
pub fn attractor_hull(maps: &[Similitude]) -> Result<Interval> {
    let (lo, hi) = hull_fixed_point(maps, None)?;
    if lo == hi {
        return Err(Error::PointAttractor);
    }
    Interval::closed(lo, hi)
}

/// Hull of the condensation attractor `K = seed ∪ ⋃ f_i(K)`.
pub fn condensation_hull(maps: &[Similitude], seed: &Interval) -> Result<Interval> {
    let bounds = (seed.lo().clone(), seed.hi().clone());
    let (lo, hi) = hull_fixed_point(maps, Some(&bounds))?;
    Interval::closed(lo, hi)
}

/// Shortest word whose cylinder image of `base` is contained in `target`.
///
/// Searches breadth first with lexicographic tie-break; subtrees whose image
/// cannot meet the target interior are pruned. `base` must be invariant
/// under the maps for the pruning to be sound, which holds for attractor
/// hulls.
pub fn containment_certificate(
    maps: &[Similitude],
    base: &Interval,
    target: &Interval,
    max_depth: usize,
    include_root: bool,
) -> Result<Option<Word>> {
    let alphabet = maps.len() as u8;
    let root = Word::empty(alphabet)?;
    let mut frontier = alloc::vec![(root, base.clone())];
    let mut visited = 0usize;
    for depth in 0..=max_depth {
        let mut next = Vec::new();
        for (word, image) in frontier {
            visited += 1;
            if visited > SEARCH_BUDGET {
                return Err(Error::BudgetExceeded {
                    budget: SEARCH_BUDGET,
                });
            }
            if (include_root || !word.is_empty()) && target.contains(&image) {
                return Ok(Some(word));
            }
            if image.hi() <= target.lo() || image.lo() >= target.hi() {
                continue;
            }
            if depth < max_depth {
                for letter in 1..=alphabet {
                    let child = word.child(letter)?;
                    let child_image = base.image(&compose_word(maps, &child)?);
                    next.push((child, child_image));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(None)
}

/// Outcome of one validation clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn pass(detail: String) -> Verdict {
        Verdict { pass: true, detail }
    }

    fn fail(detail: String) -> Verdict {
        Verdict { pass: false, detail }
    }
}

/// Per-clause verdicts of the coupled open-set conditions.
///
/// The clauses, in order: every outer image of the open set stays inside it;
/// the outer images are pairwise disjoint; the outer attractor meets the
/// open set (certified by a cylinder) and the inner support hull sits inside
/// it; the boundary of the open set avoids the inner support and the inner
/// support avoids every outer image of its closure; and the inner family
/// satisfies its own open-set condition on the support hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IoscReport {
    pub images_inside: Verdict,
    pub images_disjoint: Verdict,
    pub attractor_meets: Verdict,
    pub support_clear: Verdict,
    pub inner_osc: Verdict,
}

impl IoscReport {
    pub fn accepted(&self) -> bool {
        self.verdicts().iter().all(|(_, v)| v.pass)
    }

    pub fn verdicts(&self) -> [(&'static str, &Verdict); 5] {
        [
            ("images_inside", &self.images_inside),
            ("images_disjoint", &self.images_disjoint),
            ("attractor_meets", &self.attractor_meets),
            ("support_clear", &self.support_clear),
            ("inner_osc", &self.inner_osc),
        ]
    }

    pub fn first_failure(&self) -> Option<(&'static str, &Verdict)> {
        self.verdicts().into_iter().find(|(_, v)| !v.pass)
    }
}

/// An outer family with condensation probability, an inner family whose
/// self-similar measure is re-inserted, and the open set under test.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensationSystem {
    outer: Vec<Similitude>,
    outer_probs: Vec<Rational>,
    inner: Vec<Similitude>,
    inner_probs: Vec<Rational>,
    open_set: Interval,
}

impl CondensationSystem {
    /// `outer_probs` lists the condensation probability first, then one
    /// probability per outer map; `inner_probs` has one entry per inner map.
    pub fn new(
        outer: Vec<Similitude>,
        outer_probs: Vec<Rational>,
        inner: Vec<Similitude>,
        inner_probs: Vec<Rational>,
        open_set: Interval,
    ) -> Result<CondensationSystem> {
        if outer.is_empty() || inner.is_empty() {
            return Err(Error::BadParameter("need at least one map per family".into()));
        }
        if outer.len() > u8::MAX as usize || inner.len() > u8::MAX as usize {
            return Err(Error::BadParameter("alphabet larger than 255".into()));
        }
        if outer_probs.len() != outer.len() + 1 {
            return Err(Error::BadWeights(
                "outer probabilities must list the condensation weight first".into(),
            ));
        }
        if inner_probs.len() != inner.len() {
            return Err(Error::BadWeights(
                "one inner probability per inner map".into(),
            ));
        }
        for p in outer_probs.iter().chain(inner_probs.iter()) {
            if !p.is_positive() {
                return Err(Error::BadWeights("probabilities must be positive".into()));
            }
        }
        if outer_probs.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::BadWeights("outer probabilities must sum to 1".into()));
        }
        if inner_probs.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::BadWeights("inner probabilities must sum to 1".into()));
        }
        if outer.iter().chain(inner.iter()).any(|m| !m.is_contraction()) {
            return Err(Error::NotContractive);
        }
        if !(open_set.lo_open() && open_set.hi_open()) {
            return Err(Error::BadParameter("the reference set must be open".into()));
        }
        Ok(CondensationSystem {
            outer,
            outer_probs,
            inner,
            inner_probs,
            open_set,
        })
    }

    pub fn outer_maps(&self) -> &[Similitude] {
        &self.outer
    }

    pub fn inner_maps(&self) -> &[Similitude] {
        &self.inner
    }

    /// Condensation probability `p_0`.
    pub fn p0(&self) -> &Rational {
        &self.outer_probs[0]
    }

    /// Probabilities attached to the outer maps (excluding `p_0`).
    pub fn outer_probs(&self) -> &[Rational] {
        &self.outer_probs[1..]
    }

    pub fn inner_probs(&self) -> &[Rational] {
        &self.inner_probs
    }

    pub fn open_set(&self) -> &Interval {
        &self.open_set
    }

    pub fn outer_weights(&self) -> WeightSystem {
        WeightSystem::new(
            self.outer_probs().to_vec(),
            self.outer.iter().map(Similitude::contraction).collect(),
        )
        .expect("outer weights validated at construction")
    }

    pub fn inner_weights(&self) -> WeightSystem {
        WeightSystem::new(
            self.inner_probs.clone(),
            self.inner.iter().map(Similitude::contraction).collect(),
        )
        .expect("inner weights validated at construction")
    }

    /// Checks the coupled open-set conditions with the default search depth.
    pub fn check_iosc(&self) -> Result<IoscReport> {
        self.check_iosc_depth(REACH_DEPTH)
    }

    pub fn check_iosc_depth(&self, reach_depth: usize) -> Result<IoscReport> {
        let u = &self.open_set;

        let mut images_inside = Verdict::pass("every image stays inside".into());
        for (i, map) in self.outer.iter().enumerate() {
            let image = u.image(map);
            if !u.contains(&image) {
                images_inside = Verdict::fail(format!(
                    "image of outer map {} escapes: {} ⊄ {}",
                    i + 1,
                    image,
                    u
                ));
                break;
            }
        }

        let mut images_disjoint = Verdict::pass("images pairwise disjoint".into());
        'outer: for i in 0..self.outer.len() {
            for j in i + 1..self.outer.len() {
                let a = u.image(&self.outer[i]);
                let b = u.image(&self.outer[j]);
                if !a.is_disjoint(&b) {
                    images_disjoint = Verdict::fail(format!(
                        "images of outer maps {} and {} overlap: {} vs {}",
                        i + 1,
                        j + 1,
                        a,
                        b
                    ));
                    break 'outer;
                }
            }
        }

        // A degenerate attractor cannot carry the measure theory; report it
        // on the hull-dependent clauses instead of failing the whole check.
        let hulls = attractor_hull(&self.inner).and_then(|inner_hull| {
            attractor_hull(&self.outer).map(|outer_hull| (inner_hull, outer_hull))
        });
        let (inner_hull, outer_hull) = match hulls {
            Ok(pair) => pair,
            Err(err) => {
                let degenerate = Verdict::fail(format!("attractor hull unavailable: {err}"));
                return Ok(IoscReport {
                    images_inside,
                    images_disjoint,
                    attractor_meets: degenerate.clone(),
                    support_clear: degenerate.clone(),
                    inner_osc: degenerate,
                });
            }
        };

        let attractor_meets = if outer_hull.hi() <= u.lo() || outer_hull.lo() >= u.hi() {
            Verdict::fail(format!(
                "outer attractor hull {} avoids the open set {}",
                outer_hull, u
            ))
        } else if !u.contains(&inner_hull) {
            Verdict::fail(format!(
                "inner support hull {} not inside the open set {}",
                inner_hull, u
            ))
        } else {
            match containment_certificate(&self.outer, &outer_hull, u, reach_depth, true)? {
                Some(word) => Verdict::pass(format!(
                    "support inside; attractor certified by cylinder {:?}",
                    word.letters()
                )),
                None => Verdict::fail(format!(
                    "inconclusive: no cylinder of depth ≤ {} certifies the attractor meets {}",
                    reach_depth, u
                )),
            }
        };

        let support_clear = {
            let closed_support = inner_hull.closure();
            if closed_support.contains_point(u.lo()) || closed_support.contains_point(u.hi()) {
                Verdict::fail(format!(
                    "boundary of {} touches the inner support hull {}",
                    u, closed_support
                ))
            } else {
                let mut verdict = Verdict::pass("support clear of boundary and outer images".into());
                for (i, map) in self.outer.iter().enumerate() {
                    let image = u.closure().image(map);
                    if !closed_support.is_disjoint(&image) {
                        verdict = Verdict::fail(format!(
                            "inner support hull {} meets outer image {} of map {}",
                            closed_support,
                            image,
                            i + 1
                        ));
                        break;
                    }
                }
                verdict
            }
        };

        let inner_osc = {
            let j_set = inner_hull.closure();
            let mut verdict = Verdict::pass("inner family keeps its hull and splits it".into());
            for (i, map) in self.inner.iter().enumerate() {
                let image = j_set.image(map);
                if !j_set.contains(&image) {
                    verdict = Verdict::fail(format!(
                        "inner map {} leaves the support hull: {} ⊄ {}",
                        i + 1,
                        image,
                        j_set
                    ));
                    break;
                }
            }
            if verdict.pass {
                'inner: for i in 0..self.inner.len() {
                    for j in i + 1..self.inner.len() {
                        let a = j_set.interior().image(&self.inner[i]);
                        let b = j_set.interior().image(&self.inner[j]);
                        if !a.is_disjoint(&b) {
                            verdict = Verdict::fail(format!(
                                "inner interiors of maps {} and {} overlap: {} vs {}",
                                i + 1,
                                j + 1,
                                a,
                                b
                            ));
                            break 'inner;
                        }
                    }
                }
            }
            verdict
        };

        Ok(IoscReport {
            images_inside,
            images_disjoint,
            attractor_meets,
            support_clear,
            inner_osc,
        })
    }
}

/// A condensation system that passed validation, with its hulls cached.
#[derive(Debug, Clone)]
pub struct Validated {
    sys: CondensationSystem,
    report: IoscReport,
    inner_hull: Interval,
    outer_hull: Interval,
    full_hull: Interval,
    outer_ws: WeightSystem,
    inner_ws: WeightSystem,
}

impl Validated {
    pub fn new(sys: CondensationSystem) -> Result<Validated> {
        let report = sys.check_iosc()?;
        if !report.accepted() {
            let (name, verdict) = report.first_failure().unwrap();
            return Err(Error::IoscRejected(format!("{name}: {}", verdict.detail)));
        }
        let inner_hull = attractor_hull(sys.inner_maps())?;
        let outer_hull = attractor_hull(sys.outer_maps())?;
        let full_hull = condensation_hull(sys.outer_maps(), &inner_hull)?;
        let outer_ws = sys.outer_weights();
        let inner_ws = sys.inner_weights();
        Ok(Validated {
            sys,
            report,
            inner_hull,
            outer_hull,
            full_hull,
            outer_ws,
            inner_ws,
        })
    }

    pub fn system(&self) -> &CondensationSystem {
        &self.sys
    }

    pub fn report(&self) -> &IoscReport {
        &self.report
    }

    /// Hull of the inner attractor (the support of the condensation measure).
    pub fn inner_hull(&self) -> &Interval {
        &self.inner_hull
    }

    /// Hull of the outer attractor.
    pub fn outer_hull(&self) -> &Interval {
        &self.outer_hull
    }

    /// Hull of the full condensation attractor.
    pub fn full_hull(&self) -> &Interval {
        &self.full_hull
    }

    pub fn p0(&self) -> &Rational {
        self.sys.p0()
    }

    pub fn outer_weights(&self) -> &WeightSystem {
        &self.outer_ws
    }

    pub fn inner_weights(&self) -> &WeightSystem {
        &self.inner_ws
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ratio;

    fn sim(num: i64, den: i64, onum: i64, oden: i64) -> Similitude {
        Similitude::new(ratio(num, den), ratio(onum, oden)).unwrap()
    }

    #[test]
    fn apply_and_compose_examples() {
        let outer = fixtures::demo_outer_maps();
        // Second outer map sends 0 to 3/4.
        assert_eq!(outer[1].apply(&ratio(0, 1)), ratio(3, 4));
        let word = Word::new(2, &[1, 1]).unwrap();
        let composed = compose_word(&outer, &word).unwrap();
        assert_eq!(composed.scale(), &ratio(1, 16));
        assert_eq!(composed.offset(), &ratio(0, 1));
        let inner = fixtures::demo_inner_maps();
        assert_eq!(inner[0].apply(&ratio(0, 1)), ratio(1, 3));
        let empty = Word::empty(2).unwrap();
        assert_eq!(compose_word(&outer, &empty).unwrap(), Similitude::identity());
    }

    #[test]
    fn composition_is_a_homomorphism() {
        let maps = fixtures::demo_outer_maps();
        let a = Word::new(2, &[1, 2, 2]).unwrap();
        let b = Word::new(2, &[2, 1]).unwrap();
        let ab = a.concat(&b).unwrap();
        let left = compose_word(&maps, &ab).unwrap();
        let right = compose_word(&maps, &a)
            .unwrap()
            .compose(&compose_word(&maps, &b).unwrap());
        assert_eq!(left, right);
    }

    #[test]
    fn hull_examples() {
        let inner = fixtures::demo_inner_maps();
        let hull = attractor_hull(&inner).unwrap();
        assert_eq!(hull.lo(), &ratio(8, 21));
        assert_eq!(hull.hi(), &ratio(13, 21));

        let outer = fixtures::demo_outer_maps();
        let hull = attractor_hull(&outer).unwrap();
        assert_eq!(hull.lo(), &ratio(0, 1));
        assert_eq!(hull.hi(), &ratio(1, 1));

        // A single map has a point attractor.
        let single = alloc::vec![sim(1, 2, 1, 4)];
        assert_eq!(attractor_hull(&single), Err(Error::PointAttractor));
    }

    #[test]
    fn hull_is_invariant_and_scales_diameters() {
        let maps = fixtures::demo_outer_maps();
        let hull = attractor_hull(&maps).unwrap();
        let mut image = hull.image(&maps[0]);
        for map in &maps[1..] {
            image = image.hull_with(&hull.image(map));
        }
        assert_eq!(image, hull);

        let word = Word::new(2, &[1, 2, 1]).unwrap();
        let composed = compose_word(&maps, &word).unwrap();
        let piece = hull.image(&composed);
        assert_eq!(piece.length(), composed.contraction() * hull.length());
    }

    #[test]
    fn condensation_hull_covers_seed() {
        let outer = fixtures::demo_outer_maps();
        let seed = attractor_hull(&fixtures::demo_inner_maps()).unwrap();
        let hull = condensation_hull(&outer, &seed).unwrap();
        assert_eq!(hull, Interval::closed(ratio(0, 1), ratio(1, 1)).unwrap());
        assert!(hull.contains(&seed));
    }

    #[test]
    fn iosc_accepts_the_demo_system() {
        let sys = fixtures::demo_system();
        let report = sys.check_iosc().unwrap();
        assert!(report.accepted(), "{report:?}");
        let validated = Validated::new(sys).unwrap();
        assert_eq!(validated.full_hull().length(), ratio(1, 1));
        assert_eq!(validated.inner_hull().length(), ratio(5, 21));
    }

    #[test]
    fn iosc_rejects_small_open_set() {
        let sys = fixtures::demo_system_with_open_set(
            Interval::open(ratio(0, 1), ratio(1, 2)).unwrap(),
        );
        let report = sys.check_iosc().unwrap();
        assert!(!report.images_inside.pass);
        assert!(report.images_inside.detail.contains("map 2"));
        assert!(Validated::new(sys).is_err());
    }

    #[test]
    fn iosc_rejects_identical_maps() {
        let map = sim(1, 4, 0, 1);
        let sys = CondensationSystem::new(
            alloc::vec![map.clone(), map],
            alloc::vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)],
            fixtures::demo_inner_maps(),
            alloc::vec![ratio(1, 2), ratio(1, 2)],
            Interval::open(ratio(0, 1), ratio(1, 1)).unwrap(),
        )
        .unwrap();
        let report = sys.check_iosc().unwrap();
        assert!(!report.images_disjoint.pass);
    }

    #[test]
    fn system_constructor_validates() {
        let outer = fixtures::demo_outer_maps();
        let inner = fixtures::demo_inner_maps();
        let u = Interval::open(ratio(0, 1), ratio(1, 1)).unwrap();
        // Probabilities not summing to one.
        assert!(CondensationSystem::new(
            outer.clone(),
            alloc::vec![ratio(1, 2), ratio(1, 3), ratio(1, 3)],
            inner.clone(),
            alloc::vec![ratio(1, 2), ratio(1, 2)],
            u.clone(),
        )
        .is_err());
        // Non-open reference set.
        assert!(CondensationSystem::new(
            outer,
            alloc::vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)],
            inner,
            alloc::vec![ratio(1, 2), ratio(1, 2)],
            Interval::closed(ratio(0, 1), ratio(1, 1)).unwrap(),
        )
        .is_err());
    }

    #[test]
    fn interval_logic() {
        let u = Interval::open(ratio(0, 1), ratio(1, 1)).unwrap();
        let c = Interval::closed(ratio(8, 21), ratio(13, 21)).unwrap();
        assert!(u.contains(&c));
        assert!(!c.contains(&u));
        assert!(u.contains(&u.interior()));
        // Touching closed intervals are not disjoint; touching open ones are.
        let a = Interval::closed(ratio(0, 1), ratio(1, 2)).unwrap();
        let b = Interval::closed(ratio(1, 2), ratio(1, 1)).unwrap();
        assert!(!a.is_disjoint(&b));
        assert!(a.interior().is_disjoint(&b.interior()));
        assert_eq!(a.distance(&b), ratio(0, 1));
        let far = Interval::closed(ratio(3, 2), ratio(2, 1)).unwrap();
        assert_eq!(a.distance(&far), ratio(1, 1));
        assert_eq!(c.margin_within(&u), ratio(8, 21));
        // Reflection flips endpoints.
        let neg = sim(-1, 2, 1, 1);
        let img = a.image(&neg);
        assert_eq!(img.lo(), &ratio(3, 4));
        assert_eq!(img.hi(), &ratio(1, 1));
    }
}
