//! Moran-type dimension equations for both branches of a condensation
//! system, and the crossover order below which the inner branch dominates.
//!
//! For a weight/ratio family `(w_i, ρ_i)` and order `r`, the branch
//! dimension is the unique `s` with `Σ (w_i ρ_i^r)^{s/(s+r)} = 1`. The sum
//! is strictly decreasing in `s`, starts at the family size and falls below
//! one, so bisection is safe. The quantization dimension of the coupled
//! system is the larger of the inner and outer branch solutions.

use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::system::Validated;
use crate::words::WeightSystem;
use crate::{Error, Result};

/// Default residual and bracket tolerance for dimension solves.
pub const SOLVE_TOL: f64 = 1e-12;

/// Which branch attains the quantization dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Inner,
    Outer,
}

/// Both branch dimensions at one order, with solver residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimResult {
    pub r: f64,
    /// Dimension of the inner (condensation-measure) branch.
    pub inner_dim: f64,
    /// Dimension of the outer branch.
    pub outer_dim: f64,
    /// `max(inner_dim, outer_dim)`.
    pub dim: f64,
    pub branch: Branch,
    /// Branches agree within the solver tolerance.
    pub tied: bool,
    pub residual_inner: f64,
    pub residual_outer: f64,
}

/// `Σ_i (w_i · ρ_i^r)^{s/(s+r)}`.
///
/// Requires every `w_i ρ_i^r < 1`; under that guard the sum is strictly
/// decreasing in `s` on `[0, ∞)`.
pub fn moran_sum(weights: &[f64], ratios: &[f64], r: f64, s: f64) -> Result<f64> {
    if weights.len() != ratios.len() || weights.is_empty() {
        return Err(Error::BadWeights("need matching weight/ratio lists".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::BadOrder("order must be positive".into()));
    }
    if s < 0.0 {
        return Err(Error::BadParameter("exponent must be non-negative".into()));
    }
    let e = s / (s + r);
    let mut sum = 0.0;
    for (&w, &c) in weights.iter().zip(ratios) {
        let base = w * libm::pow(c, r);
        if base >= 1.0 {
            return Err(Error::BadWeights(
                "every weight·ratio^r must be below one".into(),
            ));
        }
        sum += libm::pow(base, e);
    }
    Ok(sum)
}

/// Solves `Σ (w_i ρ_i^r)^{s/(s+r)} = 1` for `s` by bisection.
///
/// The bracket starts at `[0, 1]` and doubles until the sum drops below
/// one; the returned value satisfies both a bracket-width and a residual
/// bound of `tol`.
pub fn solve_dim(weights: &[f64], ratios: &[f64], r: f64, tol: f64) -> Result<f64> {
    if weights.len() < 2 {
        return Err(Error::DegenerateSolve(
            "a single-map family has no dimension equation crossing".into(),
        ));
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::BadParameter("tolerance must be positive".into()));
    }
    let f = |s: f64| moran_sum(weights, ratios, r, s);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut doublings = 0;
    while f(hi)? >= 1.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 80 {
            return Err(Error::DegenerateSolve("no finite dimension bracket".into()));
        }
    }
    // Bisect until both the bracket and the residual meet `tol`; the Moran
    // sum steepens like 1/r near the root, so the width bound alone is not
    // enough at small orders.
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..300 {
        mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let v = f(mid)?;
        if v >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 0.25 * tol && (v - 1.0).abs() <= 0.5 * tol {
            break;
        }
    }
    let residual = (f(mid)? - 1.0).abs();
    if hi - lo > tol || residual > tol {
        return Err(Error::DegenerateSolve(
            "bisection failed to meet the tolerance".into(),
        ));
    }
    Ok(mid)
}

fn to_f64(ws: &WeightSystem) -> (Vec<f64>, Vec<f64>) {
    (
        ws.weights().iter().map(|q| q.to_f64().unwrap()).collect(),
        ws.ratios().iter().map(|q| q.to_f64().unwrap()).collect(),
    )
}

/// Solves both branch equations of a validated system and reports the
/// quantization dimension `max(inner, outer)`.
pub fn quantization_dim(sys: &Validated, r: f64, tol: f64) -> Result<DimResult> {
    let (tw, tc) = to_f64(sys.inner_weights());
    let (pw, ps) = to_f64(sys.outer_weights());
    let inner_dim = solve_dim(&tw, &tc, r, tol)?;
    let outer_dim = solve_dim(&pw, &ps, r, tol)?;
    let residual_inner = (moran_sum(&tw, &tc, r, inner_dim)? - 1.0).abs();
    let residual_outer = (moran_sum(&pw, &ps, r, outer_dim)? - 1.0).abs();
    let branch = if inner_dim >= outer_dim {
        Branch::Inner
    } else {
        Branch::Outer
    };
    Ok(DimResult {
        r,
        inner_dim,
        outer_dim,
        dim: inner_dim.max(outer_dim),
        branch,
        tied: (inner_dim - outer_dim).abs() <= tol,
        residual_inner,
        residual_outer,
    })
}

/// Number of geometric grid points scanned by [`find_crossover`].
const CROSSOVER_GRID: usize = 96;

/// Ratio of the smallest scanned order to `r_max`.
const CROSSOVER_SPAN: f64 = 1e-4;

/// Finds the smallest order in `(0, r_max]` at which the outer branch
/// catches up with the inner branch.
///
/// Scans a geometric grid for the first sign change of `inner - outer` and
/// refines it by bisection to width `tol`. Returns `None` when the inner
/// branch stays strictly dominant on the whole grid.
pub fn find_crossover(sys: &Validated, r_max: f64, tol: f64) -> Result<Option<f64>> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::BadOrder("r_max must be positive".into()));
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::BadParameter("tolerance must be positive".into()));
    }
    let gap = |r: f64| -> Result<f64> {
        let d = quantization_dim(sys, r, SOLVE_TOL)?;
        Ok(d.inner_dim - d.outer_dim)
    };
    let r_min = r_max * CROSSOVER_SPAN;
    let step = libm::pow(1.0 / CROSSOVER_SPAN, 1.0 / (CROSSOVER_GRID - 1) as f64);
    if gap(r_min)? <= 0.0 {
        // The inner branch should dominate near zero; an immediate
        // non-positive gap means any crossover lies below the grid.
        return Ok(None);
    }
    let mut prev_r = r_min;
    for i in 1..CROSSOVER_GRID {
        let r = if i + 1 == CROSSOVER_GRID {
            r_max
        } else {
            r_min * libm::pow(step, i as f64)
        };
        if gap(r)? <= 0.0 {
            let mut lo = prev_r;
            let mut hi = r;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if gap(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev_r = r;
    }
    Ok(None)
}
