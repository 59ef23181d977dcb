//! Empirical optimal-quantizer search on Monte-Carlo samples.
//!
//! A Lloyd-type alternation between nearest-point assignment and per-cell
//! generalized centroids estimates the `n`-point quantization error of
//! order `r ≥ 1`. In one dimension the cells of a sorted codebook are the
//! sample ranges between midpoints, assignment is binary search, and for
//! `r = 2` the centroid and the cell distortion have closed forms over
//! prefix sums. For other orders the per-cell objective is convex, so a
//! golden-section search finds the centroid.
//!
//! Estimates are upper estimates of the true error: finitely many samples,
//! finitely many restarts, locally optimal codebooks.

use alloc::vec::Vec;

use crate::dims::{quantization_dim, SOLVE_TOL};
use crate::measure::sample_measure;
use crate::rng::Rng;
use crate::system::Validated;
use crate::{Error, Result};

/// A sorted set of distinct code points.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    points: Vec<f64>,
}

impl Codebook {
    /// Sorts and deduplicates; rejects empty input and non-finite points.
    pub fn new(mut points: Vec<f64>) -> Result<Codebook> {
        if points.is_empty() {
            return Err(Error::EmptyCodebook);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::BadParameter("code points must be finite".into()));
        }
        points.sort_unstable_by(f64::total_cmp);
        points.dedup();
        Ok(Codebook { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance from `x` to the nearest code point.
    pub fn nearest_distance(&self, x: f64) -> f64 {
        let idx = self.points.partition_point(|&p| p < x);
        let mut best = f64::INFINITY;
        if idx < self.points.len() {
            best = (self.points[idx] - x).abs();
        }
        if idx > 0 {
            best = best.min((x - self.points[idx - 1]).abs());
        }
        best
    }
}

/// Monte-Carlo evaluation of a codebook.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    /// `(mean distortion^r)^{1/r}`.
    pub value: f64,
    /// Mean of the per-sample `r`-th power distortions.
    pub power_mean: f64,
    /// Standard error of `power_mean`.
    pub power_se: f64,
}

/// Evaluates the order-`r` distortion of a codebook on samples.
pub fn evaluate_codebook(samples: &[f64], codebook: &Codebook, r: f64) -> Result<EvalResult> {
    check_order(r)?;
    if samples.is_empty() {
        return Err(Error::NotEnoughSamples { needed: 1, got: 0 });
    }
    let n = samples.len() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &x in samples {
        let d = libm::pow(codebook.nearest_distance(x), r);
        sum += d;
        sum_sq += d * d;
    }
    let power_mean = sum / n;
    let variance = ((sum_sq - sum * sum / n) / (n - 1.0).max(1.0)).max(0.0);
    Ok(EvalResult {
        value: libm::pow(power_mean, 1.0 / r),
        power_mean,
        power_se: libm::sqrt(variance / n),
    })
}

fn check_order(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 1.0) {
        return Err(Error::BadOrder(
            "the estimator requires order r ≥ 1".into(),
        ));
    }
    Ok(())
}

/// Tuning knobs for the Lloyd search.
#[derive(Debug, Clone)]
pub struct LloydOptions {
    /// Independent inits: one quantile-spaced plus `restarts - 1` random.
    pub restarts: u32,
    pub max_iter: u32,
    /// Relative distortion-improvement stopping threshold.
    pub tol: f64,
    pub seed: u64,
    /// Bootstrap resamples for the standard error.
    pub bootstrap: u32,
}

impl Default for LloydOptions {
    fn default() -> Self {
        LloydOptions {
            restarts: 5,
            max_iter: 200,
            tol: 1e-10,
            seed: 0,
            bootstrap: 32,
        }
    }
}

/// Outcome of one estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate {
    pub n: usize,
    pub r: f64,
    /// `(best power distortion)^{1/r}`.
    pub value: f64,
    /// Bootstrap standard error of `value`.
    pub se: f64,
    pub samples: usize,
    pub seed: u64,
    /// Iterations of the winning restart.
    pub iterations: u32,
}

/// Best codebook found, its estimate, and the winning restart's
/// per-iteration power distortions (non-increasing).
#[derive(Debug, Clone)]
pub struct LloydResult {
    pub codebook: Codebook,
    pub estimate: ErrorEstimate,
    pub history: Vec<f64>,
}

// Sorted samples with a prefix sum for the r = 2 mean update.
struct SampleTable {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl SampleTable {
    fn new(samples: &[f64]) -> SampleTable {
        let mut sorted = samples.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &x in &sorted {
            acc += x;
            prefix.push(acc);
        }
        SampleTable { sorted, prefix }
    }

    fn len(&self) -> usize {
        self.sorted.len()
    }

    // Index ranges of the cells induced by sorted centers.
    fn cell_bounds(&self, centers: &[f64]) -> Vec<usize> {
        let mut bounds = Vec::with_capacity(centers.len() + 1);
        bounds.push(0);
        for w in centers.windows(2) {
            let split = 0.5 * (w[0] + w[1]);
            bounds.push(self.sorted.partition_point(|&x| x < split));
        }
        bounds.push(self.len());
        bounds
    }

    fn cell_mean(&self, lo: usize, hi: usize) -> f64 {
        (self.prefix[hi] - self.prefix[lo]) / (hi - lo) as f64
    }

    // Summed directly around the center: a difference of global prefix
    // sums of squares would cancel away all precision once cells are much
    // finer than the sample span.
    fn cell_power(&self, lo: usize, hi: usize, c: f64, r: f64) -> f64 {
        if r == 2.0 {
            self.sorted[lo..hi]
                .iter()
                .map(|&x| (x - c) * (x - c))
                .sum()
        } else {
            self.sorted[lo..hi]
                .iter()
                .map(|&x| libm::pow((x - c).abs(), r))
                .sum()
        }
    }
}

// Minimizes the convex cell objective by golden-section search, then keeps
// whichever of the result and the previous center scores better, so the
// alternation stays monotone.
fn generalized_centroid(table: &SampleTable, lo: usize, hi: usize, r: f64, prev: f64, tol: f64) -> f64 {
    let mut a = table.sorted[lo];
    let mut b = table.sorted[hi - 1];
    if a == b {
        return a;
    }
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = table.cell_power(lo, hi, x1, r);
    let mut f2 = table.cell_power(lo, hi, x2, r);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = table.cell_power(lo, hi, x1, r);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = table.cell_power(lo, hi, x2, r);
        }
    }
    let candidate = 0.5 * (a + b);
    if table.cell_power(lo, hi, candidate, r) <= table.cell_power(lo, hi, prev, r) {
        candidate
    } else {
        prev
    }
}

fn total_power(table: &SampleTable, centers: &[f64], bounds: &[usize], r: f64) -> f64 {
    let mut total = 0.0;
    for (i, &c) in centers.iter().enumerate() {
        let (lo, hi) = (bounds[i], bounds[i + 1]);
        if lo < hi {
            total += table.cell_power(lo, hi, c, r);
        }
    }
    total / table.len() as f64
}

// One full Lloyd run from a fixed init. Returns (centers, mean power
// distortion, history, iterations).
fn run_lloyd(
    table: &SampleTable,
    init: Vec<f64>,
    r: f64,
    max_iter: u32,
    tol: f64,
) -> (Vec<f64>, f64, Vec<f64>, u32) {
    let span = table.sorted[table.len() - 1] - table.sorted[0];
    let gs_tol = 1e-12 * span.max(1.0);
    let mut centers = init;
    let mut bounds = table.cell_bounds(&centers);
    let mut power = total_power(table, &centers, &bounds, r);
    let mut history = alloc::vec![power];
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        for (i, c) in centers.iter_mut().enumerate() {
            let (lo, hi) = (bounds[i], bounds[i + 1]);
            if lo == hi {
                continue;
            }
            *c = if r == 2.0 {
                table.cell_mean(lo, hi)
            } else {
                generalized_centroid(table, lo, hi, r, *c, gs_tol)
            };
        }
        centers.sort_unstable_by(f64::total_cmp);
        bounds = table.cell_bounds(&centers);
        let next = total_power(table, &centers, &bounds, r);
        debug_assert!(next <= power * (1.0 + 1e-9) + 1e-300);
        let improvement = (power - next) / power.max(f64::MIN_POSITIVE);
        power = next;
        history.push(power);
        if improvement < tol {
            break;
        }
    }
    (centers, power, history, iterations)
}

// Spreads n init points over the sample quantiles, padding from the
// distinct values if quantile picks collide.
fn quantile_init(table: &SampleTable, n: usize) -> Vec<f64> {
    let len = table.len();
    let mut picks: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        let idx = (((i as f64 + 0.5) / n as f64) * len as f64) as usize;
        let v = table.sorted[idx.min(len - 1)];
        if picks.last() != Some(&v) {
            picks.push(v);
        }
    }
    pad_distinct(table, picks, n)
}

fn random_init(table: &SampleTable, n: usize, rng: &mut Rng) -> Vec<f64> {
    let mut picks: Vec<f64> = Vec::with_capacity(n);
    for _ in 0..8 * n {
        if picks.len() == n {
            break;
        }
        let v = table.sorted[rng.next_index(table.len())];
        if !picks.contains(&v) {
            picks.push(v);
        }
    }
    picks.sort_unstable_by(f64::total_cmp);
    pad_distinct(table, picks, n)
}

// Tops a sorted pick list up to n points using unused distinct values.
fn pad_distinct(table: &SampleTable, mut picks: Vec<f64>, n: usize) -> Vec<f64> {
    if picks.len() < n {
        for &v in &table.sorted {
            if picks.len() == n {
                break;
            }
            if picks.binary_search_by(|p| p.total_cmp(&v)).is_err() {
                let pos = picks.partition_point(|&p| p < v);
                picks.insert(pos, v);
            }
        }
    }
    picks
}

fn distinct_values(sorted: &[f64]) -> Vec<f64> {
    let mut vals = sorted.to_vec();
    vals.dedup();
    vals
}

// Extends a codebook to n points by repeatedly splitting the cell with the
// largest distortion contribution into its two half-range means. A strong
// init for strongly multiscale measures, where quantile spacing freezes a
// poor allocation of points across branches.
fn greedy_extend(table: &SampleTable, base: &[f64], n: usize, r: f64) -> Vec<f64> {
    let mut centers = base.to_vec();
    centers.sort_unstable_by(f64::total_cmp);
    centers.dedup();
    while centers.len() < n {
        let bounds = table.cell_bounds(&centers);
        let mut worst: Option<(f64, usize)> = None;
        for i in 0..centers.len() {
            let (lo, hi) = (bounds[i], bounds[i + 1]);
            if hi - lo < 2 || table.sorted[lo] == table.sorted[hi - 1] {
                continue;
            }
            let cost = table.cell_power(lo, hi, centers[i], r);
            if worst.is_none_or(|(w, _)| cost > w) {
                worst = Some((cost, i));
            }
        }
        let Some((_, i)) = worst else { break };
        let (lo, hi) = (bounds[i], bounds[i + 1]);
        let mid = lo + (hi - lo) / 2;
        let left = table.cell_mean(lo, mid);
        let right = table.cell_mean(mid, hi);
        centers.remove(i);
        for v in [left, right] {
            let pos = centers.partition_point(|&p| p < v);
            if centers.get(pos) != Some(&v) {
                centers.insert(pos, v);
            }
        }
    }
    pad_distinct(table, centers, n)
}

/// Runs the Lloyd search for an `n`-point codebook of order `r ≥ 1`.
///
/// `extra_inits` are tried in addition to the quantile and random inits;
/// passing a known-good codebook (for example the analytic one, or the
/// previous grid point's result) makes the returned distortion at most its
/// distortion.
pub fn lloyd(
    samples: &[f64],
    n: usize,
    r: f64,
    opts: &LloydOptions,
    extra_inits: &[Codebook],
) -> Result<LloydResult> {
    check_order(r)?;
    if n == 0 {
        return Err(Error::EmptyCodebook);
    }
    if samples.len() < n {
        return Err(Error::NotEnoughSamples {
            needed: n,
            got: samples.len(),
        });
    }
    let table = SampleTable::new(samples);
    let distinct = distinct_values(&table.sorted);
    if distinct.len() <= n {
        // Every distinct value becomes a code point; distortion is zero.
        let codebook = Codebook::new(distinct)?;
        return Ok(LloydResult {
            estimate: ErrorEstimate {
                n,
                r,
                value: 0.0,
                se: 0.0,
                samples: samples.len(),
                seed: opts.seed,
                iterations: 0,
            },
            codebook,
            history: alloc::vec![0.0],
        });
    }

    let mut inits: Vec<Vec<f64>> = alloc::vec![quantile_init(&table, n)];
    for restart in 1..opts.restarts.max(1) {
        let mut rng = Rng::stream(opts.seed, restart as u64);
        inits.push(random_init(&table, n, &mut rng));
    }
    for extra in extra_inits {
        if extra.len() <= n {
            inits.push(pad_distinct(&table, extra.points().to_vec(), n));
        }
    }

    let mut best: Option<(Vec<f64>, f64, Vec<f64>, u32)> = None;
    for init in inits {
        let run = run_lloyd(&table, init, r, opts.max_iter, opts.tol);
        if best.as_ref().is_none_or(|b| run.1 < b.1) {
            best = Some(run);
        }
    }
    let (centers, power, history, iterations) = best.unwrap();
    let codebook = Codebook::new(centers)?;

    // Bootstrap the r-th-root estimate over per-sample powers.
    let powers: Vec<f64> = table
        .sorted
        .iter()
        .map(|&x| libm::pow(codebook.nearest_distance(x), r))
        .collect();
    let mut rng = Rng::stream(opts.seed, 0xB007);
    let se = bootstrap_se(&powers, opts.bootstrap, r, &mut rng);

    Ok(LloydResult {
        estimate: ErrorEstimate {
            n,
            r,
            value: libm::pow(power, 1.0 / r),
            se,
            samples: samples.len(),
            seed: opts.seed,
            iterations,
        },
        codebook,
        history,
    })
}

fn bootstrap_se(powers: &[f64], resamples: u32, r: f64, rng: &mut Rng) -> f64 {
    if resamples < 2 {
        return 0.0;
    }
    let n = powers.len();
    let mut values = Vec::with_capacity(resamples as usize);
    for _ in 0..resamples {
        let mut acc = 0.0;
        for _ in 0..n {
            acc += powers[rng.next_index(n)];
        }
        values.push(libm::pow(acc / n as f64, 1.0 / r));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    libm::sqrt(var)
}

/// One grid point of a dimension fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRow {
    pub n: usize,
    /// Estimated quantization error `ê_{n,r}`.
    pub value: f64,
    pub se: f64,
    /// Coefficient proxy `n^{1/dim} · ê_{n,r}`; bounded along the grid when
    /// the coefficient is finite and positive.
    pub coefficient: f64,
}

/// Least-squares dimension estimate over an `n` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Slope of `ln n` against `-ln ê`.
    pub slope: f64,
    /// Reference dimension used for the coefficient proxy.
    pub dim: f64,
    pub rows: Vec<FitRow>,
}

/// Fits the decay of the estimated quantization error on given samples.
///
/// Later grid points are warm-started from earlier ones — both by padding
/// the previous codebook (a superset init, which makes the estimates
/// non-increasing in `n`) and by greedily splitting its worst cells.
/// `anchors` are known-good codebooks tried as inits at every grid point
/// they fit into.
pub fn dimension_fit_samples(
    samples: &[f64],
    r: f64,
    n_grid: &[usize],
    reference_dim: f64,
    opts: &LloydOptions,
    anchors: &[Codebook],
) -> Result<FitResult> {
    if n_grid.len() < 3 {
        return Err(Error::GridTooSmall { got: n_grid.len() });
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParameter("grid must be strictly increasing".into()));
    }
    let table = SampleTable::new(samples);
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut warm: Vec<Codebook> = Vec::new();
    for (i, &n) in n_grid.iter().enumerate() {
        let sub_opts = LloydOptions {
            seed: opts.seed.wrapping_add(i as u64),
            ..opts.clone()
        };
        let mut inits = warm.clone();
        for anchor in anchors.iter().filter(|a| a.len() <= n) {
            inits.push(anchor.clone());
            if let Ok(grown) = Codebook::new(greedy_extend(&table, anchor.points(), n, r)) {
                inits.push(grown);
            }
        }
        if let Some(prev) = warm.first() {
            if let Ok(grown) = Codebook::new(greedy_extend(&table, prev.points(), n, r)) {
                inits.push(grown);
            }
        }
        let result = lloyd(samples, n, r, &sub_opts, &inits)?;
        rows.push(FitRow {
            n,
            value: result.estimate.value,
            se: result.estimate.se,
            coefficient: libm::pow(n as f64, 1.0 / reference_dim) * result.estimate.value,
        });
        warm = alloc::vec![result.codebook];
    }

    // Regress ln n on −ln ê.
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.value > 0.0)
        .map(|row| (-libm::log(row.value), libm::log(row.n as f64)))
        .collect();
    if points.len() < 3 {
        return Err(Error::GridTooSmall { got: points.len() });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum::<f64>();
    let var = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum::<f64>();
    Ok(FitResult {
        slope: cov / var,
        dim: reference_dim,
        rows,
    })
}

/// Samples the system's measure and fits the error decay against the
/// analytic dimension.
///
/// The explicit codebooks of the matching stopping levels are used as
/// anchor inits, tying the estimator to the analytic construction.
pub fn dimension_fit(
    sys: &Validated,
    r: f64,
    n_grid: &[usize],
    sample_count: usize,
    opts: &LloydOptions,
) -> Result<FitResult> {
    check_order(r)?;
    let samples = sample_measure(sys, opts.seed, sample_count, None);
    let dim = quantization_dim(sys, r, SOLVE_TOL)?.dim;
    let anchors = analytic_anchors(sys, r, *n_grid.last().unwrap_or(&0))?;
    dimension_fit_samples(&samples, r, n_grid, dim, opts, &anchors)
}

// Explicit bound-realizing codebooks for all stopping levels that fit the
// grid.
fn analytic_anchors(sys: &Validated, r: f64, n_max: usize) -> Result<Vec<Codebook>> {
    let exp = exponent_for(r)?;
    let mut anchors = Vec::new();
    for k in 1..=24u32 {
        let bundle =
            match crate::partition::build_bundle(sys, &exp, k, crate::partition::NODE_BUDGET) {
                Ok(b) => b,
                Err(Error::BudgetExceeded { .. }) => break,
                Err(e) => return Err(e),
            };
        if bundle.piece_count > n_max {
            break;
        }
        let bounds = crate::bounds::distortion_bounds(sys, &bundle, &exp)?;
        anchors.push(Codebook::new(bounds.codebook)?);
    }
    Ok(anchors)
}

// Closest exponent for an estimator order: small-denominator rationals get
// the exact path, everything else the guarded float path.
fn exponent_for(r: f64) -> Result<crate::Exponent> {
    for den in 1..=16u32 {
        let num = r * den as f64;
        if num == libm::floor(num) && num >= 1.0 && num <= u32::MAX as f64 {
            return crate::Exponent::rational(num as u32, den);
        }
    }
    crate::Exponent::real(r)
}
