//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use condensation::bounds::{find_markers, level_report, MARKER_DEPTH};
use condensation::dims::{find_crossover, quantization_dim, DimResult, SOLVE_TOL};
use condensation::measure::{sample_measure, sample_self_similar};
use condensation::partition::{build_bundle, PartitionBundle, NODE_BUDGET};
use condensation::quantizer::{dimension_fit, lloyd, Codebook, LloydOptions};
use condensation::system::Validated;
use condensation::{fixtures, Error, Exponent};

use crate::format::load_system;
use crate::outputs::{
    codebook_csv, ensure_dir, estimate_csv, fit_csv, partition_csv, samples_csv, write_json,
    write_text, BoundsJson, BundleJson, DimsJson, EstimateRow, FitJson, IoscJson, Manifest,
};

/// Error carried to the process boundary and printed as JSON.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError {
            kind: "usage".into(),
            message: message.into(),
        }
    }

    pub fn format(message: impl Into<String>) -> CliError {
        CliError {
            kind: "format".into(),
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> CliError {
        CliError {
            kind: "io".into(),
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> CliError {
        let kind = match err {
            Error::IoscRejected(_) => "open_set_conditions",
            Error::BudgetExceeded { .. } => "budget",
            Error::MarkerNotFound { .. } => "marker_search",
            Error::BadOrder(_) => "order",
            Error::DegenerateSolve(_) => "degenerate",
            _ => "core",
        };
        CliError {
            kind: kind.into(),
            message: err.to_string(),
        }
    }
}

/// The moment order as parsed from the command line: exact when the literal
/// reduces to a small-denominator rational, guarded float otherwise.
pub struct Order {
    pub literal: String,
    pub value: f64,
    pub exponent: Exponent,
}

/// Largest denominator for which exact threshold comparisons stay cheap.
const MAX_EXACT_DEN: u64 = 64;

pub fn parse_order(text: &str) -> Result<Order, CliError> {
    let s = text.trim();
    let rational = if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad order '{s}'")))?;
        let den: u64 = den
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad order '{s}'")))?;
        Some((num, den))
    } else if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 18 || int.starts_with('-') {
            None
        } else {
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse()
                    .map_err(|_| CliError::usage(format!("bad order '{s}'")))?
            };
            let frac: u64 = if frac.is_empty() {
                0
            } else {
                frac.parse()
                    .map_err(|_| CliError::usage(format!("bad order '{s}'")))?
            };
            let den = 10u64.pow(digits);
            Some((int * den + frac, den))
        }
    } else {
        let num: u64 = s
            .parse()
            .map_err(|_| CliError::usage(format!("bad order '{s}'")))?;
        Some((num, 1))
    };

    let (exponent, value) = match rational {
        Some((num, den)) if num > 0 && den > 0 => {
            let g = gcd(num, den);
            let (num, den) = (num / g, den / g);
            let value = num as f64 / den as f64;
            if den <= MAX_EXACT_DEN && num <= u32::MAX as u64 {
                (Exponent::rational(num as u32, den as u32)?, value)
            } else {
                (Exponent::real(value)?, value)
            }
        }
        _ => {
            let value: f64 = s
                .parse()
                .map_err(|_| CliError::usage(format!("bad order '{s}'")))?;
            (Exponent::real(value)?, value)
        }
    };
    Ok(Order {
        literal: s.to_string(),
        value,
        exponent,
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Parses `A:B:G` into the geometric grid `A, A·G, … ≤ B`.
pub fn parse_grid(text: &str) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "grid '{text}' must have the form START:END:FACTOR"
        )));
    }
    let start: usize = parts[0]
        .parse()
        .map_err(|_| CliError::usage("bad grid start"))?;
    let end: usize = parts[1]
        .parse()
        .map_err(|_| CliError::usage("bad grid end"))?;
    let factor: f64 = parts[2]
        .parse()
        .map_err(|_| CliError::usage("bad grid factor"))?;
    if start == 0 || end < start || factor <= 1.0 || factor.is_nan() {
        return Err(CliError::usage(
            "grid needs START ≥ 1, END ≥ START, FACTOR > 1",
        ));
    }
    let mut grid = Vec::new();
    let mut v = start as f64;
    while (v.round() as usize) <= end {
        let n = v.round() as usize;
        if grid.last() != Some(&n) {
            grid.push(n);
        }
        v *= factor;
    }
    Ok(grid)
}

fn load_validated(path: &Path) -> Result<Validated, CliError> {
    let sys = load_system(path).map_err(CliError::format)?;
    Validated::new(sys).map_err(CliError::from)
}

fn levels(k: Option<u32>, k_max: Option<u32>) -> Result<Vec<u32>, CliError> {
    match (k, k_max) {
        (Some(k), None) => Ok(vec![k]),
        (None, Some(k_max)) if k_max >= 1 => Ok((1..=k_max).collect()),
        (None, None) => Err(CliError::usage("one of --k or --k-max is required")),
        _ => Err(CliError::usage("give either --k or --k-max, not both")),
    }
}

pub fn run_validate(system: &Path, out: &Path) -> Result<(), CliError> {
    ensure_dir(out)?;
    let mut manifest = Manifest::new("validate");
    manifest.system = Some(system.display().to_string());
    write_json(out, "manifest.json", &manifest)?;

    let sys = load_system(system).map_err(CliError::format)?;
    let report = sys.check_iosc()?;
    write_json(out, "iosc.json", &IoscJson::from_report(&report))?;
    for (name, verdict) in report.verdicts() {
        println!(
            "{name}: {} — {}",
            if verdict.pass { "pass" } else { "FAIL" },
            verdict.detail
        );
    }
    if report.accepted() {
        println!("system accepted");
        Ok(())
    } else {
        let (name, verdict) = report.first_failure().unwrap();
        Err(CliError {
            kind: "open_set_conditions".into(),
            message: format!("{name}: {}", verdict.detail),
        })
    }
}

fn dims_with_scan(
    sys: &Validated,
    order: &Order,
    tol: f64,
    scan: bool,
    r_max: f64,
) -> Result<(DimResult, Option<Option<f64>>), CliError> {
    let dims = quantization_dim(sys, order.value, tol)?;
    let crossover = if scan {
        Some(find_crossover(sys, r_max, 1e-8)?)
    } else {
        None
    };
    Ok((dims, crossover))
}

#[allow(clippy::too_many_arguments)]
pub fn run_dims(
    system: &Path,
    order: &Order,
    tol: f64,
    scan_crossover: bool,
    r_max: f64,
    out: &Path,
) -> Result<(), CliError> {
    ensure_dir(out)?;
    let mut manifest = Manifest::new("dims");
    manifest.system = Some(system.display().to_string());
    manifest.r = Some(order.literal.clone());
    manifest.tol = Some(tol);
    manifest.scan_crossover = Some(scan_crossover);
    if scan_crossover {
        manifest.r_max = Some(r_max);
    }
    write_json(out, "manifest.json", &manifest)?;

    let sys = load_validated(system)?;
    let (dims, crossover) = dims_with_scan(&sys, order, tol, scan_crossover, r_max)?;
    write_json(out, "dims.json", &DimsJson::from_result(&dims, crossover))?;
    println!(
        "r={} inner_dim={} outer_dim={} dim={} branch={:?}",
        dims.r, dims.inner_dim, dims.outer_dim, dims.dim, dims.branch
    );
    if let Some(c) = crossover {
        match c {
            Some(r0) => println!("crossover at r0={r0}"),
            None => println!("no crossover in (0, {r_max}]"),
        }
    }
    Ok(())
}

pub fn run_partition(
    system: &Path,
    order: &Order,
    k: Option<u32>,
    k_max: Option<u32>,
    budget: usize,
    out: &Path,
) -> Result<(), CliError> {
    ensure_dir(out)?;
    let mut manifest = Manifest::new("partition");
    manifest.system = Some(system.display().to_string());
    manifest.r = Some(order.literal.clone());
    manifest.k = k;
    manifest.k_max = k_max;
    manifest.budget = Some(budget);
    write_json(out, "manifest.json", &manifest)?;

    let sys = load_validated(system)?;
    let inner_dim = quantization_dim(&sys, order.value, SOLVE_TOL)?.inner_dim;
    let mut bundles: Vec<PartitionBundle> = Vec::new();
    for k in levels(k, k_max)? {
        let bundle = build_bundle(&sys, &order.exponent, k, budget)?;
        write_json(
            out,
            &format!("bundle_k{k}.json"),
            &BundleJson::from_bundle(&bundle),
        )?;
        bundles.push(bundle);
    }
    let rows: Vec<(u32, &PartitionBundle, f64)> = bundles
        .iter()
        .map(|b| (b.k, b, b.power_sum(inner_dim)))
        .collect();
    write_text(out, "partition.csv", &partition_csv(&rows))?;
    for (k, bundle, power) in &rows {
        println!(
            "k={k}: tails={} pieces={} depth={}..{} power_sum={power}",
            bundle.tail_count(),
            bundle.piece_count,
            bundle.min_tail_len,
            bundle.max_tail_len
        );
    }
    Ok(())
}

pub fn run_bounds(
    system: &Path,
    order: &Order,
    k: Option<u32>,
    k_max: Option<u32>,
    budget: usize,
    out: &Path,
) -> Result<(), CliError> {
    ensure_dir(out)?;
    let mut manifest = Manifest::new("bounds");
    manifest.system = Some(system.display().to_string());
    manifest.r = Some(order.literal.clone());
    manifest.k = k;
    manifest.k_max = k_max;
    manifest.budget = Some(budget);
    manifest.marker_depth = Some(MARKER_DEPTH);
    write_json(out, "manifest.json", &manifest)?;

    let sys = load_validated(system)?;
    let markers = find_markers(&sys, MARKER_DEPTH)?;
    for k in levels(k, k_max)? {
        let bundle = build_bundle(&sys, &order.exponent, k, budget)?;
        let report = level_report(&sys, &bundle, &markers, &order.exponent)?;
        write_json(
            out,
            &format!("bounds_k{k}.json"),
            &BoundsJson::from_report(&report, &markers),
        )?;
        write_text(
            out,
            &format!("codebook_k{k}.csv"),
            &codebook_csv(&report.bounds.codebook),
        )?;
        println!(
            "k={k}: pieces={} upper={} lower_sum={} separation={} energy_band={}",
            report.piece_count,
            report.bounds.upper,
            report.bounds.lower_sum,
            if report.separation.pass { "pass" } else { "FAIL" },
            if report.energy.band_ok { "pass" } else { "FAIL" },
        );
    }
    Ok(())
}

pub fn run_sample(
    system: &Path,
    seed: Option<u64>,
    count: usize,
    out: &Path,
) -> Result<(), CliError> {
    let seed = seed.ok_or_else(|| CliError::usage("--seed is required for sample"))?;
    ensure_dir(out)?;
    let mut manifest = Manifest::new("sample");
    manifest.system = Some(system.display().to_string());
    manifest.seed = Some(seed);
    manifest.count = Some(count);
    write_json(out, "manifest.json", &manifest)?;

    let sys = load_validated(system)?;
    let points = sample_measure(&sys, seed, count, None);
    write_text(out, "samples.csv", &samples_csv(&points))?;
    println!("wrote {count} samples");
    Ok(())
}

// Stopping levels with piece counts at most n_max, paired with the root
// form of their distortion upper bound.
fn bound_ladder(
    sys: &Validated,
    order: &Order,
    n_max: usize,
    budget: usize,
) -> Result<Vec<(usize, f64)>, CliError> {
    let mut ladder = Vec::new();
    for k in 1..=32u32 {
        let bundle = match build_bundle(sys, &order.exponent, k, budget) {
            Ok(b) => b,
            Err(Error::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e.into()),
        };
        if bundle.piece_count > n_max {
            break;
        }
        let bounds = condensation::bounds::distortion_bounds(sys, &bundle, &order.exponent)?;
        ladder.push((
            bundle.piece_count,
            bounds.upper.powf(1.0 / order.value),
        ));
    }
    Ok(ladder)
}

#[allow(clippy::too_many_arguments)]
pub fn run_estimate(
    system: &Path,
    order: &Order,
    grid_text: &str,
    seed: Option<u64>,
    samples: usize,
    restarts: u32,
    budget: usize,
    out: &Path,
) -> Result<(), CliError> {
    let seed = seed.ok_or_else(|| CliError::usage("--seed is required for estimate"))?;
    let grid = parse_grid(grid_text)?;
    ensure_dir(out)?;
    let mut manifest = Manifest::new("estimate");
    manifest.system = Some(system.display().to_string());
    manifest.r = Some(order.literal.clone());
    manifest.n_grid = Some(grid_text.to_string());
    manifest.seed = Some(seed);
    manifest.samples = Some(samples);
    manifest.restarts = Some(restarts);
    manifest.budget = Some(budget);
    write_json(out, "manifest.json", &manifest)?;

    let sys = load_validated(system)?;
    let dim = quantization_dim(&sys, order.value, SOLVE_TOL)?.dim;
    let points = sample_measure(&sys, seed, samples, None);
    let n_max = *grid.last().unwrap();
    let ladder = bound_ladder(&sys, order, n_max, budget)?;

    let mut rows = Vec::new();
    for (i, &n) in grid.iter().enumerate() {
        let opts = LloydOptions {
            restarts,
            seed: seed.wrapping_add(i as u64),
            ..LloydOptions::default()
        };
        let result = lloyd(&points, n, order.value, &opts, &[])?;
        let bound = ladder
            .iter().rfind(|(phi, _)| *phi <= n)
            .map(|(_, b)| *b);
        rows.push(EstimateRow {
            n,
            e_hat: result.estimate.value,
            se: result.estimate.se,
            upper_bound: bound,
            coefficient: (n as f64).powf(1.0 / dim) * result.estimate.value,
        });
    }
    write_text(out, "estimate.csv", &estimate_csv(&rows))?;
    for row in &rows {
        println!(
            "n={}: e_hat={} se={} coefficient={}",
            row.n, row.e_hat, row.se, row.coefficient
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn run_fit(
    system: &Path,
    order: &Order,
    grid_text: &str,
    seed: Option<u64>,
    samples: usize,
    restarts: u32,
    out: &Path,
) -> Result<(), CliError> {
    let seed = seed.ok_or_else(|| CliError::usage("--seed is required for fit"))?;
    let grid = parse_grid(grid_text)?;
    ensure_dir(out)?;
    let mut manifest = Manifest::new("fit");
    manifest.system = Some(system.display().to_string());
    manifest.r = Some(order.literal.clone());
    manifest.n_grid = Some(grid_text.to_string());
    manifest.seed = Some(seed);
    manifest.samples = Some(samples);
    manifest.restarts = Some(restarts);
    write_json(out, "manifest.json", &manifest)?;

    let sys = load_validated(system)?;
    let opts = LloydOptions {
        restarts,
        seed,
        ..LloydOptions::default()
    };
    let fit = dimension_fit(&sys, order.value, &grid, samples, &opts)?;
    write_json(out, "fit.json", &FitJson::from_result(order.value, &fit))?;
    write_text(out, "fit.csv", &fit_csv(&fit))?;
    println!("slope={} dim={}", fit.slope, fit.dim);
    Ok(())
}

fn check(label: &str, expected: String, computed: String, ok: bool, all_ok: &mut bool) -> String {
    *all_ok &= ok;
    format!(
        "{label:<28} {expected:<22} {computed:<22} {}\n",
        if ok { "ok" } else { "MISMATCH" }
    )
}

/// Runs the whole pipeline on the built-in demo system and prints an
/// expected-versus-computed table. Returns an error if any row mismatches.
pub fn run_demo(order: &Order, seed: u64, out: &Path) -> Result<(), CliError> {
    ensure_dir(out)?;
    let mut manifest = Manifest::new("demo315");
    manifest.system = Some("builtin:demo".into());
    manifest.r = Some(order.literal.clone());
    manifest.seed = Some(seed);
    write_json(out, "manifest.json", &manifest)?;

    let sys = Validated::new(fixtures::demo_system())?;
    write_json(out, "iosc.json", &IoscJson::from_report(sys.report()))?;

    let r = order.value;
    let (dims, crossover) = dims_with_scan(&sys, order, SOLVE_TOL, true, 2.0)?;
    write_json(out, "dims.json", &DimsJson::from_result(&dims, Some(crossover.unwrap())))?;

    // Closed forms for the uniform demo weights.
    let expected_inner = 1.0 / 3.0;
    let ln2 = (2.0f64).ln();
    let expected_outer = r * ln2 / (3.0f64 * 4.0f64.powf(r) / 2.0).ln();
    let expected_r0 = (1.5f64).ln() / ln2;

    let mut table = String::new();
    let mut all_ok = true;
    let _ = writeln!(table, "{:<28} {:<22} {:<22}", "quantity", "expected", "computed");
    table += &check(
        "inner branch dim",
        format!("{expected_inner:.12}"),
        format!("{:.12}", dims.inner_dim),
        (dims.inner_dim - expected_inner).abs() < 1e-9,
        &mut all_ok,
    );
    table += &check(
        "outer branch dim",
        format!("{expected_outer:.12}"),
        format!("{:.12}", dims.outer_dim),
        (dims.outer_dim - expected_outer).abs() < 1e-9,
        &mut all_ok,
    );
    table += &check(
        "quantization dim",
        format!("{:.12}", expected_inner.max(expected_outer)),
        format!("{:.12}", dims.dim),
        (dims.dim - expected_inner.max(expected_outer)).abs() < 1e-9,
        &mut all_ok,
    );
    let r0 = crossover.unwrap();
    table += &check(
        "branch crossover",
        format!("{expected_r0:.9}"),
        r0.map(|v| format!("{v:.9}")).unwrap_or_else(|| "none".into()),
        r0.map(|v| (v - expected_r0).abs() < 1e-6).unwrap_or(false),
        &mut all_ok,
    );

    let markers = find_markers(&sys, MARKER_DEPTH)?;
    let mut bundles = Vec::new();
    for k in 1..=2u32 {
        let bundle = build_bundle(&sys, &order.exponent, k, NODE_BUDGET)?;
        let report = level_report(&sys, &bundle, &markers, &order.exponent)?;
        write_json(
            out,
            &format!("bounds_k{k}.json"),
            &BoundsJson::from_report(&report, &markers),
        )?;
        write_text(
            out,
            &format!("codebook_k{k}.csv"),
            &codebook_csv(&report.bounds.codebook),
        )?;
        if k == 1 && (r - 2.0).abs() < 1e-12 {
            table += &check(
                "pieces at first level",
                "12".into(),
                format!("{}", report.piece_count),
                report.piece_count == 12,
                &mut all_ok,
            );
        }
        table += &check(
            &format!("separation check (k={k})"),
            "pass".into(),
            if report.separation.pass { "pass" } else { "fail" }.into(),
            report.separation.pass,
            &mut all_ok,
        );
        table += &check(
            &format!("energy band (k={k})"),
            "pass".into(),
            if report.energy.band_ok { "pass" } else { "fail" }.into(),
            report.energy.band_ok,
            &mut all_ok,
        );
        bundles.push(bundle);
    }
    let rows: Vec<(u32, &PartitionBundle, f64)> = bundles
        .iter()
        .map(|b| (b.k, b, b.power_sum(dims.inner_dim)))
        .collect();
    write_text(out, "partition.csv", &partition_csv(&rows))?;

    if r >= 1.0 {
        let points = sample_measure(&sys, seed, 20_000, None);
        let mut estimate_rows = Vec::new();
        for (i, n) in [16usize, 64].into_iter().enumerate() {
            let opts = LloydOptions {
                restarts: 3,
                seed: seed.wrapping_add(i as u64),
                ..LloydOptions::default()
            };
            let result = lloyd(&points, n, r, &opts, &[])?;
            estimate_rows.push(EstimateRow {
                n,
                e_hat: result.estimate.value,
                se: result.estimate.se,
                upper_bound: None,
                coefficient: (n as f64).powf(1.0 / dims.dim) * result.estimate.value,
            });
        }
        write_text(out, "estimate.csv", &estimate_csv(&estimate_rows))?;
        let analytic = Codebook::new(
            condensation::bounds::distortion_bounds(&sys, &bundles[0], &order.exponent)?.codebook,
        )?;
        let eval = condensation::quantizer::evaluate_codebook(&points, &analytic, r)?;
        let best = lloyd(
            &points,
            analytic.len(),
            r,
            &LloydOptions {
                restarts: 3,
                seed,
                ..LloydOptions::default()
            },
            &[analytic],
        )?;
        table += &check(
            "optimizer beats codebook",
            "yes".into(),
            if best.estimate.value <= eval.value + 1e-12 {
                "yes"
            } else {
                "no"
            }
            .into(),
            best.estimate.value <= eval.value + 1e-12,
            &mut all_ok,
        );
    }

    print!("{table}");
    if all_ok {
        println!("demo checks: all ok");
        Ok(())
    } else {
        Err(CliError {
            kind: "demo".into(),
            message: "demo table has mismatches".into(),
        })
    }
}

/// Cantor-control fit used in docs and tests; kept here so the CLI surface
/// and tests share one code path.
pub fn cantor_control_samples(seed: u64, count: usize) -> Result<Vec<f64>, CliError> {
    sample_self_similar(
        &fixtures::cantor_maps(),
        &[condensation::ratio(1, 2), condensation::ratio(1, 2)],
        seed,
        count,
        None,
    )
    .map_err(CliError::from)
}

pub fn default_out(out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| PathBuf::from("out"))
}
