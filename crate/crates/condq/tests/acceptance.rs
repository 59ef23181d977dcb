//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured quantities. Exact claims are checked with
//! rational arithmetic; Monte-Carlo claims use fixed seeds.

use std::time::Instant;

use condensation::bounds::{
    distortion_bounds, energy_bounds, find_markers, test_pieces, verify_separation, MARKER_DEPTH,
};
use condensation::dims::{find_crossover, quantization_dim, solve_dim, Branch, SOLVE_TOL};
use condensation::measure::{sample_measure, sample_self_similar};
use condensation::partition::{build_bundle, growth_constants, NODE_BUDGET};
use condensation::quantizer::{
    dimension_fit, dimension_fit_samples, evaluate_codebook, lloyd, Codebook, LloydOptions,
};
use condensation::rng::Rng;
use condensation::system::Validated;
use condensation::words::{classify_antichain, AntichainClass};
use condensation::{fixtures, ratio, Exponent, Rational};

use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive, Zero};

fn demo() -> Validated {
    fixtures::demo_validated()
}

fn exp_int(r: u32) -> Exponent {
    Exponent::integer(r).unwrap()
}

fn report(id: u32, pass: bool, detail: &str) {
    println!(
        "acceptance {id:02}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id:02} failed: {detail}");
}

#[test]
fn acceptance_01_dimension_solver_exactness() {
    let res = quantization_dim(&demo(), 2.0, SOLVE_TOL).unwrap();
    let expected_inner = 1.0 / 3.0;
    let expected_outer = 2.0 * (2.0f64).ln() / (24.0f64).ln();
    let e_inner = (res.inner_dim - expected_inner).abs();
    let e_outer = (res.outer_dim - expected_outer).abs();
    let pass = e_inner <= 1e-10 && e_outer <= 1e-10 && res.branch == Branch::Outer
        && res.dim == res.outer_dim;
    report(
        1,
        pass,
        &format!("inner off by {e_inner:.2e}, outer off by {e_outer:.2e}, branch {:?}", res.branch),
    );
}

#[test]
fn acceptance_02_self_similar_control() {
    let expected = (2.0f64).ln() / (3.0f64).ln();
    let mut worst = 0.0f64;
    for r in [0.5, 1.0, 2.0, 5.0] {
        let k = solve_dim(&[0.5, 0.5], &[1.0 / 3.0, 1.0 / 3.0], r, SOLVE_TOL).unwrap();
        worst = worst.max((k - expected).abs());
    }
    report(
        2,
        worst <= 1e-10,
        &format!("worst deviation from ln2/ln3 across orders: {worst:.2e}"),
    );
}

#[test]
fn acceptance_03_crossover() {
    let sys = demo();
    let r0 = find_crossover(&sys, 2.0, 1e-8).unwrap().unwrap();
    let expected = (1.5f64).ln() / (2.0f64).ln();
    let off = (r0 - expected).abs();
    let mut window_ok = true;
    for i in 1..=10 {
        let r = r0 * 0.9 * i as f64 / 10.0;
        let d = quantization_dim(&sys, r, SOLVE_TOL).unwrap();
        window_ok &= d.inner_dim > d.outer_dim;
    }
    report(
        3,
        off <= 1e-6 && window_ok,
        &format!("crossover {r0:.9} off by {off:.2e}; inner dominates below: {window_ok}"),
    );
}

#[test]
fn acceptance_04_mass_conservation() {
    let sys = demo();
    let mut pass = true;
    for r in [1u32, 2] {
        let exp = exp_int(r);
        for k in 1..=6u32 {
            let bundle = build_bundle(&sys, &exp, k, NODE_BUDGET).unwrap();
            let mut total = Rational::zero();
            for (word, cut) in bundle.cylinder_words.iter().zip(&bundle.inner_cuts) {
                let p = sys.outer_weights().weight_of(word).unwrap();
                let mut inner = Rational::zero();
                for rho in cut.words() {
                    inner += sys.inner_weights().weight_of(rho).unwrap();
                }
                total += sys.p0() * p * inner;
            }
            for word in bundle.tail_words.words() {
                total += sys.outer_weights().weight_of(word).unwrap();
            }
            pass &= total == Rational::one();
        }
    }
    report(4, pass, "exact mass identity over k = 1..6 at r in {1, 2}");
}

#[test]
fn acceptance_05_partition_invariants() {
    let sys = demo();
    let exp = exp_int(2);
    let growth = growth_constants(sys.outer_weights(), sys.inner_weights(), &exp).unwrap();
    let mut pass = true;
    let mut detail = String::new();

    let mut counts = Vec::new();
    for k in 1..=6u32 {
        let bundle = build_bundle(&sys, &exp, k, NODE_BUDGET).unwrap();
        // Maximality through the independent classifier.
        pass &= matches!(
            classify_antichain(bundle.tail_words.words()).unwrap(),
            AntichainClass::Maximal
        );
        // Every cylinder word keeps its product at or above the threshold,
        // exactly.
        let threshold = exp.exact_value(&growth.floor.powi(k)).unwrap();
        for word in &bundle.cylinder_words {
            let p = sys.outer_weights().weight_of(word).unwrap();
            let s = sys.outer_weights().ratio_of(word).unwrap();
            pass &= p * s.clone().pow(2) >= threshold;
        }
        if k == 1 {
            pass &= bundle.piece_count == 12;
            detail.push_str(&format!("pieces at k=1: {}; ", bundle.piece_count));
        }
        counts.push(bundle.piece_count);
    }
    for pair in counts.windows(2) {
        pass &= pair[1] >= pair[0];
        pass &= BigUint::from(pair[1]) <= &growth.growth_cap * BigUint::from(pair[0]);
    }
    detail.push_str(&format!(
        "counts {counts:?} within growth cap {}",
        growth.growth_cap
    ));
    report(5, pass, &detail);
}

#[test]
fn acceptance_06_energy_band() {
    let sys = demo();
    let exp = exp_int(2);
    let markers = find_markers(&sys, MARKER_DEPTH).unwrap();
    let growth = growth_constants(sys.outer_weights(), sys.inner_weights(), &exp).unwrap();
    let mut pass = true;
    for k in 1..=4u32 {
        let bundle = build_bundle(&sys, &exp, k, NODE_BUDGET).unwrap();
        let pieces = test_pieces(&sys, &bundle, &markers).unwrap();
        let energy = energy_bounds(&sys, &markers, &growth, &pieces, &exp, k).unwrap();
        pass &= energy.band_ok && energy.violation.is_none();
    }
    report(6, pass, "piece energies inside the band at k = 1..4, r = 2, exact");
}

#[test]
fn acceptance_07_separation() {
    let systems = [
        ("uniform", demo()),
        (
            "skew probabilities",
            Validated::new(fixtures::skew_probability_system()).unwrap(),
        ),
        (
            "skew scales",
            Validated::new(fixtures::skew_scale_system()).unwrap(),
        ),
    ];
    let exp = exp_int(2);
    let mut pass = true;
    let mut pairs = 0usize;
    for (name, sys) in &systems {
        let markers = find_markers(sys, MARKER_DEPTH).unwrap();
        for k in 1..=4u32 {
            let bundle = build_bundle(sys, &exp, k, NODE_BUDGET).unwrap();
            let pieces = test_pieces(sys, &bundle, &markers).unwrap();
            let rep = verify_separation(&pieces, &markers.separation);
            pairs += rep.pairs;
            if !rep.pass {
                pass = false;
                println!("separation violated on {name} at k={k}: {:?}", rep.violation);
            }
        }
    }
    report(7, pass, &format!("{pairs} piece pairs separated, exact arithmetic"));
}

#[test]
fn acceptance_08_power_sum_regimes() {
    // Dominant inner branch at r = 1/2 on the demo system.
    let sys = demo();
    let exp = Exponent::rational(1, 2).unwrap();
    let dims = quantization_dim(&sys, 0.5, SOLVE_TOL).unwrap();
    assert!(dims.inner_dim > dims.outer_dim);
    let s_r = dims.inner_dim;
    let outer_w: Vec<f64> = sys
        .outer_weights()
        .weights()
        .iter()
        .map(|q| q.to_f64().unwrap())
        .collect();
    let outer_c: Vec<f64> = sys
        .outer_weights()
        .ratios()
        .iter()
        .map(|q| q.to_f64().unwrap())
        .collect();
    let b = condensation::dims::moran_sum(&outer_w, &outer_c, 0.5, s_r).unwrap();
    let cap = 1.0 / (1.0 - b) + 1.0;
    let mut pass = true;
    let mut max_sum = 0.0f64;
    for k in 1..=6u32 {
        let bundle = build_bundle(&sys, &exp, k, NODE_BUDGET).unwrap();
        let sum = bundle.power_sum(s_r);
        max_sum = max_sum.max(sum);
        pass &= sum < cap;
    }
    let detail_a = format!("max power sum {max_sum:.4} < cap {cap:.4}");

    // Tied branches: the tie fixture has both dimensions exactly 1/3 at r = 2.
    let tie = Validated::new(fixtures::tie_system()).unwrap();
    let tie_dims = quantization_dim(&tie, 2.0, SOLVE_TOL).unwrap();
    pass &= (tie_dims.inner_dim - tie_dims.outer_dim).abs() < 1e-9;
    let exp2 = exp_int(2);
    for k in 1..=6u32 {
        let bundle = build_bundle(&tie, &exp2, k, NODE_BUDGET).unwrap();
        let sum = bundle.power_sum(tie_dims.inner_dim);
        pass &= sum >= bundle.min_tail_len as f64;
    }
    report(
        8,
        pass,
        &format!("{detail_a}; tied fixture sums dominate the cut depth"),
    );
}

#[test]
fn acceptance_09_upper_bound_consistency() {
    let sys = demo();
    let exp = exp_int(2);
    let samples = sample_measure(&sys, 315_009, 200_000, None);
    let mut pass = true;
    let mut detail = String::new();
    for k in 1..=4u32 {
        let bundle = build_bundle(&sys, &exp, k, NODE_BUDGET).unwrap();
        let bounds = distortion_bounds(&sys, &bundle, &exp).unwrap();
        let codebook = Codebook::new(bounds.codebook.clone()).unwrap();
        let eval = evaluate_codebook(&samples, &codebook, 2.0).unwrap();
        let ok = eval.power_mean <= bounds.upper + 3.0 * eval.power_se;
        pass &= ok;
        detail.push_str(&format!(
            "k={k}: {:.3e} ≤ {:.3e}; ",
            eval.power_mean, bounds.upper
        ));
    }
    report(9, pass, detail.trim_end_matches("; "));
}

#[test]
fn acceptance_10_optimizer_sanity() {
    // Uniform control against the closed form e² = 1/(12 n²).
    let mut rng = Rng::new(315_010);
    let uniform: Vec<f64> = (0..200_000).map(|_| rng.next_f64()).collect();
    let mut pass = true;
    let mut detail = String::new();
    for n in [16usize, 64, 256] {
        let res = lloyd(&uniform, n, 2.0, &LloydOptions::default(), &[]).unwrap();
        let power = res.estimate.value * res.estimate.value;
        let expected = 1.0 / (12.0 * (n * n) as f64);
        let rel = (power - expected).abs() / expected;
        pass &= rel <= 0.15;
        detail.push_str(&format!("n={n}: rel {rel:.3}; "));
        // Per-iteration monotonicity of the winning restart.
        for w in res.history.windows(2) {
            pass &= w[1] <= w[0] * (1.0 + 1e-9);
        }
    }

    // The optimizer never loses to the explicit bound-realizing codebook.
    let sys = demo();
    let exp = exp_int(2);
    let samples = sample_measure(&sys, 315_011, 200_000, None);
    let bundle = build_bundle(&sys, &exp, 2, NODE_BUDGET).unwrap();
    let analytic =
        Codebook::new(distortion_bounds(&sys, &bundle, &exp).unwrap().codebook).unwrap();
    let eval = evaluate_codebook(&samples, &analytic, 2.0).unwrap();
    let opt = lloyd(
        &samples,
        analytic.len(),
        2.0,
        &LloydOptions {
            seed: 315_012,
            ..LloydOptions::default()
        },
        &[analytic],
    )
    .unwrap();
    pass &= opt.estimate.value <= eval.value + 1e-12;
    detail.push_str(&format!(
        "optimized {:.4e} ≤ explicit {:.4e}",
        opt.estimate.value, eval.value
    ));
    report(10, pass, &detail);
}

#[test]
fn acceptance_11_dimension_fit() {
    let started = Instant::now();
    let grid: Vec<usize> = (4..=12).map(|e| 1usize << e).collect();
    let opts = LloydOptions {
        restarts: 5,
        seed: 315_011,
        ..LloydOptions::default()
    };
    let mut pass = true;
    let mut detail = String::new();

    let sys = demo();
    let fit = dimension_fit(&sys, 2.0, &grid, 200_000, &opts).unwrap();
    let target = 2.0 * (2.0f64).ln() / (24.0f64).ln();
    let slope_ok = (fit.slope - target).abs() <= 0.10 * target;
    let coeffs: Vec<f64> = fit.rows.iter().map(|row| row.coefficient).collect();
    let band = coeffs.iter().cloned().fold(0.0, f64::max)
        / coeffs.iter().cloned().fold(f64::INFINITY, f64::min);
    let band_ok = band <= 10.0;
    pass &= slope_ok && band_ok;
    detail.push_str(&format!(
        "demo slope {:.4} vs {target:.4} ({}), proxy band x{band:.2} ({}); ",
        fit.slope,
        if slope_ok { "ok" } else { "OUT OF TOLERANCE" },
        if band_ok { "ok" } else { "OUT OF TOLERANCE" },
    ));

    let cantor_samples = sample_self_similar(
        &fixtures::cantor_maps(),
        &[ratio(1, 2), ratio(1, 2)],
        315_013,
        200_000,
        None,
    )
    .unwrap();
    let cantor_dim = (2.0f64).ln() / (3.0f64).ln();
    let cfit =
        dimension_fit_samples(&cantor_samples, 2.0, &grid, cantor_dim, &opts, &[]).unwrap();
    let cslope_ok = (cfit.slope - cantor_dim).abs() <= 0.10 * cantor_dim;
    let ccoeffs: Vec<f64> = cfit.rows.iter().map(|row| row.coefficient).collect();
    let cband = ccoeffs.iter().cloned().fold(0.0, f64::max)
        / ccoeffs.iter().cloned().fold(f64::INFINITY, f64::min);
    let cband_ok = cband <= 10.0;
    pass &= cslope_ok && cband_ok;
    detail.push_str(&format!(
        "cantor slope {:.4} vs {cantor_dim:.4} ({}), proxy band x{cband:.2} ({}); ",
        cfit.slope,
        if cslope_ok { "ok" } else { "OUT OF TOLERANCE" },
        if cband_ok { "ok" } else { "OUT OF TOLERANCE" },
    ));

    let elapsed = started.elapsed();
    pass &= elapsed.as_secs() <= 600;
    detail.push_str(&format!("elapsed {elapsed:?}"));
    report(11, pass, &detail);
}

#[test]
fn acceptance_12_reproducibility() {
    use std::fs;
    use std::process::Command;

    let base = std::env::temp_dir().join(format!("condq-acc12-{}", std::process::id()));
    let _ = fs::remove_dir_all(&base);
    fs::create_dir_all(&base).unwrap();
    for run in ["first", "second"] {
        let out = base.join(run);
        let output = Command::new(env!("CARGO_BIN_EXE_condq"))
            .args([
                "demo315",
                "--r",
                "2",
                "--seed",
                "315",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(output.status.success());
    }
    let mut names: Vec<String> = fs::read_dir(base.join("first"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let mut pass = !names.is_empty();
    for name in &names {
        let a = fs::read(base.join("first").join(name)).unwrap();
        let b = fs::read(base.join("second").join(name)).unwrap();
        if a != b {
            pass = false;
            println!("output {name} differs between identical runs");
        }
    }
    let detail = format!("{} artifacts byte-identical across reruns", names.len());
    let _ = fs::remove_dir_all(&base);
    report(12, pass, &detail);
}
