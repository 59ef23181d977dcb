//! Output artifacts: manifest, JSON reports and CSV tables.
//!
//! All writers are deterministic — struct field order fixes the JSON key
//! order and floats use Rust's shortest-roundtrip formatting — so re-running
//! a command with the same manifest reproduces byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use condensation::bounds::LevelReport;
use condensation::dims::{Branch, DimResult};
use condensation::partition::PartitionBundle;
use condensation::quantizer::FitResult;
use condensation::system::IoscReport;
use condensation::words::Word;
use condensation::Rational;

use crate::commands::CliError;

/// Run configuration echoed next to every output set.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_crossover: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marker_depth: Option<usize>,
}

impl Manifest {
    pub fn new(command: &str) -> Manifest {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            ..Manifest::default()
        }
    }
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(format!("serializing {name}: {e}")))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn rational_string(q: &Rational) -> String {
    q.to_string()
}

#[derive(Debug, Serialize)]
pub struct VerdictJson {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct IoscJson {
    pub accepted: bool,
    pub verdicts: Vec<VerdictJson>,
}

impl IoscJson {
    pub fn from_report(report: &IoscReport) -> IoscJson {
        IoscJson {
            accepted: report.accepted(),
            verdicts: report
                .verdicts()
                .into_iter()
                .map(|(name, v)| VerdictJson {
                    name: name.to_string(),
                    pass: v.pass,
                    detail: v.detail.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DimsJson {
    pub r: f64,
    pub inner_dim: f64,
    pub outer_dim: f64,
    pub dim: f64,
    pub branch: String,
    pub tied: bool,
    pub residual_inner: f64,
    pub residual_outer: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossover: Option<Option<f64>>,
}

impl DimsJson {
    pub fn from_result(res: &DimResult, crossover: Option<Option<f64>>) -> DimsJson {
        DimsJson {
            r: res.r,
            inner_dim: res.inner_dim,
            outer_dim: res.outer_dim,
            dim: res.dim,
            branch: match res.branch {
                Branch::Inner => "inner".to_string(),
                Branch::Outer => "outer".to_string(),
            },
            tied: res.tied,
            residual_inner: res.residual_inner,
            residual_outer: res.residual_outer,
            crossover,
        }
    }
}

fn letters(word: &Word) -> Vec<u8> {
    word.letters().to_vec()
}

#[derive(Debug, Serialize)]
pub struct BundleJson {
    pub k: u32,
    pub r: f64,
    pub tail_count: usize,
    pub piece_count: usize,
    pub min_depth: usize,
    pub max_depth: usize,
    pub boundary_hits: usize,
    pub tail_words: Vec<Vec<u8>>,
    pub cylinder_words: Vec<Vec<u8>>,
    pub overhang: Vec<Vec<u8>>,
    pub inner_cuts: Vec<Vec<Vec<u8>>>,
}

impl BundleJson {
    pub fn from_bundle(bundle: &PartitionBundle) -> BundleJson {
        BundleJson {
            k: bundle.k,
            r: bundle.r,
            tail_count: bundle.tail_count(),
            piece_count: bundle.piece_count,
            min_depth: bundle.min_tail_len,
            max_depth: bundle.max_tail_len,
            boundary_hits: bundle.boundary_hits,
            tail_words: bundle.tail_words.words().iter().map(letters).collect(),
            cylinder_words: bundle.cylinder_words.iter().map(letters).collect(),
            overhang: bundle.overhang.iter().map(letters).collect(),
            inner_cuts: bundle
                .inner_cuts
                .iter()
                .map(|cut| cut.words().iter().map(letters).collect())
                .collect(),
        }
    }
}

/// CSV summary of one stopping level per row.
pub fn partition_csv(rows: &[(u32, &PartitionBundle, f64)]) -> String {
    let mut out = String::from("k,tail_count,piece_count,min_depth,max_depth,power_sum\n");
    for (k, bundle, power_sum) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            k,
            bundle.tail_count(),
            bundle.piece_count,
            bundle.min_tail_len,
            bundle.max_tail_len,
            power_sum
        ));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct GapsJson {
    pub hood: String,
    pub outer: String,
    pub inner: String,
    pub support: String,
}

#[derive(Debug, Serialize)]
pub struct BoundsJson {
    pub k: u32,
    pub piece_count: usize,
    pub upper: f64,
    pub lower_sum: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_sum_exact: Option<String>,
    pub upper_coeff: f64,
    pub lower_coeff: f64,
    pub mass_floor: String,
    pub family_mass: String,
    pub separation: String,
    pub separation_pass: bool,
    pub energy_band_ok: bool,
    pub outer_marker: Vec<u8>,
    pub inner_marker: Vec<u8>,
    pub gaps: GapsJson,
}

impl BoundsJson {
    pub fn from_report(
        report: &LevelReport,
        markers: &condensation::bounds::SeparationData,
    ) -> BoundsJson {
        BoundsJson {
            k: report.k,
            piece_count: report.piece_count,
            upper: report.bounds.upper,
            lower_sum: report.bounds.lower_sum,
            upper_exact: report.bounds.upper_exact.as_ref().map(rational_string),
            lower_sum_exact: report.bounds.lower_sum_exact.as_ref().map(rational_string),
            upper_coeff: report.energy.upper_coeff.value(),
            lower_coeff: report.energy.lower_coeff.value(),
            mass_floor: rational_string(&report.mass_floor),
            family_mass: rational_string(&report.family_mass),
            separation: rational_string(&markers.separation),
            separation_pass: report.separation.pass,
            energy_band_ok: report.energy.band_ok,
            outer_marker: letters(&markers.outer_marker),
            inner_marker: letters(&markers.inner_marker),
            gaps: GapsJson {
                hood: rational_string(&markers.gap_hood),
                outer: rational_string(&markers.gap_outer),
                inner: rational_string(&markers.gap_inner),
                support: rational_string(&markers.gap_support),
            },
        }
    }
}

pub fn codebook_csv(points: &[f64]) -> String {
    let mut out = String::from("a\n");
    for p in points {
        out.push_str(&format!("{p}\n"));
    }
    out
}

pub fn samples_csv(points: &[f64]) -> String {
    let mut out = String::from("x\n");
    for p in points {
        out.push_str(&format!("{p}\n"));
    }
    out
}

/// Rows of the estimate table; the bound column is empty when no stopping
/// level fits under the given `n`.
pub struct EstimateRow {
    pub n: usize,
    pub e_hat: f64,
    pub se: f64,
    pub upper_bound: Option<f64>,
    pub coefficient: f64,
}

pub fn estimate_csv(rows: &[EstimateRow]) -> String {
    let mut out = String::from("n,e_hat,se,upper_bound_at_matching_phi,coefficient_proxy\n");
    for row in rows {
        let bound = row
            .upper_bound
            .map(|b| b.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n, row.e_hat, row.se, bound, row.coefficient
        ));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct FitRowJson {
    pub n: usize,
    pub e_hat: f64,
    pub se: f64,
    pub coefficient: f64,
}

#[derive(Debug, Serialize)]
pub struct FitJson {
    pub r: f64,
    pub dim: f64,
    pub slope: f64,
    pub rows: Vec<FitRowJson>,
}

impl FitJson {
    pub fn from_result(r: f64, fit: &FitResult) -> FitJson {
        FitJson {
            r,
            dim: fit.dim,
            slope: fit.slope,
            rows: fit
                .rows
                .iter()
                .map(|row| FitRowJson {
                    n: row.n,
                    e_hat: row.value,
                    se: row.se,
                    coefficient: row.coefficient,
                })
                .collect(),
        }
    }
}

pub fn fit_csv(fit: &FitResult) -> String {
    let mut out = String::from("n,e_hat,se,coefficient_proxy\n");
    for row in &fit.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.n, row.value, row.se, row.coefficient
        ));
    }
    out
}
