//! Config-driven experiment runner: resolves a domain and measure, runs
//! the requested kernel sweeps and reports, and writes deterministic CSV
//! and JSON outputs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{MaskedGrid, RadialProfile, TrialSpec};
use crate::geometry::{BoundaryDiscretization, FrostmanProbe, GeometryError, Point2, PolyDomain};
use crate::hardy::{monotone_family, reduction_sweep, HardySweep, KernelId, StepFamily};
use crate::norms::NormSpec;
use crate::potentials::{KernelPlan, PotentialMethod};
use crate::verify::{
    certify_measure, pointwise_report, rearrangement_report, search_trial_ratio, sobolev_report,
    InequalityId, InequalityReport, InequalitySpec, MeasureChoice, PointwiseReport,
    RearrangementReport, SearchResult, TrialFamily, VerifyError,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Verify(#[from] VerifyError),
    #[error("hardy: {0}")]
    Hardy(#[from] crate::hardy::HardyError),
    #[error("field: {0}")]
    Field(#[from] crate::fields::FieldError),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

/// Domain input: a named preset, inline vertex rings, or a vertex-list file
/// (JSON or plain text, decided by extension).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DomainSpec {
    Preset { preset: String },
    Rings { rings: Vec<Vec<[f64; 2]>> },
    File { file: PathBuf },
}

pub fn preset_domain(name: &str) -> Result<PolyDomain, RunError> {
    match name {
        "square" => Ok(PolyDomain::unit_square()),
        "l-shape" | "lshape" => Ok(PolyDomain::l_shape()),
        "star" => Ok(PolyDomain::star(5, 0.48, 0.19)?),
        "rooms-and-passages" | "rooms" => Ok(PolyDomain::rooms_and_passages(4)?),
        "square-hole" => Ok(PolyDomain::square_with_hole(0.2)?),
        other => Err(RunError::Config(format!("unknown domain preset '{other}'"))),
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "square",
    "l-shape",
    "star",
    "rooms-and-passages",
    "square-hole",
];

impl DomainSpec {
    pub fn resolve(&self) -> Result<PolyDomain, RunError> {
        match self {
            DomainSpec::Preset { preset } => preset_domain(preset),
            DomainSpec::Rings { rings } => Ok(PolyDomain::new(
                rings
                    .iter()
                    .map(|r| r.iter().map(|&v| Point2::from(v)).collect())
                    .collect(),
            )?),
            DomainSpec::File { file } => {
                let text = fs::read_to_string(file)?;
                let parsed = if file.extension().is_some_and(|e| e == "json") {
                    PolyDomain::from_json_str(&text)
                } else {
                    PolyDomain::from_text_str(&text)
                };
                Ok(parsed?)
            }
        }
    }
}

/// Kernel sweep description in config form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HardySweepConfig {
    pub kernel: KernelId,
    pub alpha: f64,
    pub n: f64,
    pub source: NormSpec,
    pub target: NormSpec,
    #[serde(default)]
    pub target_limit: Option<f64>,
    pub family: Vec<StepFamily>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointwiseConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RearrangementConfig {
    #[serde(default = "default_c_dilation")]
    pub c_dilation: f64,
    #[serde(default = "default_s_points")]
    pub s_points: usize,
}

fn default_c_dilation() -> f64 {
    0.5
}

fn default_s_points() -> usize {
    96
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub inequality: InequalityId,
    pub family: TrialFamily,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_budget() -> usize {
    200
}

/// Frostman certification settings; when absent, a default probe is used
/// whenever the measure itself is a Frostman measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrostmanConfig {
    pub alpha: f64,
    #[serde(default = "default_stride")]
    pub center_stride: usize,
    #[serde(default = "default_radii")]
    pub radius_count: usize,
}

fn default_stride() -> usize {
    67
}

fn default_radii() -> usize {
    17
}

/// One experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub domain: DomainSpec,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default)]
    pub measure: MeasureChoice,
    #[serde(default)]
    pub potential_method: PotentialMethod,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    /// Boundary node spacing; defaults to `diameter / 256`.
    #[serde(default)]
    pub boundary_spacing: Option<f64>,
    /// Trial catalog; empty means the built-in catalog for the domain.
    #[serde(default)]
    pub trials: Vec<TrialSpec>,
    #[serde(default)]
    pub inequalities: Vec<InequalityId>,
    #[serde(default)]
    pub hardy: Vec<HardySweepConfig>,
    #[serde(default)]
    pub pointwise: Option<PointwiseConfig>,
    #[serde(default)]
    pub rearrangement: Option<RearrangementConfig>,
    #[serde(default)]
    pub frostman: Option<FrostmanConfig>,
    #[serde(default)]
    pub search: Vec<SearchConfig>,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_grid_n() -> usize {
    128
}

fn default_n_theta() -> usize {
    256
}

impl RunConfig {
    pub fn from_json_str(s: &str) -> Result<Self, RunError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, RunError> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }
}

/// Built-in trial catalog, anchored at the most interior cell of the mask.
pub fn default_trial_catalog(domain: &PolyDomain, mask: &MaskedGrid) -> Vec<TrialSpec> {
    let anchor = mask
        .active_cells()
        .iter()
        .map(|&i| mask.center_of(i))
        .max_by(|a, b| {
            domain
                .distance_to_boundary(*a)
                .partial_cmp(&domain.distance_to_boundary(*b))
                .unwrap()
        })
        .unwrap_or(Point2::new(0.5, 0.5));
    // Keep the anchor off the lattice so radial centers never coincide
    // with a cell center.
    let c = [
        anchor.x + 0.2043 * mask.grid.h,
        anchor.y - 0.1371 * mask.grid.h,
    ];
    let reach = domain.distance_to_boundary(Point2::from(c));
    vec![
        TrialSpec::Rigid {
            b: [1.0, 0.5],
            omega: 0.7,
        },
        TrialSpec::Linear {
            a: [[1.0, 0.2], [-0.1, 0.6]],
        },
        TrialSpec::Radial {
            center: c,
            profile: RadialProfile::Power { gamma: 1.0 },
            scale: 1.0,
        },
        TrialSpec::Radial {
            center: c,
            profile: RadialProfile::Power { gamma: 3.0 },
            scale: 1.0,
        },
        TrialSpec::Radial {
            center: c,
            profile: RadialProfile::Bump {
                radius: 0.8 * reach,
            },
            scale: 1.0,
        },
        TrialSpec::Radial {
            center: c,
            profile: RadialProfile::TruncLog {
                cap: 6.0,
                radius: 0.8 * reach,
            },
            scale: 1.0,
        },
        TrialSpec::Sum {
            parts: vec![
                TrialSpec::Rigid {
                    b: [0.4, -0.3],
                    omega: 0.2,
                },
                TrialSpec::Radial {
                    center: c,
                    profile: RadialProfile::Bump {
                        radius: 0.6 * reach,
                    },
                    scale: 2.0,
                },
            ],
        },
    ]
}

/// Everything a run produced, in memory.
#[derive(Debug, Serialize)]
pub struct RunOutput {
    pub frostman_constant: Option<f64>,
    pub hardy: Vec<crate::hardy::SweepReport>,
    pub pointwise: Vec<PointwiseReport>,
    pub rearrangement: Vec<RearrangementReport>,
    pub sobolev: Vec<InequalityReport>,
    pub search: Vec<SearchResult>,
    pub violations: usize,
}

#[derive(Debug)]
pub struct RunSummary {
    pub violations: usize,
    pub files: Vec<PathBuf>,
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), fmt)
}

/// Executes a run: geometry certification, kernel sweeps, pointwise,
/// rearrangement, and norm-inequality reports, then the CSV/JSON outputs.
/// Deterministic given the seed; timestamps appear only in the manifest.
pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    let domain = config.domain.resolve()?;
    if config.n_theta < 16 {
        return Err(RunError::Config(format!(
            "n_theta must be at least 16, got {}",
            config.n_theta
        )));
    }
    for trial in &config.trials {
        trial.validate()?;
    }
    config.measure.validate()?;
    let mask = MaskedGrid::from_domain(&domain, config.grid_n)?;
    if mask.active_count() == 0 {
        return Err(RunError::Config("grid mask has no active cells".into()));
    }
    let spacing = config
        .boundary_spacing
        .unwrap_or_else(|| domain.diameter() / 256.0);
    let disc: BoundaryDiscretization = domain.boundary_discretize(spacing)?;
    let mu = config.measure.cell_measure(&mask)?;
    let plan = KernelPlan::new(config.potential_method);
    let alpha = config.measure.alpha();
    let trials = if config.trials.is_empty() {
        default_trial_catalog(&domain, &mask)
    } else {
        config.trials.clone()
    };
    for id in &config.inequalities {
        // Validate early so a bad config fails before any work.
        InequalitySpec::resolve(*id, alpha)?;
    }

    fs::create_dir_all(&config.out_dir)?;
    let reports_dir = config.out_dir.join("reports");
    fs::create_dir_all(&reports_dir)?;
    let mut files = Vec::new();

    // Frostman certification: explicit config, or automatic for Frostman
    // measures.
    let frostman_alpha = config
        .frostman
        .as_ref()
        .map(|f| f.alpha)
        .or(match config.measure {
            MeasureChoice::Frostman { alpha, .. } => Some(alpha),
            MeasureChoice::Lebesgue => None,
        });
    let frostman_value = match frostman_alpha {
        Some(a) => {
            let probe = FrostmanProbe {
                center_stride: config.frostman.as_ref().map_or(67, |f| f.center_stride),
                radius_count: config.frostman.as_ref().map_or(17, |f| f.radius_count),
                r_min: 2.0 * mask.grid.h,
                r_max: domain.diameter(),
            };
            Some(certify_measure(&domain, &mask, &mu, a, &probe)?)
        }
        None => None,
    };

    // Kernel sweeps.
    let mut hardy_reports = Vec::new();
    let mut hardy_rows: Vec<Vec<String>> = Vec::new();
    for sweep_cfg in &config.hardy {
        let family = monotone_family(&sweep_cfg.family)?;
        let sweep = HardySweep {
            kernel: sweep_cfg.kernel,
            alpha: sweep_cfg.alpha,
            n: sweep_cfg.n,
            source: sweep_cfg.source,
            target: sweep_cfg.target,
            target_limit: sweep_cfg.target_limit,
            family,
        };
        let report = reduction_sweep(&sweep)?;
        for (member, spec) in report.members.iter().zip(&sweep_cfg.family) {
            hardy_rows.push(vec![
                format!("{:?}", sweep_cfg.kernel).to_lowercase(),
                fmt(sweep_cfg.alpha),
                fmt(sweep_cfg.n),
                spec.label(),
                fmt(member.source_norm),
                fmt(member.target_norm),
                fmt(member.ratio),
            ]);
        }
        hardy_reports.push(report);
    }
    if !hardy_rows.is_empty() {
        let path = reports_dir.join("hardy.csv");
        write_csv(
            &path,
            &[
                "kernel",
                "alpha",
                "n",
                "member",
                "source_norm",
                "target_norm",
                "ratio",
            ],
            hardy_rows,
        )?;
        files.push(path);
    }

    let mut violations = 0usize;

    // Pointwise reports.
    let mut pointwise_reports = Vec::new();
    if let Some(pw) = &config.pointwise {
        let mut rows = Vec::new();
        for trial in &trials {
            let report = pointwise_report(
                trial,
                &domain,
                &mask,
                &disc,
                &plan,
                config.n_theta,
                pw.samples,
                config.seed,
            )?;
            violations += report.violations;
            rows.push(vec![
                trial.label(),
                report.grid_n.to_string(),
                report.n_theta.to_string(),
                report.samples.len().to_string(),
                fmt_opt(report.sup_ratio),
                report.violations.to_string(),
            ]);
            pointwise_reports.push(report);
        }
        let path = reports_dir.join("pointwise.csv");
        write_csv(
            &path,
            &[
                "trial",
                "grid_n",
                "n_theta",
                "samples",
                "sup_ratio",
                "violations",
            ],
            rows,
        )?;
        files.push(path);
    }

    // Rearrangement reports.
    let mut rearrangement_reports = Vec::new();
    if let Some(rc) = &config.rearrangement {
        let mut rows = Vec::new();
        for trial in &trials {
            let report =
                rearrangement_report(trial, &mask, &mu, alpha, rc.c_dilation, &disc, rc.s_points)?;
            violations += report.violations;
            for row in &report.rows {
                rows.push(vec![
                    trial.label(),
                    fmt(alpha),
                    fmt(rc.c_dilation),
                    report.grid_n.to_string(),
                    fmt(row.s),
                    fmt(row.lhs),
                    fmt(row.k1),
                    fmt(row.k2),
                    fmt(row.k3),
                    fmt_opt(row.ratio),
                ]);
            }
            rearrangement_reports.push(report);
        }
        let path = reports_dir.join("rearrangement.csv");
        write_csv(
            &path,
            &[
                "trial",
                "alpha",
                "c_dilation",
                "grid_n",
                "s",
                "lhs",
                "k1",
                "k2",
                "k3",
                "ratio",
            ],
            rows,
        )?;
        files.push(path);
    }

    // Norm-inequality reports.
    let mut sobolev_reports = Vec::new();
    if !config.inequalities.is_empty() {
        let mut rows = Vec::new();
        for id in &config.inequalities {
            let spec = InequalitySpec::resolve(*id, alpha)?;
            for trial in &trials {
                let report = sobolev_report(trial, &mask, &mu, &disc, &spec)?;
                if report.violation {
                    violations += 1;
                }
                rows.push(vec![
                    report.inequality.clone(),
                    report.part.clone().unwrap_or_default(),
                    config.measure.label(),
                    report.trial.clone(),
                    report.grid_n.to_string(),
                    fmt(report.alpha),
                    fmt(report.lhs),
                    fmt(report.rhs_sym_grad),
                    fmt(report.rhs_trace),
                    fmt_opt(report.ratio),
                    (report.violation as u8).to_string(),
                ]);
                sobolev_reports.push(report);
            }
        }
        let path = reports_dir.join("sobolev.csv");
        write_csv(
            &path,
            &[
                "inequality",
                "part",
                "measure",
                "trial",
                "grid_n",
                "alpha",
                "lhs",
                "rhs_sym_grad",
                "rhs_trace",
                "ratio",
                "violation",
            ],
            rows,
        )?;
        files.push(path);
    }

    // Ratio maximization.
    let mut search_results = Vec::new();
    if !config.search.is_empty() {
        let mut rows = Vec::new();
        for sc in &config.search {
            let spec = InequalitySpec::resolve(sc.inequality, alpha)?;
            let result = search_trial_ratio(
                &sc.family,
                &mask,
                &mu,
                &disc,
                &spec,
                &[],
                sc.budget,
                config.seed,
            )?;
            rows.push(vec![
                sc.inequality.label(),
                sc.family.label(),
                fmt(result.best_ratio),
                result
                    .best_params
                    .iter()
                    .map(|v| format!("{v}"))
                    .collect::<Vec<_>>()
                    .join(";"),
                result.evaluations.to_string(),
            ]);
            search_results.push(result);
        }
        let path = reports_dir.join("search.csv");
        write_csv(
            &path,
            &[
                "inequality",
                "family",
                "best_ratio",
                "best_params",
                "evaluations",
            ],
            rows,
        )?;
        files.push(path);
    }

    let output = RunOutput {
        frostman_constant: frostman_value,
        hardy: hardy_reports,
        pointwise: pointwise_reports,
        rearrangement: rearrangement_reports,
        sobolev: sobolev_reports,
        search: search_results,
        violations,
    };
    let report_path = reports_dir.join("report.json");
    fs::write(&report_path, serde_json::to_string_pretty(&output)?)?;
    files.push(report_path);

    // The manifest echoes the config for reproducibility; the timestamp
    // lives only here.
    let manifest = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix_s": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        "config": config,
        "domain_perimeter": domain.perimeter(),
        "grid": { "nx": mask.grid.nx, "ny": mask.grid.ny, "h": mask.grid.h,
                   "active_cells": mask.active_count() },
        "boundary_nodes": disc.len(),
        "frostman_constant": frostman_value,
        "violations": violations,
    });
    let manifest_path = config.out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    files.push(manifest_path);

    Ok(RunSummary { violations, files })
}
