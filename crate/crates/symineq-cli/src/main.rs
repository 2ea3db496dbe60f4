//! `symineq`: config-driven runner for domain certification, kernel
//! sweeps, and inequality verification. Exit codes: 0 on success, 1 on
//! validation or configuration failures, 2 when a run produced violation
//! candidates.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use symineq::geometry::FrostmanProbe;
use symineq::hardy::{default_catalog, default_catalog_with_cut, KernelId};
use symineq::norms::NormSpec;
use symineq::potentials::PotentialMethod;
use symineq::run::{
    run, DomainSpec, HardySweepConfig, PointwiseConfig, RearrangementConfig, RunConfig, RunError,
    PRESET_NAMES,
};
use symineq::verify::{certify_measure, InequalityId, MeasureChoice};
use symineq::MaskedGrid;

#[derive(Parser)]
#[command(
    name = "symineq",
    version,
    about = "Symmetric-gradient inequality toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Fft,
}

impl From<MethodArg> for PotentialMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct => PotentialMethod::Direct,
            MethodArg::Fft => PotentialMethod::Fft,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Execute a JSON run configuration.
    Run {
        /// Path to the configuration file.
        config: PathBuf,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a domain and report its geometry; optionally certify a
    /// Frostman exponent for the Lebesgue cell measure.
    Geom {
        /// Preset name or vertex-list file (.json or plain text).
        domain: String,
        /// Frostman exponent to certify, in (1, 2].
        #[arg(long)]
        frostman: Option<f64>,
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
    /// Run kernel-boundedness sweeps: a named preset or a JSON file with a
    /// list of sweep configurations.
    Hardy {
        /// `subcritical`, `critical`, or a JSON file path.
        sweep: String,
        /// Family size for named presets.
        #[arg(long, default_value_t = 30)]
        members: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate one inequality on the default trial catalog.
    Verify {
        /// Inequality id: subcritical, critical-exp, critical-lz,
        /// supercritical, lorentz, zygmund, remark-exp-lorentz.
        inequality: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        /// Frostman exponent for the target measure (Lebesgue when absent).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = "square")]
        domain: String,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, default_value_t = 256)]
        ntheta: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Fft)]
        potential_method: MethodArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn domain_spec(arg: &str) -> DomainSpec {
    if PRESET_NAMES.contains(&arg) {
        DomainSpec::Preset {
            preset: arg.to_string(),
        }
    } else {
        DomainSpec::File {
            file: PathBuf::from(arg),
        }
    }
}

fn parse_inequality(
    name: &str,
    p: Option<f64>,
    q: Option<f64>,
    sigma: Option<f64>,
) -> Result<InequalityId, String> {
    let need = |v: Option<f64>, flag: &str| v.ok_or(format!("{name} requires --{flag}"));
    match name {
        "subcritical" => Ok(InequalityId::Subcritical { p: need(p, "p")? }),
        "critical-exp" => Ok(InequalityId::CriticalExp),
        "critical-lz" => Ok(InequalityId::CriticalLz),
        "supercritical" => Ok(InequalityId::Supercritical { p: need(p, "p")? }),
        "lorentz" => Ok(InequalityId::Lorentz {
            p: need(p, "p")?,
            q: need(q, "q")?,
        }),
        "zygmund" => Ok(InequalityId::Zygmund {
            p: need(p, "p")?,
            sigma: need(sigma, "sigma")?,
        }),
        "remark-exp-lorentz" => Ok(InequalityId::RemarkExpLorentz { q: need(q, "q")? }),
        other => Err(format!("unknown inequality id '{other}'")),
    }
}

fn named_sweeps(name: &str, members: usize) -> Result<Vec<HardySweepConfig>, String> {
    match name {
        // Power-norm instance: first kernel from L^1.5 into L^6.
        "subcritical" => Ok(vec![HardySweepConfig {
            kernel: KernelId::K1,
            alpha: 2.0,
            n: 2.0,
            source: NormSpec::Lebesgue { p: 1.5 },
            target: NormSpec::Lebesgue { p: 6.0 },
            target_limit: None,
            family: default_catalog(members),
        }]),
        // Borderline instance: second kernel into the log-refined norm
        // over (0, 1) against trials supported in (0, 1).
        "critical" => Ok(vec![HardySweepConfig {
            kernel: KernelId::K2,
            alpha: 2.0,
            n: 2.0,
            source: NormSpec::Lebesgue { p: 2.0 },
            target: NormSpec::LorentzZygmund { q: 2.0 },
            target_limit: Some(1.0),
            family: default_catalog_with_cut(members, 1.0),
        }]),
        other => Err(format!("unknown sweep preset '{other}'")),
    }
}

fn dispatch(cli: Cli) -> Result<usize, RunError> {
    match cli.command {
        Command::Run { config, out } => {
            let mut cfg = RunConfig::from_file(&config)?;
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            let summary = run(&cfg)?;
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
            Ok(summary.violations)
        }
        Command::Geom {
            domain,
            frostman,
            grid,
        } => {
            let dom = domain_spec(&domain).resolve()?;
            let bbox = dom.bounding_box();
            println!(
                "rings: {}  perimeter: {}  bbox: [{}, {}] x [{}, {}]",
                dom.rings().len(),
                dom.perimeter(),
                bbox.min.x,
                bbox.max.x,
                bbox.min.y,
                bbox.max.y
            );
            let mask = MaskedGrid::from_domain(&dom, grid)?;
            println!(
                "grid {} x {} (h = {}), {} active cells, area ~ {}",
                mask.grid.nx,
                mask.grid.ny,
                mask.grid.h,
                mask.active_count(),
                mask.active_count() as f64 * mask.grid.cell_area()
            );
            if let Some(alpha) = frostman {
                let mu = MeasureChoice::Lebesgue.cell_measure(&mask)?;
                let probe = FrostmanProbe {
                    center_stride: 67,
                    radius_count: 17,
                    r_min: 2.0 * mask.grid.h,
                    r_max: dom.diameter(),
                };
                let c = certify_measure(&dom, &mask, &mu, alpha, &probe)?;
                println!("frostman constant (alpha = {alpha}): {c}");
            }
            Ok(0)
        }
        Command::Hardy {
            sweep,
            members,
            out,
        } => {
            let sweeps = if sweep.ends_with(".json") {
                let text = std::fs::read_to_string(&sweep)?;
                serde_json::from_str(&text)?
            } else {
                named_sweeps(&sweep, members).map_err(RunError::Config)?
            };
            let cfg = RunConfig {
                domain: DomainSpec::Preset {
                    preset: "square".into(),
                },
                grid_n: 16,
                measure: MeasureChoice::Lebesgue,
                potential_method: PotentialMethod::Direct,
                n_theta: 64,
                boundary_spacing: None,
                trials: vec![],
                inequalities: vec![],
                hardy: sweeps,
                pointwise: None,
                rearrangement: None,
                frostman: None,
                search: vec![],
                out_dir: out,
                seed: 0,
            };
            let summary = run(&cfg)?;
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
            Ok(summary.violations)
        }
        Command::Verify {
            inequality,
            p,
            q,
            sigma,
            alpha,
            domain,
            grid,
            ntheta,
            potential_method,
            seed,
            out,
        } => {
            let id = parse_inequality(&inequality, p, q, sigma).map_err(RunError::Config)?;
            let measure = match alpha {
                None => MeasureChoice::Lebesgue,
                Some(a) => MeasureChoice::Frostman {
                    alpha: a,
                    density: symineq::verify::DensitySpec::InvDistPow {
                        center: [0.31, 0.43],
                        power: 2.0 - a,
                    },
                },
            };
            let cfg = RunConfig {
                domain: domain_spec(&domain),
                grid_n: grid,
                measure,
                potential_method: potential_method.into(),
                n_theta: ntheta,
                boundary_spacing: None,
                trials: vec![],
                inequalities: vec![id],
                hardy: vec![],
                pointwise: Some(PointwiseConfig { samples: 64 }),
                rearrangement: Some(RearrangementConfig {
                    c_dilation: 0.5,
                    s_points: 96,
                }),
                frostman: None,
                search: vec![],
                out_dir: out,
                seed,
            };
            let summary = run(&cfg)?;
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
            Ok(summary.violations)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} violation candidate(s) found");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
