//! Runnable checks for the three layers of the theory: the pointwise bound,
//! the rearrangement bound with its three kernels, and the full family of
//! norm inequalities `||u||_Y <= C (||Eu||_X + ||u||_Z)`, together with an
//! empirical-constant search over trial families.
//!
//! Everything here is planar (`n = 2`); the measure exponent `alpha` stays
//! a free parameter in `(1, 2]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{FieldError, MaskedGrid, TrialSpec};
use crate::geometry::{
    frostman_constant, BoundaryDiscretization, FrostmanProbe, GeometryError, Point2, PolyDomain,
    ORIGIN_GUARD_FRACTION,
};
use crate::hardy::{kernel_k1, kernel_k2, kernel_k3, HardyError};
use crate::norms::{eval_norm, NormError, NormSpec, YoungFunction};
use crate::numeric::logspace;
use crate::potentials::{riesz_potential, KernelPlan, PotentialError};
use crate::rearrange::{decreasing_rearrangement, CellMeasure, RearrangeError};

/// Space dimension of the geometric pipeline.
pub const DIM: f64 = 2.0;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("inequality parameters violate the hypotheses: {0}")]
    BadHypotheses(String),
    #[error("measure exponent alpha = {0} outside (1, 2]")]
    BadAlpha(f64),
    #[error("search budget must be positive")]
    ZeroBudget,
    #[error("search box must have 1..=6 dimensions, got {0}")]
    BadBox(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Rearrange(#[from] RearrangeError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Hardy(#[from] HardyError),
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

/// Weight density for Frostman cell measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensitySpec {
    /// `|x - center|^{-power}`; for `power = 2 - alpha` the induced measure
    /// is upper Ahlfors regular of exponent `alpha`.
    InvDistPow {
        center: [f64; 2],
        power: f64,
    },
    Constant {
        value: f64,
    },
}

impl DensitySpec {
    pub fn eval(&self, p: Point2) -> f64 {
        match *self {
            DensitySpec::InvDistPow { center, power } => {
                let r = p.dist(Point2::from(center));
                if r == 0.0 {
                    0.0
                } else {
                    r.powf(-power)
                }
            }
            DensitySpec::Constant { value } => value,
        }
    }
}

/// Measure on the grid cells: plain Lebesgue or a Frostman density measure
/// with its regularity exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureChoice {
    #[default]
    Lebesgue,
    Frostman {
        alpha: f64,
        density: DensitySpec,
    },
}

impl MeasureChoice {
    /// Regularity exponent attached to the measure (`2` for Lebesgue).
    pub fn alpha(&self) -> f64 {
        match *self {
            MeasureChoice::Lebesgue => DIM,
            MeasureChoice::Frostman { alpha, .. } => alpha,
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let a = self.alpha();
        if a > DIM - 1.0 && a <= DIM {
            Ok(())
        } else {
            Err(VerifyError::BadAlpha(a))
        }
    }

    /// Cell weights over the active cells of the mask.
    pub fn cell_measure(&self, mask: &MaskedGrid) -> Result<CellMeasure, VerifyError> {
        self.validate()?;
        match *self {
            MeasureChoice::Lebesgue => Ok(mask.lebesgue_measure()),
            MeasureChoice::Frostman { density, .. } => {
                Ok(mask.density_measure(|p| density.eval(p))?)
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            MeasureChoice::Lebesgue => "lebesgue".to_string(),
            MeasureChoice::Frostman { alpha, .. } => format!("frostman({alpha})"),
        }
    }
}

/// Certifies the measure empirically: the probed Frostman ratio
/// `mu(B_r(x)) / r^alpha` over the mask's cell cloud.
pub fn certify_measure(
    domain: &PolyDomain,
    mask: &MaskedGrid,
    measure: &CellMeasure,
    alpha: f64,
    probe: &FrostmanProbe,
) -> Result<f64, VerifyError> {
    let points: Vec<Point2> = mask
        .active_cells()
        .iter()
        .map(|&i| mask.center_of(i))
        .collect();
    Ok(frostman_constant(
        domain,
        &points,
        measure.weights(),
        alpha,
        probe,
    )?)
}

// ---------------------------------------------------------------------------
// Inequality specifications
// ---------------------------------------------------------------------------

/// Identifier plus parameters for one inequality of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum InequalityId {
    /// `1 < p < 2`: power-norm inequality below the borderline exponent.
    Subcritical { p: f64 },
    /// Borderline exponent, exponential Orlicz target.
    CriticalExp,
    /// Borderline exponent, Lorentz-Zygmund target (stronger than the
    /// exponential form).
    CriticalLz,
    /// `p > 2`: sup-norm target.
    Supercritical { p: f64 },
    /// Lorentz-norm data; the applicable regime is derived from `(p, q)`.
    Lorentz { p: f64, q: f64 },
    /// Power-log (Zygmund) Orlicz data; regime derived from `(p, sigma)`.
    Zygmund { p: f64, sigma: f64 },
    /// Exponential target paired with a Lorentz gradient norm; a slightly
    /// weaker companion of the borderline Lorentz-Zygmund inequality.
    RemarkExpLorentz { q: f64 },
}

impl InequalityId {
    pub fn label(&self) -> String {
        match *self {
            InequalityId::Subcritical { p } => format!("subcritical({p})"),
            InequalityId::CriticalExp => "critical-exp".to_string(),
            InequalityId::CriticalLz => "critical-lz".to_string(),
            InequalityId::Supercritical { p } => format!("supercritical({p})"),
            InequalityId::Lorentz { p, q } => format!("lorentz({p};{q})"),
            InequalityId::Zygmund { p, sigma } => format!("zygmund({p};{sigma})"),
            InequalityId::RemarkExpLorentz { q } => format!("remark-exp-lorentz({q})"),
        }
    }
}

/// Fully resolved norm triple for one inequality: target norm `Y` over
/// `(domain, mu)`, gradient norm `X` over the domain with Lebesgue measure,
/// trace norm `Z` over the boundary with arclength.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InequalitySpec {
    pub id: InequalityId,
    pub alpha: f64,
    pub y: NormSpec,
    pub x: NormSpec,
    pub z: NormSpec,
    /// Regime selected by the parameters, for multi-part families.
    pub part: Option<&'static str>,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

impl InequalitySpec {
    /// Wires the norm triple from the identifier and the measure exponent,
    /// validating the hypotheses. For the Lorentz and Zygmund families the
    /// regime (part) is determined by the parameters; the case split is
    /// exhaustive and disjoint, so no separate part tag is accepted.
    pub fn resolve(id: InequalityId, alpha: f64) -> Result<Self, VerifyError> {
        if !(alpha > DIM - 1.0 && alpha <= DIM) {
            return Err(VerifyError::BadAlpha(alpha));
        }
        let n = DIM;
        let spec = match id {
            InequalityId::Subcritical { p } => {
                if !(p > 1.0 && p < n) {
                    return Err(VerifyError::BadHypotheses(format!(
                        "subcritical needs 1 < p < {n}, got p = {p}"
                    )));
                }
                InequalitySpec {
                    id,
                    alpha,
                    y: NormSpec::Lebesgue {
                        p: alpha * p / (n - p),
                    },
                    x: NormSpec::Lebesgue { p },
                    z: NormSpec::Lebesgue {
                        p: p * (n - 1.0) / (n - p),
                    },
                    part: None,
                }
            }
            InequalityId::CriticalExp => {
                let sigma = n / (n - 1.0);
                InequalitySpec {
                    id,
                    alpha,
                    y: NormSpec::Orlicz {
                        a: YoungFunction::ExpSigma { sigma },
                    },
                    x: NormSpec::Lebesgue { p: n },
                    z: NormSpec::Orlicz {
                        a: YoungFunction::ExpSigma { sigma },
                    },
                    part: None,
                }
            }
            InequalityId::CriticalLz => InequalitySpec {
                id,
                alpha,
                y: NormSpec::LorentzZygmund { q: n },
                x: NormSpec::Lebesgue { p: n },
                z: NormSpec::LorentzZygmund { q: n },
                part: None,
            },
            InequalityId::Supercritical { p } => {
                if !(p > n) {
                    return Err(VerifyError::BadHypotheses(format!(
                        "supercritical needs p > {n}, got p = {p}"
                    )));
                }
                InequalitySpec {
                    id,
                    alpha,
                    y: NormSpec::Sup,
                    x: NormSpec::Lebesgue { p },
                    z: NormSpec::Sup,
                    part: None,
                }
            }
            InequalityId::Lorentz { p, q } => {
                let x = NormSpec::Lorentz { p, q };
                x.validate()?;
                if p < n {
                    if !(p > 1.0) {
                        return Err(VerifyError::BadHypotheses(format!(
                            "lorentz regime (i) needs p > 1, got p = {p}"
                        )));
                    }
                    InequalitySpec {
                        id,
                        alpha,
                        y: NormSpec::Lorentz {
                            p: alpha * p / (n - p),
                            q,
                        },
                        x,
                        z: NormSpec::Lorentz {
                            p: p * (n - 1.0) / (n - p),
                            q,
                        },
                        part: Some("i"),
                    }
                } else if near(p, n) && q > 1.0 && q.is_finite() {
                    InequalitySpec {
                        id,
                        alpha,
                        y: NormSpec::LorentzZygmund { q },
                        x,
                        z: NormSpec::LorentzZygmund { q },
                        part: Some("ii"),
                    }
                } else {
                    // p = n with q = 1, or p > n.
                    InequalitySpec {
                        id,
                        alpha,
                        y: NormSpec::Sup,
                        x,
                        z: NormSpec::Sup,
                        part: Some("iii"),
                    }
                }
            }
            InequalityId::Zygmund { p, sigma } => {
                if !(p > 1.0 && p.is_finite() && sigma.is_finite()) {
                    return Err(VerifyError::BadHypotheses(format!(
                        "zygmund needs finite p > 1, got (p, sigma) = ({p}, {sigma})"
                    )));
                }
                let x = NormSpec::Orlicz {
                    a: YoungFunction::Zygmund { p, sigma },
                };
                if p < n {
                    InequalitySpec {
                        id,
                        alpha,
                        y: NormSpec::Orlicz {
                            a: YoungFunction::Zygmund {
                                p: p * alpha / (n - p),
                                sigma: sigma * alpha / (n - p),
                            },
                        },
                        x,
                        z: NormSpec::Orlicz {
                            a: YoungFunction::Zygmund {
                                p: p * (n - 1.0) / (n - p),
                                sigma: sigma * (n - 1.0) / (n - p),
                            },
                        },
                        part: Some("i"),
                    }
                } else if near(p, n) && sigma < n - 1.0 && !near(sigma, n - 1.0) {
                    let exp_sigma = n / (n - 1.0 - sigma);
                    InequalitySpec {
                        id,
                        alpha,
                        y: NormSpec::Orlicz {
                            a: YoungFunction::ExpSigma { sigma: exp_sigma },
                        },
                        x,
                        z: NormSpec::Orlicz {
                            a: YoungFunction::ExpSigma { sigma: exp_sigma },
                        },
                        part: Some("ii"),
                    }
                } else if near(p, n) && near(sigma, n - 1.0) {
                    let s = n / (n - 1.0);
                    InequalitySpec {
                        id,
                        alpha,
                        y: NormSpec::Orlicz {
                            a: YoungFunction::DoubleExp { sigma: s },
                        },
                        x,
                        z: NormSpec::Orlicz {
                            a: YoungFunction::DoubleExp { sigma: s },
                        },
                        part: Some("iii"),
                    }
                } else {
                    // p = n with sigma > n - 1, or p > n.
                    InequalitySpec {
                        id,
                        alpha,
                        y: NormSpec::Sup,
                        x,
                        z: NormSpec::Sup,
                        part: Some("iv"),
                    }
                }
            }
            InequalityId::RemarkExpLorentz { q } => {
                if !(q > 1.0 && q.is_finite()) {
                    return Err(VerifyError::BadHypotheses(format!(
                        "remark-exp-lorentz needs q > 1, got q = {q}"
                    )));
                }
                let sigma = q / (q - 1.0);
                InequalitySpec {
                    id,
                    alpha,
                    y: NormSpec::Orlicz {
                        a: YoungFunction::ExpSigma { sigma },
                    },
                    x: NormSpec::Lorentz { p: n, q },
                    z: NormSpec::Orlicz {
                        a: YoungFunction::ExpSigma { sigma },
                    },
                    part: None,
                }
            }
        };
        spec.y.validate()?;
        spec.x.validate()?;
        spec.z.validate()?;
        Ok(spec)
    }
}

// ---------------------------------------------------------------------------
// Norm-inequality reports
// ---------------------------------------------------------------------------

/// Per-trial record of one norm inequality: left side, both right-hand
/// pieces, and the empirical ratio.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub inequality: String,
    pub part: Option<String>,
    pub trial: String,
    pub lhs: f64,
    pub rhs_sym_grad: f64,
    pub rhs_trace: f64,
    /// `lhs / (rhs_sym_grad + rhs_trace)`; absent when both sides vanish.
    pub ratio: Option<f64>,
    /// Both sides vanished: the inequality holds trivially.
    pub trivial: bool,
    /// Nonzero left side against a vanishing right side; must never occur.
    pub violation: bool,
    pub grid_n: usize,
    pub alpha: f64,
}

/// Evaluates one inequality for one trial field: the target norm of
/// `|u|` under `mu`, the gradient norm of `|Eu|` under cell Lebesgue
/// measure, and the trace norm under arclength.
pub fn sobolev_report(
    trial: &TrialSpec,
    mask: &MaskedGrid,
    mu: &CellMeasure,
    disc: &BoundaryDiscretization,
    spec: &InequalitySpec,
) -> Result<InequalityReport, VerifyError> {
    trial.validate()?;
    let u_mag = trial.sample_magnitude(mask).active_values();
    let y_prof = decreasing_rearrangement(&u_mag, mu)?;
    let lhs = eval_norm(&spec.y, &y_prof, mu.total())?;

    let lebesgue = mask.lebesgue_measure();
    let e_mag = trial.sample_sym_grad_magnitude(mask).active_values();
    let x_prof = decreasing_rearrangement(&e_mag, &lebesgue)?;
    let rhs_sym_grad = eval_norm(&spec.x, &x_prof, lebesgue.total())?;

    let trace = trial.trace_magnitudes(disc);
    let arc = CellMeasure::new(disc.weights())?;
    let z_prof = decreasing_rearrangement(&trace, &arc)?;
    let rhs_trace = eval_norm(&spec.z, &z_prof, arc.total())?;

    let denom = rhs_sym_grad + rhs_trace;
    let (ratio, trivial, violation) = if denom > 0.0 {
        (Some(lhs / denom), false, false)
    } else if lhs > 0.0 {
        (None, false, true)
    } else {
        (None, true, false)
    };
    Ok(InequalityReport {
        inequality: spec.id.label(),
        part: spec.part.map(str::to_string),
        trial: trial.label(),
        lhs,
        rhs_sym_grad,
        rhs_trace,
        ratio,
        trivial,
        violation,
        grid_n: mask.grid.nx.max(mask.grid.ny),
        alpha: spec.alpha,
    })
}

// ---------------------------------------------------------------------------
// Pointwise report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseSample {
    pub x: [f64; 2],
    pub lhs: f64,
    pub t_part: f64,
    pub i_part: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseReport {
    pub trial: String,
    pub samples: Vec<PointwiseSample>,
    /// Sup of `|u(x)| / (T|u|(x) + I|Eu|(x))`; empirical lower bound for
    /// the dimensional constant of the pointwise bound. Absent when every
    /// sample was a trivial `0/0`.
    pub sup_ratio: Option<f64>,
    pub violations: usize,
    pub grid_n: usize,
    pub n_theta: usize,
}

/// Deterministic interior sample cells: active cells outside the guard
/// band, subsampled by a seeded shuffle.
fn sample_cells(domain: &PolyDomain, mask: &MaskedGrid, count: usize, seed: u64) -> Vec<usize> {
    let guard = (ORIGIN_GUARD_FRACTION * domain.diameter()).max(mask.grid.h * 0.51);
    let mut eligible: Vec<usize> = mask
        .active_cells()
        .iter()
        .copied()
        .filter(|&idx| domain.distance_to_boundary(mask.center_of(idx)) > guard)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Partial Fisher-Yates: the first `count` slots become the sample.
    let take = count.min(eligible.len());
    for i in 0..take {
        let j = rng.random_range(i..eligible.len());
        eligible.swap(i, j);
    }
    eligible.truncate(take);
    eligible.sort_unstable();
    eligible
}

/// Samples the pointwise bound over interior points: for each sample `x`
/// the ratio `|u(x)| / (T|u|(x) + I|Eu|(x))` is recorded; a positive left
/// side against a vanishing right side is flagged as a violation.
#[allow(clippy::too_many_arguments)]
pub fn pointwise_report(
    trial: &TrialSpec,
    domain: &PolyDomain,
    mask: &MaskedGrid,
    disc: &BoundaryDiscretization,
    plan: &KernelPlan,
    n_theta: usize,
    n_samples: usize,
    seed: u64,
) -> Result<PointwiseReport, VerifyError> {
    let cells = sample_cells(domain, mask, n_samples, seed);
    pointwise_report_cells(trial, domain, mask, disc, plan, n_theta, &cells)
}

/// Pointwise report at prescribed locations, snapped to the nearest active
/// cell center. Points whose nearest cell is masked out are dropped, so
/// refinement studies can reuse one set of anchor points across grids.
#[allow(clippy::too_many_arguments)]
pub fn pointwise_report_at(
    trial: &TrialSpec,
    domain: &PolyDomain,
    mask: &MaskedGrid,
    disc: &BoundaryDiscretization,
    plan: &KernelPlan,
    n_theta: usize,
    points: &[Point2],
) -> Result<PointwiseReport, VerifyError> {
    let mut cells: Vec<usize> = points
        .iter()
        .map(|&p| mask.grid.nearest_cell(p))
        .filter(|&idx| mask.is_active(idx))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    pointwise_report_cells(trial, domain, mask, disc, plan, n_theta, &cells)
}

#[allow(clippy::too_many_arguments)]
fn pointwise_report_cells(
    trial: &TrialSpec,
    domain: &PolyDomain,
    mask: &MaskedGrid,
    disc: &BoundaryDiscretization,
    plan: &KernelPlan,
    n_theta: usize,
    cells: &[usize],
) -> Result<PointwiseReport, VerifyError> {
    trial.validate()?;
    let trace = trial.trace_magnitudes(disc);
    let e_mag = trial.sample_sym_grad_magnitude(mask);
    let riesz = if e_mag.max_abs() > 0.0 {
        Some(riesz_potential(&e_mag, plan)?)
    } else {
        None
    };
    let mut samples = Vec::with_capacity(cells.len());
    let mut sup: Option<f64> = None;
    let mut violations = 0usize;
    for &idx in cells {
        let x = mask.center_of(idx);
        let t_part = crate::potentials::boundary_potential(&trace, disc, domain, x, n_theta)?;
        let i_part = riesz.as_ref().map_or(0.0, |f| f.values[idx]);
        let lhs = trial.magnitude(x);
        let denom = t_part + i_part;
        let ratio = if denom > 0.0 {
            let r = lhs / denom;
            sup = Some(sup.map_or(r, |s: f64| s.max(r)));
            Some(r)
        } else {
            if lhs > 0.0 {
                violations += 1;
            }
            None
        };
        samples.push(PointwiseSample {
            x: [x.x, x.y],
            lhs,
            t_part,
            i_part,
            ratio,
        });
    }
    Ok(PointwiseReport {
        trial: trial.label(),
        samples,
        sup_ratio: sup,
        violations,
        grid_n: mask.grid.nx.max(mask.grid.ny),
        n_theta,
    })
}

// ---------------------------------------------------------------------------
// Rearrangement report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct RearrangementRow {
    pub s: f64,
    pub lhs: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RearrangementReport {
    pub trial: String,
    pub alpha: f64,
    pub c_dilation: f64,
    pub rows: Vec<RearrangementRow>,
    pub sup_ratio: Option<f64>,
    pub violations: usize,
    pub grid_n: usize,
}

/// Compares `|u|*_mu(c s)` with the kernel triple applied to the
/// rearrangements of `|Eu|` (cell Lebesgue) and of the trace (arclength)
/// on a log-spaced grid of `s`.
#[allow(clippy::too_many_arguments)]
pub fn rearrangement_report(
    trial: &TrialSpec,
    mask: &MaskedGrid,
    mu: &CellMeasure,
    alpha: f64,
    c_dilation: f64,
    disc: &BoundaryDiscretization,
    s_points: usize,
) -> Result<RearrangementReport, VerifyError> {
    trial.validate()?;
    if !(c_dilation > 0.0) {
        return Err(VerifyError::BadHypotheses(format!(
            "dilation constant must be positive, got {c_dilation}"
        )));
    }
    let u_prof = decreasing_rearrangement(&trial.sample_magnitude(mask).active_values(), mu)?;
    let lebesgue = mask.lebesgue_measure();
    let e_prof = decreasing_rearrangement(
        &trial.sample_sym_grad_magnitude(mask).active_values(),
        &lebesgue,
    )?;
    let arc = CellMeasure::new(disc.weights())?;
    let z_prof = decreasing_rearrangement(&trial.trace_magnitudes(disc), &arc)?;

    let total = mu.total().max(f64::MIN_POSITIVE);
    let grid = logspace(total * 1e-4, total / c_dilation * 2.0, s_points.max(2));
    let mut rows = Vec::with_capacity(grid.len());
    let mut sup: Option<f64> = None;
    let mut violations = 0usize;
    for &s in &grid {
        let lhs = u_prof.eval(c_dilation * s);
        let k1 = kernel_k1(&e_prof, s, alpha, DIM)?;
        let k2 = kernel_k2(&e_prof, s, alpha, DIM)?;
        let k3 = kernel_k3(&z_prof, s, alpha, DIM)?;
        let rhs = k1 + k2 + k3;
        let ratio = if rhs > 0.0 {
            let r = lhs / rhs;
            sup = Some(sup.map_or(r, |v: f64| v.max(r)));
            Some(r)
        } else {
            if lhs > 0.0 {
                violations += 1;
            }
            None
        };
        rows.push(RearrangementRow {
            s,
            lhs,
            k1,
            k2,
            k3,
            ratio,
        });
    }
    Ok(RearrangementReport {
        trial: trial.label(),
        alpha,
        c_dilation,
        rows,
        sup_ratio: sup,
        violations,
        grid_n: mask.grid.nx.max(mask.grid.ny),
    })
}

// ---------------------------------------------------------------------------
// Empirical-constant search
// ---------------------------------------------------------------------------

/// Axis-aligned parameter box for the derivative-free search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamBox {
    pub names: Vec<String>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ParamBox {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn validate(&self) -> Result<(), VerifyError> {
        let d = self.dim();
        if d == 0 || d > 6 || self.hi.len() != d || self.names.len() != d {
            return Err(VerifyError::BadBox(d));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub best_ratio: f64,
    pub best_params: Vec<f64>,
    pub evaluations: usize,
}

/// Coordinate search with shrinking steps, maximizing `objective` over the
/// box. Starts from the best of the supplied seed points (plus the box
/// center and one seeded random point), then sweeps one coordinate at a
/// time, halving the step whenever a full sweep fails to improve.
/// Deterministic given seed and budget.
pub fn constant_search(
    objective: impl Fn(&[f64]) -> Option<f64>,
    search_box: &ParamBox,
    init: &[Vec<f64>],
    budget: usize,
    seed: u64,
) -> Result<SearchResult, VerifyError> {
    search_box.validate()?;
    if budget == 0 {
        return Err(VerifyError::ZeroBudget);
    }
    let d = search_box.dim();
    let clamp = |x: &mut Vec<f64>| {
        for (k, v) in x.iter_mut().enumerate() {
            *v = v.clamp(search_box.lo[k], search_box.hi[k]);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evals = 0usize;
    let mut best_x: Option<Vec<f64>> = None;
    let mut best_v = f64::NEG_INFINITY;
    let try_point = |x: &Vec<f64>, evals: &mut usize| -> Option<f64> {
        if *evals >= budget {
            return None;
        }
        *evals += 1;
        objective(x)
    };

    let center: Vec<f64> = (0..d)
        .map(|k| 0.5 * (search_box.lo[k] + search_box.hi[k]))
        .collect();
    let jitter: Vec<f64> = (0..d)
        .map(|k| search_box.lo[k] + (search_box.hi[k] - search_box.lo[k]) * rng.random::<f64>())
        .collect();
    let mut seeds: Vec<Vec<f64>> = init.to_vec();
    seeds.push(center);
    seeds.push(jitter);
    for mut s in seeds {
        clamp(&mut s);
        if let Some(v) = try_point(&s, &mut evals) {
            if v > best_v {
                best_v = v;
                best_x = Some(s);
            }
        }
    }
    let mut x = best_x.unwrap_or_else(|| {
        (0..d)
            .map(|k| 0.5 * (search_box.lo[k] + search_box.hi[k]))
            .collect()
    });
    let mut step: Vec<f64> = (0..d)
        .map(|k| 0.25 * (search_box.hi[k] - search_box.lo[k]))
        .collect();
    while evals < budget && step.iter().any(|&s| s > 1e-6) {
        let mut improved = false;
        for k in 0..d {
            for sign in [1.0, -1.0] {
                let mut cand = x.clone();
                cand[k] += sign * step[k];
                clamp(&mut cand);
                if cand == x {
                    continue;
                }
                if let Some(v) = try_point(&cand, &mut evals) {
                    if v > best_v {
                        best_v = v;
                        x = cand;
                        improved = true;
                        break;
                    }
                }
            }
            if evals >= budget {
                break;
            }
        }
        if !improved {
            for s in step.iter_mut() {
                *s *= 0.5;
            }
        }
    }
    Ok(SearchResult {
        best_ratio: best_v,
        best_params: x,
        evaluations: evals,
    })
}

/// Parametric trial families for ratio maximization.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum TrialFamily {
    /// Rigid motions `b(angle)` of unit size; the ratio is flat in the
    /// scale by homogeneity.
    Rigid,
    /// Radial power fields: parameters `(gamma, cx, cy)`.
    RadialPower {
        gamma: [f64; 2],
        center_lo: [f64; 2],
        center_hi: [f64; 2],
    },
    /// Radial bumps: parameters `(radius, cx, cy)`.
    RadialBump {
        radius: [f64; 2],
        center_lo: [f64; 2],
        center_hi: [f64; 2],
    },
}

impl TrialFamily {
    pub fn label(&self) -> String {
        match self {
            TrialFamily::Rigid => "rigid".to_string(),
            TrialFamily::RadialPower { gamma, .. } => {
                format!("radial-power[{}..{}]", gamma[0], gamma[1])
            }
            TrialFamily::RadialBump { radius, .. } => {
                format!("radial-bump[{}..{}]", radius[0], radius[1])
            }
        }
    }

    pub fn param_box(&self) -> ParamBox {
        match self {
            TrialFamily::Rigid => ParamBox {
                names: vec!["angle".into()],
                lo: vec![0.0],
                hi: vec![std::f64::consts::TAU],
            },
            TrialFamily::RadialPower {
                gamma,
                center_lo,
                center_hi,
            } => ParamBox {
                names: vec!["gamma".into(), "cx".into(), "cy".into()],
                lo: vec![gamma[0], center_lo[0], center_lo[1]],
                hi: vec![gamma[1], center_hi[0], center_hi[1]],
            },
            TrialFamily::RadialBump {
                radius,
                center_lo,
                center_hi,
            } => ParamBox {
                names: vec!["radius".into(), "cx".into(), "cy".into()],
                lo: vec![radius[0], center_lo[0], center_lo[1]],
                hi: vec![radius[1], center_hi[0], center_hi[1]],
            },
        }
    }

    pub fn trial(&self, params: &[f64]) -> TrialSpec {
        match self {
            TrialFamily::Rigid => TrialSpec::Rigid {
                b: [params[0].cos(), params[0].sin()],
                omega: 0.0,
            },
            TrialFamily::RadialPower { .. } => TrialSpec::Radial {
                center: [params[1], params[2]],
                profile: crate::fields::RadialProfile::Power { gamma: params[0] },
                scale: 1.0,
            },
            TrialFamily::RadialBump { .. } => TrialSpec::Radial {
                center: [params[1], params[2]],
                profile: crate::fields::RadialProfile::Bump { radius: params[0] },
                scale: 1.0,
            },
        }
    }
}

/// Maximizes the inequality ratio over a trial family.
#[allow(clippy::too_many_arguments)]
pub fn search_trial_ratio(
    family: &TrialFamily,
    mask: &MaskedGrid,
    mu: &CellMeasure,
    disc: &BoundaryDiscretization,
    spec: &InequalitySpec,
    init: &[Vec<f64>],
    budget: usize,
    seed: u64,
) -> Result<SearchResult, VerifyError> {
    let objective = |params: &[f64]| -> Option<f64> {
        let trial = family.trial(params);
        sobolev_report(&trial, mask, mu, disc, spec)
            .ok()
            .and_then(|r| r.ratio)
    };
    constant_search(objective, &family.param_box(), init, budget, seed)
}
