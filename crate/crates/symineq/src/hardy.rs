//! Exact step-function calculus for the three one-dimensional kernels of
//! the reduction principle, plus empirical-constant sweeps.
//!
//! For a non-increasing step function `phi` the kernels are
//!
//! - `K1(s) = s^{-(n-1)/alpha} int_0^{s^{n/alpha}} phi(r) dr`
//! - `K2(s) = int_{s^{n/alpha}}^inf r^{-(n-1)/n} phi(r) dr`
//! - `K3(s) = s^{-(n-1)/alpha} int_0^{s^{(n-1)/alpha}} phi(r) dr`
//!
//! and all integrals are evaluated in closed form, so the only error left
//! in a constant sweep comes from sampling the kernel output.
//!
//! `K1 + K2` is non-increasing in `s` (the boundary terms of the two
//! derivatives cancel exactly), and `K3` is non-increasing whenever `phi`
//! is; the sweeps verify both facts on their scan grids.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::norms::{eval_norm, NormError, NormSpec};
use crate::numeric::logspace;
use crate::rearrange::{decreasing_rearrangement, CellMeasure, DecreasingProfile, RearrangeError};

#[derive(Debug, Error)]
pub enum HardyError {
    #[error("kernel coordinate must be positive, got {0}")]
    NonPositiveCoordinate(f64),
    #[error("exponent pair (alpha, n) = ({alpha}, {n}) must satisfy n >= 2, n - 1 < alpha <= n")]
    BadExponents { alpha: f64, n: f64 },
    #[error("sweep family is empty")]
    EmptyFamily,
    #[error("step family parameters invalid: {0}")]
    BadFamily(String),
    #[error("target norm needs an explicit limit for this sweep")]
    MissingLimit,
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Rearrange(#[from] RearrangeError),
}

fn check_exponents(alpha: f64, n: f64) -> Result<(), HardyError> {
    if n >= 2.0 && alpha > n - 1.0 && alpha <= n {
        Ok(())
    } else {
        Err(HardyError::BadExponents { alpha, n })
    }
}

/// `s^{-(n-1)/alpha} int_0^{s^{n/alpha}} phi`, exact.
pub fn kernel_k1(phi: &DecreasingProfile, s: f64, alpha: f64, n: f64) -> Result<f64, HardyError> {
    check_exponents(alpha, n)?;
    if !(s > 0.0) {
        return Err(HardyError::NonPositiveCoordinate(s));
    }
    let cut = s.powf(n / alpha);
    Ok(s.powf(-(n - 1.0) / alpha) * phi.integral_to(cut))
}

/// `int_{s^{n/alpha}}^inf r^{-(n-1)/n} phi(r) dr`, exact per step.
pub fn kernel_k2(phi: &DecreasingProfile, s: f64, alpha: f64, n: f64) -> Result<f64, HardyError> {
    check_exponents(alpha, n)?;
    if !(s > 0.0) {
        return Err(HardyError::NonPositiveCoordinate(s));
    }
    let cut = s.powf(n / alpha);
    let beta = (n - 1.0) / n;
    let e = 1.0 - beta;
    let mut acc = 0.0;
    let mut prev = 0.0f64;
    for (&b, &v) in phi.breakpoints().iter().zip(phi.levels()) {
        if b > cut {
            let lo = prev.max(cut);
            acc += v * (b.powf(e) - lo.powf(e)) / e;
        }
        prev = b;
    }
    Ok(acc)
}

/// `s^{-(n-1)/alpha} int_0^{s^{(n-1)/alpha}} phi`, exact.
pub fn kernel_k3(phi: &DecreasingProfile, s: f64, alpha: f64, n: f64) -> Result<f64, HardyError> {
    check_exponents(alpha, n)?;
    if !(s > 0.0) {
        return Err(HardyError::NonPositiveCoordinate(s));
    }
    let cut = s.powf((n - 1.0) / alpha);
    Ok(s.powf(-(n - 1.0) / alpha) * phi.integral_to(cut))
}

/// Which kernel a sweep exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelId {
    K1,
    K2,
    K3,
}

pub fn kernel_eval(
    id: KernelId,
    phi: &DecreasingProfile,
    s: f64,
    alpha: f64,
    n: f64,
) -> Result<f64, HardyError> {
    match id {
        KernelId::K1 => kernel_k1(phi, s, alpha, n),
        KernelId::K2 => kernel_k2(phi, s, alpha, n),
        KernelId::K3 => kernel_k3(phi, s, alpha, n),
    }
}

// ---------------------------------------------------------------------------
// Trial families of non-increasing step functions
// ---------------------------------------------------------------------------

/// Tagged catalog of non-increasing, compactly supported trial functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepFamily {
    /// `chi_(0, a)`.
    Characteristic { a: f64 },
    /// Step discretization of `r^{-gamma} chi_(0, cut)`.
    Power { gamma: f64, cut: f64, steps: usize },
    /// Step discretization of `r^{-gamma} (1 + log(cut/r))^delta chi_(0, cut)`.
    PowerLog {
        gamma: f64,
        delta: f64,
        cut: f64,
        steps: usize,
    },
}

impl StepFamily {
    pub fn label(&self) -> String {
        match *self {
            StepFamily::Characteristic { a } => format!("chi({a})"),
            StepFamily::Power { gamma, cut, steps } => format!("pow({gamma};{cut};{steps})"),
            StepFamily::PowerLog {
                gamma,
                delta,
                cut,
                steps,
            } => {
                format!("powlog({gamma};{delta};{cut};{steps})")
            }
        }
    }

    /// Discretizes the member to a non-increasing compactly supported step
    /// function. Continuous shapes are sampled at geometric midpoints of a
    /// geometric grid, with a running minimum enforcing monotonicity.
    pub fn build(&self) -> Result<DecreasingProfile, HardyError> {
        match *self {
            StepFamily::Characteristic { a } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(HardyError::BadFamily(format!("{self:?}")));
                }
                Ok(DecreasingProfile::from_steps(vec![a], vec![1.0])?)
            }
            StepFamily::Power { gamma, cut, steps } => {
                Self::discretize(self, cut, steps, |r| r.powf(-gamma), gamma > 0.0)
            }
            StepFamily::PowerLog {
                gamma,
                delta,
                cut,
                steps,
            } => Self::discretize(
                self,
                cut,
                steps,
                |r| r.powf(-gamma) * (1.0 + (cut / r).ln()).powf(delta),
                gamma > 0.0,
            ),
        }
    }

    fn discretize(
        spec: &StepFamily,
        cut: f64,
        steps: usize,
        f: impl Fn(f64) -> f64,
        params_ok: bool,
    ) -> Result<DecreasingProfile, HardyError> {
        if !params_ok || !(cut > 0.0 && cut.is_finite()) || steps == 0 || steps > 1000 {
            return Err(HardyError::BadFamily(format!("{spec:?}")));
        }
        let r_lo = cut * 1e-6;
        let grid = logspace(r_lo, cut, steps);
        let mut breakpoints = Vec::with_capacity(steps);
        let mut levels = Vec::with_capacity(steps);
        let mut level = f(r_lo * 0.5);
        breakpoints.push(grid[0]);
        levels.push(level);
        for w in grid.windows(2) {
            let mid = (w[0] * w[1]).sqrt();
            level = level.min(f(mid));
            breakpoints.push(w[1]);
            levels.push(level);
        }
        Ok(DecreasingProfile::from_steps(breakpoints, levels)?)
    }
}

/// Builds every member of a catalog.
pub fn monotone_family(members: &[StepFamily]) -> Result<Vec<DecreasingProfile>, HardyError> {
    members.iter().map(|m| m.build()).collect()
}

/// Interleaved default catalog of the given size. Prefixes are nested, so
/// enriching the family can only raise a sweep's sup ratio.
pub fn default_catalog(count: usize) -> Vec<StepFamily> {
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    while out.len() < count {
        let idx = (k / 3) as f64;
        match k % 3 {
            0 => out.push(StepFamily::Characteristic {
                a: 0.02 * 1.7f64.powf(idx),
            }),
            1 => out.push(StepFamily::Power {
                gamma: 0.05 + 0.06 * (idx % 10.0),
                cut: 0.5 * 1.5f64.powf(idx % 7.0),
                steps: 400,
            }),
            _ => out.push(StepFamily::PowerLog {
                gamma: 0.05 + 0.05 * (idx % 9.0),
                delta: 0.25 + 0.25 * (idx % 6.0),
                cut: 1.0,
                steps: 400,
            }),
        }
        k += 1;
    }
    out
}

/// Catalog variant with every member truncated to support in `(0, cut)`,
/// for localized sweeps.
pub fn default_catalog_with_cut(count: usize, cut: f64) -> Vec<StepFamily> {
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    while out.len() < count {
        let idx = (k / 3) as f64;
        match k % 3 {
            0 => out.push(StepFamily::Characteristic {
                a: cut * (0.02 * 1.35f64.powf(idx % 12.0)).min(1.0),
            }),
            1 => out.push(StepFamily::Power {
                gamma: 0.05 + 0.06 * (idx % 10.0),
                cut,
                steps: 400,
            }),
            _ => out.push(StepFamily::PowerLog {
                gamma: 0.05 + 0.05 * (idx % 9.0),
                delta: 0.25 + 0.25 * (idx % 6.0),
                cut,
                steps: 400,
            }),
        }
        k += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Empirical-constant sweeps
// ---------------------------------------------------------------------------

/// One kernel-boundedness sweep: ratios `||K phi||_target / ||phi||_source`
/// over a family of non-increasing trial functions. The family sup is an
/// empirical lower bound for the best constant of the corresponding
/// one-dimensional inequality; no upper bound is claimed.
#[derive(Debug, Clone)]
pub struct HardySweep {
    pub kernel: KernelId,
    pub alpha: f64,
    pub n: f64,
    pub source: NormSpec,
    pub target: NormSpec,
    /// Localized variant: the target norm is evaluated over `(0, limit)`.
    pub target_limit: Option<f64>,
    pub family: Vec<DecreasingProfile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepMember {
    pub source_norm: f64,
    pub target_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub members: Vec<SweepMember>,
    pub sup_ratio: f64,
}

/// Points per decade in the kernel-output sampling grid.
const SCAN_PER_DECADE: usize = 64;

/// Scan grid for a kernel output: the images of the trial's breakpoints
/// under the cut map, refined by a log-spaced grid.
fn scan_grid(
    kernel: KernelId,
    phi: &DecreasingProfile,
    alpha: f64,
    n: f64,
    limit: Option<f64>,
) -> Vec<f64> {
    let inv = match kernel {
        KernelId::K1 | KernelId::K2 => alpha / n,
        KernelId::K3 => alpha / (n - 1.0),
    };
    let mut pts: Vec<f64> = phi.breakpoints().iter().map(|b| b.powf(inv)).collect();
    let lead = pts.first().copied().unwrap_or(1.0);
    let last = pts.last().copied().unwrap_or(1.0);
    let lo = (lead * 1e-6).min(limit.unwrap_or(f64::INFINITY) * 1e-8);
    let hi = limit.unwrap_or(last * 1e4);
    let decades = (hi / lo).log10().max(1.0);
    pts.extend(logspace(
        lo,
        hi,
        (decades * SCAN_PER_DECADE as f64).ceil() as usize + 1,
    ));
    pts.retain(|&s| s > 0.0 && s <= hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

/// Runs the sweep: for each trial, the kernel output is sampled on the scan
/// grid, rearranged, and measured in the target norm over `(0, limit)`.
pub fn reduction_sweep(sweep: &HardySweep) -> Result<SweepReport, HardyError> {
    if sweep.family.is_empty() {
        return Err(HardyError::EmptyFamily);
    }
    check_exponents(sweep.alpha, sweep.n)?;
    sweep.source.validate()?;
    sweep.target.validate()?;
    if matches!(
        sweep.target,
        NormSpec::LorentzZygmund { .. } | NormSpec::ExpEquiv { .. }
    ) && sweep.target_limit.is_none()
    {
        return Err(HardyError::MissingLimit);
    }
    let mut members = Vec::with_capacity(sweep.family.len());
    let mut sup_ratio = 0.0f64;
    for phi in &sweep.family {
        let source_norm = eval_norm(&sweep.source, phi, phi.total_mass().max(f64::MIN_POSITIVE))?;
        let target_norm = if phi.is_zero() {
            0.0
        } else {
            let grid = scan_grid(sweep.kernel, phi, sweep.alpha, sweep.n, sweep.target_limit);
            let mut values = Vec::with_capacity(grid.len().saturating_sub(1));
            let mut weights = Vec::with_capacity(values.capacity());
            for w in grid.windows(2) {
                let mid = (w[0] * w[1]).sqrt();
                values.push(kernel_eval(sweep.kernel, phi, mid, sweep.alpha, sweep.n)?);
                weights.push(w[1] - w[0]);
            }
            let measure = CellMeasure::new(weights)?;
            let profile = decreasing_rearrangement(&values, &measure)?;
            let mass = sweep
                .target_limit
                .unwrap_or_else(|| profile.total_mass().max(1.0));
            eval_norm(&sweep.target, &profile, mass)?
        };
        let ratio = if target_norm == 0.0 && source_norm == 0.0 {
            0.0
        } else {
            target_norm / source_norm
        };
        sup_ratio = sup_ratio.max(ratio);
        members.push(SweepMember {
            source_norm,
            target_norm,
            ratio,
        });
    }
    Ok(SweepReport { members, sup_ratio })
}
