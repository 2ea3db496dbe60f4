//! Vector fields on masked uniform grids, their symmetric gradients, and
//! the analytic trial-field catalog.
//!
//! Trial fields are closed-form objects: both the field and its symmetric
//! gradient have exact evaluators, so finite-difference error can always be
//! measured against an oracle instead of being estimated.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BoundaryDiscretization, Point2, PolyDomain};
use crate::rearrange::{CellMeasure, RearrangeError};

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid resolution must be at least 2, got {0}")]
    BadResolution(usize),
    #[error("field and mask sizes differ: {values} values for {cells} cells")]
    SizeMismatch { values: usize, cells: usize },
    #[error("trial parameters invalid: {0}")]
    BadTrial(String),
    #[error(transparent)]
    Rearrange(#[from] RearrangeError),
}

/// Uniform Cartesian lattice over a bounding rectangle. Cell `(i, j)` covers
/// `[origin + (i, j) h, origin + (i + 1, j + 1) h)` with center at
/// `origin + (i + 1/2, j + 1/2) h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub origin: Point2,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    /// Grid with `n` cells along the longer bounding-box side.
    pub fn from_domain(domain: &PolyDomain, n: usize) -> Result<Self, FieldError> {
        if n < 2 {
            return Err(FieldError::BadResolution(n));
        }
        let bbox = domain.bounding_box();
        let w = bbox.width();
        let ht = bbox.height();
        let h = w.max(ht) / n as f64;
        let nx = ((w / h) - 1e-9).ceil().max(1.0) as usize;
        let ny = ((ht / h) - 1e-9).ceil().max(1.0) as usize;
        Ok(Self {
            origin: bbox.min,
            h,
            nx,
            ny,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn center(&self, i: usize, j: usize) -> Point2 {
        Point2::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    /// Index of the cell whose center is nearest to `p` (clamped to range).
    pub fn nearest_cell(&self, p: Point2) -> usize {
        let fi = ((p.x - self.origin.x) / self.h - 0.5).round();
        let fj = ((p.y - self.origin.y) / self.h - 0.5).round();
        let i = fi.clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = fj.clamp(0.0, (self.ny - 1) as f64) as usize;
        self.index(i, j)
    }
}

/// Grid plus per-cell membership flags.
#[derive(Debug, Clone)]
pub struct MaskedGrid {
    pub grid: Grid,
    active: Vec<bool>,
    active_cells: Vec<usize>,
}

impl MaskedGrid {
    pub fn new(grid: Grid, active: Vec<bool>) -> Result<Self, FieldError> {
        if active.len() != grid.cell_count() {
            return Err(FieldError::SizeMismatch {
                values: active.len(),
                cells: grid.cell_count(),
            });
        }
        let active_cells = active
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| i)
            .collect();
        Ok(Self {
            grid,
            active,
            active_cells,
        })
    }

    /// Membership decided at cell centers, matching the midpoint quadrature
    /// used throughout: a cell cut by the boundary is in iff its center is.
    pub fn from_domain(domain: &PolyDomain, n: usize) -> Result<Self, FieldError> {
        let grid = Grid::from_domain(domain, n)?;
        let mut active = vec![false; grid.cell_count()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                active[grid.index(i, j)] = domain.contains(grid.center(i, j));
            }
        }
        Self::new(grid, active)
    }

    /// All cells active (plain rectangle).
    pub fn full(grid: Grid) -> Self {
        let active = vec![true; grid.cell_count()];
        Self::new(grid, active).expect("sizes match")
    }

    pub fn is_active(&self, idx: usize) -> bool {
        self.active[idx]
    }

    pub fn active_cells(&self) -> &[usize] {
        &self.active_cells
    }

    pub fn active_count(&self) -> usize {
        self.active_cells.len()
    }

    pub fn center_of(&self, idx: usize) -> Point2 {
        let (i, j) = self.grid.coords(idx);
        self.grid.center(i, j)
    }

    /// Lebesgue measure of the masked region: `h^2` per active cell.
    pub fn lebesgue_measure(&self) -> CellMeasure {
        CellMeasure::new(vec![self.grid.cell_area(); self.active_count()])
            .expect("nonnegative weights")
    }

    /// Weighted cell measure `density(center) * h^2`.
    pub fn density_measure(
        &self,
        density: impl Fn(Point2) -> f64,
    ) -> Result<CellMeasure, FieldError> {
        let a = self.grid.cell_area();
        let weights = self
            .active_cells
            .iter()
            .map(|&idx| density(self.center_of(idx)) * a)
            .collect();
        Ok(CellMeasure::new(weights)?)
    }
}

/// Scalar samples on the active cells of a masked grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub mask: MaskedGrid,
    /// Dense storage, length `nx * ny`; zero off the mask.
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn from_fn(mask: &MaskedGrid, f: impl Fn(Point2) -> f64) -> Self {
        let mut values = vec![0.0; mask.grid.cell_count()];
        for &idx in mask.active_cells() {
            values[idx] = f(mask.center_of(idx));
        }
        Self {
            mask: mask.clone(),
            values,
        }
    }

    /// Values on active cells, in cell order.
    pub fn active_values(&self) -> Vec<f64> {
        self.mask
            .active_cells()
            .iter()
            .map(|&i| self.values[i])
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.mask
            .active_cells()
            .iter()
            .map(|&i| self.values[i].abs())
            .fold(0.0, f64::max)
    }
}

/// Two-component vector samples on the active cells of a masked grid.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub mask: MaskedGrid,
    pub values: Vec<[f64; 2]>,
}

impl VectorField {
    pub fn from_fn(mask: &MaskedGrid, f: impl Fn(Point2) -> [f64; 2]) -> Self {
        let mut values = vec![[0.0; 2]; mask.grid.cell_count()];
        for &idx in mask.active_cells() {
            values[idx] = f(mask.center_of(idx));
        }
        Self {
            mask: mask.clone(),
            values,
        }
    }

    pub fn magnitude(&self) -> ScalarField {
        let mut values = vec![0.0; self.mask.grid.cell_count()];
        for &idx in self.mask.active_cells() {
            let [a, b] = self.values[idx];
            values[idx] = a.hypot(b);
        }
        ScalarField {
            mask: self.mask.clone(),
            values,
        }
    }
}

/// Symmetric 2x2 matrix stored as three independent entries, so the
/// symmetry `m12 = m21` holds at the storage level.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl SymTensor {
    pub fn frobenius(&self) -> f64 {
        (self.xx * self.xx + self.yy * self.yy + 2.0 * self.xy * self.xy).sqrt()
    }

    pub fn scale(self, c: f64) -> SymTensor {
        SymTensor {
            xx: c * self.xx,
            yy: c * self.yy,
            xy: c * self.xy,
        }
    }
}

impl std::ops::Add for SymTensor {
    type Output = SymTensor;
    fn add(self, o: SymTensor) -> SymTensor {
        SymTensor {
            xx: self.xx + o.xx,
            yy: self.yy + o.yy,
            xy: self.xy + o.xy,
        }
    }
}

impl std::ops::Sub for SymTensor {
    type Output = SymTensor;
    fn sub(self, o: SymTensor) -> SymTensor {
        self + o.scale(-1.0)
    }
}

/// Symmetric-gradient samples. The mask may be smaller than the source
/// field's mask: cells without a usable stencil are dropped and counted.
#[derive(Debug, Clone)]
pub struct SymTensorField {
    pub mask: MaskedGrid,
    pub values: Vec<SymTensor>,
    /// Active source cells that had no usable stencil in some direction.
    pub dropped: usize,
}

impl SymTensorField {
    pub fn frobenius_field(&self) -> ScalarField {
        let mut values = vec![0.0; self.mask.grid.cell_count()];
        for &idx in self.mask.active_cells() {
            values[idx] = self.values[idx].frobenius();
        }
        ScalarField {
            mask: self.mask.clone(),
            values,
        }
    }

    pub fn max_frobenius(&self) -> f64 {
        self.mask
            .active_cells()
            .iter()
            .map(|&i| self.values[i].frobenius())
            .fold(0.0, f64::max)
    }
}

/// One-dimensional derivative stencil: central where both neighbors are
/// active, second-order one-sided where one side is masked out, `None`
/// when neither applies.
fn directional_derivative(
    values: &[[f64; 2]],
    mask: &MaskedGrid,
    i: usize,
    j: usize,
    axis: usize,
    comp: usize,
) -> Option<f64> {
    let grid = &mask.grid;
    let (n_axis, stride) = if axis == 0 {
        (grid.nx, 1isize)
    } else {
        (grid.ny, grid.nx as isize)
    };
    let pos = if axis == 0 { i } else { j };
    let idx = grid.index(i, j) as isize;
    let at = |off: isize| -> Option<f64> {
        let k = idx + off * stride;
        let k = usize::try_from(k).ok()?;
        if k < mask.grid.cell_count() && mask.is_active(k) {
            Some(values[k][comp])
        } else {
            None
        }
    };
    let h = grid.h;
    let prev_ok = pos >= 1 && at(-1).is_some();
    let next_ok = pos + 1 < n_axis && at(1).is_some();
    if prev_ok && next_ok {
        return Some((at(1).unwrap() - at(-1).unwrap()) / (2.0 * h));
    }
    if next_ok && pos + 2 < n_axis {
        if let (Some(u1), Some(u2)) = (at(1), at(2)) {
            let u0 = values[idx as usize][comp];
            return Some((-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * h));
        }
    }
    if prev_ok && pos >= 2 {
        if let (Some(u1), Some(u2)) = (at(-1), at(-2)) {
            let u0 = values[idx as usize][comp];
            return Some((3.0 * u0 - 4.0 * u1 + u2) / (2.0 * h));
        }
    }
    None
}

/// Symmetric part of the finite-difference Jacobian, `(D + D^T) / 2`,
/// symmetrized exactly through shared storage of the off-diagonal entry.
/// Cells where a derivative cannot be formed are excluded from the output
/// mask and counted in `dropped`.
pub fn sym_gradient(u: &VectorField) -> SymTensorField {
    let grid = u.mask.grid;
    let mut out_active = vec![false; grid.cell_count()];
    let mut values = vec![SymTensor::default(); grid.cell_count()];
    let mut dropped = 0usize;
    for &idx in u.mask.active_cells() {
        let (i, j) = grid.coords(idx);
        let dx0 = directional_derivative(&u.values, &u.mask, i, j, 0, 0);
        let dy0 = directional_derivative(&u.values, &u.mask, i, j, 1, 0);
        let dx1 = directional_derivative(&u.values, &u.mask, i, j, 0, 1);
        let dy1 = directional_derivative(&u.values, &u.mask, i, j, 1, 1);
        match (dx0, dy0, dx1, dy1) {
            (Some(u1x), Some(u1y), Some(u2x), Some(u2y)) => {
                out_active[idx] = true;
                values[idx] = SymTensor {
                    xx: u1x,
                    yy: u2y,
                    xy: 0.5 * (u1y + u2x),
                };
            }
            _ => dropped += 1,
        }
    }
    let mask = MaskedGrid::new(grid, out_active).expect("sizes match");
    SymTensorField {
        mask,
        values,
        dropped,
    }
}

// ---------------------------------------------------------------------------
// Analytic trial fields
// ---------------------------------------------------------------------------

/// Radial profile `phi(r)` for fields of the form `phi(|x - c|) e_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialProfile {
    /// `phi(r) = r^gamma`, `gamma > 0`.
    Power { gamma: f64 },
    /// `phi(r) = min(cap, log(radius / r))` inside `radius`, `0` outside.
    TruncLog { cap: f64, radius: f64 },
    /// `phi(r) = t (1 - t^2)^2` with `t = r / radius`, supported on
    /// `r < radius`; vanishes at the center and at the support boundary.
    Bump { radius: f64 },
}

impl RadialProfile {
    fn validate(&self) -> Result<(), FieldError> {
        let ok = match *self {
            RadialProfile::Power { gamma } => gamma > 0.0 && gamma.is_finite(),
            RadialProfile::TruncLog { cap, radius } => cap > 0.0 && radius > 0.0,
            RadialProfile::Bump { radius } => radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(FieldError::BadTrial(format!("{self:?}")))
        }
    }

    fn phi(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Power { gamma } => r.powf(gamma),
            RadialProfile::TruncLog { cap, radius } => {
                if r >= radius {
                    0.0
                } else {
                    cap.min((radius / r).ln())
                }
            }
            RadialProfile::Bump { radius } => {
                let t = r / radius;
                if t >= 1.0 {
                    0.0
                } else {
                    let w = 1.0 - t * t;
                    t * w * w
                }
            }
        }
    }

    fn dphi(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Power { gamma } => gamma * r.powf(gamma - 1.0),
            RadialProfile::TruncLog { cap, radius } => {
                if r >= radius || r <= radius * (-cap).exp() {
                    0.0
                } else {
                    -1.0 / r
                }
            }
            RadialProfile::Bump { radius } => {
                let t = r / radius;
                if t >= 1.0 {
                    0.0
                } else {
                    let w = 1.0 - t * t;
                    (w * w - 4.0 * t * t * w) / radius
                }
            }
        }
    }
}

/// Catalog of analytic trial fields with exact symmetric gradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrialSpec {
    /// Rigid motion `b + omega (-y, x)`; the kernel of the symmetric
    /// gradient.
    Rigid { b: [f64; 2], omega: f64 },
    /// Linear field `A x`.
    Linear { a: [[f64; 2]; 2] },
    /// Radial field `scale * phi(|x - center|) (x - center) / |x - center|`.
    Radial {
        center: [f64; 2],
        profile: RadialProfile,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Pointwise sum of other trials.
    Sum { parts: Vec<TrialSpec> },
}

fn one() -> f64 {
    1.0
}

impl TrialSpec {
    pub fn validate(&self) -> Result<(), FieldError> {
        match self {
            TrialSpec::Rigid { b, omega } => {
                if b.iter().all(|v| v.is_finite()) && omega.is_finite() {
                    Ok(())
                } else {
                    Err(FieldError::BadTrial(
                        "rigid parameters must be finite".into(),
                    ))
                }
            }
            TrialSpec::Linear { a } => {
                if a.iter().flatten().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(FieldError::BadTrial("linear matrix must be finite".into()))
                }
            }
            TrialSpec::Radial {
                center,
                profile,
                scale,
            } => {
                if !center.iter().all(|v| v.is_finite()) || !scale.is_finite() {
                    return Err(FieldError::BadTrial(
                        "radial parameters must be finite".into(),
                    ));
                }
                profile.validate()
            }
            TrialSpec::Sum { parts } => {
                if parts.is_empty() {
                    return Err(FieldError::BadTrial("sum needs at least one part".into()));
                }
                parts.iter().try_for_each(|p| p.validate())
            }
        }
    }

    /// Closed-form field value.
    pub fn eval(&self, p: Point2) -> [f64; 2] {
        match self {
            TrialSpec::Rigid { b, omega } => [b[0] - omega * p.y, b[1] + omega * p.x],
            TrialSpec::Linear { a } => {
                [a[0][0] * p.x + a[0][1] * p.y, a[1][0] * p.x + a[1][1] * p.y]
            }
            TrialSpec::Radial {
                center,
                profile,
                scale,
            } => {
                let z = p - Point2::from(*center);
                let r = z.norm();
                if r == 0.0 {
                    // The radial direction is undefined at the center; the
                    // field is extended by zero there.
                    return [0.0, 0.0];
                }
                let f = scale * profile.phi(r) / r;
                [f * z.x, f * z.y]
            }
            TrialSpec::Sum { parts } => {
                let mut acc = [0.0; 2];
                for part in parts {
                    let v = part.eval(p);
                    acc[0] += v[0];
                    acc[1] += v[1];
                }
                acc
            }
        }
    }

    /// Closed-form symmetric gradient. For radial fields the eigenvalues
    /// are `phi'(r)` along the radial direction and `phi(r)/r` tangentially.
    pub fn sym_grad(&self, p: Point2) -> SymTensor {
        match self {
            TrialSpec::Rigid { .. } => SymTensor::default(),
            TrialSpec::Linear { a } => SymTensor {
                xx: a[0][0],
                yy: a[1][1],
                xy: 0.5 * (a[0][1] + a[1][0]),
            },
            TrialSpec::Radial {
                center,
                profile,
                scale,
            } => {
                let z = p - Point2::from(*center);
                let r = z.norm();
                if r == 0.0 {
                    return SymTensor::default();
                }
                let q = profile.phi(r) / r;
                let w = profile.dphi(r) - q;
                let (cx, cy) = (z.x / r, z.y / r);
                SymTensor {
                    xx: w * cx * cx + q,
                    yy: w * cy * cy + q,
                    xy: w * cx * cy,
                }
                .scale(*scale)
            }
            TrialSpec::Sum { parts } => parts
                .iter()
                .fold(SymTensor::default(), |acc, part| acc + part.sym_grad(p)),
        }
    }

    pub fn magnitude(&self, p: Point2) -> f64 {
        let [a, b] = self.eval(p);
        a.hypot(b)
    }

    /// Grid samples of the field.
    pub fn sample(&self, mask: &MaskedGrid) -> VectorField {
        VectorField::from_fn(mask, |p| self.eval(p))
    }

    /// Grid samples of `|u|`.
    pub fn sample_magnitude(&self, mask: &MaskedGrid) -> ScalarField {
        ScalarField::from_fn(mask, |p| self.magnitude(p))
    }

    /// Grid samples of the Frobenius magnitude of the closed-form
    /// symmetric gradient.
    pub fn sample_sym_grad_magnitude(&self, mask: &MaskedGrid) -> ScalarField {
        ScalarField::from_fn(mask, |p| self.sym_grad(p).frobenius())
    }

    /// Exact trace values at boundary nodes.
    pub fn boundary_trace(&self, disc: &BoundaryDiscretization) -> Vec<[f64; 2]> {
        disc.nodes.iter().map(|n| self.eval(n.point)).collect()
    }

    /// Exact `|u|` at boundary nodes.
    pub fn trace_magnitudes(&self, disc: &BoundaryDiscretization) -> Vec<f64> {
        disc.nodes.iter().map(|n| self.magnitude(n.point)).collect()
    }

    /// Scales the whole field by `c`.
    pub fn scaled(&self, c: f64) -> TrialSpec {
        match self {
            TrialSpec::Rigid { b, omega } => TrialSpec::Rigid {
                b: [c * b[0], c * b[1]],
                omega: c * omega,
            },
            TrialSpec::Linear { a } => TrialSpec::Linear {
                a: [[c * a[0][0], c * a[0][1]], [c * a[1][0], c * a[1][1]]],
            },
            TrialSpec::Radial {
                center,
                profile,
                scale,
            } => TrialSpec::Radial {
                center: *center,
                profile: *profile,
                scale: c * scale,
            },
            TrialSpec::Sum { parts } => TrialSpec::Sum {
                parts: parts.iter().map(|p| p.scaled(c)).collect(),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            TrialSpec::Rigid { b, omega } => format!("rigid[{};{};{}]", b[0], b[1], omega),
            TrialSpec::Linear { .. } => "linear".to_string(),
            TrialSpec::Radial { profile, .. } => match profile {
                RadialProfile::Power { gamma } => format!("radial-power({gamma})"),
                RadialProfile::TruncLog { cap, .. } => format!("radial-trunclog({cap})"),
                RadialProfile::Bump { radius } => format!("radial-bump({radius})"),
            },
            TrialSpec::Sum { parts } => {
                let inner: Vec<String> = parts.iter().map(|p| p.label()).collect();
                format!("sum({})", inner.join("+"))
            }
        }
    }
}

/// Trial field bundled with its grid samples: the closed-form evaluators
/// live on the spec, the samples make discretization error measurable.
#[derive(Debug, Clone)]
pub struct TrialField {
    pub spec: TrialSpec,
    pub u: VectorField,
    pub sym_grad_magnitude: ScalarField,
}

/// Builds the sampled trial field after validating the spec.
pub fn make_trial_field(spec: &TrialSpec, mask: &MaskedGrid) -> Result<TrialField, FieldError> {
    spec.validate()?;
    Ok(TrialField {
        spec: spec.clone(),
        u: spec.sample(mask),
        sym_grad_magnitude: spec.sample_sym_grad_magnitude(mask),
    })
}
