//! The two potential operators behind the pointwise bound: the Riesz
//! potential of order one applied to grid data, and the boundary potential
//! that averages trace values at the first visible boundary point over all
//! directions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fft::{fft2, Complex};
use crate::fields::{MaskedGrid, ScalarField, TrialSpec};
use crate::geometry::{BoundaryDiscretization, GeometryError, Point2, PolyDomain};
use crate::numeric::{adaptive_simpson, KahanSum};

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("input field has no active cells")]
    EmptyMask,
    #[error("angular resolution must be at least 16, got {0}")]
    BadAngularResolution(usize),
    #[error("boundary values have length {got}, expected {want}")]
    BoundaryLengthMismatch { got: usize, want: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Evaluation strategy for the Riesz potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialMethod {
    /// Quadratic-cost summation over cell pairs; the reference path.
    Direct,
    /// Circular convolution on the zero-padded bounding grid; must agree
    /// with the direct path to within 1e-10 relative.
    #[default]
    Fft,
}

/// Self-cell correction: the integral of `1/|z|` over the unit square
/// centered at the origin, in closed form.
pub const SELF_CELL_CLOSED_FORM: f64 = 3.5254943480781717; // 4 ln(1 + sqrt 2)

/// Kernel plan for the Riesz potential: method plus the singular-cell
/// correction constant, recomputed by quadrature at construction and
/// cross-checked against the closed form.
#[derive(Debug, Clone, Copy)]
pub struct KernelPlan {
    pub method: PotentialMethod,
    pub self_cell: f64,
}

impl KernelPlan {
    pub fn new(method: PotentialMethod) -> Self {
        // Reduce the square integral to one polar angle octant:
        // int_{[-1/2,1/2]^2} dz/|z| = 4 int_0^{pi/4} sec(t) dt.
        let self_cell =
            4.0 * adaptive_simpson(|t| 1.0 / t.cos(), 0.0, std::f64::consts::FRAC_PI_4, 1e-14);
        assert!(
            (self_cell - SELF_CELL_CLOSED_FORM).abs() < 1e-12,
            "self-cell quadrature drifted from the closed form"
        );
        Self { method, self_cell }
    }
}

impl Default for KernelPlan {
    fn default() -> Self {
        Self::new(PotentialMethod::default())
    }
}

fn kernel_weight(h: f64, di: isize, dj: isize, self_cell: f64) -> f64 {
    if di == 0 && dj == 0 {
        h * self_cell
    } else {
        let d = ((di * di + dj * dj) as f64).sqrt();
        h / d
    }
}

/// Riesz potential of order one on the mask:
/// `(I f)(x) = sum_{y != x} f(y) h^2 / |x - y| + f(x) h c0`,
/// with `c0` the self-cell correction. Both methods evaluate exactly this
/// sum; the FFT path computes it by padded circular convolution.
pub fn riesz_potential(f: &ScalarField, plan: &KernelPlan) -> Result<ScalarField, PotentialError> {
    if f.mask.active_count() == 0 {
        return Err(PotentialError::EmptyMask);
    }
    match plan.method {
        PotentialMethod::Direct => Ok(riesz_direct(f, plan)),
        PotentialMethod::Fft => Ok(riesz_fft(f, plan)),
    }
}

fn riesz_direct(f: &ScalarField, plan: &KernelPlan) -> ScalarField {
    let grid = f.mask.grid;
    let h = grid.h;
    let mut out = vec![0.0; grid.cell_count()];
    let sources: Vec<(usize, usize, f64)> = f
        .mask
        .active_cells()
        .iter()
        .map(|&idx| {
            let (i, j) = grid.coords(idx);
            (i, j, f.values[idx])
        })
        .collect();
    for &target in f.mask.active_cells() {
        let (ti, tj) = grid.coords(target);
        let mut acc = KahanSum::new();
        for &(si, sj, v) in &sources {
            let di = ti as isize - si as isize;
            let dj = tj as isize - sj as isize;
            acc.add(v * kernel_weight(h, di, dj, plan.self_cell));
        }
        out[target] = acc.value();
    }
    ScalarField {
        mask: f.mask.clone(),
        values: out,
    }
}

fn riesz_fft(f: &ScalarField, plan: &KernelPlan) -> ScalarField {
    let grid = f.mask.grid;
    let h = grid.h;
    let mx = (2 * grid.nx).next_power_of_two();
    let my = (2 * grid.ny).next_power_of_two();
    let mut data = vec![Complex::default(); mx * my];
    for &idx in f.mask.active_cells() {
        let (i, j) = grid.coords(idx);
        data[j * mx + i] = Complex::new(f.values[idx], 0.0);
    }
    let mut kernel = vec![Complex::default(); mx * my];
    for ky in 0..my {
        let dj = if ky <= my / 2 {
            ky as isize
        } else {
            ky as isize - my as isize
        };
        for kx in 0..mx {
            let di = if kx <= mx / 2 {
                kx as isize
            } else {
                kx as isize - mx as isize
            };
            kernel[ky * mx + kx] = Complex::new(kernel_weight(h, di, dj, plan.self_cell), 0.0);
        }
    }
    fft2(&mut data, mx, my, false);
    fft2(&mut kernel, mx, my, false);
    for (d, k) in data.iter_mut().zip(&kernel) {
        let re = d.re * k.re - d.im * k.im;
        let im = d.re * k.im + d.im * k.re;
        *d = Complex::new(re, im);
    }
    fft2(&mut data, mx, my, true);
    let mut out = vec![0.0; grid.cell_count()];
    for &idx in f.mask.active_cells() {
        let (i, j) = grid.coords(idx);
        out[idx] = data[j * mx + i].re;
    }
    ScalarField {
        mask: f.mask.clone(),
        values: out,
    }
}

/// Riesz potential evaluated at a single cell center by direct summation.
pub fn riesz_at_cell(f: &ScalarField, plan: &KernelPlan, cell: usize) -> f64 {
    let grid = f.mask.grid;
    let h = grid.h;
    let (ti, tj) = grid.coords(cell);
    let mut acc = KahanSum::new();
    for &idx in f.mask.active_cells() {
        let (si, sj) = grid.coords(idx);
        acc.add(
            f.values[idx]
                * kernel_weight(
                    h,
                    ti as isize - si as isize,
                    tj as isize - sj as isize,
                    plan.self_cell,
                ),
        );
    }
    acc.value()
}

/// Boundary potential: the average over directions of `|g|` at the first
/// visible boundary point,
/// `(T g)(x) = (2 pi / n) sum_j |g(zeta(x, theta_j))|`,
/// with midpoint angles `theta_j = 2 pi (j + 1/2) / n` and `g` interpolated
/// linearly along the hit edge from nodal values.
pub fn boundary_potential(
    g: &[f64],
    disc: &BoundaryDiscretization,
    domain: &PolyDomain,
    x: Point2,
    n_theta: usize,
) -> Result<f64, PotentialError> {
    if n_theta < 16 {
        return Err(PotentialError::BadAngularResolution(n_theta));
    }
    if g.len() != disc.len() {
        return Err(PotentialError::BoundaryLengthMismatch {
            got: g.len(),
            want: disc.len(),
        });
    }
    let mut acc = KahanSum::new();
    for j in 0..n_theta {
        let ang = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_theta as f64;
        let hit = domain.ray_first_hit(x, Point2::new(ang.cos(), ang.sin()))?;
        let value = disc.interpolate(hit.ring, hit.edge, hit.edge_param, g);
        acc.add(value.abs());
    }
    Ok(acc.value() * 2.0 * std::f64::consts::PI / n_theta as f64)
}

/// Both summands of the pointwise bound at `x`, separately:
/// the boundary-trace potential `T|u|(x)` and the Riesz part
/// `I|Eu|(x)`, with the symmetric-gradient magnitude taken from the
/// closed form on the mask.
pub fn pointwise_rhs(
    trial: &TrialSpec,
    domain: &PolyDomain,
    mask: &MaskedGrid,
    disc: &BoundaryDiscretization,
    x: Point2,
    plan: &KernelPlan,
    n_theta: usize,
) -> Result<(f64, f64), PotentialError> {
    let trace = trial.trace_magnitudes(disc);
    let t_part = boundary_potential(&trace, disc, domain, x, n_theta)?;
    let e_mag = trial.sample_sym_grad_magnitude(mask);
    if e_mag.mask.active_count() == 0 {
        return Err(PotentialError::EmptyMask);
    }
    let cell = mask.grid.nearest_cell(x);
    let i_part = match plan.method {
        PotentialMethod::Direct => riesz_at_cell(&e_mag, plan, cell),
        PotentialMethod::Fft => {
            let field = riesz_potential(&e_mag, plan)?;
            field.values[cell]
        }
    };
    Ok((t_part, i_part))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{MaskedGrid, RadialProfile, ScalarField};
    use crate::geometry::PolyDomain;

    fn disk_field(n: usize, radius: f64) -> ScalarField {
        // Indicator of a disk centered in [-1, 1]^2.
        let domain = PolyDomain::new(vec![vec![
            Point2::new(-1.0, -1.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
            Point2::new(-1.0, 1.0),
        ]])
        .unwrap();
        let mask = MaskedGrid::from_domain(&domain, n).unwrap();
        ScalarField::from_fn(&mask, |p| if p.norm() < radius { 1.0 } else { 0.0 })
    }

    #[test]
    fn self_cell_constant_matches_closed_form() {
        let plan = KernelPlan::new(PotentialMethod::Direct);
        assert!((plan.self_cell - 4.0 * (1.0 + 2.0f64.sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let f = disk_field(32, 0.5);
        let zero = ScalarField {
            mask: f.mask.clone(),
            values: vec![0.0; f.values.len()],
        };
        let plan = KernelPlan::new(PotentialMethod::Fft);
        let out = riesz_potential(&zero, &plan).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn disk_indicator_center_value() {
        // The order-one potential of a disk indicator at its center equals
        // the perimeter length 2 pi R.
        let radius = 0.75;
        let f = disk_field(256, radius);
        let plan = KernelPlan::new(PotentialMethod::Direct);
        let center = f.mask.grid.nearest_cell(Point2::new(0.0, 0.0));
        let got = riesz_at_cell(&f, &plan, center);
        let want = 2.0 * std::f64::consts::PI * radius;
        assert!(
            (got - want).abs() < 0.01 * want,
            "center value {got} vs {want}"
        );
    }

    #[test]
    fn fft_matches_direct_on_random_data() {
        let n = 48;
        let domain = PolyDomain::l_shape();
        let mask = MaskedGrid::from_domain(&domain, n).unwrap();
        let f = ScalarField::from_fn(&mask, |p| {
            let bits = (p.x * 1e6) as u64 ^ ((p.y * 1e6) as u64).rotate_left(21);
            let mut z = bits.wrapping_mul(0x9e3779b97f4a7c15);
            z ^= z >> 29;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        });
        let direct = riesz_potential(&f, &KernelPlan::new(PotentialMethod::Direct)).unwrap();
        let fast = riesz_potential(&f, &KernelPlan::new(PotentialMethod::Fft)).unwrap();
        let scale = direct.max_abs();
        let mut worst = 0.0f64;
        for &idx in mask.active_cells() {
            worst = worst.max((direct.values[idx] - fast.values[idx]).abs());
        }
        assert!(worst / scale < 1e-10, "fft/direct gap {}", worst / scale);
    }

    #[test]
    fn direct_kernel_is_translation_covariant() {
        let grid = crate::fields::Grid {
            origin: Point2::new(0.0, 0.0),
            h: 0.1,
            nx: 12,
            ny: 12,
        };
        let mask = MaskedGrid::full(grid);
        let mut values = vec![0.0; grid.cell_count()];
        values[grid.index(3, 4)] = 1.0;
        values[grid.index(5, 7)] = -0.5;
        let f = ScalarField {
            mask: mask.clone(),
            values: values.clone(),
        };
        let mut shifted = vec![0.0; grid.cell_count()];
        for j in 0..grid.ny {
            for i in 0..grid.nx - 1 {
                shifted[grid.index(i + 1, j)] = values[grid.index(i, j)];
            }
        }
        let g = ScalarField {
            mask: mask.clone(),
            values: shifted,
        };
        let plan = KernelPlan::new(PotentialMethod::Direct);
        let pf = riesz_potential(&f, &plan).unwrap();
        let pg = riesz_potential(&g, &plan).unwrap();
        for j in 0..grid.ny {
            for i in 0..grid.nx - 1 {
                let a = pf.values[grid.index(i, j)];
                let b = pg.values[grid.index(i + 1, j)];
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn positivity_and_linearity() {
        let f = disk_field(24, 0.6);
        let plan = KernelPlan::new(PotentialMethod::Direct);
        let out = riesz_potential(&f, &plan).unwrap();
        for &idx in f.mask.active_cells() {
            assert!(out.values[idx] >= 0.0);
        }
        let doubled = ScalarField {
            mask: f.mask.clone(),
            values: f.values.iter().map(|v| 2.0 * v).collect(),
        };
        let out2 = riesz_potential(&doubled, &plan).unwrap();
        for &idx in f.mask.active_cells() {
            assert!((out2.values[idx] - 2.0 * out.values[idx]).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_potential_of_one_is_two_pi() {
        for domain in [
            PolyDomain::unit_square(),
            PolyDomain::l_shape(),
            PolyDomain::star(5, 0.48, 0.19).unwrap(),
        ] {
            let disc = domain.boundary_discretize(0.02).unwrap();
            let ones = vec![1.0; disc.len()];
            let anchor = Point2::new(0.5, 0.4);
            let x = if domain.contains(anchor) {
                anchor
            } else {
                Point2::new(0.5, 0.55)
            };
            let got = boundary_potential(&ones, &disc, &domain, x, 256).unwrap();
            let want = 2.0 * std::f64::consts::PI;
            assert!((got - want).abs() < 0.005 * want, "got {got}");
        }
    }

    #[test]
    fn boundary_potential_of_zero_is_zero() {
        let domain = PolyDomain::unit_square();
        let disc = domain.boundary_discretize(0.1).unwrap();
        let zeros = vec![0.0; disc.len()];
        let got = boundary_potential(&zeros, &disc, &domain, Point2::new(0.4, 0.6), 64).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn right_edge_indicator_subtends_quarter_circle() {
        let domain = PolyDomain::unit_square();
        let disc = domain.boundary_discretize(0.01).unwrap();
        // Ring 0 edge 1 runs from (1,0) to (1,1).
        let g: Vec<f64> = disc
            .nodes
            .iter()
            .map(|n| if n.ring == 0 && n.edge == 1 { 1.0 } else { 0.0 })
            .collect();
        let got = boundary_potential(&g, &disc, &domain, Point2::new(0.5, 0.5), 256).unwrap();
        let want = std::f64::consts::FRAC_PI_2;
        assert!((got - want).abs() < 0.005 * want, "angle {got} vs {want}");
    }

    #[test]
    fn angular_refinement_is_stable() {
        let domain = PolyDomain::star(5, 0.48, 0.19).unwrap();
        let disc = domain.boundary_discretize(0.01).unwrap();
        let g: Vec<f64> = disc.nodes.iter().map(|n| 1.0 + n.point.x).collect();
        let x = Point2::new(0.5, 0.5);
        let coarse = boundary_potential(&g, &disc, &domain, x, 256).unwrap();
        let fine = boundary_potential(&g, &disc, &domain, x, 512).unwrap();
        assert!((coarse - fine).abs() < 0.01 * fine.abs());
    }

    #[test]
    fn pointwise_rhs_for_rigid_field() {
        let domain = PolyDomain::unit_square();
        let mask = MaskedGrid::from_domain(&domain, 32).unwrap();
        let disc = domain.boundary_discretize(0.02).unwrap();
        let spec = crate::fields::TrialSpec::Rigid {
            b: [3.0, 4.0],
            omega: 0.0,
        };
        let plan = KernelPlan::new(PotentialMethod::Direct);
        let (t, i) = pointwise_rhs(
            &spec,
            &domain,
            &mask,
            &disc,
            Point2::new(0.5, 0.5),
            &plan,
            128,
        )
        .unwrap();
        assert_eq!(i, 0.0);
        let want = 2.0 * std::f64::consts::PI * 5.0;
        assert!((t - want).abs() < 1e-9 * want);
    }

    #[test]
    fn pointwise_rhs_vanishing_trace() {
        let domain = PolyDomain::unit_square();
        let mask = MaskedGrid::from_domain(&domain, 32).unwrap();
        let disc = domain.boundary_discretize(0.02).unwrap();
        let spec = crate::fields::TrialSpec::Radial {
            center: [0.5, 0.5],
            profile: RadialProfile::Bump { radius: 0.3 },
            scale: 1.0,
        };
        let plan = KernelPlan::new(PotentialMethod::Direct);
        let (t, i) = pointwise_rhs(
            &spec,
            &domain,
            &mask,
            &disc,
            Point2::new(0.4, 0.45),
            &plan,
            64,
        )
        .unwrap();
        assert_eq!(t, 0.0);
        assert!(i > 0.0);
    }

    #[test]
    fn pointwise_rhs_linear_field_matches_indicator_potential() {
        // For u = x the symmetric gradient is the identity, so |Eu| is the
        // constant sqrt(2) and the Riesz part equals sqrt(2) times the
        // potential of the mask indicator.
        let domain = PolyDomain::unit_square();
        let mask = MaskedGrid::from_domain(&domain, 64).unwrap();
        let disc = domain.boundary_discretize(0.02).unwrap();
        let spec = crate::fields::TrialSpec::Linear {
            a: [[1.0, 0.0], [0.0, 1.0]],
        };
        let plan = KernelPlan::new(PotentialMethod::Direct);
        let x = Point2::new(0.5, 0.5);
        let (_, i_part) = pointwise_rhs(&spec, &domain, &mask, &disc, x, &plan, 64).unwrap();
        let ones = ScalarField::from_fn(&mask, |_| 1.0);
        let cell = mask.grid.nearest_cell(x);
        let oracle = 2.0f64.sqrt() * riesz_at_cell(&ones, &plan, cell);
        assert!(
            (i_part - oracle).abs() < 1e-12 * oracle,
            "{i_part} vs {oracle}"
        );
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let domain = PolyDomain::unit_square();
        let disc = domain.boundary_discretize(0.25).unwrap();
        let g = vec![1.0; disc.len()];
        assert!(matches!(
            boundary_potential(&g, &disc, &domain, Point2::new(0.5, 0.5), 8),
            Err(PotentialError::BadAngularResolution(8))
        ));
        assert!(matches!(
            boundary_potential(&g[1..], &disc, &domain, Point2::new(0.5, 0.5), 64),
            Err(PotentialError::BoundaryLengthMismatch { .. })
        ));
    }
}
