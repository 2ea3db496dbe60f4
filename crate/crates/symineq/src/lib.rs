//! Numerical toolkit for boundary-trace Sobolev inequalities of the
//! symmetric gradient on arbitrary bounded planar domains.
//!
//! The crate is organized around the pipeline that turns a polygonal
//! domain and an analytic trial field into empirical-constant reports:
//!
//! - [`geometry`]: polygonal domains, ray casting onto the boundary,
//!   boundary quadrature, Frostman-constant estimation;
//! - [`fields`]: masked grids, finite-difference symmetric gradients, and
//!   the analytic trial-field catalog;
//! - [`rearrange`]: discrete measures and decreasing rearrangements;
//! - [`norms`]: Lebesgue, Lorentz, Lorentz-Zygmund, Orlicz (Luxemburg) and
//!   weighted-sup norms on rearrangement profiles;
//! - [`potentials`]: the Riesz potential of order one (direct and FFT
//!   paths) and the first-visible-boundary-point potential;
//! - [`hardy`]: exact one-dimensional kernel calculus and reduction
//!   sweeps;
//! - [`verify`]: pointwise, rearrangement, and norm-inequality reports,
//!   plus derivative-free constant search;
//! - [`run`]: config-driven orchestration with CSV/JSON outputs.

// Guards like `!(x > 0.0)` are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fft;
pub mod fields;
pub mod geometry;
pub mod hardy;
pub mod norms;
pub mod numeric;
pub mod potentials;
pub mod rearrange;
pub mod run;
pub mod verify;

pub use fields::{make_trial_field, sym_gradient, MaskedGrid, TrialSpec};
pub use geometry::{Point2, PolyDomain};
pub use norms::{
    eval_norm, exp_equiv_norm, lebesgue_norm, lorentz_norm, lorentz_zygmund_norm, luxemburg_norm,
    NormSpec, YoungFunction,
};
pub use potentials::{boundary_potential, riesz_potential, KernelPlan, PotentialMethod};
pub use rearrange::{
    decreasing_rearrangement, subadditivity_check, CellMeasure, DecreasingProfile,
};
pub use verify::{InequalityId, InequalitySpec, MeasureChoice};
