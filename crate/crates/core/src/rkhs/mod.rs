//! Reciprocal-power reproducing-kernel interpolation.
//!
//! One-dimensional curves are fitted in a transformed variable (typically
//! `r^2`); beyond the last sample the interpolant is an exact finite sum of
//! reciprocal powers whose coefficients can be read off directly. Three-body
//! surfaces use the product of three 1D kernels, summed over the six
//! permutations of the interatomic distances.

mod fit1d;
mod fit3d;
pub mod io;
mod kernel;
mod linalg;

pub use fit1d::{fit_1d, fit_1d_fixed_tail, AsymptoticTerm, RKHSModel1D};
pub use fit3d::{check_triangle, fit_3d_symmetrized, RKHSModel3D};
pub use kernel::{rp_kernel, RPKernel, RPKernelParams, VariableMap};
pub use linalg::{solve_general, solve_spd, RESIDUAL_TOLERANCE};

/// Evaluate a 1D model at physical distance `r`.
pub fn evaluate_1d(model: &RKHSModel1D, r: f64) -> crate::Result<f64> {
    model.evaluate(r)
}

/// Evaluate a 3D model at a geometry given by its three distances.
pub fn evaluate_3d(model: &RKHSModel3D, r12: f64, r23: f64, r13: f64) -> crate::Result<f64> {
    model.evaluate(r12, r23, r13)
}
