//! Dimer curves and trimer surfaces assembled from sampled energies.
//!
//! A dimer curve is a calibrated reciprocal-power interpolant with fixed
//! `C6`, `C8` and a fitted `C10`. A trimer surface is the sum of three pair
//! energies plus a nonadditive term scaled by `lambda`.

mod dimer;
pub mod metadata;
pub mod surrogate;
mod threebody;
mod trimer;

pub use dimer::{assemble_dimer, calibrate_dimer, interpolant_minimum, Calibration, DimerCurve};
pub use threebody::{atm_triple_dipole, ddq_term, interior_cosines};
pub use trimer::{
    build_trimer, evaluate_trimer, extract_v3, trimer_kernel, LongRange, Taper, TrimerSurface,
};
