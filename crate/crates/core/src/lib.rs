//! Numerical workbench for ultracold atom-diatom scattering.
//!
//! The crate is organised bottom-up:
//!
//! * [`units`]: unit registry, everything internal is Hartree atomic units.
//! * [`rkhs`]: reciprocal-power reproducing kernel interpolation (1D and
//!   permutation-symmetric 3D).
//! * [`potentials`]: calibrated dimer curves, three-body terms and trimer
//!   surfaces with a scalable nonadditive part.
//! * [`radial`]: single-channel log-derivative propagation, phase shifts,
//!   bound states and scattering lengths.
//! * [`coupled`]: rigid-rotor coupled-channel scattering for total angular
//!   momentum `J`.
//! * [`resonance`]: Breit-Wigner fits, Wigner time delay and threshold laws.
//! * [`scan`]: parameter sweeps, cross-section scans and the command line.

pub mod angular;
pub mod coupled;
pub mod error;
pub mod potentials;
pub mod radial;
pub mod resonance;
pub mod rkhs;
pub mod scan;
pub mod special;
pub mod units;

pub use error::{Error, Result};
