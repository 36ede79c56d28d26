//! Single-channel radial Schrodinger equation in atomic units: Johnson
//! log-derivative propagation, phase shifts on a continuous branch, bound
//! states by node counting and the scattering length.

mod bound;
mod phase;
mod potential;
mod propagate;
mod scatlen;

pub use bound::{bound_level, bound_states, count_below, count_bound_states};
pub use phase::{
    absolute_phase, choose_r_match, phase_shift, phase_shift_at, phase_shift_with,
    refinement_needed, tan_delta, unwrap_phases, MatchOptions, PhasePoint,
};
pub use potential::{
    Dispersion, FnPotential, LennardJones, RadialPotential, Scaled, SquareWell, ZeroPotential,
};
pub use propagate::{
    build_panels, propagate, propagate_from, propagate_logderiv, propagate_panels, InnerBoundary,
    Panel, Propagation, RadialProblem, StepPolicy,
};
pub(crate) use scatlen::line_fit;
pub use scatlen::{scattering_length, scattering_length_with, ScatteringLength, ThresholdWindow};
