//! Atom-rigid-rotor coupled-channel scattering for one total angular
//! momentum block: channel bases, Legendre interaction models with
//! Percival-Seaton coupling, matrix log-derivative propagation and S-matrix
//! matching.

mod basis;
mod interaction;
mod solve;
mod threshold;

pub use basis::{build_basis, Channel, ChannelBasis, Parity, RotorStates};
pub use interaction::{
    jacobi_distances, legendre_projection, project_trimer, rotational_constant,
    AtomDiatomProjection, InteractionModel, LinearCombination, ProjectionGrid, Tabulated,
};
pub use solve::{
    coupling_coefficients, coupling_matrix, match_k, partial_cross_section, propagate_matrix,
    s_from_k, solve_cc, solve_coupled, CcOptions, CoupledPotential, RotorCoupling, SMatrix,
};
pub use threshold::cc_scattering_length;
