//! Log-derivative propagation against an independent Numerov integration and
//! against closed-form phase shifts and scattering lengths.

mod common;

use common::{
    compare, hard_sphere_worst, oracle_potentials, square_well_length_worst,
    square_well_phase_worst,
};

#[test]
fn numerov_agrees_for_three_potentials() {
    for (name, pot, mass, r_min, r_match) in oracle_potentials() {
        let worst = compare(&*pot, mass, r_min, r_match);
        assert!(worst < 1e-6, "{name}: max phase difference {worst:e}");
    }
}

#[test]
fn hard_sphere_phases() {
    let worst = hard_sphere_worst();
    assert!(worst < 1e-6, "max phase difference {worst:e}");
}

#[test]
fn square_well_s_wave_phase() {
    let worst = square_well_phase_worst();
    assert!(worst < 1e-6, "max phase difference {worst:e}");
}

#[test]
fn square_well_scattering_lengths() {
    let worst = square_well_length_worst();
    assert!(worst < 1e-3, "max relative a_s difference {worst:e}");
}
