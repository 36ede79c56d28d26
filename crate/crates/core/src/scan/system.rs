use std::sync::Arc;

use super::config::{Config, Rotor, Solver};
use crate::coupled::{
    build_basis, cc_scattering_length, partial_cross_section, project_trimer, rotational_constant,
    solve_cc, AtomDiatomProjection, CcOptions, ChannelBasis, InteractionModel, Parity,
    ProjectionGrid, RotorStates,
};
use crate::potentials::surrogate::{dimer_samples, trimer_samples};
use crate::potentials::{
    assemble_dimer, build_trimer, calibrate_dimer, extract_v3, DimerCurve, LongRange, TrimerSurface,
};
use crate::radial::{
    count_bound_states, scattering_length, RadialProblem, ScatteringLength, ThresholdWindow,
};
use crate::rkhs::io::{read_samples_1d, read_samples_3d};
use crate::units::{angstrom_to_bohr, cm1_to_hartree, DALTON_IN_ME};
use crate::{Error, Result};

/// Outer end and spacing of the tabulated projections (bohr).
const PROJECTION_R_MAX: f64 = 60.0;
const PROJECTION_SPACING: f64 = 0.05;
const PROJECTION_QUADRATURE: usize = 32;

/// Scattering observables of one `(lambda, J, E)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub sigma: f64,
    /// `arg(S_ee) / 2`, defined modulo pi.
    pub delta: f64,
    pub k: f64,
}

/// Everything a scan needs, built once from a [`Config`] and shared
/// read-only between workers.
pub struct System {
    pub config: Config,
    pub dimer: Arc<DimerCurve>,
    pub surface: TrimerSurface,
    pub projection: AtomDiatomProjection,
    /// Atom-diatom reduced mass (electron masses).
    pub mass: f64,
    /// Reduced mass of the diatom's two atoms.
    pub dimer_mass: f64,
    /// Rotational constant of the diatom (Hartree).
    pub rotational_constant: f64,
    pub r_min: f64,
}

/// Dimer curve from the configured samples (or the shipped grid).
pub fn build_dimer(config: &Config) -> Result<DimerCurve> {
    let samples = match &config.dimer_samples {
        Some(p) => read_samples_1d(p)?,
        None => dimer_samples(),
    };
    let cal = calibrate_dimer(
        &samples,
        config.dimer_re_angstrom,
        config.dimer_min_energy_cm1,
    )?;
    assemble_dimer(&samples, config.c6, config.c8, cal)
}

/// Trimer surface at `lambda = 1` on top of `dimer`, with the configured
/// long-range treatment and remainder taper.
pub fn build_surface(config: &Config, dimer: Arc<DimerCurve>) -> Result<TrimerSurface> {
    let raw = match &config.trimer_samples {
        Some(p) => read_samples_3d(p)?,
        None => trimer_samples(),
    };
    let au: Vec<(f64, f64, f64, f64)> = raw
        .into_iter()
        .map(|(a, b, c, v)| {
            (
                angstrom_to_bohr(a),
                angstrom_to_bohr(b),
                angstrom_to_bohr(c),
                cm1_to_hartree(v),
            )
        })
        .collect();
    let lr = config.subtract_long_range.then_some(LongRange {
        c9: config.c9,
        c11: config.c11,
    });
    let v3 = extract_v3(&au, &dimer, lr)?;
    let surface = build_trimer(
        &v3,
        dimer,
        config.c9,
        config.c11,
        config.subtract_long_range,
        1.0,
    )?;
    Ok(if config.remainder_taper_bohr > 0.0 {
        surface.with_taper(config.remainder_taper_bohr)
    } else {
        surface
    })
}

impl System {
    pub fn build(config: &Config) -> Result<Self> {
        config.validate()?;
        let dimer = Arc::new(build_dimer(config)?);
        let surface = build_surface(config, dimer.clone())?;
        let bond = angstrom_to_bohr(config.dimer_re_angstrom);
        let r_min = 0.5 * bond + dimer.inner_radius();
        let grid = ProjectionGrid {
            r_min,
            r_max: PROJECTION_R_MAX,
            spacing: PROJECTION_SPACING,
            quadrature: PROJECTION_QUADRATURE,
        };
        let projection = project_trimer(&surface, bond, config.max_order, &grid)?;
        let atom = config.atom_mass_dalton * DALTON_IN_ME;
        let dimer_mass = 0.5 * atom;
        let rotational_constant = rotational_constant(&dimer, dimer_mass)?;
        Ok(Self {
            config: config.clone(),
            dimer,
            surface,
            projection,
            // atom + homonuclear diatom
            mass: 2.0 * atom / 3.0,
            dimer_mass,
            rotational_constant,
            r_min,
        })
    }

    pub fn model(&self, lambda: f64) -> InteractionModel {
        self.projection.model(lambda, self.config.anisotropy)
    }

    pub fn cc_options(&self) -> CcOptions {
        CcOptions::new(self.mass, self.r_min)
    }

    /// Channel basis of the `J` block holding the entrance channel, and the
    /// entrance channel's index.
    pub fn basis(&self, total_j: u32) -> Result<(ChannelBasis, usize)> {
        let rotor = match self.config.rotor {
            Rotor::Even => RotorStates::Even,
            Rotor::Odd => RotorStates::Odd,
            Rotor::All => RotorStates::All,
        };
        let j = self
            .config
            .entrance_j
            .unwrap_or(if self.config.rotor == Rotor::Odd {
                1
            } else {
                0
            });
        let ell = self.config.entrance_ell.unwrap_or(total_j.abs_diff(j));
        let basis = build_basis(total_j, self.config.j_max, Parity::of(j, ell), rotor)?
            .with_rotational_constant(self.rotational_constant);
        let entrance = basis.index_of(j, ell).ok_or_else(|| {
            Error::Config(format!(
                "entrance channel (j={j}, l={ell}) is not in the J={total_j} basis"
            ))
        })?;
        Ok((basis, entrance))
    }

    /// s-wave scattering length (bohr) with the configured solver.
    pub fn scattering_length(&self, lambda: f64) -> Result<ScatteringLength> {
        let model = self.model(lambda);
        match self.config.solver {
            Solver::Isotropic => {
                let v0 = model.term(0).expect("isotropic term").clone();
                scattering_length(&RadialProblem::new(&*v0, self.mass, 0, 0.0, self.r_min))
            }
            Solver::Coupled => {
                let (basis, entrance) = self.basis(0)?;
                cc_scattering_length(
                    &basis,
                    &model,
                    entrance,
                    &self.cc_options(),
                    &ThresholdWindow::default(),
                )
            }
        }
    }

    /// `1/a` (1/bohr), finite through a pole of the scattering length.
    pub fn inverse_length(&self, lambda: f64) -> Result<f64> {
        match self.scattering_length(lambda) {
            Ok(s) => Ok(1.0 / s.a),
            Err(Error::Pole { inverse_length }) => Ok(inverse_length),
            Err(e) => Err(e),
        }
    }

    /// s-wave bound states of the isotropic term.
    pub fn bound_count(&self, lambda: f64) -> Result<u32> {
        let model = self.model(lambda);
        let v0 = model.term(0).expect("isotropic term").clone();
        count_bound_states(&RadialProblem::new(&*v0, self.mass, 0, 0.0, self.r_min))
    }

    /// `sigma_J` and the entrance phase at collision energy `energy` (Hartree).
    pub fn cell(&self, lambda: f64, total_j: u32, energy: f64) -> Result<Cell> {
        let (basis, entrance) = self.basis(total_j)?;
        let s = solve_cc(&basis, &self.model(lambda), energy, &self.cc_options())?;
        let sigma = partial_cross_section(&s, &basis, entrance)?;
        let row = s
            .open_index(entrance)
            .ok_or(Error::ClosedChannel(entrance))?;
        Ok(Cell {
            sigma,
            delta: 0.5 * s.s[(row, row)].arg(),
            k: s.k[row],
        })
    }
}
