//! Unit registry and physical constants (CODATA 2018).
//!
//! Every computation past the public boundary is done in Hartree atomic
//! units (`hbar = m_e = a0 = E_h = 1`). Labels are lowercase ASCII.

use crate::{Error, Result};

/// Bohr radius in angstrom.
pub const BOHR_IN_ANGSTROM: f64 = 0.529_177_210_903;
/// One angstrom in bohr.
pub const ANGSTROM_IN_BOHR: f64 = 1.0 / BOHR_IN_ANGSTROM;
/// Hartree energy in wavenumbers.
pub const HARTREE_IN_CM1: f64 = 219_474.631_363_2;
/// Hartree energy divided by Boltzmann's constant, in kelvin.
pub const HARTREE_IN_KELVIN: f64 = 315_775.024_804_07;
/// Unified atomic mass unit in electron masses.
pub const DALTON_IN_ME: f64 = 1_822.888_486_209;
/// Atomic unit of time in seconds.
pub const AU_TIME_IN_SECONDS: f64 = 2.418_884_326_585_7e-17;
/// Mass of sodium-23 in daltons.
pub const NA23_MASS_DALTON: f64 = 22.989_769_28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Energy,
    Mass,
    Time,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Energy => "energy",
            Dimension::Mass => "mass",
            Dimension::Time => "time",
        }
    }
}

#[derive(Debug, Clone)]
struct UnitEntry {
    label: &'static str,
    dimension: Dimension,
    /// Value of one of this unit in atomic units.
    in_atomic: f64,
}

/// Registry of unit labels and isotope masses.
///
/// Immutable after construction; share freely between threads.
#[derive(Debug, Clone)]
pub struct UnitSystem {
    units: Vec<UnitEntry>,
    masses: Vec<(&'static str, f64)>,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::new()
    }
}

impl UnitSystem {
    pub fn new() -> Self {
        use Dimension::*;
        let entry = |label, dimension, in_atomic| UnitEntry {
            label,
            dimension,
            in_atomic,
        };
        let units = vec![
            entry("bohr", Length, 1.0),
            entry("a0", Length, 1.0),
            entry("angstrom", Length, ANGSTROM_IN_BOHR),
            entry("hartree", Energy, 1.0),
            entry("cm-1", Energy, 1.0 / HARTREE_IN_CM1),
            entry("k", Energy, 1.0 / HARTREE_IN_KELVIN),
            entry("mk", Energy, 1e-3 / HARTREE_IN_KELVIN),
            entry("uk", Energy, 1e-6 / HARTREE_IN_KELVIN),
            entry("nk", Energy, 1e-9 / HARTREE_IN_KELVIN),
            entry("me", Mass, 1.0),
            entry("u", Mass, DALTON_IN_ME),
            entry("au_time", Time, 1.0),
            entry("s", Time, 1.0 / AU_TIME_IN_SECONDS),
            entry("us", Time, 1e-6 / AU_TIME_IN_SECONDS),
        ];
        let masses = vec![("na23", NA23_MASS_DALTON * DALTON_IN_ME)];
        Self { units, masses }
    }

    fn lookup(&self, label: &str) -> Result<&UnitEntry> {
        self.units
            .iter()
            .find(|u| u.label == label)
            .ok_or_else(|| Error::UnknownUnit(label.to_string()))
    }

    /// Express `value` given in unit `from` in unit `to`.
    pub fn convert(&self, value: f64, from: &str, to: &str) -> Result<f64> {
        let a = self.lookup(from)?;
        let b = self.lookup(to)?;
        if a.dimension != b.dimension {
            return Err(Error::DimensionMismatch {
                from: from.to_string(),
                from_dim: a.dimension.name(),
                to: to.to_string(),
                to_dim: b.dimension.name(),
            });
        }
        if a.label == b.label {
            return Ok(value);
        }
        Ok(value * (a.in_atomic / b.in_atomic))
    }

    pub fn dimension(&self, label: &str) -> Result<Dimension> {
        Ok(self.lookup(label)?.dimension)
    }

    pub fn labels(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.units.iter().map(|u| u.label)
    }

    /// Isotope mass in electron masses.
    pub fn isotope_mass(&self, isotope: &str) -> Result<f64> {
        self.masses
            .iter()
            .find(|(name, _)| *name == isotope)
            .map(|(_, m)| *m)
            .ok_or_else(|| Error::UnknownUnit(isotope.to_string()))
    }
}

/// Reduced mass of an atom colliding with a diatom (any consistent mass unit).
pub fn reduced_mass_atom_diatom(atom_mass: f64, diatom_mass: f64) -> Result<f64> {
    if !(atom_mass > 0.0) || !(diatom_mass > 0.0) {
        return Err(Error::InvalidInput(format!(
            "masses must be positive, got {atom_mass} and {diatom_mass}"
        )));
    }
    Ok(atom_mass * diatom_mass / (atom_mass + diatom_mass))
}

pub fn angstrom_to_bohr(r: f64) -> f64 {
    r * ANGSTROM_IN_BOHR
}

pub fn bohr_to_angstrom(r: f64) -> f64 {
    r * BOHR_IN_ANGSTROM
}

pub fn cm1_to_hartree(e: f64) -> f64 {
    e / HARTREE_IN_CM1
}

pub fn hartree_to_cm1(e: f64) -> f64 {
    e * HARTREE_IN_CM1
}

pub fn microkelvin_to_hartree(e: f64) -> f64 {
    e * 1e-6 / HARTREE_IN_KELVIN
}

pub fn hartree_to_microkelvin(e: f64) -> f64 {
    e * HARTREE_IN_KELVIN * 1e6
}

pub fn kelvin_to_hartree(e: f64) -> f64 {
    e / HARTREE_IN_KELVIN
}

pub fn hartree_to_kelvin(e: f64) -> f64 {
    e * HARTREE_IN_KELVIN
}
