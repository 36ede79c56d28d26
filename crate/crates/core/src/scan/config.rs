use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::potentials::surrogate::{NA2_C6, NA2_C8, NA2_MIN_ENERGY, NA2_RE, NA3_C11, NA3_C9};
use crate::units::NA23_MASS_DALTON;
use crate::{Error, Result};

/// How scattering lengths are computed during sweeps and tuning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Single channel on the isotropic term `v_0`.
    Isotropic,
    /// Coupled channels, `J = 0` block.
    Coupled,
}

/// Rotor levels kept in the channel basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rotor {
    Even,
    Odd,
    All,
}

/// Flat key-value run configuration, read from TOML. Every key is optional;
/// the defaults describe the shipped surrogate Na + Na2 system.
///
/// Potential inputs: `dimer_samples`, `trimer_samples` (paths to
/// whitespace-separated sample files in Angstrom and cm^-1, relative to the
/// config file; the shipped grids are used when absent), `dimer_re_angstrom`
/// and `dimer_min_energy_cm1` (calibration targets), `c6`, `c8`, `c9`, `c11`
/// (atomic units), `subtract_long_range`, `remainder_taper_bohr` (0 disables
/// the switch-off of the fitted nonadditive remainder beyond the sampled
/// region) and `atom_mass_dalton`.
///
/// Model: `anisotropy` multiplies every Legendre order above 0 of the
/// atom-diatom interaction, and `lambda` scales the nonadditive part in every
/// order. `max_order`, `j_max`, `rotor`, `entrance_j`, `entrance_ell` select
/// the channel basis; the entrance defaults to the lowest rotor level with
/// the smallest allowed `ell`.
///
/// Sweeps: `lambdas` (explicit list) or `lambda_min`, `lambda_max`,
/// `lambda_step`; `solver` for scattering lengths; `bracket` and `target_as`
/// (bohr) for tuning.
///
/// Scans: `total_j`, `e_min_kelvin`, `e_max_kelvin`, `energy_points`
/// (log-spaced grid) and `refine_passes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub dimer_samples: Option<PathBuf>,
    pub trimer_samples: Option<PathBuf>,
    pub dimer_re_angstrom: f64,
    pub dimer_min_energy_cm1: f64,
    pub c6: f64,
    pub c8: f64,
    pub c9: f64,
    pub c11: f64,
    pub subtract_long_range: bool,
    pub remainder_taper_bohr: f64,
    pub atom_mass_dalton: f64,

    pub anisotropy: f64,
    pub lambda: f64,
    pub max_order: u32,
    pub j_max: u32,
    pub rotor: Rotor,
    pub entrance_j: Option<u32>,
    pub entrance_ell: Option<u32>,

    pub lambdas: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_step: f64,
    pub solver: Solver,
    pub bracket: [f64; 2],
    pub target_as: Option<f64>,

    pub total_j: Vec<u32>,
    pub e_min_kelvin: f64,
    pub e_max_kelvin: f64,
    pub energy_points: usize,
    pub refine_passes: u32,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            dimer_samples: None,
            trimer_samples: None,
            dimer_re_angstrom: NA2_RE,
            dimer_min_energy_cm1: NA2_MIN_ENERGY,
            c6: NA2_C6,
            c8: NA2_C8,
            c9: NA3_C9,
            c11: NA3_C11,
            subtract_long_range: true,
            remainder_taper_bohr: 4.0,
            atom_mass_dalton: NA23_MASS_DALTON,
            anisotropy: 0.01,
            lambda: 1.0,
            max_order: 4,
            j_max: 4,
            rotor: Rotor::Even,
            entrance_j: None,
            entrance_ell: None,
            lambdas: Vec::new(),
            lambda_min: 0.9,
            lambda_max: 1.1,
            lambda_step: 0.01,
            solver: Solver::Isotropic,
            bracket: [0.5, 1.05],
            target_as: None,
            total_j: vec![0, 1],
            e_min_kelvin: 1e-8,
            e_max_kelvin: 1e-2,
            energy_points: 60,
            refine_passes: 2,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Read `path`; relative sample paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut config = Self::parse(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.dimer_samples, &mut config.trimer_samples]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        let finite = [
            self.dimer_re_angstrom,
            self.dimer_min_energy_cm1,
            self.c6,
            self.c8,
            self.c9,
            self.c11,
            self.remainder_taper_bohr,
            self.atom_mass_dalton,
            self.anisotropy,
            self.lambda,
            self.lambda_min,
            self.lambda_max,
            self.lambda_step,
            self.bracket[0],
            self.bracket[1],
        ];
        if finite.iter().chain(&self.lambdas).any(|x| !x.is_finite()) {
            return bad("all numeric values must be finite");
        }
        if self.target_as.is_some_and(|a| !a.is_finite()) {
            return bad("target_as must be finite");
        }
        if !(self.atom_mass_dalton > 0.0) || self.remainder_taper_bohr < 0.0 {
            return bad("atom_mass_dalton must be positive and remainder_taper_bohr non-negative");
        }
        if self.max_order % 2 != 0 {
            return bad("max_order must be even");
        }
        if self.lambdas.windows(2).any(|w| w[1] < w[0]) {
            return bad("lambdas must be in ascending order");
        }
        if self.lambdas.is_empty()
            && !(self.lambda_step > 0.0 && self.lambda_max >= self.lambda_min)
        {
            return bad("lambda range needs lambda_step > 0 and lambda_max >= lambda_min");
        }
        if !(self.bracket[0] < self.bracket[1]) {
            return bad("bracket must be [lo, hi] with lo < hi");
        }
        if !(self.e_min_kelvin > 0.0 && self.e_max_kelvin > self.e_min_kelvin)
            || self.energy_points < 2
        {
            return bad("energy grid needs 0 < e_min_kelvin < e_max_kelvin and at least 2 points");
        }
        if self.total_j.is_empty() {
            return bad("total_j must list at least one J");
        }
        Ok(())
    }

    /// The lambda grid of a sweep, ascending.
    pub fn lambda_grid(&self) -> Vec<f64> {
        if !self.lambdas.is_empty() {
            return self.lambdas.clone();
        }
        let n = ((self.lambda_max - self.lambda_min) / self.lambda_step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.lambda_min + i as f64 * self.lambda_step)
            .collect()
    }

    /// Log-spaced energies in Kelvin, including both ends.
    pub fn energy_grid_kelvin(&self) -> Vec<f64> {
        log_grid(self.e_min_kelvin, self.e_max_kelvin, self.energy_points)
    }

    /// Canonical TOML text of the effective configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 (hex) of the canonical text and the contents of any sample
    /// files it references.
    pub fn hash(&self) -> Result<String> {
        let mut h = Sha256::new();
        h.update(self.canonical().as_bytes());
        for p in [&self.dimer_samples, &self.trimer_samples]
            .into_iter()
            .flatten()
        {
            h.update(std::fs::read(p)?);
        }
        let mut out = String::new();
        for b in h.finalize() {
            let _ = write!(out, "{b:02x}");
        }
        Ok(out)
    }
}

/// `n` log-spaced values from `lo` to `hi`, both included exactly.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == n => hi,
            _ => lo * (ratio * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn keys_are_read_and_unknown_keys_rejected() {
        let c = Config::parse("anisotropy = 0.05\ntotal_j = [1]\nsolver = \"coupled\"\n").unwrap();
        assert_eq!(c.anisotropy, 0.05);
        assert_eq!(c.total_j, vec![1]);
        assert_eq!(c.solver, Solver::Coupled);
        assert!(matches!(
            Config::parse("anisotropyy = 1.0"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            Config::parse("e_min_kelvin = -1.0"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            Config::parse("lambdas = [1.0, 0.5]"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn grids() {
        let c = Config::default();
        let l = c.lambda_grid();
        assert_eq!(l.len(), 21);
        assert_eq!(l[0], 0.9);
        assert!((l[20] - 1.1).abs() < 1e-12);
        let e = c.energy_grid_kelvin();
        assert_eq!(e.len(), 60);
        assert_eq!((e[0], e[59]), (1e-8, 1e-2));
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn hash_tracks_content() {
        let a = Config::default();
        let mut b = a.clone();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.anisotropy = 0.02;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        assert_eq!(a.hash().unwrap().len(), 64);
    }

    #[test]
    fn canonical_round_trip() {
        let mut c = Config::default();
        c.target_as = Some(-100.0);
        assert_eq!(Config::parse(&c.canonical()).unwrap(), c);
    }
}
