use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use crate::units::{hartree_to_microkelvin, microkelvin_to_hartree};
use crate::{Error, Result};

/// Phase shifts of one partial wave on a continuous branch. Energies in
/// Hartree, phases in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    pub ell: u32,
    pub energies: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Wave numbers (1/bohr) matching `energies`, when the mass is known.
    pub k: Option<Vec<f64>>,
}

impl PhaseSeries {
    pub fn new(ell: u32, energies: Vec<f64>, deltas: Vec<f64>) -> Result<Self> {
        if energies.len() != deltas.len() {
            return Err(Error::InvalidInput(format!(
                "{} energies but {} phases",
                energies.len(),
                deltas.len()
            )));
        }
        if energies.iter().chain(&deltas).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("phase series".into()));
        }
        if energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(
                "energies must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            ell,
            energies,
            deltas,
            k: None,
        })
    }

    /// Attach `k = sqrt(2 mu E)` for reduced mass `mass` (electron masses).
    pub fn with_mass(mut self, mass: f64) -> Self {
        self.k = Some(
            self.energies
                .iter()
                .map(|e| (2.0 * mass * e).sqrt())
                .collect(),
        );
        self
    }

    /// Sample `delta(E)` on `energies`.
    pub fn from_fn(ell: u32, energies: Vec<f64>, delta: impl Fn(f64) -> f64) -> Result<Self> {
        let deltas = energies.iter().map(|&e| delta(e)).collect();
        Self::new(ell, energies, deltas)
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// First pair of neighbours whose phases differ by `pi/2` or more.
    pub fn discontinuity(&self) -> Option<usize> {
        self.deltas
            .windows(2)
            .position(|w| (w[1] - w[0]).abs() >= FRAC_PI_2)
    }

    pub fn check_continuous(&self) -> Result<()> {
        match self.discontinuity() {
            Some(i) => Err(Error::BranchDiscontinuity {
                left: self.energies[i],
                right: self.energies[i + 1],
            }),
            None => Ok(()),
        }
    }

    /// Point-wise sum of two series on the same grid.
    pub fn add(&self, other: &PhaseSeries) -> Result<PhaseSeries> {
        if self.energies != other.energies {
            return Err(Error::InvalidInput(
                "series are on different energy grids".into(),
            ));
        }
        let deltas = self
            .deltas
            .iter()
            .zip(&other.deltas)
            .map(|(a, b)| a + b)
            .collect();
        Ok(PhaseSeries {
            deltas,
            ..self.clone()
        })
    }

    /// CSV with header `energy_uK,delta_rad`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("energy_uK,delta_rad\n");
        for (e, d) in self.energies.iter().zip(&self.deltas) {
            let _ = writeln!(out, "{:.12e},{:.12e}", hartree_to_microkelvin(*e), d);
        }
        out
    }

    /// Parse `energy_uK,delta_rad` rows. Blank lines, `#` comments and a
    /// non-numeric header line are skipped.
    pub fn from_csv(text: &str, ell: u32) -> Result<Self> {
        let mut energies = Vec::new();
        let mut deltas = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Option<(f64, f64)> = match fields.as_slice() {
                [e, d, ..] => e.parse().ok().zip(d.parse().ok()),
                _ => None,
            };
            match parsed {
                Some((e, d)) => {
                    energies.push(microkelvin_to_hartree(e));
                    deltas.push(d);
                }
                None if energies.is_empty()
                    && fields.first().is_some_and(|f| f.parse::<f64>().is_err()) => {}
                None => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("expected `energy_uK,delta_rad`, got `{line}`"),
                    })
                }
            }
        }
        Self::new(ell, energies, deltas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unordered_energies() {
        assert!(PhaseSeries::new(0, vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(PhaseSeries::new(0, vec![2.0, 1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn detects_jumps() {
        let s = PhaseSeries::new(0, vec![1.0, 2.0, 3.0], vec![0.0, 0.2, 2.0]).unwrap();
        assert!(matches!(
            s.check_continuous(),
            Err(Error::BranchDiscontinuity { left, right }) if left == 2.0 && right == 3.0
        ));
    }

    #[test]
    fn csv_round_trip() {
        let e: Vec<f64> = (1..6)
            .map(|i| microkelvin_to_hartree(i as f64 * 10.0))
            .collect();
        let s = PhaseSeries::new(1, e, vec![0.1, 0.2, -0.3, 1.0, 2.5]).unwrap();
        let back = PhaseSeries::from_csv(&s.to_csv(), 1).unwrap();
        for (a, b) in s.energies.iter().zip(&back.energies) {
            assert!((a - b).abs() < 1e-11 * a);
        }
        assert_eq!(s.deltas, back.deltas);
    }

    #[test]
    fn csv_reports_bad_rows() {
        let text = "energy_uK,delta_rad\n1,0.1\n2,abc\n";
        assert!(matches!(
            PhaseSeries::from_csv(text, 0),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
