//! Analytic stand-ins for unpublished ab initio grids.
//!
//! The dimer model is a Morse well switched smoothly onto the
//! `-C6/r^6 - C8/r^8 - C10/r^10` tail. The trimer model adds to the pairwise
//! sum a short-range attractive nonadditive term plus damped triple-dipole
//! and dipole-dipole-quadrupole terms. Both work in Angstrom and cm^-1, the
//! units of the sample files.

use std::sync::Arc;

use super::dimer::{assemble_dimer, calibrate_dimer, DimerCurve};
use super::threebody::{atm_unchecked, ddq_unchecked, interior_cosines};
use super::trimer::{build_trimer, extract_v3, LongRange, TrimerSurface};
use crate::rkhs::io::{format_samples_1d, format_samples_3d};
use crate::units::{angstrom_to_bohr, cm1_to_hartree, BOHR_IN_ANGSTROM, HARTREE_IN_CM1};
use crate::Result;

/// Dispersion coefficients of the Na2 triplet state (atomic units).
pub const NA2_C6: f64 = 1.561e3;
pub const NA2_C8: f64 = 1.16e5;
pub const NA2_C10: f64 = 1.19e7;
/// Three-body dispersion coefficients for Na3 (atomic units).
pub const NA3_C9: f64 = 1.892e5;
pub const NA3_C11: f64 = 1.46812e5;

/// Experimental well of the Na2 triplet state: equilibrium distance (Angstrom)
/// and energy at the minimum (cm^-1).
pub const NA2_RE: f64 = 5.16607;
pub const NA2_MIN_ENERGY: f64 = -173.6496;

/// Distortion applied to the calibrated model to produce raw samples: a raw
/// sample at `r` equals the model at `r + RAW_SHIFT`, divided by `RAW_SCALE`.
pub const RAW_SHIFT: f64 = -0.02754;
pub const RAW_SCALE: f64 = 1.00407;

/// Morse range parameter (1/Angstrom) of the dimer model. With it the
/// assembled curve holds 16 s-wave levels and a scattering length of 67 bohr.
pub const MORSE_WIDTH: f64 = 0.7768;
/// Centre and width (Angstrom) of the tanh switch onto the dispersion tail.
const SWITCH_CENTRE: f64 = 9.0;
const SWITCH_WIDTH: f64 = 0.7;

fn au_to_cm1_angstrom(c: f64, power: i32) -> f64 {
    c * HARTREE_IN_CM1 * BOHR_IN_ANGSTROM.powi(power)
}

/// Morse well switched onto a dispersion tail.
#[derive(Debug, Clone, Copy)]
pub struct DimerModel {
    depth: f64,
    re: f64,
    width: f64,
    c6: f64,
    c8: f64,
    c10: f64,
}

impl DimerModel {
    /// Model whose minimum is exactly at `(re, min_energy)`; the Morse
    /// parameters are adjusted to absorb the small pull of the switched tail.
    pub fn new(re: f64, min_energy: f64, width: f64, c6: f64, c8: f64, c10: f64) -> Self {
        let mut m = Self {
            depth: -min_energy,
            re,
            width,
            c6: au_to_cm1_angstrom(c6, 6),
            c8: au_to_cm1_angstrom(c8, 8),
            c10: au_to_cm1_angstrom(c10, 10),
        };
        for _ in 0..50 {
            let (r_min, v_min) = m.minimum();
            let dr = re - r_min;
            let ratio = min_energy / v_min;
            m.re += dr;
            m.depth *= ratio;
            if dr.abs() < 1e-13 && (ratio - 1.0).abs() < 1e-15 {
                break;
            }
        }
        m
    }

    /// Na2 triplet stand-in with the default width.
    pub fn na2() -> Self {
        Self::new(NA2_RE, NA2_MIN_ENERGY, MORSE_WIDTH, NA2_C6, NA2_C8, NA2_C10)
    }

    pub fn morse(&self, r: f64) -> f64 {
        let e = (-self.width * (r - self.re)).exp();
        self.depth * ((1.0 - e) * (1.0 - e) - 1.0)
    }

    pub fn dispersion(&self, r: f64) -> f64 {
        let r2 = 1.0 / (r * r);
        -r2 * r2 * r2 * (self.c6 + r2 * (self.c8 + r2 * self.c10))
    }

    /// Energy in cm^-1 at `r` Angstrom.
    pub fn energy(&self, r: f64) -> f64 {
        let s = 0.5 * (1.0 + ((r - SWITCH_CENTRE) / SWITCH_WIDTH).tanh());
        (1.0 - s) * self.morse(r) + s * self.dispersion(r)
    }

    fn derivative(&self, r: f64) -> f64 {
        let h = 1e-5;
        (self.energy(r + h) - self.energy(r - h)) / (2.0 * h)
    }

    /// Location and value of the minimum near the Morse equilibrium.
    pub fn minimum(&self) -> (f64, f64) {
        let mut r = self.re;
        for _ in 0..50 {
            let h = 1e-4;
            let d2 = (self.derivative(r + h) - self.derivative(r - h)) / (2.0 * h);
            let step = self.derivative(r) / d2;
            r -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        (r, self.energy(r))
    }

    /// Raw (uncalibrated) energy at `r`.
    pub fn raw_energy(&self, r: f64) -> f64 {
        self.energy(r + RAW_SHIFT) / RAW_SCALE
    }
}

/// Sample distances (Angstrom) of the 47-point dimer grid: 2.0 to 14.0,
/// densest around the minimum.
pub const DIMER_GRID: [f64; 47] = [
    2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0, 4.2, 4.4, 4.6, 4.75, 4.85, 4.95, 5.05, 5.1,
    5.15, 5.2, 5.25, 5.3, 5.4, 5.5, 5.6, 5.75, 5.9, 6.1, 6.3, 6.5, 6.75, 7.0, 7.3, 7.6, 8.0, 8.4,
    8.8, 9.2, 9.6, 10.0, 10.5, 11.0, 11.5, 12.0, 12.5, 13.0, 13.5, 14.0,
];

/// Raw dimer samples `(r, V)` in Angstrom and cm^-1.
pub fn dimer_samples() -> Vec<(f64, f64)> {
    let model = DimerModel::na2();
    DIMER_GRID
        .iter()
        .map(|&r| (r, model.raw_energy(r)))
        .collect()
}

/// Parameters of the analytic nonadditive model (Angstrom, cm^-1).
#[derive(Debug, Clone, Copy)]
pub struct NonadditiveModel {
    /// Strength of the short-range attraction at the reference perimeter.
    pub amplitude: f64,
    /// Decay rate of the short-range term with the perimeter.
    pub decay: f64,
    /// Reference perimeter.
    pub perimeter: f64,
    /// Angular anisotropy, multiplies the product of interior cosines.
    pub anisotropy: f64,
    /// Decay rate of the anisotropic part with the perimeter.
    pub anisotropy_decay: f64,
    /// Damping length of the long-range terms.
    pub damping: f64,
    pub c9: f64,
    pub c11: f64,
}

impl NonadditiveModel {
    pub fn na3() -> Self {
        Self {
            amplitude: TRIMER_AMPLITUDE,
            decay: TRIMER_DECAY,
            perimeter: 13.02,
            anisotropy: TRIMER_ANISOTROPY,
            anisotropy_decay: TRIMER_ANISOTROPY_DECAY,
            damping: TRIMER_DAMPING,
            c9: au_to_cm1_angstrom(NA3_C9, 9),
            c11: au_to_cm1_angstrom(NA3_C11, 11),
        }
    }

    pub fn short_range(&self, r12: f64, r23: f64, r13: f64) -> f64 {
        let [c1, c2, c3] = interior_cosines(r12, r23, r13);
        let dp = r12 + r23 + r13 - self.perimeter;
        -self.amplitude
            * ((-self.decay * dp).exp()
                + self.anisotropy * c1 * c2 * c3 * (-self.anisotropy_decay * dp).exp())
    }

    fn damp(&self, r: f64) -> f64 {
        1.0 - (-(r / self.damping).powi(6)).exp()
    }

    pub fn long_range(&self, r12: f64, r23: f64, r13: f64) -> f64 {
        let d = self.damp(r12) * self.damp(r23) * self.damp(r13);
        d * (atm_unchecked(r12, r23, r13, self.c9) + ddq_unchecked(r12, r23, r13, self.c11))
    }

    pub fn energy(&self, r12: f64, r23: f64, r13: f64) -> f64 {
        self.short_range(r12, r23, r13) + self.long_range(r12, r23, r13)
    }
}

// Solved so that the total surface has stationary points at the D3h
// landmark (4.34 Angstrom, -880.9 cm^-1) and the symmetric collinear one
// (5.06 Angstrom, -381.7 cm^-1); the anisotropy decay was fixed at 0.2.
const TRIMER_AMPLITUDE: f64 = 799.6962993;
const TRIMER_DECAY: f64 = 0.5706745719;
const TRIMER_ANISOTROPY: f64 = -0.04831811501;
const TRIMER_ANISOTROPY_DECAY: f64 = 0.2;
const TRIMER_DAMPING: f64 = 5.073836533;

/// Total trimer energy (cm^-1) of the analytic model at distances in Angstrom.
pub fn trimer_model_energy(r12: f64, r23: f64, r13: f64) -> f64 {
    let pair = DimerModel::na2();
    let v3 = NonadditiveModel::na3();
    pair.energy(r12) + pair.energy(r23) + pair.energy(r13) + v3.energy(r12, r23, r13)
}

/// Equal bond lengths (Angstrom) of the isosceles part of the trimer grid,
/// including both landmark distances.
const TRIMER_BONDS: [f64; 20] = [
    2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0, 4.17, 4.34, 4.5, 4.75, 5.06, 5.25, 5.5, 6.0, 6.5, 7.0,
    8.0, 9.0, 10.0,
];
/// Apex angles (degrees) of the isosceles geometries; 180 is the symmetric
/// collinear arrangement.
const TRIMER_APEX: [f64; 13] = [
    40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0, 120.0, 135.0, 150.0, 165.0, 180.0,
];
/// Bond lengths combined pairwise into asymmetric collinear geometries.
const TRIMER_COLLINEAR: [f64; 15] = [
    2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0, 4.34, 4.75, 5.06, 5.5, 6.5, 7.5, 8.5, 10.0,
];
/// Geometries whose shortest side falls below this are left out.
const TRIMER_MIN_SIDE: f64 = 2.5;

/// Trimer geometries `(r12, r23, r13)` in Angstrom: isosceles triangles with
/// the apex at atom 1 (C2v, including the D3h and symmetric collinear lines)
/// and asymmetric collinear chains with atom 1 in the middle.
pub fn trimer_geometries() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for &r in &TRIMER_BONDS {
        for &apex in &TRIMER_APEX {
            let base = if apex == 60.0 {
                r
            } else if apex == 180.0 {
                2.0 * r
            } else {
                2.0 * r * (0.5 * apex.to_radians()).sin()
            };
            if base >= TRIMER_MIN_SIDE {
                out.push((r, base, r));
            }
        }
    }
    for (i, &a) in TRIMER_COLLINEAR.iter().enumerate() {
        for &b in &TRIMER_COLLINEAR[i + 1..] {
            out.push((a, a + b, b));
        }
    }
    out
}

/// Raw trimer samples `(r12, r23, r13, V)` in Angstrom and cm^-1 from the
/// analytic model.
pub fn trimer_samples() -> Vec<(f64, f64, f64, f64)> {
    trimer_geometries()
        .into_iter()
        .map(|(a, b, c)| (a, b, c, trimer_model_energy(a, b, c)))
        .collect()
}

/// Which shipped grid to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateKind {
    Dimer,
    Trimer,
}

/// Sample-file text for one of the shipped grids.
pub fn surrogate_grid(kind: SurrogateKind) -> String {
    match kind {
        SurrogateKind::Dimer => {
            format_samples_1d(&dimer_samples(), "surrogate dimer: r/Angstrom V/cm^-1")
        }
        SurrogateKind::Trimer => format_samples_3d(
            &trimer_samples(),
            "surrogate trimer: r12 r23 r13 /Angstrom V/cm^-1",
        ),
    }
}

/// Dimer curve assembled from the shipped grid: calibrated to the known
/// minimum, C6 and C8 fixed.
pub fn surrogate_dimer_curve() -> Result<DimerCurve> {
    let samples = dimer_samples();
    let cal = calibrate_dimer(&samples, NA2_RE, NA2_MIN_ENERGY)?;
    assemble_dimer(&samples, NA2_C6, NA2_C8, cal)
}

/// Trimer surface assembled from the shipped grids at the given `lambda`.
/// With `subtract_long_range` the triple-dipole and dipole-dipole-quadrupole
/// terms are removed before the fit and added back on evaluation.
pub fn surrogate_trimer_surface(subtract_long_range: bool, lambda: f64) -> Result<TrimerSurface> {
    let pair = Arc::new(surrogate_dimer_curve()?);
    let au: Vec<(f64, f64, f64, f64)> = trimer_samples()
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
    let lr = subtract_long_range.then_some(LongRange {
        c9: NA3_C9,
        c11: NA3_C11,
    });
    let v3 = extract_v3(&au, &pair, lr)?;
    build_trimer(&v3, pair, NA3_C9, NA3_C11, subtract_long_range, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_minimum(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
        let (mut a, mut b) = (lo, hi);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        while b - a > 1e-9 {
            let (x1, x2) = (b - g * (b - a), a + g * (b - a));
            if f(x1) < f(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        let x = 0.5 * (a + b);
        (x, f(x))
    }

    #[test]
    fn dimer_model_minimum() {
        let (r, v) = DimerModel::na2().minimum();
        assert!((r - NA2_RE).abs() < 1e-9 && (v - NA2_MIN_ENERGY).abs() < 1e-9);
    }

    #[test]
    fn trimer_model_landmarks() {
        let (r, v) = line_minimum(|r| trimer_model_energy(r, r, r), 3.5, 5.5);
        assert!(
            (r - 4.34).abs() < 1e-5 && (v + 880.9).abs() < 1e-4,
            "{r} {v}"
        );
        let (r, v) = line_minimum(|r| trimer_model_energy(r, 2.0 * r, r), 4.0, 6.5);
        assert!(
            (r - 5.06).abs() < 1e-5 && (v + 381.7).abs() < 1e-4,
            "{r} {v}"
        );
    }

    #[test]
    fn trimer_grid_shape() {
        let g = trimer_geometries();
        assert!((340..=380).contains(&g.len()), "{}", g.len());
        assert!(g.contains(&(4.34, 4.34, 4.34)));
        assert!(g.contains(&(5.06, 10.12, 5.06)));
        for &(a, b, c) in &g {
            assert!(a.min(b).min(c) >= TRIMER_MIN_SIDE);
            assert!(crate::rkhs::check_triangle(a, b, c).is_ok());
        }
    }

    #[test]
    fn grids_are_deterministic() {
        assert_eq!(
            surrogate_grid(SurrogateKind::Trimer),
            surrogate_grid(SurrogateKind::Trimer)
        );
        assert_eq!(
            surrogate_grid(SurrogateKind::Dimer),
            surrogate_grid(SurrogateKind::Dimer)
        );
    }
}
