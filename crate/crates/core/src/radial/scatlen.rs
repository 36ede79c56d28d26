use super::phase::{phase_shift_with, MatchOptions};
use super::propagate::RadialProblem;
use crate::units::kelvin_to_hartree;
use crate::{Error, Result};

/// s-wave scattering length and effective range, in bohr.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringLength {
    pub a: f64,
    pub r_eff: f64,
    /// RMS deviation of `k cot(delta)` from the fitted line, relative to `|1/a|`.
    pub residual: f64,
}

/// Collision energies used for the effective-range fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdWindow {
    pub e_min_kelvin: f64,
    pub e_max_kelvin: f64,
    pub points: usize,
}

impl Default for ThresholdWindow {
    fn default() -> Self {
        Self {
            e_min_kelvin: 1e-9,
            e_max_kelvin: 1e-6,
            points: 8,
        }
    }
}

impl ThresholdWindow {
    pub fn energies(&self) -> Vec<f64> {
        let (lo, hi) = (self.e_min_kelvin.ln(), self.e_max_kelvin.ln());
        let n = self.points.max(2);
        (0..n)
            .map(|i| kelvin_to_hartree((lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()))
            .collect()
    }
}

/// Scattering length from a straight-line fit of `k cot(delta_0)` against
/// `k^2` over the default threshold window.
pub fn scattering_length(problem: &RadialProblem) -> Result<ScatteringLength> {
    scattering_length_with(
        problem,
        &ThresholdWindow::default(),
        &MatchOptions::default(),
    )
}

pub fn scattering_length_with(
    problem: &RadialProblem,
    window: &ThresholdWindow,
    options: &MatchOptions,
) -> Result<ScatteringLength> {
    let s_wave = problem.with_ell(0);
    let mut xs = Vec::with_capacity(window.points);
    let mut ys = Vec::with_capacity(window.points);
    for e in window.energies() {
        let p = phase_shift_with(&s_wave.with_energy(e), options)?;
        let t = p.delta.tan();
        if t == 0.0 {
            // no scattering at all at this energy resolution
            return Ok(ScatteringLength {
                a: 0.0,
                r_eff: 0.0,
                residual: 0.0,
            });
        }
        xs.push(p.k * p.k);
        ys.push(p.k / t);
    }
    let (c0, c1, rms) = line_fit(&xs, &ys);
    let k_min = xs[0].sqrt();
    if c0.abs() < k_min {
        return Err(Error::Pole {
            inverse_length: -c0,
        });
    }
    Ok(ScatteringLength {
        a: -1.0 / c0,
        r_eff: 2.0 * c1,
        residual: rms / c0.abs(),
    })
}

/// Least-squares `y = c0 + c1 x`; returns `(c0, c1, rms residual)`.
pub(crate) fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let c1 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c0 = my - c1 * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - c0 - c1 * x).powi(2))
        .sum();
    (c0, c1, (ss / n).sqrt())
}
