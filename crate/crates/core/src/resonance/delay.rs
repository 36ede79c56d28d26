use std::f64::consts::PI;

use super::series::PhaseSeries;
use crate::{Error, Result};

/// Largest phase change (rad) across one grid interval for which the finite
/// difference derivative is trusted.
pub const RESOLVED_PHASE_STEP: f64 = 0.3;

/// Wigner time delay `Q = 2 hbar d(delta)/dE` on the grid of a phase series,
/// in atomic units of time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDelay {
    pub energies: Vec<f64>,
    pub q: Vec<f64>,
    /// Intervals `i` (between points `i` and `i+1`) where the phase moves by
    /// more than [`RESOLVED_PHASE_STEP`]; the grid should be refined there.
    pub refine: Vec<usize>,
}

impl TimeDelay {
    /// Grid point with the largest delay.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.q
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &q)| (self.energies[i], q))
    }
}

/// Three-point derivative on a non-uniform grid: central inside, one-sided
/// (second order) at both ends. Exact for quadratics.
pub fn derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b, c) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        // derivative of the Lagrange parabola through a, b, c evaluated at x[i]
        let t = x[i];
        let da = ((t - x[b]) + (t - x[c])) / ((x[a] - x[b]) * (x[a] - x[c]));
        let db = ((t - x[a]) + (t - x[c])) / ((x[b] - x[a]) * (x[b] - x[c]));
        let dc = ((t - x[a]) + (t - x[b])) / ((x[c] - x[a]) * (x[c] - x[b]));
        out.push(da * f[a] + db * f[b] + dc * f[c]);
    }
    out
}

/// `Q = 2 d(delta)/dE` with `hbar = 1`.
pub fn time_delay(series: &PhaseSeries) -> Result<TimeDelay> {
    if series.len() < 3 {
        return Err(Error::InvalidInput(
            "time delay needs at least 3 points".into(),
        ));
    }
    series.check_continuous()?;
    let q = derivative(&series.energies, &series.deltas)
        .into_iter()
        .map(|d| 2.0 * d)
        .collect();
    let refine = series
        .deltas
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[1] - w[0]).abs() > RESOLVED_PHASE_STEP)
        .map(|(i, _)| i)
        .collect();
    Ok(TimeDelay {
        energies: series.energies.clone(),
        q,
        refine,
    })
}

/// Power law fitted on a log-log scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub exponent: f64,
    pub std_error: f64,
    pub prefactor: f64,
}

/// Slope of `ln(value)` against `ln(energy)` with its standard error.
/// Needs at least 5 points spanning a factor of 10 in energy.
pub fn threshold_exponent(energies: &[f64], values: &[f64]) -> Result<PowerLaw> {
    if energies.len() != values.len() || energies.len() < 5 {
        return Err(Error::InvalidInput(
            "threshold fit needs at least 5 matching points".into(),
        ));
    }
    if energies.iter().chain(values).any(|&v| !(v > 0.0)) {
        return Err(Error::Domain(
            "threshold fit needs positive energies and values".into(),
        ));
    }
    let (lo, hi) = energies
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| {
            (lo.min(e), hi.max(e))
        });
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(
            "threshold fit needs a decade of energies".into(),
        ));
    }
    let x: Vec<f64> = energies.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - icpt - slope * a).powi(2))
        .sum();
    Ok(PowerLaw {
        exponent: slope,
        std_error: (ss / (n - 2.0) / sxx).sqrt(),
        prefactor: icpt.exp(),
    })
}

/// A grid point where the partial cross section touches its unitarity bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityPeak {
    pub index: usize,
    pub k: f64,
    pub sigma: f64,
    /// `sigma / ((2J+1) 4 pi / k^2)`.
    pub ratio: f64,
}

/// Local maxima of `sigma / bound` that reach 99% of the bound
/// `(2J + 1) 4 pi / k^2`.
pub fn detect_unitarity_peaks(sigma: &[f64], k: &[f64], total_j: u32) -> Vec<UnitarityPeak> {
    let ratio: Vec<f64> = sigma
        .iter()
        .zip(k)
        .map(|(s, k)| s * k * k / ((2 * total_j + 1) as f64 * 4.0 * PI))
        .collect();
    (0..ratio.len())
        .filter(|&i| {
            let left = i == 0 || ratio[i] > ratio[i - 1];
            let right = i + 1 == ratio.len() || ratio[i] >= ratio[i + 1];
            left && right && ratio[i] >= 0.99
        })
        .map(|i| UnitarityPeak {
            index: i,
            k: k[i],
            sigma: sigma[i],
            ratio: ratio[i],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn linear_phase_has_constant_delay() {
        let s = PhaseSeries::from_fn(0, grid(30, 1e-3, 1.0), |e| 0.7 * e).unwrap();
        let q = time_delay(&s).unwrap();
        for v in q.q {
            assert!((v - 1.4).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_is_exact_for_quadratics() {
        let x = grid(7, 0.1, 3.0);
        let f: Vec<f64> = x.iter().map(|t| 2.0 * t * t - t + 4.0).collect();
        for (t, d) in x.iter().zip(derivative(&x, &f)) {
            assert!((d - (4.0 * t - 1.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn jumps_are_rejected_and_steep_regions_flagged() {
        let s = PhaseSeries::new(0, vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 0.1, 0.5, 0.6]).unwrap();
        assert_eq!(time_delay(&s).unwrap().refine, vec![1]);
        let s = PhaseSeries::new(0, vec![1.0, 2.0, 3.0], vec![0.0, 0.1, 3.0]).unwrap();
        assert!(matches!(
            time_delay(&s),
            Err(Error::BranchDiscontinuity { .. })
        ));
        let s = PhaseSeries::new(0, vec![1.0, 2.0], vec![0.0, 0.1]).unwrap();
        assert!(time_delay(&s).is_err());
    }

    #[test]
    fn exponent_of_exact_power() {
        let e = grid(12, 1e-9, 1e-6);
        let v: Vec<f64> = e.iter().map(|x| 3.0 * x.sqrt()).collect();
        let p = threshold_exponent(&e, &v).unwrap();
        assert!((p.exponent - 0.5).abs() < 1e-3);
        assert!((p.prefactor - 3.0).abs() < 1e-9);
        let flat = vec![2.0; e.len()];
        assert!(threshold_exponent(&e, &flat).unwrap().exponent.abs() < 1e-12);
    }

    #[test]
    fn exponent_preconditions() {
        let e = grid(6, 1.0, 5.0);
        assert!(threshold_exponent(&e, &e).is_err());
        let e = grid(6, 1.0, 100.0);
        let mut v = e.clone();
        v[2] = -1.0;
        assert!(matches!(threshold_exponent(&e, &v), Err(Error::Domain(_))));
    }

    #[test]
    fn unitarity_peaks() {
        let k = grid(20, 0.1, 1.0);
        let bound: Vec<f64> = k.iter().map(|k| 4.0 * PI / (k * k)).collect();
        let low: Vec<f64> = bound.iter().map(|b| 0.85 * b).collect();
        assert!(detect_unitarity_peaks(&low, &k, 0).is_empty());
        let mut one = low.clone();
        one[7] = bound[7];
        let peaks = detect_unitarity_peaks(&one, &k, 0);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].index, 7);
        assert!((peaks[0].ratio - 1.0).abs() < 1e-12);
        // the J=1 bound is three times larger
        assert!(detect_unitarity_peaks(&one, &k, 1).is_empty());
    }
}
