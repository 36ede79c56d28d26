use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};

use super::delay::time_delay;
use super::series::PhaseSeries;
use crate::units::hartree_to_microkelvin;
use crate::{Error, Result};

/// Background-plus-resonance model of one partial-wave phase:
///
/// `delta(E) = c E^(l+1/2) + delta_res(E)`,
/// `delta_res = -arctan[(gamma(E)/2) / (E - E_r)]` taken on the branch that
/// rises from 0 below the resonance to pi above it, and
/// `gamma(E) = gamma_r (E/E_r)^(l+1/2)`. Since `E ~ k^2` this is the same
/// function as `gamma_r (k/k_r)^(2l+1)`. Energies in Hartree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceModel {
    pub ell: u32,
    pub e_r: f64,
    pub gamma_r: f64,
    /// Background amplitude `c` in `Hartree^-(l+1/2)`.
    pub background: f64,
    /// Constant `d(eta)/dE` entering the time delay.
    pub eta_slope: f64,
}

impl ResonanceModel {
    pub fn new(ell: u32, e_r: f64, gamma_r: f64, background: f64) -> Self {
        Self {
            ell,
            e_r,
            gamma_r,
            background,
            eta_slope: 0.0,
        }
    }

    /// s-wave background `delta_bg = -k a_bg` for reduced mass `mass`.
    pub fn with_background_length(mut self, a_bg: f64, mass: f64) -> Self {
        self.background = -a_bg * (2.0 * mass).sqrt();
        self
    }

    /// `a_bg` such that `delta_bg = -k a_bg`; meaningful for `l = 0`.
    pub fn background_length(&self, mass: f64) -> f64 {
        -self.background / (2.0 * mass).sqrt()
    }

    pub fn exponent(&self) -> f64 {
        self.ell as f64 + 0.5
    }

    pub fn width(&self, e: f64) -> f64 {
        self.gamma_r * (e / self.e_r).powf(self.exponent())
    }

    pub fn background_phase(&self, e: f64) -> f64 {
        self.background * e.powf(self.exponent())
    }

    pub fn resonant_phase(&self, e: f64) -> f64 {
        PI - (0.5 * self.width(e)).atan2(e - self.e_r)
    }

    pub fn phase(&self, e: f64) -> f64 {
        self.background_phase(e) + self.resonant_phase(e)
    }

    /// Time delay (atomic units) as the sum of a Lorentzian term weighted by
    /// `1 - d(eta)/dE`, the background term `(2/v) d(delta_bg)/dk` and the
    /// width-derivative term `-(E - E_r)/D (1/v) d(gamma)/dk`, with
    /// `D = (E - E_r)^2 + gamma^2/4`.
    pub fn time_delay_terms(&self, e: f64) -> [f64; 3] {
        let n = self.exponent();
        let g = self.width(e);
        let x = e - self.e_r;
        let d = x * x + 0.25 * g * g;
        // (1/v) d/dk = d/dE
        let dg = n * g / e;
        [
            g * (1.0 - self.eta_slope) / d,
            2.0 * self.background * n * e.powf(n - 1.0),
            -x * dg / d,
        ]
    }

    pub fn time_delay(&self, e: f64) -> f64 {
        self.time_delay_terms(e).iter().sum()
    }
}

/// Resonance class from the width-to-position ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Resonant,
    Marginal,
    Nonresonant,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::Resonant => "resonant",
            Classification::Marginal => "marginal",
            Classification::Nonresonant => "nonresonant",
        }
    }
}

/// Half-width of the marginal band around `gamma_r = E_r`, relative.
pub const MARGINAL_BAND: f64 = 0.2;
/// Below this ratio the phase rises through pi over a narrow window.
pub const RAPID_RATIO: f64 = 0.1;

/// Resonant when `gamma_r < E_r`, nonresonant otherwise, and marginal when
/// `gamma_r / E_r` lies within 20% of one (the band takes precedence).
pub fn classify(e_r: f64, gamma_r: f64) -> Classification {
    let ratio = gamma_r / e_r;
    if (ratio - 1.0).abs() <= MARGINAL_BAND {
        Classification::Marginal
    } else if ratio < 1.0 {
        Classification::Resonant
    } else {
        Classification::Nonresonant
    }
}

/// `gamma_r < 0.1 E_r`: the phase jumps by pi over a window much narrower
/// than `E_r`.
pub fn is_rapid(e_r: f64, gamma_r: f64) -> bool {
    gamma_r < RAPID_RATIO * e_r
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceFit {
    pub model: ResonanceModel,
    /// Bare level `E_0 = E_r - eta`. A constant shift cannot be separated from
    /// `E_r` in `delta(E)`, so `eta = 0` and `E_0 = E_r`.
    pub e0: f64,
    pub eta: f64,
    /// Multiple of pi added to the model to match the branch of the data.
    pub branch: i64,
    pub classification: Classification,
    pub rapid: bool,
    /// RMS phase residual, rad.
    pub residual: f64,
    pub iterations: usize,
}

impl ResonanceFit {
    pub fn e_r(&self) -> f64 {
        self.model.e_r
    }

    pub fn gamma_r(&self) -> f64 {
        self.model.gamma_r
    }

    /// `key = value` lines, energies in microkelvin.
    pub fn to_key_value(&self) -> String {
        let m = &self.model;
        let mut out = String::new();
        let _ = writeln!(out, "ell = {}", m.ell);
        let _ = writeln!(out, "e_r_uK = {:.9e}", hartree_to_microkelvin(m.e_r));
        let _ = writeln!(
            out,
            "gamma_r_uK = {:.9e}",
            hartree_to_microkelvin(m.gamma_r)
        );
        let _ = writeln!(out, "e0_uK = {:.9e}", hartree_to_microkelvin(self.e0));
        let _ = writeln!(out, "eta_uK = {:.9e}", hartree_to_microkelvin(self.eta));
        let _ = writeln!(out, "eta_slope = {:.6e}", m.eta_slope);
        let _ = writeln!(out, "background_au = {:.9e}", m.background);
        let _ = writeln!(out, "threshold_exponent = {}", m.exponent());
        let _ = writeln!(out, "branch = {}", self.branch);
        let _ = writeln!(out, "classification = {}", self.classification.label());
        let _ = writeln!(out, "rapid = {}", self.rapid);
        let _ = writeln!(out, "residual_rad = {:.3e}", self.residual);
        out
    }
}

/// RMS below which a pure background already describes the data (rad).
const FLAT_TOLERANCE: f64 = 1e-3;

/// Least-squares fit of [`ResonanceModel`] to a continuous phase series.
///
/// Starting points are spread around the time-delay maximum
/// `(E*, gamma* = 4/Q_max)`; each start runs Levenberg-Marquardt in
/// `(ln E_r, ln gamma_r, c)`. Fails with `FeatureAbsent` when a background
/// alone fits the data, when the best `E_r` lies outside the sampled range or
/// when the resonance term does not halve the background-only residual.
pub fn fit_breit_wigner(series: &PhaseSeries) -> Result<ResonanceFit> {
    if series.len() < 5 {
        return Err(Error::InvalidInput(
            "a resonance fit needs at least 5 points".into(),
        ));
    }
    let delay = time_delay(series)?;
    let ell = series.ell;
    let n = ell as f64 + 0.5;
    let scale = *series.energies.last().unwrap();
    let x: Vec<f64> = series.energies.iter().map(|e| e / scale).collect();
    let basis: Vec<f64> = x.iter().map(|v| v.powf(n)).collect();
    let data = &series.deltas;

    let background_only = {
        // c and a branch offset in pi
        let (c, m) = background_fit(&basis, data);
        rms(basis.iter().zip(data).map(|(b, d)| c * b + m - d))
    };
    if background_only < FLAT_TOLERANCE {
        return Err(Error::FeatureAbsent(format!(
            "a pure E^{n} background fits to {background_only:.1e} rad"
        )));
    }

    let (e_star, q_max) = delay.peak().unwrap();
    if !(q_max > 0.0) {
        return Err(Error::FeatureAbsent("no positive time delay".into()));
    }
    let gamma_star = 4.0 / q_max / scale;
    let mut best: Option<(f64, [f64; 3], i64, usize)> = None;
    for fe in [1.0, 0.8, 1.25] {
        for fg in [1.0, 0.3, 3.0] {
            let e_r = e_star / scale * fe;
            let g = gamma_star * fg;
            let Some(result) = fit_from(&x, &basis, data, n, e_r, g) else {
                continue;
            };
            if best.as_ref().is_none_or(|b| result.0 < b.0) {
                best = Some(result);
            }
        }
    }
    let (cost, p, branch, iterations) =
        best.ok_or_else(|| Error::FitFailed("no start converged to a finite model".into()))?;
    let residual = (cost / x.len() as f64).sqrt();
    let e_r = p[0].exp() * scale;
    let gamma_r = p[1].exp() * scale;
    if e_r < series.energies[0] || e_r > scale {
        return Err(Error::FeatureAbsent(format!(
            "fitted position {e_r:.3e} lies outside the sampled energies"
        )));
    }
    if residual > 0.5 * background_only {
        return Err(Error::FeatureAbsent(format!(
            "resonance term leaves {residual:.2e} rad against {background_only:.2e} for background only"
        )));
    }
    let mut model = ResonanceModel::new(ell, e_r, gamma_r, p[2] / scale.powf(n));
    model.eta_slope = eta_slope(&model, &delay.energies, &delay.q);
    Ok(ResonanceFit {
        model,
        e0: e_r,
        eta: 0.0,
        branch,
        classification: classify(e_r, gamma_r),
        rapid: is_rapid(e_r, gamma_r),
        residual,
        iterations,
    })
}

fn rms(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), r| (s + r * r, n + 1));
    (s / n.max(1) as f64).sqrt()
}

/// Least-squares `c` for `c b_i + m pi = d_i`, with the integer `m` chosen
/// from the first point. Returns `(c, m pi)`.
fn background_fit(basis: &[f64], data: &[f64]) -> (f64, f64) {
    let m = (data[0] / PI).round() * PI;
    let num: f64 = basis.iter().zip(data).map(|(b, d)| b * (d - m)).sum();
    let den: f64 = basis.iter().map(|b| b * b).sum();
    (num / den, m)
}

/// One local fit in scaled energies. Returns `(cost, params, branch, iterations)`.
fn fit_from(
    x: &[f64],
    basis: &[f64],
    data: &[f64],
    n: f64,
    e_r: f64,
    gamma: f64,
) -> Option<(f64, [f64; 3], i64, usize)> {
    let resonant = |p: &[f64; 3], xi: f64| {
        let (er, g) = (p[0].exp(), p[1].exp());
        PI - (0.5 * g * (xi / er).powf(n)).atan2(xi - er)
    };
    // initial background amplitude from the data left after the resonance
    let mut p = [e_r.ln(), gamma.ln(), 0.0];
    let rest: Vec<f64> = x
        .iter()
        .zip(data)
        .map(|(&xi, d)| d - resonant(&p, xi))
        .collect();
    let (c0, _) = background_fit(basis, &rest);
    p[2] = c0;
    let mut total_iterations = 0;
    let mut branch = 0i64;
    for _ in 0..4 {
        // pick the branch from the current model, then fit with it fixed
        let offs: f64 = x
            .iter()
            .zip(basis)
            .zip(data)
            .map(|((&xi, b), d)| d - p[2] * b - resonant(&p, xi))
            .sum::<f64>()
            / x.len() as f64;
        let m = (offs / PI).round() as i64;
        if total_iterations > 0 && m == branch {
            break;
        }
        branch = m;
        let shift = m as f64 * PI;
        let residuals = |q: &[f64; 3]| -> Vec<f64> {
            x.iter()
                .zip(basis)
                .zip(data)
                .map(|((&xi, b), d)| q[2] * b + resonant(q, xi) + shift - d)
                .collect()
        };
        let (q, iterations) = levenberg_marquardt(&residuals, p)?;
        p = q;
        total_iterations += iterations;
    }
    let shift = branch as f64 * PI;
    let cost: f64 = x
        .iter()
        .zip(basis)
        .zip(data)
        .map(|((&xi, b), d)| (p[2] * b + resonant(&p, xi) + shift - d).powi(2))
        .sum();
    cost.is_finite()
        .then_some((cost, p, branch, total_iterations))
}

/// Levenberg-Marquardt with Marquardt diagonal scaling and a central
/// difference Jacobian. `None` if the residuals become non-finite.
fn levenberg_marquardt(
    f: &dyn Fn(&[f64; 3]) -> Vec<f64>,
    mut p: [f64; 3],
) -> Option<([f64; 3], usize)> {
    let cost = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut r = f(&p);
    let mut c = cost(&r);
    if !c.is_finite() {
        return None;
    }
    let mut mu = 1e-3;
    for iteration in 0..500 {
        let mut jac = vec![[0.0; 3]; r.len()];
        for j in 0..3 {
            let h = 1e-6 * (1.0 + p[j].abs());
            let (mut hi, mut lo) = (p, p);
            hi[j] += h;
            lo[j] -= h;
            let (rh, rl) = (f(&hi), f(&lo));
            for (row, (a, b)) in jac.iter_mut().zip(rh.iter().zip(&rl)) {
                row[j] = (a - b) / (2.0 * h);
            }
        }
        let mut a = Matrix3::zeros();
        let mut g = Vector3::zeros();
        for (row, ri) in jac.iter().zip(&r) {
            let v = Vector3::from(*row);
            a += v * v.transpose();
            g += v * *ri;
        }
        let mut accepted = false;
        while mu < 1e12 {
            let mut damped = a;
            for i in 0..3 {
                damped[(i, i)] += mu * a[(i, i)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-g)) else {
                mu *= 10.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let rt = f(&trial);
            let ct = cost(&rt);
            if ct.is_finite() && ct <= c {
                let small = step
                    .iter()
                    .zip(&p)
                    .all(|(s, v)| s.abs() < 1e-12 * (1.0 + v.abs()));
                let flat = c - ct <= 1e-15 * c;
                p = trial;
                r = rt;
                c = ct;
                mu = (mu / 3.0).max(1e-15);
                accepted = true;
                if small || flat {
                    return Some((p, iteration + 1));
                }
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            return Some((p, iteration + 1));
        }
    }
    Some((p, 500))
}

/// `1 - s`, where `s` scales the Lorentzian term so that the model delay
/// best matches the numerical one. Zero for fewer than 3 interior points.
fn eta_slope(model: &ResonanceModel, energies: &[f64], q: &[f64]) -> f64 {
    let base = ResonanceModel {
        eta_slope: 0.0,
        ..*model
    };
    let (mut num, mut den) = (0.0, 0.0);
    let inner = 1..energies.len().saturating_sub(1);
    if inner.len() < 3 {
        return 0.0;
    }
    for i in inner {
        let [lor, bg, disp] = base.time_delay_terms(energies[i]);
        num += lor * (q[i] - bg - disp);
        den += lor * lor;
    }
    if den > 0.0 {
        1.0 - num / den
    } else {
        0.0
    }
}
