use rayon::prelude::*;

use super::config::Solver;
use super::system::System;
use crate::{Error, Result};

/// Bracket width at which pole bisection stops.
pub const POLE_BRACKET: f64 = 1e-4;
/// Minimum `|a_s|` (bohr) on both sides of a reported pole.
pub const POLE_FLANK: f64 = 1e3;
/// Default tolerance of [`find_lambda_for_as`] (bohr).
pub const AS_TOLERANCE: f64 = 0.01;

/// One lambda of a sweep. Failures are kept as messages and the sweep goes on.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub scattering_length: Option<f64>,
    /// `1/a`, also available at a pole where `a` itself is not.
    pub inverse_length: Option<f64>,
    pub bound_count: Option<u32>,
    pub error: Option<String>,
}

/// Lambda values where `a_s` reaches `-POLE_FLANK` and `+POLE_FLANK`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceWindow {
    pub lambda_negative: f64,
    pub lambda_positive: f64,
    /// Relative change of the isotropic potential at its minimum across the
    /// window.
    pub potential_variation: f64,
}

impl DivergenceWindow {
    pub fn width(&self) -> f64 {
        self.lambda_positive - self.lambda_negative
    }
}

/// A divergence of `a_s` bracketed in lambda, with the evidence for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub lo: f64,
    pub hi: f64,
    pub a_lo: f64,
    pub a_hi: f64,
    /// Bound states of the isotropic term at both ends.
    pub count_lo: Option<u32>,
    pub count_hi: Option<u32>,
    pub window: Option<DivergenceWindow>,
}

impl Pole {
    pub fn count_change(&self) -> Option<i64> {
        Some(self.count_hi? as i64 - self.count_lo? as i64)
    }

    /// `a_s` runs from below `-POLE_FLANK` to above `+POLE_FLANK` across a
    /// bracket narrower than `POLE_BRACKET`.
    pub fn is_resolved(&self) -> bool {
        self.hi - self.lo < POLE_BRACKET && self.a_lo < -POLE_FLANK && self.a_hi > POLE_FLANK
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleReport {
    pub poles: Vec<Pole>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub report: PoleReport,
}

fn row(system: &System, lambda: f64) -> SweepRow {
    let mut out = SweepRow {
        lambda,
        scattering_length: None,
        inverse_length: None,
        bound_count: None,
        error: None,
    };
    match system.scattering_length(lambda) {
        Ok(s) => {
            out.scattering_length = Some(s.a);
            out.inverse_length = Some(1.0 / s.a);
        }
        Err(Error::Pole { inverse_length }) => {
            out.inverse_length = Some(inverse_length);
            out.error = Some(Error::Pole { inverse_length }.to_string());
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    match system.bound_count(lambda) {
        Ok(n) => out.bound_count = Some(n),
        Err(e) => {
            out.error.get_or_insert_with(|| e.to_string());
        }
    }
    out
}

/// `a_s` over `lambdas` and every pole between neighbouring rows where
/// `a_s` jumps from negative to positive, bisected to `POLE_BRACKET`.
pub fn sweep_lambda(system: &System, lambdas: &[f64]) -> Sweep {
    let rows: Vec<SweepRow> = lambdas.par_iter().map(|&l| row(system, l)).collect();
    let mut poles = Vec::new();
    for (i, w) in rows.windows(2).enumerate() {
        if let (Some(a), Some(b)) = (w[0].inverse_length, w[1].inverse_length) {
            if a < 0.0 && b > 0.0 && w[1].lambda > w[0].lambda {
                if let Ok(p) = bisect_pole(system, &rows, i) {
                    poles.push(p);
                }
            }
        }
    }
    Sweep {
        rows,
        report: PoleReport { poles },
    }
}

fn bisect_pole(system: &System, rows: &[SweepRow], i: usize) -> Result<Pole> {
    let (mut lo, mut hi) = (rows[i].lambda, rows[i + 1].lambda);
    let (mut inv_lo, mut inv_hi) = (
        rows[i].inverse_length.unwrap(),
        rows[i + 1].inverse_length.unwrap(),
    );
    for _ in 0..80 {
        let resolved =
            hi - lo < POLE_BRACKET && -1.0 / inv_lo > POLE_FLANK && 1.0 / inv_hi > POLE_FLANK;
        if resolved {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let inv = system.inverse_length(mid)?;
        if inv < 0.0 {
            lo = mid;
            inv_lo = inv;
        } else {
            hi = mid;
            inv_hi = inv;
        }
    }
    let window = divergence_window(system, rows, i, lo, hi).ok();
    Ok(Pole {
        lo,
        hi,
        a_lo: 1.0 / inv_lo,
        a_hi: 1.0 / inv_hi,
        count_lo: system.bound_count(lo).ok(),
        count_hi: system.bound_count(hi).ok(),
        window,
    })
}

/// Bisect `1/a = target` on `[lo, hi]`, where `1/a` increases.
fn solve_inverse(system: &System, mut lo: f64, mut hi: f64, target: f64) -> Result<f64> {
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if system.inverse_length(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn divergence_window(
    system: &System,
    rows: &[SweepRow],
    i: usize,
    lo: f64,
    hi: f64,
) -> Result<DivergenceWindow> {
    let target = 1.0 / POLE_FLANK;
    // step outwards from the pole until a_s is inside +-POLE_FLANK
    let step = (rows[i + 1].lambda - rows[i].lambda).max(POLE_BRACKET);
    let mut left = rows[i].lambda;
    while system.inverse_length(left)? > -target {
        left -= step;
        if lo - left > 100.0 * step {
            return Err(Error::NotBracketed(
                "a_s stays beyond -1000 left of the pole".into(),
            ));
        }
    }
    let mut right = rows[i + 1].lambda;
    while system.inverse_length(right)? < target {
        right += step;
        if right - hi > 100.0 * step {
            return Err(Error::NotBracketed(
                "a_s stays beyond +1000 right of the pole".into(),
            ));
        }
    }
    let lambda_negative = solve_inverse(system, left, lo, -target)?;
    let lambda_positive = solve_inverse(system, hi, right, target)?;
    let pole = 0.5 * (lo + hi);
    let (radii, pair) = system.projection.pair[0].points();
    let (_, three) = system.projection.three[0].points();
    let imin = (0..radii.len())
        .min_by(|&a, &b| (pair[a] + pole * three[a]).total_cmp(&(pair[b] + pole * three[b])))
        .expect("non-empty projection grid");
    let v0 = pair[imin] + pole * three[imin];
    Ok(DivergenceWindow {
        lambda_negative,
        lambda_positive,
        potential_variation: ((lambda_positive - lambda_negative) * three[imin] / v0).abs(),
    })
}

/// Lambda in `bracket` where `a_s` equals `target` (bohr), to within
/// `tolerance`, by regula falsi with Illinois damping and bisection
/// fallback. `a_s` falls monotonically with lambda between poles, so a rise
/// across the bracket, a pole at an end point or a change of the bound-state
/// count means a pole inside.
pub fn find_lambda_for_as(
    system: &System,
    target: f64,
    bracket: [f64; 2],
    tolerance: f64,
) -> Result<f64> {
    let [mut lo, mut hi] = bracket;
    let pole = || Error::PoleInBracket {
        lo: bracket[0],
        hi: bracket[1],
    };
    let a = |l: f64| match system.scattering_length(l) {
        Ok(s) => Ok(s.a),
        Err(Error::Pole { .. }) => Err(pole()),
        Err(e) => Err(e),
    };
    let (a_lo, a_hi) = (a(lo)?, a(hi)?);
    if a_lo < a_hi {
        return Err(pole());
    }
    if system.config.solver == Solver::Isotropic
        && system.bound_count(lo)? != system.bound_count(hi)?
    {
        return Err(pole());
    }
    let (mut f_lo, mut f_hi) = (a_lo - target, a_hi - target);
    if f_lo.abs() < tolerance {
        return Ok(lo);
    }
    if f_hi.abs() < tolerance {
        return Ok(hi);
    }
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::NotBracketed(format!(
            "a_s runs from {a_lo:.3} to {a_hi:.3} on [{lo}, {hi}], target {target}"
        )));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let width = hi - lo;
        let mut x = lo - f_lo * width / (f_hi - f_lo);
        if !(x > lo + 1e-3 * width && x < hi - 1e-3 * width) {
            x = 0.5 * (lo + hi);
        }
        let ax = a(x)?;
        if ax > a_lo || ax < a_hi {
            return Err(pole());
        }
        let fx = ax - target;
        if fx.abs() < tolerance || width < 1e-14 {
            return Ok(x);
        }
        if fx > 0.0 {
            lo = x;
            f_lo = fx;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = x;
            f_hi = fx;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    Err(Error::FitFailed(format!(
        "lambda search for a_s = {target} did not converge"
    )))
}
