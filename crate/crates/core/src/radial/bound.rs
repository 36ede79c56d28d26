use super::propagate::{propagate, RadialProblem};
use crate::{Error, Result};

/// Largest radius scanned for turning points and asymptotic regions.
const R_LIMIT: f64 = 1e6;
/// Decay lengths propagated beyond the outer turning point.
const DECAY_LENGTHS: f64 = 30.0;

fn radial_grid(r_min: f64) -> impl Iterator<Item = f64> {
    (0..)
        .map(move |i| r_min * 1.02f64.powi(i))
        .take_while(|&r| r < R_LIMIT)
}

/// Lowest value of the effective potential `V + l(l+1)/(2 mu r^2)` on a
/// geometric grid.
fn effective_minimum(problem: &RadialProblem) -> f64 {
    let l = problem.ell as f64;
    radial_grid(problem.r_min)
        .map(|r| problem.potential.value(r) + l * (l + 1.0) / (2.0 * problem.mass * r * r))
        .fold(f64::INFINITY, f64::min)
}

/// Number of bound states with energy below `energy < 0`.
///
/// Counts nodes of the outward solution up to a point well inside the outer
/// forbidden region, plus one if the solution there decays faster than the
/// local decaying exponential (it would cross zero once more further out).
pub fn count_below(problem: &RadialProblem, energy: f64) -> Result<u32> {
    if !(energy < 0.0) {
        return Err(Error::Domain(format!(
            "count_below needs E < 0, got {energy}"
        )));
    }
    let p = problem.with_energy(energy);
    p.validate()?;
    let turning = radial_grid(p.r_min).filter(|&r| p.q(r) > 0.0).last();
    let Some(r_t) = turning else {
        return Ok(0);
    };
    let kappa = (-2.0 * p.mass * energy).sqrt();
    let r_far = (r_t + DECAY_LENGTHS / kappa).min(R_LIMIT);
    let out = propagate(&p, r_far)?;
    let q_far = p.q(r_far);
    let extra = if q_far < 0.0 && out.y < -(-q_far).sqrt() {
        1
    } else {
        0
    };
    Ok(out.nodes + extra)
}

/// Total number of bound states, from the zero-energy solution.
pub fn count_bound_states(problem: &RadialProblem) -> Result<u32> {
    let p = problem.with_energy(0.0);
    p.validate()?;
    // far enough out that the potential no longer bends the zero-energy solution
    let r_far = radial_grid(p.r_min)
        .filter(|&r| 2.0 * p.mass * p.potential.value(r).abs() * r * r > 1e-8)
        .last()
        .map_or(p.r_min * 2.0, |r| r * 1.02)
        .min(R_LIMIT);
    let out = propagate(&p, r_far)?;
    // beyond r_far: psi = A r^{l+1} + B r^{-l}; one more zero iff t < -1 with
    // t = B r_far^{-2l-1} / A
    let l = p.ell as f64;
    let yr = out.y * r_far;
    let extra = if p.ell == 0 {
        yr < 0.0
    } else {
        let t = ((l + 1.0) - yr) / (yr + l);
        t < -1.0
    };
    Ok(out.nodes + u32::from(extra))
}

/// All bound-state energies (Hartree) for the partial wave of `problem`,
/// ordered from the deepest level up. Each level is bracketed by the
/// counting function and bisected to `tolerance`.
pub fn bound_states(problem: &RadialProblem, tolerance: f64) -> Result<Vec<f64>> {
    let floor = effective_minimum(problem);
    if !(floor < 0.0) {
        return Err(Error::NoWell);
    }
    let total = count_bound_states(problem)?;
    let mut levels = Vec::with_capacity(total as usize);
    let mut lo = floor;
    for n in 0..total {
        let e = bisect_level(problem, n, lo, tolerance)?;
        levels.push(e);
        lo = e;
    }
    Ok(levels)
}

/// Energy of level `n` (0 = deepest), or `None` if there are at most `n`
/// levels.
pub fn bound_level(problem: &RadialProblem, n: u32, tolerance: f64) -> Result<Option<f64>> {
    let floor = effective_minimum(problem);
    if !(floor < 0.0) {
        return Err(Error::NoWell);
    }
    if count_bound_states(problem)? <= n {
        return Ok(None);
    }
    bisect_level(problem, n, floor, tolerance).map(Some)
}

/// `E_n` is where `count_below` jumps from `n` to `n + 1`.
fn bisect_level(problem: &RadialProblem, n: u32, floor: f64, tolerance: f64) -> Result<f64> {
    let (mut lo, mut hi) = (floor, 0.0f64);
    let mut iterations = 0;
    while hi - lo > tolerance.max(1e-15 * lo.abs()) {
        let mid = 0.5 * (lo + hi);
        if mid >= 0.0 {
            break;
        }
        if count_below(problem, mid)? > n {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Unconverged {
                drift: hi - lo,
                tolerance,
            });
        }
    }
    Ok(0.5 * (lo + hi))
}
