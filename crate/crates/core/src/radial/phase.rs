use std::f64::consts::PI;

use super::propagate::{propagate, propagate_from, Propagation, RadialProblem};
use crate::special::{riccati_j, riccati_n, riccati_phase};
use crate::{Error, Result};

/// Phase shift at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub energy: f64,
    pub ell: u32,
    /// Phase shift in radians on the continuous branch that vanishes at high
    /// energy for potentials without a hard core.
    pub delta: f64,
    pub k: f64,
    /// Radius at which the reported value was matched.
    pub r_match: f64,
}

/// Matching controls for [`phase_shift_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOptions {
    /// Explicit first matching radius; chosen automatically when `None`.
    pub r_match: Option<f64>,
    /// Largest accepted change of the phase between `r_match` and `2 r_match`.
    pub tolerance: f64,
    /// Required ratio `|V(r_match)| / E`.
    pub potential_fraction: f64,
    /// Target for the estimated phase picked up beyond `r_match`.
    pub tail_phase: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            r_match: None,
            tolerance: 1e-6,
            potential_fraction: 1e-3,
            tail_phase: 1e-7,
        }
    }
}

/// Largest radius considered when searching for a matching point.
const R_SEARCH_LIMIT: f64 = 1e7;

/// `tan(delta)` from the log-derivative `y` at radius `r`.
pub fn tan_delta(ell: u32, k: f64, r: f64, y: f64) -> f64 {
    let j = riccati_j(ell, k * r);
    let n = riccati_n(ell, k * r);
    (y * j.value - k * j.deriv) / (k * n.deriv - y * n.value)
}

/// Phase shift on the continuous branch. With `nodes` zeros of the
/// wavefunction inside `r`, the total phase `theta(kr) + delta` must lie in
/// `[nodes pi, (nodes + 1) pi)`, where `theta` is the free Riccati phase.
pub fn absolute_phase(ell: u32, k: f64, r: f64, y: f64, nodes: u32) -> f64 {
    let principal = tan_delta(ell, k, r, y).atan();
    let theta = riccati_phase(ell, k * r);
    let total = (theta + principal) / PI;
    let mut m = nodes as f64 - total.floor();
    let frac = total - total.floor();
    // a node sitting on r itself: decide from the sign of y which side it is
    if frac < 1e-9 || frac > 1.0 - 1e-9 {
        let nearest = total.round();
        let wanted = if y < 0.0 {
            nodes as f64 + 1.0
        } else {
            nodes as f64
        };
        m = wanted - nearest;
    }
    principal + m * PI
}

/// Smallest radius beyond which `|V| < fraction E` everywhere and the phase
/// estimated from the remaining tail is below `tail_phase`.
pub fn choose_r_match(problem: &RadialProblem, options: &MatchOptions) -> Result<f64> {
    let e = problem.energy;
    if !(e > 0.0) {
        return Err(Error::Domain(format!(
            "scattering energy must be positive, got {e}"
        )));
    }
    let k = (2.0 * problem.mass * e).sqrt();
    let pot = problem.potential;
    let floor = pot.breakpoints().into_iter().fold(problem.r_min, f64::max);
    let ok = |r: f64| {
        let v = pot.value(r).abs();
        v < options.potential_fraction * e
            && 2.0 * problem.mass / k * v * r / 5.0 < options.tail_phase
    };
    let ratio: f64 = 1.05;
    let mut r = floor * ratio;
    let mut candidate = None;
    while r < R_SEARCH_LIMIT {
        if ok(r) {
            candidate.get_or_insert(r);
        } else {
            candidate = None;
        }
        r *= ratio;
    }
    candidate.ok_or_else(|| Error::Unconverged {
        drift: f64::INFINITY,
        tolerance: options.tolerance,
    })
}

/// Phase shift with automatic matching radius and the two-radius check.
pub fn phase_shift(problem: &RadialProblem) -> Result<PhasePoint> {
    phase_shift_with(problem, &MatchOptions::default())
}

pub fn phase_shift_with(problem: &RadialProblem, options: &MatchOptions) -> Result<PhasePoint> {
    let r1 = match options.r_match {
        Some(r) => r,
        None => choose_r_match(problem, options)?,
    };
    let k = wave_number(problem)?;
    let first = propagate(problem, r1)?;
    let d1 = absolute_phase(problem.ell, k, r1, first.y, first.nodes);
    let r2 = 2.0 * r1;
    let second = propagate_from(problem, r1, first.y, r2)?;
    let nodes = first.nodes + second.nodes;
    let d2 = absolute_phase(problem.ell, k, r2, second.y, nodes);
    let drift = (d2 - d1).abs();
    if drift > options.tolerance {
        return Err(Error::Unconverged {
            drift,
            tolerance: options.tolerance,
        });
    }
    Ok(PhasePoint {
        energy: problem.energy,
        ell: problem.ell,
        delta: d2,
        k,
        r_match: r2,
    })
}

/// Phase shift matched at a single given radius, without the consistency check.
pub fn phase_shift_at(problem: &RadialProblem, r_match: f64) -> Result<PhasePoint> {
    let k = wave_number(problem)?;
    let Propagation { y, nodes, .. } = propagate(problem, r_match)?;
    Ok(PhasePoint {
        energy: problem.energy,
        ell: problem.ell,
        delta: absolute_phase(problem.ell, k, r_match, y, nodes),
        k,
        r_match,
    })
}

fn wave_number(problem: &RadialProblem) -> Result<f64> {
    if !(problem.energy > 0.0) {
        return Err(Error::Domain(format!(
            "scattering energy must be positive, got {}",
            problem.energy
        )));
    }
    Ok((2.0 * problem.mass * problem.energy).sqrt())
}

/// Nearest-branch continuation of phases known modulo pi.
pub fn unwrap_phases(deltas: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let v = match out.last() {
            Some(&prev) => d + PI * ((prev - d) / PI).round(),
            None => d,
        };
        out.push(v);
    }
    out
}

/// Indices `i` where `|delta[i+1] - delta[i]| > pi/2`, i.e. where the energy
/// grid is too coarse to follow the phase.
pub fn refinement_needed(deltas: &[f64]) -> Vec<usize> {
    deltas
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[1] - w[0]).abs() > PI / 2.0)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::potential::{SquareWell, ZeroPotential};
    use crate::radial::propagate::InnerBoundary;

    #[test]
    fn free_particle_has_zero_phase() {
        let pot = ZeroPotential;
        for ell in 0..4 {
            let mut prob = RadialProblem::new(&pot, 1.0, ell, 0.02, 1e-3);
            prob.inner = InnerBoundary::LogDerivative((ell + 1) as f64 / 1e-3);
            let p = phase_shift_at(&prob, 40.0).unwrap();
            assert!(p.delta.abs() < 1e-6, "l={ell}: {}", p.delta);
        }
    }

    #[test]
    fn hard_sphere_phase() {
        // k = 0.1, R = 5 -> delta = -0.5
        let pot = ZeroPotential;
        let mut prob = RadialProblem::new(&pot, 0.5, 0, 0.01, 5.0);
        prob.inner = InnerBoundary::HardWall;
        let p = phase_shift_at(&prob, 60.0).unwrap();
        assert!((p.delta + 0.5).abs() < 1e-8, "{}", p.delta);
    }

    #[test]
    fn deep_square_well_branch() {
        // kappa0 R well above 3 pi: three bound states, phase near 3 pi at low energy
        let pot = SquareWell {
            depth: 2.0,
            radius: 4.0,
        };
        let e: f64 = 1e-4;
        let mut prob = RadialProblem::new(&pot, 1.0, 0, e, 1e-6);
        prob.inner = InnerBoundary::HardWall;
        prob.steps = prob.steps.scaled(0.25);
        let p = phase_shift(&prob).unwrap();
        let k = (2.0 * e).sqrt();
        let kk = (2.0 * (e + 2.0)).sqrt();
        // wall at r0 = 1e-6: inside psi = sin(K (r - r0))
        let want0 = (k / kk * (kk * (4.0 - 1e-6)).tan()).atan() - k * 4.0;
        let n = ((p.delta - want0) / PI).round();
        assert!(
            (p.delta - want0 - n * PI).abs() < 1e-8,
            "{} {}",
            p.delta,
            want0 + n * PI
        );
        let bound = (kk * 4.0 / PI + 0.5).floor();
        assert_eq!(n, bound);
    }

    #[test]
    fn unwrap_removes_pi_jumps() {
        let raw = [0.1, 0.4, 1.4, -1.5, -1.2];
        let u = unwrap_phases(&raw);
        assert!((u[3] - (-1.5 + PI)).abs() < 1e-15);
        assert!(refinement_needed(&u).is_empty());
        assert_eq!(refinement_needed(&raw), vec![2]);
    }
}
