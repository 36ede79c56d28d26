use std::f64::consts::PI;

use super::potential::RadialPotential;
use crate::{Error, Result};

/// Step-size rule for the log-derivative propagator.
///
/// The step is a fixed fraction of the local de Broglie wavelength (computed
/// from the isotropic potential only, so single- and coupled-channel runs on
/// the same potential use identical grids), capped at `well_cap` at short
/// range and at `relative_cap * r` further out. Near the origin the step never
/// exceeds a tenth of `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    /// Steps per local wavelength.
    pub per_wavelength: f64,
    pub well_cap: f64,
    pub relative_cap: f64,
    /// Uniform factor applied to every step (0.5 halves all steps).
    pub scale: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            per_wavelength: 320.0,
            well_cap: 0.02,
            relative_cap: 0.002,
            scale: 1.0,
        }
    }
}

impl StepPolicy {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            scale: self.scale * factor,
            ..self
        }
    }

    /// Step at `r` given the local wave number `k_local = sqrt(2 mu |E - V|)`.
    pub fn step(&self, r: f64, k_local: f64) -> f64 {
        let cap = self.well_cap.max(self.relative_cap * r).min(0.1 * r);
        let wave = if k_local > 0.0 {
            2.0 * PI / (self.per_wavelength * k_local)
        } else {
            f64::INFINITY
        };
        self.scale * wave.min(cap)
    }
}

/// One Simpson panel `[a, a + 2h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub h: f64,
    /// The panel starts on a discontinuity: evaluate from the right there.
    pub a_on_break: bool,
    /// The panel ends on a discontinuity: evaluate from the left there.
    pub b_on_break: bool,
}

impl Panel {
    pub fn b(&self) -> f64 {
        self.a + 2.0 * self.h
    }
}

/// Panels covering `[from, to]`, ending exactly on every breakpoint inside.
pub fn build_panels(
    from: f64,
    to: f64,
    breakpoints: &[f64],
    policy: &StepPolicy,
    k_local: impl Fn(f64) -> f64,
) -> Result<Vec<Panel>> {
    if !(to > from) || !from.is_finite() || !to.is_finite() {
        return Err(Error::Domain(format!(
            "invalid propagation range [{from}, {to}]"
        )));
    }
    let mut targets: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > from && b < to)
        .collect();
    targets.sort_by(f64::total_cmp);
    targets.push(to);
    let mut panels = Vec::new();
    let mut r = from;
    let mut start_on_break = breakpoints.iter().any(|&b| b == from);
    for (ti, &t) in targets.iter().enumerate() {
        let target_is_break = ti + 1 < targets.len();
        while r < t {
            let h = policy.step(r, k_local(r));
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::NonFinite(format!("step size {h} at r = {r}")));
            }
            let remaining = t - r;
            let (h, last) = if remaining <= 2.0 * h * (1.0 + 1e-9) {
                (0.5 * remaining, true)
            } else if remaining < 4.0 * h {
                (0.25 * remaining, false)
            } else {
                (h, false)
            };
            panels.push(Panel {
                a: r,
                h,
                a_on_break: start_on_break,
                b_on_break: last && target_is_break,
            });
            start_on_break = false;
            r = if last { t } else { r + 2.0 * h };
        }
        start_on_break = target_is_break;
    }
    Ok(panels)
}

/// Boundary condition at the start of the propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerBoundary {
    /// Start inside a classically forbidden region with the WKB log-derivative.
    Wkb,
    /// Impenetrable wall: the wavefunction vanishes at the start radius.
    HardWall,
    /// Explicit log-derivative value.
    LogDerivative(f64),
}

/// A single-channel radial problem `psi'' = [2 mu (V - E) + l(l+1)/r^2] psi`
/// in atomic units.
#[derive(Clone, Copy)]
pub struct RadialProblem<'a> {
    pub potential: &'a dyn RadialPotential,
    pub mass: f64,
    pub ell: u32,
    pub energy: f64,
    pub r_min: f64,
    pub inner: InnerBoundary,
    pub steps: StepPolicy,
}

impl<'a> RadialProblem<'a> {
    pub fn new(
        potential: &'a dyn RadialPotential,
        mass: f64,
        ell: u32,
        energy: f64,
        r_min: f64,
    ) -> Self {
        Self {
            potential,
            mass,
            ell,
            energy,
            r_min,
            inner: InnerBoundary::Wkb,
            steps: StepPolicy::default(),
        }
    }

    pub fn with_energy(&self, energy: f64) -> Self {
        Self { energy, ..*self }
    }

    pub fn with_ell(&self, ell: u32) -> Self {
        Self { ell, ..*self }
    }

    /// Local `Q(r) = 2 mu (E - V) - l(l+1)/r^2`, so that `psi'' = -Q psi`.
    pub fn q(&self, r: f64) -> f64 {
        self.q_with(r, self.potential.value(r))
    }

    fn q_with(&self, r: f64, v: f64) -> f64 {
        let l = self.ell as f64;
        2.0 * self.mass * (self.energy - v) - l * (l + 1.0) / (r * r)
    }

    /// Wave number used by the step rule; the centrifugal term is left out.
    pub fn k_local(&self, r: f64) -> f64 {
        (2.0 * self.mass * (self.energy - self.potential.value(r)).abs()).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return Err(Error::InvalidInput(format!(
                "reduced mass must be positive, got {}",
                self.mass
            )));
        }
        if !(self.r_min > 0.0) {
            return Err(Error::InvalidInput(format!(
                "r_min must be positive, got {}",
                self.r_min
            )));
        }
        if !self.energy.is_finite() {
            return Err(Error::NonFinite("energy".into()));
        }
        Ok(())
    }

    /// Initial log-derivative at `r_min`.
    pub fn initial_logderiv(&self) -> Result<f64> {
        match self.inner {
            InnerBoundary::HardWall => Ok(f64::INFINITY),
            InnerBoundary::LogDerivative(y) => Ok(y),
            InnerBoundary::Wkb => {
                let q = self.q(self.r_min);
                if !q.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "potential at r_min = {}",
                        self.r_min
                    )));
                }
                if q >= 0.0 {
                    return Err(Error::Domain(format!(
                        "r_min = {} is not in a classically forbidden region",
                        self.r_min
                    )));
                }
                Ok((-q).sqrt())
            }
        }
    }
}

/// Log-derivative and node count after a propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    pub r: f64,
    pub y: f64,
    /// Zeros of the wavefunction passed on the way.
    pub nodes: u32,
}

/// `y / (1 + h y)`, counting a node when the denominator is negative.
#[inline]
fn sector(y: f64, h: f64, nodes: &mut u32) -> f64 {
    if y.is_infinite() {
        return 1.0 / h;
    }
    let d = 1.0 + h * y;
    if d < 0.0 {
        *nodes += 1;
    }
    y / d
}

/// Propagate a scalar log-derivative through `panels` for `psi'' = -Q psi`.
///
/// Each panel is one Johnson log-derivative step of Simpson type: end-point
/// weights `h/3`, mid-point weight `4h/3` with the mid-point `Q` replaced by
/// `Q / (1 + h^2 Q / 6)`.
pub fn propagate_panels(
    panels: &[Panel],
    y0: f64,
    q: impl Fn(f64, Option<bool>) -> f64,
) -> Propagation {
    let mut y = y0;
    let mut nodes = 0;
    let mut r = panels.first().map_or(0.0, |p| p.a);
    for p in panels {
        let h = p.h;
        let m = p.a + h;
        let b = p.b();
        let qa = q(p.a, p.a_on_break.then_some(false));
        let qm = q(m, None);
        let qb = q(b, p.b_on_break.then_some(true));
        if y.is_finite() {
            y -= h / 3.0 * qa;
        }
        y = sector(y, h, &mut nodes);
        y -= 4.0 * h / 3.0 * qm / (1.0 + h * h * qm / 6.0);
        y = sector(y, h, &mut nodes);
        y -= h / 3.0 * qb;
        r = b;
    }
    Propagation { r, y, nodes }
}

/// Propagate `problem` from its `r_min` to `r_to`.
pub fn propagate(problem: &RadialProblem, r_to: f64) -> Result<Propagation> {
    problem.validate()?;
    let y0 = problem.initial_logderiv()?;
    propagate_from(problem, problem.r_min, y0, r_to)
}

/// Propagate from `(r_from, y0)` to `r_to`.
pub fn propagate_from(
    problem: &RadialProblem,
    r_from: f64,
    y0: f64,
    r_to: f64,
) -> Result<Propagation> {
    let breaks = problem.potential.breakpoints();
    let panels = build_panels(r_from, r_to, &breaks, &problem.steps, |r| {
        problem.k_local(r)
    })?;
    let pot = problem.potential;
    let out = propagate_panels(&panels, y0, |r, side| {
        let v = match side {
            Some(from_left) => pot.value_side(r, from_left),
            None => pot.value(r),
        };
        problem.q_with(r, v)
    });
    if !out.y.is_finite() {
        return Err(Error::NonFinite(format!("log-derivative at r = {r_to}")));
    }
    Ok(out)
}

/// Log-derivative at `r_max` using a fixed step `step` throughout.
pub fn propagate_logderiv(
    problem: &RadialProblem,
    r_min: f64,
    r_max: f64,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {step}"
        )));
    }
    let fixed = StepPolicy {
        per_wavelength: 1.0,
        well_cap: step,
        relative_cap: 0.0,
        scale: 1.0,
    };
    let p = RadialProblem {
        r_min,
        steps: fixed,
        ..*problem
    };
    let breaks = p.potential.breakpoints();
    let panels = build_panels(r_min, r_max, &breaks, &fixed, |_| 0.0)?;
    p.validate()?;
    let y0 = p.initial_logderiv()?;
    let pot = p.potential;
    let out = propagate_panels(&panels, y0, |r, side| {
        let v = match side {
            Some(from_left) => pot.value_side(r, from_left),
            None => pot.value(r),
        };
        p.q_with(r, v)
    });
    if !out.y.is_finite() {
        return Err(Error::NonFinite(format!("log-derivative at r = {r_max}")));
    }
    Ok(out.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::potential::{SquareWell, ZeroPotential};

    #[test]
    fn free_particle_cotangent() {
        // psi = sin(k (r - r0)) with r0 = 1: y = k cot(k (r - r0))
        let k: f64 = 0.7;
        let r0 = 1.0;
        let pot = ZeroPotential;
        let mut prob = RadialProblem::new(&pot, 0.5, 0, k * k, 1.2);
        prob.inner = InnerBoundary::LogDerivative(k / (k * (1.2 - r0)).tan());
        let y = propagate_logderiv(&prob, 1.2, 6.0, 0.005).unwrap();
        let want = k / (k * (6.0 - r0)).tan();
        assert!((y - want).abs() < 1e-8 * want.abs().max(1.0), "{y} {want}");
    }

    #[test]
    fn fourth_order_convergence() {
        let k: f64 = 2.0;
        let pot = ZeroPotential;
        let mut prob = RadialProblem::new(&pot, 0.5, 0, k * k, 0.5);
        prob.inner = InnerBoundary::HardWall;
        let exact = k / (k * 2.5).tan();
        let e1 = (propagate_logderiv(&prob, 0.5, 3.0, 0.05).unwrap() - exact).abs();
        let e2 = (propagate_logderiv(&prob, 0.5, 3.0, 0.025).unwrap() - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 3.7 && order < 4.5, "order {order}");
    }

    #[test]
    fn nodes_of_free_wave() {
        let k: f64 = 3.0;
        let pot = ZeroPotential;
        let mut prob = RadialProblem::new(&pot, 0.5, 0, k * k, 1.0);
        prob.inner = InnerBoundary::HardWall;
        // sin(k(r - 1)) vanishes at r - 1 = n pi / k, n = 1..=9 below r = 11
        let out = propagate(&prob, 10.5).unwrap();
        assert_eq!(out.nodes, (9.5f64 * k / PI).floor() as u32);
    }

    #[test]
    fn panels_end_on_breakpoints() {
        let pot = SquareWell {
            depth: 1.0,
            radius: 2.0,
        };
        let panels = build_panels(0.5, 5.0, &pot.breakpoints(), &StepPolicy::default(), |_| {
            1.0
        })
        .unwrap();
        assert!(panels.iter().any(|p| p.b() == 2.0 && p.b_on_break));
        assert!(panels.iter().any(|p| p.a == 2.0 && p.a_on_break));
        assert_eq!(panels.last().unwrap().b(), 5.0);
    }

    #[test]
    fn forbidden_start_is_checked() {
        let pot = ZeroPotential;
        let prob = RadialProblem::new(&pot, 1.0, 0, 1.0, 1.0);
        assert!(propagate(&prob, 2.0).is_err());
    }
}
