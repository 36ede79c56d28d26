//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use ultracold_scatter::radial::{
    phase_shift, phase_shift_at, scattering_length, FnPotential, InnerBoundary, LennardJones,
    RadialPotential, RadialProblem, SquareWell, ZeroPotential,
};

/// Riccati-Bessel pair `(s, c)` with `s ~ sin(x - l pi/2)`, `c ~ cos(x - l pi/2)`,
/// written out for `l <= 2`.
pub fn riccati(ell: u32, x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    match ell {
        0 => (s, c),
        1 => (s / x - c, c / x + s),
        2 => (
            (3.0 / (x * x) - 1.0) * s - 3.0 * c / x,
            (3.0 / (x * x) - 1.0) * c + 3.0 * s / x,
        ),
        _ => unimplemented!("riccati pair only written out for l <= 2"),
    }
}

/// Phase shift mod pi from a Numerov integration of `psi'' = f psi` with
/// `psi(r_min) = 0`, read off from `psi` at two radii near `r_match`. The
/// recurrence is carried in summed form (increments of `w psi`) so rounding
/// does not accumulate over the long grid.
pub fn numerov_phase(
    pot: &dyn RadialPotential,
    mass: f64,
    ell: u32,
    energy: f64,
    r_min: f64,
    r_match: f64,
) -> f64 {
    let n = 200_000usize;
    let h = (r_match - r_min) / n as f64;
    let l = ell as f64;
    let f = |r: f64| 2.0 * mass * (pot.value(r) - energy) + l * (l + 1.0) / (r * r);
    let w = |r: f64| 1.0 - h * h * f(r) / 12.0;
    let k = (2.0 * mass * energy).sqrt();
    let gap = ((1.0 / (k * h)).round() as usize).clamp(1, n / 2);
    let mut psi = vec![0.0f64; n + 1];
    psi[1] = 1e-10;
    // d = w psi at i+1 minus w psi at i
    let mut d = w(r_min + h) * psi[1];
    for i in 1..n {
        let r = r_min + i as f64 * h;
        d += h * h * f(r) * psi[i];
        psi[i + 1] = (w(r) * psi[i] + d) / w(r + h);
        if psi[i + 1].abs() > 1e100 {
            for p in psi.iter_mut().take(i + 2) {
                *p *= 1e-100;
            }
            d *= 1e-100;
        }
    }
    let ra = r_min + (n - gap) as f64 * h;
    let ratio = psi[n - gap] / psi[n];
    let (sa, ca) = riccati(ell, k * ra);
    let (sb, cb) = riccati(ell, k * r_match);
    // psi ~ s + t c at both radii
    ((ratio * sb - sa) / (ca - ratio * cb)).atan()
}

pub fn mod_pi(x: f64) -> f64 {
    x - (x / PI).round() * PI
}

pub fn log_deriv_phase(
    pot: &dyn RadialPotential,
    mass: f64,
    ell: u32,
    energy: f64,
    r_min: f64,
    r_match: f64,
) -> f64 {
    let mut p = RadialProblem::new(pot, mass, ell, energy, r_min);
    p.inner = InnerBoundary::HardWall;
    phase_shift_at(&p, r_match).unwrap().delta
}

/// 20 energies from 1 mEh to 0.1 Eh. The default step rule is used
/// throughout; far above this range its phase error approaches 1e-6 rad.
pub fn energies() -> Vec<f64> {
    (0..20)
        .map(|i| 1e-3 * 100f64.powf(i as f64 / 19.0))
        .collect()
}

pub fn compare(pot: &dyn RadialPotential, mass: f64, r_min: f64, r_match: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for ell in 0..3 {
        for e in energies() {
            let a = log_deriv_phase(pot, mass, ell, e, r_min, r_match);
            let b = numerov_phase(pot, mass, ell, e, r_min, r_match);
            worst = worst.max(mod_pi(a - b).abs());
        }
    }
    worst
}

/// The three test potentials: truncated Lennard-Jones, Gaussian well and
/// Morse well, each with its mass, inner wall and matching radius.
pub fn oracle_potentials() -> Vec<(&'static str, Box<dyn RadialPotential + Sync>, f64, f64, f64)> {
    // cut off so the Numerov read-out between its two radii sees free motion
    let lj = LennardJones {
        epsilon: 0.5,
        sigma: 1.0,
    };
    let morse = |r: f64| {
        let e = (-(r - 3.0)).exp();
        0.2 * ((1.0 - e) * (1.0 - e) - 1.0)
    };
    vec![
        (
            "lennard-jones",
            Box::new(FnPotential(
                move |r: f64| if r < 20.0 { lj.value(r) } else { 0.0 },
            )),
            20.0,
            0.85,
            25.0,
        ),
        (
            "gaussian",
            Box::new(FnPotential(|r: f64| -3.0 * (-r * r / 4.0).exp())),
            5.0,
            0.05,
            25.0,
        ),
        ("morse", Box::new(FnPotential(morse)), 50.0, 1.5, 30.0),
    ]
}

/// Worst phase error against the hard-sphere closed form, l <= 2.
pub fn hard_sphere_worst() -> f64 {
    let radius = 2.0;
    let mass = 10.0;
    let mut worst: f64 = 0.0;
    for ell in 0..3 {
        for e in energies() {
            let mut p = RadialProblem::new(&ZeroPotential, mass, ell, e, radius);
            p.inner = InnerBoundary::HardWall;
            let got = phase_shift_at(&p, 40.0).unwrap();
            let (s, c) = riccati(ell, got.k * radius);
            worst = worst.max(mod_pi(got.delta - (-s / c).atan()).abs());
        }
    }
    worst
}

/// Hard wall inside the square wells below.
pub const WALL: f64 = 1e-3;

/// Worst s-wave phase error against the square-well closed form.
pub fn square_well_phase_worst() -> f64 {
    let well = SquareWell {
        depth: 0.3,
        radius: 4.0,
    };
    let mass = 5.0;
    let mut worst: f64 = 0.0;
    for e in energies() {
        let mut p = RadialProblem::new(&well, mass, 0, e, WALL);
        p.inner = InnerBoundary::HardWall;
        let got = phase_shift(&p).unwrap();
        let k = got.k;
        let big_k = (2.0 * mass * (e + well.depth)).sqrt();
        // psi = sin(K (r - WALL)) inside
        let want = ((k / big_k) * (big_k * (well.radius - WALL)).tan()).atan() - k * well.radius;
        worst = worst.max(mod_pi(got.delta - want).abs());
    }
    worst
}

/// Worst relative scattering-length error against `R - tan(kappa R') / kappa`.
pub fn square_well_length_worst() -> f64 {
    let mass = 5.0;
    let mut worst: f64 = 0.0;
    for depth in [0.01, 0.05, 0.2, 0.31] {
        let well = SquareWell { depth, radius: 4.0 };
        let mut p = RadialProblem::new(&well, mass, 0, 0.0, WALL);
        p.inner = InnerBoundary::HardWall;
        let kappa = (2.0 * mass * depth).sqrt();
        let want = well.radius - (kappa * (well.radius - WALL)).tan() / kappa;
        let got = scattering_length(&p).unwrap().a;
        worst = worst.max(((got - want) / want).abs());
    }
    worst
}
