//! Coupled-channel pieces against brute-force angular quadrature, a closed-form
//! two-channel square well and the single-channel solver.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use ultracold_scatter::coupled::{
    build_basis, coupling_coefficients, solve_cc, solve_coupled, CcOptions, CoupledPotential,
    InteractionModel, Parity, RotorStates,
};
use ultracold_scatter::radial::{choose_r_match, phase_shift_with, InnerBoundary, RadialProblem};
use ultracold_scatter::scan::{Config, System};
use ultracold_scatter::units::kelvin_to_hartree;

fn factorial(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Clebsch-Gordan `<j1 m1 j2 m2 | J M>` by the Racah sum.
fn clebsch_gordan(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m
        || j < (j1 - j2).abs()
        || j > j1 + j2
        || m1.abs() > j1
        || m2.abs() > j2
        || m.abs() > j
    {
        return 0.0;
    }
    let pre = ((2 * j + 1) as f64
        * factorial(j + j1 - j2)
        * factorial(j - j1 + j2)
        * factorial(j1 + j2 - j)
        / factorial(j1 + j2 + j + 1))
    .sqrt()
        * (factorial(j + m)
            * factorial(j - m)
            * factorial(j1 - m1)
            * factorial(j1 + m1)
            * factorial(j2 - m2)
            * factorial(j2 + m2))
        .sqrt();
    let mut sum = 0.0;
    for k in 0..=(j1 + j2 - j) {
        let d = [
            j1 + j2 - j - k,
            j1 - m1 - k,
            j2 + m2 - k,
            j - j2 + m1 + k,
            j - j1 - m2 + k,
        ];
        if d.iter().any(|&x| x < 0) {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / (factorial(k) * d.iter().map(|&x| factorial(x)).product::<f64>());
    }
    pre * sum
}

/// Associated Legendre `P_l^m(x)` for `m >= 0` with the Condon-Shortley phase.
fn assoc_legendre(l: i64, m: i64, x: f64) -> f64 {
    let mut pmm = 1.0;
    let s = (1.0 - x * x).sqrt();
    for i in 1..=m {
        pmm *= -((2 * i - 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut out = 0.0;
    for ll in (m + 2)..=l {
        out = ((2 * ll - 1) as f64 * x * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pm1;
        pm1 = out;
    }
    out
}

fn ylm(l: i64, m: i64, x: f64, phi: f64) -> Complex64 {
    let am = m.abs();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt();
    let y = norm * assoc_legendre(l, am, x) * Complex64::from_polar(1.0, am as f64 * phi);
    if m < 0 {
        let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
        y.conj() * sign
    } else {
        y
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn legendre(l: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return 1.0;
    }
    for k in 2..=l {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `<(j l) J M | P_lambda(r.R) | (j' l') J M>` by quadrature over both unit
/// spheres, with the coupled states built from spherical harmonics.
fn brute_force_f(c: (i64, i64), cp: (i64, i64), lambda: u32, total_j: i64) -> f64 {
    let nodes = gauss_legendre(12);
    let n_phi = 32;
    let mut grid = Vec::new();
    for &(x, w) in &nodes {
        for p in 0..n_phi {
            let phi = 2.0 * PI * p as f64 / n_phi as f64;
            grid.push((x, phi, w * 2.0 * PI / n_phi as f64));
        }
    }
    let m = 0;
    let state = |(j, l): (i64, i64), a: (f64, f64), b: (f64, f64)| -> Complex64 {
        (-j..=j)
            .map(|mj| {
                clebsch_gordan(j, mj, l, m - mj, total_j, m)
                    * ylm(j, mj, a.0, a.1)
                    * ylm(l, m - mj, b.0, b.1)
            })
            .sum()
    };
    let unit = |x: f64, phi: f64| {
        let s = (1.0 - x * x).sqrt();
        [s * phi.cos(), s * phi.sin(), x]
    };
    let mut total = Complex64::new(0.0, 0.0);
    for &(xa, pa, wa) in &grid {
        let ua = unit(xa, pa);
        for &(xb, pb, wb) in &grid {
            let ub = unit(xb, pb);
            let cos = ua[0] * ub[0] + ua[1] * ub[1] + ua[2] * ub[2];
            let lhs = state(c, (xa, pa), (xb, pb)).conj();
            let rhs = state(cp, (xa, pa), (xb, pb));
            total += lhs * rhs * legendre(lambda, cos) * wa * wb;
        }
    }
    assert!(total.im.abs() < 1e-12);
    total.re
}

#[test]
fn f2_for_s_wave_to_d_wave_matches_quadrature() {
    let basis = build_basis(0, 2, Parity::Even, RotorStates::Even).unwrap();
    let f = coupling_coefficients(&basis, 2);
    let (a, b) = (basis.index_of(0, 0).unwrap(), basis.index_of(2, 2).unwrap());
    let want = brute_force_f((0, 0), (2, 2), 2, 0);
    assert!((f[(a, b)] - want).abs() < 1e-10, "{} vs {want}", f[(a, b)]);
    assert!((want - 1.0 / 5f64.sqrt()).abs() < 1e-10);
}

#[test]
fn coupling_blocks_match_quadrature() {
    for (total_j, parity) in [(1, Parity::Odd), (2, Parity::Even)] {
        let basis = build_basis(total_j, 2, parity, RotorStates::All).unwrap();
        for lambda in [1, 2] {
            let f = coupling_coefficients(&basis, lambda);
            for (a, ca) in basis.channels.iter().enumerate() {
                for (b, cb) in basis.channels.iter().enumerate() {
                    let want = brute_force_f(
                        (ca.j as i64, ca.ell as i64),
                        (cb.j as i64, cb.ell as i64),
                        lambda,
                        total_j as i64,
                    );
                    assert!(
                        (f[(a, b)] - want).abs() < 1e-10,
                        "J={total_j} lambda={lambda} {ca:?} {cb:?}: {} vs {want}",
                        f[(a, b)]
                    );
                }
            }
        }
    }
}

/// Two s-wave channels with a constant coupling matrix inside `radius`.
struct TwoChannelWell {
    v: DMatrix<f64>,
    radius: f64,
    gap: f64,
}

impl CoupledPotential for TwoChannelWell {
    fn size(&self) -> usize {
        2
    }
    fn ells(&self) -> Vec<u32> {
        vec![0, 0]
    }
    fn thresholds(&self) -> Vec<f64> {
        vec![0.0, self.gap]
    }
    fn potential(&self, r: f64, out: &mut DMatrix<f64>) {
        self.potential_side(r, r < self.radius, out)
    }
    fn potential_side(&self, _r: f64, from_left: bool, out: &mut DMatrix<f64>) {
        if from_left {
            out.copy_from(&self.v);
        } else {
            out.fill(0.0);
        }
    }
    fn reference(&self, r: f64) -> f64 {
        if r < self.radius {
            self.v[(0, 0)]
        } else {
            0.0
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.radius]
    }
}

/// Open-channel S matrix of the two-channel well with a hard wall at `wall`.
fn two_channel_s(w: &TwoChannelWell, mass: f64, energy: f64, wall: f64) -> DMatrix<Complex64> {
    let t = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, w.gap]));
    let a = (&w.v + &t).map(|x| 2.0 * mass * x) - DMatrix::identity(2, 2) * (2.0 * mass * energy);
    let eig = SymmetricEigen::new(a);
    let span = w.radius - wall;
    let y_diag: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&a| {
            if a < 0.0 {
                let q = (-a).sqrt();
                q / (q * span).tan()
            } else {
                let q = a.sqrt();
                q / (q * span).tanh()
            }
        })
        .collect();
    let y = &eig.eigenvectors
        * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(y_diag))
        * eig.eigenvectors.transpose();
    let r = w.radius;
    let mut f = DMatrix::zeros(2, 2);
    let mut fp = DMatrix::zeros(2, 2);
    let mut g = DMatrix::zeros(2, 2);
    let mut gp = DMatrix::zeros(2, 2);
    let mut open = Vec::new();
    for (i, th) in [0.0, w.gap].into_iter().enumerate() {
        let e = energy - th;
        if e > 0.0 {
            let k = (2.0 * mass * e).sqrt();
            let s = k.sqrt();
            f[(i, i)] = (k * r).sin() / s;
            fp[(i, i)] = s * (k * r).cos();
            g[(i, i)] = (k * r).cos() / s;
            gp[(i, i)] = -s * (k * r).sin();
            open.push(i);
        } else {
            let kappa = (-2.0 * mass * e).sqrt();
            g[(i, i)] = (-kappa * r).exp();
            gp[(i, i)] = -kappa * (-kappa * r).exp();
        }
    }
    // psi = F + G K, columns for open channels only
    let full_k = (&y * &g - &gp).lu().solve(&(&fp - &y * &f)).unwrap();
    let n = open.len();
    let k = DMatrix::from_fn(n, n, |a, b| full_k[(open[a], open[b])]);
    let ik = k.map(|x| Complex64::new(0.0, x));
    let id = DMatrix::<Complex64>::identity(n, n);
    (&id + &ik) * (&id - &ik).try_inverse().unwrap()
}

#[test]
fn two_channel_square_well_s_matrix() {
    let well = TwoChannelWell {
        v: DMatrix::from_row_slice(2, 2, &[-1.0, 0.3, 0.3, -0.5]),
        radius: 3.0,
        gap: 0.4,
    };
    let (mass, wall) = (1.0, 1e-3);
    let mut options = CcOptions::new(mass, wall);
    options.inner = InnerBoundary::HardWall;
    for i in 0..12 {
        let e = 0.05 + 0.08 * i as f64;
        let got = solve_coupled(&well, e, &options).unwrap();
        let want = two_channel_s(&well, mass, e, wall);
        assert_eq!(got.s.nrows(), want.nrows(), "open channels at E={e}");
        let diff = (&got.s - &want)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "E={e}: |dS| = {diff:e}");
        assert!(got.unitarity_defect() < 1e-8);
    }
}

#[test]
fn isotropic_limit_is_single_channel() {
    let config = Config {
        anisotropy: 0.0,
        ..Config::default()
    };
    let system = System::build(&config).unwrap();
    let model = system.model(1.0);
    let v0 = model.term(0).unwrap().clone();
    let iso = InteractionModel::isotropic(v0.clone());
    for total_j in [0u32, 1, 2] {
        let (basis, entrance) = system.basis(total_j).unwrap();
        let ell = basis.channels[entrance].ell;
        for i in 0..20 {
            let e = kelvin_to_hartree(1e-7 * 1e5f64.powf(i as f64 / 19.0));
            let single = RadialProblem::new(&*v0, system.mass, ell, e, system.r_min);
            let mut options = system.cc_options();
            options.matching.r_match = Some(choose_r_match(&single, &options.matching).unwrap());
            let want = phase_shift_with(&single, &options.matching).unwrap().delta;
            for interaction in [&model, &iso] {
                let s = solve_cc(&basis, interaction, e, &options).unwrap();
                let row = s.open_index(entrance).unwrap();
                let off = (0..s.open.len())
                    .filter(|&c| c != row)
                    .map(|c| s.s[(row, c)].norm())
                    .fold(0.0, f64::max);
                assert!(off < 1e-12, "J={total_j} E={e}: off-diagonal {off:e}");
                let got = 0.5 * s.s[(row, row)].arg();
                let d = got - want;
                let d = d - (d / PI).round() * PI;
                assert!(d.abs() < 1e-8, "J={total_j} E={e}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn anisotropic_s_matrix_is_unitary_and_symmetric() {
    let config = Config {
        anisotropy: 0.1,
        ..Config::default()
    };
    let system = System::build(&config).unwrap();
    let model = system.model(1.0);
    let options = system.cc_options();
    for total_j in [0u32, 1] {
        let (basis, _) = system.basis(total_j).unwrap();
        for i in 0..6 {
            let e = kelvin_to_hartree(1e-6 * 10f64.powf(i as f64 * 0.8));
            let s = solve_cc(&basis, &model, e, &options).unwrap();
            assert!(
                s.unitarity_defect() < 1e-8,
                "J={total_j} E={e}: {:e}",
                s.unitarity_defect()
            );
            assert!(
                s.symmetry_defect() < 1e-8,
                "J={total_j} E={e}: {:e}",
                s.symmetry_defect()
            );
        }
    }
}
