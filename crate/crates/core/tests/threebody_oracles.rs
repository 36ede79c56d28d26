//! Three-body dispersion terms against Cartesian constructions.

use proptest::prelude::*;
use ultracold_scatter::potentials::{atm_triple_dipole, ddq_term};

type P = [f64; 2];

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: P) -> f64 {
    dot(a, a).sqrt()
}

/// Interior angle at `at` from the two bond vectors, via atan2.
fn angle(at: P, b: P, c: P) -> f64 {
    let (u, v) = (sub(b, at), sub(c, at));
    (u[0] * v[1] - u[1] * v[0]).abs().atan2(dot(u, v))
}

/// Triangle with sides r12, r23, r13 placed in the plane.
fn place(r12: f64, r23: f64, r13: f64) -> [P; 3] {
    let x3 = (r12 * r12 + r13 * r13 - r23 * r23) / (2.0 * r12);
    let y3 = (r13 * r13 - x3 * x3).max(0.0).sqrt();
    [[0.0, 0.0], [r12, 0.0], [x3, y3]]
}

/// Triple-dipole energy from cyclic bond vectors:
/// `C9 (p^2 - 3 (a.b)(b.c)(c.a)) / p^5` with `p = |a||b||c|`.
fn atm_cartesian(x: [P; 3], c9: f64) -> f64 {
    let a = sub(x[1], x[0]);
    let b = sub(x[2], x[1]);
    let c = sub(x[0], x[2]);
    let p = norm(a) * norm(b) * norm(c);
    c9 * (p * p - 3.0 * dot(a, b) * dot(b, c) * dot(c, a)) / p.powi(5)
}

fn ddq_cartesian(x: [P; 3], c11: f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let ti = angle(x[i], x[j], x[k]);
        let tj = angle(x[j], x[k], x[i]);
        let tk = angle(x[k], x[i], x[j]);
        let (rij, rik, rjk) = (
            norm(sub(x[i], x[j])),
            norm(sub(x[i], x[k])),
            norm(sub(x[j], x[k])),
        );
        let ang = 9.0 * ti.cos() - 25.0 * (3.0 * ti).cos()
            + 6.0 * (tj - tk).cos() * (3.0 + 5.0 * (2.0 * ti).cos());
        sum += ang / (rij.powi(4) * rik.powi(4) * rjk.powi(3));
    }
    3.0 * c11 / 16.0 * sum
}

/// Side lengths of a non-degenerate triangle.
fn triangle() -> impl Strategy<Value = (f64, f64, f64)> {
    (3.0f64..20.0, 3.0f64..20.0, 0.05f64..0.95).prop_map(|(a, b, t)| {
        let lo = (a - b).abs();
        let c = lo + t * (a + b - lo);
        (a, b, c)
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

proptest! {
    #[test]
    fn atm_matches_vector_form((r12, r23, r13) in triangle()) {
        let got = atm_triple_dipole(r12, r23, r13, 1.892e5).unwrap();
        let want = atm_cartesian(place(r12, r23, r13), 1.892e5);
        // the angular factor cancels near collinear shapes, so compare on
        // the natural scale C9 / (r12 r23 r13)^3
        let scale = 1.892e5 / (r12 * r23 * r13).powi(3);
        prop_assert!((got - want).abs() <= 1e-12 * scale, "{got:e} vs {want:e}");
    }

    #[test]
    fn ddq_matches_cartesian_angles((r12, r23, r13) in triangle()) {
        let got = ddq_term(r12, r23, r13, 1.46812e5).unwrap();
        let want = ddq_cartesian(place(r12, r23, r13), 1.46812e5);
        let scale = 1.46812e5 * 64.0 / (r12 * r23 * r13).powi(4) * r12.max(r23).max(r13);
        prop_assert!((got - want).abs() <= 1e-12 * scale, "{got:e} vs {want:e}");
    }

    #[test]
    fn three_body_terms_are_permutation_invariant((r12, r23, r13) in triangle()) {
        let a = atm_triple_dipole(r12, r23, r13, 1.0).unwrap();
        let d = ddq_term(r12, r23, r13, 1.0).unwrap();
        for (x, y, z) in [(r23, r13, r12), (r13, r12, r23), (r12, r13, r23), (r23, r12, r13)] {
            let p = r12 * r23 * r13;
            prop_assert!((a - atm_triple_dipole(x, y, z, 1.0).unwrap()).abs() <= 1e-12 / p.powi(3));
            prop_assert!((d - ddq_term(x, y, z, 1.0).unwrap()).abs() <= 1e-12 * 64.0 / p.powi(4) * r12.max(r23).max(r13));
        }
    }
}

#[test]
fn equilateral_values() {
    let r: f64 = 8.0;
    let atm = atm_triple_dipole(r, r, r, 1.0).unwrap();
    assert!(close(atm, 11.0 / 8.0 / r.powi(9)));
    // each vertex: 9/2 - 25 cos(pi) + 6 (3 + 5 cos(2 pi/3)) = 4.5 + 25 + 3
    let ddq = ddq_term(r, r, r, 1.0).unwrap();
    let want = 3.0 / 16.0 * 3.0 * 32.5 / r.powi(11);
    assert!(close(ddq, want), "{ddq:e} vs {want:e}");
}
