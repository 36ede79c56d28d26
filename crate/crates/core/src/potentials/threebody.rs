//! Third-order long-range three-body dispersion terms.

use crate::rkhs::check_triangle;
use crate::Result;

/// Cosines of the interior angles at atoms 1, 2 and 3.
pub fn interior_cosines(r12: f64, r23: f64, r13: f64) -> [f64; 3] {
    let (a2, b2, c2) = (r12 * r12, r23 * r23, r13 * r13);
    [
        (a2 + c2 - b2) / (2.0 * r12 * r13),
        (a2 + b2 - c2) / (2.0 * r12 * r23),
        (b2 + c2 - a2) / (2.0 * r23 * r13),
    ]
    .map(|c: f64| c.clamp(-1.0, 1.0))
}

/// Triple-dipole (Axilrod-Teller-Muto) energy
/// `C9 (1 + 3 cos t1 cos t2 cos t3) / (r12 r23 r13)^3`.
pub fn atm_triple_dipole(r12: f64, r23: f64, r13: f64, c9: f64) -> Result<f64> {
    check_triangle(r12, r23, r13)?;
    Ok(atm_unchecked(r12, r23, r13, c9))
}

pub(crate) fn atm_unchecked(r12: f64, r23: f64, r13: f64, c9: f64) -> f64 {
    let [c1, c2, c3] = interior_cosines(r12, r23, r13);
    let p = r12 * r23 * r13;
    c9 * (1.0 + 3.0 * c1 * c2 * c3) / (p * p * p)
}

/// Dipole-dipole-quadrupole energy in the Bell form
///
/// `(3 C11 / 16) sum_i [9 cos t_i - 25 cos 3t_i + 6 cos(t_j - t_k)(3 + 5 cos 2t_i)]
///  / (r_ij^4 r_ik^4 r_jk^3)`
///
/// where atom `i` carries the quadrupole and `t_i` is the interior angle there.
pub fn ddq_term(r12: f64, r23: f64, r13: f64, c11: f64) -> Result<f64> {
    check_triangle(r12, r23, r13)?;
    Ok(ddq_unchecked(r12, r23, r13, c11))
}

pub(crate) fn ddq_unchecked(r12: f64, r23: f64, r13: f64, c11: f64) -> f64 {
    if c11 == 0.0 {
        return 0.0;
    }
    let t = interior_cosines(r12, r23, r13).map(f64::acos);
    // (angle index, the two sides meeting there, the opposite side)
    let vertices = [
        (0usize, r12, r13, r23),
        (1usize, r12, r23, r13),
        (2usize, r23, r13, r12),
    ];
    let mut sum = 0.0;
    for (i, ra, rb, ropp) in vertices {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let angular = 9.0 * t[i].cos() - 25.0 * (3.0 * t[i]).cos()
            + 6.0 * (t[j] - t[k]).cos() * (3.0 + 5.0 * (2.0 * t[i]).cos());
        sum += angular / (ra.powi(4) * rb.powi(4) * ropp.powi(3));
    }
    3.0 * c11 / 16.0 * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equilateral_atm() {
        let r: f64 = 7.3;
        let v = atm_triple_dipole(r, r, r, 2.0).unwrap();
        assert!((v - 11.0 / 8.0 * 2.0 / r.powi(9)).abs() < 1e-15 * v.abs());
    }

    #[test]
    fn zero_c11_and_degenerate_distances() {
        assert_eq!(ddq_term(3.0, 4.0, 5.0, 0.0).unwrap(), 0.0);
        assert!(atm_triple_dipole(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ddq_term(1.0, 3.0, 1.0, 1.0).is_err());
    }

    fn triangle() -> impl Strategy<Value = (f64, f64, f64)> {
        (3.0f64..12.0, 3.0f64..12.0, 0.02f64..0.98).prop_map(|(a, b, t)| {
            let c = (a - b).abs() + t * (2.0 * a.min(b));
            (a, b, c)
        })
    }

    proptest! {
        #[test]
        fn homogeneity((a, b, c) in triangle(), s in 0.5f64..3.0) {
            let v = atm_triple_dipole(a, b, c, 1.0).unwrap();
            let w = atm_triple_dipole(s * a, s * b, s * c, 1.0).unwrap();
            prop_assert!((w - v * s.powi(-9)).abs() <= 1e-12 * v.abs().max(w.abs()) + 1e-300);
            let v = ddq_term(a, b, c, 1.0).unwrap();
            let w = ddq_term(s * a, s * b, s * c, 1.0).unwrap();
            prop_assert!((w - v * s.powi(-11)).abs() <= 1e-12 * v.abs().max(w.abs() ) + 1e-300);
        }

        #[test]
        fn permutation_invariant((a, b, c) in triangle()) {
            let v = ddq_term(a, b, c, 1.0).unwrap();
            for p in [[a, c, b], [b, a, c], [c, b, a]] {
                let w = ddq_term(p[0], p[1], p[2], 1.0).unwrap();
                prop_assert!((w - v).abs() <= 1e-12 * v.abs() + 1e-300);
            }
        }
    }
}
