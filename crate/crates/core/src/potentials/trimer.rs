use std::sync::Arc;

use super::dimer::DimerCurve;
use super::threebody::{atm_unchecked, ddq_unchecked};
use crate::rkhs::{check_triangle, fit_3d_symmetrized, RKHSModel3D, RPKernelParams};
use crate::units::angstrom_to_bohr;
use crate::Result;

/// Long-range three-body coefficients removed from the nonadditive samples
/// before fitting and restored at evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongRange {
    pub c9: f64,
    pub c11: f64,
}

impl LongRange {
    pub fn energy(&self, r12: f64, r23: f64, r13: f64) -> f64 {
        atm_unchecked(r12, r23, r13, self.c9) + ddq_unchecked(r12, r23, r13, self.c11)
    }
}

/// Nonadditive energies `V_trimer - sum of pair energies` at each geometry,
/// optionally with the long-range three-body terms removed as well.
/// Distances in bohr, energies in Hartree.
pub fn extract_v3(
    trimer_samples: &[(f64, f64, f64, f64)],
    pairwise: &DimerCurve,
    subtract: Option<LongRange>,
) -> Result<Vec<(f64, f64, f64, f64)>> {
    trimer_samples
        .iter()
        .map(|&(a, b, c, v)| {
            check_triangle(a, b, c)?;
            let pairs = pairwise.evaluate_checked(a)?
                + pairwise.evaluate_checked(b)?
                + pairwise.evaluate_checked(c)?;
            let lr = subtract.map_or(0.0, |l| l.energy(a, b, c));
            Ok((a, b, c, v - pairs - lr))
        })
        .collect()
}

/// Pairwise sum plus a scaled nonadditive term.
#[derive(Debug, Clone)]
pub struct TrimerSurface {
    pub pairwise: Arc<DimerCurve>,
    pub v3_model: Arc<RKHSModel3D>,
    /// Coefficients of the long-range terms restored at evaluation, if they
    /// were removed before fitting.
    pub long_range: Option<LongRange>,
    /// Triple-dipole and dipole-dipole-quadrupole coefficients (atomic units).
    pub c9: f64,
    pub c11: f64,
    pub lambda: f64,
    /// Switch-off of the fitted remainder outside the sampled region.
    pub taper: Option<Taper>,
}

/// Cosine switch on the middle interatomic distance: 1 up to `start`, 0
/// beyond `start + width` (bohr).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Taper {
    pub start: f64,
    pub width: f64,
}

impl Taper {
    pub fn weight(&self, middle: f64) -> f64 {
        let t = (middle - self.start) / self.width;
        if t <= 0.0 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * t).cos())
        }
    }
}

fn middle_of(r12: f64, r23: f64, r13: f64) -> f64 {
    r12.max(r23).min(r12.max(r13)).min(r23.max(r13))
}

/// Default reduced-coordinate kernel for the nonadditive fit: m = 0, n = 2 on
/// `(r / 10 Angstrom)^3`, with the scale expressed in bohr.
pub fn trimer_kernel() -> RPKernelParams {
    RPKernelParams::trimer_default(angstrom_to_bohr(10.0))
}

/// Fit the nonadditive samples (as returned by [`extract_v3`]) and assemble
/// the surface.
pub fn build_trimer(
    v3_samples: &[(f64, f64, f64, f64)],
    pairwise: Arc<DimerCurve>,
    c9: f64,
    c11: f64,
    long_range_subtracted: bool,
    lambda: f64,
) -> Result<TrimerSurface> {
    let model = fit_3d_symmetrized(v3_samples, &trimer_kernel())?;
    Ok(TrimerSurface {
        pairwise,
        v3_model: Arc::new(model),
        long_range: long_range_subtracted.then_some(LongRange { c9, c11 }),
        c9,
        c11,
        lambda,
        taper: None,
    })
}

impl TrimerSurface {
    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    pub fn pair_sum(&self, r12: f64, r23: f64, r13: f64) -> f64 {
        self.pairwise.evaluate(r12) + self.pairwise.evaluate(r23) + self.pairwise.evaluate(r13)
    }

    /// Largest middle interatomic distance among the fitted geometries.
    pub fn sampled_extent(&self) -> f64 {
        self.v3_model
            .geometries()
            .iter()
            .map(|g| middle_of(g[0], g[1], g[2]))
            .fold(0.0, f64::max)
    }

    /// Switch the fitted remainder off over `width` bohr beyond the sampled
    /// extent. The restored long-range terms are left untouched.
    pub fn with_taper(&self, width: f64) -> Self {
        Self {
            taper: Some(Taper {
                start: self.sampled_extent(),
                width,
            }),
            ..self.clone()
        }
    }

    /// Fitted part of the nonadditive energy, including the taper.
    pub fn remainder(&self, r12: f64, r23: f64, r13: f64) -> f64 {
        let w = self
            .taper
            .map_or(1.0, |t| t.weight(middle_of(r12, r23, r13)));
        if w == 0.0 {
            return 0.0;
        }
        w * self.v3_model.evaluate_unchecked(r12, r23, r13)
    }

    /// Restored long-range part of the nonadditive energy.
    pub fn long_range_energy(&self, r12: f64, r23: f64, r13: f64) -> f64 {
        self.long_range.map_or(0.0, |lr| lr.energy(r12, r23, r13))
    }

    /// Unscaled nonadditive energy.
    pub fn nonadditive(&self, r12: f64, r23: f64, r13: f64) -> f64 {
        self.remainder(r12, r23, r13) + self.long_range_energy(r12, r23, r13)
    }

    /// Total energy in Hartree at distances in bohr.
    pub fn evaluate(&self, r12: f64, r23: f64, r13: f64) -> Result<f64> {
        check_triangle(r12, r23, r13)?;
        // sort so every relabelling of the atoms sums in the same order
        let mut r = [r12, r23, r13];
        r.sort_by(f64::total_cmp);
        Ok(self.pair_sum(r[0], r[1], r[2]) + self.lambda * self.nonadditive(r[0], r[1], r[2]))
    }
}

/// Free-function form of [`TrimerSurface::evaluate`].
pub fn evaluate_trimer(surface: &TrimerSurface, r12: f64, r23: f64, r13: f64) -> Result<f64> {
    surface.evaluate(r12, r23, r13)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::surrogate::{surrogate_dimer_curve, surrogate_trimer_surface};
    use crate::units::{angstrom_to_bohr, hartree_to_cm1};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn surface() -> &'static TrimerSurface {
        static S: OnceLock<TrimerSurface> = OnceLock::new();
        S.get_or_init(|| surrogate_trimer_surface(false, 1.0).unwrap())
    }

    fn line_minimum(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
        let (mut a, mut b) = (lo, hi);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        while b - a > 1e-7 {
            let (x1, x2) = (b - g * (b - a), a + g * (b - a));
            if f(x1) < f(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        let x = 0.5 * (a + b);
        (x, f(x))
    }

    #[test]
    fn pure_pair_data_has_no_nonadditive_part() {
        let pair = surrogate_dimer_curve().unwrap();
        let geo = [(7.0, 8.0, 9.0), (8.2, 8.2, 8.2), (9.0, 18.0, 9.0)];
        let samples: Vec<_> = geo
            .iter()
            .map(|&(a, b, c)| {
                (
                    a,
                    b,
                    c,
                    pair.evaluate(a) + pair.evaluate(b) + pair.evaluate(c),
                )
            })
            .collect();
        for s in extract_v3(&samples, &pair, None).unwrap() {
            assert!(s.3.abs() < 1e-12);
        }
        let lr = LongRange {
            c9: 1.9e5,
            c11: 1.5e5,
        };
        let with_lr: Vec<_> = samples
            .iter()
            .map(|&(a, b, c, v)| (a, b, c, v + lr.energy(a, b, c)))
            .collect();
        for s in extract_v3(&with_lr, &pair, Some(lr)).unwrap() {
            assert!(s.3.abs() < 1e-12);
        }
    }

    #[test]
    fn extraction_checks_the_pair_domain() {
        let pair = surrogate_dimer_curve().unwrap();
        let inside = pair.inner_radius() * 0.9;
        assert!(extract_v3(&[(inside, 8.0, 8.0, 0.0)], &pair, None).is_err());
    }

    #[test]
    fn zero_lambda_is_pair_sum() {
        let s = surface().with_lambda(0.0);
        let (a, b, c) = (7.1, 8.3, 9.2);
        assert_eq!(s.evaluate(a, b, c).unwrap(), {
            let mut r = [a, b, c];
            r.sort_by(f64::total_cmp);
            s.pair_sum(r[0], r[1], r[2])
        });
    }

    #[test]
    fn samples_are_reproduced() {
        let s = surface();
        for (a, b, c, v) in crate::potentials::surrogate::trimer_samples()
            .into_iter()
            .step_by(7)
        {
            let (x, y, z) = (
                angstrom_to_bohr(a),
                angstrom_to_bohr(b),
                angstrom_to_bohr(c),
            );
            let got = hartree_to_cm1(s.evaluate(x, y, z).unwrap());
            assert!(
                (got - v).abs() < 1e-8 * v.abs().max(1.0),
                "{a} {b} {c}: {got} {v}"
            );
        }
    }

    #[test]
    fn surface_landmarks() {
        let s = surface();
        let f = |r: f64| {
            let x = angstrom_to_bohr(r);
            hartree_to_cm1(s.evaluate(x, x, x).unwrap())
        };
        let (r, v) = line_minimum(f, 3.8, 5.0);
        assert!(
            (r - 4.34).abs() < 0.02 * 4.34 && (v + 880.9).abs() < 0.02 * 880.9,
            "{r} {v}"
        );
        let g = |r: f64| {
            let x = angstrom_to_bohr(r);
            hartree_to_cm1(s.evaluate(x, 2.0 * x, x).unwrap())
        };
        let (r, v) = line_minimum(g, 4.5, 5.8);
        assert!(
            (r - 5.06).abs() < 0.02 * 5.06 && (v + 381.7).abs() < 0.02 * 381.7,
            "{r} {v}"
        );
    }

    #[test]
    fn long_range_split_agrees_at_samples() {
        let split = surrogate_trimer_surface(true, 1.0).unwrap();
        let plain = surface();
        for r in split.v3_model.geometries().iter().step_by(23) {
            let (a, b) = (
                split.evaluate(r[0], r[1], r[2]).unwrap(),
                plain.evaluate(r[0], r[1], r[2]).unwrap(),
            );
            assert!((a - b).abs() < 1e-9 * a.abs().max(1e-6), "{a} {b}");
        }
    }

    #[test]
    fn taper_keeps_samples_and_leaves_long_range() {
        let split = surrogate_trimer_surface(true, 1.0).unwrap();
        let t = split.with_taper(4.0);
        assert!((split.sampled_extent() - angstrom_to_bohr(10.0)).abs() < 1e-9);
        for r in split.v3_model.geometries() {
            assert_eq!(
                t.nonadditive(r[0], r[1], r[2]),
                split.nonadditive(r[0], r[1], r[2])
            );
        }
        let far = t.taper.unwrap().start + 4.0;
        let (a, b, c) = (10.0, far, far + 1.0);
        assert_eq!(t.nonadditive(a, b, c), t.long_range_energy(a, b, c));
        let w = Taper {
            start: 1.0,
            width: 2.0,
        };
        assert_eq!(w.weight(1.0), 1.0);
        assert!((w.weight(2.0) - 0.5).abs() < 1e-15);
        assert_eq!(w.weight(3.0), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn relabelling_invariance(a in 5.0f64..15.0, b in 5.0f64..15.0, t in 0.2f64..0.8) {
            let c = (a - b).abs() + t * (a + b - (a - b).abs());
            let s = surface();
            let v = s.evaluate(a, b, c).unwrap();
            for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                prop_assert_eq!(s.evaluate(x, y, z).unwrap(), v);
            }
        }

        #[test]
        fn affine_in_lambda(a in 5.0f64..15.0, b in 5.0f64..15.0, t in 0.2f64..0.8, l in -3.0f64..3.0) {
            let c = (a - b).abs() + t * (a + b - (a - b).abs());
            let s = surface();
            let v0 = s.with_lambda(0.0).evaluate(a, b, c).unwrap();
            let v1 = s.with_lambda(1.0).evaluate(a, b, c).unwrap();
            let vl = s.with_lambda(l).evaluate(a, b, c).unwrap();
            prop_assert!((vl - (v0 + l * (v1 - v0))).abs() < 1e-12 * (1.0 + vl.abs()));
        }
    }
}
