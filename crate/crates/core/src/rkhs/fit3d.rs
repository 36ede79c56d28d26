use nalgebra::{DMatrix, DVector};

use super::kernel::{RPKernel, RPKernelParams};
use super::linalg::solve_spd;
use crate::{Error, Result};

/// Relative slack allowed when testing the triangle inequality, so that
/// collinear geometries given to finite precision are accepted.
const TRIANGLE_SLACK: f64 = 1e-10;

/// Check that three distances can form a (possibly degenerate) triangle.
pub fn check_triangle(r12: f64, r23: f64, r13: f64) -> Result<()> {
    if !(r12 > 0.0 && r23 > 0.0 && r13 > 0.0)
        || !(r12.is_finite() && r23.is_finite() && r13.is_finite())
    {
        return Err(Error::Domain(format!(
            "distances must be positive and finite, got ({r12}, {r23}, {r13})"
        )));
    }
    let slack = TRIANGLE_SLACK * (r12 + r23 + r13);
    let ok = r23 <= r12 + r13 + slack && r12 <= r23 + r13 + slack && r13 <= r12 + r23 + slack;
    if !ok {
        return Err(Error::Domain(format!(
            "geometry ({r12}, {r23}, {r13}) violates the triangle inequality"
        )));
    }
    Ok(())
}

fn sorted(a: [f64; 3]) -> [f64; 3] {
    let mut s = a;
    s.sort_by(f64::total_cmp);
    s
}

/// Kernel symmetrized over the six permutations of the second argument.
fn symmetrized(kernel: &RPKernel, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = kernel.eval(a[i], b[j]);
        }
    }
    // sum over permutations = permanent of the 3x3 kernel table
    k[0][0] * (k[1][1] * k[2][2] + k[1][2] * k[2][1])
        + k[0][1] * (k[1][0] * k[2][2] + k[1][2] * k[2][0])
        + k[0][2] * (k[1][0] * k[2][1] + k[1][1] * k[2][0])
}

/// Fully symmetrized three-dimensional reciprocal-power interpolant.
#[derive(Debug, Clone)]
pub struct RKHSModel3D {
    kernel: RPKernel,
    /// Physical geometries (r12, r23, r13) as supplied.
    geometries: Vec<[f64; 3]>,
    /// Transformed and sorted coordinates of each geometry.
    nodes: Vec<[f64; 3]>,
    coefficients: Vec<f64>,
}

/// Fit `(r12, r23, r13, V)` samples with the permutation-symmetrized product kernel.
pub fn fit_3d_symmetrized(
    samples: &[(f64, f64, f64, f64)],
    params: &RPKernelParams,
) -> Result<RKHSModel3D> {
    params.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples".into()));
    }
    let kernel = RPKernel::new(*params);
    let mut geometries = Vec::with_capacity(samples.len());
    let mut nodes: Vec<[f64; 3]> = Vec::with_capacity(samples.len());
    let mut values = Vec::with_capacity(samples.len());
    for &(r12, r23, r13, v) in samples {
        check_triangle(r12, r23, r13)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!(
                "sample value at ({r12}, {r23}, {r13})"
            )));
        }
        geometries.push([r12, r23, r13]);
        nodes.push(sorted([r12, r23, r13].map(|r| params.map.apply(r))));
        values.push(v);
    }
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&i, &j| {
        nodes[i][0]
            .total_cmp(&nodes[j][0])
            .then(nodes[i][1].total_cmp(&nodes[j][1]))
            .then(nodes[i][2].total_cmp(&nodes[j][2]))
    });
    for w in order.windows(2) {
        let (a, b) = (&nodes[w[0]], &nodes[w[1]]);
        if (0..3).all(|d| (a[d] - b[d]).abs() <= 1e-12 * a[d].abs()) {
            let g = geometries[w[1]];
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
                reason: format!(
                    "geometry ({}, {}, {}) duplicates another sample up to permutation",
                    g[0], g[1], g[2]
                ),
            });
        }
    }
    let n = nodes.len();
    let mut k = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let q = symmetrized(&kernel, &nodes[i], &nodes[j]);
            k[(i, j)] = q;
            k[(j, i)] = q;
        }
    }
    let alpha = solve_spd(&k, &DVector::from_vec(values))?;
    Ok(RKHSModel3D {
        kernel,
        geometries,
        nodes,
        coefficients: alpha.iter().copied().collect(),
    })
}

impl RKHSModel3D {
    pub fn params(&self) -> &RPKernelParams {
        &self.kernel.params
    }

    pub fn geometries(&self) -> &[[f64; 3]] {
        &self.geometries
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Evaluate without the triangle check. The distances are sorted before
    /// use, so any relabelling gives a bit-identical result.
    pub fn evaluate_unchecked(&self, r12: f64, r23: f64, r13: f64) -> f64 {
        let map = self.kernel.params.map;
        let x = sorted([r12, r23, r13]).map(|r| map.apply(r));
        self.nodes
            .iter()
            .zip(&self.coefficients)
            .map(|(node, &a)| a * symmetrized(&self.kernel, &x, node))
            .sum()
    }

    pub fn evaluate(&self, r12: f64, r23: f64, r13: f64) -> Result<f64> {
        check_triangle(r12, r23, r13)?;
        Ok(self.evaluate_unchecked(r12, r23, r13))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> RPKernelParams {
        RPKernelParams::trimer_default(10.0)
    }

    fn smooth(r: [f64; 3]) -> f64 {
        let s: f64 = r.iter().map(|x| (-0.5 * (x - 4.0) * (x - 4.0)).exp()).sum();
        let p: f64 = r.iter().product();
        -s - 50.0 / p
    }

    fn grid() -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::new();
        for i in 0..6 {
            for j in 0..=i {
                let r12 = 3.0 + 0.8 * i as f64;
                let r13 = 3.0 + 0.8 * j as f64;
                for &c in &[-0.5, 0.3] {
                    let r23 = (r12 * r12 + r13 * r13 - 2.0 * r12 * r13 * c).sqrt();
                    out.push((r12, r23, r13, smooth([r12, r23, r13])));
                }
            }
        }
        out
    }

    #[test]
    fn synthetic_grid_is_interpolated() {
        let samples = grid();
        assert!(samples.len() >= 30);
        let model = fit_3d_symmetrized(&samples, &params()).unwrap();
        for &(a, b, c, v) in &samples {
            let got = model.evaluate(a, b, c).unwrap();
            assert!((got - v).abs() < 1e-8 * v.abs(), "({a},{b},{c})");
        }
    }

    #[test]
    fn single_sample_is_reproduced() {
        let model = fit_3d_symmetrized(&[(4.0, 4.0, 4.0, -2.5)], &params()).unwrap();
        assert!((model.evaluate(4.0, 4.0, 4.0).unwrap() + 2.5).abs() < 1e-14);
    }

    #[test]
    fn permuted_duplicate_is_rejected() {
        let s = [(3.0, 4.0, 5.0, 1.0), (5.0, 3.0, 4.0, 1.0)];
        assert!(matches!(
            fit_3d_symmetrized(&s, &params()),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn triangle_violation_is_rejected() {
        assert!(fit_3d_symmetrized(&[(1.0, 5.0, 1.0, 0.0)], &params()).is_err());
        // collinear is admissible
        assert!(check_triangle(2.0, 4.0, 2.0).is_ok());
    }

    proptest! {
        #[test]
        fn permutation_invariant(a in 2.5f64..9.0, b in 2.5f64..9.0, t in 0.0f64..1.0) {
            let (lo, hi) = ((a - b).abs(), a + b);
            let c = lo + t * (hi - lo);
            prop_assume!(c > 0.1);
            let model = fit_3d_symmetrized(&grid(), &params()).unwrap();
            let v = model.evaluate(a, b, c).unwrap();
            for p in [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                prop_assert_eq!(v.to_bits(), model.evaluate(p[0], p[1], p[2]).unwrap().to_bits());
            }
        }
    }
}
