use nalgebra::{DMatrix, DVector};

use super::kernel::{RPKernel, RPKernelParams};
use super::linalg::{solve_general, solve_spd};
use crate::{Error, Result};

/// One term `coefficient * r^{-power}` of an asymptotic expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticTerm {
    /// Exponent in the transformed variable, `x^{-variable_power}`.
    pub variable_power: u32,
    /// Coefficient of `x^{-variable_power}`.
    pub variable_coefficient: f64,
    /// Physical exponent `p` in `r^{-p}`.
    pub physical_power: f64,
    /// Coefficient of `r^{-p}`.
    pub physical_coefficient: f64,
}

/// Fitted one-dimensional reciprocal-power interpolant.
#[derive(Debug, Clone)]
pub struct RKHSModel1D {
    kernel: RPKernel,
    abscissae: Vec<f64>,
    coefficients: Vec<f64>,
    /// Explicit reciprocal-power terms added by a fixed-tail fit: (kernel power index k, beta).
    extra_terms: Vec<(u32, f64)>,
    /// Cut-off of the explicit terms; see [`tail_basis`].
    tail_cut: f64,
}

/// Order of the short-range cut-off applied to the explicit tail terms.
const TAIL_CUT_POWER: i32 = 6;

/// Explicit tail basis function `x^{-q} (1 - exp(-(x / x_c)^6))`.
///
/// With `x_c` at half the last abscissa the cut-off factor differs from one
/// by less than `exp(-64)` beyond the data, so there the function is a pure
/// reciprocal power, while inside the data it stays small instead of
/// swamping the kernel terms.
fn tail_basis(x: f64, q: i32, x_c: f64) -> f64 {
    x.powi(-q) * -(-(x / x_c).powi(TAIL_CUT_POWER)).exp_m1()
}

fn prepare(samples: &[(f64, f64)], params: &RPKernelParams) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate()?;
    if samples.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
    for &(r, v) in samples {
        if !(r > 0.0) || !r.is_finite() || !v.is_finite() {
            return Err(Error::Domain(format!("invalid sample ({r}, {v})")));
        }
        pts.push((params.map.apply(r), v));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pts.windows(2) {
        if (w[1].0 - w[0].0).abs() <= 1e-12 * w[1].0.abs() {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
                reason: format!("repeated abscissa x = {}", w[0].0),
            });
        }
    }
    Ok(pts.into_iter().unzip())
}

fn kernel_matrix(kernel: &RPKernel, xs: &[f64]) -> DMatrix<f64> {
    let n = xs.len();
    DMatrix::from_fn(n, n, |i, j| kernel.eval(xs[i], xs[j]))
}

/// Exact interpolation of `(r, V)` samples.
pub fn fit_1d(samples: &[(f64, f64)], params: &RPKernelParams) -> Result<RKHSModel1D> {
    let (xs, vs) = prepare(samples, params)?;
    let kernel = RPKernel::new(*params);
    let k = kernel_matrix(&kernel, &xs);
    let alpha = solve_spd(&k, &DVector::from_vec(vs))?;
    Ok(RKHSModel1D {
        kernel,
        abscissae: xs,
        coefficients: alpha.iter().copied().collect(),
        extra_terms: Vec::new(),
        tail_cut: 0.0,
    })
}

/// Interpolation with prescribed asymptotic coefficients.
///
/// `fixed` lists `(physical_power, coefficient)` pairs meaning the model must
/// behave as `coefficient * r^{-physical_power}` in that power beyond the last
/// sample. Each fixed power adds one explicit reciprocal-power basis function
/// to the interpolant and one linear constraint on the tail, so the bordered
/// system stays square.
pub fn fit_1d_fixed_tail(
    samples: &[(f64, f64)],
    params: &RPKernelParams,
    fixed: &[(f64, f64)],
) -> Result<RKHSModel1D> {
    let (xs, vs) = prepare(samples, params)?;
    let kernel = RPKernel::new(*params);
    let poly = kernel.polynomial().to_vec();
    let lead = params.m + 1;

    let mut constraints: Vec<(u32, f64)> = Vec::new();
    for &(p, c) in fixed {
        let index = (0..params.n).find(|&k| {
            let (phys, _) = params.map.physical_power(lead + k);
            (phys - p).abs() < 1e-9
        });
        let Some(k) = index else {
            return Err(Error::InvalidInput(format!(
                "power r^-{p} is not among the kernel's asymptotic powers"
            )));
        };
        if constraints.iter().any(|&(kk, _)| kk == k) {
            return Err(Error::InvalidInput(format!("power r^-{p} fixed twice")));
        }
        let (_, factor) = params.map.physical_power(lead + k);
        // c r^{-p} = c / factor * x^{-q}
        constraints.push((k, c / factor));
    }
    constraints.sort_by_key(|&(k, _)| k);

    // Block elimination: alpha = K^-1 (v - B beta), then the small Schur
    // system (I - C K^-1 B) beta = c - C K^-1 v fixes beta. Columns of B are
    // scaled by x_ref^q so that all unknowns are of similar size.
    let n = xs.len();
    let f = constraints.len();
    let x_ref = *xs.last().unwrap();
    let tail_cut = 0.5 * x_ref;
    let k_mat = kernel_matrix(&kernel, &xs);
    let v = DVector::from_vec(vs);
    let kinv_v = solve_spd(&k_mat, &v)?;
    let mut b_cols = Vec::with_capacity(f);
    let mut kinv_b = Vec::with_capacity(f);
    let mut c_rows = Vec::with_capacity(f);
    for &(k, _) in &constraints {
        let q = (lead + k) as i32;
        let scale = x_ref.powi(q);
        let col = DVector::from_fn(n, |i, _| scale * tail_basis(xs[i], q, tail_cut));
        kinv_b.push(solve_spd(&k_mat, &col)?);
        b_cols.push(col);
        // constraint row in the scaled unknowns: x_ref^-q a_k sum_i alpha_i x_i^k + beta~_k
        let s = x_ref.powi(-q);
        c_rows.push(DVector::from_fn(n, |i, _| {
            s * poly[k as usize] * xs[i].powi(k as i32)
        }));
    }
    let mut schur = DMatrix::<f64>::zeros(f, f);
    let mut rhs = DVector::<f64>::zeros(f);
    for (a, &(k, target)) in constraints.iter().enumerate() {
        let q = (lead + k) as i32;
        rhs[a] = x_ref.powi(-q) * target - c_rows[a].dot(&kinv_v);
        for b in 0..f {
            schur[(a, b)] = if a == b { 1.0 } else { 0.0 } - c_rows[a].dot(&kinv_b[b]);
        }
    }
    let beta = if f == 0 {
        rhs
    } else {
        solve_general(&schur, &rhs)?
    };
    // re-solve for alpha against the reduced data so the interpolation
    // conditions hold to solver precision
    let mut reduced = v;
    for b in 0..f {
        reduced -= &b_cols[b] * beta[b];
    }
    let alpha = solve_spd(&k_mat, &reduced)?;
    let coefficients = alpha.iter().copied().collect();
    let extra_terms = constraints
        .iter()
        .enumerate()
        .map(|(c, &(k, _))| {
            let q = (lead + k) as i32;
            (k, beta[c] * x_ref.powi(q))
        })
        .collect();
    Ok(RKHSModel1D {
        kernel,
        abscissae: xs,
        coefficients,
        extra_terms,
        tail_cut,
    })
}

impl RKHSModel1D {
    pub fn params(&self) -> &RPKernelParams {
        &self.kernel.params
    }

    /// Sample points in the transformed variable, increasing.
    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Largest sample abscissa in the transformed variable.
    pub fn last_abscissa(&self) -> f64 {
        *self.abscissae.last().unwrap()
    }

    /// Evaluate in the transformed variable.
    pub fn evaluate_x(&self, x: f64) -> f64 {
        let mut v: f64 = self
            .abscissae
            .iter()
            .zip(&self.coefficients)
            .map(|(&xi, &a)| a * self.kernel.eval(x, xi))
            .sum();
        let lead = self.kernel.params.m + 1;
        for &(k, beta) in &self.extra_terms {
            v += beta * tail_basis(x, (lead + k) as i32, self.tail_cut);
        }
        v
    }

    /// Evaluate at physical distance `r`.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("distance must be positive, got {r}")));
        }
        Ok(self.evaluate_x(self.kernel.params.map.apply(r)))
    }

    /// Coefficients of the finite reciprocal-power sum the model reduces to
    /// beyond the last sample: `x^{-(m+1)} ... x^{-(m+n)}`.
    pub fn asymptotic_coefficients(&self) -> Vec<AsymptoticTerm> {
        let params = self.kernel.params;
        let lead = params.m + 1;
        self.kernel
            .polynomial()
            .iter()
            .enumerate()
            .map(|(k, &a_k)| {
                let moment: f64 = self
                    .abscissae
                    .iter()
                    .zip(&self.coefficients)
                    .map(|(&x, &alpha)| alpha * x.powi(k as i32))
                    .sum();
                let extra: f64 = self
                    .extra_terms
                    .iter()
                    .filter(|&&(kk, _)| kk as usize == k)
                    .map(|&(_, b)| b)
                    .sum();
                let coeff = a_k * moment + extra;
                let q = lead + k as u32;
                let (phys, factor) = params.map.physical_power(q);
                AsymptoticTerm {
                    variable_power: q,
                    variable_coefficient: coeff,
                    physical_power: phys,
                    physical_coefficient: coeff * factor,
                }
            })
            .collect()
    }

    /// Evaluate the asymptotic sum at transformed `x` (valid beyond the last sample).
    pub fn evaluate_tail_x(&self, x: f64) -> f64 {
        self.asymptotic_coefficients()
            .iter()
            .map(|t| t.variable_coefficient * x.powi(-(t.variable_power as i32)))
            .sum()
    }
}
