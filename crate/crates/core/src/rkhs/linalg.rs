use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Relative residual accepted from the direct solve before falling back to SVD.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

fn relative_residual(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let r = a * x - b;
    r.norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn condition_estimate(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn refine<F: Fn(&DVector<f64>) -> DVector<f64>>(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    mut x: DVector<f64>,
    solve: F,
) -> DVector<f64> {
    for _ in 0..3 {
        let r = b - a * &x;
        if r.norm() <= 1e-16 * b.norm() {
            break;
        }
        x += solve(&r);
    }
    x
}

fn svd_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let cond = condition_estimate(a);
    if !cond.is_finite() || cond > 1e17 {
        return Err(Error::IllConditioned {
            condition: cond,
            reason: "kernel matrix is numerically rank deficient".into(),
        });
    }
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(b, f64::EPSILON * svd.singular_values.max())
        .map_err(|e| Error::Singular(e.to_string()))?;
    Ok(x)
}

/// Solve a symmetric positive-definite kernel system: Cholesky with iterative
/// refinement, SVD as the rank-revealing fallback.
pub fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(chol) = a.clone().cholesky() {
        let x = chol.solve(b);
        let x = refine(a, b, x, |r| chol.solve(r));
        if x.iter().all(|v| v.is_finite()) && relative_residual(a, &x, b) <= RESIDUAL_TOLERANCE {
            return Ok(x);
        }
    }
    let x = svd_solve(a, b)?;
    let res = relative_residual(a, &x, b);
    if res > RESIDUAL_TOLERANCE * 1e3 {
        return Err(Error::IllConditioned {
            condition: condition_estimate(a),
            reason: format!("relative residual {res:.2e} after SVD fallback"),
        });
    }
    Ok(x)
}

/// Solve a general square system with full-pivot LU and refinement.
pub fn solve_general(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let lu = a.clone().full_piv_lu();
    let x = lu
        .solve(b)
        .ok_or_else(|| Error::Singular("bordered kernel system is singular".into()))?;
    let x = refine(a, b, x, |r| {
        lu.solve(r).unwrap_or_else(|| DVector::zeros(r.len()))
    });
    let res = relative_residual(a, &x, b);
    if !x.iter().all(|v| v.is_finite()) || res > RESIDUAL_TOLERANCE * 1e3 {
        return Err(Error::IllConditioned {
            condition: condition_estimate(a),
            reason: format!("relative residual {res:.2e}"),
        });
    }
    Ok(x)
}
