use std::sync::Arc;

use crate::potentials::{DimerCurve, TrimerSurface};
use crate::radial::{bound_level, RadialPotential, RadialProblem};
use crate::special::{gauss_legendre, legendre};
use crate::{Error, Result};

/// Natural cubic spline through `(r_i, v_i)`, continued beyond the last point
/// as `v_last (r_last / r)^tail_power` and held constant below the first.
#[derive(Debug, Clone)]
pub struct Tabulated {
    r: Vec<f64>,
    v: Vec<f64>,
    second: Vec<f64>,
    tail_power: i32,
}

impl Tabulated {
    pub fn new(r: Vec<f64>, v: Vec<f64>, tail_power: i32) -> Result<Self> {
        let n = r.len();
        if n < 3 || v.len() != n {
            return Err(Error::InvalidInput(
                "a table needs at least 3 matching points".into(),
            ));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("table abscissae must increase".into()));
        }
        // tridiagonal system for the second derivatives, natural end conditions
        let mut second = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (r[i] - r[i - 1]) / (r[i + 1] - r[i - 1]);
            let p = sig * second[i - 1] + 2.0;
            second[i] = (sig - 1.0) / p;
            let slope =
                (v[i + 1] - v[i]) / (r[i + 1] - r[i]) - (v[i] - v[i - 1]) / (r[i] - r[i - 1]);
            u[i] = (6.0 * slope / (r[i + 1] - r[i - 1]) - sig * u[i - 1]) / p;
        }
        second[n - 1] = 0.0;
        for i in (0..n - 1).rev() {
            second[i] = second[i] * second[i + 1] + u[i];
        }
        Ok(Self {
            r,
            v,
            second,
            tail_power,
        })
    }

    pub fn points(&self) -> (&[f64], &[f64]) {
        (&self.r, &self.v)
    }
}

impl RadialPotential for Tabulated {
    fn value(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= self.r[0] {
            return self.v[0];
        }
        if x >= self.r[n - 1] {
            return self.v[n - 1] * (self.r[n - 1] / x).powi(self.tail_power);
        }
        let hi = self.r.partition_point(|&t| t < x).max(1);
        let lo = hi - 1;
        let h = self.r[hi] - self.r[lo];
        let a = (self.r[hi] - x) / h;
        let b = 1.0 - a;
        a * self.v[lo]
            + b * self.v[hi]
            + ((a * a * a - a) * self.second[lo] + (b * b * b - b) * self.second[hi]) * h * h / 6.0
    }
}

/// `sum_i c_i V_i(r)`.
#[derive(Clone)]
pub struct LinearCombination {
    pub parts: Vec<(f64, Arc<dyn RadialPotential>)>,
}

impl RadialPotential for LinearCombination {
    fn value(&self, r: f64) -> f64 {
        self.parts.iter().map(|(c, p)| c * p.value(r)).sum()
    }
}

/// Legendre expansion `V(R, theta) = sum_lambda v_lambda(R) P_lambda(cos theta)`
/// of an atom-rigid-rotor interaction. Energies in Hartree, `R` in bohr.
#[derive(Clone, Default)]
pub struct InteractionModel {
    pub terms: Vec<(u32, Arc<dyn RadialPotential>)>,
}

impl InteractionModel {
    pub fn isotropic(v0: Arc<dyn RadialPotential>) -> Self {
        Self {
            terms: vec![(0, v0)],
        }
    }

    pub fn with_term(mut self, lambda: u32, v: Arc<dyn RadialPotential>) -> Self {
        self.terms.push((lambda, v));
        self
    }

    pub fn term(&self, lambda: u32) -> Option<&Arc<dyn RadialPotential>> {
        self.terms
            .iter()
            .find(|(l, _)| *l == lambda)
            .map(|(_, v)| v)
    }

    /// The isotropic term, or zero.
    pub fn isotropic_value(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .filter(|(l, _)| *l == 0)
            .map(|(_, v)| v.value(r))
            .sum()
    }
}

/// Coefficients `(2 lambda + 1)/2 int_{-1}^{1} f(x) P_lambda(x) dx` for each
/// requested `lambda`, by Gauss-Legendre quadrature of order `points`.
pub fn legendre_projection(f: impl Fn(f64) -> f64, orders: &[u32], points: usize) -> Vec<f64> {
    let (x, w) = gauss_legendre(points);
    let values: Vec<f64> = x.iter().map(|&c| f(c)).collect();
    orders
        .iter()
        .map(|&l| {
            let s: f64 = x
                .iter()
                .zip(&w)
                .zip(&values)
                .map(|((&c, &wi), &fi)| wi * fi * legendre(l as usize, c))
                .sum();
            0.5 * (2 * l + 1) as f64 * s
        })
        .collect()
}

/// Radial grid (bohr) used for tabulated projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionGrid {
    pub r_min: f64,
    pub r_max: f64,
    /// Spacing below 10 bohr; beyond it the spacing grows in proportion to `R`.
    pub spacing: f64,
    pub quadrature: usize,
}

impl ProjectionGrid {
    pub fn radii(&self) -> Vec<f64> {
        let mut out = vec![self.r_min];
        let mut r = self.r_min;
        while r < self.r_max {
            r += self.spacing * (r / 10.0).max(1.0);
            out.push(r.min(self.r_max));
        }
        out.dedup();
        out
    }
}

/// Legendre components of the trimer surface seen by an atom approaching a
/// diatom frozen at bond length `r_e`, split into the pairwise part
/// (the two new atom-atom contacts) and the nonadditive part.
#[derive(Clone)]
pub struct AtomDiatomProjection {
    pub bond_length: f64,
    pub orders: Vec<u32>,
    pub pair: Vec<Arc<Tabulated>>,
    pub three: Vec<Arc<Tabulated>>,
}

/// Distances from the atom to the two diatom atoms at Jacobi `(R, cos theta)`.
pub fn jacobi_distances(r: f64, cos_theta: f64, bond: f64) -> (f64, f64) {
    let base = r * r + 0.25 * bond * bond;
    let cross = r * bond * cos_theta;
    (
        (base - cross).max(0.0).sqrt(),
        (base + cross).max(0.0).sqrt(),
    )
}

/// Project `surface` onto even Legendre orders up to `max_order`. The
/// surface's own `lambda` is ignored; both parts are tabulated unscaled.
pub fn project_trimer(
    surface: &TrimerSurface,
    bond_length: f64,
    max_order: u32,
    grid: &ProjectionGrid,
) -> Result<AtomDiatomProjection> {
    let orders: Vec<u32> = (0..=max_order).step_by(2).collect();
    let radii = grid.radii();
    let mut pair_cols = vec![Vec::with_capacity(radii.len()); orders.len()];
    let mut three_cols = vec![Vec::with_capacity(radii.len()); orders.len()];
    for &r in &radii {
        let pair = legendre_projection(
            |c| {
                let (a, b) = jacobi_distances(r, c, bond_length);
                surface.pairwise.evaluate(a) + surface.pairwise.evaluate(b)
            },
            &orders,
            grid.quadrature,
        );
        let three = legendre_projection(
            |c| {
                let (a, b) = jacobi_distances(r, c, bond_length);
                let mut d = [a, b, bond_length];
                d.sort_by(f64::total_cmp);
                surface.nonadditive(d[0], d[1], d[2])
            },
            &orders,
            grid.quadrature,
        );
        for (i, (p, t)) in pair.into_iter().zip(three).enumerate() {
            pair_cols[i].push(p);
            three_cols[i].push(t);
        }
    }
    let table = |col: Vec<f64>| Tabulated::new(radii.clone(), col, 6).map(Arc::new);
    Ok(AtomDiatomProjection {
        bond_length,
        pair: pair_cols.into_iter().map(table).collect::<Result<_>>()?,
        three: three_cols.into_iter().map(table).collect::<Result<_>>()?,
        orders,
    })
}

impl AtomDiatomProjection {
    /// `v_lambda = kappa_lambda (pair_lambda + lambda3 three_lambda)` with
    /// `kappa_0 = 1` and `kappa = anisotropy` for every higher order.
    pub fn model(&self, lambda3: f64, anisotropy: f64) -> InteractionModel {
        let terms = self
            .orders
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == 0 || anisotropy != 0.0)
            .map(|(i, &l)| {
                let k = if l == 0 { 1.0 } else { anisotropy };
                let pot: Arc<dyn RadialPotential> = Arc::new(LinearCombination {
                    parts: vec![
                        (k, self.pair[i].clone() as Arc<dyn RadialPotential>),
                        (
                            k * lambda3,
                            self.three[i].clone() as Arc<dyn RadialPotential>,
                        ),
                    ],
                });
                (l, pot)
            })
            .collect();
        InteractionModel { terms }
    }

    /// Smallest tabulated `R`.
    pub fn r_min(&self) -> f64 {
        self.pair[0].points().0[0]
    }
}

/// Rotational constant `B = (E_{v=0, l=1} - E_{v=0, l=0}) / 2` of a diatom
/// described by `curve`, from its two lowest rotational levels.
pub fn rotational_constant(curve: &DimerCurve, mass: f64) -> Result<f64> {
    let prob = RadialProblem::new(curve, mass, 0, 0.0, curve.inner_radius());
    let e0 = bound_level(&prob, 0, 1e-14)?.ok_or(Error::NoWell)?;
    let e1 = bound_level(&prob.with_ell(1), 0, 1e-14)?.ok_or(Error::NoWell)?;
    Ok(0.5 * (e1 - e0))
}
