use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::basis::ChannelBasis;
use super::interaction::InteractionModel;
use crate::angular::percival_seaton;
use crate::radial::{
    build_panels, choose_r_match, InnerBoundary, MatchOptions, Panel, RadialPotential,
    RadialProblem, StepPolicy,
};
use crate::special::{riccati_i_logderiv, riccati_j, riccati_k_logderiv, riccati_n};
use crate::{Error, Result};

/// Channel potential matrix for coupled radial equations in atomic units.
pub trait CoupledPotential: Send + Sync {
    fn size(&self) -> usize;
    fn ells(&self) -> Vec<u32>;
    /// Asymptotic channel energies.
    fn thresholds(&self) -> Vec<f64>;
    /// Interaction matrix at `r`, without centrifugal and threshold terms.
    fn potential(&self, r: f64, out: &mut DMatrix<f64>);
    /// Value at a breakpoint approached from one side.
    fn potential_side(&self, r: f64, _from_left: bool, out: &mut DMatrix<f64>) {
        self.potential(r, out)
    }
    /// Potential whose local wave number drives the step rule.
    fn reference(&self, r: f64) -> f64 {
        let mut m = DMatrix::zeros(self.size(), self.size());
        self.potential(r, &mut m);
        m[(0, 0)]
    }
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Atom-rigid-rotor coupling `W_cc' = sum_lambda f_lambda(c, c'; J) v_lambda(R)`.
#[derive(Clone)]
pub struct RotorCoupling {
    pub basis: ChannelBasis,
    pub interaction: InteractionModel,
    coefficients: Vec<DMatrix<f64>>,
}

/// Percival-Seaton coefficient matrix `f_lambda` over the basis.
pub fn coupling_coefficients(basis: &ChannelBasis, lambda: u32) -> DMatrix<f64> {
    let n = basis.len();
    DMatrix::from_fn(n, n, |a, b| {
        let (ca, cb) = (basis.channels[a], basis.channels[b]);
        percival_seaton(ca.j, ca.ell, cb.j, cb.ell, lambda, basis.total_j)
    })
}

impl RotorCoupling {
    pub fn new(basis: ChannelBasis, interaction: InteractionModel) -> Self {
        let coefficients = interaction
            .terms
            .iter()
            .map(|(l, _)| coupling_coefficients(&basis, *l))
            .collect();
        Self {
            basis,
            interaction,
            coefficients,
        }
    }
}

impl CoupledPotential for RotorCoupling {
    fn size(&self) -> usize {
        self.basis.len()
    }
    fn ells(&self) -> Vec<u32> {
        self.basis.ells()
    }
    fn thresholds(&self) -> Vec<f64> {
        self.basis.thresholds()
    }
    fn potential(&self, r: f64, out: &mut DMatrix<f64>) {
        out.fill(0.0);
        for ((_, v), f) in self.interaction.terms.iter().zip(&self.coefficients) {
            let x = v.value(r);
            if x != 0.0 {
                *out += f * x;
            }
        }
    }
    fn reference(&self, r: f64) -> f64 {
        self.interaction.isotropic_value(r)
    }
}

/// `W(R) = V(R) + diag(threshold + l(l+1)/(2 mu R^2))` of
/// [`coupling_matrix`] form.
pub fn coupling_matrix(pot: &dyn CoupledPotential, mass: f64, r: f64) -> Result<DMatrix<f64>> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    let n = pot.size();
    let mut w = DMatrix::zeros(n, n);
    pot.potential(r, &mut w);
    for (i, (l, e)) in pot.ells().into_iter().zip(pot.thresholds()).enumerate() {
        let l = l as f64;
        w[(i, i)] += e + l * (l + 1.0) / (2.0 * mass * r * r);
    }
    Ok(w)
}

/// Grid and matching controls for [`solve_cc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcOptions {
    pub mass: f64,
    pub r_min: f64,
    pub inner: InnerBoundary,
    pub steps: StepPolicy,
    pub matching: MatchOptions,
}

impl CcOptions {
    pub fn new(mass: f64, r_min: f64) -> Self {
        Self {
            mass,
            r_min,
            inner: InnerBoundary::Wkb,
            steps: StepPolicy::default(),
            matching: MatchOptions::default(),
        }
    }
}

/// Scattering matrix over the open channels at one total energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix {
    pub energy: f64,
    /// Basis indices of the open channels, in order.
    pub open: Vec<usize>,
    /// Wave numbers of the open channels.
    pub k: Vec<f64>,
    pub k_matrix: DMatrix<f64>,
    pub s: DMatrix<Complex64>,
    pub r_match: f64,
}

impl SMatrix {
    /// `max |S^dagger S - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.s.nrows();
        let p = self.s.adjoint() * &self.s - DMatrix::<Complex64>::identity(n, n);
        p.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |S - S^T|`.
    pub fn symmetry_defect(&self) -> f64 {
        (&self.s - self.s.transpose())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Sum of the eigenphases `atan(eig K)`.
    pub fn eigenphase_sum(&self) -> f64 {
        SymmetricEigen::new(self.k_matrix.clone())
            .eigenvalues
            .iter()
            .map(|x| x.atan())
            .sum()
    }

    /// Row of `S` belonging to basis channel `channel`, if it is open.
    pub fn open_index(&self, channel: usize) -> Option<usize> {
        self.open.iter().position(|&c| c == channel)
    }
}

/// Cayley transform `S = (I + iK)(I - iK)^-1`.
pub fn s_from_k(k: &DMatrix<f64>) -> Result<DMatrix<Complex64>> {
    let n = k.nrows();
    let ik = k.map(|x| Complex64::new(0.0, x));
    let id = DMatrix::<Complex64>::identity(n, n);
    let inv = (&id - &ik)
        .try_inverse()
        .ok_or_else(|| Error::Singular("I - iK".into()))?;
    Ok((id + ik) * inv)
}

/// Propagate a log-derivative matrix through `panels`. `y0 = None` is a hard
/// wall at the first panel's start.
pub fn propagate_matrix(
    panels: &[Panel],
    y0: Option<DMatrix<f64>>,
    n: usize,
    mut q: impl FnMut(f64, Option<bool>, &mut DMatrix<f64>),
) -> Result<DMatrix<f64>> {
    let id = DMatrix::<f64>::identity(n, n);
    let mut y = y0;
    let mut qa = DMatrix::zeros(n, n);
    let mut qm = DMatrix::zeros(n, n);
    let mut qb = DMatrix::zeros(n, n);
    let sector = |y: Option<DMatrix<f64>>, h: f64| -> Result<DMatrix<f64>> {
        match y {
            None => Ok(&id / h),
            Some(y) => {
                let d = &id + &y * h;
                d.lu()
                    .solve(&y)
                    .ok_or_else(|| Error::Singular("sector matrix I + hY".into()))
            }
        }
    };
    for p in panels {
        let h = p.h;
        q(p.a, p.a_on_break.then_some(false), &mut qa);
        q(p.a + h, None, &mut qm);
        q(p.b(), p.b_on_break.then_some(true), &mut qb);
        if let Some(m) = y.as_mut() {
            *m -= &qa * (h / 3.0);
        }
        let mut cur = sector(y.take(), h)?;
        let u = (&id + &qm * (h * h / 6.0))
            .lu()
            .solve(&qm)
            .ok_or_else(|| Error::Singular("mid-point matrix".into()))?;
        cur -= u * (4.0 * h / 3.0);
        let mut cur = sector(Some(cur), h)?;
        cur -= &qb * (h / 3.0);
        y = Some(cur);
    }
    let y = y.ok_or_else(|| Error::InvalidInput("no propagation panels".into()))?;
    if y.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("log-derivative matrix".into()));
    }
    // remove the rounding asymmetry
    Ok((&y + y.transpose()) * 0.5)
}

struct Setup<'a> {
    pot: &'a dyn CoupledPotential,
    mass: f64,
    energy: f64,
    ells: Vec<u32>,
    thresholds: Vec<f64>,
}

impl Setup<'_> {
    fn q(&self, r: f64, side: Option<bool>, out: &mut DMatrix<f64>) {
        match side {
            Some(from_left) => self.pot.potential_side(r, from_left, out),
            None => self.pot.potential(r, out),
        }
        let two_mu = 2.0 * self.mass;
        *out *= -two_mu;
        for i in 0..self.ells.len() {
            let l = self.ells[i] as f64;
            out[(i, i)] += two_mu * (self.energy - self.thresholds[i]) - l * (l + 1.0) / (r * r);
        }
    }

    fn k_local(&self, r: f64) -> f64 {
        (2.0 * self.mass * (self.energy - self.pot.reference(r)).abs()).sqrt()
    }

    fn initial(&self, inner: InnerBoundary, r: f64) -> Result<Option<DMatrix<f64>>> {
        let n = self.ells.len();
        match inner {
            InnerBoundary::HardWall => Ok(None),
            InnerBoundary::LogDerivative(y) => Ok(Some(DMatrix::identity(n, n) * y)),
            InnerBoundary::Wkb => {
                let mut q = DMatrix::zeros(n, n);
                self.q(r, None, &mut q);
                let eig = SymmetricEigen::new(-q);
                if eig.eigenvalues.iter().any(|&v| !(v > 0.0)) {
                    return Err(Error::Domain(format!(
                        "r_min = {r} is not classically forbidden in every channel"
                    )));
                }
                let root = eig.eigenvalues.map(f64::sqrt);
                Ok(Some(
                    &eig.eigenvectors
                        * DMatrix::from_diagonal(&root)
                        * eig.eigenvectors.transpose(),
                ))
            }
        }
    }

    fn propagate(&self, panels: &[Panel], y0: Option<DMatrix<f64>>) -> Result<DMatrix<f64>> {
        propagate_matrix(panels, y0, self.ells.len(), |r, side, out| {
            self.q(r, side, out)
        })
    }

    fn panels(&self, from: f64, to: f64, steps: &StepPolicy) -> Result<Vec<Panel>> {
        build_panels(from, to, &self.pot.breakpoints(), steps, |r| {
            self.k_local(r)
        })
    }
}

/// Open-open block of the reactance matrix from the log-derivative matrix at
/// `r`, with closed channels matched to decaying solutions.
pub fn match_k(
    y: &DMatrix<f64>,
    r: f64,
    energy: f64,
    mass: f64,
    ells: &[u32],
    thresholds: &[f64],
) -> Result<(Vec<usize>, Vec<f64>, DMatrix<f64>)> {
    let n = ells.len();
    let mut jv = vec![0.0; n];
    let mut jd = vec![0.0; n];
    let mut nv = vec![0.0; n];
    let mut nd = vec![0.0; n];
    let mut open = Vec::new();
    let mut ks = Vec::new();
    for i in 0..n {
        let e = energy - thresholds[i];
        if e > 0.0 {
            let k = (2.0 * mass * e).sqrt();
            let norm = 1.0 / k.sqrt();
            let (j, nn) = (riccati_j(ells[i], k * r), riccati_n(ells[i], k * r));
            jv[i] = j.value * norm;
            jd[i] = k * j.deriv * norm;
            nv[i] = nn.value * norm;
            nd[i] = k * nn.deriv * norm;
            open.push(i);
            ks.push(k);
        } else {
            let kappa = (2.0 * mass * (-e)).sqrt();
            jv[i] = 1.0;
            jd[i] = kappa * riccati_i_logderiv(ells[i], kappa * r);
            nv[i] = 1.0;
            nd[i] = kappa * riccati_k_logderiv(ells[i], kappa * r);
        }
    }
    if open.is_empty() {
        return Err(Error::NoOpenChannel);
    }
    let a = DMatrix::from_fn(n, n, |i, j| {
        y[(i, j)] * nv[j] - if i == j { nd[j] } else { 0.0 }
    });
    let b = DMatrix::from_fn(n, n, |i, j| {
        y[(i, j)] * jv[j] - if i == j { jd[j] } else { 0.0 }
    });
    let k_full = -a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Singular("matching matrix".into()))?;
    let m = open.len();
    let k_oo = DMatrix::from_fn(m, m, |i, j| k_full[(open[i], open[j])]);
    Ok((open, ks, k_oo))
}

/// Radius beyond which every coupling is negligible for the slowest open
/// channel, by the single-channel rule applied to `max |W_cc'|`.
fn coupled_r_match(setup: &Setup, options: &CcOptions) -> Result<f64> {
    let slowest = setup
        .thresholds
        .iter()
        .filter(|&&t| t < setup.energy)
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if slowest == f64::NEG_INFINITY {
        return Err(Error::NoOpenChannel);
    }
    struct Largest<'a>(&'a dyn CoupledPotential);
    impl RadialPotential for Largest<'_> {
        fn value(&self, r: f64) -> f64 {
            let n = self.0.size();
            let mut m = DMatrix::zeros(n, n);
            self.0.potential(r, &mut m);
            m.iter().fold(0.0, |a, x| a.max(x.abs()))
        }
        fn breakpoints(&self) -> Vec<f64> {
            self.0.breakpoints()
        }
    }
    let largest = Largest(setup.pot);
    let prob = RadialProblem::new(
        &largest,
        setup.mass,
        0,
        setup.energy - slowest,
        options.r_min,
    );
    choose_r_match(&prob, &options.matching)
}

/// Coupled-channel S matrix at total energy `energy` (Hartree, measured from
/// the `j = 0` threshold). The reported S is matched at `2 R` and must agree
/// with the one at `R` within the matching tolerance.
pub fn solve_coupled(
    pot: &dyn CoupledPotential,
    energy: f64,
    options: &CcOptions,
) -> Result<SMatrix> {
    if pot.size() == 0 {
        return Err(Error::EmptyBasis);
    }
    if !(options.mass > 0.0 && options.r_min > 0.0) {
        return Err(Error::InvalidInput(
            "mass and r_min must be positive".into(),
        ));
    }
    let setup = Setup {
        pot,
        mass: options.mass,
        energy,
        ells: pot.ells(),
        thresholds: pot.thresholds(),
    };
    if !setup.thresholds.iter().any(|&t| t < energy) {
        return Err(Error::NoOpenChannel);
    }
    let r1 = match options.matching.r_match {
        Some(r) => r,
        None => coupled_r_match(&setup, options)?,
    };
    let y0 = setup.initial(options.inner, options.r_min)?;
    let y1 = setup.propagate(&setup.panels(options.r_min, r1, &options.steps)?, y0)?;
    let (_, _, k1) = match_k(&y1, r1, energy, setup.mass, &setup.ells, &setup.thresholds)?;
    let r2 = 2.0 * r1;
    let y2 = setup.propagate(&setup.panels(r1, r2, &options.steps)?, Some(y1))?;
    let (open, k, k2) = match_k(&y2, r2, energy, setup.mass, &setup.ells, &setup.thresholds)?;
    let s1 = s_from_k(&k1)?;
    let s2 = s_from_k(&k2)?;
    let drift = (&s2 - &s1).iter().map(|z| z.norm()).fold(0.0, f64::max);
    // |dS| = 2 |d delta| for a single channel
    if drift > 2.0 * options.matching.tolerance {
        return Err(Error::Unconverged {
            drift: 0.5 * drift,
            tolerance: options.matching.tolerance,
        });
    }
    Ok(SMatrix {
        energy,
        open,
        k,
        k_matrix: k2,
        s: s2,
        r_match: r2,
    })
}

/// [`solve_coupled`] for the atom-rigid-rotor model.
pub fn solve_cc(
    basis: &ChannelBasis,
    interaction: &InteractionModel,
    energy: f64,
    options: &CcOptions,
) -> Result<SMatrix> {
    let pot = RotorCoupling::new(basis.clone(), interaction.clone());
    solve_coupled(&pot, energy, options)
}

/// Partial cross section (bohr^2) out of entrance channel `entrance` (basis
/// index): `(2J + 1) pi / k^2 sum_c' |delta_cc' - S_cc'|^2`.
pub fn partial_cross_section(s: &SMatrix, basis: &ChannelBasis, entrance: usize) -> Result<f64> {
    let row = s
        .open_index(entrance)
        .ok_or(Error::ClosedChannel(entrance))?;
    let k = s.k[row];
    let sum: f64 = (0..s.open.len())
        .map(|c| {
            let d = if c == row {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            (d - s.s[(row, c)]).norm_sqr()
        })
        .sum();
    Ok((2 * basis.total_j + 1) as f64 * PI / (k * k) * sum)
}
