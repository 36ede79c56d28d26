use crate::potentials::DimerCurve;

/// A central potential in atomic units, vanishing as `r -> infinity`.
pub trait RadialPotential: Send + Sync {
    fn value(&self, r: f64) -> f64;

    /// Value at a point of discontinuity approached from the left or right.
    /// Only called at radii listed in [`RadialPotential::breakpoints`].
    fn value_side(&self, r: f64, _from_left: bool) -> f64 {
        self.value(r)
    }

    /// Radii where the potential is discontinuous; propagation panels end
    /// exactly on them.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<P: RadialPotential + ?Sized> RadialPotential for &P {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn value_side(&self, r: f64, from_left: bool) -> f64 {
        (**self).value_side(r, from_left)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

impl<P: RadialPotential + ?Sized> RadialPotential for std::sync::Arc<P> {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn value_side(&self, r: f64, from_left: bool) -> f64 {
        (**self).value_side(r, from_left)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// `V = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPotential;

impl RadialPotential for ZeroPotential {
    fn value(&self, _r: f64) -> f64 {
        0.0
    }
}

/// Potential defined by a closure.
pub struct FnPotential<F>(pub F);

impl<F: Fn(f64) -> f64 + Send + Sync> RadialPotential for FnPotential<F> {
    fn value(&self, r: f64) -> f64 {
        (self.0)(r)
    }
}

/// `V = -depth` for `r < radius`, zero outside.
#[derive(Debug, Clone, Copy)]
pub struct SquareWell {
    pub depth: f64,
    pub radius: f64,
}

impl RadialPotential for SquareWell {
    fn value(&self, r: f64) -> f64 {
        if r < self.radius {
            -self.depth
        } else {
            0.0
        }
    }
    fn value_side(&self, _r: f64, from_left: bool) -> f64 {
        if from_left {
            -self.depth
        } else {
            0.0
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.radius]
    }
}

/// Another potential multiplied by a constant.
#[derive(Debug, Clone)]
pub struct Scaled<P> {
    pub inner: P,
    pub factor: f64,
}

impl<P: RadialPotential> RadialPotential for Scaled<P> {
    fn value(&self, r: f64) -> f64 {
        self.factor * self.inner.value(r)
    }
    fn value_side(&self, r: f64, from_left: bool) -> f64 {
        self.factor * self.inner.value_side(r, from_left)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

/// `V = -C6 / r^6`, used for long-range checks.
#[derive(Debug, Clone, Copy)]
pub struct Dispersion {
    pub c6: f64,
}

impl RadialPotential for Dispersion {
    fn value(&self, r: f64) -> f64 {
        -self.c6 / r.powi(6)
    }
}

/// Lennard-Jones `4 eps [(s/r)^12 - (s/r)^6]`.
#[derive(Debug, Clone, Copy)]
pub struct LennardJones {
    pub epsilon: f64,
    pub sigma: f64,
}

impl RadialPotential for LennardJones {
    fn value(&self, r: f64) -> f64 {
        let s6 = (self.sigma / r).powi(6);
        4.0 * self.epsilon * (s6 * s6 - s6)
    }
}

impl RadialPotential for DimerCurve {
    fn value(&self, r: f64) -> f64 {
        self.evaluate(r)
    }
}
