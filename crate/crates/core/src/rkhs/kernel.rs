use crate::{Error, Result};

/// Transform applied to a physical distance before the kernel sees it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariableMap {
    Identity,
    /// x = r^2
    Square,
    /// x = (r / scale)^power
    Reduced {
        scale: f64,
        power: f64,
    },
}

impl VariableMap {
    pub fn apply(&self, r: f64) -> f64 {
        match *self {
            VariableMap::Identity => r,
            VariableMap::Square => r * r,
            VariableMap::Reduced { scale, power } => (r / scale).powf(power),
        }
    }

    /// Physical exponent `p` and factor `f` such that `x^{-q} = f r^{-p}`.
    pub fn physical_power(&self, q: u32) -> (f64, f64) {
        let q = q as f64;
        match *self {
            VariableMap::Identity => (q, 1.0),
            VariableMap::Square => (2.0 * q, 1.0),
            VariableMap::Reduced { scale, power } => (power * q, scale.powf(power * q)),
        }
    }
}

/// Reciprocal-power kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RPKernelParams {
    /// Leading reciprocal power of the kernel is `m + 1`.
    pub m: u32,
    /// Smoothness order; the kernel tail has `n` reciprocal powers.
    pub n: u32,
    pub map: VariableMap,
}

impl RPKernelParams {
    pub fn new(m: u32, n: u32, map: VariableMap) -> Result<Self> {
        let params = Self { m, n, map };
        params.validate()?;
        Ok(params)
    }

    /// m = 2, n = 3 on r^2: tail powers r^-6, r^-8, r^-10.
    pub fn dimer_default() -> Self {
        Self {
            m: 2,
            n: 3,
            map: VariableMap::Square,
        }
    }

    /// m = 0, n = 2 on (r / S)^3.
    pub fn trimer_default(scale: f64) -> Self {
        Self {
            m: 0,
            n: 2,
            map: VariableMap::Reduced { scale, power: 3.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidInput("kernel order n must be >= 1".into()));
        }
        if let VariableMap::Reduced { scale, power } = self.map {
            if !(scale > 0.0 && power > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "reduced map needs positive scale and power, got S={scale}, p={power}"
                )));
            }
        }
        Ok(())
    }

    /// Polynomial coefficients `a_k` with
    /// `q(x, y) = x_>^{-(m+1)} sum_k a_k (x_< / x_>)^k`.
    ///
    /// `a_k = n^2 B(m+1, n) (1-n)_k (m+1)_k / ((n+m+1)_k k!)`, the terminating
    /// hypergeometric series written out explicitly.
    pub fn polynomial(&self) -> Vec<f64> {
        let (m, n) = (self.m as f64, self.n as f64);
        // B(m+1, n) = m! (n-1)! / (m+n)!
        let beta = (1..=self.m).map(f64::from).product::<f64>()
            * (1..self.n).map(f64::from).product::<f64>()
            / (1..=self.m + self.n).map(f64::from).product::<f64>();
        let mut coeffs = Vec::with_capacity(self.n as usize);
        let mut c = 1.0;
        for k in 0..self.n {
            coeffs.push(n * n * beta * c);
            let kf = k as f64;
            c *= (1.0 - n + kf) * (m + 1.0 + kf) / ((n + m + 1.0 + kf) * (kf + 1.0));
        }
        coeffs
    }
}

/// Kernel evaluator with the polynomial precomputed.
#[derive(Debug, Clone)]
pub struct RPKernel {
    pub params: RPKernelParams,
    poly: Vec<f64>,
}

impl RPKernel {
    pub fn new(params: RPKernelParams) -> Self {
        Self {
            poly: params.polynomial(),
            params,
        }
    }

    pub fn polynomial(&self) -> &[f64] {
        &self.poly
    }

    /// Kernel value in the transformed variable; both arguments must be positive.
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let t = lo / hi;
        let mut acc = 0.0;
        for &a in self.poly.iter().rev() {
            acc = acc * t + a;
        }
        acc * hi.powi(-(self.params.m as i32 + 1))
    }
}

/// Kernel value `q(x, y)` for transformed arguments.
pub fn rp_kernel(x: f64, y: f64, params: &RPKernelParams) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!(
            "kernel arguments must be positive, got ({x}, {y})"
        )));
    }
    params.validate()?;
    Ok(RPKernel::new(*params).eval(x, y))
}
