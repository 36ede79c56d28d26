//! Riccati-Bessel functions, modified spherical Bessel ratios and
//! Gauss-Legendre quadrature.
//!
//! Conventions: `jhat(l, x) = x j_l(x) ~ sin(x - l pi/2)` and
//! `nhat(l, x) = -x y_l(x) ~ cos(x - l pi/2)`, so a free radial solution with
//! phase shift `delta` is `jhat cos(delta) + nhat sin(delta)`.

use std::f64::consts::PI;

/// Value and derivative of a radial function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueDeriv {
    pub value: f64,
    pub deriv: f64,
}

fn double_factorial_odd(l: u32) -> f64 {
    // (2l+1)!!
    (1..=l).fold(1.0, |acc, k| acc * (2 * k + 1) as f64)
}

/// Power series for x^{l+1} sum_k (sign x^2/2)^k / (k! (2l+3)...(2l+2k+1)) / (2l+1)!!.
/// `sign = -1` gives jhat, `+1` gives the modified ihat.
fn riccati_series(l: u32, x: f64, sign: f64) -> ValueDeriv {
    let pref = 1.0 / double_factorial_odd(l);
    let x2 = 0.5 * x * x * sign;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut dsum = 0.0;
    for k in 0..200u32 {
        let power = (l + 1 + 2 * k) as f64;
        sum += term;
        dsum += term * power;
        let next = term * x2 / (((k + 1) * (2 * l + 2 * k + 3)) as f64);
        if next.abs() < 1e-18 * sum.abs() {
            break;
        }
        term = next;
    }
    let xl = x.powi(l as i32);
    ValueDeriv {
        value: pref * sum * xl * x,
        deriv: pref * dsum * xl,
    }
}

/// Upward recurrence f_{k+1} = (2k+1)/x f_k - f_{k-1}, returning (f_{l-1}, f_l).
fn upward(l: u32, x: f64, f0: f64, f1: f64) -> (f64, f64) {
    if l == 0 {
        return (f64::NAN, f0);
    }
    let (mut prev, mut cur) = (f0, f1);
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

/// Riccati-Bessel `x j_l(x)` and its derivative.
pub fn riccati_j(l: u32, x: f64) -> ValueDeriv {
    if l == 0 {
        return ValueDeriv {
            value: x.sin(),
            deriv: x.cos(),
        };
    }
    if x < l as f64 + 2.0 {
        return riccati_series(l, x, -1.0);
    }
    let (s, c) = x.sin_cos();
    let (prev, cur) = upward(l, x, s, s / x - c);
    ValueDeriv {
        value: cur,
        deriv: prev - l as f64 / x * cur,
    }
}

/// Riccati-Neumann `-x y_l(x)` and its derivative.
pub fn riccati_n(l: u32, x: f64) -> ValueDeriv {
    let (s, c) = x.sin_cos();
    if l == 0 {
        return ValueDeriv {
            value: c,
            deriv: -s,
        };
    }
    let (prev, cur) = upward(l, x, c, c / x + s);
    ValueDeriv {
        value: cur,
        deriv: prev - l as f64 / x * cur,
    }
}

/// Log-derivative `ihat'/ihat` of the exponentially growing modified
/// Riccati-Bessel function `x i_l(x)`.
pub fn riccati_i_logderiv(l: u32, x: f64) -> f64 {
    if x < l as f64 + 2.0 {
        let s = riccati_series(l, x, 1.0);
        return s.deriv / s.value;
    }
    // work with e^{-x}-scaled functions
    let e2 = (-2.0 * x).exp();
    let f0 = 0.5 * (1.0 - e2);
    let f1 = 0.5 * (1.0 + e2) - f0 / x;
    if l == 0 {
        return 0.5 * (1.0 + e2) / f0;
    }
    // f_{k+1} = f_{k-1} - (2k+1)/x f_k
    let (mut prev, mut cur) = (f0, f1);
    for k in 1..l {
        let next = prev - (2 * k + 1) as f64 / x * cur;
        prev = cur;
        cur = next;
    }
    (prev - l as f64 / x * cur) / cur
}

/// Log-derivative `khat'/khat` of the exponentially decaying modified
/// Riccati-Bessel function.
pub fn riccati_k_logderiv(l: u32, x: f64) -> f64 {
    // e^{x}-scaled: k0 = 1, k1 = 1 + 1/x, k_{n+1} = k_{n-1} + (2n+1)/x k_n
    if l == 0 {
        return -1.0;
    }
    let (mut prev, mut cur) = (1.0, 1.0 + 1.0 / x);
    for k in 1..l {
        let next = prev + (2 * k + 1) as f64 / x * cur;
        prev = cur;
        cur = next;
    }
    // d/dx (e^{-x} k) with k' = -k_{l-1} - l/x k_l for the scaled set
    (-prev - l as f64 / x * cur) / cur
}

/// Continuous Riccati phase `theta(x)` with `jhat = M sin(theta)`,
/// `nhat = M cos(theta)` and `theta(0+) = 0`. Monotonically increasing with
/// slope `1/M^2 <= 1`.
pub fn riccati_phase(l: u32, x: f64) -> f64 {
    let principal = |x: f64| {
        let j = riccati_j(l, x).value;
        let n = riccati_n(l, x).value;
        j.atan2(n)
    };
    let lf = l as f64;
    if x > lf * (lf + 1.0) + 4.0 {
        let target = x - lf * PI / 2.0;
        let p = principal(x);
        let turns = ((target - p) / (2.0 * PI)).round();
        return p + 2.0 * PI * turns;
    }
    let steps = (x / 0.25).ceil().max(1.0) as usize;
    let mut theta = 0.0;
    let mut last = 0.0;
    for i in 1..=steps {
        let xi = x * i as f64 / steps as f64;
        let p = principal(xi);
        let mut d = p - last;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        theta += d;
        last = p;
    }
    theta
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_deriv(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Legendre polynomial P_n(x) and its derivative.
pub fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomial P_n(x).
pub fn legendre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}
