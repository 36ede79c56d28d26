//! Wigner 3-j and 6-j symbols for integer angular momenta, evaluated with
//! exact rational arithmetic (Racah formulas), and the Percival-Seaton
//! coefficients for the atom-rigid-rotor problem.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn triangle(a: i64, b: i64, c: i64) -> bool {
    c >= (a - b).abs() && c <= a + b
}

/// Delta(abc)^2 as a rational.
fn triangle_coefficient(a: i64, b: i64, c: i64) -> BigRational {
    BigRational::new(
        factorial(a + b - c) * factorial(a - b + c) * factorial(-a + b + c),
        factorial(a + b + c + 1),
    )
}

/// sign * sqrt(square) * sum, converted to f64 once.
fn finish(square: BigRational, sum: BigRational) -> f64 {
    if sum.is_zero() {
        return 0.0;
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let total = square * &sum * &sum;
    sign * total.to_f64().expect("finite rational").sqrt()
}

/// Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn wigner_3j(j1: u32, j2: u32, j3: u32, m1: i32, m2: i32, m3: i32) -> f64 {
    let (j1, j2, j3) = (j1 as i64, j2 as i64, j3 as i64);
    let (m1, m2, m3) = (m1 as i64, m2 as i64, m3 as i64);
    if m1 + m2 + m3 != 0 || !triangle(j1, j2, j3) || m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3
    {
        return 0.0;
    }
    let square = triangle_coefficient(j1, j2, j3)
        * BigRational::from_integer(
            factorial(j1 + m1)
                * factorial(j1 - m1)
                * factorial(j2 + m2)
                * factorial(j2 - m2)
                * factorial(j3 + m3)
                * factorial(j3 - m3),
        );
    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(j3 - j2 + k + m1)
            * factorial(j3 - j1 + k - m2)
            * factorial(j1 + j2 - j3 - k)
            * factorial(j1 - k - m1)
            * factorial(j2 - k + m2);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if (j1 - j2 - m3).rem_euclid(2) == 1 {
        sum = -sum;
    }
    finish(square, sum)
}

/// Wigner 6-j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn wigner_6j(j1: u32, j2: u32, j3: u32, j4: u32, j5: u32, j6: u32) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = [j1, j2, j3, j4, j5, j6].map(|j| j as i64);
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if triads.iter().any(|&(a, b, c)| !triangle(a, b, c)) {
        return 0.0;
    }
    let square = triads.iter().fold(BigRational::one(), |acc, &(a, b, c)| {
        acc * triangle_coefficient(a, b, c)
    });
    let sums = triads.map(|(a, b, c)| a + b + c);
    let t_min = *sums.iter().max().unwrap();
    let t_max = (j1 + j2 + j4 + j5)
        .min(j2 + j3 + j5 + j6)
        .min(j3 + j1 + j6 + j4);
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let denom = sums
            .iter()
            .fold(BigInt::one(), |acc, &s| acc * factorial(t - s))
            * factorial(j1 + j2 + j4 + j5 - t)
            * factorial(j2 + j3 + j5 + j6 - t)
            * factorial(j3 + j1 + j6 + j4 - t);
        let term = BigRational::new(factorial(t + 1), denom);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    finish(square, sum)
}

/// Percival-Seaton coefficient `<j l J | P_lambda(cos) | j' l' J>` for an
/// atom interacting with a rigid rotor, in the total-`J` coupled basis.
pub fn percival_seaton(j: u32, l: u32, jp: u32, lp: u32, lambda: u32, total_j: u32) -> f64 {
    let three_j = wigner_3j(j, lambda, jp, 0, 0, 0);
    if three_j == 0.0 {
        return 0.0;
    }
    let three_l = wigner_3j(l, lambda, lp, 0, 0, 0);
    if three_l == 0.0 {
        return 0.0;
    }
    let six = wigner_6j(j, l, total_j, lp, jp, lambda);
    let sign = if (j + jp + total_j) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let dims = ((2 * j + 1) * (2 * jp + 1) * (2 * l + 1) * (2 * lp + 1)) as f64;
    sign * dims.sqrt() * three_j * three_l * six
}
