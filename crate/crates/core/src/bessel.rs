//! Integer-order Bessel functions of the first kind.
//!
//! Moderate arguments use Miller's downward recurrence normalised by
//! `J_0 + 2 sum_k J_{2k} = 1`; large arguments use Hankel's asymptotic
//! expansion.

use crate::error::{Error, Result};
use std::f64::consts::PI;

fn asymptotic_threshold(gamma: u32) -> f64 {
    50.0 * (gamma as f64 + 1.0)
}

/// `J_n(x)` for `n = 0..=max_order` by downward recurrence.
fn miller(max_order: usize, x: f64) -> Vec<f64> {
    let top = (max_order as f64).max(x);
    let mut start = (top + 30.0 + 10.0 * top.sqrt()) as usize + 2;
    start += start % 2;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            sum *= 1e-250;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            sum += 2.0 * vals[k - 1];
        }
    }
    sum += vals[0];
    vals.truncate(max_order + 1);
    for v in &mut vals {
        *v /= sum;
    }
    vals
}

/// Hankel's expansion of `J_n(x)` for `x` large compared to `n^2`.
fn hankel(n: i64, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        let mag = term.abs();
        if mag > prev {
            break;
        }
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if mag < 1e-17 * (p.abs() + q.abs()) {
            break;
        }
        prev = mag;
        let odd = (2 * k + 1) as f64;
        term *= (mu - odd * odd) / ((k + 1) as f64 * 8.0 * x);
    }
    let chi = x - (n as f64 / 2.0 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn hankel_signed(n: i64, x: f64) -> f64 {
    // J_{-n} = (-1)^n J_n
    if n < 0 {
        let v = hankel(-n, x);
        if n % 2 == 0 {
            v
        } else {
            -v
        }
    } else {
        hankel(n, x)
    }
}

/// `(J_gamma(x), J_gamma'(x))` for integer `gamma >= 0` and `x > 0`.
pub fn bessel_eval(gamma: u32, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive, got {x}")));
    }
    let g = gamma as i64;
    if x > asymptotic_threshold(gamma) {
        let j = hankel(g, x);
        let dj = 0.5 * (hankel_signed(g - 1, x) - hankel_signed(g + 1, x));
        return Ok((j, dj));
    }
    let vals = miller(gamma as usize + 1, x);
    let j = vals[gamma as usize];
    let dj = if gamma == 0 {
        -vals[1]
    } else {
        0.5 * (vals[gamma as usize - 1] - vals[gamma as usize + 1])
    };
    Ok((j, dj))
}

/// `J_gamma(x)` for any real `x`, using `J_n(-x) = (-1)^n J_n(x)`.
pub fn bessel_j(gamma: u32, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(if gamma == 0 { 1.0 } else { 0.0 });
    }
    let (j, _) = bessel_eval(gamma, x.abs())?;
    Ok(if x < 0.0 && gamma % 2 == 1 { -j } else { j })
}

/// `J_gamma'(x)` for any real `x`; the derivative has the opposite parity.
pub fn bessel_j_prime(gamma: u32, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(match gamma {
            1 => 0.5,
            _ => 0.0,
        });
    }
    let (_, dj) = bessel_eval(gamma, x.abs())?;
    Ok(if x < 0.0 && gamma % 2 == 0 { -dj } else { dj })
}
