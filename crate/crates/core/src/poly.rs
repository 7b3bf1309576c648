//! Dense polynomials in the monomial basis with complex coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial `sum_j coeffs[j] x^j`.
///
/// Trailing zero coefficients are trimmed on construction, so `degree()` is
/// the index of the last nonzero coefficient (the zero polynomial has degree 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl From<Vec<Complex64>> for Polynomial {
    fn from(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs)
    }
}

impl From<Polynomial> for Vec<Complex64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `1 - x^2`, the factor that makes the Levin operator banded.
    pub fn one_minus_x2() -> Self {
        Self::from_real(&[1.0, 0.0, -1.0])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        )
    }

    /// Value of the `k`-th derivative at `x`.
    pub fn eval_derivative(&self, k: usize, x: f64) -> Complex64 {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.derivative();
        }
        p.eval(x)
    }

    /// Taylor coefficients `p^(k)(x0) / k!` for `k = 0..=degree`.
    pub fn taylor_at(&self, x0: f64) -> Vec<Complex64> {
        // Repeated synthetic division by (x - x0).
        let mut work = self.coeffs.clone();
        let n = work.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let carry = work[j + 1] * x0;
                work[j] += carry;
            }
            out.push(work[k]);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Quotient and remainder of division by `divisor`.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        if self.degree() < dd {
            return (Self::zero(), self.clone());
        }
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Complex64::new(0.0, 0.0); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * c;
            }
        }
        rem.truncate(dd.max(1));
        (Self::new(quot), Self::new(rem))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Polynomial::new(
            (0..n)
                .map(|j| {
                    self.coeffs.get(j).copied().unwrap_or(zero)
                        + rhs.coeffs.get(j).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(Polynomial::from_real(&[]).degree(), 0);
        assert!(Polynomial::from_real(&[0.0, 0.0]).is_zero());
    }

    #[test]
    fn horner_matches_naive_sum() {
        let p = Polynomial::from_real(&[3.0, -1.0, 0.5, 2.0]);
        let x: f64 = 0.7;
        let naive = 3.0 - x + 0.5 * x * x + 2.0 * x.powi(3);
        assert!((p.eval(x).re - naive).abs() < 1e-15);
    }

    #[test]
    fn derivative_and_taylor() {
        // (x+2)^2 = x^2 + 4x + 4
        let p = Polynomial::from_real(&[4.0, 4.0, 1.0]);
        assert_eq!(p.derivative(), Polynomial::from_real(&[4.0, 2.0]));
        let t = p.taylor_at(1.0);
        assert_eq!(t, vec![c(9.0), c(6.0), c(1.0)]);
        assert_eq!(p.eval_derivative(2, -0.3), c(2.0));
    }

    #[test]
    fn division_by_one_minus_x2() {
        let q = Polynomial::from_real(&[2.0, -1.0, 3.0]);
        let p = &q * &Polynomial::one_minus_x2();
        let (quot, rem) = p.div_rem(&Polynomial::one_minus_x2());
        assert!(rem.is_zero());
        for (a, b) in quot.coeffs().iter().zip(q.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
        let (_, rem) = Polynomial::from_real(&[1.0, 1.0]).div_rem(&Polynomial::one_minus_x2());
        assert_eq!(rem, Polynomial::from_real(&[1.0, 1.0]));
    }
}
