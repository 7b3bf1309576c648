//! Banded representations of polynomial-coefficient differential operators in
//! the Chebyshev basis, and their folding onto a Clenshaw-Curtis grid.
//!
//! Column `n` of an operator matrix holds the Chebyshev coefficients of the
//! operator applied to `T_n`. The two elementary operators are
//!
//! * `x T_n = (T_{n-1} + T_{n+1}) / 2`, with `x T_0 = T_1`,
//! * `(1 - x^2) T_n' = n (T_{n-1} - T_{n+1}) / 2`,
//!
//! both tridiagonal. Everything else is composed from them.

use crate::banded::BandedMatrix;
use crate::cheb::alias_index;
use crate::error::{invalid, Error, Result};
use crate::poly::Polynomial;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_rows(n_rows: usize) -> Result<()> {
    if n_rows < 2 {
        return invalid(format!("operator needs at least 2 rows, got {n_rows}"));
    }
    Ok(())
}

/// Multiplication by `x`.
pub fn op_mult_x(n_rows: usize) -> Result<BandedMatrix> {
    check_rows(n_rows)?;
    let mut m = BandedMatrix::zeros(n_rows, 1, 1);
    m.set(1, 0, Complex64::new(1.0, 0.0));
    for n in 1..n_rows {
        m.set(n - 1, n, Complex64::new(0.5, 0.0));
        if n + 1 < n_rows {
            m.set(n + 1, n, Complex64::new(0.5, 0.0));
        }
    }
    Ok(m)
}

/// `(1 - x^2) d/dx`.
pub fn op_weighted_diff(n_rows: usize) -> Result<BandedMatrix> {
    check_rows(n_rows)?;
    let mut m = BandedMatrix::zeros(n_rows, 1, 1);
    for n in 1..n_rows {
        let h = Complex64::new(n as f64 / 2.0, 0.0);
        m.set(n - 1, n, h);
        if n + 1 < n_rows {
            m.set(n + 1, n, -h);
        }
    }
    Ok(m)
}

/// `x v` where `v[k]` is the coefficient of `T_{off + k}`; same layout out.
fn mult_x_window(off: usize, v: &[Complex64]) -> (usize, Vec<Complex64>) {
    let lo = off.saturating_sub(1);
    let mut out = vec![ZERO; off + v.len() + 1 - lo];
    for (i, &c) in v.iter().enumerate() {
        let k = off + i;
        if k == 0 {
            out[1 - lo] += c;
        } else {
            out[k - 1 - lo] += c * 0.5;
            out[k + 1 - lo] += c * 0.5;
        }
    }
    (lo, out)
}

/// `p(x) v` in the windowed layout of [`mult_x_window`].
fn mult_poly_window(p: &Polynomial, off: usize, v: &[Complex64]) -> (usize, Vec<Complex64>) {
    let pc = p.coeffs();
    let mut lo = off;
    let mut acc: Vec<Complex64> = v.iter().map(|&c| c * pc[pc.len() - 1]).collect();
    for &a in pc.iter().rev().skip(1) {
        let (l, next) = mult_x_window(lo, &acc);
        lo = l;
        acc = next;
        for (i, &c) in v.iter().enumerate() {
            acc[off + i - lo] += c * a;
        }
    }
    (lo, acc)
}

/// A differential operator `p_diff(x) d/dx + p_mult(x)` in the Chebyshev
/// basis, with `p_diff` divisible by `1 - x^2`.
#[derive(Debug, Clone)]
pub struct ChebOperator {
    diff_factor: Polynomial,
    mult: Polynomial,
    half_bw: usize,
}

impl ChebOperator {
    pub fn new(p_diff: &Polynomial, p_mult: &Polynomial) -> Result<Self> {
        let (diff_factor, rem) = p_diff.div_rem(&Polynomial::one_minus_x2());
        let scale = p_diff.max_abs_coeff().max(1.0);
        if rem.max_abs_coeff() > 1e-14 * scale {
            return invalid("derivative coefficient must be divisible by (1 - x^2)");
        }
        let diff_bw = if diff_factor.is_zero() {
            0
        } else {
            diff_factor.degree() + 1
        };
        let half_bw = diff_bw.max(p_mult.degree());
        Ok(Self {
            diff_factor,
            mult: p_mult.clone(),
            half_bw,
        })
    }

    /// Number of sub- (and super-) diagonals.
    pub fn half_bandwidth(&self) -> usize {
        self.half_bw
    }

    /// Coefficients of the operator applied to `T_n`, as `(lo, vals)` with
    /// `vals[k]` the coefficient of `T_{lo + k}`. Costs `O(deg^2)`, not `O(n)`.
    pub fn column_window(&self, n: usize) -> (usize, Vec<Complex64>) {
        let one = [Complex64::new(1.0, 0.0)];
        let (lo_m, mut out) = mult_poly_window(&self.mult, n, &one);
        let mut lo = lo_m;
        if !self.diff_factor.is_zero() && n > 0 {
            let h = Complex64::new(n as f64 / 2.0, 0.0);
            let (lo_d, dd) = mult_poly_window(&self.diff_factor, n - 1, &[h, ZERO, -h]);
            let new_lo = lo.min(lo_d);
            let hi = (lo + out.len()).max(lo_d + dd.len());
            let mut merged = vec![ZERO; hi - new_lo];
            for (k, v) in out.into_iter().enumerate() {
                merged[lo + k - new_lo] += v;
            }
            for (k, v) in dd.into_iter().enumerate() {
                merged[lo_d + k - new_lo] += v;
            }
            out = merged;
            lo = new_lo;
        }
        (lo, out)
    }

    /// Chebyshev coefficients of the operator applied to `T_n`, indexed from 0.
    pub fn column(&self, n: usize) -> Vec<Complex64> {
        let (lo, vals) = self.column_window(n);
        let mut out = vec![ZERO; lo + vals.len()];
        out[lo..].copy_from_slice(&vals);
        out
    }

    /// Coefficients of the operator applied to the series `coeffs`.
    pub fn apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; coeffs.len() + self.half_bw + 1];
        for (n, &c) in coeffs.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let (lo, vals) = self.column_window(n);
            for (k, v) in vals.into_iter().enumerate() {
                out[lo + k] += v * c;
            }
        }
        out
    }

    pub fn matrix(&self, n_rows: usize) -> Result<BandedMatrix> {
        check_rows(n_rows)?;
        if self.half_bw >= n_rows {
            return invalid(format!(
                "operator half-bandwidth {} does not fit in {n_rows} rows",
                self.half_bw
            ));
        }
        let mut b = BandedMatrix::zeros(n_rows, self.half_bw, self.half_bw);
        for n in 0..n_rows {
            let (lo, vals) = self.column_window(n);
            for (k, v) in vals.into_iter().enumerate() {
                if lo + k < n_rows && v != ZERO {
                    b.set(lo + k, n, v);
                }
            }
        }
        Ok(b)
    }
}

/// Matrix of `p_diff(x) d/dx + p_mult(x)` acting on `{T_n}`, truncated to
/// `n_rows`. Columns are exact as long as they lie in the band.
pub fn build_banded_operator(
    p_diff: &Polynomial,
    p_mult: &Polynomial,
    n_rows: usize,
) -> Result<BandedMatrix> {
    ChebOperator::new(p_diff, p_mult)?.matrix(n_rows)
}

/// Folds a banded operator matrix onto the `nu + 2` coefficients that are
/// distinguishable on the Clenshaw-Curtis grid, using
/// `T_{nu+1+l}(c_m) = T_{nu+1-l}(c_m)`.
///
/// `b` must hold complete columns `0..=nu+1`, i.e. have at least
/// `nu + 2 + lower_bw` rows. The band is not widened by folding.
pub fn fold_operator(b: &BandedMatrix, nu: usize) -> Result<BandedMatrix> {
    let h = b.lower_bw();
    if nu < h {
        return Err(Error::UnsupportedRegime(format!(
            "nu = {nu} is below the operator half-bandwidth {h}"
        )));
    }
    if b.size() < nu + 2 + h {
        return invalid(format!(
            "operator has {} rows, folding needs {}",
            b.size(),
            nu + 2 + h
        ));
    }
    let n = nu + 2;
    let mut out = BandedMatrix::zeros(n, h, b.upper_bw().max(h));
    for col in 0..n {
        for k in b.col_rows(col) {
            let v = b.get(k, col);
            if v != ZERO {
                out.add_to(alias_index(k, nu), col, v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::{clenshaw_curtis_points, ChebCoeffVector};
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// T_n and T_n' at x from the trigonometric definitions.
    fn cheb_t(n: usize, x: f64) -> (f64, f64) {
        let th = x.acos();
        let t = (n as f64 * th).cos();
        let dt = n as f64 * (n as f64 * th).sin() / th.sin();
        (t, dt)
    }

    fn eval_coeffs(v: &[Complex64], x: f64) -> Complex64 {
        ChebCoeffVector::new(v.to_vec()).eval(x).unwrap()
    }

    #[test]
    fn mult_x_printed_entries() {
        let m = op_mult_x(8).unwrap();
        assert_eq!(m.get(0, 1), c(0.5));
        assert_eq!(m.get(1, 0), c(1.0));
        assert_eq!(m.get(1, 2), c(0.5));
        assert_eq!(m.get(0, 0), c(0.0));
        for row in 0..8 {
            let e = if row == 4 || row == 6 { 0.5 } else { 0.0 };
            assert_eq!(m.get(row, 5), c(e));
        }
    }

    #[test]
    fn weighted_diff_printed_entries() {
        let d = op_weighted_diff(8).unwrap();
        assert_eq!(d.get(0, 1), c(0.5));
        assert_eq!(d.get(1, 2), c(1.0));
        assert_eq!(d.get(2, 1), c(-0.5));
        assert_eq!(d.get(2, 3), c(1.5));
        assert!((0..8).all(|r| d.get(r, 0) == c(0.0)));
    }

    #[test]
    fn weighted_diff_column_pointwise() {
        let d = op_weighted_diff(16).unwrap();
        let col: Vec<_> = (0..16).map(|r| d.get(r, 10)).collect();
        let x = 0.3;
        let (_, dt) = cheb_t(10, x);
        assert!((eval_coeffs(&col, x).re - (1.0 - x * x) * dt).abs() < 1e-12);
    }

    #[test]
    fn sizes_validated() {
        assert!(op_mult_x(1).is_err());
        assert!(op_weighted_diff(0).is_err());
        let big = Polynomial::from_real(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(build_banded_operator(&Polynomial::zero(), &big, 4).is_err());
        assert!(
            build_banded_operator(&Polynomial::from_real(&[0.0, 1.0]), &Polynomial::one(), 8)
                .is_err()
        );
    }

    #[test]
    fn identity_operator() {
        let b = build_banded_operator(&Polynomial::zero(), &Polynomial::one(), 10).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(b.get(i, j), c(if i == j { 1.0 } else { 0.0 }));
            }
        }
    }

    #[test]
    fn printed_scalar_operator_g_eq_x() {
        // The published leading block for g(x) = x is the matrix of
        // (x^2 - 1)(d/dx + i w), i.e. the negative of (1 - x^2) L.
        let omega = 100.0;
        let iw = Complex64::new(0.0, omega);
        let p_mult = Polynomial::one_minus_x2().scale(iw);
        let b = build_banded_operator(&Polynomial::one_minus_x2(), &p_mult, 12).unwrap();
        let printed = [
            [Complex64::new(0.0, -omega / 2.0), c(-0.5), Complex64::new(0.0, omega / 4.0), c(0.0)],
            [c(0.0), Complex64::new(0.0, -omega / 4.0), c(-1.0), Complex64::new(0.0, omega / 4.0)],
            [Complex64::new(0.0, omega / 2.0), c(0.5), Complex64::new(0.0, -omega / 2.0), c(-1.5)],
            [c(0.0), Complex64::new(0.0, omega / 4.0), c(1.0), Complex64::new(0.0, -omega / 2.0)],
        ];
        for (i, row) in printed.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!((-b.get(i, j) - v).norm() < 1e-13, "({i}, {j})");
            }
        }
        // d = deg g = 1 gives bandwidth 2d + 3 = 5.
        let (lo, up) = b.effective_bandwidths();
        assert!(lo + up + 1 <= 5);
    }

    #[test]
    fn random_operator_columns_pointwise() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let p_mult = Polynomial::new(
            (0..4)
                .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect(),
        );
        let p_diff = Polynomial::one_minus_x2();
        let b = build_banded_operator(&p_diff, &p_mult, 80).unwrap();
        for n in 0..=60 {
            let col: Vec<_> = (0..80).map(|r| b.get(r, n)).collect();
            for _ in 0..20 {
                let x: f64 = rng.gen_range(-0.999..0.999);
                let (t, dt) = cheb_t(n, x);
                let direct = p_diff.eval(x) * dt + p_mult.eval(x) * t;
                assert!((eval_coeffs(&col, x) - direct).norm() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn scalar_bandwidth_bound() {
        for d in 1..=5usize {
            // g of degree d: p_mult = i w (1 - x^2) g'(x)
            let g = Polynomial::from_real(&vec![1.0; d + 1]);
            let p_mult = &Polynomial::one_minus_x2() * &g.derivative().scale(Complex64::new(0.0, 10.0));
            let b = build_banded_operator(&Polynomial::one_minus_x2(), &p_mult, 40).unwrap();
            let (lo, up) = b.effective_bandwidths();
            assert!(lo + up + 1 <= 2 * d + 3, "d={d}");
        }
    }

    #[test]
    fn fold_without_alias_is_truncation() {
        // Identity-like operator with half-bandwidth 1 and nonzeros only in
        // low columns.
        let nu = 8;
        let mut b = BandedMatrix::zeros(nu + 4, 1, 1);
        for j in 0..nu - 2 {
            b.set(j, j, c(2.0));
            b.set(j + 1, j, c(1.0));
        }
        let f = fold_operator(&b, nu).unwrap();
        for i in 0..nu + 2 {
            for j in 0..nu + 2 {
                assert_eq!(f.get(i, j), b.get(i, j));
            }
        }
    }

    #[test]
    fn fold_matches_direct_collocation() {
        let nu = 8;
        let omega = 100.0;
        let iw = Complex64::new(0.0, omega);
        let p_mult = Polynomial::one_minus_x2().scale(iw);
        let b = build_banded_operator(&Polynomial::one_minus_x2(), &p_mult, nu + 6).unwrap();
        let bt = fold_operator(&b, nu).unwrap();
        let grid = clenshaw_curtis_points(nu).unwrap();
        for n in 0..nu + 2 {
            for m in 0..nu + 2 {
                let x = grid.point(m);
                let folded: Complex64 = (0..nu + 2).map(|k| bt.get(k, n) * grid.cheb_value(k, m)).sum();
                // (1 - x^2) (T_n' + i w T_n)
                let (t, dt) = if m == 0 || m == nu + 1 {
                    (grid.cheb_value(n, m), grid.cheb_derivative(n, m))
                } else {
                    cheb_t(n, x)
                };
                let direct = (dt + iw * t) * (1.0 - x * x);
                assert!((folded - direct).norm() < 1e-11 * omega, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn fold_rejects_small_nu() {
        let b = BandedMatrix::zeros(20, 5, 5);
        assert!(matches!(fold_operator(&b, 4), Err(Error::UnsupportedRegime(_))));
    }
}
