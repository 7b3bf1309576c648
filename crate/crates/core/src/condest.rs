//! 1-norm condition estimates from solves alone (Hager's method with
//! Higham's refinements for complex matrices).

use crate::banded::{banded_lu_factor, BandedMatrix};
use crate::dense::{DenseLU, DenseMatrix};
use crate::error::Result;
use num_complex::Complex64;

const MAX_ITER: usize = 5;

fn norm1(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).sum()
}

/// Estimates `||A^{-1}||_1` for an `n x n` matrix given `x -> A^{-1} x` and
/// `x -> A^{-H} x`. The estimate is a lower bound and usually exact to
/// within a small factor.
pub fn estimate_inverse_norm1<S, T>(n: usize, solve: S, solve_adjoint: T) -> Result<f64>
where
    S: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
    T: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
    let mut est = 0.0f64;
    let mut last_j = usize::MAX;
    for iter in 0..MAX_ITER {
        let y = solve(&x)?;
        let new_est = norm1(&y);
        if iter > 0 && new_est <= est {
            break;
        }
        est = new_est;
        let xi: Vec<Complex64> = y
            .iter()
            .map(|v| {
                let a = v.norm();
                if a == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    v / a
                }
            })
            .collect();
        let z = solve_adjoint(&xi)?;
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
        if zmax <= ztx || j == last_j {
            break;
        }
        last_j = j;
        x = vec![Complex64::new(0.0, 0.0); n];
        x[j] = Complex64::new(1.0, 0.0);
    }
    // Alternating test vector guards against the power iteration stalling.
    if n > 1 {
        let b: Vec<Complex64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(s * (1.0 + i as f64 / (n - 1) as f64), 0.0)
            })
            .collect();
        let alt = 2.0 * norm1(&solve(&b)?) / (3.0 * n as f64);
        est = est.max(alt);
    }
    Ok(est)
}

/// `||A||_1 ||A^{-1}||_1` estimate for a banded matrix.
pub fn condition_banded(a: &BandedMatrix) -> Result<f64> {
    let lu = banded_lu_factor(a)?;
    let inv = estimate_inverse_norm1(a.size(), |x| lu.solve(x), |x| lu.solve_adjoint(x))?;
    Ok(a.norm1() * inv)
}

/// `||A||_1 ||A^{-1}||_1` estimate for a dense matrix.
pub fn condition_dense(a: &DenseMatrix) -> Result<f64> {
    let lu = DenseLU::factor_with_tolerance(a, 0.0)?;
    let inv = estimate_inverse_norm1(a.rows(), |x| lu.solve(x), |x| lu.solve_adjoint(x))?;
    Ok(a.norm1() * inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn exact_inverse_norm1(a: &DenseMatrix) -> f64 {
        let n = a.rows();
        let lu = DenseLU::factor(a).unwrap();
        (0..n)
            .map(|j| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[j] = Complex64::new(1.0, 0.0);
                norm1(&lu.solve(&e).unwrap())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_has_condition_one() {
        assert!((condition_dense(&DenseMatrix::identity(10)).unwrap() - 1.0).abs() < 1e-14);
        assert!((condition_banded(&BandedMatrix::identity(10)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_exact() {
        let mut a = DenseMatrix::identity(5);
        a[(3, 3)] = Complex64::new(1e-4, 0.0);
        a[(1, 1)] = Complex64::new(0.0, 20.0);
        let c = condition_dense(&a).unwrap();
        assert!((c - 20.0 / 1e-4).abs() < 1e-6 * c);
    }

    #[test]
    fn close_to_exact_on_random_matrices() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for n in [4usize, 20, 60] {
            let mut a = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            let exact = a.norm1() * exact_inverse_norm1(&a);
            let est = condition_dense(&a).unwrap();
            assert!(est <= exact * (1.0 + 1e-10), "n={n}");
            assert!(est >= exact / 10.0, "n={n}: {est} vs {exact}");
        }
    }

    #[test]
    fn laplacian_banded() {
        let n = 50;
        let mut a = BandedMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.set(i, i, Complex64::new(2.0, 0.0));
            if i > 0 {
                a.set(i, i - 1, Complex64::new(-1.0, 0.0));
                a.set(i - 1, i, Complex64::new(-1.0, 0.0));
            }
        }
        let dense = DenseMatrix::from_rows(&a.to_dense());
        let exact = dense.norm1() * exact_inverse_norm1(&dense);
        let est = condition_banded(&a).unwrap();
        assert!((est - exact).abs() <= 1e-8 * exact, "{est} vs {exact}");
    }
}
