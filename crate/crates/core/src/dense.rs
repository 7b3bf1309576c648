//! Dense complex matrices and LU with partial pivoting.
//!
//! Used for the small bordering systems and for the dense reference solver,
//! so the factorization is blocked to stay usable at a few thousand unknowns.

use crate::banded::SINGULAR_TOL;
use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const BLOCK: usize = 48;
const COL_CHUNK: usize = 256;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.row_mut(i).copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v.norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factors `P A = L U` of a square dense matrix.
#[derive(Debug, Clone)]
pub struct DenseLU {
    lu: DenseMatrix,
    pivots: Vec<usize>,
}

#[inline]
fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= a * xi;
    }
}

impl DenseLU {
    /// Factors with pivots below `1e-14 * max |a_ij|` treated as singular.
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        Self::factor_with_tolerance(a, SINGULAR_TOL)
    }

    /// Factors with a relative pivot tolerance. With `rel_tol = 0` only exact
    /// zero (or non-finite) pivots are rejected, which suits systems that are
    /// known to be ill-conditioned in a harmless direction.
    pub fn factor_with_tolerance(a: &DenseMatrix, rel_tol: f64) -> Result<Self> {
        if a.rows != a.cols {
            return invalid(format!("matrix is {}x{}, not square", a.rows, a.cols));
        }
        let n = a.rows;
        let tol = rel_tol * a.max_norm();
        let mut m = a.clone();
        let mut pivots = vec![0; n];
        let c = n;
        let mut k0 = 0;
        while k0 < n {
            let k1 = (k0 + BLOCK).min(n);
            // Unblocked factorization of the panel, full-row interchanges.
            for j in k0..k1 {
                let (mut p, mut best) = (j, -1.0);
                for i in j..n {
                    let v = m.data[i * c + j].norm();
                    if v > best {
                        best = v;
                        p = i;
                    }
                }
                if !(best > tol) {
                    return Err(Error::SingularMatrix {
                        index: j,
                        magnitude: best.max(0.0),
                    });
                }
                pivots[j] = p;
                if p != j {
                    let (lo, hi) = m.data.split_at_mut(p * c);
                    lo[j * c..(j + 1) * c].swap_with_slice(&mut hi[..c]);
                }
                let piv = m.data[j * c + j];
                let (top, rest) = m.data.split_at_mut((j + 1) * c);
                let prow = &top[j * c + j + 1..j * c + k1];
                for i in j + 1..n {
                    let row = &mut rest[(i - j - 1) * c..(i - j) * c];
                    let l = row[j] / piv;
                    row[j] = l;
                    if l != ZERO {
                        axpy(&mut row[j + 1..k1], l, prow);
                    }
                }
            }
            if k1 < n {
                // U12 = L11^{-1} A12.
                for r in k0 + 1..k1 {
                    let (top, rest) = m.data.split_at_mut(r * c);
                    let row = &mut rest[..c];
                    for p in k0..r {
                        let l = row[p];
                        if l != ZERO {
                            axpy(&mut row[k1..], l, &top[p * c + k1..p * c + c]);
                        }
                    }
                }
                // A22 -= L21 U12, chunked over columns to keep U12 in cache.
                let (top, rest) = m.data.split_at_mut(k1 * c);
                let mut jc = k1;
                while jc < n {
                    let je = (jc + COL_CHUNK).min(n);
                    for i in k1..n {
                        let row = &mut rest[(i - k1) * c..(i - k1 + 1) * c];
                        let (lpart, upart) = row.split_at_mut(k1);
                        let target = &mut upart[jc - k1..je - k1];
                        for p in k0..k1 {
                            let l = lpart[p];
                            if l != ZERO {
                                axpy(target, l, &top[p * c + jc..p * c + je]);
                            }
                        }
                    }
                    jc = je;
                }
            }
            k0 = k1;
        }
        Ok(Self { lu: m, pivots })
    }

    pub fn size(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.size();
        if b.len() != n {
            return invalid(format!("rhs length {} does not match size {n}", b.len()));
        }
        let mut x = b.to_vec();
        for (j, &p) in self.pivots.iter().enumerate() {
            x.swap(j, p);
        }
        for i in 0..n {
            let row = self.lu.row(i);
            let s: Complex64 = row[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: Complex64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.size();
        if b.len() != n {
            return invalid(format!("rhs length {} does not match size {n}", b.len()));
        }
        let mut x = b.to_vec();
        // U^H y = b (forward), column-oriented over rows of U.
        for i in 0..n {
            let row = self.lu.row(i);
            x[i] /= row[i].conj();
            let xi = x[i];
            for (xj, u) in x[i + 1..].iter_mut().zip(&row[i + 1..]) {
                *xj -= u.conj() * xi;
            }
        }
        // L^H z = y (backward).
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let xi = x[i];
            for (xj, l) in x[..i].iter_mut().zip(&row[..i]) {
                *xj -= l.conj() * xi;
            }
        }
        for (j, &p) in self.pivots.iter().enumerate().rev() {
            x.swap(j, p);
        }
        Ok(x)
    }
}

/// Solves `A x = b` by dense LU with partial pivoting.
pub fn dense_solve(a: &DenseMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    DenseLU::factor(a)?.solve(b)
}
