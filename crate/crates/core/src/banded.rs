//! Banded matrices and partial-pivoting banded LU.

use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square matrix stored by diagonals.
///
/// Entry `(i, j)` with `-lower_bw <= j - i <= upper_bw` lives at
/// `data[(upper_bw + i - j) * size + j]`; everything else is structurally zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    size: usize,
    lower_bw: usize,
    upper_bw: usize,
    data: Vec<Complex64>,
}

impl BandedMatrix {
    pub fn zeros(size: usize, lower_bw: usize, upper_bw: usize) -> Self {
        Self {
            size,
            lower_bw,
            upper_bw,
            data: vec![ZERO; (lower_bw + upper_bw + 1) * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, 0, 0);
        for i in 0..size {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a banded matrix from a dense one, keeping only the given band.
    pub fn from_dense(rows: &[Vec<Complex64>], lower_bw: usize, upper_bw: usize) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n, lower_bw, upper_bw);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if m.in_band(i, j) {
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn lower_bw(&self) -> usize {
        self.lower_bw
    }

    pub fn upper_bw(&self) -> usize {
        self.upper_bw
    }

    /// Total number of stored diagonals.
    pub fn bandwidth(&self) -> usize {
        self.lower_bw + self.upper_bw + 1
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.size && j < self.size && j + self.lower_bw >= i && i + self.upper_bw >= j
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (self.upper_bw + i - j) * self.size + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            ZERO
        }
    }

    /// Sets an entry inside the band. Panics outside it.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(
            self.in_band(i, j),
            "({i}, {j}) outside band ({}, {})",
            self.lower_bw,
            self.upper_bw
        );
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: Complex64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    /// Row range of the band in column `j`.
    pub fn col_rows(&self, j: usize) -> std::ops::Range<usize> {
        j.saturating_sub(self.upper_bw)..(j + self.lower_bw + 1).min(self.size)
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.size);
        let mut y = vec![ZERO; self.size];
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for i in self.col_rows(j) {
                y[i] += self.data[self.idx(i, j)] * xj;
            }
        }
        y
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.size)
            .map(|j| self.col_rows(j).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|i - j|` over structurally stored entries that are nonzero,
    /// as `(lower, upper)`.
    pub fn effective_bandwidths(&self) -> (usize, usize) {
        let (mut lo, mut up) = (0, 0);
        for j in 0..self.size {
            for i in self.col_rows(j) {
                if self.get(i, j) != ZERO {
                    if i > j {
                        lo = lo.max(i - j);
                    } else {
                        up = up.max(j - i);
                    }
                }
            }
        }
        (lo, up)
    }

    /// Principal submatrix on indices `start..start + len`.
    pub fn submatrix(&self, start: usize, len: usize) -> BandedMatrix {
        let mut out = BandedMatrix::zeros(len, self.lower_bw, self.upper_bw);
        for j in 0..len {
            for i in out.col_rows(j) {
                out.set(i, j, self.get(start + i, start + j));
            }
        }
        out
    }
}

/// Partial-pivoting LU factors of a banded matrix.
///
/// `P A = L U` where `U` has upper bandwidth `upper_bw + lower_bw` to hold
/// the fill generated by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedLU {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl BandedLU {
    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.ab[j * self.ldab + self.kl + self.ku + i - j]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Row interchanged with row `j` at elimination step `j`.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Dense `L` and `U` with `P A = L U`, where `P` applies [`Self::pivots`]
    /// in order. Intended for tests on small matrices.
    pub fn unpack_dense(&self) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
        let n = self.n;
        let kv = self.kl + self.ku;
        let mut u = vec![vec![ZERO; n]; n];
        for j in 0..n {
            for i in j.saturating_sub(kv)..=j {
                u[i][j] = self.at(i, j);
            }
        }
        // Interchanges at step k were only applied to columns >= k while
        // factoring, so replay them on the earlier multiplier columns.
        let mut l = vec![vec![ZERO; n]; n];
        for j in 0..n {
            l[j][j] = Complex64::new(1.0, 0.0);
            for i in j + 1..(j + self.kl + 1).min(n) {
                l[i][j] = self.at(i, j);
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                let p = self.pivots[k];
                if p != k {
                    let (a, b) = (l[k][j], l[p][j]);
                    l[k][j] = b;
                    l[p][j] = a;
                }
            }
        }
        (l, u)
    }

    /// Applies the row permutation `P` to `b`.
    pub fn permute(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        for (j, &p) in self.pivots.iter().enumerate() {
            x.swap(j, p);
        }
        x
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) -> Result<()> {
        let n = self.n;
        if x.len() != n {
            return invalid(format!("rhs length {} does not match size {n}", x.len()));
        }
        let kv = self.kl + self.ku;
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                x.swap(p, j);
            }
            let xj = x[j];
            if xj != ZERO {
                let lm = self.kl.min(n - 1 - j);
                let base = j * self.ldab + kv;
                for i in 1..=lm {
                    x[j + i] -= self.ab[base + i] * xj;
                }
            }
        }
        for j in (0..n).rev() {
            let base = j * self.ldab + kv;
            x[j] /= self.ab[base];
            let xj = x[j];
            if xj != ZERO {
                let top = j.saturating_sub(kv);
                for i in top..j {
                    x[i] -= self.ab[base + i - j] * xj;
                }
            }
        }
        Ok(())
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if b.len() != n {
            return invalid(format!("rhs length {} does not match size {n}", b.len()));
        }
        let kv = self.kl + self.ku;
        let mut x = b.to_vec();
        for j in 0..n {
            let base = j * self.ldab + kv;
            let top = j.saturating_sub(kv);
            let mut acc = x[j];
            for i in top..j {
                acc -= self.ab[base + i - j].conj() * x[i];
            }
            x[j] = acc / self.ab[base].conj();
        }
        for j in (0..n.saturating_sub(1)).rev() {
            let lm = self.kl.min(n - 1 - j);
            let base = j * self.ldab + kv;
            let mut acc = x[j];
            for i in 1..=lm {
                acc -= self.ab[base + i].conj() * x[j + i];
            }
            x[j] = acc;
            let p = self.pivots[j];
            if p != j {
                x.swap(p, j);
            }
        }
        Ok(x)
    }
}

/// Relative pivot tolerance used to declare a banded matrix singular.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Gaussian elimination with partial pivoting inside the band.
pub fn banded_lu_factor(a: &BandedMatrix) -> Result<BandedLU> {
    let n = a.size;
    let (kl, ku) = (a.lower_bw, a.upper_bw);
    let kv = kl + ku;
    let ldab = 2 * kl + ku + 1;
    let mut ab = vec![ZERO; ldab * n];
    for j in 0..n {
        for i in a.col_rows(j) {
            ab[j * ldab + kv + i - j] = a.get(i, j);
        }
    }
    let tol = SINGULAR_TOL * a.max_norm();
    let mut pivots = vec![0; n];
    // Last column touched by U so far.
    let mut ju = 0usize;
    for j in 0..n {
        let km = kl.min(n - 1 - j);
        let cbase = j * ldab + kv;
        let mut jp = 0;
        let mut best = -1.0;
        for i in 0..=km {
            let v = ab[cbase + i].norm();
            if v > best {
                best = v;
                jp = i;
            }
        }
        pivots[j] = j + jp;
        if !(best > tol) {
            return Err(Error::SingularMatrix {
                index: j,
                magnitude: best.max(0.0),
            });
        }
        ju = ju.max((j + ku + jp).min(n - 1));
        if jp != 0 {
            for c in j..=ju {
                let r0 = c * ldab + kv + j - c;
                let r1 = r0 + jp;
                ab.swap(r0, r1);
            }
        }
        let piv = ab[cbase];
        for i in 1..=km {
            ab[cbase + i] /= piv;
        }
        for c in j + 1..=ju {
            let r0 = c * ldab + kv + j - c;
            let t = ab[r0];
            if t != ZERO {
                for i in 1..=km {
                    let l = ab[cbase + i];
                    ab[r0 + i] -= l * t;
                }
            }
        }
    }
    Ok(BandedLU {
        n,
        kl,
        ku,
        ldab,
        ab,
        pivots,
    })
}

pub fn banded_solve(lu: &BandedLU, b: &[Complex64]) -> Result<Vec<Complex64>> {
    lu.solve(b)
}
