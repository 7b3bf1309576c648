//! Interleaving an `M x M` array of banded blocks into one banded matrix.
//!
//! Entry `l` of block `k` (both 0-based) moves to position `M l + k`, so
//! neighbouring coefficients of all components end up next to each other.

use crate::banded::BandedMatrix;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPermutation {
    m: usize,
    nu: usize,
    /// `forward[i]` is the block-stacked index of reordered position `i`.
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl BlockPermutation {
    pub fn blocks(&self) -> usize {
        self.m
    }

    pub fn block_size(&self) -> usize {
        self.nu
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// `p(n)` with 1-based indices: `p(M l + k) = (k - 1) nu + l + 1`.
    pub fn p(&self, n: usize) -> usize {
        self.forward[n - 1] + 1
    }

    /// 0-based map from reordered position to block-stacked index.
    pub fn map(&self, i: usize) -> usize {
        self.forward[i]
    }

    pub fn inverse_map(&self, j: usize) -> usize {
        self.inverse[j]
    }

    /// `y[i] = x[p(i)]`.
    pub fn apply<T: Copy>(&self, x: &[T]) -> Vec<T> {
        self.forward.iter().map(|&j| x[j]).collect()
    }

    /// Undoes [`apply`](Self::apply).
    pub fn unapply<T: Copy>(&self, y: &[T]) -> Vec<T> {
        self.inverse.iter().map(|&i| y[i]).collect()
    }
}

pub fn hockney_permutation(m: usize, nu: usize) -> Result<BlockPermutation> {
    if m == 0 || nu == 0 {
        return invalid(format!("need M >= 1 and nu >= 1, got M = {m}, nu = {nu}"));
    }
    let n = m * nu;
    let forward: Vec<usize> = (0..n).map(|i| (i % m) * nu + i / m).collect();
    let mut inverse = vec![0; n];
    for (i, &j) in forward.iter().enumerate() {
        inverse[j] = i;
    }
    Ok(BlockPermutation {
        m,
        nu,
        forward,
        inverse,
    })
}

/// Builds `D_{ij} = B_{p(i), p(j)}` where `B` is the block matrix with
/// `blocks[k1][k2]` in block position `(k1, k2)`.
///
/// If every block has half-bandwidth at most `h`, `D` has half-bandwidth at
/// most `M (h + 1) - 1`.
pub fn reorder_block_banded(
    blocks: &[Vec<BandedMatrix>],
    perm: &BlockPermutation,
) -> Result<BandedMatrix> {
    let m = perm.blocks();
    let nu = perm.block_size();
    if blocks.len() != m || blocks.iter().any(|row| row.len() != m) {
        return invalid(format!("expected a {m} x {m} array of blocks"));
    }
    let mut h = 0;
    for b in blocks.iter().flatten() {
        if b.size() != nu {
            return invalid(format!("block of size {} in a permutation for nu = {nu}", b.size()));
        }
        h = h.max(b.lower_bw()).max(b.upper_bw());
    }
    let bw = m * (h + 1) - 1;
    let mut d = BandedMatrix::zeros(m * nu, bw, bw);
    for (k1, row) in blocks.iter().enumerate() {
        for (k2, b) in row.iter().enumerate() {
            for col in 0..nu {
                let j = perm.inverse_map(k2 * nu + col);
                for r in b.col_rows(col) {
                    let v = b.get(r, col);
                    if v.re != 0.0 || v.im != 0.0 {
                        d.set(perm.inverse_map(k1 * nu + r), j, v);
                    }
                }
            }
        }
    }
    Ok(d)
}
