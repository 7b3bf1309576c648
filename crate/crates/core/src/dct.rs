//! Type-I discrete cosine transform with the endpoint-halving convention
//!
//! `y_m = sum''_{n=0}^{N} cos(m n pi / N) x_n`, where the `n = 0` and `n = N`
//! terms are halved and `N = len - 1`. Applying the transform twice gives
//! `N / 2` times the identity.

use crate::error::{invalid, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dct1Algorithm {
    /// Even extension to length `2N` followed by an FFT.
    #[default]
    Fast,
    /// Direct `O(N^2)` summation, kept as a reference.
    Naive,
}

/// A reusable DCT-I plan for one transform length.
#[derive(Clone)]
pub struct Dct1Plan {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dct1Plan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dct1Plan").field("len", &self.len).finish()
    }
}

impl Dct1Plan {
    pub fn new(len: usize) -> Result<Self> {
        if len < 3 {
            return invalid(format!("DCT-I needs at least 3 points, got {len}"));
        }
        let fft = FftPlanner::new().plan_fft_forward(2 * (len - 1));
        Ok(Self { len, fft })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn forward(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.len {
            return invalid(format!(
                "DCT-I plan for length {} applied to length {}",
                self.len,
                x.len()
            ));
        }
        let n = self.len - 1;
        let mut buf = Vec::with_capacity(2 * n);
        buf.extend_from_slice(x);
        buf.extend(x[1..n].iter().rev());
        self.fft.process(&mut buf);
        buf.truncate(self.len);
        for v in &mut buf {
            *v *= 0.5;
        }
        Ok(buf)
    }

    pub fn inverse(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let scale = 2.0 / (self.len - 1) as f64;
        let mut x = self.forward(y)?;
        for v in &mut x {
            *v *= scale;
        }
        Ok(x)
    }
}

pub fn dct1_forward(x: &[Complex64]) -> Result<Vec<Complex64>> {
    dct1(x, Dct1Algorithm::Fast)
}

pub fn dct1_inverse(y: &[Complex64]) -> Result<Vec<Complex64>> {
    dct1_inverse_with(y, Dct1Algorithm::Fast)
}

pub fn dct1(x: &[Complex64], algorithm: Dct1Algorithm) -> Result<Vec<Complex64>> {
    match algorithm {
        Dct1Algorithm::Fast => Dct1Plan::new(x.len())?.forward(x),
        Dct1Algorithm::Naive => dct1_naive(x),
    }
}

pub fn dct1_inverse_with(y: &[Complex64], algorithm: Dct1Algorithm) -> Result<Vec<Complex64>> {
    if y.len() < 3 {
        return invalid(format!("DCT-I needs at least 3 points, got {}", y.len()));
    }
    let scale = 2.0 / (y.len() - 1) as f64;
    Ok(dct1(y, algorithm)?.into_iter().map(|v| v * scale).collect())
}

fn dct1_naive(x: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.len() < 3 {
        return invalid(format!("DCT-I needs at least 3 points, got {}", x.len()));
    }
    let n = x.len() - 1;
    let period = 2 * n;
    let table: Vec<f64> = (0..period)
        .map(|k| (PI * k as f64 / n as f64).cos())
        .collect();
    Ok((0..=n)
        .map(|m| {
            let mut acc = 0.5 * (x[0] + x[n] * table[(m * n) % period]);
            for (j, &xj) in x.iter().enumerate().take(n).skip(1) {
                acc += xj * table[(m * j) % period];
            }
            acc
        })
        .collect())
}
