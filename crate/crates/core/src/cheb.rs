//! Chebyshev series on Clenshaw-Curtis grids.

use crate::dct::Dct1Plan;
use crate::error::{invalid, Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// The `nu + 2` points `c_m = cos(m pi / (nu + 1))`, from `c_0 = 1` down to
/// `c_{nu+1} = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClenshawCurtisGrid {
    nu: usize,
    points: Vec<f64>,
}

impl ClenshawCurtisGrid {
    pub fn new(nu: usize) -> Result<Self> {
        if nu < 2 || nu % 2 != 0 {
            return invalid(format!("nu must be even and >= 2, got {nu}"));
        }
        let n = nu + 1;
        let mut points = vec![0.0; n + 1];
        // Computing the upper half and mirroring makes the grid exactly
        // antisymmetric. nu is even so n is odd and there is no midpoint.
        for m in 0..=n / 2 {
            // cos(m pi / n) = sin((n - 2m) pi / (2n)) is accurate near the ends.
            let c = (PI * (n as f64 - 2.0 * m as f64) / (2.0 * n as f64)).sin();
            points[m] = c;
            points[n - m] = -c;
        }
        Ok(Self { nu, points })
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, m: usize) -> f64 {
        self.points[m]
    }

    /// `T_n(c_m)` for arbitrary `n`, via `cos(n m pi / (nu + 1))` reduced
    /// modulo the period.
    pub fn cheb_value(&self, n: usize, m: usize) -> f64 {
        let period = 2 * (self.nu + 1);
        let k = (n % period) * m % period;
        (PI * k as f64 / (self.nu + 1) as f64).cos()
    }

    /// `T_n'(c_m)`. Interior points use `n sin(n theta) / sin(theta)`;
    /// endpoints use `T_n'(+-1) = (+-1)^(n-1) n^2`.
    pub fn cheb_derivative(&self, n: usize, m: usize) -> f64 {
        let n2 = (n * n) as f64;
        if m == 0 {
            return n2;
        }
        if m == self.nu + 1 {
            return if n % 2 == 0 { -n2 } else { n2 };
        }
        let period = 2 * (self.nu + 1);
        let k = (n % period) * m % period;
        let h = (self.nu + 1) as f64;
        n as f64 * (PI * k as f64 / h).sin() / (PI * m as f64 / h).sin()
    }
}

pub fn clenshaw_curtis_points(nu: usize) -> Result<ClenshawCurtisGrid> {
    ClenshawCurtisGrid::new(nu)
}

/// Coefficients of a Chebyshev series `sum_n coeffs[n] T_n(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebCoeffVector {
    pub coeffs: Vec<Complex64>,
}

impl ChebCoeffVector {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn unit(n: usize, len: usize) -> Self {
        let mut v = Self::zeros(len);
        v.coeffs[n] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Value at `x = 1`.
    pub fn value_at_plus_one(&self) -> Complex64 {
        self.coeffs.iter().sum()
    }

    /// Value at `x = -1`.
    pub fn value_at_minus_one(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| if n % 2 == 0 { c } else { -c })
            .sum()
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        cheb_eval(self, x)
    }

    /// Coefficients of the derivative series.
    pub fn derivative(&self) -> ChebCoeffVector {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zeros(1);
        }
        let mut d = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + self.coeffs[k] * (2 * k) as f64;
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        Self::new(d)
    }
}

/// Evaluates a Chebyshev series with the Clenshaw recurrence.
pub fn cheb_eval(series: &ChebCoeffVector, x: f64) -> Result<Complex64> {
    if !(x.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("x = {x} outside [-1, 1]")));
    }
    let zero = Complex64::new(0.0, 0.0);
    let c = &series.coeffs;
    if c.is_empty() {
        return Ok(zero);
    }
    let (mut b1, mut b2) = (zero, zero);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * x) - b2;
        b2 = b1;
        b1 = b0;
    }
    Ok(c[0] + b1 * x - b2)
}

/// `[d^l T_n / dx^l]` at `x = sign`, using the multiplicative recursion in `l`.
pub fn cheb_endpoint_derivative(n: i64, l: i64, sign: i32) -> Result<f64> {
    if n < 0 || l < 0 {
        return invalid(format!("negative order: n = {n}, l = {l}"));
    }
    if sign != 1 && sign != -1 {
        return invalid(format!("sign must be +1 or -1, got {sign}"));
    }
    Ok(endpoint_derivatives(n as usize, l as usize, sign as f64)[l as usize])
}

/// All derivatives `[d^k T_n/dx^k](sign)` for `k = 0..=max_order`.
pub(crate) fn endpoint_derivatives(n: usize, max_order: usize, sign: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_order + 1);
    let mut v = if n % 2 == 1 && sign < 0.0 { -1.0 } else { 1.0 };
    let n2 = (n * n) as f64;
    out.push(v);
    for l in 1..=max_order {
        if l > n {
            v = 0.0;
        } else {
            let lm1 = (l - 1) as f64;
            v *= sign * (n2 - lm1 * lm1) / (2 * l - 1) as f64;
        }
        out.push(v);
    }
    out
}

fn check_grid_len(len: usize, grid: &ClenshawCurtisGrid) -> Result<()> {
    if len != grid.len() {
        return invalid(format!(
            "vector of length {len} does not match grid with {} points",
            grid.len()
        ));
    }
    Ok(())
}

/// `C alpha` with `C_{mk} = T_k(c_m)`: values of the series at the grid.
pub fn apply_collocation_matrix(
    alpha: &ChebCoeffVector,
    grid: &ClenshawCurtisGrid,
) -> Result<Vec<Complex64>> {
    check_grid_len(alpha.len(), grid)?;
    let plan = Dct1Plan::new(grid.len())?;
    collocation_values(&plan, &alpha.coeffs)
}

/// Inverse of [`apply_collocation_matrix`]: Chebyshev coefficients of the
/// interpolant through `values` at the grid.
pub fn invert_collocation_matrix(
    values: &[Complex64],
    grid: &ClenshawCurtisGrid,
) -> Result<ChebCoeffVector> {
    check_grid_len(values.len(), grid)?;
    let plan = Dct1Plan::new(grid.len())?;
    Ok(ChebCoeffVector::new(collocation_coeffs(&plan, values)?))
}

pub(crate) fn collocation_values(plan: &Dct1Plan, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let last = coeffs.len() - 1;
    let mut scaled = coeffs.to_vec();
    scaled[0] *= 2.0;
    scaled[last] *= 2.0;
    plan.forward(&scaled)
}

pub(crate) fn collocation_coeffs(plan: &Dct1Plan, values: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c = plan.inverse(values)?;
    let last = c.len() - 1;
    c[0] *= 0.5;
    c[last] *= 0.5;
    Ok(c)
}

/// Index in `0..=nu+1` whose Chebyshev polynomial agrees with `T_k` on the
/// grid with parameter `nu`.
pub fn alias_index(k: usize, nu: usize) -> usize {
    let n = nu + 1;
    let r = k % (2 * n);
    if r > n {
        2 * n - r
    } else {
        r
    }
}

/// Folds a coefficient vector of any length onto `nu + 2` coefficients with
/// the same values on the grid.
pub fn alias_fold(coeffs: &[Complex64], nu: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); nu + 2];
    for (k, &c) in coeffs.iter().enumerate() {
        out[alias_index(k, nu)] += c;
    }
    out
}
