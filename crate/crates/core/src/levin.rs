//! Fast Levin collocation on Clenshaw-Curtis points.
//!
//! The Levin equation `u' + G^T u = f` is cleared of denominators,
//! `r u_i' + sum_k (r G)_{ki} u_k = r f_i`, and collocated at the `nu + 2`
//! grid points (plus `s` derivative conditions at each endpoint). Multiplying
//! by `1 - x^2` turns the interior conditions into a banded system in
//! coefficient space; the endpoint conditions are recovered through a small
//! dense bordering system.

use crate::amplitude::{binomial, factorial, AmplitudeSpec};
use crate::banded::{banded_lu_factor, BandedLU, BandedMatrix};
use crate::cheb::{alias_fold, collocation_coeffs, collocation_values, endpoint_derivatives};
use crate::cheb::{ChebCoeffVector, ClenshawCurtisGrid};
use crate::dct::Dct1Plan;
use crate::dense::{DenseLU, DenseMatrix};
use crate::error::{invalid, Error, Result};
use crate::hockney::{hockney_permutation, reorder_block_banded, BlockPermutation};
use crate::operators::{fold_operator, ChebOperator};
use crate::oscillator::OscillatorSystem;
use crate::poly::Polynomial;
use num_complex::Complex64;
use serde::Serialize;
use std::time::Instant;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Scaled residuals above this are flagged on the result.
pub const RESIDUAL_FLAG: f64 = 1e-5;

#[derive(Debug, Clone)]
pub struct LevinProblem {
    pub sys: OscillatorSystem,
    pub f: AmplitudeSpec,
    pub nu: usize,
    pub s: usize,
}

impl LevinProblem {
    pub fn new(sys: OscillatorSystem, f: AmplitudeSpec, nu: usize, s: usize) -> Result<Self> {
        let p = Self { sys, f, nu, s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu < 2 || self.nu % 2 != 0 {
            return invalid(format!("nu must be even and >= 2, got {}", self.nu));
        }
        if self.nu <= self.sys.d() {
            return invalid(format!("nu = {} must exceed d = {}", self.nu, self.sys.d()));
        }
        if self.f.dim() != self.sys.dim() {
            return invalid(format!(
                "amplitude has {} components, system has {}",
                self.f.dim(),
                self.sys.dim()
            ));
        }
        if self.s > self.f.derivative_order() {
            return invalid(format!(
                "s = {} needs endpoint derivatives of f up to that order, have {}",
                self.s,
                self.f.derivative_order()
            ));
        }
        Ok(())
    }

    /// Number of Chebyshev coefficients per component.
    pub fn basis_len(&self) -> usize {
        self.nu + 2 * self.s + 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverPath {
    ScalarS0,
    ScalarS,
    BlockS0,
    BlockS,
    /// Dense solve after the fast path failed.
    DenseFallback,
    /// Dense solve requested directly.
    Dense,
}

impl SolverPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ScalarS0 => "scalar_s0",
            Self::ScalarS => "scalar_s",
            Self::BlockS0 => "block_s0",
            Self::BlockS => "block_s",
            Self::DenseFallback => "dense_fallback",
            Self::Dense => "dense",
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// One coefficient vector of length `nu + 2s + 2` per component.
    pub coeffs: Vec<ChebCoeffVector>,
    /// Largest collocation residual over the grid, divided by
    /// `omega * max |f|`.
    pub residual: f64,
    pub residual_flagged: bool,
    pub path: SolverPath,
    pub nu: usize,
    pub s: usize,
    pub wall_time: f64,
}

/// `sum_k q_k(1) w_k(1) - q_k(-1) w_k(-1)`.
pub fn boundary_value(sys: &OscillatorSystem, coeffs: &[ChebCoeffVector]) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, q)| q.value_at_plus_one() * sys.w_plus()[k] - q.value_at_minus_one() * sys.w_minus()[k])
        .sum()
}

/// Largest `|L q - f|` over the grid, scaled by `omega * max |f|`.
/// Costs `O(M nu log nu)` via aliasing and DCT-I.
pub fn collocation_residual(
    sys: &OscillatorSystem,
    f: &AmplitudeSpec,
    coeffs: &[ChebCoeffVector],
    nu: usize,
) -> Result<f64> {
    let grid = ClenshawCurtisGrid::new(nu)?;
    let plan = Dct1Plan::new(grid.len())?;
    let m = sys.dim();
    let mut vals = Vec::with_capacity(m);
    let mut dvals = Vec::with_capacity(m);
    for q in coeffs {
        vals.push(collocation_values(&plan, &alias_fold(&q.coeffs, nu))?);
        dvals.push(collocation_values(&plan, &alias_fold(&q.derivative().coeffs, nu))?);
    }
    let mut worst = 0.0f64;
    let mut fmax = 0.0f64;
    for (mi, &x) in grid.points().iter().enumerate() {
        let rx = sys.r().eval(x);
        for i in 0..m {
            let mut lq = dvals[i][mi];
            for k in 0..m {
                lq += sys.rg()[k][i].eval(x) / rx * vals[k][mi];
            }
            let fx = f.eval(i, x);
            fmax = fmax.max(fx.norm());
            worst = worst.max((lq - fx).norm());
        }
    }
    let scale = sys.omega() * if fmax > 0.0 { fmax } else { 1.0 };
    Ok(worst / scale)
}

fn fallback(e: Error) -> Error {
    match e {
        Error::SingularMatrix { index, magnitude } => Error::FallbackNeeded(format!(
            "singular pivot {index} (|p| = {magnitude:e})"
        )),
        other => other,
    }
}

/// Folded `(nu + 2) x (nu + 2)` blocks of `(1 - x^2) r L`: block `(i, k)`
/// maps component `k` of the unknown to component `i` of the equation.
pub fn folded_blocks(sys: &OscillatorSystem, nu: usize) -> Result<Vec<Vec<BandedMatrix>>> {
    let m = sys.dim();
    let w = Polynomial::one_minus_x2();
    let diff = &w * sys.r();
    let mut ops = Vec::with_capacity(m * m);
    for i in 0..m {
        for k in 0..m {
            let p_diff = if i == k { diff.clone() } else { Polynomial::zero() };
            ops.push(ChebOperator::new(&p_diff, &(&w * &sys.rg()[k][i]))?);
        }
    }
    let h = ops.iter().map(ChebOperator::half_bandwidth).max().unwrap_or(0);
    if nu < h {
        return Err(Error::UnsupportedRegime(format!(
            "nu = {nu} is below the operator half-bandwidth {h}"
        )));
    }
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(m);
        for k in 0..m {
            let b = ops[i * m + k].matrix(nu + 2 + h)?;
            row.push(fold_operator(&b, nu)?);
        }
        out.push(row);
    }
    Ok(out)
}

/// Precomputed fast solver for one system and one `nu`. Reusable for any
/// amplitude and any `s`.
#[derive(Debug, Clone)]
pub struct FastLevin {
    sys: OscillatorSystem,
    nu: usize,
    grid: ClenshawCurtisGrid,
    plan: Dct1Plan,
    r_grid: Vec<Complex64>,
    /// `(r G)_{ki}(c_m)` at `[k][i][m]`.
    rg_grid: Vec<Vec<Vec<Complex64>>>,
    perm: BlockPermutation,
    interior: BandedMatrix,
    lu: BandedLU,
    /// `2M` vectors of length `M (nu + 2)`, ordered `(k, c)` with `c` the
    /// column `0` or `nu + 1` of component `k`.
    null: Vec<Vec<Complex64>>,
    /// Unscaled point conditions at `x = +-1`, rows ordered `(i, sign)`.
    endpoint_rows: Vec<Vec<Complex64>>,
    border: DenseMatrix,
    border_lu: DenseLU,
}

impl FastLevin {
    pub fn new(sys: &OscillatorSystem, nu: usize) -> Result<Self> {
        if nu < 2 || nu % 2 != 0 {
            return invalid(format!("nu must be even and >= 2, got {nu}"));
        }
        let m = sys.dim();
        let n0 = nu + 2;
        let grid = ClenshawCurtisGrid::new(nu)?;
        let plan = Dct1Plan::new(n0)?;
        let r_grid: Vec<Complex64> = grid.points().iter().map(|&x| sys.r().eval(x)).collect();
        let rg_grid = sys
            .rg()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| grid.points().iter().map(|&x| p.eval(x)).collect())
                    .collect()
            })
            .collect();

        let blocks = folded_blocks(sys, nu)?;
        let inner: Vec<Vec<BandedMatrix>> = blocks
            .iter()
            .map(|row| row.iter().map(|b| b.submatrix(1, nu)).collect())
            .collect();
        let perm = hockney_permutation(m, nu)?;
        let interior = reorder_block_banded(&inner, &perm)?;
        let lu = banded_lu_factor(&interior).map_err(fallback)?;

        let mut this = Self {
            sys: sys.clone(),
            nu,
            grid,
            plan,
            r_grid,
            rg_grid,
            perm,
            interior,
            lu,
            null: Vec::new(),
            endpoint_rows: Vec::new(),
            border: DenseMatrix::zeros(0, 0),
            border_lu: DenseLU::factor(&DenseMatrix::identity(1))?,
        };

        for k in 0..m {
            for c in [0, nu + 1] {
                // P B P v = -P B e_{k,c}: interior rows of column c in every block row.
                let rhs: Vec<Vec<Complex64>> = (0..m)
                    .map(|i| (1..=nu).map(|row| -blocks[i][k].get(row, c)).collect())
                    .collect();
                let mut v = this.interior_solve(&rhs)?;
                v[k * n0 + c] = ONE;
                this.null.push(v);
            }
        }

        for i in 0..m {
            for sign in [1.0, -1.0] {
                this.endpoint_rows.push(this.endpoint_row(i, sign, n0));
            }
        }
        let mut border = DenseMatrix::zeros(2 * m, 2 * m);
        for (row, e) in this.endpoint_rows.iter().enumerate() {
            for (col, v) in this.null.iter().enumerate() {
                border[(row, col)] = dot(e, v);
            }
        }
        this.border_lu = DenseLU::factor_with_tolerance(&border, 0.0).map_err(fallback)?;
        this.border = border;
        Ok(this)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn grid(&self) -> &ClenshawCurtisGrid {
        &self.grid
    }

    /// The reordered interior matrix `P B P`.
    pub fn interior_matrix(&self) -> &BandedMatrix {
        &self.interior
    }

    /// The `2M x 2M` bordering matrix.
    pub fn bordering_matrix(&self) -> &DenseMatrix {
        &self.border
    }

    /// Null vectors of the interior conditions, `2M` of them.
    pub fn null_vectors(&self) -> &[Vec<Complex64>] {
        &self.null
    }

    /// Coefficients of the functional `(r L q)_i(sign)` on vectors with
    /// `len` coefficients per component.
    fn endpoint_row(&self, i: usize, sign: f64, len: usize) -> Vec<Complex64> {
        let m = self.sys.dim();
        let r = self.sys.r().eval(sign);
        let mut row = vec![ZERO; m * len];
        for k in 0..m {
            let g = self.sys.rg()[k][i].eval(sign);
            for n in 0..len {
                // T_n(+-1) = (+-1)^n, T_n'(+-1) = (+-1)^(n-1) n^2.
                let t = if sign < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
                let dt = t * sign * (n * n) as f64;
                let mut v = g * t;
                if k == i {
                    v += r * dt;
                }
                row[k * len + n] = v;
            }
        }
        row
    }

    /// Solves the interior rows given coefficient-space right-hand sides
    /// (rows `1..=nu` of each component). Returns a full `M (nu + 2)` vector
    /// with zeros in columns `0` and `nu + 1`.
    fn interior_solve(&self, rhs: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
        let nu = self.nu;
        let stacked: Vec<Complex64> = rhs.iter().flatten().copied().collect();
        let x = self.perm.unapply(&self.lu.solve(&self.perm.apply(&stacked))?);
        let n0 = nu + 2;
        let mut out = vec![ZERO; rhs.len() * n0];
        for k in 0..rhs.len() {
            out[k * n0 + 1..k * n0 + 1 + nu].copy_from_slice(&x[k * nu..(k + 1) * nu]);
        }
        Ok(out)
    }

    /// Base coefficients (`nu + 2` per component) whose cleared operator
    /// matches `values[i][m]` at every grid point.
    pub fn base_solve(&self, values: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
        let m = self.sys.dim();
        let nu = self.nu;
        let mut rhs = Vec::with_capacity(m);
        for vals in values {
            let scaled: Vec<Complex64> = self
                .grid
                .points()
                .iter()
                .zip(vals)
                .enumerate()
                .map(|(mi, (&x, &v))| if mi == 0 || mi == nu + 1 { ZERO } else { v * (1.0 - x * x) })
                .collect();
            let g = collocation_coeffs(&self.plan, &scaled)?;
            rhs.push(g[1..=nu].to_vec());
        }
        let mut beta = self.interior_solve(&rhs)?;
        let mut b = Vec::with_capacity(2 * m);
        for (row, e) in self.endpoint_rows.iter().enumerate() {
            let i = row / 2;
            let target = if row % 2 == 0 { values[i][0] } else { values[i][nu + 1] };
            b.push(target - dot(e, &beta));
        }
        let delta = self.border_lu.solve(&b)?;
        for (d, v) in delta.iter().zip(&self.null) {
            for (x, y) in beta.iter_mut().zip(v) {
                *x += d * y;
            }
        }
        Ok(beta)
    }

    /// Runs the full solve for amplitude `f` with `s` endpoint derivative
    /// conditions. Returns one coefficient vector per component.
    pub fn solve_coeffs(&self, f: &AmplitudeSpec, s: usize) -> Result<Vec<ChebCoeffVector>> {
        let m = self.sys.dim();
        let nu = self.nu;
        let n0 = nu + 2;
        let nb = nu + 2 * s + 2;
        if f.dim() != m {
            return invalid(format!("amplitude has {} components, system has {m}", f.dim()));
        }
        if s > f.derivative_order() {
            return invalid(format!("s = {s} needs endpoint derivatives of f"));
        }
        let values: Vec<Vec<Complex64>> = (0..m)
            .map(|i| {
                self.grid
                    .points()
                    .iter()
                    .zip(&self.r_grid)
                    .map(|(&x, &r)| r * f.eval(i, x))
                    .collect()
            })
            .collect();
        let beta = self.base_solve(&values)?;
        let split = |base: &[Complex64], extra: &[Complex64]| -> Vec<ChebCoeffVector> {
            (0..m)
                .map(|k| {
                    let mut c = base[k * n0..(k + 1) * n0].to_vec();
                    c.extend_from_slice(&extra[k * 2 * s..(k + 1) * 2 * s]);
                    ChebCoeffVector::new(c)
                })
                .collect()
        };
        if s == 0 {
            return Ok(split(&beta, &[]));
        }

        // Auxiliary solves: one per extra coefficient a_{k,j}, j = 1..=2s.
        let mut aux = Vec::with_capacity(2 * m * s);
        for k in 0..m {
            for j in 1..=2 * s {
                let n = nu + 1 + j;
                let h: Vec<Vec<Complex64>> = (0..m)
                    .map(|i| {
                        (0..n0)
                            .map(|mi| {
                                let mut v = self.rg_grid[k][i][mi] * self.grid.cheb_value(n, mi);
                                if i == k {
                                    v += self.r_grid[mi] * self.grid.cheb_derivative(n, mi);
                                }
                                -v
                            })
                            .collect()
                    })
                    .collect();
                aux.push(self.base_solve(&h)?);
            }
        }

        // Derivative conditions d^l (r L q)_i (sign) = d^l (r f_i)(sign).
        let rows = self.derivative_rows(s, nb);
        let embed = |base: &[Complex64]| -> Vec<Complex64> {
            let mut full = vec![ZERO; m * nb];
            for k in 0..m {
                full[k * nb..k * nb + n0].copy_from_slice(&base[k * n0..(k + 1) * n0]);
            }
            full
        };
        let beta_full = embed(&beta);
        let aux_full: Vec<Vec<Complex64>> = aux.iter().map(|a| embed(a)).collect();
        let dim = 2 * m * s;
        let mut sysm = DenseMatrix::zeros(dim, dim);
        let mut rhs = Vec::with_capacity(dim);
        for (ri, (i, sign, l, w)) in rows.iter().enumerate() {
            for k in 0..m {
                for j in 1..=2 * s {
                    let col = k * 2 * s + j - 1;
                    sysm[(ri, col)] = dot(w, &aux_full[col]) + w[k * nb + nu + 1 + j];
                }
            }
            let r_taylor = self.sys.r().taylor_at(*sign);
            let mut target = ZERO;
            for q in 0..=*l {
                let rd = r_taylor.get(l - q).copied().unwrap_or(ZERO) * factorial(l - q);
                if rd != ZERO {
                    let fq = f
                        .endpoint_derivative(*i, q, *sign)
                        .ok_or_else(|| Error::InvalidArgument("missing derivative of f".into()))?;
                    target += rd * binomial(*l, q) * fq;
                }
            }
            rhs.push(target - dot(w, &beta_full));
        }
        let a = DenseLU::factor_with_tolerance(&sysm, 0.0)
            .map_err(fallback)?
            .solve(&rhs)?;
        let mut base = beta;
        for (ak, v) in a.iter().zip(&aux) {
            for (x, y) in base.iter_mut().zip(v) {
                *x += ak * y;
            }
        }
        Ok(split(&base, &a))
    }

    /// Functionals `d^l (r L q)_i (sign)` on vectors with `len` coefficients
    /// per component, for `l = 1..=s`.
    fn derivative_rows(&self, s: usize, len: usize) -> Vec<(usize, f64, usize, Vec<Complex64>)> {
        let m = self.sys.dim();
        let mut out = Vec::with_capacity(2 * m * s);
        for sign in [1.0, -1.0] {
            // T_n^{(q)}(sign) for q = 0..=s+1.
            let t: Vec<Vec<f64>> = (0..len).map(|n| endpoint_derivatives(n, s + 1, sign)).collect();
            let rd: Vec<Complex64> = taylor_derivs(self.sys.r(), sign, s);
            let gd: Vec<Vec<Vec<Complex64>>> = self
                .sys
                .rg()
                .iter()
                .map(|row| row.iter().map(|p| taylor_derivs(p, sign, s)).collect())
                .collect();
            for i in 0..m {
                for l in 1..=s {
                    let mut w = vec![ZERO; m * len];
                    for k in 0..m {
                        for n in 0..len {
                            let mut v = ZERO;
                            for q in 0..=l {
                                let b = binomial(l, q);
                                v += gd[k][i][l - q] * (b * t[n][q]);
                                if k == i {
                                    v += rd[l - q] * (b * t[n][q + 1]);
                                }
                            }
                            w[k * len + n] = v;
                        }
                    }
                    out.push((i, sign, l, w));
                }
            }
        }
        out
    }
}

/// `p^{(j)}(x0)` for `j = 0..=order`.
fn taylor_derivs(p: &Polynomial, x0: f64, order: usize) -> Vec<Complex64> {
    let t = p.taylor_at(x0);
    (0..=order)
        .map(|j| t.get(j).copied().unwrap_or(ZERO) * factorial(j))
        .collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn finish(
    problem: &LevinProblem,
    coeffs: Vec<ChebCoeffVector>,
    path: SolverPath,
    start: Instant,
) -> Result<QuadratureResult> {
    let value = boundary_value(&problem.sys, &coeffs);
    let wall_time = start.elapsed().as_secs_f64();
    let residual = collocation_residual(&problem.sys, &problem.f, &coeffs, problem.nu)?;
    Ok(QuadratureResult {
        value,
        coeffs,
        residual,
        residual_flagged: !(residual <= RESIDUAL_FLAG),
        path,
        nu: problem.nu,
        s: problem.s,
        wall_time,
    })
}

fn fast_solve(problem: &LevinProblem, path: SolverPath) -> Result<QuadratureResult> {
    problem.validate()?;
    let start = Instant::now();
    let engine = FastLevin::new(&problem.sys, problem.nu)?;
    let coeffs = engine.solve_coeffs(&problem.f, problem.s)?;
    finish(problem, coeffs, path, start)
}

fn check_tier(problem: &LevinProblem, scalar: bool, with_derivs: bool) -> Result<()> {
    let m = problem.sys.dim();
    if scalar && m != 1 {
        return invalid(format!("scalar solver needs M = 1, got {m}"));
    }
    if !scalar && m < 2 {
        return invalid("block solver needs M >= 2");
    }
    if with_derivs != (problem.s > 0) {
        return invalid(format!("s = {} does not match this solver tier", problem.s));
    }
    Ok(())
}

pub fn solve_scalar_s0(problem: &LevinProblem) -> Result<QuadratureResult> {
    check_tier(problem, true, false)?;
    fast_solve(problem, SolverPath::ScalarS0)
}

pub fn solve_scalar_s(problem: &LevinProblem) -> Result<QuadratureResult> {
    check_tier(problem, true, true)?;
    fast_solve(problem, SolverPath::ScalarS)
}

pub fn solve_block_s0(problem: &LevinProblem) -> Result<QuadratureResult> {
    check_tier(problem, false, false)?;
    fast_solve(problem, SolverPath::BlockS0)
}

pub fn solve_block_s(problem: &LevinProblem) -> Result<QuadratureResult> {
    check_tier(problem, false, true)?;
    fast_solve(problem, SolverPath::BlockS)
}

pub fn tier_path(problem: &LevinProblem) -> SolverPath {
    match (problem.sys.dim() == 1, problem.s == 0) {
        (true, true) => SolverPath::ScalarS0,
        (true, false) => SolverPath::ScalarS,
        (false, true) => SolverPath::BlockS0,
        (false, false) => SolverPath::BlockS,
    }
}

/// Solves with the fast tier matching `(M, s)`, falling back to the dense
/// solver if the fast path hits a singular subsystem.
pub fn quadrature(problem: &LevinProblem) -> Result<QuadratureResult> {
    problem.validate()?;
    match fast_solve(problem, tier_path(problem)) {
        // A flagged residual is treated like a singular pivot. If the dense
        // solve fails too, the flagged fast result is still returned.
        Ok(r) if r.residual_flagged => match crate::reference::dense_levin_solve(problem) {
            Ok(mut d) => {
                d.path = SolverPath::DenseFallback;
                Ok(d)
            }
            Err(_) => Ok(r),
        },
        Ok(r) => Ok(r),
        Err(Error::FallbackNeeded(_)) | Err(Error::UnsupportedRegime(_)) => {
            match crate::reference::dense_levin_solve(problem) {
                Ok(mut r) => {
                    r.path = SolverPath::DenseFallback;
                    Ok(r)
                }
                Err(e) => Err(Error::Unsolvable(format!("fast and dense paths failed: {e}"))),
            }
        }
        Err(e) => Err(e),
    }
}

/// Folded scalar operator `B~` for an `M = 1` system.
pub fn scalar_folded_operator(sys: &OscillatorSystem, nu: usize) -> Result<BandedMatrix> {
    if sys.dim() != 1 {
        return invalid("scalar operator needs M = 1");
    }
    Ok(folded_blocks(sys, nu)?.remove(0).remove(0))
}

fn check_scalar_size(b_tilde: &BandedMatrix, grid: &ClenshawCurtisGrid) -> Result<()> {
    if b_tilde.size() != grid.len() {
        return invalid(format!(
            "operator of size {} does not match grid with {} points",
            b_tilde.size(),
            grid.len()
        ));
    }
    Ok(())
}

/// Interior solve `P B~ P alpha_0 = P C^{-1} f~` with `f~ = (1 - c^2) f`.
/// `f_samples` are the cleared right-hand side values at the grid.
pub fn solve_interior_scalar(
    b_tilde: &BandedMatrix,
    f_samples: &[Complex64],
    grid: &ClenshawCurtisGrid,
) -> Result<ChebCoeffVector> {
    check_scalar_size(b_tilde, grid)?;
    if f_samples.len() != grid.len() {
        return invalid("sample count does not match the grid");
    }
    let nu = grid.nu();
    let plan = Dct1Plan::new(grid.len())?;
    let mut scaled: Vec<Complex64> = f_samples
        .iter()
        .zip(grid.points())
        .map(|(&f, &x)| f * (1.0 - x * x))
        .collect();
    scaled[0] = ZERO;
    scaled[nu + 1] = ZERO;
    let g = collocation_coeffs(&plan, &scaled)?;
    let lu = banded_lu_factor(&b_tilde.submatrix(1, nu)).map_err(fallback)?;
    let x = lu.solve(&g[1..=nu])?;
    let mut out = vec![ZERO; nu + 2];
    out[1..=nu].copy_from_slice(&x);
    Ok(ChebCoeffVector::new(out))
}

/// The two null vectors `e_0 + v~_1` and `e_{nu+1} + v~_2` of the interior
/// conditions.
pub fn null_vectors_scalar(
    b_tilde: &BandedMatrix,
    grid: &ClenshawCurtisGrid,
) -> Result<(ChebCoeffVector, ChebCoeffVector)> {
    check_scalar_size(b_tilde, grid)?;
    let nu = grid.nu();
    let lu = banded_lu_factor(&b_tilde.submatrix(1, nu)).map_err(fallback)?;
    let make = |c: usize| -> Result<ChebCoeffVector> {
        let rhs: Vec<Complex64> = (1..=nu).map(|row| -b_tilde.get(row, c)).collect();
        let x = lu.solve(&rhs)?;
        let mut v = vec![ZERO; nu + 2];
        v[1..=nu].copy_from_slice(&x);
        v[c] = ONE;
        Ok(ChebCoeffVector::new(v))
    };
    Ok((make(0)?, make(nu + 1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::{cosine, manufactured_unit, rational_runge, ComponentFn};
    use crate::dense::dense_solve;
    use crate::oscillator::{make_bessel_auto, make_exponential};
    use crate::reference::{assemble_dense_system, cheb_derivative_table, dense_levin_solve};
    use std::sync::Arc;

    fn linear(omega: f64) -> OscillatorSystem {
        make_exponential(&Polynomial::from_real(&[0.0, 1.0]), omega).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    /// `L T_n(x) = T_n'(x) + i omega T_n(x)` for `g = x`.
    fn lt(x: f64, n: usize, omega: f64) -> Complex64 {
        let t = cheb_derivative_table(x, n + 1, 1);
        Complex64::new(t[1][n], omega * t[0][n])
    }

    #[test]
    fn zero_amplitude_gives_zero_on_every_tier() {
        let bessel = make_bessel_auto(1, 2.0, 100.0).unwrap();
        for (sys, s) in [(linear(100.0), 0), (linear(100.0), 2), (bessel.clone(), 0), (bessel, 1)] {
            let m = sys.dim();
            let p = LevinProblem::new(sys, AmplitudeSpec::zero(m, s), 16, s).unwrap();
            let r = fast_solve(&p, tier_path(&p)).unwrap();
            assert_eq!(r.value, ZERO);
            for q in &r.coeffs {
                assert_eq!(q.len(), 16 + 2 * s + 2);
                assert!(q.coeffs.iter().all(|c| *c == ZERO));
            }
        }
    }

    #[test]
    fn interior_solve_satisfies_interior_conditions() {
        let omega = 100.0;
        let nu = 16;
        let sys = linear(omega);
        let b = scalar_folded_operator(&sys, nu).unwrap();
        let grid = ClenshawCurtisGrid::new(nu).unwrap();
        let alpha = solve_interior_scalar(&b, &vec![ONE; nu + 2], &grid).unwrap();
        assert_eq!(alpha.coeffs[0], ZERO);
        assert_eq!(alpha.coeffs[nu + 1], ZERO);
        for m in 1..=nu {
            let x = grid.point(m);
            let v: Complex64 = (0..nu + 2).map(|n| alpha.coeffs[n] * lt(x, n, omega)).sum();
            assert!((v - ONE).norm() <= 1e-9 * omega, "row {m}: {v}");
        }
        // Dense middle system P A P.
        let mut a = DenseMatrix::zeros(nu, nu);
        for m in 1..=nu {
            for n in 1..=nu {
                a[(m - 1, n - 1)] = lt(grid.point(m), n, omega);
            }
        }
        let x = dense_solve(&a, &vec![ONE; nu]).unwrap();
        let scale = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for n in 1..=nu {
            assert!((alpha.coeffs[n] - x[n - 1]).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn null_vectors_annihilate_interior_rows() {
        let omega = 100.0;
        let nu = 32;
        let b = scalar_folded_operator(&linear(omega), nu).unwrap();
        let grid = ClenshawCurtisGrid::new(nu).unwrap();
        let (v1, v2) = null_vectors_scalar(&b, &grid).unwrap();
        assert_eq!((v1.coeffs[0], v1.coeffs[nu + 1]), (ONE, ZERO));
        assert_eq!((v2.coeffs[0], v2.coeffs[nu + 1]), (ZERO, ONE));
        for v in [&v1, &v2] {
            let vmax = v.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            for m in 1..=nu {
                let x = grid.point(m);
                let av: Complex64 = (0..nu + 2).map(|n| v.coeffs[n] * lt(x, n, omega)).sum();
                assert!(av.norm() <= 1e-9 * omega * vmax);
            }
        }
        let dot = |a: &ChebCoeffVector, b: &ChebCoeffVector| -> Complex64 {
            a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.conj() * y).sum()
        };
        let det = dot(&v1, &v1) * dot(&v2, &v2) - dot(&v1, &v2) * dot(&v2, &v1);
        assert!(det.norm() > 1e-12);
    }

    #[test]
    fn manufactured_in_base_span_is_exact() {
        let sys = linear(100.0);
        let man = manufactured_unit(&sys, 3, 0).unwrap();
        let p = LevinProblem::new(sys.clone(), man.amplitude, 16, 0).unwrap();
        let r = solve_scalar_s0(&p).unwrap();
        let w = |x: f64| Complex64::from_polar(1.0, 100.0 * x);
        let exact = w(1.0) + w(-1.0);
        assert!(rel(man.exact_value, exact) < 1e-15);
        assert!(rel(r.value, exact) < 1e-10, "{} vs {exact}", r.value);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn manufactured_beyond_base_span_needs_s() {
        let nu = 16;
        let sys = linear(100.0);
        let man = manufactured_unit(&sys, nu + 2, 1).unwrap();
        let p = LevinProblem::new(sys, man.amplitude, nu, 1).unwrap();
        let r = solve_scalar_s(&p).unwrap();
        assert!(rel(r.value, man.exact_value) < 1e-9);

        let sys = make_bessel_auto(1, 2.0, 100.0).unwrap();
        let man = manufactured_unit(&sys, nu + 2, 1).unwrap();
        let p = LevinProblem::new(sys, man.amplitude, nu, 1).unwrap();
        let r = solve_block_s(&p).unwrap();
        assert!(rel(r.value, man.exact_value) < 1e-9);
    }

    #[test]
    fn decoupled_block_equals_sum_of_scalars() {
        let omega = 80.0;
        let nu = 32;
        let e = |g: f64, x: f64| Complex64::from_polar(1.0, omega * g * x);
        let iw = |c: f64| Polynomial::constant(Complex64::new(0.0, omega * c));
        let sys = OscillatorSystem::custom(
            omega,
            Polynomial::one(),
            vec![vec![iw(1.0), Polynomial::zero()], vec![Polynomial::zero(), iw(2.0)]],
            vec![e(1.0, 1.0), e(2.0, 1.0)],
            vec![e(1.0, -1.0), e(2.0, -1.0)],
        )
        .unwrap();
        let runge = rational_runge(1, 0);
        let f1: ComponentFn = Arc::new(|x: f64| Complex64::new(x.cos(), 0.0));
        let r2 = runge.clone();
        let f2: ComponentFn = Arc::new(move |x: f64| r2.eval(0, x));
        let f = AmplitudeSpec::new(vec![f1, f2], None).unwrap();
        let block = solve_block_s0(&LevinProblem::new(sys, f, nu, 0).unwrap()).unwrap();
        let a = solve_scalar_s0(&LevinProblem::new(linear(omega), cosine(1, 0), nu, 0).unwrap()).unwrap();
        let sys2 = make_exponential(&Polynomial::from_real(&[0.0, 2.0]), omega).unwrap();
        let b = solve_scalar_s0(&LevinProblem::new(sys2, runge, nu, 0).unwrap()).unwrap();
        assert!(rel(block.value, a.value + b.value) < 1e-11);
    }

    #[test]
    fn fast_coefficients_satisfy_the_dense_system() {
        let cases = [
            (linear(100.0), 0usize),
            (make_exponential(&Polynomial::from_real(&[0.0, 1.0, 0.0, 0.1]), 100.0).unwrap(), 2),
            (make_bessel_auto(1, 2.0, 100.0).unwrap(), 1),
        ];
        for (sys, s) in cases {
            let omega = sys.omega();
            let p = LevinProblem::new(sys.clone(), rational_runge(sys.dim(), s), 32, s).unwrap();
            let r = fast_solve(&p, tier_path(&p)).unwrap();
            let (a, rhs) = assemble_dense_system(&p).unwrap();
            let x: Vec<Complex64> = r.coeffs.iter().flat_map(|q| q.coeffs.clone()).collect();
            let ax = a.matvec(&x);
            let nb = p.basis_len();
            let fmax = rhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (row, (lhs, b)) in ax.iter().zip(&rhs).enumerate() {
                let err = (lhs - b).norm();
                if row % nb < p.nu + 2 {
                    assert!(err <= 1e-8 * omega * fmax, "point row {row}: {err:e}");
                } else {
                    assert!(err <= 1e-7 * omega.powi(s as i32 + 1) * b.norm().max(1.0), "derivative row {row}: {err:e}");
                }
            }
            assert!(rel(boundary_value(&sys, &r.coeffs), r.value) <= 1e-13);
            assert!(!r.residual_flagged);
        }
    }

    #[test]
    fn matches_dense_reference() {
        let p = LevinProblem::new(linear(100.0), rational_runge(1, 0), 32, 0).unwrap();
        let fast = solve_scalar_s0(&p).unwrap();
        let dense = dense_levin_solve(&p).unwrap();
        assert!(rel(fast.value, dense.value) < 1e-9);
        assert_eq!(dense.path, SolverPath::Dense);
    }

    #[test]
    fn dispatcher_picks_the_tier() {
        let p = LevinProblem::new(linear(100.0), rational_runge(1, 0), 16, 0).unwrap();
        assert_eq!(quadrature(&p).unwrap().path, SolverPath::ScalarS0);
        let p = LevinProblem::new(linear(100.0), rational_runge(1, 2), 16, 2).unwrap();
        assert_eq!(quadrature(&p).unwrap().path, SolverPath::ScalarS);
        let bessel = make_bessel_auto(1, 2.0, 100.0).unwrap();
        let p = LevinProblem::new(bessel.clone(), rational_runge(2, 0), 16, 0).unwrap();
        assert_eq!(quadrature(&p).unwrap().path, SolverPath::BlockS0);
        let p = LevinProblem::new(bessel, rational_runge(2, 3), 16, 3).unwrap();
        assert_eq!(quadrature(&p).unwrap().path, SolverPath::BlockS);
    }

    #[test]
    fn tiny_omega_falls_back_to_dense() {
        let p = LevinProblem::new(linear(0.001), rational_runge(1, 0), 16, 0).unwrap();
        let r = quadrature(&p).unwrap();
        assert_eq!(r.path, SolverPath::DenseFallback);
        assert!(r.value.re.is_finite() && r.value.im.is_finite());
        // The collocation problem itself is ill-posed this far below nu.
        assert!(r.residual_flagged);
    }

    #[test]
    fn tier_solvers_reject_mismatched_problems() {
        let p = LevinProblem::new(linear(100.0), rational_runge(1, 1), 16, 1).unwrap();
        assert!(matches!(solve_scalar_s0(&p), Err(Error::InvalidArgument(_))));
        assert!(matches!(solve_block_s(&p), Err(Error::InvalidArgument(_))));
        assert!(solve_scalar_s(&p).is_ok());
    }

    #[test]
    fn problem_validation() {
        let sys = linear(100.0);
        assert!(LevinProblem::new(sys.clone(), rational_runge(1, 0), 15, 0).is_err());
        assert!(LevinProblem::new(sys.clone(), rational_runge(1, 0), 0, 0).is_err());
        assert!(LevinProblem::new(sys.clone(), rational_runge(1, 0), 16, 1).is_err());
        assert!(LevinProblem::new(sys.clone(), rational_runge(2, 0), 16, 0).is_err());
        let cubic = make_exponential(&Polynomial::from_real(&[0.0, 1.0, 0.0, 0.1]), 100.0).unwrap();
        assert!(LevinProblem::new(cubic.clone(), rational_runge(1, 0), 2, 0).is_err());
        assert!(LevinProblem::new(cubic, rational_runge(1, 0), 4, 0).is_ok());
    }

    #[test]
    fn engine_is_reusable_across_amplitudes_and_s() {
        let sys = linear(100.0);
        let engine = FastLevin::new(&sys, 24).unwrap();
        assert_eq!(engine.null_vectors().len(), 2);
        assert_eq!(engine.bordering_matrix().rows(), 2);
        for s in 0..3 {
            let f = rational_runge(1, s);
            let a = boundary_value(&sys, &engine.solve_coeffs(&f, s).unwrap());
            let b = fast_solve(&LevinProblem::new(sys.clone(), f, 24, s).unwrap(), tier_path_for(s)).unwrap();
            assert_eq!(a, b.value);
        }
    }

    fn tier_path_for(s: usize) -> SolverPath {
        if s == 0 {
            SolverPath::ScalarS0
        } else {
            SolverPath::ScalarS
        }
    }
}
