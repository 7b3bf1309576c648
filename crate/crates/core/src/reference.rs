//! Reference solutions: the collocation system solved densely, and
//! Clenshaw-Curtis quadrature of the full oscillatory integrand.
//!
//! Nothing here shares code with the fast path beyond the grid and the
//! dense LU. Chebyshev values and derivatives come from the three-term
//! recurrence, and the equations use `G = (r G) / r` directly.

use crate::amplitude::{binomial, factorial, AmplitudeSpec};
use crate::cheb::{ChebCoeffVector, ClenshawCurtisGrid};
use crate::dct::Dct1Plan;
use crate::dense::{DenseLU, DenseMatrix};
use crate::error::{invalid, Error, Result};
use crate::levin::{boundary_value, collocation_residual, LevinProblem, QuadratureResult, SolverPath, RESIDUAL_FLAG};
use crate::oscillator::OscillatorSystem;
use num_complex::Complex64;
use std::time::Instant;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest dense system `dense_levin_solve` will assemble.
pub const DENSE_MAX: usize = 20000;

pub const DEFAULT_ORACLE_POINTS: usize = 1_000_000;
pub const ORACLE_POINTS_ENV: &str = "OSCILLQUAD_ORACLE_POINTS";

/// `T_n^{(q)}(x)` for `n < len`, `q = 0..=max_q`, from
/// `T_{n+1}^{(q)} = 2 x T_n^{(q)} + 2 q T_n^{(q-1)} - T_{n-1}^{(q)}`.
/// Indexed `[q][n]`.
pub fn cheb_derivative_table(x: f64, len: usize, max_q: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; len]; max_q + 1];
    for q in 0..=max_q {
        for n in 0..len {
            t[q][n] = match n {
                0 => {
                    if q == 0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                1 => match q {
                    0 => x,
                    1 => 1.0,
                    _ => 0.0,
                },
                _ => {
                    let lower = if q > 0 { 2.0 * q as f64 * t[q - 1][n - 1] } else { 0.0 };
                    2.0 * x * t[q][n - 1] + lower - t[q][n - 2]
                }
            };
        }
    }
    t
}

/// The literal collocation system: rows per equation component `i` are the
/// `nu + 2` point conditions, then `l = 1..=s` at `+1`, then at `-1`.
/// Columns are component-major, `k * (nu + 2s + 2) + n`.
pub fn assemble_dense_system(problem: &LevinProblem) -> Result<(DenseMatrix, Vec<Complex64>)> {
    problem.validate()?;
    let sys = &problem.sys;
    let f = &problem.f;
    let (m, nu, s) = (sys.dim(), problem.nu, problem.s);
    let nb = problem.basis_len();
    let size = m * nb;
    if size > DENSE_MAX {
        return invalid(format!("dense system of size {size} exceeds the limit {DENSE_MAX}"));
    }
    let grid = ClenshawCurtisGrid::new(nu)?;
    let mut a = DenseMatrix::zeros(size, size);
    let mut rhs = vec![ZERO; size];

    for (mi, &x) in grid.points().iter().enumerate() {
        let t = cheb_derivative_table(x, nb, 1);
        let rx = sys.r().eval(x);
        for i in 0..m {
            let row = i * nb + mi;
            for k in 0..m {
                let g = sys.rg()[k][i].eval(x) / rx;
                for n in 0..nb {
                    let mut v = g * t[0][n];
                    if k == i {
                        v += t[1][n];
                    }
                    a[(row, k * nb + n)] = v;
                }
            }
            rhs[row] = f.eval(i, x);
        }
    }

    for (block, sign) in [(0usize, 1.0), (1, -1.0)] {
        if s == 0 {
            break;
        }
        let t = cheb_derivative_table(sign, nb, s + 1);
        let g = sys.g_taylor(sign, s);
        for i in 0..m {
            for l in 1..=s {
                let row = i * nb + nu + 2 + block * s + l - 1;
                for k in 0..m {
                    for n in 0..nb {
                        let mut v = if k == i { Complex64::new(t[l + 1][n], 0.0) } else { ZERO };
                        for q in 0..=l {
                            v += g[k][i][l - q] * (factorial(l - q) * binomial(l, q) * t[q][n]);
                        }
                        a[(row, k * nb + n)] = v;
                    }
                }
                rhs[row] = f
                    .endpoint_derivative(i, l, sign)
                    .ok_or_else(|| Error::InvalidArgument("missing derivative of f".into()))?;
            }
        }
    }
    Ok((a, rhs))
}

/// Solves the collocation system by dense LU with partial pivoting.
pub fn dense_levin_solve(problem: &LevinProblem) -> Result<QuadratureResult> {
    let start = Instant::now();
    let (a, rhs) = assemble_dense_system(problem)?;
    let x = DenseLU::factor_with_tolerance(&a, 0.0)
        .and_then(|lu| lu.solve(&rhs))
        .map_err(|e| Error::Unsolvable(e.to_string()))?;
    let nb = problem.basis_len();
    let coeffs: Vec<ChebCoeffVector> = x.chunks(nb).map(|c| ChebCoeffVector::new(c.to_vec())).collect();
    let value = boundary_value(&problem.sys, &coeffs);
    let wall_time = start.elapsed().as_secs_f64();
    let residual = collocation_residual(&problem.sys, &problem.f, &coeffs, problem.nu)?;
    Ok(QuadratureResult {
        value,
        coeffs,
        residual,
        residual_flagged: !(residual <= RESIDUAL_FLAG),
        path: SolverPath::Dense,
        nu: problem.nu,
        s: problem.s,
        wall_time,
    })
}

/// Clenshaw-Curtis quadrature on `n_points + 1` nodes `cos(k pi / n)`.
pub fn cc_oracle<F>(integrand: F, n_points: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if n_points < 8 || n_points % 2 != 0 {
        return invalid(format!("oracle needs an even node count >= 8, got {n_points}"));
    }
    let n = n_points;
    let mut vals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        // cos(k pi / n) written as a sine for accuracy near the ends.
        let x = (std::f64::consts::PI * (n as f64 - 2.0 * k as f64) / (2.0 * n as f64)).sin();
        vals.push(integrand(x)?);
    }
    let plan = Dct1Plan::new(n + 1)?;
    let mut c = plan.inverse(&vals)?;
    c[0] *= 0.5;
    c[n] *= 0.5;
    // int T_k = 2 / (1 - k^2) for even k, 0 for odd k.
    Ok(c.iter()
        .enumerate()
        .step_by(2)
        .map(|(k, &ck)| ck * (2.0 / (1.0 - (k * k) as f64)))
        .sum())
}

/// `int <f, w> dx` by [`cc_oracle`], for systems with known interior weights.
pub fn oracle_integral(sys: &OscillatorSystem, f: &AmplitudeSpec, n_points: usize) -> Result<Complex64> {
    if sys.weight(0.0).is_none() {
        return Err(Error::UnsupportedOscillator(
            "interior weights unknown for a custom system".into(),
        ));
    }
    cc_oracle(
        |x| {
            let w = sys.weight(x).expect("family has weights")?;
            Ok((0..sys.dim()).map(|i| f.eval(i, x) * w[i]).sum())
        },
        n_points,
    )
}

/// Node count from `OSCILLQUAD_ORACLE_POINTS`, or the default.
pub fn oracle_points_from_env() -> Result<usize> {
    match std::env::var(ORACLE_POINTS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{ORACLE_POINTS_ENV} must be an integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_ORACLE_POINTS),
    }
}
