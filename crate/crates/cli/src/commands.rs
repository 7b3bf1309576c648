use crate::config::RunConfig;
use crate::format::g17;
use clap::ValueEnum;
use num_complex::Complex64;
use oscillquad::condest::{condition_banded, condition_dense};
use oscillquad::reference::{assemble_dense_system, oracle_points_from_env, DENSE_MAX};
use oscillquad::{
    amplitude_from_name, dense_levin_solve, oracle_integral, quadrature, AmplitudeSpec, Error, FastLevin,
    LevinProblem, OscillatorSystem, QuadratureResult, Result,
};
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Fast,
    Dense,
    Oracle,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Fast => "fast",
            Method::Dense => "dense",
            Method::Oracle => "oracle",
        }
    }
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Config(format!("cannot write CSV: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Config(format!("cannot write CSV: {e}")))
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))?;
        self.write_to(file)
    }
}

fn system_at(cfg: &RunConfig, omega: f64) -> Result<OscillatorSystem> {
    let sys = cfg.oscillator.build()?;
    if omega == sys.omega() {
        Ok(sys)
    } else {
        sys.with_omega(omega)
    }
}

fn amplitude(cfg: &RunConfig, sys: &OscillatorSystem) -> Result<AmplitudeSpec> {
    amplitude_from_name(&cfg.amplitude, sys, cfg.s)
}

fn problem(cfg: &RunConfig, sys: &OscillatorSystem, nu: usize) -> Result<LevinProblem> {
    LevinProblem::new(sys.clone(), amplitude(cfg, sys)?, nu, cfg.s)
}

fn solve(method: Method, p: &LevinProblem) -> Result<QuadratureResult> {
    match method {
        Method::Fast => quadrature(p),
        Method::Dense => dense_levin_solve(p),
        Method::Oracle => Err(Error::Config("oracle is not a collocation solver".into())),
    }
}

fn oracle(sys: &OscillatorSystem, f: &AmplitudeSpec) -> Result<Complex64> {
    oracle_integral(sys, f, oracle_points_from_env()?)
}

fn median_time(repeats: usize, mut run: impl FnMut() -> Result<()>) -> Result<f64> {
    let mut times = Vec::with_capacity(repeats.max(1));
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        run()?;
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(|a, b| a.total_cmp(b));
    Ok(times[times.len() / 2])
}

fn dense_fits(cfg: &RunConfig, sys: &OscillatorSystem, nu: usize) -> bool {
    nu <= cfg.dense_max_nu && sys.dim() * (nu + 2 * cfg.s + 2) <= DENSE_MAX
}

/// `method,omega,nu,s,value_re,value_im,residual,wall_seconds`
pub fn quad(cfg: &RunConfig, method: Method) -> Result<Table> {
    let sys = cfg.oscillator.build()?;
    let p = problem(cfg, &sys, cfg.nu)?;
    let start = Instant::now();
    let (value, residual) = match method {
        Method::Oracle => (oracle(&sys, &p.f)?, String::new()),
        m => {
            let r = solve(m, &p)?;
            (r.value, g17(r.residual))
        }
    };
    let wall = start.elapsed().as_secs_f64();
    let mut t = Table::new(&["method", "omega", "nu", "s", "value_re", "value_im", "residual", "wall_seconds"]);
    t.rows.push(vec![
        method.name().into(),
        g17(sys.omega()),
        cfg.nu.to_string(),
        cfg.s.to_string(),
        g17(value.re),
        g17(value.im),
        residual,
        g17(wall),
    ]);
    Ok(t)
}

/// `omega,nu,abs_error`, errors against the oracle at each frequency.
pub fn sweep_omega(cfg: &RunConfig, method: Method, nu: usize) -> Result<Table> {
    if method == Method::Oracle {
        return Err(Error::Config("sweep-omega compares a solver against the oracle; use fast or dense".into()));
    }
    let omegas = cfg.omegas()?;
    let rows: Vec<Vec<String>> = omegas
        .par_iter()
        .map(|&omega| -> Result<Vec<String>> {
            let sys = system_at(cfg, omega)?;
            let p = problem(cfg, &sys, nu)?;
            let err = (solve(method, &p)?.value - oracle(&sys, &p.f)?).norm();
            Ok(vec![g17(omega), nu.to_string(), g17(err)])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["omega", "nu", "abs_error"]);
    t.rows = rows;
    Ok(t)
}

/// `nu,abs_error,wall_seconds_fast,wall_seconds_dense`. Timings run one
/// after another; dense columns are empty above `dense_max_nu`.
pub fn sweep_nu(cfg: &RunConfig, repeats: usize) -> Result<Table> {
    let nus = cfg.nus()?;
    let sys = cfg.oscillator.build()?;
    let exact = oracle(&sys, &amplitude(cfg, &sys)?)?;
    let mut t = Table::new(&["nu", "abs_error", "wall_seconds_fast", "wall_seconds_dense"]);
    for nu in nus {
        let p = problem(cfg, &sys, nu)?;
        let value = quadrature(&p)?.value;
        let fast = median_time(repeats, || quadrature(&p).map(drop))?;
        let dense = if dense_fits(cfg, &sys, nu) {
            g17(median_time(repeats, || dense_levin_solve(&p).map(drop))?)
        } else {
            String::new()
        };
        t.rows.push(vec![nu.to_string(), g17((value - exact).norm()), g17(fast), dense]);
    }
    Ok(t)
}

/// `nu,method,wall_seconds`, median over `repeats` runs.
pub fn bench(cfg: &RunConfig, method: Option<Method>, repeats: usize) -> Result<Table> {
    let methods = match method {
        None => vec![Method::Fast, Method::Dense],
        Some(Method::Oracle) => return Err(Error::Config("bench times fast and dense solvers only".into())),
        Some(m) => vec![m],
    };
    let nus = cfg.nus()?;
    let sys = cfg.oscillator.build()?;
    let mut t = Table::new(&["nu", "method", "wall_seconds"]);
    for nu in nus {
        let p = problem(cfg, &sys, nu)?;
        for &m in &methods {
            if m == Method::Dense && !dense_fits(cfg, &sys, nu) {
                continue;
            }
            let wall = median_time(repeats, || solve(m, &p).map(drop))?;
            t.rows.push(vec![nu.to_string(), m.name().into(), g17(wall)]);
        }
    }
    Ok(t)
}

/// `nu,cond_full,cond_banded,cond_border`, 1-norm estimates. A singular
/// factorization is reported as `inf`.
pub fn condition(cfg: &RunConfig) -> Result<Table> {
    let nus = cfg.nus()?;
    let sys = cfg.oscillator.build()?;
    let rows: Vec<Vec<String>> = nus
        .par_iter()
        .map(|&nu| -> Result<Vec<String>> {
            let p = LevinProblem::new(sys.clone(), AmplitudeSpec::zero(sys.dim(), 0), nu, 0)?;
            let full = if sys.dim() * (nu + 2) <= DENSE_MAX {
                g17(or_inf(condition_dense(&assemble_dense_system(&p)?.0)))
            } else {
                String::new()
            };
            let (banded, border) = match FastLevin::new(&sys, nu) {
                Ok(engine) => (
                    or_inf(condition_banded(engine.interior_matrix())),
                    or_inf(condition_dense(engine.bordering_matrix())),
                ),
                Err(Error::FallbackNeeded(_)) => (f64::INFINITY, f64::INFINITY),
                Err(e) => return Err(e),
            };
            Ok(vec![nu.to_string(), full, g17(banded), g17(border)])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["nu", "cond_full", "cond_banded", "cond_border"]);
    t.rows = rows;
    Ok(t)
}

fn or_inf(c: Result<f64>) -> f64 {
    c.unwrap_or(f64::INFINITY)
}

/// Writes one CSV per figure into `dir`: errors against frequency for each
/// of `plot_nus` side by side, error and timings against `nu`, and the
/// condition estimates.
pub fn plotdata(cfg: &RunConfig, dir: &Path, repeats: usize) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let omegas = cfg.omegas()?;
    let sweeps: Vec<Table> =
        cfg.plot_nus.iter().map(|&nu| sweep_omega(cfg, Method::Fast, nu)).collect::<Result<_>>()?;
    let headers: Vec<String> = std::iter::once("omega".to_string())
        .chain(cfg.plot_nus.iter().map(|nu| format!("abs_error_nu{nu}")))
        .collect();
    let mut wide = Table::new(&headers);
    for (k, &omega) in omegas.iter().enumerate() {
        let mut row = vec![g17(omega)];
        row.extend(sweeps.iter().map(|t| t.rows[k][2].clone()));
        wide.rows.push(row);
    }
    let files = [
        ("omega_error.csv", wide),
        ("nu_error_time.csv", sweep_nu(cfg, repeats)?),
        ("condition.csv", condition(cfg)?),
    ];
    let mut written = Vec::new();
    for (name, table) in files {
        let path = dir.join(name);
        table.write_file(&path)?;
        written.push(path.display().to_string());
    }
    Ok(written)
}
