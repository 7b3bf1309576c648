mod commands;
mod config;
mod format;

use clap::{Parser, Subcommand};
use commands::{Method, Table};
use config::RunConfig;
use oscillquad::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Levin-Clenshaw-Curtis quadrature experiments. Every command reads a JSON
/// run configuration and writes CSV.
#[derive(Parser)]
#[command(name = "oscillquad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args)]
struct Opts {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (a directory for plotdata). Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    method: Option<Method>,
    /// Timing repeats; the median is reported.
    #[arg(long, global = true, default_value_t = 5)]
    repeats: usize,
    /// Worker threads for sweeps that do not measure time.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,
}

#[derive(Subcommand)]
enum Command {
    /// One quadrature: method,omega,nu,s,value_re,value_im,residual,wall_seconds
    Quad,
    /// Error against the oracle over omega_grid: omega,nu,abs_error
    SweepOmega,
    /// Error and timings over nu_grid: nu,abs_error,wall_seconds_fast,wall_seconds_dense
    SweepNu,
    /// Median timings over nu_grid: nu,method,wall_seconds
    Bench,
    /// Condition estimates over nu_grid: nu,cond_full,cond_banded,cond_border
    Condition,
    /// Per-figure CSV files written into the --out directory
    Plotdata,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::Domain(_)
        | Error::PoleInInterval(_)
        | Error::UnsupportedOscillator(_) => 2,
        Error::SingularMatrix { .. }
        | Error::UnsupportedRegime(_)
        | Error::FallbackNeeded(_)
        | Error::Unsolvable(_) => 3,
    }
}

fn emit(table: &Table, out: Option<&PathBuf>) -> oscillquad::Result<()> {
    match out {
        Some(path) => table.write_file(path),
        None => table.write_to(std::io::stdout().lock()),
    }
}

fn run(cli: Cli) -> oscillquad::Result<()> {
    let opts = cli.opts;
    let path = opts.config.ok_or_else(|| Error::Config("--config is required".into()))?;
    let cfg = RunConfig::load(&path)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.parallel.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let method = opts.method.unwrap_or(Method::Fast);
    let out = opts.out.as_ref();
    pool.install(|| match cli.command {
        Command::Quad => emit(&commands::quad(&cfg, method)?, out),
        Command::SweepOmega => emit(&commands::sweep_omega(&cfg, method, cfg.nu)?, out),
        Command::SweepNu => emit(&commands::sweep_nu(&cfg, opts.repeats)?, out),
        Command::Bench => emit(&commands::bench(&cfg, opts.method, opts.repeats)?, out),
        Command::Condition => emit(&commands::condition(&cfg)?, out),
        Command::Plotdata => {
            let dir = out.ok_or_else(|| Error::Config("plotdata needs --out <directory>".into()))?;
            for f in commands::plotdata(&cfg, dir, opts.repeats)? {
                eprintln!("wrote {f}");
            }
            Ok(())
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
