#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod output;
mod rows;

use output::Format;
use rows::{Failure, ShapeArg};

/// Spectral asymptotics and eigenvalue bounds for the fractional Laplacian.
#[derive(Debug, Parser)]
#[command(name = "fraclap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two-term asymptotic eigenvalues on the interval.
    Asymptotic(AsymptoticArgs),
    /// Lower (and optionally upper) eigenvalue bounds on a cell grid.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Comma-separated exponents, each in (0, 2).
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,

    #[arg(long, default_value_t = 10)]
    n_max: usize,

    #[arg(long, value_enum, default_value_t = FormatArg::Plain)]
    format: FormatArg,

    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads; falls back to FRACLAP_THREADS, then all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct AsymptoticArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: Common,

    #[arg(long, value_enum, default_value_t = ShapeArg::Interval)]
    shape: ShapeArg,

    /// Cell size.
    #[arg(long, conflicts_with = "cells")]
    eps: Option<f64>,

    /// Number of cells on the interval, i.e. eps = 2/N.
    #[arg(long = "N", id = "cells")]
    cells: Option<usize>,

    /// Allow the full-scale grids (N = 5000 on the interval).
    #[arg(long)]
    slow: bool,

    /// Also compute the upper bound for the first eigenvalue.
    #[arg(long)]
    upper: bool,

    /// Off-diagonal tolerance of the eigensolver.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
    Plain,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Markdown => Format::Markdown,
            FormatArg::Plain => Format::Plain,
        }
    }
}

/// Interval grids beyond this many cells need `--slow`.
const DESK_MAX_CELLS: usize = 2000;
/// Planar grids finer than this need `--slow`.
const DESK_MIN_EPS_2D: f64 = 1.0 / 25.0;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in &failures {
                eprintln!("failed: alpha={} n={}: {}", f.alpha, f.n, f.reason);
            }
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Vec<Failure>> {
    let common = match &cli.command {
        Command::Asymptotic(a) => &a.common,
        Command::Bounds(b) => &b.common,
    };
    validate_common(common)?;
    configure_threads(common.threads)?;
    let mut sink: Box<dyn Write> = match &common.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let format = Format::from(common.format);
    let failures = match &cli.command {
        Command::Asymptotic(a) => {
            let (table, failures) = rows::asymptotic(&a.common.alpha, a.common.n_max);
            output::write_asymptotic(&mut sink, &table, format)?;
            failures
        }
        Command::Bounds(b) => {
            let eps = resolve_eps(b)?;
            if b.upper && b.shape == ShapeArg::Square {
                bail!("upper bounds are only available for the interval and the disk");
            }
            if !(b.tol > 0.0) {
                bail!("--tol must be positive");
            }
            let (table, failures) =
                rows::bounds(&b.common.alpha, b.common.n_max, b.shape, eps, b.upper, b.tol);
            output::write_bounds(&mut sink, &table, format)?;
            failures
        }
    };
    sink.flush()?;
    Ok(failures)
}

fn validate_common(c: &Common) -> Result<()> {
    if let Some(&a) = c.alpha.iter().find(|a| !(**a > 0.0 && **a < 2.0)) {
        bail!("alpha must lie in (0, 2), got {a}");
    }
    if c.n_max == 0 {
        bail!("--n-max must be at least 1");
    }
    Ok(())
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var("FRACLAP_THREADS") {
            Ok(v) => Some(v.trim().parse().with_context(|| format!("FRACLAP_THREADS={v:?}"))?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            bail!("thread count must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

/// Cell size from `--eps`/`--N`, defaulting to the desk scale
/// (`N = 1600` on the interval, `ε = 1/25` in the plane) or, with `--slow`,
/// to `N = 5000`.
fn resolve_eps(b: &BoundsArgs) -> Result<f64> {
    let interval = b.shape == ShapeArg::Interval;
    if b.cells.is_some() && !interval {
        bail!("--N applies to the interval only; use --eps");
    }
    let eps = match (b.eps, b.cells) {
        (Some(e), _) => e,
        (None, Some(n)) => {
            if n < 2 {
                bail!("--N must be at least 2");
            }
            2.0 / n as f64
        }
        (None, None) if interval => 2.0 / if b.slow { 5000.0 } else { 1600.0 },
        (None, None) => DESK_MIN_EPS_2D,
    };
    if !(eps > 0.0) || !eps.is_finite() {
        bail!("eps must be positive, got {eps}");
    }
    if !b.slow {
        if interval && 2.0 / eps > DESK_MAX_CELLS as f64 + 0.5 {
            bail!("more than {DESK_MAX_CELLS} cells on the interval needs --slow");
        }
        if !interval && eps < DESK_MIN_EPS_2D * (1.0 - 1e-12) {
            bail!("planar cells smaller than 1/25 need --slow");
        }
    }
    Ok(eps)
}
