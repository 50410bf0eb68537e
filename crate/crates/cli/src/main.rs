mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{CheckTarget, DimRow, PageRequest};
use ffcomm::ensemble::{EnsembleKind, EnsembleSpec};
use ffcomm::moments::Method;
use ffcomm::Error;
use output::Table;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "ffcomm",
    version,
    about = "Numerical lab for k-commutants of free-fermion unitary ensembles"
)]
struct Cli {
    /// Flat key=value file mirroring the flags; flags on the command line win
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads for Monte Carlo sampling (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Commutant dimensions from the closed forms, optionally checked by ED
    Dims(DimsArgs),
    /// Averaged k-purity E_k(ell) by oracle, coherent-mc, exact-k2 or saddle
    PageCurve(PageArgs),
    /// Invariant check suites
    Check(CheckArgs),
    /// Export an orthonormal kernel basis of the effective Hamiltonian
    Kernel(KernelArgs),
    /// Saddle-point rate function on a grid of cut fractions
    Rate(RateArgs),
    /// Distance between the exact k=2 rate and finite-L exact purities
    Convergence(ConvergenceArgs),
    /// Coherent-state Monte Carlo projector against the exact projector
    Projector(ProjectorArgs),
}

#[derive(Args, Debug)]
struct DimsArgs {
    #[arg(long)]
    ensemble: String,
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long = "L", value_delimiter = ',', required = true)]
    l: Vec<usize>,
    #[arg(long = "N", default_value_t = 1)]
    n: usize,
    /// Also run exact diagonalization and compare
    #[arg(long)]
    verify_ed: bool,
}

#[derive(Args, Debug)]
struct PageArgs {
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long = "L")]
    l: Option<usize>,
    /// Cut positions; all 0..=L when omitted
    #[arg(long, value_delimiter = ',')]
    ell: Vec<usize>,
    /// Cut fractions (saddle only)
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, env = "FFC_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Suites to run; all when omitted
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "L")]
    l: Option<usize>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    ensemble: String,
    #[arg(long)]
    k: usize,
    #[arg(long = "L")]
    l: usize,
    #[arg(long = "N", default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct RateArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<f64>,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long = "L", value_delimiter = ',', required = true)]
    l: Vec<usize>,
}

#[derive(Args, Debug)]
struct ProjectorArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long = "L", default_value_t = 2)]
    l: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, env = "FFC_SEED", default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Range(_) => 2,
        Error::Resource(_) => 3,
        _ => 1,
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn render(cli: &Cli, name: &str, t: &Table) -> String {
    match cli.format {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(name),
    }
}

/// Runs the command; Ok(false) means a check or comparison failed.
fn run(cli: &Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Dims(a) => {
            let kind = EnsembleKind::parse(&a.ensemble)?;
            let mut rows = Vec::new();
            for &k in &a.k {
                for &l in &a.l {
                    rows.push(DimRow {
                        ensemble: kind,
                        n_flavors: a.n,
                        k,
                        l,
                    });
                }
            }
            let (t, ok) = commands::dims(&rows, a.verify_ed)?;
            emit(cli, &render(cli, "dims", &t))?;
            Ok(ok)
        }
        Command::PageCurve(a) => {
            let req = PageRequest {
                method: Method::parse(&a.method)?,
                k: a.k,
                l: a.l,
                ells: a.ell.clone(),
                rs: a.r.clone(),
                samples: a.samples,
                seed: a.seed,
            };
            let t = commands::page_curve(&req)?;
            emit(cli, &render(cli, "page-curve", &t))?;
            Ok(true)
        }
        Command::Check(a) => {
            let suites = if a.suite.is_empty() {
                commands::SUITES.to_vec()
            } else {
                a.suite
                    .iter()
                    .map(|s| commands::suite_name(s))
                    .collect::<ffcomm::Result<Vec<_>>>()?
            };
            let ensemble = a.ensemble.as_deref().map(EnsembleKind::parse).transpose()?;
            let (t, ok) = commands::check(
                &suites,
                &CheckTarget {
                    ensemble,
                    k: a.k,
                    l: a.l,
                },
            )?;
            emit(cli, &render(cli, "check", &t))?;
            if !ok {
                for r in &t.rows {
                    if r.last() == Some(&output::Cell::Text("FAIL".into())) {
                        eprintln!("check failed: {:?} {:?}", r[0], r[1]);
                    }
                }
            }
            Ok(ok)
        }
        Command::Kernel(a) => {
            let ens = EnsembleSpec::chain(EnsembleKind::parse(&a.ensemble)?, a.n, a.l)?;
            let text = match cli.format {
                Format::Csv => commands::kernel_csv(&ens, a.k, a.l)?,
                Format::Json => commands::kernel_json(&ens, a.k, a.l)?,
            };
            emit(cli, &text)?;
            Ok(true)
        }
        Command::Rate(a) => {
            let t = commands::rate_grid(a.k, &a.r)?;
            emit(cli, &render(cli, "rate", &t))?;
            Ok(true)
        }
        Command::Convergence(a) => {
            let (t, decreasing) = commands::convergence(a.r, &a.l)?;
            emit(cli, &render(cli, "convergence", &t))?;
            if !decreasing {
                eprintln!("convergence: delta is not decreasing in L");
            }
            Ok(decreasing)
        }
        Command::Projector(a) => {
            let t = commands::projector(a.k, a.l, a.samples, a.seed)?;
            emit(cli, &render(cli, "projector", &t))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
