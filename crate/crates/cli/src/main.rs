use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mrd_core::reliability::Column;
use mrd_core::{classify, corpus, mc, reliability, solve, DemandDistribution, DistributionSpec, Error, NumericConfig};

#[derive(Parser)]
#[command(name = "mrd", version, about = "Mean residual demand, elasticity and optimal pricing")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override a numeric setting, e.g. `--set quad_rel_tol=1e-10`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Number of grid points; shorthand for `--set grid_points=N`.
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,
    /// Seed for Monte Carlo checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample count for Monte Carlo checks.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the distribution and estimate its tail limits.
    Analyze { spec: PathBuf },
    /// Solve for the revenue-maximizing price.
    Price { spec: PathBuf },
    /// Evaluate m, l, h, g, eps and R on a grid as CSV.
    Curve {
        spec: PathBuf,
        /// Comma-separated subset of m,l,h,g,eps,R. Defaults to every
        /// function the distribution supports.
        #[arg(long, value_delimiter = ',')]
        functions: Vec<String>,
    },
    /// Compare analytic revenue with Monte Carlo estimates, one JSON line per price.
    Validate {
        spec: PathBuf,
        /// Prices to check. Defaults to the 0.1, 0.3, 0.5, 0.7 and 0.9 quantiles.
        #[arg(long, value_delimiter = ',')]
        prices: Vec<f64>,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
    NoMaximizer,
    ChecksFailed(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::MissingDensity(_)) => 5,
            Failure::Lib(e) if e.is_input_error() => 2,
            Failure::Io(_) => 2,
            Failure::Lib(_) => 3,
            Failure::NoMaximizer => 4,
            Failure::ChecksFailed(_) => 6,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(m) => m.clone(),
            Failure::NoMaximizer => "no-finite-maximizer".into(),
            Failure::ChecksFailed(k) => format!("{k} check(s) failed"),
        }
    }
}

fn config(global: &Global) -> Result<NumericConfig, Failure> {
    let mut cfg = NumericConfig::default();
    for kv in &global.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v)?;
    }
    if global.n < mc::MIN_SAMPLES {
        return Err(Error::Config(format!("--n must be at least {}, got {}", mc::MIN_SAMPLES, global.n)).into());
    }
    if let Some(n) = global.grid {
        cfg.set("grid_points", &n.to_string())?;
    }
    Ok(cfg)
}

fn load(path: &Path) -> Result<DemandDistribution, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(DistributionSpec::from_json(&text)?.build()?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = config(&cli.global)?;
    let out = cli.global.out.as_deref();
    match &cli.command {
        Command::Analyze { spec } => {
            let report = classify(&load(spec)?, &cfg)?;
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            emit(out, &report.to_json())
        }
        Command::Price { spec } => {
            let solution = solve(&load(spec)?, &cfg)?;
            emit(out, &solution.to_json())?;
            if solution.has_finite_maximizer() {
                Ok(())
            } else {
                Err(Failure::NoMaximizer)
            }
        }
        Command::Curve { spec, functions } => {
            let dist = load(spec)?;
            let columns = if functions.is_empty() {
                Column::ALL.iter().copied().filter(|c| dist.has_density() || !c.needs_density()).collect()
            } else {
                functions.iter().map(|f| f.parse()).collect::<Result<Vec<Column>, Error>>()?
            };
            if !dist.has_density() {
                if let Some(c) = columns.iter().find(|c| c.needs_density()) {
                    return Err(Error::MissingDensity(format!("{} (requested {})", dist.label(), c.header())).into());
                }
            }
            let curves = reliability::curves(&dist, &cfg)?;
            emit(out, &curves.to_csv(&columns)?)
        }
        Command::Validate { spec, prices } => {
            let dist = load(spec)?;
            let prices = if prices.is_empty() { corpus::probe_prices(&dist)? } else { prices.clone() };
            let mut lines = String::new();
            let mut failed = 0;
            for p in prices {
                let check = mc::validate_revenue(&dist, p, cli.global.n, cli.global.seed)?;
                failed += usize::from(!check.pass);
                lines.push_str(&check.to_json_line());
                lines.push('\n');
            }
            emit(out, &lines)?;
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::ChecksFailed(failed))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mrd: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
