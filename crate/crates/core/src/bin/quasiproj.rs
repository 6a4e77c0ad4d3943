use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use quasiproj::conditions::{check_conditions, CheckOptions};
use quasiproj::harness::{catalog, emit, reconstruct, run_experiment, ExperimentConfig, Format};
use quasiproj::lattice::mat_vec;
use quasiproj::Error;

#[derive(Parser)]
#[command(name = "quasiproj", version, about = "Quasi-projection operator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural conditions of the configured (φ, φ̃) pair.
    Check { config: PathBuf },
    /// Evaluate Q_j f at one point.
    Approximate {
        config: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        /// Level j (defaults to experiment.j_min).
        #[arg(long)]
        level: Option<i32>,
        /// Half-width of the index window around −M^j x.
        #[arg(long, default_value_t = 32)]
        window: i64,
    },
    /// Error, modulus and best-approximation tables over j_min..=j_max.
    Rates {
        config: PathBuf,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reconstruction check for band-limited input.
    Reconstruct {
        config: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// List the names accepted in configuration files.
    Catalog,
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("QUASIPROJ_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::InvalidParams(format!("QUASIPROJ_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Error::InvalidParams("QUASIPROJ_THREADS must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    configure_threads()?;
    match cli.command {
        Command::Catalog => {
            for (section, names) in catalog() {
                println!("{section}: {}", names.join(", "));
            }
        }
        Command::Check { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let op = cfg.operator_spec()?;
            let report = check_conditions(&op.generator, &op.analyzer, &CheckOptions::default())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Approximate { config, x, level, window } => {
            let cfg = ExperimentConfig::load(&config)?;
            let mut op = cfg.operator_spec()?;
            if let Some(j) = level {
                op = op.with_level(j)?;
            }
            let f = cfg.test_function()?;
            if x.len() != op.dim() {
                return Err(Error::DimensionMismatch {
                    expected: op.dim(),
                    got: x.len(),
                });
            }
            let y = mat_vec(&op.dilation.power(op.level), &x);
            let reach = y.iter().fold(0.0f64, |a, t| a.max(t.abs())).ceil() as i64;
            let sum = op.evaluate_spatial(&f, &x, reach + window)?;
            let exact = f.eval(&x);
            let out = json!({
                "x": x,
                "j": op.level,
                "value": [sum.value.re, sum.value.im],
                "f": [exact.re, exact.im],
                "tail_bound": sum.tail_bound,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Rates { config, format, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = run_experiment(&cfg)?;
            let fmt = Format::parse(format.as_deref().unwrap_or(&cfg.output.format))?;
            match output.or_else(|| cfg.output.path.as_ref().map(PathBuf::from)) {
                Some(path) => emit(&report, fmt, &path)?,
                None => print!("{}", report.render(fmt)),
            }
        }
        Command::Reconstruct { config, delta } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if delta.is_some() {
                cfg.experiment.delta = delta;
            }
            let report = reconstruct(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::HypothesisViolated(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
