//! Experiment runner: loads a declarative JSON config, runs the requested
//! dataset, and writes CSV or JSON. Re-running an identical config yields
//! a byte-identical artifact.

mod commands;
mod config;
mod output;
mod validate;

use clap::Parser;
use config::{Command, ConfigError, ExperimentConfig, OutputFormat};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "txcorr",
    about = "Correlated-fading MIMO broadcast capacity experiments",
    version
)]
struct Cli {
    /// Experiment config file (single flat JSON document).
    #[arg(long)]
    config: PathBuf,
    /// Output file, overriding the config's output_path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed, overriding the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap (default: TXCORR_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output format, overriding the config's format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(RunError::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(RunError::Numeric(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(RunError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

enum RunError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<txcorr::Error> for RunError {
    fn from(e: txcorr::Error) -> Self {
        RunError::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

fn run(cli: Cli) -> Result<ExitCode, RunError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    let out_path: Option<PathBuf> = cli
        .out
        .clone()
        .or_else(|| cfg.output_path.as_ref().map(PathBuf::from));

    let threads = cli.threads.or_else(|| {
        std::env::var("TXCORR_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if n == 0 {
            return Err(RunError::Config("thread cap must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
    }

    let started = Instant::now();

    if matches!(cfg.command, Command::Validate) {
        let _: config::ValidateParams = cfg.params()?;
        let (passed, failed) = validate::run_validation();
        println!(
            "validate: {passed} passed, {failed} failed in {:.2}s",
            started.elapsed().as_secs_f64()
        );
        return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }

    if matches!(cfg.command, Command::Covariance) {
        let params: config::CovarianceParams = cfg.params()?;
        let path = out_path
            .ok_or_else(|| RunError::Config("no output path (config output_path or --out)".into()))?;
        let (text, rows) = match commands::run_covariance(&params, cfg.format)? {
            commands::CovarianceOutput::Json(s) => (s, params.m),
            commands::CovarianceOutput::Table(t) => {
                let rows = t.rows.len();
                (t.render(OutputFormat::Csv), rows)
            }
        };
        std::fs::write(&path, text)?;
        println!(
            "wrote {rows} rows to {} in {:.2}s (nonconverged: 0)",
            path.display(),
            started.elapsed().as_secs_f64()
        );
        return Ok(ExitCode::SUCCESS);
    }

    let out = match cfg.command {
        Command::Figure1 => commands::run_figure1(&cfg.params()?)?,
        Command::Figure3 => commands::run_figure3(&cfg.params()?)?,
        Command::Figure4 => commands::run_figure4(&cfg.params()?, cfg.seed)?,
        Command::Figure5 => commands::run_figure5(&cfg.params()?).map_err(classify_boxed)?,
        Command::Figure6 => commands::run_figure6(&cfg.params()?).map_err(classify_boxed)?,
        Command::Figure7 => commands::run_figure7(&cfg.params()?, cfg.seed)?,
        Command::Bounds => commands::run_bounds(&cfg.params()?)?,
        Command::Covariance | Command::Validate => unreachable!(),
    };

    let path = out_path
        .ok_or_else(|| RunError::Config("no output path (config output_path or --out)".into()))?;
    std::fs::write(&path, out.table.render(cfg.format))?;
    println!(
        "wrote {} rows to {} in {:.2}s (nonconverged: {})",
        out.table.rows.len(),
        path.display(),
        started.elapsed().as_secs_f64(),
        out.nonconverged
    );
    Ok(ExitCode::SUCCESS)
}

fn classify_boxed(e: Box<dyn std::error::Error>) -> RunError {
    match e.downcast::<ConfigError>() {
        Ok(c) => RunError::Config(c.0),
        Err(e) => RunError::Numeric(e.to_string()),
    }
}
