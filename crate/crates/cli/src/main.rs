//! `ceo-bounds`: evaluate remote/CEO rate-distortion bounds, check rate
//! vectors against the region, and sweep the analog-vs-digital sensor
//! network, emitting CSV or JSON tables.

mod commands;
mod config;
mod rows;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::Ctx;
use config::FileConfig;

/// Failure classes mapped to exit codes: configuration errors exit 2,
/// numerical failures exit 4. A run whose rows are all domain-invalid
/// exits 3 after writing its output.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "ceo-bounds",
    about = "Rate-distortion bounds for remote source coding under Gaussian observation noise",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Declarative TOML configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed for every randomized component.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Display rates in bits instead of nats (storage stays in nats).
    #[arg(long, global = true)]
    bits: bool,

    /// Print the formula identifier and checked domain condition per row.
    #[arg(long, global = true)]
    explain: bool,

    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Agent counts, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    m: Option<Vec<usize>>,

    /// Distortion grid, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    d: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy, entropy power, and Fisher information over a smoothing grid.
    Entropy {
        /// Smoothing variances, comma separated.
        #[arg(long, value_delimiter = ',')]
        s: Option<Vec<f64>>,
    },
    /// Single-encoder bounds over the distortion grid.
    RemoteBounds,
    /// Sum-rate bounds over the (m, d) grid.
    CeoBounds,
    /// Classify a rate vector against the outer and inner bounds.
    RegionCheck {
        /// Per-agent rates in nats, comma separated.
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
    },
    /// Distributed-vs-centralized rate-loss bound over (m, alpha).
    RateLoss {
        /// Distortion multipliers, comma separated.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
    },
    /// Upper-lower gap against the gap bounds, distortion scaling as d/m.
    GapSweep,
    /// Analog amplify-and-forward vs the digital floor across agent counts.
    JsccSweep,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let seed = cli.seed.or(file.output.seed).unwrap_or(0);
    let format = cli.format.unwrap_or_else(|| {
        match file.output.format.as_deref() {
            Some("json") => Format::Json,
            _ => Format::Csv,
        }
    });
    if let Some(name) = file.output.format.as_deref() {
        if name != "csv" && name != "json" {
            return Err(CliError::Config(format!("[output] unknown format '{name}'")));
        }
    }
    let out_path = cli.out.clone().or_else(|| file.output.path.clone());
    let bits = cli.bits || file.output.bits.unwrap_or(false);

    let ctx = Ctx {
        ncfg: file.numeric_config(),
        ocfg: file.optimizer_config(seed),
        seed,
        bits,
        d_grid: cli.d.clone().or_else(|| file.grid.d.clone()).unwrap_or_default(),
        m_grid: cli.m.clone().or_else(|| file.grid.m.clone()).unwrap_or_default(),
        s_grid: file.grid.s.clone().unwrap_or_else(|| vec![0.0]),
        alpha_grid: file.grid.alpha.clone().unwrap_or_else(|| vec![2.0]),
        samples: cli
            .samples
            .or(file.output.samples)
            .unwrap_or(100_000),
        file,
    };

    let table = match &cli.command {
        Command::Entropy { s } => {
            let mut ctx = ctx;
            if let Some(s) = s {
                ctx.s_grid = s.clone();
            }
            commands::entropy(&ctx)?
        }
        Command::RemoteBounds => commands::remote_bounds(&ctx)?,
        Command::CeoBounds => commands::ceo_bounds(&ctx)?,
        Command::RegionCheck { rates } => commands::region_check_cmd(&ctx, rates.as_deref())?,
        Command::RateLoss { alpha } => commands::rate_loss(&ctx, alpha.as_deref())?,
        Command::GapSweep => commands::gap_sweep(&ctx)?,
        Command::JsccSweep => commands::jscc_sweep(&ctx)?,
    };

    if cli.explain {
        for line in table.explain_lines() {
            eprintln!("{line}");
        }
    }

    let rendered = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &out_path {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }

    if table.all_invalid() {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
