mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::io::{read_text, CliError, CliResult};

/// Rates, rate regions and finite-blocklength checks for compressing
/// pure-state sources with encoder side information.
#[derive(Parser, Debug)]
#[command(name = "qcompress", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by all commands. Precedence: flag, then environment
/// variable, then `--config` file, then built-in default.
#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON file with default settings (unknown keys are rejected).
    #[arg(long, global = true, env = "QCOMPRESS_CONFIG")]
    config: Option<PathBuf>,
    /// Orthogonality tolerance for the decomposition.
    #[arg(long, global = true, env = "QCOMPRESS_TOL")]
    tol: Option<f64>,
    /// Cap on |A|^n for the simulator.
    #[arg(long, global = true, env = "QCOMPRESS_MAX_CODE_DIM")]
    max_code_dim: Option<usize>,
    /// Cap on the number of enumerated sequences |X|^n.
    #[arg(long, global = true, env = "QCOMPRESS_MAX_SEQUENCES")]
    max_sequences: Option<usize>,
    /// Seed for randomized searches.
    #[arg(long, global = true, env = "QCOMPRESS_SEED")]
    seed: Option<u64>,
}

/// Contents of a `--config` file.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    tol: Option<f64>,
    max_code_dim: Option<usize>,
    max_sequences: Option<usize>,
    seed: Option<u64>,
}

/// Resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub tol: f64,
    pub caps: qcompress::schumacher::SimCaps,
    pub seed: u64,
}

impl GlobalArgs {
    fn resolve(&self) -> CliResult<Settings> {
        let file = match &self.config {
            Some(path) => serde_json::from_str::<RunConfig>(&read_text(path)?)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
            None => RunConfig::default(),
        };
        let defaults = qcompress::schumacher::SimCaps::default();
        let tol = self.tol.or(file.tol).unwrap_or(qcompress::decomposition::DEFAULT_ORTHO_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Domain(format!("--tol {tol} must lie in (0, 1)")));
        }
        Ok(Settings {
            tol,
            caps: qcompress::schumacher::SimCaps {
                max_code_dim: self.max_code_dim.or(file.max_code_dim).unwrap_or(defaults.max_code_dim),
                max_sequences: self.max_sequences.or(file.max_sequences).unwrap_or(defaults.max_sequences),
            },
            seed: self.seed.or(file.seed).unwrap_or(0),
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an ensemble file; prints one line per problem.
    Validate { input: PathBuf },
    /// Split an ensemble into irreducible components.
    Decompose {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy profile and optimal rates.
    Rates {
        input: PathBuf,
        /// Apply a CNOT (control A, target C) to every state first.
        #[arg(long, conflicts_with = "pre_unitary")]
        apply_cnot: bool,
        /// Apply a unitary on A⊗C (JSON rows of [re, im]) to every state first.
        #[arg(long)]
        pre_unitary: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary of the (E,Q) or (C,E) rate region as CSV, plus its JSON spec.
    Region {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: RegionKind,
        #[arg(long, allow_hyphen_values = true)]
        x_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x_max: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        y_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        y_max: Option<f64>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Also allow negative entanglement (EQ only).
        #[arg(long)]
        allow_negative_e: bool,
        /// Write region.csv and region.json here instead of printing the CSV.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Finite-blocklength Schumacher fidelity curve (blind sources).
    Simulate {
        input: PathBuf,
        /// Blocklengths, comma separated.
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Rate Q in qubits per copy.
        #[arg(long, conflicts_with = "rate_offset", required_unless_present = "rate_offset")]
        rate: Option<f64>,
        /// Rate relative to S(A).
        #[arg(long, allow_hyphen_values = true)]
        rate_offset: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bounds on I_ε along a grid of ε.
    Iepsilon {
        input: PathBuf,
        /// ε values, comma separated and ascending.
        #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1,0.2")]
        eps: Vec<f64>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Environment dimension |W| (default min(|A|²|C|², --env-cap)).
        #[arg(long)]
        env_dim: Option<usize>,
        #[arg(long)]
        env_cap: Option<usize>,
        #[arg(long)]
        penalty: Option<f64>,
        /// Also spot-check the two-fold product at ε = 0.
        #[arg(long)]
        product_check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Eq,
    Ce,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn run(cli: Cli) -> CliResult<()> {
    let settings = cli.global.resolve()?;
    match cli.command {
        Command::Validate { input } => commands::validate(&input),
        Command::Decompose { input, out } => commands::decompose(&input, out.as_deref(), &settings),
        Command::Rates {
            input,
            apply_cnot,
            pre_unitary,
            out,
        } => commands::rates(&input, apply_cnot, pre_unitary.as_deref(), out.as_deref(), &settings),
        Command::Region {
            input,
            kind,
            x_min,
            x_max,
            y_min,
            y_max,
            samples,
            allow_negative_e,
            out_dir,
        } => commands::region(
            &input,
            commands::RegionArgs {
                kind,
                x: (x_min, x_max),
                y: (y_min, y_max),
                samples,
                allow_negative_e,
            },
            out_dir.as_deref(),
            &settings,
        ),
        Command::Simulate {
            input,
            n,
            rate,
            rate_offset,
            format,
            out,
        } => commands::simulate(&input, &n, rate, rate_offset, format, out.as_deref(), &settings),
        Command::Iepsilon {
            input,
            eps,
            restarts,
            max_iters,
            env_dim,
            env_cap,
            penalty,
            product_check,
            out,
        } => {
            let defaults = qcompress::iepsilon::IsometrySearchConfig::default();
            let cfg = qcompress::iepsilon::IsometrySearchConfig {
                env_dim,
                env_cap: env_cap.unwrap_or(defaults.env_cap),
                restarts: restarts.unwrap_or(defaults.restarts),
                max_iters: max_iters.unwrap_or(defaults.max_iters),
                penalty: penalty.unwrap_or(defaults.penalty),
                seed: settings.seed,
                ..defaults
            };
            commands::iepsilon(&input, &eps, &cfg, product_check, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
