//! `popper`: command-line front end to the simulator.
//!
//! Exit status: 0 on success, 1 when an audit or built-in assertion fails
//! (the output is still written), 2 for usage and configuration errors.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] popper_core::Error),
}

#[derive(Parser)]
#[command(name = "popper", version, about = "Entangled two-slit experiment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file, written atomically. Standard output when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Args)]
struct Physics {
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    hbar: Option<String>,
    #[arg(long)]
    mass: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized no-signaling audit; JSON report.
    Nosig {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<String>,
        /// Local dimensions, e.g. `2,3`.
        #[arg(long)]
        dims: Option<String>,
    },
    /// Closed-form and grid spread of Gaussians after time t.
    Spread {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
        #[arg(long)]
        sigmas: Option<String>,
    },
    /// Exact and far-field single-slit densities.
    Diffraction {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        half_range: Option<String>,
    },
    /// Baseline plus narrowed-slit scenarios, one CSV row each.
    Popper {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
        /// Slit narrowing factors, e.g. `2,4,8`.
        #[arg(long)]
        n_list: Option<String>,
        #[arg(long)]
        clicks: Option<String>,
    },
    /// Collett–Loudon prediction against simulated L spread.
    CollettLoudon {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
        #[arg(long)]
        s_r_list: Option<String>,
    },
    /// Marginal spread for sharpening y1+y2 correlations.
    EprLimit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        physics: Physics,
        /// Strictly descending correlation widths.
        #[arg(long)]
        widths: Option<String>,
        #[arg(long)]
        broad_width: Option<String>,
    },
}

fn load(common: Common, physics: Option<Physics>, flags: Vec<(&str, Option<String>)>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    cfg.set_flag("out", "out", common.out);
    cfg.set_flag("seed", "seed", common.seed);
    if let Some(ph) = physics {
        cfg.set_flag("t", "t", ph.t);
        cfg.set_flag("hbar", "hbar", ph.hbar);
        cfg.set_flag("mass", "mass", ph.mass);
    }
    for (key, value) in flags {
        cfg.set_flag(key, &key.replace('_', "-"), value);
    }
    Ok(cfg)
}

type Handler = fn(&RunConfig) -> Result<commands::Produced, CliError>;

fn run(cli: Cli) -> Result<commands::Produced, CliError> {
    let (cfg, cmd): (RunConfig, Handler) = match cli.command {
        Command::Nosig { common, trials, dims } => {
            (load(common, None, vec![("trials", trials), ("dims", dims)])?, commands::nosig)
        }
        Command::Spread { common, physics, sigmas } => {
            (load(common, Some(physics), vec![("sigmas", sigmas)])?, commands::spread)
        }
        Command::Diffraction { common, physics, d, samples, half_range } => (
            load(common, Some(physics), vec![("d", d), ("samples", samples), ("half_range", half_range)])?,
            commands::diffraction,
        ),
        Command::Popper { common, physics, n_list, clicks } => {
            (load(common, Some(physics), vec![("n_list", n_list), ("clicks", clicks)])?, commands::popper)
        }
        Command::CollettLoudon { common, physics, s_r_list } => {
            (load(common, Some(physics), vec![("s_r_list", s_r_list)])?, commands::collett_loudon)
        }
        Command::EprLimit { common, physics, widths, broad_width } => {
            (load(common, Some(physics), vec![("widths", widths), ("broad_width", broad_width)])?, commands::epr_limit)
        }
    };
    let produced = cmd(&cfg)?;
    match commands::out_path(&cfg) {
        Some(path) => popper_core::output::atomic_write(&path, &produced.bytes)?,
        None => std::io::stdout().write_all(&produced.bytes).map_err(popper_core::Error::from)?,
    }
    Ok(produced)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(p) => match p.failure {
            None => ExitCode::SUCCESS,
            Some(msg) => {
                eprintln!("assertion failed: {msg}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
