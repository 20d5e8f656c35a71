use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use starkdisk_cli::config::{CommandKind, RunConfig, Settings};
use starkdisk_cli::{configure_threads, run, write_atomic, CliError};

/// Spectra of a two-dimensional hydrogen atom in a circular box with a
/// uniform electric field.
#[derive(Parser, Debug)]
#[command(name = "starkdisk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Box radius (dimensionless)
    #[arg(long, allow_negative_numbers = true)]
    r0: Option<String>,
    /// Field strength (dimensionless)
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<String>,
    /// Coulomb coupling of the unit-disk problem
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<String>,
    /// even, odd or both
    #[arg(long)]
    sector: Option<String>,
    /// Highest power N of the 2D basis, or the size of the radial basis
    #[arg(long)]
    n_basis: Option<String>,
    /// Number of levels per sector
    #[arg(long)]
    levels: Option<String>,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or svg
    #[arg(long)]
    format: Option<String>,
    /// key = value configuration file, or a CSV written by this tool
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest levels at one (r0, lambda)
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Levels over a grid of lambda, r0 or beta
    Sweep {
        #[command(flatten)]
        common: Common,
        /// lambda, r0 or beta
        #[arg(long)]
        parameter: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<String>,
        #[arg(long)]
        step: Option<String>,
    },
    /// r0^2 E at lambda = 1 for r0 = 0.01, 0.001 and the particle-in-disk row
    Table1 {
        #[command(flatten)]
        common: Common,
    },
    /// Data (or an SVG plot) behind figure 1, 2, 3 or 4
    Figure {
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Locate the exact crossing of two levels
    Crossing {
        #[command(flatten)]
        common: Common,
        /// e.g. even_0_2 or odd(0,1)
        #[arg(long)]
        label_a: Option<String>,
        #[arg(long)]
        label_b: Option<String>,
        /// lambda, r0 or beta
        #[arg(long)]
        parameter: Option<String>,
        /// Lower end of the bracket
        #[arg(long, allow_negative_numbers = true)]
        from: Option<String>,
        /// Upper end of the bracket
        #[arg(long, allow_negative_numbers = true)]
        to: Option<String>,
    },
    /// Zeros of J_nu and the particle-in-disk energies zero^2 / 2
    Besselzeros {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        nu: Option<String>,
        #[arg(long)]
        count: Option<String>,
    },
}

fn put(s: &mut Settings, key: &str, value: &Option<String>) {
    if let Some(v) = value {
        s.set(key, v.clone());
    }
}

fn settings(common: &Common) -> Result<Settings, CliError> {
    let mut s = match &common.config {
        Some(path) => Settings::load(path).map_err(CliError::usage)?,
        None => Settings::default(),
    };
    let mut flags = Settings::default();
    put(&mut flags, "r0", &common.r0);
    put(&mut flags, "lambda", &common.lambda);
    put(&mut flags, "beta", &common.beta);
    put(&mut flags, "sector", &common.sector);
    put(&mut flags, "n_basis", &common.n_basis);
    put(&mut flags, "levels", &common.levels);
    put(&mut flags, "format", &common.format);
    if let Some(p) = &common.out {
        flags.set("out", p.to_string_lossy().into_owned());
    }
    s.merge(flags);
    Ok(s)
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let (kind, mut s) = match &cli.command {
        Command::Spectrum { common } => (CommandKind::Spectrum, settings(common)?),
        Command::Table1 { common } => (CommandKind::Table1, settings(common)?),
        Command::Sweep {
            common,
            parameter,
            from,
            to,
            step,
        } => {
            let mut s = settings(common)?;
            put(&mut s, "parameter", parameter);
            put(&mut s, "from", from);
            put(&mut s, "to", to);
            put(&mut s, "step", step);
            (CommandKind::Sweep, s)
        }
        Command::Figure { id, common } => {
            let mut s = settings(common)?;
            s.set("figure", id.clone());
            (CommandKind::Figure, s)
        }
        Command::Crossing {
            common,
            label_a,
            label_b,
            parameter,
            from,
            to,
        } => {
            let mut s = settings(common)?;
            put(&mut s, "label_a", label_a);
            put(&mut s, "label_b", label_b);
            put(&mut s, "parameter", parameter);
            put(&mut s, "from", from);
            put(&mut s, "to", to);
            (CommandKind::Crossing, s)
        }
        Command::Besselzeros { common, nu, count } => {
            let mut s = settings(common)?;
            put(&mut s, "nu", nu);
            put(&mut s, "count", count);
            (CommandKind::BesselZeros, s)
        }
    };
    // A config taken from another command's output keeps its own command key.
    if s.get("command").is_some_and(|c| c != kind.as_str()) {
        s.0.remove("command");
    }
    RunConfig::resolve(kind, &s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|_| resolve(&cli))
        .and_then(|cfg| {
            let text = run(&cfg)?.text();
            match &cfg.out {
                Some(path) => write_atomic(path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("starkdisk: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
