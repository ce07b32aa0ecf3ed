//! Command-line front-end: critical temperature, T-matrix scans, crossing
//! phase, gate construction, correlator checks, and molecule dumps, emitted
//! as reproducible JSON/CSV artifacts.

mod commands;
mod config;

use anyhow::Context;
use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};
use config::{Format, RunConfig};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "phomol",
    version,
    about = "Pair T-matrix, bound-state, and gate calculations for contact-interacting photons in a 1D waveguide"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalFlags {
    /// Flat `key = value` config file; flags override file values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Infrared cutoff of the coth kernel (dimensionless).
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    x_min: Option<f64>,

    /// Interaction strength as the ratio v / v_e.
    #[arg(long, global = true, value_name = "RATIO", allow_negative_numbers = true)]
    v_over_ve: Option<f64>,

    /// Band half-width in GHz; interpretation set by --angular / --ordinary.
    #[arg(long, global = true, value_name = "GHZ", allow_negative_numbers = true)]
    omega_ghz: Option<f64>,

    /// Treat --omega-ghz as an angular frequency (rad/s x 1e9).
    #[arg(long, global = true, conflicts_with = "ordinary")]
    angular: bool,

    /// Treat --omega-ghz as an ordinary frequency (picks up a factor 2 pi).
    #[arg(long, global = true)]
    ordinary: bool,

    /// Directory receiving the JSON summary and any CSV tables.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Tabular payload format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Critical temperature by both methods plus a denominator scan.
    Tc,
    /// Retarded T-matrix over a frequency window at fixed temperature.
    TmatrixScan,
    /// Nonlinear phase of one full pair crossing.
    Phase,
    /// Conditional-phase gate: matrix, truth table, CNOT construction.
    Gate,
    /// Residual report for the correlator identities.
    KeldyshCheck,
    /// Bound-state amplitude, momentum spectrum, and molecule field.
    Molecule,
}

fn error_kind(err: &anyhow::Error) -> &'static str {
    match err.downcast_ref::<phomol::Error>() {
        Some(phomol::Error::DistributionPole) => "DistributionPole",
        Some(phomol::Error::GridCoverage { .. }) => "GridCoverage",
        Some(phomol::Error::QuadratureTolerance { .. }) => "QuadratureTolerance",
        Some(phomol::Error::NoBracket(_)) => "NoBracket",
        Some(phomol::Error::InvalidParameter(_)) => "InvalidParameter",
        Some(phomol::Error::DimensionMismatch(_)) => "DimensionMismatch",
        None => "Cli",
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.global.config {
        cfg.apply_file(path)?;
    }
    if let Some(x) = cli.global.x_min {
        cfg.x_min = x;
    }
    if let Some(v) = cli.global.v_over_ve {
        cfg.v_over_ve = v;
    }
    if let Some(w) = cli.global.omega_ghz {
        cfg.omega_ghz = w;
    }
    if cli.global.angular {
        cfg.angular = true;
    }
    if cli.global.ordinary {
        cfg.angular = false;
    }
    cfg.validate()?;

    let out_dir = &cli.global.out;
    let format = cli.global.format;
    let (name, summary) = match cli.command {
        Command::Tc => ("tc", commands::cmd_tc(&cfg, out_dir, format)?),
        Command::TmatrixScan => (
            "tmatrix_scan",
            commands::cmd_tmatrix_scan(&cfg, out_dir, format)?,
        ),
        Command::Phase => ("phase", commands::cmd_phase(&cfg, out_dir, format)?),
        Command::Gate => ("gate", commands::cmd_gate(&cfg, out_dir, format)?),
        Command::KeldyshCheck => (
            "keldysh_check",
            commands::cmd_keldysh_check(&cfg, out_dir, format)?,
        ),
        Command::Molecule => ("molecule", commands::cmd_molecule(&cfg, out_dir, format)?),
    };

    let mut pretty = serde_json::to_string_pretty(&summary)?;
    pretty.push('\n');
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let path = out_dir.join(format!("{name}.json"));
    std::fs::write(&path, &pretty).with_context(|| format!("writing {}", path.display()))?;
    print!("{pretty}");
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion
            ) =>
        {
            err.exit()
        }
        Err(err) => {
            let payload = serde_json::json!({
                "error": err.to_string(),
                "kind": "Usage",
            });
            eprintln!("{payload}");
            std::process::exit(2);
        }
    };
    if let Err(err) = run(cli) {
        let payload = serde_json::json!({
            "error": format!("{err:#}"),
            "kind": error_kind(&err),
        });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}
