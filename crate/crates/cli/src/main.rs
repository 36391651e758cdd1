use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use opstft_cli::{resolve, run, ConfigError, Overrides, RunError, ScenarioKind};

/// Simulate phase-space/time-frequency tomograms of the wire, filter or a
/// custom scenario and write CSV slices, heatmaps and a JSON manifest.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// Scenario preset.
    #[arg(value_enum)]
    scenario: ScenarioKind,
    /// TOML document overriding preset values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Also simulate the heterodyne scan and invert it.
    #[arg(long)]
    with_scan: bool,
    /// Rescale the masked field to unit norm.
    #[arg(long)]
    renormalize_mask: bool,
    /// Points on every axis.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Write PGM heatmaps next to the CSV slices.
    #[arg(long)]
    heatmaps: bool,
}

const EXIT_ERROR: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_ERROR);
            }
        },
        None => String::new(),
    };
    let over = Overrides {
        grid: args.grid,
        with_scan: args.with_scan,
        renormalize_mask: args.renormalize_mask,
        heatmaps: args.heatmaps,
    };
    let cfg = match resolve(Some(args.scenario), &text, &over) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cfg, &args.out) {
        Ok(m) => {
            let inv = &m.invariants;
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{} slices written to {}; marginal residuals {:.3e} / {:.3e}; min/max W {:.3e}",
                m.slices.len(),
                args.out.display(),
                inv.marginal_residual_native,
                inv.marginal_residual_conjugate,
                inv.wigner_min_over_max
            );
            if inv.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: invariant check failed");
                ExitCode::from(EXIT_INVARIANT)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                RunError::Config(ConfigError::Parse { .. } | ConfigError::Validation(_)) => EXIT_CONFIG,
                _ => EXIT_ERROR,
            })
        }
    }
}
