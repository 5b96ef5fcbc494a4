use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tcdyn::experiment::{apply_config_text, apply_setting, find_preset, presets, run};

/// Exact and large-n resonant Tavis-Cummings dynamics: collapse and revival,
/// attractor states, basins of attraction, entanglement measures.
#[derive(Parser)]
#[command(name = "tcdyn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset experiment, optionally overriding settings.
    Run {
        /// Preset name; see `list-presets`.
        #[arg(long)]
        preset: String,
        /// Optional flat `key = value` configuration file applied on top of
        /// the preset (command line `--set` flags win).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override one setting, e.g. `--set nbar=25`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// Output directory (default: the preset name).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List available presets with one-line descriptions.
    ListPresets,
    /// Show the resolved configuration of a preset.
    Describe {
        #[arg(long)]
        preset: String,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> tcdyn::Result<()> {
    match cli.command {
        Command::Run {
            preset,
            config,
            sets,
            out,
        } => {
            let mut experiment = find_preset(&preset)?.config;
            if let Some(path) = config {
                apply_config_text(&mut experiment, &std::fs::read_to_string(path)?)?;
            }
            for setting in &sets {
                let (key, value) = setting.split_once('=').ok_or_else(|| {
                    tcdyn::Error::InvalidParameter(format!(
                        "--set '{setting}' is not KEY=VALUE"
                    ))
                })?;
                apply_setting(&mut experiment, key.trim(), value.trim())?;
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from(&preset));
            let written = run(&experiment, &out_dir)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::ListPresets => {
            for p in presets() {
                println!("{:8} {}", p.name, p.description);
            }
            Ok(())
        }
        Command::Describe { preset } => {
            let p = find_preset(&preset)?;
            let c = &p.config;
            println!("preset = {}", p.name);
            println!("# {}", p.description);
            println!("n_qubits = {}", c.model.n_qubits);
            println!("nbar = {}", c.model.nbar);
            println!("theta = {}", c.model.theta);
            println!("coupling = {}", c.model.coupling);
            println!("fock_cutoff = {}", c.model.fock_cutoff);
            println!("initial = {}", c.initial);
            println!("t_start = {}", c.t_start);
            println!("t_end = {}", c.t_end);
            println!("points = {}", c.points);
            println!(
                "observables = {}",
                c.observables
                    .iter()
                    .map(|o| o.column())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            println!(
                "qgrid_times = {}",
                c.qgrid_times
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            println!(
                "spin_qgrid_times = {}",
                c.spin_qgrid_times
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            println!("qgrid_points = {}", c.qgrid_points);
            Ok(())
        }
    }
}
