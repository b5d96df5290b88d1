use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wsparq::harness::{aggregate_dir, preset, run_experiment, ExperimentConfig, PRESETS};
use wsparq::Result;

#[derive(Parser)]
#[command(name = "wsparq", version, about = "Sparse-query optimistic learning for time-varying bilevel problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write traces, aggregates and a manifest.
    Run {
        /// JSON config file, or the name of a built-in preset.
        #[arg(long)]
        config: String,
        /// Output directory (overrides the config's `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated algorithm names to keep.
        #[arg(long, value_delimiter = ',')]
        algos: Option<Vec<String>>,
        /// Comma-separated seeds (replaces the config's list).
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Recompute aggregate files from the trace files in a directory.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Built-in experiment presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names.
    List,
    /// Print a preset's JSON.
    Show { name: String },
}

fn load_config(arg: &str) -> Result<ExperimentConfig> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(c) = preset(arg) {
            return Ok(c);
        }
    }
    ExperimentConfig::load(path)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            algos,
            seeds,
            threads,
        } => {
            let mut config = load_config(&config)?;
            if let Some(names) = algos {
                config.select_algorithms(&names)?;
            }
            if let Some(seeds) = seeds {
                config.seeds = seeds;
            }
            let dir = out.unwrap_or_else(|| config.output_dir());
            let output = run_experiment(&config, Some(&dir), threads)?;
            println!("{} -> {}", config.name, dir.display());
            println!("grid gap {:.3e}", output.manifest.grid_gap);
            for s in &output.manifest.algorithms {
                println!(
                    "{:<16} R_T = {:>10.4} ± {:<8.4} N_T = {:.1} (max {})",
                    s.name, s.final_regret_mean, s.final_regret_std, s.final_queries_mean, s.final_queries_max
                );
            }
        }
        Command::Aggregate { input } => {
            for (algo, agg, path) in aggregate_dir(&input)? {
                println!(
                    "{:<16} runs {:>3}  R_T = {:.4} ± {:.4}  -> {}",
                    algo,
                    agg.runs,
                    agg.final_mean(),
                    agg.final_std(),
                    path.display()
                );
            }
        }
        Command::Presets { action } => match action {
            PresetAction::List => {
                for p in PRESETS {
                    println!("{:<12} {}", p.name, p.description);
                }
            }
            PresetAction::Show { name } => match PRESETS.iter().find(|p| p.name == name) {
                Some(p) => print!("{}", p.json),
                None => {
                    return Err(wsparq::Error::Config {
                        field: "preset".into(),
                        message: format!("unknown preset `{name}`"),
                    })
                }
            },
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
