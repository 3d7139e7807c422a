//! `mstrack`: run sensor-management experiments and post-process results.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mstrack::experiment::{
    emit_plot_data, read_config, read_records, run_experiment, summarise, summarise_timing, write_results,
    ExperimentConfig, TimingRow,
};
use mstrack::Error;

#[derive(Debug, Parser)]
#[command(name = "mstrack", version, about = "Multi-sensor GOSPA-driven planning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every configured algorithm for the configured number of Monte-Carlo runs.
    Run {
        /// Experiment configuration (TOML).
        config: PathBuf,
        /// Override the number of Monte-Carlo runs.
        #[arg(long)]
        runs: Option<usize>,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = one per core).
        #[arg(long)]
        workers: Option<usize>,
        /// Write per-step planner diagnostics as JSON lines.
        #[arg(long)]
        debug_planner: bool,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the RMS-GOSPA and timing summary of a results directory.
    Summarise {
        dir: PathBuf,
    },
    /// Regenerate the plot-ready CSV files of a results directory.
    PlotData {
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) => 2,
                _ => 3,
            })
        }
    }
}

fn dispatch(command: Command) -> mstrack::Result<()> {
    match command {
        Command::Run { config, runs, seed, workers, debug_planner, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(r) = runs {
                cfg.runs = r;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            cfg.debug_planner |= debug_planner;
            cfg.validate()?;
            tracing::info!(
                algorithms = cfg.algorithms.len(),
                runs = cfg.runs,
                steps = cfg.scenario.steps,
                "starting experiment"
            );
            let result = run_experiment(&cfg)?;
            write_results(&result, &cfg, &cfg.output_dir)?;
            print_summary(&cfg.output_dir)?;
            println!("results written to {}", cfg.output_dir.display());
            Ok(())
        }
        Command::Summarise { dir } => print_summary(&dir),
        Command::PlotData { dir } => {
            let config = read_config(&dir)?;
            emit_plot_data(&read_records(&dir)?, config.gospa_c, &dir)?;
            println!("plot data written to {}", dir.display());
            Ok(())
        }
    }
}

fn print_summary(dir: &Path) -> mstrack::Result<()> {
    let records = read_records(dir)?;
    let timing: Vec<TimingRow> = records
        .iter()
        .map(|r| TimingRow { algorithm: r.algorithm.clone(), run: r.run, step: r.step, plan_seconds: r.plan_seconds })
        .collect();
    let timing = summarise_timing(&timing);
    println!("{:<14} {:>8} {:>11} {:>12} {:>9} {:>9} {:>12}", "algorithm", "samples", "rms_gospa", "mean_loc_sq", "missed", "false", "plan_s/step");
    for row in summarise(&records) {
        let t = timing.iter().find(|t| t.algorithm == row.algorithm).map_or(f64::NAN, |t| t.mean_plan_seconds);
        println!(
            "{:<14} {:>8} {:>11.3} {:>12.3} {:>9.3} {:>9.3} {:>12.4}",
            row.algorithm, row.samples, row.rms_gospa, row.mean_loc_sq, row.mean_missed, row.mean_false, t
        );
    }
    Ok(())
}
