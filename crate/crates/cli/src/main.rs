//! centroid-lab: configuration-driven runner for the optical centroid
//! measurement experiments.

mod config;
mod ops;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "centroid-lab",
    about = "Monte Carlo experiments for optical centroid measurements with finite-size detectors",
    version
)]
struct Cli {
    /// JSON experiment configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Random seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Event count override.
    #[arg(long, global = true)]
    events: Option<usize>,

    /// Shift-combination method override (I or II).
    #[arg(long, global = true)]
    method: Option<String>,

    /// Worker thread count; CENTROID_LAB_THREADS is the fallback.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw an event batch and persist it as CSV.
    Sample,
    /// Rms deviation versus detector size.
    SweepSize,
    /// Per-shift rms at fixed detector sizes.
    SweepShift {
        /// Detector sizes in wavelengths, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0])]
        sizes: Vec<f64>,
    },
    /// Size sweeps averaged over disjoint event subsets.
    Subsets {
        /// Subset counts, comma separated.
        #[arg(long = "subset-counts", value_delimiter = ',', default_values_t = vec![1usize, 2, 5, 10])]
        counts: Vec<usize>,
    },
    /// Close-event multiphoton absorption rates over a B grid.
    Mpa {
        /// Fixed single-photon momentum variance <k_n^2>.
        #[arg(long = "k-variance", default_value_t = 1.0)]
        k_variance: f64,
        /// Values of B to evaluate, comma separated.
        #[arg(
            long = "b-grid",
            value_delimiter = ',',
            default_values_t = vec![0.7071067811865476, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99]
        )]
        b_grid: Vec<f64>,
        /// Close-event distance.
        #[arg(long = "d-mp", default_value_t = 1.0 / 400.0)]
        d_mp: f64,
    },
    /// Size sweeps for the fixed-feature-size states, N in 2..=4.
    FixedFeature,
    /// Cat-state |alpha| and phase sweeps.
    Cat {
        #[arg(
            long = "alpha-grid",
            value_delimiter = ',',
            default_values_t = vec![0.5, 1.0, 1.5, 2.0, 3.0, 4.0]
        )]
        alpha_grid: Vec<f64>,
        #[arg(
            long = "phi-grid",
            value_delimiter = ',',
            default_values_t = vec![0.0, 0.39269908169872414, 1.1780972450961724, 1.5707963267948966]
        )]
        phi_grid: Vec<f64>,
    },
}

fn resolve_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(events) = cli.events {
        cfg.n_events = events;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(method) = &cli.method {
        cfg.method = method.clone();
    }
    // Cat sweeps default to a smaller event budget than the NOON/JG runs.
    if matches!(cli.command, Command::Cat { .. }) && cli.events.is_none() && cli.config.is_none() {
        cfg.n_events = 100_000;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads(cli: &Cli) -> anyhow::Result<()> {
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => match std::env::var("CENTROID_LAB_THREADS") {
            Ok(v) => Some(v.parse().map_err(|_| {
                anyhow::anyhow!("CENTROID_LAB_THREADS={v:?} is not a thread count")
            })?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            anyhow::bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| anyhow::anyhow!("cannot configure thread pool: {e}"))?;
    }
    Ok(())
}

fn run(cli: &Cli, cfg: &ExperimentConfig) -> anyhow::Result<()> {
    match &cli.command {
        Command::Sample => ops::cmd_sample(cfg),
        Command::SweepSize => ops::cmd_sweep_size(cfg),
        Command::SweepShift { sizes } => ops::cmd_sweep_shift(cfg, sizes),
        Command::Subsets { counts } => ops::cmd_subsets(cfg, counts),
        Command::Mpa {
            k_variance,
            b_grid,
            d_mp,
        } => ops::cmd_mpa(cfg, *k_variance, b_grid, *d_mp),
        Command::FixedFeature => ops::cmd_fixed_feature(cfg),
        Command::Cat {
            alpha_grid,
            phi_grid,
        } => ops::cmd_cat(cfg, alpha_grid, phi_grid),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    // Configuration phase: failures exit with code 2.
    let cfg = match (|| -> anyhow::Result<ExperimentConfig> {
        init_threads(&cli)?;
        resolve_config(&cli)
    })() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };

    // Execution phase: numerical or I/O failures exit with code 3.
    match run(&cli, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
