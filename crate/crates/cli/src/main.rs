use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod output;

#[derive(Parser)]
#[command(name = "georay", version, about = "Geodesic tractography experiments on synthetic diffusion data")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// JSON configuration for the command; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the noise generator.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum SchemeArg {
    Inverse,
    Adjugate,
    Beta,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ModeArg {
    Pure,
    Hybrid,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a phantom, its signals and fitted fields.
    Phantom {
        #[arg(long)]
        shape: Option<String>,
        /// Crossing angle in degrees (cross only).
        #[arg(long)]
        angle: Option<f64>,
        /// Rician noise level relative to S0.
        #[arg(long)]
        noise: Option<f64>,
        /// Fitted tensor orders to write; repeatable.
        #[arg(long = "order")]
        orders: Vec<u8>,
        #[arg(long)]
        gradients: Option<usize>,
    },
    /// Fit tensors to a signal volume.
    Fit {
        #[arg(long)]
        signals: Option<PathBuf>,
        #[arg(long)]
        scheme: Option<PathBuf>,
        #[arg(long)]
        order: Option<u8>,
    },
    /// Trace geodesics from a seed region towards a target box.
    Track {
        #[arg(long)]
        field: Option<PathBuf>,
        /// Preset file from `phantom` with seeds, target and ground truth.
        #[arg(long)]
        preset: Option<PathBuf>,
        #[arg(long)]
        metric: Option<SchemeArg>,
        /// Exponent of the anisotropy factor for `--metric beta`.
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        mode: Option<ModeArg>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Riemannian cost along an interpolation path.
    CostProfile {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Diagonal-component orientation error against crossing angle.
    AngleSweep {
        /// Comma-separated crossing angles in degrees.
        #[arg(long, value_delimiter = ',')]
        angles: Vec<f64>,
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Render a field with track overlays as SVG.
    Plot {
        #[arg(long)]
        field: Option<PathBuf>,
        /// Track files; repeatable.
        #[arg(long)]
        tracks: Vec<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<Vec<PathBuf>> {
    if let Some(n) = cli.common.threads {
        anyhow::ensure!(n > 0, "--threads must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let c = &cli.common;
    match cli.command {
        Command::Phantom { shape, angle, noise, orders, gradients } => {
            commands::phantom(c, shape, angle, noise, orders, gradients)
        }
        Command::Fit { signals, scheme, order } => commands::fit(c, signals, scheme, order),
        Command::Track { field, preset, metric, p, mode, step } => {
            commands::track(c, field, preset, metric, p, mode, step)
        }
        Command::CostProfile { samples } => commands::cost_profile(c, samples),
        Command::AngleSweep { angles, noise } => commands::angle_sweep(c, angles, noise),
        Command::Plot { field, tracks } => commands::plot(c, field, tracks),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
