use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use chaoskit::config::{ConfigOverrides, FamilySpec};
use chaoskit::{ExperimentKind, OutputFormat};
use clap::Parser;

/// Wiener-chaos decoupling experiments.
#[derive(Debug, Parser)]
#[command(name = "chaoskit", version)]
struct Cli {
    /// Experiment to run; may instead come from --config.
    experiment: Option<ExperimentKind>,
    /// JSON or TOML file with any of the options below; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Strictly increasing sizes, e.g. 4,16,64.
    #[arg(long, value_delimiter = ',')]
    n_schedule: Option<Vec<usize>>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    /// Weights of the three_way experiment, summing to 1.
    #[arg(long, value_delimiter = ',')]
    split3: Option<Vec<f64>>,
    /// Monte Carlo sample count.
    #[arg(long = "mc")]
    mc_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    z_grid: Option<Vec<f64>>,
    /// Euler steps per path for the counterexample.
    #[arg(long)]
    path_steps: Option<usize>,
    /// Bins of the conditional residual proxy.
    #[arg(long)]
    n_bins: Option<usize>,
    /// Kernel file for `inspect`, as a custom single-chaos family.
    #[arg(long)]
    kernel: Option<PathBuf>,
    /// Rescale the --kernel family to this variance.
    #[arg(long, requires = "kernel")]
    normalize_to: Option<f64>,
    /// Report path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(p) => ConfigOverrides::from_file(p)
            .with_context(|| format!("reading config {}", p.display()))?,
        None => ConfigOverrides::default(),
    };
    let flags = ConfigOverrides {
        experiment: cli.experiment,
        n_schedule: cli.n_schedule,
        c1: cli.c1,
        c2: cli.c2,
        split3: cli
            .split3
            .map(<[f64; 3]>::try_from)
            .transpose()
            .map_err(|v| anyhow::anyhow!("--split3 needs 3 weights, got {}", v.len()))?,
        mc_samples: cli.mc_samples,
        seed: cli.seed,
        t_grid: cli.t_grid,
        z_grid: cli.z_grid,
        path_steps: cli.path_steps,
        n_bins: cli.n_bins,
        family: cli.kernel.map(|kernel_file| FamilySpec::CustomSingleChaos {
            kernel_file,
            normalize_to: cli.normalize_to,
        }),
        out: cli.out,
        format: cli.format,
    };
    let config = file.merged(flags).resolve()?;
    let report = chaoskit::run(&config)?;
    match &config.out {
        Some(path) => {
            report.write(path, config.format)?;
            eprintln!(
                "{}: {} records in {} ms -> {}",
                config.experiment.name(),
                report.records.len(),
                report.runtime_ms,
                path.display()
            );
        }
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{}", report.render(config.format)?)?;
        }
    }
    Ok(())
}
