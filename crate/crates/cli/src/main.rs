use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use taks_harness::{execute, ExperimentConfig, HarnessError, Mode};

#[derive(Parser)]
#[command(name = "taks", version, about = "Adaptive k-set sample selection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run selectors against synthetic or replayed risk streams.
    Simulate(Common),
    /// Train the classifier with adaptive sample selection.
    Train(Common),
    /// Compare FPL, Greedy and Naive on the same data and seeds.
    Ablate(Common),
    /// Grid-search eta_coef and k on a noisy validation split.
    Grid(Common),
    /// Total selection risk of fixed selections with known clean fractions.
    ValidateRisk(Common),
    /// Print the closed-form regret and risk bounds.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run a single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Selector: fpl, naive, greedy or random (comma-separated for several).
    #[arg(long)]
    selector: Option<String>,
    /// Perturbation coefficient c in eta = c * sqrt(kT).
    #[arg(long)]
    eta_coef: Option<f64>,
    /// Selection size as a fraction of the training set.
    #[arg(long)]
    k_frac: Option<f64>,
    /// Label noise, `sym:RATE` or `asym:RATE`.
    #[arg(long)]
    noise: Option<String>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Horizon T.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
}

fn build_config(c: &Common, extra: &[(&str, Option<String>)]) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    let flags = [
        ("seed", c.seed.map(|v| v.to_string())),
        ("out", c.out.as_ref().map(|p| p.display().to_string())),
        ("selectors", c.selector.clone()),
        ("eta_coef", c.eta_coef.map(|v| v.to_string())),
        ("k_frac", c.k_frac.map(|v| v.to_string())),
        ("noise", c.noise.clone()),
    ];
    for (key, value) in flags.iter().chain(extra) {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<String, HarnessError> {
    let (mode, cfg) = match &cli.command {
        Command::Simulate(c) => (Mode::Simulate, build_config(c, &[])?),
        Command::Train(c) => (Mode::Train, build_config(c, &[])?),
        Command::Ablate(c) => (Mode::Ablate, build_config(c, &[])?),
        Command::Grid(c) => (Mode::Grid, build_config(c, &[])?),
        Command::ValidateRisk(c) => (Mode::ValidateRisk, build_config(c, &[])?),
        Command::Bounds(b) => {
            let extra = [
                ("n", b.n.map(|v| v.to_string())),
                ("k", b.k.map(|v| v.to_string())),
                ("epochs", b.t.map(|v| v.to_string())),
                ("alpha", b.alpha.map(|v| v.to_string())),
            ];
            (Mode::Bounds, build_config(&b.common, &extra)?)
        }
    };
    let outcome = execute(mode, &cfg)?;
    let mut text = outcome.text;
    for f in &outcome.files {
        text.push_str(&format!("wrote {}\n", f.display()));
    }
    Ok(text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("taks: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
