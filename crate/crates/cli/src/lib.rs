//! Experiment harness for k-set sample selection: stream simulations, full
//! training runs, selector ablations, hyperparameter grids, the fixed
//! clean-fraction risk check and closed-form bound reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

pub use config::{ExperimentConfig, Mode};
pub use error::{HarnessError, Result};

/// What a mode printed and which files it wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub files: Vec<PathBuf>,
}

/// Runs `mode` and writes its CSVs under `cfg.out`.
pub fn execute(mode: Mode, cfg: &ExperimentConfig) -> Result<Outcome> {
    if let Some(m) = cfg.mode {
        if m != mode {
            return Err(HarnessError::Config(format!("config is for mode `{m}` but `{mode}` was requested")));
        }
    }
    let dir = cfg.out.as_path();
    let (text, files) = match mode {
        Mode::Simulate => {
            let r = experiments::run_simulate(cfg)?;
            (output::simulate_text(&r), output::write_simulate(dir, &r)?)
        }
        Mode::Train => {
            let r = experiments::run_train(cfg)?;
            (output::train_text(&r), output::write_train(dir, &r)?)
        }
        Mode::Ablate => {
            let r = experiments::run_ablate(cfg)?;
            (output::ablate_text(&r), output::write_ablate(dir, &r)?)
        }
        Mode::Grid => {
            let r = experiments::run_grid_search(cfg)?;
            (output::grid_text(&r), output::write_grid(dir, &r)?)
        }
        Mode::ValidateRisk => {
            let r = experiments::run_validate_risk(cfg)?;
            (output::validate_risk_text(&r), output::write_validate_risk(dir, &r)?)
        }
        Mode::Bounds => {
            let k = cfg.k.ok_or_else(|| HarnessError::Config("bounds needs k".into()))?;
            let r = experiments::run_bounds(cfg.n, k, cfg.epochs, cfg.alpha)?;
            (output::bounds_text(&r), Vec::new())
        }
    };
    Ok(Outcome { text, files })
}
