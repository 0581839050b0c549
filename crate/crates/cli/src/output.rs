//! CSV files and console reports.
//!
//! The per-epoch schema is fixed:
//! `run_seed,epoch,selection_risk,cum_regret,label_precision,train_acc,test_acc,wall_ms`.
//! Floats use Rust's shortest round-trip formatting, so equal values always
//! print identically; `wall_ms` is last so it can be cut off before diffing.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::experiments::{
    AblationReport, BoundsReport, GridReport, MetricRow, SelectorRuns, SimulateReport, TrainReport,
    ValidateRiskReport,
};

pub const METRICS_HEADER: &str =
    "run_seed,epoch,selection_risk,cum_regret,label_precision,train_acc,test_acc,wall_ms";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn metrics_csv(rows: &[MetricRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(METRICS_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{:.3}",
            r.run_seed,
            r.epoch,
            r.selection_risk,
            r.cum_regret,
            opt(r.label_precision),
            opt(r.train_acc),
            opt(r.test_acc),
            r.wall_ms
        );
    }
    s
}

fn write(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| HarnessError::Output { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| HarnessError::Output { path: path.to_path_buf(), source })?;
    Ok(path.to_path_buf())
}

fn write_runs(dir: &Path, mode: &str, runs: &[SelectorRuns]) -> Result<Vec<PathBuf>> {
    runs.iter()
        .map(|r| write(&dir.join(format!("{mode}_{}.csv", r.strategy.name())), &metrics_csv(&r.rows)))
        .collect()
}

pub fn write_simulate(dir: &Path, report: &SimulateReport) -> Result<Vec<PathBuf>> {
    let mut files = write_runs(dir, "simulate", &report.runs)?;
    let mut s = String::from("selector,n,k,epochs,eta,mean_regret,mean_asr,mean_alpha,theorem1,mean_corollary2,within_theorem1,within_corollary2\n");
    for m in &report.summaries {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            m.strategy,
            report.n,
            report.k,
            report.epochs,
            report.eta,
            m.mean_regret,
            m.mean_asr,
            m.mean_alpha,
            opt(m.theorem1),
            opt(m.mean_corollary2),
            m.within_theorem1().map(|b| b.to_string()).unwrap_or_default(),
            m.within_corollary2().map(|b| b.to_string()).unwrap_or_default(),
        );
    }
    files.push(write(&dir.join("simulate_summary.csv"), &s)?);
    for (seed, stream) in &report.streams {
        let mut buf = Vec::new();
        taks_core::risk::write_stream_csv(stream, &mut buf)?;
        let text = String::from_utf8(buf).expect("stream CSV is ASCII");
        files.push(write(&dir.join(format!("stream_{seed}.csv")), &text)?);
    }
    Ok(files)
}

fn train_summary_csv(report: &TrainReport) -> String {
    let mut s = String::from("selector,run_seed,last10_acc,last10_label_precision\n");
    for m in &report.summaries {
        let _ = writeln!(s, "{},{},{},{}", m.strategy, m.run_seed, m.last_acc, m.last_precision);
    }
    let mut seen = Vec::new();
    for m in &report.summaries {
        if seen.contains(&m.strategy) {
            continue;
        }
        seen.push(m.strategy);
        let (a, p) = report.mean_for(m.strategy).expect("strategy has summaries");
        let _ = writeln!(s, "{},mean,{a},{p}", m.strategy);
    }
    s
}

pub fn write_train(dir: &Path, report: &TrainReport) -> Result<Vec<PathBuf>> {
    let mut files = write_runs(dir, "train", &report.runs)?;
    files.push(write(&dir.join("train_summary.csv"), &train_summary_csv(report))?);
    Ok(files)
}

pub fn write_ablate(dir: &Path, report: &AblationReport) -> Result<Vec<PathBuf>> {
    let mut files = write_runs(dir, "ablate", &report.train.runs)?;
    let mut s = String::from("selector,last10_acc,last10_label_precision,winner\n");
    for r in &report.rows {
        let _ = writeln!(s, "{},{},{},{}", r.strategy, r.mean_acc, r.mean_precision, u8::from(r.winner));
    }
    files.push(write(&dir.join("ablate_summary.csv"), &s)?);
    Ok(files)
}

pub fn write_grid(dir: &Path, report: &GridReport) -> Result<Vec<PathBuf>> {
    let mut s = String::from("eta_coef,k_frac,k,val_acc,best\n");
    for p in &report.points {
        let _ = writeln!(s, "{},{},{},{},{}", p.eta_coef, p.k_frac, p.k, p.val_acc, u8::from(*p == report.best));
    }
    Ok(vec![write(&dir.join("grid.csv"), &s)?])
}

pub fn write_validate_risk(dir: &Path, report: &ValidateRiskReport) -> Result<Vec<PathBuf>> {
    let mut s = String::from("clean_fraction,run_seed,epoch,selection_risk,total_selection_risk\n");
    for r in &report.rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.clean_fraction, r.run_seed, r.epoch, r.selection_risk, r.total_selection_risk);
    }
    let curves = write(&dir.join("validate_risk.csv"), &s)?;
    let mut s = String::from("clean_fraction,mean_final_total_risk\n");
    for (f, r) in &report.finals {
        let _ = writeln!(s, "{f},{r}");
    }
    Ok(vec![curves, write(&dir.join("validate_risk_summary.csv"), &s)?])
}

// ------------------------------------------------------------ console text

pub fn simulate_text(r: &SimulateReport) -> String {
    let mut s = format!("n = {}, k = {}, T = {}, eta = {:.6}\n", r.n, r.k, r.epochs, r.eta);
    for m in &r.summaries {
        let _ = write!(s, "{:>7}: mean regret {:.4}  mean ASR {:.4}  alpha {:.4}", m.strategy, m.mean_regret, m.mean_asr, m.mean_alpha);
        if let Some(b) = m.theorem1 {
            let _ = write!(s, "  theorem1 {b:.4} ({})", if m.mean_regret <= b { "within" } else { "EXCEEDED" });
        }
        if let Some(b) = m.mean_corollary2 {
            let _ = write!(s, "  corollary2 {b:.4} ({})", if m.mean_asr <= b { "within" } else { "EXCEEDED" });
        }
        s.push('\n');
    }
    s
}

pub fn train_text(r: &TrainReport) -> String {
    let mut s = format!("k = {}, eta = {:.6}\n", r.k, r.eta);
    for run in &r.runs {
        let (a, p) = r.mean_for(run.strategy).expect("strategy has summaries");
        let _ = writeln!(s, "{:>7}: last-10 accuracy {a:.4}  label precision {p:.4}", run.strategy);
    }
    s
}

pub fn ablate_text(r: &AblationReport) -> String {
    let mut s = format!("k = {}, eta = {:.6}\n", r.train.k, r.train.eta);
    for row in &r.rows {
        let mark = if row.winner { "  <- best" } else { "" };
        let _ = writeln!(s, "{:>7}: last-10 accuracy {:.4}  label precision {:.4}{mark}", row.strategy, row.mean_acc, row.mean_precision);
    }
    let _ = writeln!(s, "fpl >= greedy and naive: {}", r.fpl_best);
    s
}

pub fn grid_text(r: &GridReport) -> String {
    format!(
        "{} grid points on {} training samples; best eta_coef = {}, k_frac = {} (k = {}), validation accuracy {:.4}\n",
        r.points.len(),
        r.n_train,
        r.best.eta_coef,
        r.best.k_frac,
        r.best.k,
        r.best.val_acc
    )
}

pub fn validate_risk_text(r: &ValidateRiskReport) -> String {
    let mut s = format!("k = {}\n", r.k);
    for (f, t) in &r.finals {
        let _ = writeln!(s, "clean {:>5.1}%: final total selection risk {t:.4}", f * 100.0);
    }
    let _ = writeln!(s, "strictly decreasing in clean fraction: {}", r.strictly_decreasing());
    s
}

pub fn bounds_text(r: &BoundsReport) -> String {
    let show = |v: &std::result::Result<f64, String>| match v {
        Ok(x) => format!("{x:.6}"),
        Err(e) => format!("n/a ({e})"),
    };
    let mut s = format!("n = {}, k = {}, T = {}\n", r.n, r.k, r.epochs);
    let _ = writeln!(s, "theorem1 regret bound: {}", show(&r.theorem1));
    if let Some(c) = &r.corollary2 {
        let _ = writeln!(s, "corollary2 ASR bound:  {}", show(c));
    }
    if let Some(a) = &r.alpha_regret {
        let _ = writeln!(s, "alpha regret bound:    {}", show(a));
    }
    let _ = writeln!(s, "risk ceiling kT:       {}", r.ceiling);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_schema() {
        let rows = vec![MetricRow {
            run_seed: 3,
            epoch: 1,
            selection_risk: 0.5,
            cum_regret: 0.1,
            label_precision: Some(0.75),
            train_acc: None,
            test_acc: Some(1.0),
            wall_ms: 2.0,
        }];
        assert_eq!(metrics_csv(&rows), format!("{METRICS_HEADER}\n3,1,0.5,0.1,0.75,,1,2.000\n"));
    }
}
