//! Flat `key = value` experiment configs.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Unknown or repeated keys are errors reported with their line number.
//! Command-line flags are applied on top with [`ExperimentConfig::set`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use taks_core::learner::{LabelNoiseSpec, DEFAULT_HIDDEN};
use taks_core::risk::StreamKind;
use taks_core::Strategy;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Train,
    Ablate,
    Grid,
    ValidateRisk,
    Bounds,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Train => "train",
            Mode::Ablate => "ablate",
            Mode::Grid => "grid",
            Mode::ValidateRisk => "validate-risk",
            Mode::Bounds => "bounds",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "simulate" => Mode::Simulate,
            "train" => Mode::Train,
            "ablate" => Mode::Ablate,
            "grid" => Mode::Grid,
            "validate-risk" | "validate_risk" => Mode::ValidateRisk,
            "bounds" => Mode::Bounds,
            _ => return Err(format!("unknown mode `{s}`")),
        })
    }
}

/// Where training data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Gaussian blobs; the test set is a fresh draw from the same clusters.
    Blobs { dim: usize, classes: usize, separation: f64, test_n: usize },
    /// `label,f_0,...` files.
    Csv { train: PathBuf, test: Option<PathBuf> },
    /// IDX image/label pairs.
    Idx { train_images: PathBuf, train_labels: PathBuf, test: Option<(PathBuf, PathBuf)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub data: DataSource,
    /// Training-set size for blobs, stream width for simulations.
    pub n: usize,
    /// Keep only the first `limit` training samples of a loaded dataset.
    pub limit: Option<usize>,
    pub stream: StreamKind,
    pub clean_fraction: f64,
    pub noise_scale: f64,
    pub drift_period: Option<usize>,
    /// Replay this stream CSV instead of generating one.
    pub stream_path: Option<PathBuf>,
    /// Also write each generated stream to `stream_<seed>.csv`.
    pub dump_stream: bool,
    pub selectors: Vec<Strategy>,
    pub k: Option<usize>,
    pub k_frac: Option<f64>,
    pub epochs: usize,
    pub eta_coef: f64,
    pub seeds: Vec<u64>,
    pub noise: Option<LabelNoiseSpec>,
    pub gamma: Option<f64>,
    pub validation_fraction: f64,
    pub grid_eta_coefs: Vec<f64>,
    pub grid_k_fracs: Option<Vec<f64>>,
    pub clean_fractions: Vec<f64>,
    pub hidden: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub alpha: Option<f64>,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: None,
            data: DataSource::Blobs { dim: 2, classes: 4, separation: 6.0, test_n: 1000 },
            n: 2000,
            limit: None,
            stream: StreamKind::Planted,
            clean_fraction: 0.5,
            noise_scale: 0.1,
            drift_period: None,
            stream_path: None,
            dump_stream: false,
            selectors: vec![Strategy::Fpl],
            k: None,
            k_frac: None,
            epochs: 100,
            eta_coef: 1e-3,
            seeds: vec![0],
            noise: None,
            gamma: None,
            validation_fraction: 0.2,
            grid_eta_coefs: vec![1e-4, 5e-4, 1e-3, 5e-3],
            grid_k_fracs: None,
            clean_fractions: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            hidden: DEFAULT_HIDDEN,
            learning_rate: 0.02,
            batch_size: 8,
            alpha: None,
            out: PathBuf::from("results"),
        }
    }
}

/// Every key accepted in a config file.
pub const KEYS: &[&str] = &[
    "mode", "dataset", "n", "dim", "classes", "separation", "test_n", "train_path", "test_path",
    "train_images", "train_labels", "test_images", "test_labels", "limit", "stream",
    "clean_fraction", "noise_scale", "drift_period", "stream_path", "dump_stream", "selectors", "selector", "k", "k_frac",
    "epochs", "eta_coef", "seeds", "seed", "noise", "gamma", "validation_fraction",
    "grid_eta_coefs", "grid_k_fracs", "clean_fractions", "hidden", "learning_rate",
    "batch_size", "alpha", "out",
];

fn parse_num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("`{v}` is not a valid value for {key}"))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> std::result::Result<Vec<T>, String> {
    let items: Vec<&str> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    items.iter().map(|s| parse_num(key, s)).collect()
}

/// `3`, `0,4,9` or a half-open range `0..10`.
fn parse_seeds(v: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((a, b)) = v.split_once("..") {
        let a: u64 = parse_num("seeds", a.trim())?;
        let b: u64 = parse_num("seeds", b.trim())?;
        if b <= a {
            return Err(format!("seed range {a}..{b} is empty"));
        }
        return Ok((a..b).collect());
    }
    parse_list("seeds", v)
}

/// Pending file-based source keys, resolved once the whole file is read.
#[derive(Default)]
struct SourceKeys {
    dataset: Option<String>,
    dim: Option<usize>,
    classes: Option<usize>,
    separation: Option<f64>,
    test_n: Option<usize>,
    train_path: Option<PathBuf>,
    test_path: Option<PathBuf>,
    train_images: Option<PathBuf>,
    train_labels: Option<PathBuf>,
    test_images: Option<PathBuf>,
    test_labels: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut seen = std::collections::HashMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::config(format!("line {line_no}: expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(HarnessError::config(format!("line {line_no}: unknown key `{key}`")));
            }
            if let Some(prev) = seen.insert(key.to_string(), line_no) {
                return Err(HarnessError::config(format!(
                    "line {line_no}: key `{key}` already set on line {prev}"
                )));
            }
            pairs.push((line_no, key.to_string(), value.to_string()));
        }
        Self::from_pairs(pairs.iter().map(|(l, k, v)| (Some(*l), k.as_str(), v.as_str())))
    }

    fn from_pairs<'a>(pairs: impl Iterator<Item = (Option<usize>, &'a str, &'a str)>) -> Result<Self> {
        let mut cfg = Self::default();
        let mut src = SourceKeys::default();
        for (line, key, value) in pairs {
            cfg.apply(key, value, &mut src).map_err(|m| match line {
                Some(l) => HarnessError::config(format!("line {l}: {key}: {m}")),
                None => HarnessError::config(format!("{key}: {m}")),
            })?;
        }
        cfg.resolve_source(src)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one override on top of an already valid config (flags win).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(HarnessError::config(format!("unknown key `{key}`")));
        }
        let mut src = SourceKeys::default();
        self.seed_source_keys(&mut src);
        self.apply(key, value, &mut src)
            .map_err(|m| HarnessError::config(format!("{key}: {m}")))?;
        self.resolve_source(src)?;
        self.validate()
    }

    fn seed_source_keys(&self, src: &mut SourceKeys) {
        match &self.data {
            DataSource::Blobs { dim, classes, separation, test_n } => {
                src.dataset = Some("blobs".into());
                src.dim = Some(*dim);
                src.classes = Some(*classes);
                src.separation = Some(*separation);
                src.test_n = Some(*test_n);
            }
            DataSource::Csv { train, test } => {
                src.dataset = Some("csv".into());
                src.train_path = Some(train.clone());
                src.test_path = test.clone();
            }
            DataSource::Idx { train_images, train_labels, test } => {
                src.dataset = Some("idx".into());
                src.train_images = Some(train_images.clone());
                src.train_labels = Some(train_labels.clone());
                if let Some((i, l)) = test {
                    src.test_images = Some(i.clone());
                    src.test_labels = Some(l.clone());
                }
            }
        }
    }

    fn apply(&mut self, key: &str, v: &str, src: &mut SourceKeys) -> std::result::Result<(), String> {
        match key {
            "mode" => self.mode = Some(v.parse()?),
            "dataset" => src.dataset = Some(v.to_ascii_lowercase()),
            "dim" => src.dim = Some(parse_num(key, v)?),
            "classes" => src.classes = Some(parse_num(key, v)?),
            "separation" => src.separation = Some(parse_num(key, v)?),
            "test_n" => src.test_n = Some(parse_num(key, v)?),
            "train_path" => src.train_path = Some(v.into()),
            "test_path" => src.test_path = Some(v.into()),
            "train_images" => src.train_images = Some(v.into()),
            "train_labels" => src.train_labels = Some(v.into()),
            "test_images" => src.test_images = Some(v.into()),
            "test_labels" => src.test_labels = Some(v.into()),
            "n" => self.n = parse_num(key, v)?,
            "limit" => self.limit = Some(parse_num(key, v)?),
            "stream" => self.stream = v.parse().map_err(|e: taks_core::Error| e.to_string())?,
            "clean_fraction" => self.clean_fraction = parse_num(key, v)?,
            "noise_scale" => self.noise_scale = parse_num(key, v)?,
            "drift_period" => self.drift_period = Some(parse_num(key, v)?),
            "stream_path" => self.stream_path = Some(v.into()),
            "dump_stream" => self.dump_stream = parse_num(key, v)?,
            "selectors" | "selector" => {
                self.selectors = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<Strategy>().map_err(|e| e.to_string()))
                    .collect::<std::result::Result<_, _>>()?;
            }
            "k" => {
                self.k = Some(parse_num(key, v)?);
                self.k_frac = None;
            }
            "k_frac" => {
                self.k_frac = Some(parse_num(key, v)?);
                self.k = None;
            }
            "epochs" => self.epochs = parse_num(key, v)?,
            "eta_coef" => self.eta_coef = parse_num(key, v)?,
            "seeds" | "seed" => self.seeds = parse_seeds(v)?,
            "noise" => {
                self.noise = match v {
                    "none" | "" => None,
                    _ => Some(v.parse().map_err(|e: taks_core::Error| e.to_string())?),
                }
            }
            "gamma" => self.gamma = Some(parse_num(key, v)?),
            "validation_fraction" => self.validation_fraction = parse_num(key, v)?,
            "grid_eta_coefs" => self.grid_eta_coefs = parse_list(key, v)?,
            "grid_k_fracs" => self.grid_k_fracs = Some(parse_list(key, v)?),
            "clean_fractions" => self.clean_fractions = parse_list(key, v)?,
            "hidden" => self.hidden = parse_num(key, v)?,
            "learning_rate" => self.learning_rate = parse_num(key, v)?,
            "batch_size" => self.batch_size = parse_num(key, v)?,
            "alpha" => self.alpha = Some(parse_num(key, v)?),
            "out" => self.out = v.into(),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    fn resolve_source(&mut self, src: SourceKeys) -> Result<()> {
        let has_idx = src.train_images.is_some() || src.train_labels.is_some();
        let has_csv = src.train_path.is_some();
        let inferred = match (has_idx, has_csv) {
            (true, true) => return Err(HarnessError::config("give either train_path or train_images/train_labels")),
            (true, false) => "idx",
            (false, true) => "csv",
            (false, false) => "blobs",
        };
        let kind = src.dataset.as_deref().unwrap_or(inferred);
        if (has_idx || has_csv) && kind != inferred {
            return Err(HarnessError::config(format!("dataset = {kind} conflicts with the {inferred} file keys")));
        }
        self.data = match kind {
            "blobs" => {
                let DataSource::Blobs { dim, classes, separation, test_n } = Self::default().data else {
                    unreachable!("default source is blobs")
                };
                DataSource::Blobs {
                    dim: src.dim.unwrap_or(dim),
                    classes: src.classes.unwrap_or(classes),
                    separation: src.separation.unwrap_or(separation),
                    test_n: src.test_n.unwrap_or(test_n),
                }
            }
            "csv" => DataSource::Csv {
                train: src
                    .train_path
                    .ok_or_else(|| HarnessError::config("dataset = csv needs train_path"))?,
                test: src.test_path,
            },
            "idx" => {
                let (Some(train_images), Some(train_labels)) = (src.train_images, src.train_labels) else {
                    return Err(HarnessError::config("dataset = idx needs train_images and train_labels"));
                };
                let test = match (src.test_images, src.test_labels) {
                    (Some(i), Some(l)) => Some((i, l)),
                    (None, None) => None,
                    _ => return Err(HarnessError::config("test_images and test_labels go together")),
                };
                DataSource::Idx { train_images, train_labels, test }
            }
            other => return Err(HarnessError::config(format!("unknown dataset `{other}` (blobs, csv, idx)"))),
        };
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(HarnessError::config(m));
        if self.n == 0 {
            return fail("n must be positive".into());
        }
        if self.epochs == 0 {
            return fail("epochs must be positive".into());
        }
        if self.seeds.is_empty() {
            return fail("seeds must not be empty".into());
        }
        if self.selectors.is_empty() {
            return fail("selector list is empty".into());
        }
        if !(self.eta_coef >= 0.0 && self.eta_coef.is_finite()) {
            return fail(format!("eta_coef {} must be finite and >= 0", self.eta_coef));
        }
        if let Some(f) = self.k_frac {
            if !(f > 0.0 && f <= 1.0) {
                return fail(format!("k_frac {f} must lie in (0, 1]"));
            }
        }
        if self.drift_period == Some(0) {
            return fail("drift_period must be at least 1".into());
        }
        if self.k == Some(0) {
            return fail("k must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.clean_fraction) {
            return fail(format!("clean_fraction {} must lie in [0, 1]", self.clean_fraction));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return fail(format!("noise_scale {} must be finite and >= 0", self.noise_scale));
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return fail(format!("gamma {g} must lie in [0, 1)"));
            }
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return fail(format!("validation_fraction {} must lie in (0, 1)", self.validation_fraction));
        }
        if self.grid_eta_coefs.is_empty() || self.grid_eta_coefs.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
            return fail("grid_eta_coefs must be a non-empty list of finite values >= 0".into());
        }
        if let Some(f) = &self.grid_k_fracs {
            if f.is_empty() || f.iter().any(|x| !x.is_finite()) {
                return fail("grid_k_fracs must be a non-empty list of numbers".into());
            }
        }
        if self.clean_fractions.is_empty() {
            return fail("clean_fractions must not be empty".into());
        }
        if let Some(bad) = self.clean_fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return fail(format!("clean fraction {bad} outside [0, 1]"));
        }
        if self.hidden == 0 || self.batch_size == 0 {
            return fail("hidden and batch_size must be positive".into());
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate {} must be finite and >= 0", self.learning_rate));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return fail(format!("alpha {a} must lie in (0, 1]"));
            }
        }
        if let DataSource::Blobs { dim, classes, separation, test_n } = &self.data {
            if *dim == 0 || *classes == 0 || *test_n == 0 || !(*separation > 0.0) {
                return fail("blobs need positive dim, classes, test_n and separation".into());
            }
        }
        Ok(())
    }

    /// `k` for a training set of `n` samples: explicit `k`, else
    /// `round(k_frac * n)`, else `n / 2`; always clamped to `[1, n]`.
    pub fn resolve_k(&self, n: usize) -> usize {
        let raw = match (self.k, self.k_frac) {
            (Some(k), _) => k,
            (None, Some(f)) => (f * n as f64).round() as usize,
            (None, None) => n / 2,
        };
        let k = raw.clamp(1, n.max(1));
        if k != raw {
            log::warn!("k = {raw} clamped to {k} for n = {n}");
        }
        k
    }

    /// `eta_coef * sqrt(k T)`.
    pub fn eta(&self, k: usize) -> f64 {
        resolve_eta(self.eta_coef, k, self.epochs)
    }

    /// The noise rate the grid search centres its k fractions on.
    pub fn estimated_noise_rate(&self) -> Option<f64> {
        self.gamma.or_else(|| self.noise.as_ref().map(|s| s.rate))
    }
}

pub fn resolve_eta(eta_coef: f64, k: usize, epochs: usize) -> f64 {
    eta_coef * ((k * epochs) as f64).sqrt()
}
