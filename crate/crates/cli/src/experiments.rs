//! The six experiment modes. Each `run_*` function is pure apart from
//! reading input data; writing results is left to [`crate::output`].

use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use taks_core::kset::{hindsight_best, rng_from_seed, CumulativeRisk, KSetSelection};
use taks_core::learner::{
    load_csv, load_idx, make_blobs, taks_train, train_fixed_selection, Dataset, EpochMetrics, LabelNoiseSpec,
    TrainConfig,
};
use taks_core::regret::{
    alpha_regret_bound, corollary2_bound, label_precision, theorem1_bound, BoundReport, SelectionTrace,
};
use taks_core::risk::{read_stream_csv, RiskStream, StreamSpec};
use taks_core::{Selector, SelectorConfig, Strategy};

use crate::config::{resolve_eta, DataSource, ExperimentConfig};
use crate::error::{HarnessError, Result};

/// Last-epoch window for the accuracy/precision summaries.
pub const SUMMARY_WINDOW: usize = 10;

// offsets that keep derived seeds apart from the run seed itself
const TEST_SEED_OFFSET: u64 = 0x7E57_0000_0000;
const FIXED_SELECTION_STREAM: u64 = 9;

/// One per-epoch output row. Columns that do not apply to a mode are empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub run_seed: u64,
    pub epoch: usize,
    pub selection_risk: f64,
    pub cum_regret: f64,
    pub label_precision: Option<f64>,
    pub train_acc: Option<f64>,
    pub test_acc: Option<f64>,
    pub wall_ms: f64,
}

impl MetricRow {
    fn from_epoch(run_seed: u64, m: &EpochMetrics) -> Self {
        Self {
            run_seed,
            epoch: m.epoch,
            selection_risk: m.selection_risk,
            cum_regret: m.cum_regret,
            label_precision: Some(m.label_precision),
            train_acc: Some(m.train_acc),
            test_acc: m.test_acc,
            wall_ms: m.wall_ms,
        }
    }
}

/// All seeds of one selector.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectorRuns {
    pub strategy: Strategy,
    pub rows: Vec<MetricRow>,
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = xs.into_iter().fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSummary {
    pub strategy: Strategy,
    pub mean_regret: f64,
    pub mean_asr: f64,
    pub mean_alpha: f64,
    /// Absent when `k` is outside `[1, n-1]`.
    pub theorem1: Option<f64>,
    /// Mean over seeds of the bound at each run's own α.
    pub mean_corollary2: Option<f64>,
    pub per_seed_regret: Vec<f64>,
    pub per_seed_asr: Vec<f64>,
}

impl SimulateSummary {
    pub fn within_theorem1(&self) -> Option<bool> {
        self.theorem1.map(|b| self.mean_regret <= b)
    }

    pub fn within_corollary2(&self) -> Option<bool> {
        self.mean_corollary2.map(|b| self.mean_asr <= b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub n: usize,
    pub k: usize,
    pub epochs: usize,
    pub eta: f64,
    pub runs: Vec<SelectorRuns>,
    pub summaries: Vec<SimulateSummary>,
    /// Streams by seed, kept only when `dump_stream` is set.
    pub streams: Vec<(u64, RiskStream)>,
}

fn stream_for(cfg: &ExperimentConfig, seed: u64, replay: Option<&RiskStream>) -> Result<RiskStream> {
    if let Some(s) = replay {
        return Ok(s.clone());
    }
    let spec = StreamSpec {
        kind: cfg.stream,
        n: cfg.n,
        t: cfg.epochs,
        clean_fraction: cfg.clean_fraction,
        noise_scale: cfg.noise_scale,
        seed,
        drift_period: cfg.drift_period.unwrap_or(cfg.epochs),
    };
    Ok(spec.generate()?)
}

/// Plays one selector against a fixed stream.
pub fn play_stream(stream: &RiskStream, cfg: SelectorConfig, run_seed: u64) -> Result<(Vec<MetricRow>, SelectionTrace)> {
    let n = stream.n();
    let mut selector = Selector::new(n, cfg)?;
    let mut cum = CumulativeRisk::new(n);
    let mut trace = SelectionTrace::default();
    let mut rows = Vec::with_capacity(stream.len());
    let mut d = selector.initial();
    let mut total = 0.0;
    for (t, theta) in stream.vectors.iter().enumerate() {
        let start = Instant::now();
        let risk = d.dot(theta.values())?;
        total += risk;
        cum.accumulate(theta)?;
        let best = hindsight_best(&cum, cfg.k)?.dot(cum.sums())?;
        let precision = match &stream.clean_mask {
            Some(mask) => Some(label_precision(&d, mask)?),
            None => None,
        };
        trace.push(d.clone(), theta.clone())?;
        selector.observe(theta.clone())?;
        if t + 1 < stream.len() {
            d = selector.next_selection()?;
        }
        rows.push(MetricRow {
            run_seed,
            epoch: t + 1,
            selection_risk: risk,
            cum_regret: total - best,
            label_precision: precision,
            train_acc: None,
            test_acc: None,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok((rows, trace))
}

pub fn run_simulate(cfg: &ExperimentConfig) -> Result<SimulateReport> {
    let replay = match &cfg.stream_path {
        Some(p) => {
            let f = std::fs::File::open(p)
                .map_err(|e| HarnessError::data(format!("cannot open stream {}: {e}", p.display())))?;
            Some(read_stream_csv(f).map_err(|e| HarnessError::data(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };
    let streams: Vec<(u64, RiskStream)> = cfg
        .seeds
        .iter()
        .map(|&s| stream_for(cfg, s, replay.as_ref()).map(|st| (s, st)))
        .collect::<Result<_>>()?;
    let (n, epochs) = (streams[0].1.n(), streams[0].1.len());
    let k = cfg.resolve_k(n);
    let eta = resolve_eta(cfg.eta_coef, k, epochs);

    let jobs: Vec<(Strategy, usize)> = cfg
        .selectors
        .iter()
        .flat_map(|&s| (0..streams.len()).map(move |i| (s, i)))
        .collect();
    let results: Vec<(Vec<MetricRow>, BoundReport)> = jobs
        .par_iter()
        .map(|&(strategy, i)| {
            let (seed, stream) = &streams[i];
            let (rows, trace) = play_stream(stream, SelectorConfig { strategy, eta, k, seed: *seed }, *seed)?;
            Ok((rows, BoundReport::from_trace(&trace)?))
        })
        .collect::<Result<_>>()?;

    let mut runs = Vec::new();
    let mut summaries = Vec::new();
    for (chunk, &strategy) in results.chunks(streams.len()).zip(&cfg.selectors) {
        let reports: Vec<&BoundReport> = chunk.iter().map(|(_, b)| b).collect();
        let cor: Vec<Option<f64>> = reports.iter().map(|b| b.corollary2).collect();
        summaries.push(SimulateSummary {
            strategy,
            mean_regret: mean(reports.iter().map(|b| b.empirical_regret)),
            mean_asr: mean(reports.iter().map(|b| b.empirical_asr)),
            mean_alpha: mean(reports.iter().filter_map(|b| b.alpha)),
            theorem1: theorem1_bound(n, k, epochs).ok(),
            mean_corollary2: cor.iter().all(Option::is_some).then(|| mean(cor.iter().flatten().copied())),
            per_seed_regret: reports.iter().map(|b| b.empirical_regret).collect(),
            per_seed_asr: reports.iter().map(|b| b.empirical_asr).collect(),
        });
        runs.push(SelectorRuns { strategy, rows: chunk.iter().flat_map(|(r, _)| r.iter().copied()).collect() });
    }
    let streams = if cfg.dump_stream && replay.is_none() { streams } else { Vec::new() };
    Ok(SimulateReport { n, k, epochs, eta, runs, summaries, streams })
}

// ------------------------------------------------------------ data loading

/// Data shared by every seed (loaded files), or `None` for blobs.
#[derive(Debug, Clone)]
pub struct LoadedData {
    train: Dataset,
    test: Option<Dataset>,
}

pub fn load_data(cfg: &ExperimentConfig) -> Result<Option<LoadedData>> {
    let limited = |d: Dataset| -> Dataset {
        match cfg.limit {
            Some(l) if l < d.len() => d.subset(&(0..l).collect::<Vec<_>>()),
            _ => d,
        }
    };
    let open_csv = |p: &std::path::Path| -> Result<Dataset> {
        let f = std::fs::File::open(p).map_err(|e| HarnessError::data(format!("cannot open {}: {e}", p.display())))?;
        load_csv(f).map_err(|e| HarnessError::data(format!("{}: {e}", p.display())))
    };
    let loaded = match &cfg.data {
        DataSource::Blobs { .. } => return Ok(None),
        DataSource::Csv { train, test } => LoadedData {
            train: limited(open_csv(train)?),
            test: test.as_deref().map(open_csv).transpose()?,
        },
        DataSource::Idx { train_images, train_labels, test } => LoadedData {
            train: limited(load_idx(train_images, train_labels)?),
            test: test.as_ref().map(|(i, l)| load_idx(i, l)).transpose()?,
        },
    };
    if let Some(t) = &loaded.test {
        if t.dim() != loaded.train.dim() {
            return Err(HarnessError::data(format!(
                "test features have {} columns, training features {}",
                t.dim(),
                loaded.train.dim()
            )));
        }
    }
    Ok(Some(loaded))
}

/// Training set (labels noised with the run seed) and clean test set.
pub fn prepare_data(
    cfg: &ExperimentConfig,
    noise: Option<&LabelNoiseSpec>,
    seed: u64,
    loaded: Option<&LoadedData>,
) -> Result<(Dataset, Option<Dataset>)> {
    let (train, test) = match (&cfg.data, loaded) {
        (DataSource::Blobs { dim, classes, separation, test_n }, _) => (
            make_blobs(cfg.n, *dim, *classes, *separation, seed)?,
            Some(make_blobs(*test_n, *dim, *classes, *separation, seed ^ TEST_SEED_OFFSET)?),
        ),
        (_, Some(l)) => (l.train.clone(), l.test.clone()),
        (_, None) => return Err(HarnessError::data("dataset was not loaded")),
    };
    let train = match noise {
        Some(spec) => {
            let noisy = spec.clone().with_seed(seed).apply(train.true_labels(), train.num_classes())?;
            train.with_assigned_labels(noisy)?
        }
        None => train,
    };
    Ok((train, test))
}

fn train_config(cfg: &ExperimentConfig, strategy: Strategy, k: usize, eta_coef: f64, seed: u64) -> TrainConfig {
    TrainConfig {
        hidden: cfg.hidden,
        learning_rate: cfg.learning_rate,
        batch_size: cfg.batch_size,
        epochs: cfg.epochs,
        k,
        eta: resolve_eta(eta_coef, k, cfg.epochs),
        strategy,
        seed,
    }
}

// ------------------------------------------------------------ train/ablate

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub strategy: Strategy,
    pub run_seed: u64,
    /// Mean test accuracy over the last [`SUMMARY_WINDOW`] epochs; falls back
    /// to training accuracy when there is no test set.
    pub last_acc: f64,
    pub last_precision: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub k: usize,
    pub eta: f64,
    pub runs: Vec<SelectorRuns>,
    pub summaries: Vec<TrainSummary>,
}

impl TrainReport {
    /// Mean over seeds of the last-window accuracy and precision.
    pub fn mean_for(&self, strategy: Strategy) -> Option<(f64, f64)> {
        let s: Vec<&TrainSummary> = self.summaries.iter().filter(|s| s.strategy == strategy).collect();
        (!s.is_empty()).then(|| (mean(s.iter().map(|x| x.last_acc)), mean(s.iter().map(|x| x.last_precision))))
    }
}

fn window_summary(strategy: Strategy, run_seed: u64, metrics: &[EpochMetrics]) -> TrainSummary {
    let tail = &metrics[metrics.len().saturating_sub(SUMMARY_WINDOW)..];
    let acc = if tail.iter().all(|m| m.test_acc.is_some()) {
        mean(tail.iter().filter_map(|m| m.test_acc))
    } else {
        mean(tail.iter().map(|m| m.train_acc))
    };
    TrainSummary { strategy, run_seed, last_acc: acc, last_precision: mean(tail.iter().map(|m| m.label_precision)) }
}

fn train_selectors(cfg: &ExperimentConfig, strategies: &[Strategy]) -> Result<TrainReport> {
    let loaded = load_data(cfg)?;
    let jobs: Vec<(Strategy, u64)> = strategies
        .iter()
        .flat_map(|&s| cfg.seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let results: Vec<(usize, Vec<EpochMetrics>)> = jobs
        .par_iter()
        .map(|&(strategy, seed)| {
            let (train, test) = prepare_data(cfg, cfg.noise.as_ref(), seed, loaded.as_ref())?;
            let k = cfg.resolve_k(train.len());
            let tc = train_config(cfg, strategy, k, cfg.eta_coef, seed);
            Ok((k, taks_train(&train, test.as_ref(), &tc)?.metrics))
        })
        .collect::<Result<_>>()?;
    let k = results[0].0;
    let mut runs = Vec::new();
    let mut summaries = Vec::new();
    for (chunk, &strategy) in results.chunks(cfg.seeds.len()).zip(strategies) {
        let mut rows = Vec::new();
        for ((_, metrics), &seed) in chunk.iter().zip(&cfg.seeds) {
            rows.extend(metrics.iter().map(|m| MetricRow::from_epoch(seed, m)));
            summaries.push(window_summary(strategy, seed, metrics));
        }
        runs.push(SelectorRuns { strategy, rows });
    }
    Ok(TrainReport { k, eta: cfg.eta(k), runs, summaries })
}

pub fn run_train(cfg: &ExperimentConfig) -> Result<TrainReport> {
    train_selectors(cfg, &cfg.selectors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub strategy: Strategy,
    pub mean_acc: f64,
    pub mean_precision: f64,
    pub winner: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub train: TrainReport,
    pub rows: Vec<AblationRow>,
    /// FPL's mean accuracy is at least that of every other selector.
    pub fpl_best: bool,
}

pub const ABLATION_SELECTORS: [Strategy; 3] = [Strategy::Fpl, Strategy::Greedy, Strategy::Naive];

pub fn run_ablate(cfg: &ExperimentConfig) -> Result<AblationReport> {
    let train = train_selectors(cfg, &ABLATION_SELECTORS)?;
    let means: Vec<(Strategy, f64, f64)> = ABLATION_SELECTORS
        .iter()
        .map(|&s| {
            let (a, p) = train.mean_for(s).expect("every ablation selector was run");
            (s, a, p)
        })
        .collect();
    let best = winner_index(&means.iter().map(|m| m.1).collect::<Vec<_>>());
    let rows: Vec<AblationRow> = means
        .iter()
        .enumerate()
        .map(|(i, &(strategy, mean_acc, mean_precision))| AblationRow {
            strategy,
            mean_acc,
            mean_precision,
            winner: i == best,
        })
        .collect();
    let fpl = rows[0].mean_acc;
    let fpl_best = rows.iter().all(|r| fpl >= r.mean_acc);
    Ok(AblationReport { train, rows, fpl_best })
}

/// Argmax with the earliest index winning ties.
pub fn winner_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

// -------------------------------------------------------------------- grid

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub eta_coef: f64,
    pub k_frac: f64,
    pub k: usize,
    /// Mean over seeds of the last-window accuracy on the noisy validation split.
    pub val_acc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub n_train: usize,
    pub points: Vec<GridPoint>,
    pub best: GridPoint,
}

/// `1 - γ + j * 0.05` for `j = -3..=3`, rounded to 12 decimals.
pub fn k_fraction_grid(gamma: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(HarnessError::config(format!("estimated noise rate {gamma} must lie in [0, 1)")));
    }
    Ok((-3..=3).map(|j| round12(1.0 - gamma + 0.05 * j as f64)).collect())
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `round(frac * n)` clamped to `[1, n]`, warning when clamped.
pub fn grid_k(frac: f64, n: usize) -> usize {
    let raw = (frac * n as f64).round();
    if raw < 1.0 {
        log::warn!("k fraction {frac} gives k = {raw}; clamped to 1");
        1
    } else if raw > n as f64 {
        log::warn!("k fraction {frac} gives k = {raw}; clamped to n = {n}");
        n
    } else {
        raw as usize
    }
}

pub fn run_grid_search(cfg: &ExperimentConfig) -> Result<GridReport> {
    let fracs = match &cfg.grid_k_fracs {
        Some(f) => f.clone(),
        None => {
            let gamma = cfg
                .estimated_noise_rate()
                .ok_or_else(|| HarnessError::config("grid search needs gamma or a noise spec"))?;
            k_fraction_grid(gamma)?
        }
    };
    let strategy = cfg.selectors[0];
    let loaded = load_data(cfg)?;
    let splits: Vec<(Dataset, Dataset)> = cfg
        .seeds
        .iter()
        .map(|&seed| {
            let (train, _) = prepare_data(cfg, cfg.noise.as_ref(), seed, loaded.as_ref())?;
            Ok(train.stratified_split(cfg.validation_fraction, seed)?)
        })
        .collect::<Result<_>>()?;
    let n_train = splits[0].0.len();

    let mut cells = Vec::new();
    for &eta_coef in &cfg.grid_eta_coefs {
        for &frac in &fracs {
            cells.push((eta_coef, frac, grid_k(frac, n_train)));
        }
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..splits.len()).map(move |s| (c, s))).collect();
    let accs: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, s)| {
            let (eta_coef, _, k) = cells[c];
            let (fit, val) = &splits[s];
            let k = k.min(fit.len());
            let tc = train_config(cfg, strategy, k, eta_coef, cfg.seeds[s]);
            let out = taks_train(fit, Some(val), &tc)?;
            Ok(window_summary(strategy, cfg.seeds[s], &out.metrics).last_acc)
        })
        .collect::<Result<_>>()?;
    let points: Vec<GridPoint> = cells
        .iter()
        .zip(accs.chunks(splits.len()))
        .map(|(&(eta_coef, k_frac, k), a)| GridPoint { eta_coef, k_frac, k, val_acc: mean(a.iter().copied()) })
        .collect();
    let best = points[winner_index(&points.iter().map(|p| p.val_acc).collect::<Vec<_>>())].clone();
    Ok(GridReport { n_train, points, best })
}

// ----------------------------------------------------------- validate-risk

#[derive(Debug, Clone, PartialEq)]
pub struct RiskCurveRow {
    pub clean_fraction: f64,
    pub run_seed: u64,
    pub epoch: usize,
    pub selection_risk: f64,
    pub total_selection_risk: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateRiskReport {
    pub k: usize,
    pub rows: Vec<RiskCurveRow>,
    /// `(clean fraction, mean final-epoch total selection risk)`.
    pub finals: Vec<(f64, f64)>,
}

impl ValidateRiskReport {
    /// Final total risk strictly decreases as the clean fraction grows.
    pub fn strictly_decreasing(&self) -> bool {
        let mut sorted = self.finals.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        sorted.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// `round(fraction * k)` clean samples and the rest noisy, drawn at random.
pub fn fixed_mixture(clean_mask: &[bool], k: usize, fraction: f64, seed: u64) -> Result<KSetSelection> {
    let mut rng = rng_from_seed(seed, FIXED_SELECTION_STREAM);
    let mut clean: Vec<usize> = (0..clean_mask.len()).filter(|&i| clean_mask[i]).collect();
    let mut noisy: Vec<usize> = (0..clean_mask.len()).filter(|&i| !clean_mask[i]).collect();
    let want_clean = (fraction * k as f64).round() as usize;
    let want_noisy = k - want_clean.min(k);
    if want_clean > clean.len() || want_noisy > noisy.len() {
        return Err(HarnessError::data(format!(
            "a {k}-set with {want_clean} clean samples needs {want_clean} clean and {want_noisy} noisy, \
             have {} and {}",
            clean.len(),
            noisy.len()
        )));
    }
    clean.shuffle(&mut rng);
    noisy.shuffle(&mut rng);
    let mut pick: Vec<usize> = clean[..want_clean].to_vec();
    pick.extend_from_slice(&noisy[..want_noisy]);
    Ok(KSetSelection::new(pick, clean_mask.len())?)
}

pub fn run_validate_risk(cfg: &ExperimentConfig) -> Result<ValidateRiskReport> {
    let noise = cfg.noise.clone().unwrap_or_else(|| LabelNoiseSpec::symmetric(0.5, 0));
    let loaded = load_data(cfg)?;
    let jobs: Vec<(f64, u64)> = cfg
        .clean_fractions
        .iter()
        .flat_map(|&f| cfg.seeds.iter().map(move |&s| (f, s)))
        .collect();
    let results: Vec<(usize, Vec<EpochMetrics>)> = jobs
        .par_iter()
        .map(|&(fraction, seed)| {
            let (train, test) = prepare_data(cfg, Some(&noise), seed, loaded.as_ref())?;
            let k = cfg.resolve_k(train.len());
            let sel = fixed_mixture(&train.clean_mask(), k, fraction, seed)?;
            let tc = train_config(cfg, Strategy::Fpl, k, cfg.eta_coef, seed);
            Ok((k, train_fixed_selection(&train, test.as_ref(), &tc, &sel)?.metrics))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (&(clean_fraction, run_seed), (_, metrics)) in jobs.iter().zip(&results) {
        rows.extend(metrics.iter().map(|m| RiskCurveRow {
            clean_fraction,
            run_seed,
            epoch: m.epoch,
            selection_risk: m.selection_risk,
            total_selection_risk: m.total_selection_risk,
        }));
    }
    let finals = cfg
        .clean_fractions
        .iter()
        .zip(results.chunks(cfg.seeds.len()))
        .map(|(&f, chunk)| (f, mean(chunk.iter().map(|(_, m)| m.last().expect("epochs >= 1").total_selection_risk))))
        .collect();
    Ok(ValidateRiskReport { k: results[0].0, rows, finals })
}

// ------------------------------------------------------------------ bounds

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub n: usize,
    pub k: usize,
    pub epochs: usize,
    pub theorem1: std::result::Result<f64, String>,
    pub corollary2: Option<std::result::Result<f64, String>>,
    /// `2k sqrt(2 α T ln n)`, the regret term behind the corollary.
    pub alpha_regret: Option<std::result::Result<f64, String>>,
    /// `kT`: no selection can do worse.
    pub ceiling: f64,
}

pub fn run_bounds(n: usize, k: usize, epochs: usize, alpha: Option<f64>) -> Result<BoundsReport> {
    if n == 0 || k == 0 || k > n || epochs == 0 {
        return Err(HarnessError::config(format!("need 1 <= k <= n and T >= 1, got n={n} k={k} T={epochs}")));
    }
    let s = |r: taks_core::Result<f64>| r.map_err(|e| e.to_string());
    Ok(BoundsReport {
        n,
        k,
        epochs,
        theorem1: s(theorem1_bound(n, k, epochs)),
        corollary2: alpha.map(|a| s(corollary2_bound(n, k, epochs, a))),
        alpha_regret: alpha.map(|a| s(alpha_regret_bound(n, k, epochs, a))),
        ceiling: (k * epochs) as f64,
    })
}
