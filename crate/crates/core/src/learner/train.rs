use std::time::Instant;

use rand::seq::SliceRandom;

use super::mlp::{argmax, Mlp, Scratch, DEFAULT_HIDDEN};
use super::Dataset;
use crate::error::{check_dim, Error, Result};
use crate::kset::{check_k, hindsight_best, CumulativeRisk, rng_from_seed, KSetSelection, RiskVector, Selector, SelectorConfig, Strategy};
use crate::regret::label_precision;
use crate::risk::{noise_risk, Prediction};

// generator streams derived from the run seed; 0 belongs to the selector
const INIT_STREAM: u64 = 4;
const SHUFFLE_STREAM: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub k: usize,
    pub eta: f64,
    pub strategy: Strategy,
    pub seed: u64,
}

impl TrainConfig {
    /// Defaults: 256 hidden units, learning rate 0.05, batches of 32 and
    /// `eta = 1e-3 * sqrt(k T)`.
    pub fn new(k: usize, epochs: usize, strategy: Strategy, seed: u64) -> Self {
        Self {
            hidden: DEFAULT_HIDDEN,
            learning_rate: 0.05,
            batch_size: 32,
            epochs,
            k,
            eta: 1e-3 * ((k * epochs) as f64).sqrt(),
            strategy,
            seed,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.hidden == 0 || self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::param("hidden size, batch size and epochs must be positive"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::param(format!("learning rate {} must be finite and >= 0", self.learning_rate)));
        }
        check_k(n, self.k)?;
        self.selector_config().validate(n)
    }

    fn selector_config(&self) -> SelectorConfig {
        SelectorConfig { strategy: self.strategy, eta: self.eta, k: self.k, seed: self.seed }
    }
}

/// One row of a training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// `d_t · θ_t`.
    pub selection_risk: f64,
    /// `Σ_{τ≤t} d_τ·θ_τ`.
    pub total_selection_risk: f64,
    /// Total selection risk minus that of the best fixed k-set so far.
    pub cum_regret: f64,
    pub label_precision: f64,
    /// Accuracy on the selected samples against their assigned labels.
    pub train_acc: f64,
    pub test_acc: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: Mlp,
    pub metrics: Vec<EpochMetrics>,
    /// `d_T`, the set trained on in the final epoch.
    pub last_selection: KSetSelection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub predictions: Vec<Prediction>,
}

/// One pass of mini-batch SGD over the selected samples in shuffled order.
/// Each step uses the batch-mean gradient. Returns the mean loss.
pub fn train_epoch<R: rand::Rng + ?Sized>(
    model: &mut Mlp,
    data: &Dataset,
    selection: &KSetSelection,
    learning_rate: f64,
    batch_size: usize,
    rng: &mut R,
) -> Result<f64> {
    check_dim(data.len(), selection.n())?;
    check_dim(data.dim(), model.input_dim())?;
    if batch_size == 0 {
        return Err(Error::param("batch size must be positive"));
    }
    let mut order = selection.indices().to_vec();
    order.shuffle(rng);
    let labels = data.assigned_labels();
    let mut grad = vec![0.0; model.params().len()];
    let mut scratch = Scratch::default();
    let mut loss = 0.0;
    for batch in order.chunks(batch_size) {
        grad.fill(0.0);
        let scale = 1.0 / batch.len() as f64;
        for &i in batch {
            loss += model.accumulate_gradient(data.sample(i), labels[i], scale, &mut grad, &mut scratch)?;
        }
        model.apply_gradient(&grad, learning_rate)?;
    }
    Ok(loss / order.len() as f64)
}

/// Argmax predictions for every sample, scored against the assigned labels.
pub fn evaluate(model: &Mlp, data: &Dataset) -> Result<Evaluation> {
    if data.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    check_dim(model.input_dim(), data.dim())?;
    let mut scratch = Scratch::default();
    let mut correct = 0usize;
    let mut predictions = Vec::with_capacity(data.len());
    for (i, &assigned) in data.assigned_labels().iter().enumerate() {
        let p = model.forward_into(data.sample(i), &mut scratch)?;
        let predicted = argmax(p);
        correct += usize::from(predicted == assigned);
        predictions.push(Prediction { predicted_label: predicted, confidence: p[predicted], assigned_label: assigned });
    }
    Ok(Evaluation { accuracy: correct as f64 / data.len() as f64, predictions })
}

/// θ for every training sample under the current model.
pub fn risk_vector(predictions: &[Prediction]) -> Result<RiskVector> {
    RiskVector::new(predictions.iter().map(noise_risk).collect::<Result<_>>()?)
}

/// The full selection loop: train on `d_t`, score all `n` samples, feed
/// `θ_t` to the selector, ask for `d_{t+1}`.
pub fn taks_train(train: &Dataset, test: Option<&Dataset>, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate(train.len())?;
    let mut selector = Selector::new(train.len(), cfg.selector_config())?;
    let first = selector.initial();
    run(train, test, cfg, first, |theta| {
        selector.observe(theta)?;
        selector.next_selection().map(Some)
    })
}

/// Trains on the same `selection` every epoch, still scoring all samples.
pub fn train_fixed_selection(
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: &TrainConfig,
    selection: &KSetSelection,
) -> Result<TrainOutcome> {
    check_dim(train.len(), selection.n())?;
    let cfg = TrainConfig { k: selection.k(), ..*cfg };
    cfg.validate(train.len())?;
    run(train, test, &cfg, selection.clone(), |_| Ok(None))
}

fn run(
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: &TrainConfig,
    first: KSetSelection,
    mut next: impl FnMut(RiskVector) -> Result<Option<KSetSelection>>,
) -> Result<TrainOutcome> {
    if let Some(t) = test {
        check_dim(train.dim(), t.dim())?;
    }
    let mut init_rng = rng_from_seed(cfg.seed, INIT_STREAM);
    let mut shuffle_rng = rng_from_seed(cfg.seed, SHUFFLE_STREAM);
    let mut model = Mlp::init(train.dim(), cfg.hidden, train.num_classes(), &mut init_rng)?;
    let clean = train.clean_mask();
    let mut cum = CumulativeRisk::new(train.len());
    let mut total = 0.0;
    let mut metrics = Vec::with_capacity(cfg.epochs);
    let mut d = first;

    for epoch in 1..=cfg.epochs {
        let start = Instant::now();
        train_epoch(&mut model, train, &d, cfg.learning_rate, cfg.batch_size, &mut shuffle_rng)?;
        let eval = evaluate(&model, train)?;
        let theta = risk_vector(&eval.predictions)?;

        let selection_risk = d.dot(theta.values())?;
        total += selection_risk;
        cum.accumulate(&theta)?;
        let best = hindsight_best(&cum, d.k())?.dot(cum.sums())?;
        let hits = d.indices().iter().filter(|&&i| eval.predictions[i].is_match()).count();
        let row = EpochMetrics {
            epoch,
            selection_risk,
            total_selection_risk: total,
            cum_regret: total - best,
            label_precision: label_precision(&d, &clean)?,
            train_acc: hits as f64 / d.k() as f64,
            test_acc: test.map(|t| evaluate(&model, t).map(|e| e.accuracy)).transpose()?,
            wall_ms: 0.0,
        };

        if epoch < cfg.epochs {
            if let Some(d_next) = next(theta)? {
                d = d_next;
            }
        }
        metrics.push(EpochMetrics { wall_ms: start.elapsed().as_secs_f64() * 1e3, ..row });
    }
    Ok(TrainOutcome { model, metrics, last_selection: d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::{inject_symmetric_noise, make_blobs};
    use rand::Rng;

    fn blobs(n: usize, seed: u64) -> Dataset {
        make_blobs(n, 2, 4, 6.0, seed).unwrap()
    }

    fn small_cfg(k: usize, epochs: usize, strategy: Strategy, seed: u64) -> TrainConfig {
        TrainConfig { hidden: 16, ..TrainConfig::new(k, epochs, strategy, seed) }
    }

    #[test]
    fn zero_learning_rate_leaves_model_bitwise() {
        let ds = blobs(60, 1);
        let mut rng = rng_from_seed(3, 0);
        let mut model = Mlp::init(2, 8, 4, &mut rng).unwrap();
        let before = model.clone();
        train_epoch(&mut model, &ds, &KSetSelection::all(60), 0.0, 7, &mut rng).unwrap();
        let same = before.params().iter().zip(model.params()).all(|(a, b)| a.to_bits() == b.to_bits());
        assert!(same);
    }

    #[test]
    fn single_sample_step_matches_backward() {
        let ds = blobs(10, 2);
        let mut rng = rng_from_seed(4, 0);
        let mut model = Mlp::init(2, 5, 4, &mut rng).unwrap();
        let sel = KSetSelection::new(vec![6], 10).unwrap();
        let g = model.backward(ds.sample(6), ds.assigned_labels()[6]).unwrap();
        let expected: Vec<f64> = model.params().iter().zip(&g).map(|(p, gi)| p - 0.3 * gi).collect();
        train_epoch(&mut model, &ds, &sel, 0.3, 1, &mut rng).unwrap();
        assert_eq!(model.params(), expected.as_slice());
    }

    #[test]
    fn batch_step_uses_mean_gradient() {
        let ds = blobs(10, 2);
        let mut rng = rng_from_seed(5, 0);
        let mut model = Mlp::init(2, 5, 4, &mut rng).unwrap();
        let sel = KSetSelection::new(vec![1, 4, 8], 10).unwrap();
        let mut mean = vec![0.0; model.params().len()];
        for &i in sel.indices() {
            for (m, g) in mean.iter_mut().zip(model.backward(ds.sample(i), ds.assigned_labels()[i]).unwrap()) {
                *m += g / 3.0;
            }
        }
        let expected: Vec<f64> = model.params().iter().zip(&mean).map(|(p, g)| p - 0.1 * g).collect();
        train_epoch(&mut model, &ds, &sel, 0.1, 3, &mut rng).unwrap();
        for (a, b) in model.params().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn clean_selection_is_learned() {
        let ds = blobs(800, 3);
        let noisy = inject_symmetric_noise(ds.true_labels(), 0.5, 4, 3).unwrap();
        let ds = ds.with_assigned_labels(noisy).unwrap();
        let clean: Vec<usize> = (0..ds.len()).filter(|&i| ds.clean_mask()[i]).collect();
        let sel = KSetSelection::new(clean, ds.len()).unwrap();
        let mut rng = rng_from_seed(9, 0);
        let mut model = Mlp::init(2, 32, 4, &mut rng).unwrap();
        for _ in 0..50 {
            train_epoch(&mut model, &ds, &sel, 0.05, 16, &mut rng).unwrap();
        }
        let acc = evaluate(&model, &ds.subset(sel.indices())).unwrap().accuracy;
        assert!(acc > 0.99, "{acc}");
    }

    #[test]
    fn uniform_model_scores_chance() {
        let (n, c) = (10_000, 5);
        let mut rng = rng_from_seed(12, 0);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let ds = Dataset::new(vec![0.5; n], 1, labels, c).unwrap();
        let eval = evaluate(&Mlp::zeros(1, 3, c).unwrap(), &ds).unwrap();
        assert!((eval.accuracy - 0.2).abs() < 0.02, "{}", eval.accuracy);
        assert!(eval.predictions.iter().all(|p| p.predicted_label == 0));
        let indicators = eval.predictions.iter().filter(|p| p.is_match()).count() as f64 / n as f64;
        assert!((indicators - eval.accuracy).abs() < 1e-12);
    }

    #[test]
    fn hand_built_model_is_perfect() {
        // relu(x) and relu(-x) feed the two classes
        let mut m = Mlp::zeros(1, 2, 2).unwrap();
        m.params_mut()[..2].copy_from_slice(&[1.0, -1.0]);
        m.w2_mut().copy_from_slice(&[0.0, 5.0, 5.0, 0.0]);
        let xs = vec![-2.0, -0.5, 0.7, 3.0];
        let ds = Dataset::new(xs, 1, vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(evaluate(&m, &ds).unwrap().accuracy, 1.0);
        assert!(evaluate(&m, &ds.subset(&[])).is_err());
    }

    #[test]
    fn random_with_all_samples_is_standard_training() {
        let ds = blobs(200, 4);
        let cfg = small_cfg(200, 5, Strategy::Random, 8);
        let out = taks_train(&ds, None, &cfg).unwrap();

        let mut init_rng = rng_from_seed(8, INIT_STREAM);
        let mut shuffle_rng = rng_from_seed(8, SHUFFLE_STREAM);
        let mut model = Mlp::init(2, 16, 4, &mut init_rng).unwrap();
        for _ in 0..5 {
            train_epoch(&mut model, &ds, &KSetSelection::all(200), cfg.learning_rate, cfg.batch_size, &mut shuffle_rng)
                .unwrap();
        }
        assert_eq!(out.model, model);
        assert!(out.metrics.iter().all(|m| m.label_precision == 1.0));
    }

    fn strip_time(m: &[EpochMetrics]) -> Vec<EpochMetrics> {
        m.iter().map(|r| EpochMetrics { wall_ms: 0.0, ..*r }).collect()
    }

    #[test]
    fn fpl_without_noise_is_naive() {
        let ds = blobs(300, 5);
        let noisy = inject_symmetric_noise(ds.true_labels(), 0.3, 4, 5).unwrap();
        let ds = ds.with_assigned_labels(noisy).unwrap();
        let fpl = TrainConfig { eta: 0.0, ..small_cfg(150, 8, Strategy::Fpl, 2) };
        let naive = TrainConfig { strategy: Strategy::Naive, ..fpl };
        let a = taks_train(&ds, None, &fpl).unwrap();
        let b = taks_train(&ds, None, &naive).unwrap();
        assert_eq!(strip_time(&a.metrics), strip_time(&b.metrics));
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn runs_are_deterministic_and_well_formed() {
        let ds = blobs(300, 6);
        let test = blobs(100, 60);
        let cfg = small_cfg(120, 6, Strategy::Fpl, 3);
        let a = taks_train(&ds, Some(&test), &cfg).unwrap();
        let b = taks_train(&ds, Some(&test), &cfg).unwrap();
        assert_eq!(strip_time(&a.metrics), strip_time(&b.metrics));
        for (t, m) in a.metrics.iter().enumerate() {
            assert_eq!(m.epoch, t + 1);
            assert!((0.0..=120.0).contains(&m.selection_risk));
            assert!(m.test_acc.is_some());
        }
        assert_eq!(a.last_selection.k(), 120);
        let other = taks_train(&ds, Some(&test), &TrainConfig { seed: 4, ..cfg }).unwrap();
        assert_ne!(strip_time(&a.metrics), strip_time(&other.metrics));
    }

    #[test]
    fn fixed_selection_never_moves() {
        let ds = blobs(100, 7);
        let sel = KSetSelection::new((0..40).collect(), 100).unwrap();
        let out = train_fixed_selection(&ds, None, &small_cfg(1, 4, Strategy::Fpl, 0), &sel).unwrap();
        assert_eq!(out.last_selection, sel);
        let total: f64 = out.metrics.iter().map(|m| m.selection_risk).sum();
        assert!((out.metrics[3].total_selection_risk - total).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let ds = blobs(50, 1);
        assert!(taks_train(&ds, None, &small_cfg(0, 3, Strategy::Fpl, 0)).is_err());
        assert!(taks_train(&ds, None, &small_cfg(51, 3, Strategy::Fpl, 0)).is_err());
        assert!(taks_train(&ds, None, &small_cfg(5, 0, Strategy::Fpl, 0)).is_err());
        let bad_lr = TrainConfig { learning_rate: f64::NAN, ..small_cfg(5, 3, Strategy::Fpl, 0) };
        assert!(taks_train(&ds, None, &bad_lr).is_err());
        let greedy = taks_train(&ds, None, &small_cfg(5, 3, Strategy::Greedy, 0));
        assert!(greedy.is_ok());
    }
}
