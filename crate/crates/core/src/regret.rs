//! Selection-risk accounting and closed-form regret bounds.

use crate::error::{check_dim, Error, Result};
use crate::kset::{hindsight_best, CumulativeRisk, KSetSelection, RiskVector};

/// The selections `d_1..d_T` together with the feedback `θ_1..θ_T`.
#[derive(Debug, Clone, Default)]
pub struct SelectionTrace {
    selections: Vec<KSetSelection>,
    risks: Vec<RiskVector>,
}

impl SelectionTrace {
    pub fn new(selections: Vec<KSetSelection>, risks: Vec<RiskVector>) -> Result<Self> {
        check_dim(selections.len(), risks.len())?;
        let mut trace = Self::default();
        for (d, theta) in selections.into_iter().zip(risks) {
            trace.push(d, theta)?;
        }
        Ok(trace)
    }

    /// Appends one epoch. The selection and risk vector must agree with the
    /// `(n, k)` of the epochs already recorded.
    pub fn push(&mut self, selection: KSetSelection, theta: RiskVector) -> Result<()> {
        check_dim(selection.n(), theta.len())?;
        if let Some(first) = self.selections.first() {
            check_dim(first.n(), selection.n())?;
            if first.k() != selection.k() {
                return Err(Error::param(format!(
                    "selection size {} differs from earlier epochs ({})",
                    selection.k(),
                    first.k()
                )));
            }
        }
        self.selections.push(selection);
        self.risks.push(theta);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.selections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selections.is_empty()
    }

    pub fn selections(&self) -> &[KSetSelection] {
        &self.selections
    }

    pub fn risks(&self) -> &[RiskVector] {
        &self.risks
    }

    fn shape(&self) -> Result<(usize, usize)> {
        self.selections
            .first()
            .map(|d| (d.n(), d.k()))
            .ok_or(Error::Empty("selection trace"))
    }

    fn cumulative(&self) -> Result<CumulativeRisk> {
        let (n, _) = self.shape()?;
        let mut cum = CumulativeRisk::new(n);
        for theta in &self.risks {
            cum.accumulate(theta)?;
        }
        Ok(cum)
    }
}

/// `Σ_t d_t·θ_t`.
pub fn total_selection_risk(trace: &SelectionTrace) -> Result<f64> {
    trace.shape()?;
    trace
        .selections
        .iter()
        .zip(&trace.risks)
        .map(|(d, theta)| d.dot(theta.values()))
        .sum()
}

/// Total risk of the best fixed k-set in hindsight, `min_d Σ_t d·θ_t`.
pub fn hindsight_total_risk(trace: &SelectionTrace) -> Result<f64> {
    let (_, k) = trace.shape()?;
    let cum = trace.cumulative()?;
    let best = hindsight_best(&cum, k)?;
    // summed per epoch, in the same order as total_selection_risk, so that
    // playing `best` every epoch gives a regret of exactly zero
    trace.risks.iter().map(|theta| best.dot(theta.values())).sum()
}

/// Actual total selection risk minus the hindsight optimum. A single
/// realisation of a randomised selector can come out negative.
pub fn regret(trace: &SelectionTrace) -> Result<f64> {
    Ok(total_selection_risk(trace)? - hindsight_total_risk(trace)?)
}

pub fn average_selection_risk(trace: &SelectionTrace) -> Result<f64> {
    Ok(total_selection_risk(trace)? / trace.len() as f64)
}

/// Cleanliness of the best fixed k-set: its total risk divided by `kT`.
pub fn hindsight_alpha(trace: &SelectionTrace) -> Result<f64> {
    let (_, k) = trace.shape()?;
    Ok(hindsight_total_risk(trace)? / (k * trace.len()) as f64)
}

/// `ln C(n, k)` through log-gamma, finite for any `k <= n`.
pub fn ln_binomial(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::param(format!("k = {k} exceeds n = {n}")));
    }
    let lg = |x: usize| libm::lgamma(x as f64 + 1.0);
    Ok(lg(n) - lg(k) - lg(n - k))
}

fn check_bound_domain(n: usize, k: usize, t: usize) -> Result<()> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::param(format!("bounds need 1 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    if t == 0 {
        return Err(Error::param("horizon T must be at least 1"));
    }
    Ok(())
}

/// Expected-regret bound of FPL with `η = √(kT)`: `2·√(2kT·ln C(n, k))`.
pub fn theorem1_bound(n: usize, k: usize, t: usize) -> Result<f64> {
    check_bound_domain(n, k, t)?;
    let ln_c = ln_binomial(n, k)?;
    Ok(2.0 * (2.0 * k as f64 * t as f64 * ln_c).sqrt())
}

/// Expected average-selection-risk bound `αk·(2√(2 ln n)/√(Tα) + 1)` when
/// the best fixed k-set averages `αk` risk per epoch.
///
/// `α = 0` makes the bound degenerate and is rejected.
pub fn corollary2_bound(n: usize, k: usize, t: usize, alpha: f64) -> Result<f64> {
    check_bound_domain(n, k, t)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    let (n, k, t) = (n as f64, k as f64, t as f64);
    Ok(alpha * k * (2.0 * (2.0 * n.ln()).sqrt() / (t * alpha).sqrt() + 1.0))
}

/// The intermediate regret bound `2k·√(2αT ln n)` behind [`corollary2_bound`].
pub fn alpha_regret_bound(n: usize, k: usize, t: usize, alpha: f64) -> Result<f64> {
    check_bound_domain(n, k, t)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param(format!("alpha = {alpha} must lie in [0, 1]")));
    }
    Ok(2.0 * k as f64 * (2.0 * alpha * t as f64 * (n as f64).ln()).sqrt())
}

/// Fraction of the selection whose assigned label is correct.
pub fn label_precision(selection: &KSetSelection, clean_mask: &[bool]) -> Result<f64> {
    check_dim(selection.n(), clean_mask.len())?;
    let clean = selection.indices().iter().filter(|&&i| clean_mask[i]).count();
    Ok(clean as f64 / selection.k() as f64)
}

/// Empirical regret/risk of one trace next to the closed-form bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theorem1: f64,
    pub corollary2: Option<f64>,
    pub empirical_regret: f64,
    pub empirical_asr: f64,
    pub alpha: Option<f64>,
}

impl BoundReport {
    /// Evaluates both bounds with α measured post hoc from the trace.
    /// `corollary2` is absent when the hindsight optimum has zero risk.
    pub fn from_trace(trace: &SelectionTrace) -> Result<Self> {
        let (n, k) = trace.shape()?;
        let t = trace.len();
        let alpha = hindsight_alpha(trace)?;
        let corollary2 = if alpha > 0.0 {
            Some(corollary2_bound(n, k, t, alpha)?)
        } else {
            None
        };
        Ok(Self {
            theorem1: theorem1_bound(n, k, t)?,
            corollary2,
            empirical_regret: regret(trace)?,
            empirical_asr: average_selection_risk(trace)?,
            alpha: Some(alpha),
        })
    }
}
