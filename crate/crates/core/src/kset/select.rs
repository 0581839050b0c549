use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{
    check_k, rng_from_seed, sample_perturbation, top_k_smallest, CumulativeRisk, KSetSelection,
    RiskVector, SelectionRng,
};
use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Follow-the-Perturbed-Leader on the cumulative risk.
    Fpl,
    /// Follow-the-Leader: bottom-k of the cumulative risk, no perturbation.
    Naive,
    /// Bottom-k of the most recent risk vector only.
    Greedy,
    /// A fresh uniform k-subset every epoch.
    Random,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Fpl, Strategy::Naive, Strategy::Greedy, Strategy::Random];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Fpl => "fpl",
            Strategy::Naive => "naive",
            Strategy::Greedy => "greedy",
            Strategy::Random => "random",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fpl" | "taks" => Ok(Strategy::Fpl),
            "naive" | "ftl" => Ok(Strategy::Naive),
            "greedy" => Ok(Strategy::Greedy),
            "random" | "standard" => Ok(Strategy::Random),
            other => Err(Error::param(format!("unknown selector `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectorConfig {
    pub strategy: Strategy,
    /// Perturbation scale; only read by [`Strategy::Fpl`].
    pub eta: f64,
    pub k: usize,
    pub seed: u64,
}

impl SelectorConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        check_k(n, self.k)?;
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::param(format!("eta = {} must be finite and >= 0", self.eta)));
        }
        if self.k == n {
            log::warn!("k = n = {n}: every sample is selected; regret bounds need k <= n - 1");
        }
        Ok(())
    }
}

/// `argmin_d (Σθ + η·r)·d` with a fresh perturbation `r ~ N(0, I)`.
pub fn fpl_select<R: Rng + ?Sized>(
    cum: &CumulativeRisk,
    eta: f64,
    k: usize,
    rng: &mut R,
) -> Result<KSetSelection> {
    if !(eta >= 0.0) {
        return Err(Error::param(format!("eta = {eta} must be >= 0")));
    }
    check_k(cum.n(), k)?;
    let r = sample_perturbation(rng, cum.n())?;
    let perturbed: Vec<f64> = cum
        .sums()
        .iter()
        .zip(&r)
        .map(|(s, ri)| s + eta * ri)
        .collect();
    top_k_smallest(&perturbed, k)
}

/// The current leader: bottom-k of the cumulative risk.
pub fn ftl_select(cum: &CumulativeRisk, k: usize) -> Result<KSetSelection> {
    top_k_smallest(cum.sums(), k)
}

pub fn greedy_select(last_theta: &RiskVector, k: usize) -> Result<KSetSelection> {
    top_k_smallest(last_theta.values(), k)
}

/// The best fixed k-set in hindsight over everything accumulated in `cum`.
///
/// `Σ_t d·θ_t = d·Σ_t θ_t`, so the minimiser over all `C(n, k)` sets is the
/// bottom-k of the sums.
pub fn hindsight_best(cum: &CumulativeRisk, k: usize) -> Result<KSetSelection> {
    top_k_smallest(cum.sums(), k)
}

/// A uniformly random k-subset of `[0, n)`, used for the first epoch.
pub fn init_selection<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<KSetSelection> {
    random_selection(n, k, rng)
}

pub fn random_selection<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<KSetSelection> {
    check_k(n, k)?;
    let mut idx = rand::seq::index::sample(rng, n, k).into_vec();
    idx.sort_unstable();
    Ok(KSetSelection::from_sorted(idx, n))
}

/// Online selector state: cumulative risk, last feedback and the generator.
///
/// Call [`Selector::initial`] once for `d_1`, then alternate
/// [`Selector::observe`] (feedback `θ_t`) and [`Selector::next_selection`]
/// (`d_{t+1}`).
#[derive(Debug, Clone)]
pub struct Selector {
    cfg: SelectorConfig,
    cum: CumulativeRisk,
    last: Option<RiskVector>,
    rng: SelectionRng,
}

impl Selector {
    pub fn new(n: usize, cfg: SelectorConfig) -> Result<Self> {
        cfg.validate(n)?;
        Ok(Self {
            cfg,
            cum: CumulativeRisk::new(n),
            last: None,
            rng: rng_from_seed(cfg.seed, 0),
        })
    }

    pub fn config(&self) -> &SelectorConfig {
        &self.cfg
    }

    pub fn cumulative(&self) -> &CumulativeRisk {
        &self.cum
    }

    pub fn initial(&mut self) -> KSetSelection {
        init_selection(self.cum.n(), self.cfg.k, &mut self.rng)
            .expect("k validated at construction")
    }

    pub fn observe(&mut self, theta: RiskVector) -> Result<()> {
        check_dim(self.cum.n(), theta.len())?;
        self.cum.accumulate(&theta)?;
        self.last = Some(theta);
        Ok(())
    }

    pub fn next_selection(&mut self) -> Result<KSetSelection> {
        let k = self.cfg.k;
        match self.cfg.strategy {
            Strategy::Fpl => fpl_select(&self.cum, self.cfg.eta, k, &mut self.rng),
            Strategy::Naive => ftl_select(&self.cum, k),
            Strategy::Greedy => match &self.last {
                Some(theta) => greedy_select(theta, k),
                None => Err(Error::param("greedy selection needs one epoch of feedback")),
            },
            Strategy::Random => random_selection(self.cum.n(), k, &mut self.rng),
        }
    }
}
