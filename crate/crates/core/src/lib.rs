//! Online adaptive k-set sample selection for training with noisy labels.
//!
//! Each epoch the learner trains on a k-subset of the n training samples,
//! scores every sample with a noise-risk in `[0, 1]`, and picks the next
//! k-subset by Follow-the-Perturbed-Leader over the cumulative risk vector.
//! The selection step is a bottom-k over `Σθ + η·r`, so it costs `O(n)`
//! per epoch regardless of the `C(n, k)` candidate sets.
//!
//! Modules:
//! - [`kset`]: risk/selection types, linear-time bottom-k, the selectors
//!   (FPL, Naive/FTL, Greedy, Random) and the hindsight oracle.
//! - [`regret`]: total selection risk, regret, average selection risk and
//!   the closed-form regret/risk bounds.
//! - [`risk`]: the confidence-based noise-risk and synthetic risk streams.
//! - [`learner`]: datasets, label-noise injection, a one-hidden-layer MLP
//!   and the full selection/training loop.

pub mod error;
pub mod kset;
pub mod learner;
pub mod regret;
pub mod risk;

pub use error::{Error, Result};
pub use kset::{CumulativeRisk, KSetSelection, RiskVector, Selector, SelectorConfig, Strategy};
