//! k-set selection over per-sample risk vectors.
//!
//! A selection is stored as the sorted list of its k indices rather than as
//! an n-dimensional k-hot vector; `d · θ` is then a k-term sum.

mod perturb;
mod select;
mod topk;

pub use perturb::{rng_from_seed, sample_perturbation, SelectionRng};
pub use select::{
    fpl_select, ftl_select, greedy_select, hindsight_best, init_selection, random_selection,
    Selector, SelectorConfig, Strategy,
};
pub use topk::top_k_smallest;

use crate::error::{check_dim, Error, Result};

/// Per-sample noise-risk feedback for one epoch, every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskVector {
    values: Vec<f64>,
}

impl RiskVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("risk vector"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::input(format!("risk[{i}] = {v} is outside [0, 1]")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

/// A set of exactly k distinct sample indices in `[0, n)`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KSetSelection {
    indices: Vec<usize>,
    n: usize,
}

impl KSetSelection {
    /// Builds a selection from arbitrary-order indices. Rejects duplicates,
    /// out-of-range indices and the empty set.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Empty("selection"));
        }
        indices.sort_unstable();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::param(format!("index {bad} out of range for n = {n}")));
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("selection contains duplicate indices"));
        }
        Ok(Self { indices, n })
    }

    /// Every index in `[0, n)`.
    pub fn all(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
            n,
        }
    }

    pub(crate) fn from_sorted(indices: Vec<usize>, n: usize) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().is_none_or(|&i| i < n));
        Self { indices, n }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// The equivalent n-dimensional k-hot vector.
    pub fn to_k_hot(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for &i in &self.indices {
            d[i] = 1.0;
        }
        d
    }

    /// `d · v` for an n-dimensional vector `v`.
    pub fn dot(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.n, v.len())?;
        Ok(self.indices.iter().map(|&i| v[i]).sum())
    }
}

/// Running elementwise sum of all risk vectors seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeRisk {
    sums: Vec<f64>,
    epochs_seen: usize,
}

impl CumulativeRisk {
    pub fn new(n: usize) -> Self {
        Self {
            sums: vec![0.0; n],
            epochs_seen: 0,
        }
    }

    pub fn accumulate(&mut self, theta: &RiskVector) -> Result<()> {
        check_dim(self.sums.len(), theta.len())?;
        for (s, &v) in self.sums.iter_mut().zip(theta.values()) {
            *s += v;
        }
        self.epochs_seen += 1;
        Ok(())
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn epochs_seen(&self) -> usize {
        self.epochs_seen
    }

    pub fn n(&self) -> usize {
        self.sums.len()
    }
}

/// `1 <= k <= n`.
pub fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::param(format!("k = {k} must lie in [1, n = {n}]")))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn risk_vector_rejects_out_of_range() {
        assert!(RiskVector::new(vec![0.0, 1.0, 0.5]).is_ok());
        assert!(matches!(RiskVector::new(vec![0.2, 1.5]), Err(Error::Input(_))));
        assert!(matches!(RiskVector::new(vec![-0.1]), Err(Error::Input(_))));
        assert!(matches!(RiskVector::new(vec![f64::NAN]), Err(Error::Input(_))));
        assert!(RiskVector::new(vec![]).is_err());
    }

    #[test]
    fn selection_validation() {
        let s = KSetSelection::new(vec![3, 0, 2], 4).unwrap();
        assert_eq!(s.indices(), &[0, 2, 3]);
        assert_eq!(s.to_k_hot(), vec![1.0, 0.0, 1.0, 1.0]);
        assert_eq!(s.dot(&[0.5, 9.0, 0.25, 1.0]).unwrap(), 1.75);
        assert!(KSetSelection::new(vec![1, 1], 4).is_err());
        assert!(KSetSelection::new(vec![4], 4).is_err());
        assert!(KSetSelection::new(vec![], 4).is_err());
        assert!(s.dot(&[1.0]).is_err());
    }

    #[test]
    fn accumulate_examples() {
        let mut cum = CumulativeRisk::new(2);
        cum.accumulate(&RiskVector::new(vec![0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(cum.sums(), &[0.5, 0.5]);
        assert_eq!(cum.epochs_seen(), 1);

        let mut cum = CumulativeRisk::new(2);
        cum.accumulate(&RiskVector::new(vec![1.0, 0.0]).unwrap()).unwrap();
        cum.accumulate(&RiskVector::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(cum.sums(), &[1.0, 1.0]);
        assert_eq!(cum.epochs_seen(), 2);
    }

    #[test]
    fn accumulate_dimension_mismatch() {
        let mut cum = CumulativeRisk::new(3);
        let err = cum.accumulate(&RiskVector::new(vec![0.1, 0.2]).unwrap());
        assert_eq!(err, Err(Error::DimensionMismatch { expected: 3, actual: 2 }));
        assert_eq!(cum.epochs_seen(), 0);
    }
}
