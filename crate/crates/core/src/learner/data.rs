use std::collections::BTreeMap;
use std::io::Read;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::kset::rng_from_seed;

/// Labelled samples, stored row-major. `assigned_labels` are the labels the
/// learner sees; `true_labels` are kept for precision and test accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    dim: usize,
    true_labels: Vec<usize>,
    assigned_labels: Vec<usize>,
    num_classes: usize,
}

impl Dataset {
    /// A clean dataset: assigned labels equal the true labels.
    pub fn new(features: Vec<f64>, dim: usize, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("feature dimension must be positive"));
        }
        if labels.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        check_dim(labels.len() * dim, features.len())?;
        if let Some(bad) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::input(format!("label {bad} >= num_classes {num_classes}")));
        }
        if let Some(bad) = features.iter().find(|x| !x.is_finite()) {
            return Err(Error::input(format!("non-finite feature value {bad}")));
        }
        Ok(Self {
            features,
            dim,
            assigned_labels: labels.clone(),
            true_labels: labels,
            num_classes,
        })
    }

    /// Replaces the assigned labels (e.g. with a noisy copy).
    pub fn with_assigned_labels(mut self, assigned: Vec<usize>) -> Result<Self> {
        check_dim(self.len(), assigned.len())?;
        if let Some(bad) = assigned.iter().find(|&&y| y >= self.num_classes) {
            return Err(Error::input(format!("label {bad} >= num_classes {}", self.num_classes)));
        }
        self.assigned_labels = assigned;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.true_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.true_labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn true_labels(&self) -> &[usize] {
        &self.true_labels
    }

    pub fn assigned_labels(&self) -> &[usize] {
        &self.assigned_labels
    }

    /// `true` where the assigned label is correct.
    pub fn clean_mask(&self) -> Vec<bool> {
        self.true_labels
            .iter()
            .zip(&self.assigned_labels)
            .map(|(a, b)| a == b)
            .collect()
    }

    pub fn noise_rate(&self) -> f64 {
        let noisy = self.clean_mask().iter().filter(|&&c| !c).count();
        noisy as f64 / self.len() as f64
    }

    /// The rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            features.extend_from_slice(self.sample(i));
        }
        Self {
            features,
            dim: self.dim,
            true_labels: indices.iter().map(|&i| self.true_labels[i]).collect(),
            assigned_labels: indices.iter().map(|&i| self.assigned_labels[i]).collect(),
            num_classes: self.num_classes,
        }
    }

    /// Splits off `holdout_fraction` of every assigned-label class into the
    /// second half, seeded. Row order inside each part follows the original.
    pub fn stratified_split(&self, holdout_fraction: f64, seed: u64) -> Result<(Self, Self)> {
        if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
            return Err(Error::param(format!(
                "holdout fraction {holdout_fraction} must lie in (0, 1)"
            )));
        }
        let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &y) in self.assigned_labels.iter().enumerate() {
            by_class.entry(y).or_default().push(i);
        }
        let mut rng = rng_from_seed(seed, 7);
        let mut holdout = vec![false; self.len()];
        for members in by_class.values_mut() {
            members.shuffle(&mut rng);
            let m = (holdout_fraction * members.len() as f64).round() as usize;
            for &i in &members[..m] {
                holdout[i] = true;
            }
        }
        let keep: Vec<usize> = (0..self.len()).filter(|&i| !holdout[i]).collect();
        let held: Vec<usize> = (0..self.len()).filter(|&i| holdout[i]).collect();
        if keep.is_empty() || held.is_empty() {
            return Err(Error::param("split leaves one side empty"));
        }
        Ok((self.subset(&keep), self.subset(&held)))
    }
}

/// `classes` isotropic unit-variance Gaussian clusters in `dim` dimensions.
///
/// Centres sit on a cubic lattice with spacing `separation`, so every pair
/// is at least `separation` apart. Sample `i` belongs to class `i % classes`,
/// which keeps the counts balanced to within one.
pub fn make_blobs(n: usize, dim: usize, classes: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if n == 0 || dim == 0 || classes == 0 {
        return Err(Error::param("make_blobs needs n, dim and classes >= 1"));
    }
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::param(format!("separation {separation} must be positive and finite")));
    }
    // smallest lattice side with side^dim >= classes
    let mut side = 1usize;
    while (side as f64).powi(dim as i32) < classes as f64 {
        side += 1;
    }
    let extent = separation * (side - 1) as f64;
    if !extent.is_finite() || extent > 1e12 {
        return Err(Error::param(format!(
            "separation {separation} puts cluster centres outside a safe numeric range"
        )));
    }
    let centres: Vec<Vec<f64>> = (0..classes)
        .map(|c| {
            let mut digits = vec![0.0; dim];
            let mut rest = c;
            for slot in digits.iter_mut().rev() {
                *slot = (rest % side) as f64 * separation - extent / 2.0;
                rest /= side;
            }
            digits
        })
        .collect();

    let mut rng = rng_from_seed(seed, 2);
    let mut features = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % classes;
        labels.push(c);
        for &mu in &centres[c] {
            let z: f64 = StandardNormal.sample(&mut rng);
            features.push(mu + z);
        }
    }
    Dataset::new(features, dim, labels, classes)
}

/// Reads `label,f_0,...,f_{d-1}` rows. The class count is one more than the
/// largest label present.
pub fn load_csv<R: Read>(input: R) -> Result<Dataset> {
    let mut r = csv::Reader::from_reader(input);
    let header = r
        .headers()
        .map_err(|e| Error::input(format!("bad dataset header: {e}")))?
        .clone();
    if header.get(0) != Some("label") || header.len() < 2 {
        return Err(Error::input("dataset header must be `label,f_0,...`"));
    }
    for (i, name) in header.iter().skip(1).enumerate() {
        if name != format!("f_{i}") {
            return Err(Error::input(format!("column {} should be f_{i}, found `{name}`", i + 1)));
        }
    }
    let dim = header.len() - 1;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::input(format!("row {}: {e}", row + 1)))?;
        if rec.len() != dim + 1 {
            return Err(Error::input(format!("row {}: expected {} fields, got {}", row + 1, dim + 1, rec.len())));
        }
        let y: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::input(format!("row {}: bad label `{}`", row + 1, &rec[0])))?;
        labels.push(y);
        for f in rec.iter().skip(1) {
            features.push(
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::input(format!("row {}: bad feature `{f}`", row + 1)))?,
            );
        }
    }
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    Dataset::new(features, dim, labels, classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blobs_basic_shape() {
        let ds = make_blobs(103, 3, 4, 5.0, 1).unwrap();
        assert_eq!(ds.len(), 103);
        assert_eq!(ds.dim(), 3);
        let mut counts = [0usize; 4];
        for &y in ds.true_labels() {
            counts[y] += 1;
        }
        assert!(counts.iter().all(|&c| c == 25 || c == 26), "{counts:?}");
        assert_eq!(ds.clean_mask(), vec![true; 103]);
        assert_eq!(ds, make_blobs(103, 3, 4, 5.0, 1).unwrap());
        assert_ne!(ds, make_blobs(103, 3, 4, 5.0, 2).unwrap());
    }

    #[test]
    fn single_class_blobs() {
        let ds = make_blobs(20, 2, 1, 3.0, 0).unwrap();
        assert!(ds.true_labels().iter().all(|&y| y == 0));
    }

    #[test]
    fn blob_centres_respect_separation() {
        for &(dim, classes) in &[(2, 4), (2, 9), (3, 10), (20, 10)] {
            let (n, sep) = (classes * 400, 8.0);
            let ds = make_blobs(n, dim, classes, sep, 3).unwrap();
            let mut means = vec![vec![0.0; dim]; classes];
            for i in 0..n {
                for (m, x) in means[ds.true_labels()[i]].iter_mut().zip(ds.sample(i)) {
                    *m += x / 400.0;
                }
            }
            for a in 0..classes {
                for b in a + 1..classes {
                    let d2: f64 = means[a].iter().zip(&means[b]).map(|(x, y)| (x - y).powi(2)).sum();
                    // sample means wander by ~ sqrt(dim/400)
                    assert!(d2.sqrt() > sep - 1.0, "classes {a},{b}: {}", d2.sqrt());
                }
            }
        }
    }

    #[test]
    fn blobs_reject_bad_geometry() {
        assert!(make_blobs(10, 2, 4, 0.0, 0).is_err());
        assert!(make_blobs(10, 2, 4, f64::INFINITY, 0).is_err());
        assert!(make_blobs(10, 1, 4, 1e300, 0).is_err());
        assert!(make_blobs(0, 2, 4, 1.0, 0).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![0.0; 4], 2, vec![0, 3], 3).is_err());
        assert!(Dataset::new(vec![0.0; 3], 2, vec![0, 1], 3).is_err());
        let ds = Dataset::new(vec![0.0; 4], 2, vec![0, 1], 3).unwrap();
        assert!(ds.clone().with_assigned_labels(vec![0]).is_err());
        assert!(ds.clone().with_assigned_labels(vec![0, 5]).is_err());
        let noisy = ds.with_assigned_labels(vec![2, 1]).unwrap();
        assert_eq!(noisy.clean_mask(), vec![false, true]);
        assert_eq!(noisy.noise_rate(), 0.5);
    }

    #[test]
    fn stratified_split_keeps_class_proportions() {
        let ds = make_blobs(1000, 2, 4, 4.0, 5).unwrap();
        let (train, val) = ds.stratified_split(0.2, 9).unwrap();
        assert_eq!(train.len() + val.len(), 1000);
        assert_eq!(val.len(), 200);
        for c in 0..4 {
            let in_val = val.assigned_labels().iter().filter(|&&y| y == c).count();
            assert_eq!(in_val, 50);
        }
        assert!(ds.stratified_split(0.0, 1).is_err());
        assert!(ds.stratified_split(1.0, 1).is_err());
    }

    #[test]
    fn csv_loading() {
        let text = "label,f_0,f_1\n0,0.5,1.5\n2,-1,3\n";
        let ds = load_csv(text.as_bytes()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.num_classes(), 3);
        assert_eq!(ds.sample(1), &[-1.0, 3.0]);
        assert!(load_csv("y,f_0\n0,1\n".as_bytes()).is_err());
        assert!(load_csv("label,f_0\nx,1\n".as_bytes()).is_err());
        assert!(load_csv("label,f_0\n0,nan\n".as_bytes()).is_err());
        assert!(load_csv("label,f_1\n0,1\n".as_bytes()).is_err());
    }
}
