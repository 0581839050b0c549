use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::kset::rng_from_seed;

const NOISE_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Symmetric,
    Asymmetric,
}

/// How to corrupt a label vector. `pair_map` is only read for asymmetric
/// noise; when absent the default map from [`default_pair_map`] is used.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelNoiseSpec {
    pub kind: NoiseKind,
    pub rate: f64,
    pub pair_map: Option<BTreeMap<usize, usize>>,
    pub seed: u64,
}

impl LabelNoiseSpec {
    pub fn symmetric(rate: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::Symmetric, rate, pair_map: None, seed }
    }

    pub fn asymmetric(rate: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::Asymmetric, rate, pair_map: None, seed }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Returns the noisy copy of `labels`.
    pub fn apply(&self, labels: &[usize], num_classes: usize) -> Result<Vec<usize>> {
        match self.kind {
            NoiseKind::Symmetric => inject_symmetric_noise(labels, self.rate, num_classes, self.seed),
            NoiseKind::Asymmetric => {
                let map = match &self.pair_map {
                    Some(m) => m.clone(),
                    None => default_pair_map(num_classes)?,
                };
                inject_asymmetric_noise(labels, self.rate, &map, num_classes, self.seed)
            }
        }
    }
}

impl fmt::Display for LabelNoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            NoiseKind::Symmetric => "sym",
            NoiseKind::Asymmetric => "asym",
        };
        write!(f, "{tag}:{}", self.rate)
    }
}

/// Parses `sym:RATE` or `asym:RATE`; the seed is left at 0.
impl FromStr for LabelNoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rate) = s
            .split_once(':')
            .ok_or_else(|| Error::param(format!("noise `{s}` should look like sym:0.5 or asym:0.4")))?;
        let kind = match kind.trim().to_ascii_lowercase().as_str() {
            "sym" | "symmetric" => NoiseKind::Symmetric,
            "asym" | "asymmetric" => NoiseKind::Asymmetric,
            other => return Err(Error::param(format!("unknown noise kind `{other}`"))),
        };
        let rate: f64 = rate
            .trim()
            .parse()
            .map_err(|_| Error::param(format!("bad noise rate `{rate}`")))?;
        check_rate(rate)?;
        Ok(Self { kind, rate, pair_map: None, seed: 0 })
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if (0.0..1.0).contains(&rate) {
        Ok(())
    } else {
        Err(Error::param(format!("noise rate {rate} must lie in [0, 1)")))
    }
}

fn check_labels(labels: &[usize], num_classes: usize) -> Result<()> {
    match labels.iter().find(|&&y| y >= num_classes) {
        Some(y) => Err(Error::input(format!("label {y} >= num_classes {num_classes}"))),
        None => Ok(()),
    }
}

/// Flips exactly `floor(rate * n)` labels, chosen uniformly, each to a
/// uniformly drawn class other than its own.
pub fn inject_symmetric_noise(labels: &[usize], rate: f64, num_classes: usize, seed: u64) -> Result<Vec<usize>> {
    check_rate(rate)?;
    check_labels(labels, num_classes)?;
    let n = labels.len();
    let flips = (rate * n as f64).floor() as usize;
    if flips == 0 {
        return Ok(labels.to_vec());
    }
    if num_classes < 2 {
        return Err(Error::param("symmetric noise needs at least two classes"));
    }
    let mut rng = rng_from_seed(seed, NOISE_STREAM);
    let mut out = labels.to_vec();
    for i in index::sample(&mut rng, n, flips) {
        let r = rng.random_range(0..num_classes - 1);
        out[i] = if r >= labels[i] { r + 1 } else { r };
    }
    Ok(out)
}

/// `c -> (c + 1) mod C` on the first `ceil(C/2)` classes.
pub fn default_pair_map(num_classes: usize) -> Result<BTreeMap<usize, usize>> {
    if num_classes < 2 {
        return Err(Error::param("asymmetric noise needs at least two classes"));
    }
    Ok((0..num_classes.div_ceil(2)).map(|c| (c, (c + 1) % num_classes)).collect())
}

/// Each sample whose class is a key of `pair_map` is relabelled to its
/// partner with probability `rate`; other classes are left alone.
pub fn inject_asymmetric_noise(
    labels: &[usize],
    rate: f64,
    pair_map: &BTreeMap<usize, usize>,
    num_classes: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    check_rate(rate)?;
    check_labels(labels, num_classes)?;
    if let Some((c, _)) = pair_map.iter().find(|(s, d)| s == d) {
        return Err(Error::param(format!("pair map sends class {c} to itself")));
    }
    let expected = num_classes.div_ceil(2);
    if pair_map.len() != expected {
        return Err(Error::param(format!(
            "pair map covers {} classes, expected ceil({num_classes}/2) = {expected}",
            pair_map.len()
        )));
    }
    if let Some((s, d)) = pair_map.iter().find(|(&s, &d)| s >= num_classes || d >= num_classes) {
        return Err(Error::param(format!("pair map entry {s} -> {d} outside {num_classes} classes")));
    }
    let mut rng = rng_from_seed(seed, NOISE_STREAM);
    Ok(labels
        .iter()
        .map(|&y| {
            // one draw per sample keeps the stream aligned regardless of class
            let u: f64 = rng.random();
            match pair_map.get(&y) {
                Some(&to) if u < rate => to,
                _ => y,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn balanced(n: usize, c: usize) -> Vec<usize> {
        (0..n).map(|i| i % c).collect()
    }

    #[test]
    fn zero_rate_is_identity() {
        let y = balanced(100, 10);
        assert_eq!(inject_symmetric_noise(&y, 0.0, 10, 1).unwrap(), y);
        let map = default_pair_map(10).unwrap();
        assert_eq!(inject_asymmetric_noise(&y, 0.0, &map, 10, 1).unwrap(), y);
    }

    #[test]
    fn symmetric_flip_counts_and_targets() {
        let (n, c) = (10_000, 10);
        let y = balanced(n, c);
        let noisy = inject_symmetric_noise(&y, 0.5, c, 42).unwrap();
        let mut pair = vec![vec![0usize; c]; c];
        let mut flips = 0;
        for (&a, &b) in y.iter().zip(&noisy) {
            if a != b {
                flips += 1;
                pair[a][b] += 1;
            }
            assert!(b < c);
        }
        assert_eq!(flips, 5000);
        for (src, row) in pair.iter().enumerate() {
            let m: usize = row.iter().sum();
            assert_eq!(row[src], 0);
            let p = 1.0 / 9.0;
            let sd = (m as f64 * p * (1.0 - p)).sqrt();
            for (dst, &count) in row.iter().enumerate().filter(|&(d, _)| d != src) {
                let dev = (count as f64 - m as f64 * p).abs();
                assert!(dev <= 3.0 * sd, "{src}->{dst}: {count} of {m}");
            }
        }
        assert_eq!(noisy, inject_symmetric_noise(&y, 0.5, c, 42).unwrap());
        assert_ne!(noisy, inject_symmetric_noise(&y, 0.5, c, 43).unwrap());
    }

    #[test]
    fn symmetric_errors() {
        assert!(inject_symmetric_noise(&[0, 0, 0], 0.5, 1, 0).is_err());
        assert!(inject_symmetric_noise(&[0, 1], 1.0, 2, 0).is_err());
        assert!(inject_symmetric_noise(&[0, 1], -0.1, 2, 0).is_err());
        assert!(inject_symmetric_noise(&[0, 5], 0.5, 2, 0).is_err());
    }

    #[test]
    fn asymmetric_flip_total() {
        let (n, c) = (10_000, 10);
        let y = balanced(n, c);
        let map = default_pair_map(c).unwrap();
        assert_eq!(map.len(), 5);
        let noisy = inject_asymmetric_noise(&y, 0.4, &map, c, 7).unwrap();
        let flips = y.iter().zip(&noisy).filter(|(a, b)| a != b).count();
        // 5000 eligible samples, each flipped w.p. 0.4
        let sd = (5000.0f64 * 0.4 * 0.6).sqrt();
        assert!((flips as f64 - 2000.0).abs() <= 3.0 * sd, "{flips}");
        for (&a, &b) in y.iter().zip(&noisy) {
            match map.get(&a) {
                Some(&to) => assert!(b == a || b == to),
                None => assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn asymmetric_map_validation() {
        let y = balanced(20, 4);
        let fixed: BTreeMap<usize, usize> = [(0, 0), (1, 2)].into_iter().collect();
        assert!(inject_asymmetric_noise(&y, 0.4, &fixed, 4, 0).is_err());
        let short: BTreeMap<usize, usize> = [(0, 1)].into_iter().collect();
        assert!(inject_asymmetric_noise(&y, 0.4, &short, 4, 0).is_err());
        let outside: BTreeMap<usize, usize> = [(0, 1), (1, 9)].into_iter().collect();
        assert!(inject_asymmetric_noise(&y, 0.4, &outside, 4, 0).is_err());
        assert!(default_pair_map(1).is_err());
        assert_eq!(default_pair_map(3).unwrap().len(), 2);
    }

    #[test]
    fn spec_parsing() {
        let s: LabelNoiseSpec = "sym:0.5".parse().unwrap();
        assert_eq!(s.kind, NoiseKind::Symmetric);
        assert_eq!(s.rate, 0.5);
        let a: LabelNoiseSpec = "asym:0.4".parse().unwrap();
        assert_eq!(a.kind, NoiseKind::Asymmetric);
        assert_eq!(a.to_string(), "asym:0.4");
        assert!("sym".parse::<LabelNoiseSpec>().is_err());
        assert!("pair:0.4".parse::<LabelNoiseSpec>().is_err());
        assert!("sym:1.0".parse::<LabelNoiseSpec>().is_err());
        assert!("sym:x".parse::<LabelNoiseSpec>().is_err());
        let y = balanced(100, 4);
        let noisy = a.with_seed(3).apply(&y, 4).unwrap();
        assert!(noisy.iter().zip(&y).all(|(b, a)| b == a || *a < 2));
    }

    proptest! {
        #[test]
        fn labels_stay_in_range(
            n in 1usize..300,
            c in 2usize..12,
            rate in 0.0f64..0.99,
            seed in any::<u64>(),
        ) {
            let y: Vec<usize> = (0..n).map(|i| (i * 7) % c).collect();
            let sym = inject_symmetric_noise(&y, rate, c, seed).unwrap();
            let flips = y.iter().zip(&sym).filter(|(a, b)| a != b).count();
            prop_assert_eq!(flips, (rate * n as f64).floor() as usize);
            prop_assert!(sym.iter().all(|&v| v < c));
            let map = default_pair_map(c).unwrap();
            let asym = inject_asymmetric_noise(&y, rate, &map, c, seed).unwrap();
            prop_assert!(asym.iter().all(|&v| v < c));
        }
    }
}
