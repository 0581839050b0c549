use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::kset::{rng_from_seed, RiskVector, SelectionRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Planted,
    FtlAdversary,
    Drifting,
    UniformRandom,
}

impl FromStr for StreamKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "planted" => Ok(StreamKind::Planted),
            "ftl_adversary" | "ftl-adversary" | "adversary" => Ok(StreamKind::FtlAdversary),
            "drifting" | "drift" => Ok(StreamKind::Drifting),
            "uniform" | "uniform_random" => Ok(StreamKind::UniformRandom),
            other => Err(Error::param(format!("unknown stream kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamSpec {
    pub kind: StreamKind,
    pub n: usize,
    pub t: usize,
    /// Fraction of indices planted as low-risk.
    pub clean_fraction: f64,
    /// Standard deviation of the planted per-entry noise.
    pub noise_scale: f64,
    pub seed: u64,
    /// Epochs between re-draws of the planted set (drifting streams only).
    pub drift_period: usize,
}

impl StreamSpec {
    pub fn new(kind: StreamKind, n: usize, t: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            t,
            clean_fraction: 0.5,
            noise_scale: 0.1,
            seed,
            drift_period: t.max(1),
        }
    }

    /// Builds the stream this spec describes. The adversary ignores `n`
    /// and always has two coordinates.
    pub fn generate(&self) -> Result<RiskStream> {
        match self.kind {
            StreamKind::Planted => planted_stream(self),
            StreamKind::FtlAdversary => ftl_adversary(self.t),
            StreamKind::Drifting => drifting_stream(self),
            StreamKind::UniformRandom => uniform_random_stream(self.n, self.t, self.seed),
        }
    }
}

/// A replayable sequence of risk vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskStream {
    pub vectors: Vec<RiskVector>,
    /// Planted clean indices, when the stream has a single fixed plant.
    pub clean_mask: Option<Vec<bool>>,
}

impl RiskStream {
    pub fn n(&self) -> usize {
        self.vectors.first().map_or(0, RiskVector::len)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

// Mean risk of clean/noisy entries at epoch `t` (0-based): both start at 0.5
// and separate linearly over the first quarter of the horizon.
fn planted_means(t: usize, horizon: usize) -> (f64, f64) {
    let ramp = (horizon as f64 / 4.0).max(1.0);
    let p = (t as f64 / ramp).min(1.0);
    (0.5 - 0.45 * p, 0.5 + 0.45 * p)
}

fn validate_planted(spec: &StreamSpec) -> Result<()> {
    if spec.n == 0 || spec.t == 0 {
        return Err(Error::param("stream needs n >= 1 and T >= 1"));
    }
    if !(0.0..=1.0).contains(&spec.clean_fraction) {
        return Err(Error::param(format!(
            "clean_fraction = {} must lie in [0, 1]",
            spec.clean_fraction
        )));
    }
    if !(spec.noise_scale >= 0.0 && spec.noise_scale.is_finite()) {
        return Err(Error::param(format!("noise_scale = {} must be >= 0", spec.noise_scale)));
    }
    Ok(())
}

fn draw_plant(rng: &mut SelectionRng, n: usize, clean_fraction: f64) -> Vec<bool> {
    let n_clean = ((clean_fraction * n as f64).ceil() as usize).min(n);
    let mut mask = vec![false; n];
    for i in rand::seq::index::sample(rng, n, n_clean) {
        mask[i] = true;
    }
    mask
}

fn planted_epoch(
    rng: &mut SelectionRng,
    mask: &[bool],
    t: usize,
    horizon: usize,
    sd: f64,
) -> Result<RiskVector> {
    let (mu_clean, mu_noisy) = planted_means(t, horizon);
    let noise = Normal::new(0.0, sd).map_err(|e| Error::param(e.to_string()))?;
    let values = mask
        .iter()
        .map(|&clean| {
            let mu = if clean { mu_clean } else { mu_noisy };
            (mu + noise.sample(rng)).clamp(0.0, 1.0)
        })
        .collect();
    RiskVector::new(values)
}

/// Clean indices draw from a clipped normal around a mean falling from 0.5
/// to 0.05, the rest around a mean rising from 0.5 to 0.95; the means
/// reach their final values a quarter of the way through the horizon.
pub fn planted_stream(spec: &StreamSpec) -> Result<RiskStream> {
    validate_planted(spec)?;
    let mut rng = rng_from_seed(spec.seed, 1);
    let mask = draw_plant(&mut rng, spec.n, spec.clean_fraction);
    let vectors = (0..spec.t)
        .map(|t| planted_epoch(&mut rng, &mask, t, spec.t, spec.noise_scale))
        .collect::<Result<_>>()?;
    Ok(RiskStream {
        vectors,
        clean_mask: Some(mask),
    })
}

/// Like [`planted_stream`] but the clean set is redrawn every
/// `drift_period` epochs.
pub fn drifting_stream(spec: &StreamSpec) -> Result<RiskStream> {
    validate_planted(spec)?;
    if spec.drift_period == 0 {
        return Err(Error::param("drift_period must be at least 1"));
    }
    let mut rng = rng_from_seed(spec.seed, 1);
    let mut mask = draw_plant(&mut rng, spec.n, spec.clean_fraction);
    let mut vectors = Vec::with_capacity(spec.t);
    for t in 0..spec.t {
        if t > 0 && t % spec.drift_period == 0 {
            mask = draw_plant(&mut rng, spec.n, spec.clean_fraction);
        }
        vectors.push(planted_epoch(&mut rng, &mask, t, spec.t, spec.noise_scale)?);
    }
    let clean_mask = (spec.drift_period >= spec.t).then_some(mask);
    Ok(RiskStream { vectors, clean_mask })
}

/// The two-coordinate stream on which Follow-the-Leader switches its choice
/// every epoch and pays 1 each time: `(0.5, 0)`, then alternately `(0, 1)`
/// and `(1, 0)`.
pub fn ftl_adversary(t: usize) -> Result<RiskStream> {
    if t < 2 {
        return Err(Error::param("adversarial stream needs T >= 2"));
    }
    let vectors = (0..t)
        .map(|i| {
            let v = match i {
                0 => vec![0.5, 0.0],
                i if i % 2 == 1 => vec![0.0, 1.0],
                _ => vec![1.0, 0.0],
            };
            RiskVector::new(v)
        })
        .collect::<Result<_>>()?;
    Ok(RiskStream {
        vectors,
        clean_mask: None,
    })
}

pub fn uniform_random_stream(n: usize, t: usize, seed: u64) -> Result<RiskStream> {
    if n == 0 || t == 0 {
        return Err(Error::param("stream needs n >= 1 and T >= 1"));
    }
    let mut rng = rng_from_seed(seed, 1);
    let vectors = (0..t)
        .map(|_| RiskVector::new((0..n).map(|_| rng.random::<f64>()).collect()))
        .collect::<Result<_>>()?;
    Ok(RiskStream {
        vectors,
        clean_mask: None,
    })
}

/// Writes one row per epoch under the header `epoch,theta_0,...,theta_{n-1}`.
/// Values use the shortest round-trip decimal form, so replay is exact.
pub fn write_stream_csv<W: Write>(stream: &RiskStream, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = stream.n();
    let mut header = vec!["epoch".to_string()];
    header.extend((0..n).map(|i| format!("theta_{i}")));
    let io = |e: csv::Error| Error::input(format!("csv write failed: {e}"));
    w.write_record(&header).map_err(io)?;
    for (t, theta) in stream.vectors.iter().enumerate() {
        let mut row = vec![(t + 1).to_string()];
        row.extend(theta.values().iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::input(format!("csv write failed: {e}")))?;
    Ok(())
}

pub fn read_stream_csv<R: Read>(input: R) -> Result<RiskStream> {
    let mut r = csv::Reader::from_reader(input);
    let header = r
        .headers()
        .map_err(|e| Error::input(format!("bad stream header: {e}")))?
        .clone();
    if header.get(0) != Some("epoch") || header.len() < 2 {
        return Err(Error::input("stream header must start with `epoch,theta_0`"));
    }
    for (i, name) in header.iter().skip(1).enumerate() {
        if name != format!("theta_{i}") {
            return Err(Error::input(format!("column {} should be theta_{i}, found `{name}`", i + 1)));
        }
    }
    let mut vectors = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::input(format!("row {}: {e}", row + 1)))?;
        let epoch: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::input(format!("row {}: bad epoch `{}`", row + 1, &rec[0])))?;
        if epoch != row + 1 {
            return Err(Error::input(format!("row {}: expected epoch {}, found {epoch}", row + 1, row + 1)));
        }
        let values = rec
            .iter()
            .skip(1)
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::input(format!("row {}: bad value `{f}`", row + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        vectors.push(RiskVector::new(values)?);
    }
    if vectors.is_empty() {
        return Err(Error::Empty("risk stream"));
    }
    Ok(RiskStream {
        vectors,
        clean_mask: None,
    })
}
