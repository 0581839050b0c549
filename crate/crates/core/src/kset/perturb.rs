use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Generator used for every random draw in the crate.
///
/// ChaCha8 output is specified by the algorithm, not the platform, so a
/// given seed replays the same stream everywhere. Normal variates come from
/// `rand_distr`'s ziggurat sampler; the lockfile pins its version.
pub type SelectionRng = ChaCha8Rng;

/// A generator for `seed` on an independent sub-stream.
///
/// Distinct `stream` values give non-overlapping sequences for the same
/// seed, so e.g. the selector and the weight initialiser never share draws.
pub fn rng_from_seed(seed: u64, stream: u64) -> SelectionRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// n i.i.d. standard-normal draws.
pub fn sample_perturbation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::param("perturbation length must be at least 1"));
    }
    Ok((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty() {
        let mut rng = rng_from_seed(0, 0);
        assert!(matches!(sample_perturbation(&mut rng, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = sample_perturbation(&mut rng_from_seed(42, 0), 64).unwrap();
        let b = sample_perturbation(&mut rng_from_seed(42, 0), 64).unwrap();
        let c = sample_perturbation(&mut rng_from_seed(42, 1), 64).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn standard_normal_moments() {
        // 5 sigma of the mean estimator at n = 1e6 is 0.005, of the variance
        // estimator about 0.007; both sit inside the 0.01 tolerance.
        let n = 1_000_000;
        let r = sample_perturbation(&mut rng_from_seed(2024, 0), n).unwrap();
        let mean = r.iter().sum::<f64>() / n as f64;
        let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "variance {var}");
    }
}
