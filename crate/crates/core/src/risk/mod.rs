//! Noise-risk feedback: the confidence-based score computed from model
//! predictions, plus synthetic risk streams for exercising the selectors
//! without a model in the loop.

mod stream;

pub use stream::{
    drifting_stream, ftl_adversary, planted_stream, read_stream_csv, uniform_random_stream,
    write_stream_csv, RiskStream, StreamKind, StreamSpec,
};

use crate::error::{Error, Result};

/// A model's verdict on one training sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub predicted_label: usize,
    /// Probability the model assigns to `predicted_label`.
    pub confidence: f64,
    /// The (possibly noisy) training label.
    pub assigned_label: usize,
}

impl Prediction {
    pub fn is_match(&self) -> bool {
        self.predicted_label == self.assigned_label
    }
}

/// `(1 - s·p) / 2` with `s = +1` when the prediction agrees with the
/// assigned label and `-1` otherwise, `p` the predicted-class probability.
///
/// Confident agreement drives the risk to 0, confident disagreement to 1;
/// the result is below 0.5 exactly when the labels agree.
pub fn noise_risk(pred: &Prediction) -> Result<f64> {
    let p = pred.confidence;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::input(format!("confidence {p} outside (0, 1]")));
    }
    let sign = if pred.is_match() { 1.0 } else { -1.0 };
    Ok((1.0 - sign * p) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pred(matches: bool, confidence: f64) -> Prediction {
        Prediction {
            predicted_label: 2,
            confidence,
            assigned_label: if matches { 2 } else { 0 },
        }
    }

    #[test]
    fn examples() {
        assert_eq!(noise_risk(&pred(true, 1.0)).unwrap(), 0.0);
        assert_eq!(noise_risk(&pred(false, 1.0)).unwrap(), 1.0);
        assert_eq!(noise_risk(&pred(true, 0.5)).unwrap(), 0.25);
        assert_eq!(noise_risk(&pred(false, 0.5)).unwrap(), 0.75);
    }

    #[test]
    fn rejects_bad_confidence() {
        for c in [0.0, -0.2, 1.01, f64::NAN] {
            assert!(matches!(noise_risk(&pred(true, c)), Err(Error::Input(_))));
        }
    }

    proptest! {
        #[test]
        fn range_and_sign(c in 1e-9f64..=1.0, matches: bool) {
            let r = noise_risk(&pred(matches, c)).unwrap();
            prop_assert!((0.0..=1.0).contains(&r));
            prop_assert_eq!(r < 0.5, matches);
        }

        #[test]
        fn monotone_in_confidence(a in 1e-6f64..1.0, gap in 1e-9f64..=1.0) {
            let b = a + gap * (1.0 - a);
            prop_assert!(noise_risk(&pred(true, a)).unwrap() > noise_risk(&pred(true, b)).unwrap());
            prop_assert!(noise_risk(&pred(false, a)).unwrap() < noise_risk(&pred(false, b)).unwrap());
        }
    }
}
