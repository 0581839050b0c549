use rand::Rng;

use crate::error::{check_dim, Error, Result};

pub const DEFAULT_HIDDEN: usize = 256;

/// One hidden ReLU layer followed by a softmax output.
///
/// All parameters live in one flat buffer laid out as
/// `[W1 (h x d) | b1 (h) | W2 (C x h) | b2 (C)]`, row-major, so that SGD
/// and gradient checks can treat the model as a single vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    input: usize,
    hidden: usize,
    classes: usize,
    params: Vec<f64>,
}

/// Gradient with the same layout as [`Mlp::params`].
pub type Gradient = Vec<f64>;

/// Per-sample activations reused across calls.
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    z1: Vec<f64>,
    a1: Vec<f64>,
    probs: Vec<f64>,
    dz1: Vec<f64>,
}

impl Mlp {
    /// A model with every parameter zero.
    pub fn zeros(input: usize, hidden: usize, classes: usize) -> Result<Self> {
        if input == 0 || hidden == 0 || classes == 0 {
            return Err(Error::param("model sizes must be positive"));
        }
        let len = hidden * input + hidden + classes * hidden + classes;
        Ok(Self { input, hidden, classes, params: vec![0.0; len] })
    }

    /// Weights and biases uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn init<R: Rng + ?Sized>(input: usize, hidden: usize, classes: usize, rng: &mut R) -> Result<Self> {
        let mut m = Self::zeros(input, hidden, classes)?;
        let l1 = 1.0 / (input as f64).sqrt();
        let l2 = 1.0 / (hidden as f64).sqrt();
        let first = hidden * input + hidden;
        for (i, p) in m.params.iter_mut().enumerate() {
            let limit = if i < first { l1 } else { l2 };
            *p = rng.random_range(-limit..=limit);
        }
        Ok(m)
    }

    pub fn input_dim(&self) -> usize {
        self.input
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let b1 = self.hidden * self.input;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.classes * self.hidden;
        (b1, w2, b2)
    }

    pub fn w1(&self) -> &[f64] {
        &self.params[..self.offsets().0]
    }

    pub fn b1(&self) -> &[f64] {
        let (b1, w2, _) = self.offsets();
        &self.params[b1..w2]
    }

    pub fn w2(&self) -> &[f64] {
        let (_, w2, b2) = self.offsets();
        &self.params[w2..b2]
    }

    pub fn b2(&self) -> &[f64] {
        &self.params[self.offsets().2..]
    }

    pub fn b2_mut(&mut self) -> &mut [f64] {
        let at = self.offsets().2;
        &mut self.params[at..]
    }

    pub fn w2_mut(&mut self) -> &mut [f64] {
        let (_, w2, b2) = self.offsets();
        &mut self.params[w2..b2]
    }

    /// Class probabilities for one input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut s = Scratch::default();
        self.forward_into(x, &mut s)?;
        Ok(s.probs)
    }

    /// Like [`Mlp::forward`] but writes into `scratch`; returns the
    /// probabilities slice inside it.
    pub fn forward_into<'s>(&self, x: &[f64], s: &'s mut Scratch) -> Result<&'s [f64]> {
        check_dim(self.input, x.len())?;
        let (d, h, c) = (self.input, self.hidden, self.classes);
        let (ob1, ow2, ob2) = self.offsets();
        let (w1, b1) = (&self.params[..ob1], &self.params[ob1..ow2]);
        let (w2, b2) = (&self.params[ow2..ob2], &self.params[ob2..]);

        s.z1.clear();
        s.z1.extend((0..h).map(|j| b1[j] + dot(&w1[j * d..(j + 1) * d], x)));
        s.a1.clear();
        s.a1.extend(s.z1.iter().map(|&z| z.max(0.0)));

        s.probs.clear();
        s.probs.extend((0..c).map(|k| b2[k] + dot(&w2[k * h..(k + 1) * h], &s.a1)));
        softmax_in_place(&mut s.probs);
        Ok(&s.probs)
    }

    /// Gradient of `-ln p(label | x)` with respect to every parameter.
    pub fn backward(&self, x: &[f64], label: usize) -> Result<Gradient> {
        let mut grad = vec![0.0; self.params.len()];
        let mut s = Scratch::default();
        self.accumulate_gradient(x, label, 1.0, &mut grad, &mut s)?;
        Ok(grad)
    }

    /// Adds `scale` times the cross-entropy gradient at `(x, label)` into
    /// `grad`. Returns the sample's loss.
    pub fn accumulate_gradient(
        &self,
        x: &[f64],
        label: usize,
        scale: f64,
        grad: &mut [f64],
        s: &mut Scratch,
    ) -> Result<f64> {
        if label >= self.classes {
            return Err(Error::input(format!("label {label} >= {} classes", self.classes)));
        }
        check_dim(self.params.len(), grad.len())?;
        self.forward_into(x, s)?;
        let (d, h, c) = (self.input, self.hidden, self.classes);
        let (ob1, ow2, ob2) = self.offsets();
        let loss = -s.probs[label].max(f64::MIN_POSITIVE).ln();

        // output layer: dL/dlogit = p - onehot
        s.probs[label] -= 1.0;
        let w2 = &self.params[ow2..ob2];
        s.dz1.clear();
        s.dz1.resize(h, 0.0);
        for k in 0..c {
            let g = s.probs[k];
            grad[ob2 + k] += scale * g;
            let row = &mut grad[ow2 + k * h..ow2 + (k + 1) * h];
            for j in 0..h {
                row[j] += scale * g * s.a1[j];
                s.dz1[j] += g * w2[k * h + j];
            }
        }
        for j in 0..h {
            if s.z1[j] <= 0.0 {
                continue;
            }
            let g = s.dz1[j];
            grad[ob1 + j] += scale * g;
            let row = &mut grad[j * d..(j + 1) * d];
            for (r, &xi) in row.iter_mut().zip(x) {
                *r += scale * g * xi;
            }
        }
        Ok(loss)
    }

    /// Cross-entropy loss at `(x, label)`.
    pub fn loss(&self, x: &[f64], label: usize) -> Result<f64> {
        let p = self.forward(x)?;
        let q = p.get(label).ok_or_else(|| Error::input(format!("label {label} out of range")))?;
        Ok(-q.max(f64::MIN_POSITIVE).ln())
    }

    /// `params -= lr * grad`.
    pub fn apply_gradient(&mut self, grad: &[f64], lr: f64) -> Result<()> {
        check_dim(self.params.len(), grad.len())?;
        for (p, g) in self.params.iter_mut().zip(grad) {
            *p -= lr * g;
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Max-subtracted softmax.
pub fn softmax_in_place(v: &mut [f64]) {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for x in v.iter_mut() {
        *x = (*x - m).exp();
        total += *x;
    }
    for x in v.iter_mut() {
        *x /= total;
    }
}

/// Index of the largest entry; the smallest index wins ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kset::rng_from_seed;
    use proptest::prelude::*;
    use rand_distr::StandardNormal;

    fn random_model(d: usize, h: usize, c: usize, seed: u64) -> (Mlp, Vec<f64>, usize) {
        let mut rng = rng_from_seed(seed, 11);
        let m = Mlp::init(d, h, c, &mut rng).unwrap();
        // central differences straddling a ReLU kink are meaningless, so keep
        // every pre-activation well clear of zero
        let x = loop {
            let x: Vec<f64> = (0..d).map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal)).collect();
            let clear = (0..h).all(|j| {
                let z = m.b1()[j] + dot(&m.w1()[j * d..(j + 1) * d], &x);
                z.abs() > 1e-3
            });
            if clear {
                break x;
            }
        };
        let y = rng.random_range(0..c);
        (m, x, y)
    }

    /// Worst relative error between the analytic gradient and central
    /// differences of the loss with step 1e-5.
    fn fd_error(m: &Mlp, x: &[f64], y: usize) -> f64 {
        let g = m.backward(x, y).unwrap();
        let step = 1e-5;
        let mut probe = m.clone();
        let mut worst: f64 = 0.0;
        for i in 0..m.params().len() {
            let orig = probe.params()[i];
            probe.params_mut()[i] = orig + step;
            let up = probe.loss(x, y).unwrap();
            probe.params_mut()[i] = orig - step;
            let down = probe.loss(x, y).unwrap();
            probe.params_mut()[i] = orig;
            let num = (up - down) / (2.0 * step);
            let err = (num - g[i]).abs() / (num.abs() + g[i].abs()).max(1e-7);
            worst = worst.max(err);
        }
        worst
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = Mlp::zeros(3, 4, 5).unwrap();
        let p = m.forward(&[1.0, -2.0, 0.5]).unwrap();
        assert!(p.iter().all(|&q| (q - 0.2).abs() < 1e-15));
    }

    #[test]
    fn huge_logit_does_not_overflow() {
        let mut m = Mlp::zeros(2, 3, 4).unwrap();
        m.b2_mut()[2] = 1000.0;
        let p = m.forward(&[0.3, 0.1]).unwrap();
        assert!(p.iter().all(|q| q.is_finite()));
        assert!((p[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forward_rejects_wrong_dim() {
        let m = Mlp::zeros(3, 2, 2).unwrap();
        assert!(m.forward(&[1.0, 2.0]).is_err());
        assert!(m.backward(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for seed in 0..20 {
            let (m, x, y) = random_model(5, 6, 4, seed);
            let err = fd_error(&m, &x, y);
            assert!(err < 1e-4, "seed {seed}: {err}");
        }
    }

    #[test]
    fn saturated_gradient_vanishes() {
        let mut m = Mlp::zeros(2, 3, 3).unwrap();
        m.b2_mut()[1] = 800.0;
        let g = m.backward(&[0.5, -0.5], 1).unwrap();
        let norm: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-12, "{norm}");
    }

    #[test]
    fn backward_is_deterministic() {
        let (m, x, y) = random_model(4, 5, 3, 9);
        assert_eq!(m.backward(&x, y).unwrap(), m.backward(&x, y).unwrap());
    }

    #[test]
    fn init_respects_fan_in_limits() {
        let mut rng = rng_from_seed(1, 0);
        let m = Mlp::init(16, 4, 3, &mut rng).unwrap();
        assert!(m.w1().iter().chain(m.b1()).all(|v| v.abs() <= 0.25));
        assert!(m.w2().iter().chain(m.b2()).all(|v| v.abs() <= 0.5));
        assert!(m.w1().iter().any(|v| v.abs() > 0.2));
    }

    #[test]
    fn argmax_prefers_lower_index() {
        assert_eq!(argmax(&[0.25, 0.5, 0.5, 0.1]), 1);
        assert_eq!(argmax(&[0.1]), 0);
    }

    proptest! {
        #[test]
        fn probabilities_form_a_simplex(
            d in 1usize..8, h in 1usize..8, c in 1usize..6, seed in any::<u64>()
        ) {
            let (m, x, _) = random_model(d, h, c, seed);
            let p = m.forward(&x).unwrap();
            prop_assert_eq!(p.len(), c);
            prop_assert!(p.iter().all(|&q| (0.0..=1.0).contains(&q)));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn gradient_check_property(
            d in 1usize..10, h in 1usize..8, c in 2usize..5, seed in any::<u64>()
        ) {
            let (m, x, y) = random_model(d, h, c, seed);
            let err = fd_error(&m, &x, y);
            prop_assert!(err < 1e-4, "{}", err);
        }
    }
}
