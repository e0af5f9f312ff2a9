//! Fully-connected ReLU network with hand-derived gradients and Adam.
//!
//! The loss is mean squared error over the full batch plus an optional
//! coupled L2 penalty `0.5 * weight_decay * ||theta||^2` applied to every
//! parameter, so the analytic gradient is `dMSE + weight_decay * theta`.
//! Training is single-threaded and fully deterministic in `(seed, config,
//! data)`.

use super::LearnError;
use crate::matrix::FeatureMatrix;
use crate::rng::Rng;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub weight_decay: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// Small-model defaults: lr 0.003, 50 epochs, no weight decay.
    pub fn model_level(seed: u64) -> Self {
        TrainConfig {
            lr: 0.003,
            epochs: 50,
            weight_decay: 0.0,
            seed,
        }
    }

    /// Tabular defaults: lr 0.003, 400 epochs, weight decay 1e-4.
    pub fn tabular(seed: u64) -> Self {
        TrainConfig {
            lr: 0.003,
            epochs: 400,
            weight_decay: 1e-4,
            seed,
        }
    }
}

/// Per-parameter gradients, same shapes as the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// MLP state: affine layers with ReLU between them, none after the last,
/// plus Adam first/second moments and the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layer_sizes: Vec<usize>,
    /// weights[k] is (layer_sizes[k+1] x layer_sizes[k]), row-major.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    m_weights: Vec<Vec<f64>>,
    v_weights: Vec<Vec<f64>>,
    m_biases: Vec<Vec<f64>>,
    v_biases: Vec<Vec<f64>>,
    step: u64,
}

impl Mlp {
    /// Xavier-uniform weights (`+-sqrt(6 / (fan_in + fan_out))`), zero biases.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self, LearnError> {
        if layer_sizes.len() < 2 {
            return Err(LearnError::TooFewLayers {
                got: layer_sizes.len(),
            });
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for k in 0..layer_sizes.len() - 1 {
            let fan_in = layer_sizes[k];
            let fan_out = layer_sizes[k + 1];
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let mut rng = Rng::stream(seed, &format!("mlp/init/{k}"));
            let w: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| (2.0 * rng.next_f64() - 1.0) * bound)
                .collect();
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        let m_weights = weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let v_weights = weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let m_biases = biases.iter().map(|b| vec![0.0; b.len()]).collect();
        let v_biases = biases.iter().map(|b| vec![0.0; b.len()]).collect();
        Ok(Mlp {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            m_weights,
            v_weights,
            m_biases,
            v_biases,
            step: 0,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    #[cfg(test)]
    pub(crate) fn set_parameters(&mut self, weights: Vec<Vec<f64>>, biases: Vec<Vec<f64>>) {
        self.weights = weights;
        self.biases = biases;
    }

    /// Shift one weight by `delta`; finite-difference probing support.
    pub fn nudge_weight(&mut self, layer: usize, index: usize, delta: f64) {
        self.weights[layer][index] += delta;
    }

    /// Shift one bias by `delta`; finite-difference probing support.
    pub fn nudge_bias(&mut self, layer: usize, index: usize, delta: f64) {
        self.biases[layer][index] += delta;
    }

    fn check_input(&self, x: &FeatureMatrix) -> Result<(), LearnError> {
        if x.d() != self.layer_sizes[0] {
            return Err(LearnError::ShapeMismatch {
                expected: self.layer_sizes[0],
                got: x.d(),
            });
        }
        Ok(())
    }

    /// Activations per layer for the whole batch; `acts[0]` is the input.
    fn forward_cached(&self, x: &FeatureMatrix) -> Vec<Vec<Vec<f64>>> {
        let n = x.n();
        let layers = self.weights.len();
        let mut acts: Vec<Vec<Vec<f64>>> = Vec::with_capacity(layers + 1);
        acts.push((0..n).map(|i| x.row(i).to_vec()).collect());
        for k in 0..layers {
            let out_dim = self.layer_sizes[k + 1];
            let in_dim = self.layer_sizes[k];
            let last = k == layers - 1;
            let mut layer_out = Vec::with_capacity(n);
            for sample in &acts[k] {
                let mut out = Vec::with_capacity(out_dim);
                for o in 0..out_dim {
                    let row = &self.weights[k][o * in_dim..(o + 1) * in_dim];
                    let mut z = self.biases[k][o];
                    for (w, a) in row.iter().zip(sample.iter()) {
                        z += w * a;
                    }
                    out.push(if last { z } else { z.max(0.0) });
                }
                layer_out.push(out);
            }
            acts.push(layer_out);
        }
        acts
    }

    /// Predictions for a batch (final layer must have width 1).
    pub fn forward(&self, x: &FeatureMatrix) -> Result<Vec<f64>, LearnError> {
        self.check_input(x)?;
        let acts = self.forward_cached(x);
        Ok(acts.last().unwrap().iter().map(|o| o[0]).collect())
    }

    /// Full-batch loss and exact analytic gradients.
    pub fn loss_and_gradients(
        &self,
        x: &FeatureMatrix,
        y: &[f64],
        weight_decay: f64,
    ) -> Result<(f64, Gradients), LearnError> {
        self.check_input(x)?;
        if y.len() != x.n() {
            return Err(LearnError::TargetLength {
                inputs: x.n(),
                targets: y.len(),
            });
        }
        let n = x.n();
        let layers = self.weights.len();
        let acts = self.forward_cached(x);

        let mut grad_w: Vec<Vec<f64>> = self.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut grad_b: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();

        let mut mse = 0.0;
        for i in 0..n {
            let pred = acts[layers][i][0];
            let residual = pred - y[i];
            mse += residual * residual;
            // dL/dz at the output layer (no activation there)
            let mut delta = vec![2.0 * residual / n as f64];
            for k in (0..layers).rev() {
                let in_dim = self.layer_sizes[k];
                let input = &acts[k][i];
                for (o, &dz) in delta.iter().enumerate() {
                    grad_b[k][o] += dz;
                    let row = &mut grad_w[k][o * in_dim..(o + 1) * in_dim];
                    for (g, a) in row.iter_mut().zip(input.iter()) {
                        *g += dz * a;
                    }
                }
                if k > 0 {
                    // propagate through W^T and the ReLU mask of layer k
                    let mut prev = vec![0.0; in_dim];
                    for (o, &dz) in delta.iter().enumerate() {
                        let row = &self.weights[k][o * in_dim..(o + 1) * in_dim];
                        for (p, w) in prev.iter_mut().zip(row.iter()) {
                            *p += dz * w;
                        }
                    }
                    for (p, a) in prev.iter_mut().zip(acts[k][i].iter()) {
                        if *a <= 0.0 {
                            *p = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        let mut loss = mse / n as f64;

        if weight_decay > 0.0 {
            let mut l2 = 0.0;
            for k in 0..layers {
                for (g, w) in grad_w[k].iter_mut().zip(self.weights[k].iter()) {
                    *g += weight_decay * w;
                    l2 += w * w;
                }
                for (g, b) in grad_b[k].iter_mut().zip(self.biases[k].iter()) {
                    *g += weight_decay * b;
                    l2 += b * b;
                }
            }
            loss += 0.5 * weight_decay * l2;
        }

        Ok((
            loss,
            Gradients {
                weights: grad_w,
                biases: grad_b,
            },
        ))
    }

    /// One bias-corrected Adam update; increments the step counter.
    pub fn adam_step(&mut self, grads: &Gradients, cfg: &TrainConfig) {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - ADAM_BETA1.powi(t);
        let bc2 = 1.0 - ADAM_BETA2.powi(t);
        let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= cfg.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        };
        for k in 0..self.weights.len() {
            for idx in 0..self.weights[k].len() {
                update(
                    &mut self.weights[k][idx],
                    &mut self.m_weights[k][idx],
                    &mut self.v_weights[k][idx],
                    grads.weights[k][idx],
                );
            }
            for idx in 0..self.biases[k].len() {
                update(
                    &mut self.biases[k][idx],
                    &mut self.m_biases[k][idx],
                    &mut self.v_biases[k][idx],
                    grads.biases[k][idx],
                );
            }
        }
    }
}

/// Full-batch training loop; returns the trained model and per-epoch losses.
pub fn train(
    features: &FeatureMatrix,
    targets: &[f64],
    layer_sizes: &[usize],
    cfg: &TrainConfig,
) -> Result<(Mlp, Vec<f64>), LearnError> {
    let mut mlp = Mlp::new(layer_sizes, cfg.seed)?;
    let mut losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let (loss, grads) = mlp.loss_and_gradients(features, targets, cfg.weight_decay)?;
        if !loss.is_finite() {
            return Err(LearnError::NonFiniteLoss { epoch });
        }
        mlp.adam_step(&grads, cfg);
        losses.push(loss);
    }
    Ok((mlp, losses))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_parameters_predict_zero() {
        let mut mlp = Mlp::new(&[2, 3, 1], 0).unwrap();
        let zeros_w = mlp.weights().iter().map(|w| vec![0.0; w.len()]).collect();
        let zeros_b = mlp.biases().iter().map(|b| vec![0.0; b.len()]).collect();
        mlp.set_parameters(zeros_w, zeros_b);
        let x = FeatureMatrix::new(2, 2, vec![1.0, -2.0, 3.0, 4.0]).unwrap();
        assert_eq!(mlp.forward(&x).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn single_affine_layer_is_exact() {
        let mut mlp = Mlp::new(&[1, 1], 0).unwrap();
        mlp.set_parameters(vec![vec![2.0]], vec![vec![1.0]]);
        let x = FeatureMatrix::from_column(vec![0.0, 1.5, -3.0]).unwrap();
        assert_eq!(mlp.forward(&x).unwrap(), vec![1.0, 4.0, -5.0]);
    }

    #[test]
    fn relu_kills_negative_preactivation() {
        // 1 -> 1 -> 1 net, w1 = 1, b1 = -5, w2 = 1, b2 = 0: input 1 gives 0.
        let mut mlp = Mlp::new(&[1, 1, 1], 0).unwrap();
        mlp.set_parameters(vec![vec![1.0], vec![1.0]], vec![vec![-5.0], vec![0.0]]);
        let x = FeatureMatrix::from_column(vec![1.0]).unwrap();
        assert_eq!(mlp.forward(&x).unwrap(), vec![0.0]);
    }

    #[test]
    fn zero_residual_means_zero_gradients() {
        let mlp = Mlp::new(&[2, 3, 1], 9).unwrap();
        let x = FeatureMatrix::new(4, 2, vec![0.1, 0.2, 0.9, -0.4, 0.5, 0.5, -0.2, 0.8]).unwrap();
        let y = mlp.forward(&x).unwrap();
        let (loss, grads) = mlp.loss_and_gradients(&x, &y, 0.0).unwrap();
        assert_eq!(loss, 0.0);
        for layer in grads.weights.iter().chain(grads.biases.iter()) {
            assert!(layer.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn doubling_residuals_doubles_output_layer_weight_gradients() {
        let mlp = Mlp::new(&[2, 3, 1], 9).unwrap();
        let x = FeatureMatrix::new(3, 2, vec![0.3, -0.1, 0.7, 0.2, -0.5, 0.4]).unwrap();
        let preds = mlp.forward(&x).unwrap();
        let y_one: Vec<f64> = preds.iter().map(|p| p - 1.0).collect();
        let y_two: Vec<f64> = preds.iter().map(|p| p - 2.0).collect();
        let (_, g_one) = mlp.loss_and_gradients(&x, &y_one, 0.0).unwrap();
        let (_, g_two) = mlp.loss_and_gradients(&x, &y_two, 0.0).unwrap();
        let last = g_one.weights.len() - 1;
        for (a, b) in g_one.weights[last].iter().zip(g_two.weights[last].iter()) {
            assert!((2.0 * a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn gradients_match_central_finite_differences() {
        // Seeded 3 -> 4 -> 1 net on an 8-sample batch, weight decay included
        // so the L2 term's gradient is checked too.
        let mut rng = crate::rng::Rng::stream(0, "gradcheck/data");
        let x = FeatureMatrix::new(8, 3, rng.normal_vec(24)).unwrap();
        let y = rng.normal_vec(8);
        let wd = 1e-4;
        let mlp = Mlp::new(&[3, 4, 1], 0).unwrap();
        let (_, grads) = mlp.loss_and_gradients(&x, &y, wd).unwrap();

        let h = 1e-5;
        let mut checked = 0;
        for k in 0..mlp.weights().len() {
            for idx in 0..mlp.weights()[k].len() {
                let mut plus = mlp.clone();
                plus.weights[k][idx] += h;
                let mut minus = mlp.clone();
                minus.weights[k][idx] -= h;
                let fd = (plus.loss_and_gradients(&x, &y, wd).unwrap().0
                    - minus.loss_and_gradients(&x, &y, wd).unwrap().0)
                    / (2.0 * h);
                let analytic = grads.weights[k][idx];
                let denom = analytic.abs().max(fd.abs()).max(1e-8);
                assert!(
                    ((analytic - fd) / denom).abs() < 1e-4,
                    "weight[{k}][{idx}]: analytic {analytic}, fd {fd}"
                );
                checked += 1;
            }
            for idx in 0..mlp.biases()[k].len() {
                let mut plus = mlp.clone();
                plus.biases[k][idx] += h;
                let mut minus = mlp.clone();
                minus.biases[k][idx] -= h;
                let fd = (plus.loss_and_gradients(&x, &y, wd).unwrap().0
                    - minus.loss_and_gradients(&x, &y, wd).unwrap().0)
                    / (2.0 * h);
                let analytic = grads.biases[k][idx];
                let denom = analytic.abs().max(fd.abs()).max(1e-8);
                assert!(
                    ((analytic - fd) / denom).abs() < 1e-4,
                    "bias[{k}][{idx}]: analytic {analytic}, fd {fd}"
                );
                checked += 1;
            }
        }
        assert_eq!(checked, 3 * 4 + 4 + 4 + 1);
    }

    #[test]
    fn adam_zero_gradient_leaves_parameters_unchanged() {
        let mut mlp = Mlp::new(&[2, 2, 1], 3).unwrap();
        let before = mlp.clone();
        let grads = Gradients {
            weights: mlp.weights().iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: mlp.biases().iter().map(|b| vec![0.0; b.len()]).collect(),
        };
        mlp.adam_step(&grads, &TrainConfig::model_level(0));
        assert_eq!(mlp.weights(), before.weights());
        assert_eq!(mlp.biases(), before.biases());
        assert_eq!(mlp.step(), 1);
    }

    #[test]
    fn adam_first_step_moves_by_lr_for_unit_gradients() {
        // With |g| = 1 the bias-corrected ratio is g / (|g| + eps), so each
        // parameter moves by lr within lr * eps.
        let mut mlp = Mlp::new(&[2, 2, 1], 3).unwrap();
        let before = mlp.clone();
        let cfg = TrainConfig::model_level(0);
        let grads = Gradients {
            weights: mlp.weights().iter().map(|w| vec![1.0; w.len()]).collect(),
            biases: mlp.biases().iter().map(|b| vec![-1.0; b.len()]).collect(),
        };
        mlp.adam_step(&grads, &cfg);
        for k in 0..mlp.weights().len() {
            for (after, b) in mlp.weights()[k].iter().zip(before.weights()[k].iter()) {
                assert!(((b - after) - cfg.lr).abs() < 1e-9);
            }
            for (after, b) in mlp.biases()[k].iter().zip(before.biases()[k].iter()) {
                assert!(((after - b) - cfg.lr).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn training_is_deterministic_and_lr_zero_is_inert() {
        let mut rng = crate::rng::Rng::stream(1, "train/data");
        let x = FeatureMatrix::new(16, 2, rng.normal_vec(32)).unwrap();
        let y = rng.normal_vec(16);
        let cfg = TrainConfig {
            lr: 0.01,
            epochs: 20,
            weight_decay: 0.0,
            seed: 4,
        };
        let (model_a, losses_a) = train(&x, &y, &[2, 4, 1], &cfg).unwrap();
        let (model_b, losses_b) = train(&x, &y, &[2, 4, 1], &cfg).unwrap();
        assert_eq!(model_a, model_b);
        assert_eq!(losses_a, losses_b);
        assert!(losses_a.last().unwrap() < losses_a.first().unwrap());

        let frozen = TrainConfig { lr: 0.0, ..cfg };
        let (model_c, losses_c) = train(&x, &y, &[2, 4, 1], &frozen).unwrap();
        assert_eq!(
            model_c.weights(),
            Mlp::new(&[2, 4, 1], 4).unwrap().weights()
        );
        assert!(losses_c.iter().all(|&l| l == losses_c[0]));
    }
}
