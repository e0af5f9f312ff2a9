//! Synthetic latent-ranking task.
//!
//! Features are i.i.d. standard normal; the target is a strictly increasing
//! nonlinear function of a latent linear score `z = X w` plus small noise:
//!
//! `y = 0.5 * logistic(z) + 0.2 * sin(z) + 0.2 * z + 0.1 * eps`,
//! `eps ~ N(0, 0.1^2)`.
//!
//! Increasing in `z` because `d/dz >= 0.5 * logistic'(z) > 0`, so rank-based
//! evaluation against `y` is meaningful by construction. Note the noise term
//! is `0.1 * eps` with `eps` itself of standard deviation 0.1, i.e. total
//! noise std 0.01.

use super::LearnError;
use crate::matrix::FeatureMatrix;
use crate::rank::logistic;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct TaskData {
    pub x: FeatureMatrix,
    pub y: Vec<f64>,
    /// Latent weights used by the generator, kept for auditability.
    pub w_latent: Vec<f64>,
    pub seed: u64,
}

/// Generate the task; bitwise deterministic in `(n, d, seed)`.
pub fn gen_synthetic_task(n: usize, d: usize, seed: u64) -> TaskData {
    let mut x_rng = Rng::stream(seed, "task/x");
    let x = FeatureMatrix::new(n, d, x_rng.normal_vec(n * d))
        .expect("normal draws are finite and n, d >= 1");
    let mut w_rng = Rng::stream(seed, "task/w");
    let w_latent = w_rng.normal_vec(d);
    let mut noise_rng = Rng::stream(seed, "task/noise");
    let y = (0..n)
        .map(|i| {
            let z: f64 = (0..d).map(|j| x.get(i, j) * w_latent[j]).sum();
            let eps = 0.1 * noise_rng.next_normal();
            0.5 * logistic(z) + 0.2 * z.sin() + 0.2 * z + 0.1 * eps
        })
        .collect();
    TaskData {
        x,
        y,
        w_latent,
        seed,
    }
}

/// Deterministic shuffled split; the last `test_ratio` share becomes test.
pub fn train_test_split(
    n: usize,
    test_ratio: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), LearnError> {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = Rng::stream(seed, "split");
    rng.shuffle(&mut indices);
    let n_test = (n as f64 * test_ratio).round() as usize;
    if n_test == 0 {
        return Err(LearnError::EmptySplit {
            side: "test",
            n,
            ratio: test_ratio,
        });
    }
    if n_test >= n {
        return Err(LearnError::EmptySplit {
            side: "train",
            n,
            ratio: test_ratio,
        });
    }
    let test = indices.split_off(n - n_test);
    Ok((indices, test))
}
