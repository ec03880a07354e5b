//! Seed-stream derivation for Monte Carlo replicates.
//!
//! Every random draw in the crate comes from [`stream`]: a ChaCha8 generator
//! keyed by the top-level seed with the replicate index selecting the
//! stream. ChaCha is counter based, so stream `r` is the same sequence no
//! matter which worker evaluates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::numeric::mean_and_stderr;

/// Generator for replicate `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// How replicate loops are scheduled. Results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Reference mode: one replicate after another on the calling thread.
    Serial,
    #[default]
    Parallel,
}

/// Replicate count, seed and scheduling for a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub replicates: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl McConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        Self {
            replicates,
            seed,
            execution: Execution::Parallel,
        }
    }

    pub fn serial(mut self) -> Self {
        self.execution = Execution::Serial;
        self
    }
}

/// Mean of a Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorResult {
    pub mean: f64,
    /// Sample standard deviation divided by `sqrt(replicates)`.
    pub stderr: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl EstimatorResult {
    /// `|mean - reference| / stderr`, infinite when stderr is zero and the
    /// values differ.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = (self.mean - reference).abs();
        if diff == 0.0 {
            0.0
        } else if self.stderr == 0.0 {
            f64::INFINITY
        } else {
            diff / self.stderr
        }
    }
}

/// Evaluates `f(rng_r)` for every replicate `r` and reduces the values
/// with a fixed summation tree.
pub fn replicate<F>(config: &McConfig, f: F) -> EstimatorResult
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let values = replicate_values(config, f);
    let (mean, stderr) = mean_and_stderr(&values);
    EstimatorResult {
        mean,
        stderr,
        replicates: config.replicates,
        seed: config.seed,
    }
}

/// Per-replicate outputs in replicate order.
pub fn replicate_values<T, F>(config: &McConfig, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let seed = config.seed;
    match config.execution {
        Execution::Serial => (0..config.replicates).map(|r| f(&mut stream(seed, r as u64))).collect(),
        Execution::Parallel => (0..config.replicates)
            .into_par_iter()
            .map(|r| f(&mut stream(seed, r as u64)))
            .collect(),
    }
}
