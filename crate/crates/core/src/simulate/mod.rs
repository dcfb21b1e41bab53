//! Sample paths, covariance structures and the seeded replication engine.
//!
//! Every replication `r` draws from its own ChaCha8 substream
//! `(seed, stream = r)`, so results do not depend on evaluation order or on
//! the number of worker threads. Per-replication outcomes are collected in
//! replication order and reduced sequentially.

mod covariance;
mod grid;
mod mc;

pub use covariance::{CovarianceSpec, Factor};
pub use grid::{GridMode, GridSpec, DEFAULT_NODES_PER_UNIT};
pub use mc::{
    mc_coupled_sup_prob, mc_expected_sup, mc_expected_sup_diff, mc_sup_prob, mc_sup_prob_multi,
    mc_vector_expected_sup, mc_vector_sup_prob, mc_vector_sup_prob_multi, sample_path, sample_paths_coupled,
    sup_diff_samples, Functional, PathSampler,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Describes how replication randomness is derived from the seed.
pub const SUBSTREAM_RULE: &str = "chacha8(seed), stream = replication index";

/// Replication settings shared by every Monte Carlo operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub reps: u64,
    pub seed: u64,
    /// Worker threads; 1 runs on the calling thread.
    pub workers: usize,
}

impl McConfig {
    pub fn new(reps: u64, seed: u64) -> Self {
        Self { reps, seed, workers: 1 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Generator for replication `rep`.
    pub fn rng(&self, rep: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(rep);
        rng
    }

    /// Runs `f` once per replication and returns the outcomes in
    /// replication order.
    pub fn replicate<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &mut ChaCha8Rng) -> T + Sync + Send,
    {
        let base = ChaCha8Rng::seed_from_u64(self.seed);
        let run = |rep: u64| {
            let mut rng = base.clone();
            rng.set_stream(rep);
            f(rep, &mut rng)
        };
        if self.workers <= 1 {
            return (0..self.reps).map(run).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .expect("thread pool");
        pool.install(|| (0..self.reps).into_par_iter().map(run).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    /// Fraction of replications; Wilson interval.
    Probability,
    /// Sample mean; CLT interval.
    Mean,
}

/// Monte Carlo point estimate with a 95% interval and its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub kind: EstimateKind,
    pub estimate: f64,
    pub reps: u64,
    pub half_width: f64,
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
    pub substream: String,
}

impl McEstimate {
    /// Wilson score interval for `successes` out of `reps`. `lo`/`hi` are the
    /// Wilson bounds; `half_width` is half their distance.
    pub fn probability(successes: u64, reps: u64, seed: u64) -> Self {
        let n = reps as f64;
        let p = if reps == 0 { 0.0 } else { successes as f64 / n };
        let (lo, hi) = wilson_interval(successes, reps, Z95);
        Self {
            kind: EstimateKind::Probability,
            estimate: p,
            reps,
            half_width: 0.5 * (hi - lo),
            lo,
            hi,
            seed,
            substream: SUBSTREAM_RULE.to_string(),
        }
    }

    /// Sample mean with CLT half-width `Z95 * s / sqrt(reps)`.
    pub fn mean(samples: &[f64], seed: u64) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let hw = Z95 * (var / n).sqrt();
        Self {
            kind: EstimateKind::Mean,
            estimate: mean,
            reps: samples.len() as u64,
            half_width: hw,
            lo: mean - hw,
            hi: mean + hw,
            seed,
            substream: SUBSTREAM_RULE.to_string(),
        }
    }
}

/// Wilson score interval at normal quantile `z`.
pub fn wilson_interval(successes: u64, reps: u64, z: f64) -> (f64, f64) {
    if reps == 0 {
        return (0.0, 1.0);
    }
    let n = reps as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}
