//! Upper confidence bounding on a Gaussian multi-armed bandit.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sdm::mean_and_std_error;
use crate::seed::{child_seed, rng_from_seed};

/// Pulls each arm gets before the confidence rule takes over; two pulls are
/// the minimum for a sample standard deviation.
pub const INITIAL_PULLS: usize = 2;

/// Per-arm running mean and variance (Welford).
#[derive(Clone, Debug, PartialEq)]
pub struct BanditBelief {
    counts: Vec<usize>,
    means: Vec<f64>,
    m2: Vec<f64>,
}

impl BanditBelief {
    pub fn new(arms: usize) -> Self {
        Self {
            counts: vec![0; arms],
            means: vec![0.0; arms],
            m2: vec![0.0; arms],
        }
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    pub fn observe(&mut self, arm: usize, reward: f64) {
        self.counts[arm] += 1;
        let n = self.counts[arm] as f64;
        let delta = reward - self.means[arm];
        self.means[arm] += delta / n;
        self.m2[arm] += delta * (reward - self.means[arm]);
    }

    pub fn count(&self, arm: usize) -> usize {
        self.counts[arm]
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.means[arm]
    }

    /// `s / sqrt(n)`, zero with fewer than two observations.
    pub fn std_error(&self, arm: usize) -> f64 {
        let n = self.counts[arm];
        if n < 2 {
            return 0.0;
        }
        let s = (self.m2[arm] / (n - 1) as f64).sqrt();
        s / (n as f64).sqrt()
    }
}

/// `argmax_x μ̄_x + θ σ̄_x`, lowest index on ties.
pub fn ucb_argmax(means: &[f64], std_errors: &[f64], theta: f64) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (x, (m, s)) in means.iter().zip(std_errors).enumerate() {
        let score = m + theta * s;
        if score > best_score {
            best = x;
            best_score = score;
        }
    }
    best
}

/// Round-robin until every arm has [`INITIAL_PULLS`] observations, then
/// [`ucb_argmax`] on the belief.
pub fn ucb_policy(belief: &BanditBelief, theta: f64) -> usize {
    if let Some(arm) = (0..belief.arms()).find(|&x| belief.count(x) < INITIAL_PULLS) {
        return arm;
    }
    let sigmas: Vec<f64> = (0..belief.arms()).map(|x| belief.std_error(x)).collect();
    ucb_argmax(&belief.means, &sigmas, theta)
}

#[derive(Debug, Error, PartialEq)]
pub enum BanditError {
    #[error("a bandit needs at least one arm")]
    NoArms,
    #[error("noise must be finite and nonnegative, got {0}")]
    Noise(f64),
    #[error("arm means must be finite")]
    Mean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditTestbed {
    pub means: Vec<f64>,
    /// Standard deviation of every reward.
    pub noise: f64,
    pub horizon: usize,
}

impl BanditTestbed {
    pub fn validate(&self) -> Result<(), BanditError> {
        if self.means.is_empty() {
            return Err(BanditError::NoArms);
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(BanditError::Mean);
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(BanditError::Noise(self.noise));
        }
        Ok(())
    }

    /// Reward of the k-th pull of each arm, drawn up front so every policy
    /// sees the same reward for the same (arm, pull) pair.
    fn reward_table(&self, seed: u64) -> Vec<Vec<f64>> {
        self.means
            .iter()
            .enumerate()
            .map(|(arm, &mu)| {
                let mut rng = rng_from_seed(child_seed(seed, arm as u64));
                (0..self.horizon)
                    .map(|_| mu + self.noise * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect()
    }

    /// Cumulative reward of UCB with `theta` over the horizon.
    pub fn run(&self, theta: f64, seed: u64) -> f64 {
        let table = self.reward_table(seed);
        let mut belief = BanditBelief::new(self.means.len());
        let mut total = 0.0;
        for _ in 0..self.horizon {
            let arm = ucb_policy(&belief, theta);
            let reward = table[arm][belief.count(arm)];
            belief.observe(arm, reward);
            total += reward;
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BanditRow {
    pub theta: f64,
    pub mean_reward: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BanditTuning {
    pub best_theta: f64,
    pub table: Vec<BanditRow>,
    /// `rewards[g][s]`: cumulative reward of grid point `g` on seed `s`.
    pub rewards: Vec<Vec<f64>>,
}

/// Grid search over `theta_grid` with every grid point run on every seed.
/// The best mean reward wins, lowest grid index on ties.
pub fn bandit_tune(testbed: &BanditTestbed, theta_grid: &[f64], seeds: &[u64]) -> Result<BanditTuning, BanditError> {
    testbed.validate()?;
    let rewards: Vec<Vec<f64>> = theta_grid
        .iter()
        .map(|&theta| seeds.par_iter().map(|&s| testbed.run(theta, s)).collect())
        .collect();
    let table: Vec<BanditRow> = theta_grid
        .iter()
        .zip(&rewards)
        .map(|(&theta, r)| {
            let (mean_reward, std_error) = mean_and_std_error(r);
            BanditRow {
                theta,
                mean_reward,
                std_error,
            }
        })
        .collect();
    let mut best = 0;
    for (g, row) in table.iter().enumerate() {
        if row.mean_reward > table[best].mean_reward {
            best = g;
        }
    }
    Ok(BanditTuning {
        best_theta: theta_grid.get(best).copied().unwrap_or(0.0),
        table,
        rewards,
    })
}
