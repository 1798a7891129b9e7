//! Drawing outcomes and evaluating likelihoods.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::metrology::{ProbabilityModel, P_FLOOR};

use super::{rng, EstimatorError, Result};

/// `m` independent outcomes drawn at `theta_true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSample {
    pub theta_true: f64,
    pub seed: u64,
    pub stream: u64,
    pub n_outcomes: usize,
    pub outcomes: Vec<usize>,
}

impl OutcomeSample {
    /// Wraps externally supplied outcome indices after checking them.
    pub fn from_outcomes(model: &ProbabilityModel, outcomes: Vec<usize>) -> Result<Self> {
        let n_outcomes = model.n_outcomes();
        if let Some(&bad) = outcomes.iter().find(|&&o| o >= n_outcomes) {
            return Err(EstimatorError::Outcome {
                outcome: bad,
                n_outcomes,
            });
        }
        Ok(Self {
            theta_true: f64::NAN,
            seed: 0,
            stream: 0,
            n_outcomes,
            outcomes,
        })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Occurrences of each outcome.
    pub fn counts(&self) -> Vec<u64> {
        let mut c = vec![0; self.n_outcomes];
        for &o in &self.outcomes {
            c[o] += 1;
        }
        c
    }
}

pub fn sample(model: &ProbabilityModel, theta_true: f64, m: usize, seed: u64) -> Result<OutcomeSample> {
    sample_stream(model, theta_true, m, seed, 0)
}

/// Inverse-CDF draws from `P(·|θ)` using stream `stream` of `seed`.
pub fn sample_stream(
    model: &ProbabilityModel,
    theta_true: f64,
    m: usize,
    seed: u64,
    stream: u64,
) -> Result<OutcomeSample> {
    if m == 0 {
        return Err(EstimatorError::Count("m"));
    }
    let p = model.probabilities(theta_true);
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &v in &p {
        acc += v.max(0.0);
        cdf.push(acc);
    }
    let last = p.iter().rposition(|&v| v > 0.0).unwrap_or(p.len() - 1);
    let mut r = rng(seed, stream);
    let outcomes = (0..m)
        .map(|_| {
            let u: f64 = r.random::<f64>() * acc;
            cdf.iter().position(|&c| u < c).unwrap_or(last).min(last)
        })
        .collect();
    Ok(OutcomeSample {
        theta_true,
        seed,
        stream,
        n_outcomes: p.len(),
        outcomes,
    })
}

/// `Σ_i ln P(ε_i|φ)` with probabilities floored at `P_FLOOR`.
pub fn log_likelihood(model: &ProbabilityModel, outcomes: &[usize], phi: f64) -> f64 {
    let p = model.probabilities(phi);
    outcomes.iter().map(|&o| p[o].max(P_FLOOR).ln()).sum()
}

/// Same as [`log_likelihood`] from outcome counts.
pub fn log_likelihood_counts(model: &ProbabilityModel, counts: &[u64], phi: f64) -> f64 {
    let p = model.probabilities(phi);
    counts
        .iter()
        .zip(&p)
        .filter(|(&n, _)| n > 0)
        .map(|(&n, &q)| n as f64 * q.max(P_FLOOR).ln())
        .sum()
}

/// `Σ_ε P(ε|θ) ln(P(ε|θ)/P(ε|φ))`, infinite when `P(·|φ)` misses part of the
/// support of `P(·|θ)`.
pub fn kl_divergence(model: &ProbabilityModel, theta: f64, phi: f64) -> f64 {
    let p = model.probabilities(theta);
    let q = model.probabilities(phi);
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(&q) {
        if a <= 0.0 {
            continue;
        }
        if b <= 0.0 {
            return f64::INFINITY;
        }
        total += a * (a / b).ln();
    }
    total.max(0.0)
}
