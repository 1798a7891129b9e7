//! Sampling and phase estimation: maximum likelihood, Bayesian posteriors
//! and the method of moments, each with a Monte-Carlo harness.
//!
//! Random numbers come from ChaCha8 seeded with a 64-bit seed; trial `t` of
//! a harness draws from stream `t`, so results do not depend on how trials
//! are scheduled across threads.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrology::{MetrologyError, ProbabilityModel};

mod bayes;
mod mle;
mod moments;
mod report;
mod sampling;

pub use bayes::{
    bayes_monte_carlo, bayes_posterior, bayes_variance_bound, posterior_summaries, BayesBound, BayesHarnessReport,
    CredibleInterval, PosteriorDistribution, PosteriorSummary, Prior, BORDER_RATIO, DEFAULT_POSTERIOR_POINTS,
};
pub use mle::{mle, mle_monte_carlo, MleOptions, MleResult};
pub use moments::{method_of_moments, moments_monte_carlo, moments_prediction, MomentsEstimate};
pub use report::{EstimationReport, EstimatorKind, HistogramBin};
pub use sampling::{kl_divergence, log_likelihood, log_likelihood_counts, sample, sample_stream, OutcomeSample};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("invalid domain [{lo}, {hi}]")]
    Domain { lo: f64, hi: f64 },
    #[error("need at least {min} grid points, got {found}")]
    Grid { min: usize, found: usize },
    #[error("{0} must be at least 1")]
    Count(&'static str),
    #[error("outcome {outcome} does not exist (model has {n_outcomes} outcomes)")]
    Outcome { outcome: usize, n_outcomes: usize },
    #[error("prior is negative, non-finite or not normalisable on the grid")]
    Prior,
    #[error("posterior vanished everywhere on the grid (numerical underflow)")]
    Underflow,
    #[error("posterior does not vanish at the domain borders (edge/max = {left:.3e}, {right:.3e})")]
    BorderSupport { left: f64, right: f64 },
    #[error("sample mean {value} is outside the range [{lo}, {hi}] of the mean response on the domain")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("mean response is not strictly monotone on the domain")]
    NotMonotone,
    #[error(transparent)]
    Metrology(#[from] MetrologyError),
}

pub type Result<T, E = EstimatorError> = std::result::Result<T, E>;

/// Closed phase interval `[lo, hi]` searched by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(EstimatorError::Domain { lo, hi })
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// `points` equally spaced values including both ends.
    pub fn linspace(&self, points: usize) -> Vec<f64> {
        let h = self.width() / (points - 1) as f64;
        (0..points)
            .map(|i| {
                if i + 1 == points {
                    self.hi
                } else {
                    self.lo + h * i as f64
                }
            })
            .collect()
    }
}

/// True when every outcome probability is even in `θ`, so that `θ` and
/// `−θ` cannot be told apart. Checked at a few generic phases.
pub fn is_reflection_symmetric(model: &ProbabilityModel) -> bool {
    [0.137, 0.61, 1.09, 2.3].iter().all(|&t| {
        let a = model.probabilities(t);
        let b = model.probabilities(-t);
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10)
    })
}

/// Default estimation interval for `model`: `[0, π/2]` when
/// [`is_reflection_symmetric`] holds, otherwise `[−π/2, π/2]`.
pub fn default_domain(model: &ProbabilityModel) -> Domain {
    if is_reflection_symmetric(model) {
        Domain { lo: 0.0, hi: FRAC_PI_2 }
    } else {
        Domain {
            lo: -FRAC_PI_2,
            hi: FRAC_PI_2,
        }
    }
}

/// Generator for stream `stream` under `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrology::Povm;
    use crate::probes;
    use crate::spinspace::{SpinAxis, SpinSpace};
    use rand::Rng;

    #[test]
    fn domain_validation_and_grid() {
        assert!(Domain::new(1.0, 1.0).is_err());
        assert!(Domain::new(0.0, f64::NAN).is_err());
        let d = Domain::new(0.0, 1.0).unwrap();
        let g = d.linspace(5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(rng(7, 0), |r, _| Some(r.random())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(rng(7, 0), |r, _| Some(r.random())).collect();
        let c: Vec<u64> = (0..4).map(|_| 0).scan(rng(7, 1), |r, _| Some(r.random())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn twin_fock_gets_half_range() {
        let s = SpinSpace::new(4).unwrap();
        let m = ProbabilityModel::new(probes::twin_fock(s).unwrap(), SpinAxis::Y, Povm::number_counting(s)).unwrap();
        assert_eq!(default_domain(&m), Domain { lo: 0.0, hi: FRAC_PI_2 });
        let css = ProbabilityModel::new(
            probes::coherent_spin(s, FRAC_PI_2, 0.0),
            SpinAxis::Y,
            Povm::number_counting(s),
        )
        .unwrap();
        assert_eq!(default_domain(&css).lo, -FRAC_PI_2);
    }
}
