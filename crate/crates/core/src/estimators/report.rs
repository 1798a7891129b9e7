//! Summary of a Monte-Carlo estimation run.

use serde::{Deserialize, Serialize};

use crate::export::{csv_table, sig17};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    MaximumLikelihood,
    PosteriorMean,
    MethodOfMoments,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub estimator: EstimatorKind,
    pub theta_true: f64,
    pub m: usize,
    pub seed: u64,
    pub trials: usize,
    pub estimates: Vec<f64>,
    pub mean: f64,
    /// Unbiased sample variance of the estimates.
    pub variance: f64,
    /// Standard error of `mean`.
    pub stderr: f64,
    /// Cramér-Rao reference `1/(m F(θ_true))`.
    pub crlb: f64,
    /// Estimator-specific variance prediction, when one exists.
    pub prediction: Option<f64>,
    /// Trials whose estimate sits on the domain boundary.
    pub boundary_hits: usize,
}

impl EstimationReport {
    pub fn from_estimates(
        estimator: EstimatorKind,
        theta_true: f64,
        m: usize,
        seed: u64,
        estimates: Vec<f64>,
        crlb: f64,
    ) -> Self {
        let n = estimates.len();
        let mean = estimates.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            estimator,
            theta_true,
            m,
            seed,
            trials: n,
            estimates,
            mean,
            variance,
            stderr: (variance / n as f64).sqrt(),
            crlb,
            prediction: None,
            boundary_hits: 0,
        }
    }

    pub fn bias(&self) -> f64 {
        self.mean - self.theta_true
    }

    /// Fraction of trials that ended on the boundary.
    pub fn boundary_fraction(&self) -> f64 {
        self.boundary_hits as f64 / self.trials as f64
    }

    /// Equal-width histogram of the estimates over their range.
    pub fn histogram(&self, bins: usize) -> Vec<HistogramBin> {
        let bins = bins.max(1);
        let lo = self.estimates.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let mut counts = vec![0; bins];
        for &e in &self.estimates {
            let k = (((e - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(k, count)| HistogramBin {
                lo: lo + k as f64 * width,
                hi: lo + (k + 1) as f64 * width,
                count,
            })
            .collect()
    }

    /// `trial,estimate` rows.
    pub fn to_csv(&self) -> String {
        csv_table(
            &["trial", "estimate"],
            self.estimates
                .iter()
                .enumerate()
                .map(|(k, &e)| vec![k.to_string(), sig17(e)]),
        )
    }
}
