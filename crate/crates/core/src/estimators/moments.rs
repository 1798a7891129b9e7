//! Method of moments: invert the mean response `f(φ) = ⟨M̂⟩_φ` at the
//! sample mean of the observable.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrology::{fisher_information, ProbabilityModel};
use crate::numerics::HermitianOperator;

use super::report::{EstimationReport, EstimatorKind};
use super::sampling::{sample_stream, OutcomeSample};
use super::{Domain, EstimatorError, Result};

const MONOTONE_POINTS: usize = 257;
const BISECTION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentsEstimate {
    pub estimate: f64,
    pub sample_mean: f64,
    /// `(ΔM̂)² / (m (∂⟨M̂⟩/∂θ)²)` at the estimate.
    pub variance_prediction: f64,
}

/// Values of `M̂` on each outcome, with mean and slope of the response.
struct Response {
    values: Vec<f64>,
}

impl Response {
    fn new(model: &ProbabilityModel, observable: &HermitianOperator) -> Result<Self> {
        Ok(Self {
            values: model.povm().outcome_values(observable)?,
        })
    }

    fn mean(&self, model: &ProbabilityModel, phi: f64) -> f64 {
        dot(&self.values, &model.probabilities(phi))
    }

    fn slope(&self, model: &ProbabilityModel, phi: f64) -> f64 {
        dot(&self.values, &model.probability_derivative(phi))
    }

    fn variance(&self, model: &ProbabilityModel, phi: f64) -> f64 {
        let p = model.probabilities(phi);
        let mean = dot(&self.values, &p);
        let sq: f64 = self.values.iter().zip(&p).map(|(v, q)| v * v * q).sum();
        (sq - mean * mean).max(0.0)
    }

    fn prediction(&self, model: &ProbabilityModel, phi: f64, m: usize) -> f64 {
        self.variance(model, phi) / (m as f64 * self.slope(model, phi).powi(2))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Error-propagation prediction `(ΔM̂)²_θ / (m (∂_θ⟨M̂⟩)²)` for `m` shots.
pub fn moments_prediction(
    model: &ProbabilityModel,
    observable: &HermitianOperator,
    theta: f64,
    m: usize,
) -> Result<f64> {
    Ok(Response::new(model, observable)?.prediction(model, theta, m))
}

/// Solves `⟨M̂⟩_φ = M_m` on `domain`, where `M_m` is the sample mean of the
/// observable's outcome values. The response must be strictly monotone on
/// the domain; this is checked on a grid.
pub fn method_of_moments(
    model: &ProbabilityModel,
    observable: &HermitianOperator,
    sample: &OutcomeSample,
    domain: Domain,
) -> Result<MomentsEstimate> {
    let response = Response::new(model, observable)?;
    check_monotone(model, &response, domain)?;
    invert(model, &response, sample, domain)
}

fn check_monotone(model: &ProbabilityModel, response: &Response, domain: Domain) -> Result<bool> {
    let f: Vec<f64> = domain
        .linspace(MONOTONE_POINTS)
        .iter()
        .map(|&x| response.mean(model, x))
        .collect();
    let increasing = f.windows(2).all(|w| w[1] > w[0]);
    let decreasing = f.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(EstimatorError::NotMonotone);
    }
    Ok(increasing)
}

fn invert(
    model: &ProbabilityModel,
    response: &Response,
    sample: &OutcomeSample,
    domain: Domain,
) -> Result<MomentsEstimate> {
    if sample.is_empty() {
        return Err(EstimatorError::Count("m"));
    }
    let sample_mean = sample.outcomes.iter().map(|&o| response.values[o]).sum::<f64>() / sample.len() as f64;
    let (f_lo, f_hi) = (response.mean(model, domain.lo), response.mean(model, domain.hi));
    let (lo, hi) = (f_lo.min(f_hi), f_lo.max(f_hi));
    if sample_mean < lo || sample_mean > hi {
        return Err(EstimatorError::OutOfRange {
            value: sample_mean,
            lo,
            hi,
        });
    }
    let sign = if f_hi > f_lo { 1.0 } else { -1.0 };
    let (mut a, mut b) = (domain.lo, domain.hi);
    while b - a > BISECTION_TOL {
        let mid = 0.5 * (a + b);
        if sign * (response.mean(model, mid) - sample_mean) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let estimate = 0.5 * (a + b);
    Ok(MomentsEstimate {
        estimate,
        sample_mean,
        variance_prediction: response.prediction(model, estimate, sample.len()),
    })
}

/// Repeats `sample → method_of_moments`; `prediction` holds the variance
/// prediction at `theta_true`.
#[allow(clippy::too_many_arguments)]
pub fn moments_monte_carlo(
    model: &ProbabilityModel,
    observable: &HermitianOperator,
    theta_true: f64,
    m: usize,
    trials: usize,
    seed: u64,
    domain: Domain,
) -> Result<EstimationReport> {
    if trials == 0 {
        return Err(EstimatorError::Count("trials"));
    }
    let response = Response::new(model, observable)?;
    check_monotone(model, &response, domain)?;
    let estimates = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = sample_stream(model, theta_true, m, seed, t)?;
            invert(model, &response, &s, domain).map(|e| e.estimate)
        })
        .collect::<Result<Vec<_>>>()?;
    let crlb = 1.0 / (m as f64 * fisher_information(model, theta_true).fi);
    let edge = 1e-9 * domain.width();
    let hits = estimates
        .iter()
        .filter(|&&e| e - domain.lo < edge || domain.hi - e < edge)
        .count();
    let mut report =
        EstimationReport::from_estimates(EstimatorKind::MethodOfMoments, theta_true, m, seed, estimates, crlb);
    report.prediction = Some(response.prediction(model, theta_true, m));
    report.boundary_hits = hits;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::sample;
    use crate::metrology::Povm;
    use crate::probes;
    use crate::spinspace::{SpinAxis, SpinSpace};
    use std::f64::consts::FRAC_PI_2;

    fn equator(n: u32) -> (SpinSpace, ProbabilityModel) {
        let s = SpinSpace::new(n).unwrap();
        let m = ProbabilityModel::new(
            probes::coherent_spin(s, FRAC_PI_2, 0.0),
            SpinAxis::Y,
            Povm::number_counting(s),
        )
        .unwrap();
        (s, m)
    }

    #[test]
    fn prediction_is_shot_noise_for_equator_state() {
        let (s, model) = equator(20);
        for t in [-1.2, -0.3, 0.0, 0.5, 1.4] {
            let p = moments_prediction(&model, &s.jz(), t, 100).unwrap();
            assert!((p - 1.0 / 2000.0).abs() < 1e-12, "{t}: {p}");
        }
    }

    #[test]
    fn noiseless_mean_is_inverted_exactly() {
        let (s, model) = equator(4);
        // ⟨Ĵ_z⟩ = −2 sin θ: outcomes μ = −2 and 0 equally often give −1, θ = π/6.
        let x = OutcomeSample::from_outcomes(&model, vec![0, 2, 0, 2]).unwrap();
        let d = Domain::new(-1.5, 1.5).unwrap();
        let e = method_of_moments(&model, &s.jz(), &x, d).unwrap();
        assert!((e.estimate - std::f64::consts::FRAC_PI_6).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let (s, model) = equator(4);
        let x = sample(&model, 0.3, 10, 1).unwrap();
        let wide = Domain::new(-2.0, 2.0).unwrap();
        assert_eq!(
            method_of_moments(&model, &s.jz(), &x, wide),
            Err(EstimatorError::NotMonotone)
        );
        let narrow = Domain::new(1.0, 1.2).unwrap();
        let all_up = OutcomeSample::from_outcomes(&model, vec![4; 5]).unwrap();
        assert!(matches!(
            method_of_moments(&model, &s.jz(), &all_up, narrow),
            Err(EstimatorError::OutOfRange { .. })
        ));
    }

    #[test]
    fn spread_matches_prediction() {
        let (s, model) = equator(20);
        let d = Domain::new(-1.5, 1.5).unwrap();
        let r = moments_monte_carlo(&model, &s.jz(), 0.3, 2000, 400, 17, d).unwrap();
        let ratio = r.variance / r.prediction.unwrap();
        assert!((ratio - 1.0).abs() < 0.2, "{ratio}");
    }
}
