//! Classical Fisher information of a probability model.

use serde::{Deserialize, Serialize};

use super::model::ProbabilityModel;

/// Outcomes with `P ≤ P_FLOOR` are not divided by.
pub const P_FLOOR: f64 = 1e-12;
/// Derivatives below this magnitude count as vanishing.
pub const D_FLOOR: f64 = 1e-9;

/// How one outcome entered the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContributionKind {
    /// `(∂P)²/P` evaluated directly.
    Regular,
    /// `P` vanishes at `θ`; the ratio is replaced by its limit `2 ∂²P`.
    Limit,
    /// `P`, `∂P` and `∂²P` all vanish: no information.
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMethod {
    /// Exact derivative from `∂ρ = −i[H, ρ]`.
    AnalyticCommutator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeContribution {
    pub outcome: usize,
    pub probability: f64,
    pub derivative: f64,
    pub value: f64,
    pub kind: ContributionKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub theta: f64,
    pub fi: f64,
    pub contributions: Vec<OutcomeContribution>,
    pub method: DerivativeMethod,
}

impl FisherReport {
    /// True when at least one zero-probability outcome was handled by the
    /// limit rule, i.e. `θ` sits on a point where the naive sum is 0/0.
    pub fn limit_point(&self) -> bool {
        self.contributions.iter().any(|c| c.kind == ContributionKind::Limit)
    }
}

/// `F(θ) = Σ_ε (∂_θP(ε|θ))² / P(ε|θ)`.
///
/// An outcome whose probability is at or below [`P_FLOOR`] sits at a zero
/// of a non-negative smooth function, so `P ≈ ½P''δ²` and the ratio tends to
/// `2P''`. That limit is used when `P'' > D_FLOOR`; otherwise the outcome
/// carries no information and is excluded.
pub fn fisher_information(model: &ProbabilityModel, theta: f64) -> FisherReport {
    let p = model.probabilities(theta);
    let dp = model.probability_derivative(theta);
    let mut second: Option<Vec<f64>> = None;
    let contributions: Vec<OutcomeContribution> = p
        .iter()
        .zip(&dp)
        .enumerate()
        .map(|(outcome, (&prob, &d))| {
            let (value, kind) = if prob > P_FLOOR {
                (d * d / prob, ContributionKind::Regular)
            } else {
                let d2 = second.get_or_insert_with(|| model.probability_second_derivative(theta))[outcome];
                if d2 > D_FLOOR {
                    (2.0 * d2, ContributionKind::Limit)
                } else {
                    (0.0, ContributionKind::Excluded)
                }
            };
            OutcomeContribution {
                outcome,
                probability: prob,
                derivative: d,
                value,
                kind,
            }
        })
        .collect();
    let fi = contributions.iter().map(|c| c.value).sum();
    FisherReport {
        theta,
        fi,
        contributions,
        method: DerivativeMethod::AnalyticCommutator,
    }
}

/// Residual of the efficiency condition `∂L/∂θ = λ_θ (Θ(ε) − ⟨Θ⟩_θ)` for a
/// single-shot estimator taking value `estimator[ε]` on outcome `ε`, with
/// `λ_θ = F(θ) / ∂⟨Θ⟩/∂θ`. Returns the largest violation over outcomes with
/// non-vanishing probability; zero means the estimator saturates the
/// Cramér-Rao bound at `θ`. Diagnostic only.
pub fn crlb_saturation_residual(model: &ProbabilityModel, theta: f64, estimator: &[f64]) -> f64 {
    let p = model.probabilities(theta);
    let dp = model.probability_derivative(theta);
    let mean: f64 = p.iter().zip(estimator).map(|(a, b)| a * b).sum();
    let dmean: f64 = dp.iter().zip(estimator).map(|(a, b)| a * b).sum();
    let fi = fisher_information(model, theta).fi;
    if dmean.abs() < D_FLOOR {
        return f64::INFINITY;
    }
    let lambda = fi / dmean;
    p.iter()
        .zip(&dp)
        .zip(estimator)
        .filter(|((&prob, _), _)| prob > P_FLOOR)
        .map(|((&prob, &d), &est)| (d / prob - lambda * (est - mean)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrology::Povm;
    use crate::probes;
    use crate::spinspace::{SpinAxis, SpinSpace};

    #[test]
    fn polarized_state_gives_shot_noise() {
        let s = SpinSpace::new(6).unwrap();
        let m = ProbabilityModel::new(probes::fock(s, 3.0).unwrap(), SpinAxis::Y, Povm::number_counting(s)).unwrap();
        for t in [0.05, 0.4, 1.3, 2.7] {
            let r = fisher_information(&m, t);
            assert!((r.fi - 6.0).abs() < 1e-9, "θ={t}: {}", r.fi);
            let sum: f64 = r.contributions.iter().map(|c| c.value).sum();
            assert!((sum - r.fi).abs() < 1e-10);
        }
    }

    #[test]
    fn limit_rule_at_theta_zero() {
        let s = SpinSpace::new(6).unwrap();
        let m = ProbabilityModel::new(probes::fock(s, 3.0).unwrap(), SpinAxis::Y, Povm::number_counting(s)).unwrap();
        let r = fisher_information(&m, 0.0);
        assert!(r.limit_point());
        assert!((r.fi - 6.0).abs() < 1e-9);
    }

    #[test]
    fn twin_fock_limit_at_zero() {
        let s = SpinSpace::new(10).unwrap();
        let m = ProbabilityModel::new(probes::twin_fock(s).unwrap(), SpinAxis::Y, Povm::number_counting(s)).unwrap();
        let r = fisher_information(&m, 0.0);
        assert!(r.limit_point());
        assert!((r.fi - 60.0).abs() < 1e-8, "{}", r.fi);
    }

    #[test]
    fn noon_projection_is_heisenberg() {
        let s = SpinSpace::new(10).unwrap();
        let probe = probes::noon(s);
        let m = ProbabilityModel::new(probe.clone(), SpinAxis::Z, Povm::probe_projection(&probe)).unwrap();
        for t in [1e-3, 0.05, 0.2] {
            assert!((fisher_information(&m, t).fi - 100.0).abs() < 1e-6);
        }
    }

    #[test]
    fn locally_unbiased_estimator_has_zero_residual() {
        let s = SpinSpace::new(2).unwrap();
        let m = ProbabilityModel::new(probes::fock(s, 1.0).unwrap(), SpinAxis::Y, Povm::number_counting(s)).unwrap();
        let t = 0.7;
        let (p, dp) = (m.probabilities(t), m.probability_derivative(t));
        let f = fisher_information(&m, t).fi;
        let est: Vec<f64> = p.iter().zip(&dp).map(|(p, d)| t + d / (p * f)).collect();
        assert!(crlb_saturation_residual(&m, t, &est) < 1e-12);
        assert!(crlb_saturation_residual(&m, t, &[0.0, 3.0, 1.0]) > 0.1);
    }
}
