//! The map `θ → P(ε|θ) = Tr[E(ε) e^{-iθH} ρ e^{iθH}]`.
//!
//! In the eigenbasis of the generator `H = Σ λ_a |a⟩⟨a|` the probability of
//! each outcome is a finite Fourier series
//!
//! ```text
//! P(ε|θ) = Σ_{ab} E'_{ba} ρ'_{ab} e^{-iθ(λ_a − λ_b)},
//! ```
//!
//! where primes denote matrices rotated into that eigenbasis. Multiplying a
//! term by `−i(λ_a − λ_b)` is the matrix element of `−i[H, ρ(θ)]`, so
//! derivatives of every order are exact. Terms sharing a frequency are merged
//! when the model is built; for collective spin generators, whose spectrum
//! is linear, at most `2N + 1` frequencies survive.

use num_complex::Complex64;

use crate::numerics::{CMatrix, HermitianOperator, SpectralDecomposition, UnitaryOperator};
use crate::probes::QuantumState;
use crate::spinspace::SpinAxis;

use super::povm::Povm;
use super::{MetrologyError, Result};

/// Probabilities in `[-PROB_CLAMP, 0)` are round-off and clamped to zero.
pub const PROB_CLAMP: f64 = 1e-12;

const FREQ_MERGE_TOL: f64 = 1e-9;
const COEFF_DROP: f64 = 1e-300;

/// Fourier coefficients of one outcome probability.
#[derive(Debug, Clone)]
struct OutcomeSeries {
    terms: Vec<(f64, Complex64)>,
}

impl OutcomeSeries {
    /// `Σ Re[c (−iω)^order e^{−iωθ}]`.
    fn eval(&self, theta: f64, order: u32) -> f64 {
        self.terms
            .iter()
            .map(|&(omega, c)| {
                let phase = Complex64::from_polar(1.0, -omega * theta);
                let factor = Complex64::new(0.0, -omega).powu(order);
                (c * factor * phase).re
            })
            .sum()
    }
}

/// Probe, generator and measurement of a phase-estimation experiment.
#[derive(Debug, Clone)]
pub struct ProbabilityModel {
    probe: QuantumState,
    generator: HermitianOperator,
    axis: Option<SpinAxis>,
    povm: Povm,
    spectrum: SpectralDecomposition,
    series: Vec<OutcomeSeries>,
}

impl ProbabilityModel {
    /// Collective rotation `e^{-iθĴ_n}` of `probe`, read out by `povm`.
    pub fn new(probe: impl Into<QuantumState>, axis: SpinAxis, povm: Povm) -> Result<Self> {
        let probe = probe.into();
        let generator = probe.space().op_j(axis);
        let mut model = Self::with_generator(probe, generator, povm)?;
        model.axis = Some(axis);
        Ok(model)
    }

    /// Arbitrary Hermitian generator of the same dimension as the probe.
    pub fn with_generator(probe: impl Into<QuantumState>, generator: HermitianOperator, povm: Povm) -> Result<Self> {
        let probe = probe.into();
        let dim = probe.space().dim();
        for found in [generator.dim(), povm.dim()] {
            if found != dim {
                return Err(MetrologyError::Dimension { expected: dim, found });
            }
        }
        let spectrum = generator.eig()?;
        let rho = spectrum.to_eigenbasis(&probe.density_matrix());
        let series = povm
            .elements()
            .iter()
            .map(|e| build_series(&spectrum.eigenvalues, &rho, &spectrum.to_eigenbasis(e.operator())))
            .collect();
        Ok(Self {
            probe,
            generator,
            axis: None,
            povm,
            spectrum,
            series,
        })
    }

    pub fn probe(&self) -> &QuantumState {
        &self.probe
    }

    pub fn generator(&self) -> &HermitianOperator {
        &self.generator
    }

    pub fn axis(&self) -> Option<SpinAxis> {
        self.axis
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn n_outcomes(&self) -> usize {
        self.povm.len()
    }

    pub fn generator_spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// `e^{-iθH}`.
    pub fn unitary(&self, theta: f64) -> UnitaryOperator {
        self.spectrum.exp_i(theta)
    }

    /// `ρ(θ) = e^{-iθH} ρ e^{iθH}`.
    pub fn state_at(&self, theta: f64) -> CMatrix {
        self.unitary(theta).conjugate(&self.probe.density_matrix())
    }

    /// Outcome probabilities at `θ`, clamped at zero and renormalised.
    pub fn probabilities(&self, theta: f64) -> Vec<f64> {
        let mut p: Vec<f64> = self
            .series
            .iter()
            .map(|s| {
                let v = s.eval(theta, 0);
                if (-PROB_CLAMP..0.0).contains(&v) {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        let total: f64 = p.iter().sum();
        for v in p.iter_mut() {
            *v /= total;
        }
        p
    }

    /// `∂P(ε|θ)/∂θ = Tr[E(ε) (−i[H, ρ(θ)])]`.
    pub fn probability_derivative(&self, theta: f64) -> Vec<f64> {
        self.series.iter().map(|s| s.eval(theta, 1)).collect()
    }

    /// `∂²P(ε|θ)/∂θ² = Tr[E(ε) (−[H, [H, ρ(θ)]])]`.
    pub fn probability_second_derivative(&self, theta: f64) -> Vec<f64> {
        self.series.iter().map(|s| s.eval(theta, 2)).collect()
    }

    /// `Tr[M ρ(θ)]`.
    pub fn expectation_at(&self, theta: f64, observable: &CMatrix) -> f64 {
        crate::numerics::trace_product(&self.state_at(theta), observable).re
    }
}

fn build_series(eigenvalues: &[f64], rho: &CMatrix, element: &CMatrix) -> OutcomeSeries {
    let dim = eigenvalues.len();
    let mut raw: Vec<(f64, Complex64)> = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            let c = element[(b, a)] * rho[(a, b)];
            if c.norm() > COEFF_DROP {
                raw.push((eigenvalues[a] - eigenvalues[b], c));
            }
        }
    }
    raw.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut terms: Vec<(f64, Complex64)> = Vec::new();
    for (omega, c) in raw {
        match terms.last_mut() {
            Some((w, acc)) if (omega - *w).abs() <= FREQ_MERGE_TOL * w.abs().max(1.0) => *acc += c,
            _ => terms.push((omega, c)),
        }
    }
    OutcomeSeries { terms }
}
