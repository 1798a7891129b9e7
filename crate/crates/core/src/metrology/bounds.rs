//! Phase-sensitivity bounds.

use crate::numerics::{self, HermitianOperator};

use super::model::ProbabilityModel;
use super::{MetrologyError, Result};

const VARIANCE_FLOOR: f64 = 1e-12;

/// Shot-noise limit `1/(√(N m) h_range)` for `N` particles, `m` repetitions
/// and single-particle generator spread `h_range = h_max − h_min`.
pub fn bound_shot_noise(n: u32, m: u64, h_range: f64) -> f64 {
    1.0 / ((n as f64 * m as f64).sqrt() * h_range)
}

/// Heisenberg limit `1/(N √m h_range)`.
pub fn bound_heisenberg(n: u32, m: u64, h_range: f64) -> f64 {
    1.0 / (n as f64 * (m as f64).sqrt() * h_range)
}

/// `Δθ_QCR = 1/√(m F_Q)`.
pub fn quantum_cramer_rao(m: u64, fq: f64) -> f64 {
    1.0 / (m as f64 * fq).sqrt()
}

/// `|⟨[M̂, Ĥ]⟩|² / (ΔM̂)²` evaluated on `ρ(θ)`.
///
/// The observable must be a function of the measurement outcomes, i.e.
/// diagonal in the POVM of `model`; then the value never exceeds the
/// classical Fisher information of that measurement.
pub fn fisher_lower_bound_moment(model: &ProbabilityModel, theta: f64, observable: &HermitianOperator) -> Result<f64> {
    model.povm().outcome_values(observable)?;
    let rho = model.state_at(theta);
    let m = observable.matrix();
    let mean = numerics::trace_product(&rho, m).re;
    let var = numerics::trace_product(&rho, &(m * m)).re - mean * mean;
    if var <= VARIANCE_FLOOR {
        return Err(MetrologyError::ZeroVariance);
    }
    let comm = numerics::commutator(m, model.generator().matrix());
    Ok(numerics::trace_product(&rho, &comm).norm_sqr() / var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrology::{fisher_information, Povm};
    use crate::probes;
    use crate::spinspace::{SpinAxis, SpinSpace};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn shot_noise_and_heisenberg_arithmetic() {
        assert!((bound_shot_noise(100, 1, 1.0) - 0.1).abs() < 1e-15);
        assert!((bound_heisenberg(100, 1, 1.0) - 0.01).abs() < 1e-15);
        assert!((bound_shot_noise(7, 4, 1.0) - bound_shot_noise(7, 1, 1.0) / 2.0).abs() < 1e-15);
        assert_eq!(bound_shot_noise(1, 9, 1.0), bound_heisenberg(1, 9, 1.0));
        assert!((quantum_cramer_rao(4, 25.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn moment_bound_is_tight_for_equator_state() {
        let s = SpinSpace::new(12).unwrap();
        let probe = probes::coherent_spin(s, FRAC_PI_2, 0.0);
        let model = ProbabilityModel::new(probe, SpinAxis::Y, Povm::number_counting(s)).unwrap();
        let b = fisher_lower_bound_moment(&model, 0.0, &s.jz()).unwrap();
        assert!((b - 12.0).abs() < 1e-9);
        assert!(b <= fisher_information(&model, 0.0).fi + 1e-9);
    }

    #[test]
    fn commuting_observable_gives_zero() {
        let s = SpinSpace::new(4).unwrap();
        let probe = probes::coherent_spin(s, 1.0, 0.3);
        let model = ProbabilityModel::new(probe, SpinAxis::Z, Povm::number_counting(s)).unwrap();
        assert!(fisher_lower_bound_moment(&model, 0.4, &s.jz()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_variance_is_an_error() {
        let s = SpinSpace::new(4).unwrap();
        let probe = probes::fock(s, 2.0).unwrap();
        let model = ProbabilityModel::new(probe, SpinAxis::Z, Povm::number_counting(s)).unwrap();
        assert_eq!(
            fisher_lower_bound_moment(&model, 0.3, &s.jz()),
            Err(MetrologyError::ZeroVariance)
        );
    }

    #[test]
    fn off_diagonal_observable_is_rejected() {
        let s = SpinSpace::new(2).unwrap();
        let model = ProbabilityModel::new(probes::noon(s), SpinAxis::Z, Povm::number_counting(s)).unwrap();
        let r = fisher_lower_bound_moment(&model, 0.1, &s.jx());
        assert!(matches!(r, Err(MetrologyError::NotDiagonalInPovm { .. })));
    }
}
