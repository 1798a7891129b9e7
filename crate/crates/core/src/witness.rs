//! Entanglement and squeezing diagnostics built on the Fisher information.
//!
//! A state of `N` qubits whose largest entangled block has at most `k`
//! particles obeys `F ≤ h²(s k² + r²)` with `s = ⌊N/k⌋` and `r = N − s k`.
//! Exceeding the `k` bound certifies entanglement among at least `k + 1`
//! particles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::export::{csv_table, sig17};
use crate::metrology::qfi_state;
use crate::probes::QuantumState;
use crate::spinspace::SpinAxis;

/// Orthogonality tolerance for axis triples.
pub const ORTHO_TOL: f64 = 1e-10;
/// Squeezing denominators below this are treated as zero.
pub const DENOM_FLOOR: f64 = 1e-12;
/// Slack when comparing Fisher values with the `k` bounds.
pub const DEPTH_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("axes {0} and {1} are not orthogonal (|n_i·n_j| = {2:e})")]
    NotOrthogonal(usize, usize, f64),
    #[error("block size k = {k} outside 1..={n}")]
    BlockSize { k: u32, n: u32 },
    #[error("need at least one particle")]
    NoParticles,
    #[error("generator spread must be positive and finite, got {0}")]
    HRange(f64),
    #[error("Fisher information {value} is negative or not finite")]
    InvalidFisher { value: f64 },
    #[error("Fisher information {value} exceeds the largest possible value {max}")]
    Infeasible { value: f64, max: f64 },
    #[error("ξ_R² is undefined: mean spin along n₃ vanishes")]
    UndefinedSqueezing,
}

pub type Result<T, E = WitnessError> = std::result::Result<T, E>;

/// Three mutually orthogonal directions: `n1` carries the variance, `n2` is
/// the rotation axis and `n3` the mean-spin direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisTriple {
    pub n1: SpinAxis,
    pub n2: SpinAxis,
    pub n3: SpinAxis,
}

impl AxisTriple {
    pub fn new(n1: SpinAxis, n2: SpinAxis, n3: SpinAxis) -> Result<Self> {
        let axes = [n1, n2, n3];
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d = axes[i].dot(&axes[j]).abs();
                if d > ORTHO_TOL {
                    return Err(WitnessError::NotOrthogonal(i + 1, j + 1, d));
                }
            }
        }
        Ok(Self { n1, n2, n3 })
    }

    /// Completes `n1`, `n2` with `n3 = n1 × n2`.
    pub fn from_pair(n1: SpinAxis, n2: SpinAxis) -> Result<Self> {
        let d = n1.dot(&n2).abs();
        if d > ORTHO_TOL {
            return Err(WitnessError::NotOrthogonal(1, 2, d));
        }
        let n3 = n1.cross(&n2).map_err(|_| WitnessError::NotOrthogonal(1, 2, d))?;
        Self::new(n1, n2, n3)
    }

    /// Triple adapted to the mean spin of `state`: `n3` along `⟨Ĵ⟩`, `n2`
    /// perpendicular to it in the plane of `hint` (or any perpendicular
    /// direction), and `n1 = n2 × n3`. `None` when the mean spin vanishes.
    pub fn from_mean_spin(state: &QuantumState, hint: SpinAxis) -> Option<Self> {
        let mean = state.mean_spin();
        if mean.norm() < DENOM_FLOOR.sqrt() {
            return None;
        }
        let n3 = SpinAxis::from_vector(mean).ok()?;
        let mut v = hint.vector() - n3.vector() * n3.dot(&hint);
        if v.norm() < 1e-8 {
            let trial = if n3.vector().x.abs() < 0.9 {
                SpinAxis::X
            } else {
                SpinAxis::Y
            };
            v = trial.vector() - n3.vector() * n3.dot(&trial);
        }
        let n2 = SpinAxis::from_vector(v).ok()?;
        let n1 = n2.cross(&n3).ok()?;
        Self::new(n1, n2, n3).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    pub n_particles: u32,
    pub axes: AxisTriple,
    pub variance_n1: f64,
    pub mean_n2: f64,
    pub mean_n3: f64,
    /// `N (ΔĴ_n1)² / ⟨Ĵ_n3⟩²`, `None` when `⟨Ĵ_n3⟩²` is below [`DENOM_FLOOR`].
    pub xi_r_squared: Option<f64>,
    /// `N (ΔĴ_n1)² / (⟨Ĵ_n2⟩² + ⟨Ĵ_n3⟩²)`, `None` when the denominator vanishes.
    pub xi_r_prime_squared: Option<f64>,
}

pub fn squeezing(probe: &QuantumState, axes: AxisTriple) -> SqueezingReport {
    let space = probe.space();
    let n = space.n_particles();
    let variance_n1 = probe.variance(space.op_j(axes.n1).matrix());
    let mean_n2 = probe.expectation(space.op_j(axes.n2).matrix());
    let mean_n3 = probe.expectation(space.op_j(axes.n3).matrix());
    let ratio = |den: f64| (den >= DENOM_FLOOR).then(|| n as f64 * variance_n1 / den);
    SqueezingReport {
        n_particles: n,
        axes,
        variance_n1,
        mean_n2,
        mean_n3,
        xi_r_squared: ratio(mean_n3 * mean_n3),
        xi_r_prime_squared: ratio(mean_n2 * mean_n2 + mean_n3 * mean_n3),
    }
}

/// `F > N`: the state beats the shot-noise limit, which requires entanglement.
pub fn useful_entanglement(fisher_value: f64, n: u32) -> bool {
    fisher_value > n as f64
}

/// Largest Fisher information of a `k`-producible state of `n` particles.
pub fn k_bound(n: u32, k: u32, h_range: f64) -> Result<f64> {
    let row = staircase_row(n, k, h_range)?;
    Ok(row.bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaircaseRow {
    pub k: u32,
    pub s: u32,
    pub r: u32,
    pub bound: f64,
}

fn staircase_row(n: u32, k: u32, h_range: f64) -> Result<StaircaseRow> {
    if n == 0 {
        return Err(WitnessError::NoParticles);
    }
    if k == 0 || k > n {
        return Err(WitnessError::BlockSize { k, n });
    }
    if !(h_range > 0.0 && h_range.is_finite()) {
        return Err(WitnessError::HRange(h_range));
    }
    let s = n / k;
    let r = n - s * k;
    let cells = s as u64 * (k as u64).pow(2) + (r as u64).pow(2);
    Ok(StaircaseRow {
        k,
        s,
        r,
        bound: h_range * h_range * cells as f64,
    })
}

/// `k_bound` for every `k = 1..=n`.
pub fn staircase(n: u32, h_range: f64) -> Result<Vec<StaircaseRow>> {
    (1..=n.max(1)).map(|k| staircase_row(n, k, h_range)).collect()
}

/// Which information the witness was fed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FisherSource {
    /// Classical Fisher information of a concrete measurement.
    Classical,
    /// Quantum Fisher information of the state.
    Quantum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthReport {
    pub n_particles: u32,
    pub fisher_value: f64,
    pub source: FisherSource,
    pub h_range: f64,
    /// Smallest `k` whose bound is not exceeded.
    pub depth: u32,
    pub useful: bool,
    pub staircase: Vec<StaircaseRow>,
}

impl DepthReport {
    /// `k,s,r,bound` rows.
    pub fn staircase_csv(&self) -> String {
        csv_table(
            &["k", "s", "r", "bound"],
            self.staircase.iter().map(|row| {
                vec![
                    row.k.to_string(),
                    row.s.to_string(),
                    row.r.to_string(),
                    sig17(row.bound),
                ]
            }),
        )
    }
}

/// Entanglement depth certified by `fisher_value`: the smallest `d` with
/// `fisher_value ≤ k_bound(n, d)` (a value equal to a bound is compatible
/// with that bound).
pub fn entanglement_depth(fisher_value: f64, n: u32, h_range: f64, source: FisherSource) -> Result<DepthReport> {
    let rows = staircase(n, h_range)?;
    if !(fisher_value >= 0.0 && fisher_value.is_finite()) {
        return Err(WitnessError::InvalidFisher { value: fisher_value });
    }
    let max = rows.last().expect("n ≥ 1").bound;
    if fisher_value > max + DEPTH_TOL {
        return Err(WitnessError::Infeasible {
            value: fisher_value,
            max,
        });
    }
    let depth = rows
        .iter()
        .find(|row| fisher_value <= row.bound + DEPTH_TOL)
        .map_or(n, |row| row.k);
    Ok(DepthReport {
        n_particles: n,
        fisher_value,
        source,
        h_range,
        depth,
        useful: useful_entanglement(fisher_value, n),
        staircase: rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingFisherCheck {
    /// `N / F_Q[ρ, Ĵ_n2]`.
    pub lhs: f64,
    /// `ξ_R²`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `N / F_Q[ρ, Ĵ_n2]` with `ξ_R²`; the first never exceeds the
/// second, so spin squeezing implies a sub-shot-noise QFI.
pub fn squeezing_fisher_check(probe: &QuantumState, axes: AxisTriple) -> Result<SqueezingFisherCheck> {
    let report = squeezing(probe, axes);
    let rhs = report.xi_r_squared.ok_or(WitnessError::UndefinedSqueezing)?;
    let fq = qfi_state(probe, axes.n2);
    let lhs = report.n_particles as f64 / fq;
    Ok(SqueezingFisherCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + DEPTH_TOL,
    })
}
