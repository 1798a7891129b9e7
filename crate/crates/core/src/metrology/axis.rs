//! Choice of the rotation axis that maximises the quantum Fisher information.

use nalgebra::Matrix3;

use crate::numerics::{self, CMatrix};
use crate::probes::QuantumState;
use crate::spinspace::SpinAxis;

use super::fisher::P_FLOOR;
use super::Result;

/// Real symmetric matrix `M` with `F_Q[ρ, n·Ĵ] = 4 nᵀ M n`.
///
/// For pure states this is the covariance matrix
/// `½⟨{Ĵ_i, Ĵ_j}⟩ − ⟨Ĵ_i⟩⟨Ĵ_j⟩`; for mixed states it is
/// `½ Σ (p_k − p_k′)²/(p_k + p_k′) Re[⟨k|Ĵ_i|k′⟩⟨k′|Ĵ_j|k⟩]`.
pub fn sensitivity_matrix(state: &QuantumState) -> Matrix3<f64> {
    let space = state.space();
    let ops = [space.jx(), space.jy(), space.jz()];
    let mut m = Matrix3::zeros();
    match state.as_pure() {
        Some(psi) => {
            let means: Vec<f64> = ops.iter().map(|o| psi.expectation(o.matrix())).collect();
            for i in 0..3 {
                for j in i..3 {
                    let anti = numerics::anticommutator(ops[i].matrix(), ops[j].matrix());
                    let v = 0.5 * psi.expectation(&anti) - means[i] * means[j];
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
        }
        None => {
            let mixed = state.to_mixed();
            let spectrum = mixed.spectrum();
            let p = &spectrum.eigenvalues;
            let rotated: Vec<CMatrix> = ops.iter().map(|o| spectrum.to_eigenbasis(o.matrix())).collect();
            for i in 0..3 {
                for j in i..3 {
                    let mut v = 0.0;
                    for k in 0..p.len() {
                        for l in 0..p.len() {
                            let s = p[k] + p[l];
                            if s > P_FLOOR {
                                let w = (p[k] - p[l]).powi(2) / s;
                                v += 0.5 * w * (rotated[i][(k, l)] * rotated[j][(l, k)]).re;
                            }
                        }
                    }
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
        }
    }
    m
}

/// Axis of largest QFI and the value there, `4λ_max`.
pub fn optimal_axis(state: &QuantumState) -> Result<(SpinAxis, f64)> {
    let (lambda, v) = numerics::max_eig_sym3(&sensitivity_matrix(state))?;
    let axis = SpinAxis::from_vector(v).unwrap_or(SpinAxis::Z);
    Ok((axis, 4.0 * lambda.max(0.0)))
}
