//! Quantum Fisher information and the symmetric logarithmic derivative.

use crate::numerics::{self, c64, CMatrix, HermitianOperator, SpectralDecomposition};
use crate::probes::{self, MixedState, PureState, QuantumState};
use crate::spinspace::SpinAxis;

use super::fisher::P_FLOOR;
use super::{MetrologyError, Result};

/// Smallest singular value of the overlap between a degenerate eigenspace
/// at `θ` and its counterpart at `θ ± step` before the family is declared
/// non-smooth.
pub const FAMILY_OVERLAP_MIN: f64 = 0.9;

const PURE_TOL: f64 = 1e-12;
const BLOCK_GAP: f64 = 1e-8;

/// `F_Q[|ψ⟩, Ĵ_n] = 4(ΔĴ_n)²`.
pub fn qfi_pure(probe: &PureState, axis: SpinAxis) -> f64 {
    let op = probe.space().op_j(axis);
    4.0 * QuantumState::from(probe.clone()).variance(op.matrix())
}

/// `F_Q[ρ, Ĵ_n] = 2 Σ (p_k − p_k′)²/(p_k + p_k′) |⟨k|Ĵ_n|k′⟩|²` over pairs with
/// `p_k + p_k′ > P_FLOOR`. Rank-one inputs take the pure-state route.
pub fn qfi_mixed(probe: &MixedState, axis: SpinAxis) -> f64 {
    if probe.is_pure() {
        return qfi_pure(&probe.principal_vector(), axis);
    }
    let h = probe.space().op_j(axis);
    spectral_qfi(probe.spectrum(), h.matrix())
}

pub fn qfi_state(probe: &QuantumState, axis: SpinAxis) -> f64 {
    match probe {
        QuantumState::Pure(p) => qfi_pure(p, axis),
        QuantumState::Mixed(m) => qfi_mixed(m, axis),
    }
}

/// QFI of `ρ` for an arbitrary generator `h` of any dimension, e.g. a
/// tensor-product space outside the symmetric subspace.
pub fn qfi_density(rho: &CMatrix, h: &HermitianOperator) -> Result<f64> {
    if rho.nrows() != h.dim() {
        return Err(MetrologyError::Dimension {
            expected: rho.nrows(),
            found: h.dim(),
        });
    }
    let (_, spectrum) = probes::validate_density(rho.clone())?;
    if spectrum.eigenvalues.last().is_some_and(|&p| p > 1.0 - PURE_TOL) {
        let psi = spectrum.column(spectrum.dim() - 1);
        let mean = numerics::expectation(&psi, h.matrix()).re;
        let sq = numerics::expectation(&psi, &(h.matrix() * h.matrix())).re;
        return Ok(4.0 * (sq - mean * mean).max(0.0));
    }
    Ok(spectral_qfi(&spectrum, h.matrix()))
}

fn spectral_qfi(spectrum: &SpectralDecomposition, h: &CMatrix) -> f64 {
    let p = &spectrum.eigenvalues;
    let hk = spectrum.to_eigenbasis(h);
    let mut total = 0.0;
    for k in 0..p.len() {
        for l in (k + 1)..p.len() {
            let s = p[k] + p[l];
            if s > P_FLOOR {
                let d = p[k] - p[l];
                total += 4.0 * d * d / s * hk[(k, l)].norm_sqr();
            }
        }
    }
    total
}

/// Symmetric logarithmic derivative of the family `e^{-iθĴ_n} ρ e^{iθĴ_n}`
/// at `θ = 0`.
pub fn sld(probe: &MixedState, axis: SpinAxis) -> HermitianOperator {
    let h = probe.space().op_j(axis);
    sld_matrix(probe.spectrum(), h.matrix())
}

pub fn sld_density(rho: &CMatrix, h: &HermitianOperator) -> Result<HermitianOperator> {
    let (_, spectrum) = probes::validate_density(rho.clone())?;
    Ok(sld_matrix(&spectrum, h.matrix()))
}

/// Eigenbasis elements `L_kk′ = 2i (p_k − p_k′)/(p_k + p_k′) H_kk′`, zero on
/// the kernel block.
fn sld_matrix(spectrum: &SpectralDecomposition, h: &CMatrix) -> HermitianOperator {
    let p = &spectrum.eigenvalues;
    let hk = spectrum.to_eigenbasis(h);
    let dim = p.len();
    let mut l = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        for m in 0..dim {
            let s = p[k] + p[m];
            if s > P_FLOOR {
                l[(k, m)] = c64(0.0, 2.0 * (p[k] - p[m]) / s) * hk[(k, m)];
            }
        }
    }
    let v = &spectrum.eigenvectors;
    let full = v * l * v.adjoint();
    HermitianOperator::with_tolerance(full, 1e-9).expect("SLD is Hermitian by construction")
}

/// Largest entry of `{ρ, L} − 2i[ρ, H]` restricted to eigenbasis pairs with
/// `p_k + p_k′ > P_FLOOR`.
pub fn sld_residual(rho: &CMatrix, l: &CMatrix, h: &CMatrix) -> Result<f64> {
    let (_, spectrum) = probes::validate_density(rho.clone())?;
    let r = numerics::anticommutator(rho, l) - numerics::commutator(rho, h) * c64(0.0, 2.0);
    let rk = spectrum.to_eigenbasis(&r);
    let p = &spectrum.eigenvalues;
    let mut worst = 0.0_f64;
    for k in 0..p.len() {
        for m in 0..p.len() {
            if p[k] + p[m] > P_FLOOR {
                worst = worst.max(rk[(k, m)].norm());
            }
        }
    }
    Ok(worst)
}

/// QFI of a general one-parameter family
///
/// `F_Q = Σ_k (∂p_k)²/p_k + 2 Σ_{kk′} (p_k − p_k′)²/(p_k + p_k′) |⟨∂k|k′⟩|²`
///
/// with `∂` taken by the five-point central difference on `θ ± step`,
/// `θ ± 2 step`. Eigenvectors at the displaced points are aligned with those at `θ` block by block (the
/// unitary closest to the overlap matrix), which removes the gauge freedom
/// inside degenerate eigenspaces. An eigenspace that does not map onto
/// itself across the step signals a level crossing and yields
/// [`MetrologyError::NonSmoothSpectrum`].
pub fn qfi_family<F>(family: F, theta: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> crate::probes::Result<MixedState>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(MetrologyError::Step(step));
    }
    let centre = family(theta)?;
    let s0 = centre.spectrum();
    let blocks = spectral_blocks(&s0.eigenvalues);
    let offsets = [-2.0, -1.0, 1.0, 2.0];
    let displaced = offsets
        .iter()
        .map(|&k| family(theta + k * step))
        .collect::<crate::probes::Result<Vec<_>>>()?;
    // A level crossing inside the stencil swaps eigenvectors between the
    // outer points even when each of them matches the centre block.
    let (first, last) = (displaced[0].spectrum(), displaced[3].spectrum());
    aligned(first, last, &spectral_blocks(&first.eigenvalues), theta)?;
    let vectors = displaced
        .iter()
        .map(|m| aligned(s0, m.spectrum(), &blocks, theta))
        .collect::<Result<Vec<_>>>()?;
    let dv = ((&vectors[2] - &vectors[1]) * c64(8.0, 0.0) - (&vectors[3] - &vectors[0])) / c64(12.0 * step, 0.0);
    let eig = |i: usize, k: usize| displaced[i].spectrum().eigenvalues[k];

    let p = &s0.eigenvalues;
    let mut total = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        if pk > P_FLOOR {
            let dp = (8.0 * (eig(2, k) - eig(1, k)) - (eig(3, k) - eig(0, k))) / (12.0 * step);
            total += dp * dp / pk;
        }
    }
    let overlaps = dv.adjoint() * &s0.eigenvectors;
    for k in 0..p.len() {
        for m in 0..p.len() {
            let s = p[k] + p[m];
            if s > P_FLOOR {
                let d = p[k] - p[m];
                total += 2.0 * d * d / s * overlaps[(k, m)].norm_sqr();
            }
        }
    }
    Ok(total)
}

fn spectral_blocks(p: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=p.len() {
        if k == p.len() || p[k] - p[k - 1] > BLOCK_GAP {
            blocks.push(start..k);
            start = k;
        }
    }
    blocks
}

/// Eigenvectors of `other`, rotated within each block of `reference` to
/// best match the reference eigenvectors.
fn aligned(
    reference: &SpectralDecomposition,
    other: &SpectralDecomposition,
    blocks: &[std::ops::Range<usize>],
    theta: f64,
) -> Result<CMatrix> {
    let dim = reference.dim();
    if other.dim() != dim {
        return Err(MetrologyError::Dimension {
            expected: dim,
            found: other.dim(),
        });
    }
    let mut out = CMatrix::zeros(dim, dim);
    for block in blocks {
        let width = block.len();
        let v0 = reference.eigenvectors.columns(block.start, width);
        let v1 = other.eigenvectors.columns(block.start, width);
        let m: CMatrix = v1.adjoint() * v0;
        let svd = m.svd(true, true);
        let overlap = svd.singular_values.min();
        if overlap < FAMILY_OVERLAP_MIN {
            return Err(MetrologyError::NonSmoothSpectrum { theta, overlap });
        }
        let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
        let w: CMatrix = u * vt;
        let rotated: CMatrix = v1 * w;
        out.columns_mut(block.start, width).copy_from(&rotated);
    }
    Ok(out)
}
