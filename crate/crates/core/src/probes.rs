//! Probe states on a [`SpinSpace`].
//!
//! Pure states carry an amplitude vector in ascending-`μ` order; mixed
//! states carry a density matrix together with its cached spectrum. All
//! factory outputs fix the global phase so that the first non-negligible
//! amplitude is real and positive.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{self, c64, CMatrix, CVector, HermitianOperator, NumericsError, SpectralDecomposition};
use crate::spinspace::{HalfInt, SpinAxis, SpinError, SpinSpace};

/// Normalisation and trace tolerance for states.
pub const STATE_TOL: f64 = 1e-12;
/// Largest eigenvalue above `1 - PURITY_TOL` marks a density matrix as pure.
pub const PURITY_TOL: f64 = 1e-12;

const PHASE_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("amplitude vector has length {found}, space dimension is {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("state is not normalised: norm² = {0}")]
    NotNormalized(f64),
    #[error("density matrix trace is {0}, expected 1")]
    Trace(f64),
    #[error("density matrix has negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),
    #[error("twin-Fock state needs an even particle number, got {0}")]
    OddTwinFock(u32),
    #[error("mixture weights must be positive and sum to one (sum = {0})")]
    Weights(f64),
    #[error("cannot mix states from different spaces")]
    SpaceMismatch,
    #[error("empty mixture")]
    EmptyMixture,
    #[error("malformed state record: {0}")]
    Record(String),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = StateError> = std::result::Result<T, E>;

/// Multiply by a global phase so the first amplitude above the floor is
/// real and positive.
fn canonical_phase(mut v: CVector) -> CVector {
    if let Some(first) = v.iter().find(|z| z.norm() > PHASE_FLOOR).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
    v
}

/// Normalised vector in the symmetric subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: SpinSpace,
    amplitudes: CVector,
}

impl PureState {
    /// Requires `Σ|c_μ|² = 1` within [`STATE_TOL`].
    pub fn new(space: SpinSpace, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(StateError::Dimension {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        let norm2 = amplitudes.norm_squared();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > STATE_TOL {
            return Err(StateError::NotNormalized(norm2));
        }
        Ok(Self { space, amplitudes })
    }

    /// Rescales any non-zero vector to unit norm.
    pub fn normalized(space: SpinSpace, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(StateError::NotNormalized(norm * norm));
        }
        Self::new(space, amplitudes / c64(norm, 0.0))
    }

    pub fn space(&self) -> SpinSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// Amplitude on the Dicke label `μ`.
    pub fn amplitude(&self, mu: HalfInt) -> Option<Complex64> {
        self.space.index_of(mu).map(|i| self.amplitudes[i])
    }

    pub fn density_matrix(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn expectation(&self, op: &CMatrix) -> f64 {
        numerics::expectation(&self.amplitudes, op).re
    }

    /// `(⟨Ĵ_x⟩, ⟨Ĵ_y⟩, ⟨Ĵ_z⟩)`.
    pub fn mean_spin(&self) -> nalgebra::Vector3<f64> {
        let s = self.space;
        nalgebra::Vector3::new(
            self.expectation(s.jx().matrix()),
            self.expectation(s.jy().matrix()),
            self.expectation(s.jz().matrix()),
        )
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap2(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }

    /// `U|ψ⟩`.
    pub fn evolve(&self, u: &numerics::UnitaryOperator) -> PureState {
        PureState {
            space: self.space,
            amplitudes: u.apply(&self.amplitudes),
        }
    }

    pub fn to_mixed(&self) -> MixedState {
        MixedState::new(self.space, self.density_matrix())
            .expect("projector of a normalised vector is a valid density matrix")
    }
}

/// Density matrix with its cached spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    space: SpinSpace,
    rho: CMatrix,
    spectrum: SpectralDecomposition,
}

impl MixedState {
    /// Validates Hermiticity, unit trace and positivity. Eigenvalues in
    /// `[-1e-12, 0)` are clamped to zero and the spectrum renormalised.
    pub fn new(space: SpinSpace, rho: CMatrix) -> Result<Self> {
        if rho.nrows() != space.dim() || rho.ncols() != space.dim() {
            return Err(StateError::Dimension {
                expected: space.dim(),
                found: rho.nrows(),
            });
        }
        let (rho, spectrum) = validate_density(rho)?;
        Ok(Self { space, rho, spectrum })
    }

    pub fn space(&self) -> SpinSpace {
        self.space
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.spectrum.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn is_pure(&self) -> bool {
        self.max_eigenvalue() > 1.0 - PURITY_TOL
    }

    /// Dominant eigenvector, the state itself when [`Self::is_pure`].
    pub fn principal_vector(&self) -> PureState {
        let k = self.spectrum.dim() - 1;
        let v = canonical_phase(self.spectrum.column(k));
        PureState::normalized(self.space, v).expect("eigenvectors are unit vectors")
    }

    pub fn rank(&self, floor: f64) -> usize {
        self.spectrum.eigenvalues.iter().filter(|&&p| p > floor).count()
    }

    pub fn purity(&self) -> f64 {
        self.spectrum.eigenvalues.iter().map(|p| p * p).sum()
    }

    pub fn expectation(&self, op: &CMatrix) -> f64 {
        numerics::trace_product(&self.rho, op).re
    }

    pub fn mean_spin(&self) -> nalgebra::Vector3<f64> {
        let s = self.space;
        nalgebra::Vector3::new(
            self.expectation(s.jx().matrix()),
            self.expectation(s.jy().matrix()),
            self.expectation(s.jz().matrix()),
        )
    }

    pub fn evolve(&self, u: &numerics::UnitaryOperator) -> Result<MixedState> {
        MixedState::new(self.space, u.conjugate(&self.rho))
    }
}

/// Shared validation of density matrices, used also by routines that work
/// outside the symmetric subspace.
pub fn validate_density(rho: CMatrix) -> Result<(CMatrix, SpectralDecomposition)> {
    let h = HermitianOperator::new(rho)?;
    let trace: f64 = h.matrix().diagonal().iter().map(|z| z.re).sum();
    if (trace - 1.0).abs() > STATE_TOL {
        return Err(StateError::Trace(trace));
    }
    let mut spectrum = h.eig()?;
    let min = spectrum.eigenvalues[0];
    if min < -STATE_TOL {
        return Err(StateError::NegativeEigenvalue(min));
    }
    if min < 0.0 {
        for p in spectrum.eigenvalues.iter_mut() {
            *p = p.max(0.0);
        }
        let total: f64 = spectrum.eigenvalues.iter().sum();
        for p in spectrum.eigenvalues.iter_mut() {
            *p /= total;
        }
        let rebuilt = spectrum.reconstruct();
        return Ok((rebuilt, spectrum));
    }
    Ok((h.into_matrix(), spectrum))
}

/// A probe that is either a state vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(MixedState),
}

impl QuantumState {
    pub fn space(&self) -> SpinSpace {
        match self {
            QuantumState::Pure(p) => p.space(),
            QuantumState::Mixed(m) => m.space(),
        }
    }

    pub fn density_matrix(&self) -> CMatrix {
        match self {
            QuantumState::Pure(p) => p.density_matrix(),
            QuantumState::Mixed(m) => m.rho().clone(),
        }
    }

    pub fn to_mixed(&self) -> MixedState {
        match self {
            QuantumState::Pure(p) => p.to_mixed(),
            QuantumState::Mixed(m) => m.clone(),
        }
    }

    /// The state vector if the probe is pure, including density matrices
    /// whose largest eigenvalue exceeds `1 - 1e-12`.
    pub fn as_pure(&self) -> Option<PureState> {
        match self {
            QuantumState::Pure(p) => Some(p.clone()),
            QuantumState::Mixed(m) if m.is_pure() => Some(m.principal_vector()),
            QuantumState::Mixed(_) => None,
        }
    }

    pub fn expectation(&self, op: &CMatrix) -> f64 {
        match self {
            QuantumState::Pure(p) => p.expectation(op),
            QuantumState::Mixed(m) => m.expectation(op),
        }
    }

    pub fn mean_spin(&self) -> nalgebra::Vector3<f64> {
        match self {
            QuantumState::Pure(p) => p.mean_spin(),
            QuantumState::Mixed(m) => m.mean_spin(),
        }
    }

    /// `⟨Ĵ_n²⟩ - ⟨Ĵ_n⟩²`.
    pub fn variance(&self, op: &CMatrix) -> f64 {
        let mean = self.expectation(op);
        let sq = self.expectation(&(op * op));
        (sq - mean * mean).max(0.0)
    }
}

impl From<PureState> for QuantumState {
    fn from(p: PureState) -> Self {
        QuantumState::Pure(p)
    }
}

impl From<MixedState> for QuantumState {
    fn from(m: MixedState) -> Self {
        QuantumState::Mixed(m)
    }
}

/// Two-mode Fock state `|j+μ⟩_a |j−μ⟩_b`.
pub fn fock(space: SpinSpace, mu: f64) -> Result<PureState> {
    let j = space.j().value();
    let label = HalfInt::from_f64(mu).ok_or(SpinError::LabelOutOfRange { j, mu })?;
    let idx = space.index_of(label).ok_or(SpinError::LabelOutOfRange { j, mu })?;
    let mut v = CVector::zeros(space.dim());
    v[idx] = c64(1.0, 0.0);
    PureState::new(space, v)
}

/// Twin-Fock state `|N/2⟩_a |N/2⟩_b`.
pub fn twin_fock(space: SpinSpace) -> Result<PureState> {
    if !space.n_particles().is_multiple_of(2) {
        return Err(StateError::OddTwinFock(space.n_particles()));
    }
    fock(space, 0.0)
}

/// Coherent spin state: all particles polarised along the direction with
/// the given polar angle (from `z`) and azimuth (from `x`), obtained by
/// rotating `|j, +j⟩` with `e^{-iφĴ_z} e^{-iϑĴ_y}`.
pub fn coherent_spin(space: SpinSpace, polar: f64, azimuth: f64) -> PureState {
    let top = fock(space, space.j().value()).expect("+j is always a valid label");
    let rotated = top.evolve(&space.orienting_rotation(polar, azimuth));
    PureState::normalized(space, canonical_phase(rotated.amplitudes)).expect("rotation preserves the norm")
}

/// `(|N⟩_a|0⟩_b + |0⟩_a|N⟩_b)/√2`.
pub fn noon(space: SpinSpace) -> PureState {
    let mut v = CVector::zeros(space.dim());
    v[0] = c64(FRAC_1_SQRT_2, 0.0);
    v[space.dim() - 1] = c64(FRAC_1_SQRT_2, 0.0);
    PureState::normalized(space, v).expect("two equal weights are normalisable")
}

/// Equal superposition of the two extremal eigenstates of `Ĵ_axis`,
/// built by rotating [`noon`] from `z` onto `axis`.
pub fn ghz_along(space: SpinSpace, axis: SpinAxis) -> PureState {
    let (polar, azimuth) = axis.angles();
    let rotated = noon(space).evolve(&space.orienting_rotation(polar, azimuth));
    PureState::normalized(space, canonical_phase(rotated.amplitudes)).expect("rotation preserves the norm")
}

/// Convex combination `Σ w_i ρ_i`.
pub fn mix(entries: &[(f64, QuantumState)]) -> Result<MixedState> {
    let (_, first) = entries.first().ok_or(StateError::EmptyMixture)?;
    let space = first.space();
    let total: f64 = entries.iter().map(|(w, _)| w).sum();
    if entries.iter().any(|(w, _)| !(w.is_finite() && *w > 0.0)) || (total - 1.0).abs() > STATE_TOL {
        return Err(StateError::Weights(total));
    }
    let mut rho = CMatrix::zeros(space.dim(), space.dim());
    for (w, state) in entries {
        if state.space() != space {
            return Err(StateError::SpaceMismatch);
        }
        rho += state.density_matrix() * c64(*w, 0.0);
    }
    MixedState::new(space, rho)
}

/// Declarative description of a probe, used by configuration files and
/// state records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProbeSpec {
    Fock { mu: f64 },
    Css { polar: f64, azimuth: f64 },
    Noon,
    TwinFock,
    Ghz { axis: SpinAxis },
    Mix { components: Vec<MixComponent> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixComponent {
    pub weight: f64,
    pub probe: ProbeSpec,
}

impl ProbeSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProbeSpec::Fock { .. } => "fock",
            ProbeSpec::Css { .. } => "css",
            ProbeSpec::Noon => "noon",
            ProbeSpec::TwinFock => "twin-fock",
            ProbeSpec::Ghz { .. } => "ghz",
            ProbeSpec::Mix { .. } => "mix",
        }
    }

    pub fn build(&self, space: SpinSpace) -> Result<QuantumState> {
        Ok(match self {
            ProbeSpec::Fock { mu } => fock(space, *mu)?.into(),
            ProbeSpec::Css { polar, azimuth } => coherent_spin(space, *polar, *azimuth).into(),
            ProbeSpec::Noon => noon(space).into(),
            ProbeSpec::TwinFock => twin_fock(space)?.into(),
            ProbeSpec::Ghz { axis } => ghz_along(space, *axis).into(),
            ProbeSpec::Mix { components } => {
                let entries = components
                    .iter()
                    .map(|c| Ok((c.weight, c.probe.build(space)?)))
                    .collect::<Result<Vec<_>>>()?;
                mix(&entries)?.into()
            }
        })
    }
}

/// JSON form of a state: complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub n_particles: u32,
    pub kind: String,
    pub parameters: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<Vec<Vec<[f64; 2]>>>,
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl StateRecord {
    /// Record for a state produced from `spec`.
    pub fn from_spec(spec: &ProbeSpec, state: &QuantumState) -> Self {
        let parameters = serde_json::to_value(spec).unwrap_or(serde_json::Value::Null);
        Self::with_kind(spec.kind(), parameters, state)
    }

    pub fn with_kind(kind: &str, parameters: serde_json::Value, state: &QuantumState) -> Self {
        let n_particles = state.space().n_particles();
        let (amplitudes, rho) = match state {
            QuantumState::Pure(p) => (Some(p.amplitudes().iter().map(pair).collect()), None),
            QuantumState::Mixed(m) => {
                let r = m.rho();
                let rows = (0..r.nrows())
                    .map(|i| (0..r.ncols()).map(|j| pair(&r[(i, j)])).collect())
                    .collect();
                (None, Some(rows))
            }
        };
        Self {
            n_particles,
            kind: kind.to_string(),
            parameters,
            amplitudes,
            rho,
        }
    }

    pub fn to_state(&self) -> Result<QuantumState> {
        let space = SpinSpace::new(self.n_particles)?;
        match (&self.amplitudes, &self.rho) {
            (Some(a), None) => {
                let v = CVector::from_iterator(a.len(), a.iter().map(|p| c64(p[0], p[1])));
                Ok(PureState::new(space, v)?.into())
            }
            (None, Some(rows)) => {
                let dim = rows.len();
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(StateError::Record("density matrix is not square".into()));
                }
                let m = CMatrix::from_fn(dim, dim, |i, j| c64(rows[i][j][0], rows[i][j][1]));
                Ok(MixedState::new(space, m)?.into())
            }
            _ => Err(StateError::Record(
                "exactly one of 'amplitudes' or 'rho' must be present".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn space(n: u32) -> SpinSpace {
        SpinSpace::new(n).unwrap()
    }

    fn binomial(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn fock_places_all_weight_on_label() {
        let s = space(4);
        let top = fock(s, 2.0).unwrap();
        assert_eq!(top.amplitudes()[4], c64(1.0, 0.0));
        assert_eq!(s.occupations(4), (4, 0));
        let tf = twin_fock(s).unwrap();
        assert_eq!(tf.amplitudes()[2], c64(1.0, 0.0));
        assert_eq!(s.occupations(2), (2, 2));
        let odd = fock(space(3), 0.5).unwrap();
        let idx = space(3).index_of(HalfInt::from_twice(1)).unwrap();
        assert_eq!(odd.amplitudes()[idx], c64(1.0, 0.0));
        assert_eq!(space(3).occupations(idx), (2, 1));
    }

    #[test]
    fn fock_rejects_bad_labels() {
        assert!(fock(space(4), 3.0).is_err());
        assert!(fock(space(4), 0.5).is_err());
        assert!(matches!(twin_fock(space(3)), Err(StateError::OddTwinFock(3))));
    }

    #[test]
    fn coherent_state_north_pole_is_top_fock() {
        let s = space(5);
        let css = coherent_spin(s, 0.0, 0.3);
        assert!((css.overlap2(&fock(s, 2.5).unwrap()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coherent_state_single_qubit_equator() {
        let css = coherent_spin(space(1), FRAC_PI_2, 0.0);
        for z in css.amplitudes().iter() {
            assert!((z - c64(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_state_equator_is_binomial() {
        let s = space(6);
        let css = coherent_spin(s, FRAC_PI_2, 0.0);
        for i in 0..s.dim() {
            let want = binomial(6, i as u64) / 64.0;
            assert!((css.amplitudes()[i].norm_sqr() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn coherent_state_matches_closed_form_amplitudes() {
        let s = space(5);
        let (polar, azimuth) = (1.1, 0.7);
        let css = coherent_spin(s, polar, azimuth);
        let j = 2.5;
        let closed: Vec<Complex64> = (0..s.dim())
            .map(|i| {
                let mu = s.label(i).value();
                let up = (j + mu) as i32;
                let down = (j - mu) as i32;
                let mag = binomial(5, up as u64).sqrt() * (polar / 2.0).cos().powi(up) * (polar / 2.0).sin().powi(down);
                Complex64::from_polar(mag, (j - mu) * azimuth)
            })
            .collect();
        let closed = canonical_phase(CVector::from_vec(closed));
        assert!((css.amplitudes() - closed).camax() < 1e-13);
    }

    #[test]
    fn coherent_state_mean_spin_is_maximal() {
        let s = space(7);
        for (polar, azimuth) in [(0.3, 0.2), (1.4, -2.0), (2.9, 3.0)] {
            let m = coherent_spin(s, polar, azimuth).mean_spin();
            let dir = SpinAxis::from_angles(polar, azimuth).vector() * 3.5;
            assert!((m - dir).norm() < 1e-10);
        }
    }

    #[test]
    fn noon_amplitudes() {
        let st = noon(space(10));
        assert!((st.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((st.amplitudes()[10].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(st.amplitudes().iter().skip(1).take(9).all(|z| z.norm() == 0.0));
        let one = noon(space(1));
        assert!((one.overlap2(&coherent_spin(space(1), FRAC_PI_2, 0.0)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ghz_along_z_is_noon() {
        let s = space(6);
        assert_eq!(ghz_along(s, SpinAxis::Z).amplitudes(), noon(s).amplitudes());
    }

    #[test]
    fn ghz_along_x_lives_on_extremal_jx() {
        let s = space(2);
        let g = ghz_along(s, SpinAxis::X);
        let eig = s.jx().eig().unwrap();
        let mut weight = 0.0;
        for k in [0, 2] {
            weight += eig.column(k).dotc(g.amplitudes()).norm_sqr();
        }
        assert!((weight - 1.0).abs() < 1e-12);
        assert!(g.expectation(s.jx().matrix()).abs() < 1e-12);
    }

    #[test]
    fn ghz_overlap_oscillates() {
        let s = space(5);
        let axis = SpinAxis::new(0.3, -0.5, 0.8).unwrap();
        let g = ghz_along(s, axis);
        for k in 0..10 {
            let t = 0.17 * k as f64;
            let moved = g.evolve(&s.rotation(axis, t));
            let want = (5.0 * t / 2.0).cos().powi(2);
            assert!((g.overlap2(&moved) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_of_poles_is_maximally_mixed() {
        let s = space(1);
        let up = fock(s, 0.5).unwrap();
        let down = fock(s, -0.5).unwrap();
        let m = mix(&[(0.5, up.into()), (0.5, down.into())]).unwrap();
        for p in &m.spectrum().eigenvalues {
            assert!((p - 0.5).abs() < 1e-14);
        }
        assert!(!m.is_pure());
    }

    #[test]
    fn single_entry_mixture_is_the_projector() {
        let s = space(3);
        let css = coherent_spin(s, 0.4, 0.1);
        let m = mix(&[(1.0, css.clone().into())]).unwrap();
        assert!(m.is_pure());
        assert!((m.rho() - css.density_matrix()).camax() < 1e-15);
        assert!((m.principal_vector().overlap2(&css) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noon_twin_fock_mixture_has_rank_two() {
        let s = space(4);
        let m = mix(&[(0.5, noon(s).into()), (0.5, twin_fock(s).unwrap().into())]).unwrap();
        let trace: f64 = m.spectrum().eigenvalues.iter().sum();
        assert!((trace - 1.0).abs() < 1e-12);
        assert_eq!(m.rank(1e-12), 2);
    }

    #[test]
    fn mixture_errors() {
        let s = space(2);
        let a: QuantumState = noon(s).into();
        assert!(matches!(mix(&[]), Err(StateError::EmptyMixture)));
        assert!(matches!(
            mix(&[(0.4, a.clone()), (0.4, a.clone())]),
            Err(StateError::Weights(_))
        ));
        assert!(matches!(
            mix(&[(1.5, a.clone()), (-0.5, a.clone())]),
            Err(StateError::Weights(_))
        ));
        let b: QuantumState = noon(space(3)).into();
        assert!(matches!(mix(&[(0.5, a), (0.5, b)]), Err(StateError::SpaceMismatch)));
    }

    #[test]
    fn density_validation() {
        let s = space(1);
        let bad_trace = CMatrix::identity(2, 2);
        assert!(matches!(MixedState::new(s, bad_trace), Err(StateError::Trace(_))));
        let negative = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.5, 0.0), c64(-0.5, 0.0)]));
        assert!(matches!(
            MixedState::new(s, negative),
            Err(StateError::NegativeEigenvalue(_))
        ));
        let tiny = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0 + 1e-13, 0.0), c64(-1e-13, 0.0)]));
        let m = MixedState::new(s, tiny).unwrap();
        assert!(m.spectrum().eigenvalues.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn pure_state_requires_normalisation() {
        let s = space(1);
        let v = CVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0)]);
        assert!(matches!(
            PureState::new(s, v.clone()),
            Err(StateError::NotNormalized(_))
        ));
        assert!(PureState::normalized(s, v).is_ok());
    }

    #[test]
    fn record_round_trip() {
        let s = space(3);
        let spec = ProbeSpec::Css {
            polar: 1.0,
            azimuth: 0.5,
        };
        let state = spec.build(s).unwrap();
        let rec = StateRecord::from_spec(&spec, &state);
        let json = serde_json::to_string(&rec).unwrap();
        let back: StateRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.kind, "css");
        let state2 = back.to_state().unwrap();
        assert!((state2.density_matrix() - state.density_matrix()).camax() < 1e-15);

        let mixed_spec = ProbeSpec::Mix {
            components: vec![
                MixComponent {
                    weight: 0.25,
                    probe: ProbeSpec::Noon,
                },
                MixComponent {
                    weight: 0.75,
                    probe: ProbeSpec::Fock { mu: 0.5 },
                },
            ],
        };
        let mixed = mixed_spec.build(s).unwrap();
        let rec = StateRecord::from_spec(&mixed_spec, &mixed);
        assert!(rec.rho.is_some() && rec.amplitudes.is_none());
        let back = rec.to_state().unwrap();
        assert!((back.density_matrix() - mixed.density_matrix()).camax() < 1e-15);
    }

    #[test]
    fn probe_spec_json_shape() {
        let spec: ProbeSpec = serde_json::from_str(r#"{"kind":"ghz","axis":[1,0,0]}"#).unwrap();
        assert_eq!(spec, ProbeSpec::Ghz { axis: SpinAxis::X });
        let spec: ProbeSpec = serde_json::from_str(r#"{"kind":"twin-fock"}"#).unwrap();
        assert_eq!(spec.kind(), "twin-fock");
    }
}
