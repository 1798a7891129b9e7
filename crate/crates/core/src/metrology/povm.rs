//! Positive-operator valued measures.

use crate::numerics::{self, c64, CMatrix, HermitianOperator};
use crate::probes::PureState;
use crate::spinspace::SpinSpace;

use super::{MetrologyError, Result};

/// Tolerance for positivity and completeness of POVM elements.
pub const POVM_TOL: f64 = 1e-10;

/// One outcome: a positive operator, a printable label and a numeric value
/// (the `μ` eigenvalue for number counting, the outcome index otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub label: String,
    pub value: f64,
    operator: CMatrix,
}

impl PovmElement {
    pub fn new(label: impl Into<String>, value: f64, operator: CMatrix) -> Self {
        Self {
            label: label.into(),
            value,
            operator,
        }
    }

    pub fn operator(&self) -> &CMatrix {
        &self.operator
    }
}

/// A validated measurement: every element positive semidefinite and the
/// elements summing to the identity, both within [`POVM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let dim = elements
            .first()
            .map(|e| e.operator.nrows())
            .ok_or(MetrologyError::EmptyPovm)?;
        let mut sum = CMatrix::zeros(dim, dim);
        for (k, e) in elements.iter().enumerate() {
            if e.operator.nrows() != dim || e.operator.ncols() != dim {
                return Err(MetrologyError::Dimension {
                    expected: dim,
                    found: e.operator.nrows(),
                });
            }
            let spectrum = numerics::eig_hermitian(&e.operator)?;
            let min = spectrum.eigenvalues[0];
            if min < -POVM_TOL {
                return Err(MetrologyError::NotPositive { outcome: k, min });
            }
            sum += &e.operator;
        }
        let defect = numerics::max_abs_diff(&sum, &CMatrix::identity(dim, dim));
        if defect > POVM_TOL {
            return Err(MetrologyError::Incomplete { defect });
        }
        Ok(Self { elements })
    }

    /// Projectors on the Dicke states, `Π(μ) = |j,μ⟩⟨j,μ|`, ascending `μ`.
    pub fn number_counting(space: SpinSpace) -> Self {
        let dim = space.dim();
        let elements = (0..dim)
            .map(|i| {
                let mut m = CMatrix::zeros(dim, dim);
                m[(i, i)] = c64(1.0, 0.0);
                let mu = space.label(i);
                PovmElement::new(format!("mu={mu}"), mu.value(), m)
            })
            .collect();
        Self { elements }
    }

    /// Two-outcome measurement `{|ψ₀⟩⟨ψ₀|, 1 − |ψ₀⟩⟨ψ₀|}`.
    pub fn probe_projection(probe: &PureState) -> Self {
        let proj = probe.density_matrix();
        let dim = proj.nrows();
        let complement = CMatrix::identity(dim, dim) - &proj;
        Self {
            elements: vec![
                PovmElement::new("probe", 0.0, proj),
                PovmElement::new("orthogonal", 1.0, complement),
            ],
        }
    }

    /// Rank-one projectors on the columns of `basis`, which must be unitary.
    pub fn from_basis(basis: &CMatrix) -> Result<Self> {
        let elements = (0..basis.ncols())
            .map(|k| {
                let v = basis.column(k).into_owned();
                PovmElement::new(format!("b{k}"), k as f64, &v * v.adjoint())
            })
            .collect();
        Self::new(elements)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].operator.nrows()
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|e| e.label.as_str())
    }

    /// `max |Σ E − 1|`.
    pub fn completeness_defect(&self) -> f64 {
        let dim = self.dim();
        let sum = self
            .elements
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, e| acc + &e.operator);
        numerics::max_abs_diff(&sum, &CMatrix::identity(dim, dim))
    }

    /// Values `v_ε` with `M = Σ_ε v_ε E_ε`, i.e. the readout of an observable
    /// that is diagonal in this measurement. Fails if `M` is not of that form.
    pub fn outcome_values(&self, observable: &HermitianOperator) -> Result<Vec<f64>> {
        let m = observable.matrix();
        if m.nrows() != self.dim() {
            return Err(MetrologyError::Dimension {
                expected: self.dim(),
                found: m.nrows(),
            });
        }
        let mut values = Vec::with_capacity(self.len());
        let mut rebuilt = CMatrix::zeros(self.dim(), self.dim());
        for e in &self.elements {
            let weight = e.operator.trace().re;
            let v = if weight > POVM_TOL {
                numerics::trace_product(&e.operator, m).re / weight
            } else {
                0.0
            };
            rebuilt += &e.operator * c64(v, 0.0);
            values.push(v);
        }
        let defect = numerics::max_abs_diff(&rebuilt, m);
        if defect > 1e-9 {
            return Err(MetrologyError::NotDiagonalInPovm { defect });
        }
        Ok(values)
    }
}
