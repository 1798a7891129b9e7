//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Every operator in the toolkit is a small dense matrix (dimension `N + 1`
//! for `N` particles), so the kernels here favour exactness over speed:
//! Hermitian matrices are diagonalised once and matrix exponentials of
//! generators are assembled from the spectrum, `V diag(e^{-iθλ}) V†`.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix used for every operator in the crate.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Default tolerance for structural checks (max-entry norm).
pub const DEFAULT_TOL: f64 = 1e-10;
/// Tolerance used when validating Hermiticity of inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative gap below which two eigenvalues are treated as one degenerate block.
pub const DEGENERACY_TOL: f64 = 1e-9;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has zero dimension")]
    Empty,
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian: max |A - A^†| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not symmetric: max |M - M^T| = {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },
    #[error("eigendecomposition did not converge within {iterations} iterations (dim {dim})")]
    NoConvergence { dim: usize, iterations: usize },
    #[error("matrix is not unitary: max |U^†U - 1| = {defect:e}")]
    NotUnitary { defect: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

pub type Result<T, E = NumericsError> = std::result::Result<T, E>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry modulus of `a`.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max |A - A†|` entrywise.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `max |U†U - 1|` entrywise.
pub fn unitary_defect(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &CMatrix::identity(u.nrows(), u.ncols()))
}

/// Commutator `[A, B] = AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Anticommutator `{A, B} = AB + BA`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// `Tr[A B]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `⟨ψ|A|ψ⟩`.
pub fn expectation(psi: &CVector, a: &CMatrix) -> Complex64 {
    psi.dotc(&(a * psi))
}

fn check_square(a: &CMatrix) -> Result<usize> {
    let (rows, cols) = a.shape();
    if rows != cols {
        return Err(NumericsError::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Err(NumericsError::Empty);
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(NumericsError::NonFinite);
    }
    Ok(rows)
}

/// A validated Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity within [`HERMITIAN_TOL`] and symmetrises away
    /// the residual round-off.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITIAN_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        check_square(&matrix)?;
        let asymmetry = hermitian_defect(&matrix);
        if asymmetry > tol {
            return Err(NumericsError::NotHermitian { asymmetry });
        }
        let sym = (&matrix + matrix.adjoint()) * c64(0.5, 0.0);
        Ok(Self { matrix: sym })
    }

    /// Real diagonal operator.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c64(x, 0.0)));
        Self {
            matrix: CMatrix::from_diagonal(&d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Real linear combination `Σ w_i A_i`.
    pub fn linear_combination(terms: &[(f64, &HermitianOperator)]) -> Result<Self> {
        let dim = terms.first().map(|(_, a)| a.dim()).ok_or(NumericsError::Empty)?;
        let mut out = CMatrix::zeros(dim, dim);
        for (w, a) in terms {
            if a.dim() != dim {
                return Err(NumericsError::DimensionMismatch {
                    expected: dim,
                    found: a.dim(),
                });
            }
            out += a.matrix() * c64(*w, 0.0);
        }
        Ok(Self { matrix: out })
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        eig_hermitian(&self.matrix)
    }
}

/// A matrix that is unitary within [`DEFAULT_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let defect = unitary_defect(&matrix);
        if defect > DEFAULT_TOL {
            return Err(NumericsError::NotUnitary { defect });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &UnitaryOperator) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        &self.matrix * psi
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, rho: &CMatrix) -> CMatrix {
        &self.matrix * rho * self.matrix.adjoint()
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_spectrum(|l| c64(l, 0.0))
    }

    /// `e^{-iθA}` for the decomposed matrix `A`.
    pub fn exp_i(&self, theta: f64) -> UnitaryOperator {
        UnitaryOperator {
            matrix: self.map_spectrum(|l| Complex64::from_polar(1.0, -theta * l)),
        }
    }

    /// Operator expressed in the eigenbasis, `V† A V`.
    pub fn to_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * a * &self.eigenvectors
    }

    pub fn column(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Index ranges of eigenvalue blocks that are degenerate within
    /// [`DEGENERACY_TOL`] (relative, with an absolute floor of one).
    pub fn degenerate_blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut blocks = Vec::new();
        let mut start = 0;
        for k in 1..=self.eigenvalues.len() {
            let split = k == self.eigenvalues.len() || {
                let a = self.eigenvalues[k - 1];
                let b = self.eigenvalues[k];
                (b - a).abs() > DEGENERACY_TOL * a.abs().max(b.abs()).max(1.0)
            };
            if split {
                blocks.push(start..k);
                start = k;
            }
        }
        blocks
    }
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
pub fn eig_hermitian(a: &CMatrix) -> Result<SpectralDecomposition> {
    let dim = check_square(a)?;
    let asymmetry = hermitian_defect(a);
    if asymmetry > HERMITIAN_TOL {
        return Err(NumericsError::NotHermitian { asymmetry });
    }
    let sym = (a + a.adjoint()) * c64(0.5, 0.0);
    let eig = sym
        .try_symmetric_eigen(EIG_EPS, EIG_MAX_ITER)
        .ok_or(NumericsError::NoConvergence {
            dim,
            iterations: EIG_MAX_ITER,
        })?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `e^{-iθH}` built from the spectrum of `H`.
pub fn expm_generator(h: &HermitianOperator, theta: f64) -> Result<UnitaryOperator> {
    Ok(h.eig()?.exp_i(theta))
}

/// Largest eigenvalue of a real symmetric 3×3 matrix and a unit eigenvector.
pub fn max_eig_sym3(m: &Matrix3<f64>) -> Result<(f64, Vector3<f64>)> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(NumericsError::NonFinite);
    }
    let asymmetry = (m - m.transpose()).amax();
    if asymmetry > HERMITIAN_TOL {
        return Err(NumericsError::NotSymmetric { asymmetry });
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(EIG_EPS, EIG_MAX_ITER)
        .ok_or(NumericsError::NoConvergence {
            dim: 3,
            iterations: EIG_MAX_ITER,
        })?;
    let k = eig.eigenvalues.imax();
    let n = eig.eigenvectors.column(k).normalize();
    Ok((eig.eigenvalues[k], n))
}
