//! The permutationally symmetric subspace of `N` qubits.
//!
//! Two-mode Fock states `|j+μ⟩_a |j-μ⟩_b` are the Dicke states `|j, μ⟩` with
//! `j = N/2`. The basis is stored in ascending `μ`, so index `0` is
//! `|j, -j⟩` (all particles in mode `b`) and index `N` is `|j, +j⟩`.
//! Half-integer labels are carried as doubled integers ([`HalfInt`]) so that
//! odd particle numbers never suffer from floating-point label drift.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{self, c64, CMatrix, HermitianOperator, NumericsError, UnitaryOperator};

/// Above this `j` the closed-form Wigner-d evaluation loses digits to
/// cancellation in the Jacobi polynomial.
pub const WIGNER_ACCURATE_MAX_J: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("particle number must be positive")]
    NoParticles,
    #[error("invalid quantum numbers j={j}, mu={mu}, nu={nu}")]
    InvalidQuantumNumbers { j: f64, mu: f64, nu: f64 },
    #[error("label {mu} is not a valid projection for j = {j}")]
    LabelOutOfRange { j: f64, mu: f64 },
    #[error("axis must be a finite non-zero vector, got ({0}, {1}, {2})")]
    DegenerateAxis(f64, f64, f64),
    #[error("cannot parse axis '{0}' (expected x, y, z or nx,ny,nz)")]
    AxisSyntax(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = SpinError> = std::result::Result<T, E>;

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    /// Rounds `x` to the nearest half-integer; `None` if `x` is not within
    /// `1e-9` of one.
    pub fn from_f64(x: f64) -> Option<Self> {
        let twice = (2.0 * x).round();
        if !x.is_finite() || (2.0 * x - twice).abs() > 1e-9 {
            return None;
        }
        Some(Self(twice as i64))
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Spin-`N/2` representation space of `N` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinSpace {
    n_particles: u32,
}

impl SpinSpace {
    pub fn new(n_particles: u32) -> Result<Self> {
        if n_particles == 0 {
            return Err(SpinError::NoParticles);
        }
        Ok(Self { n_particles })
    }

    pub fn n_particles(&self) -> u32 {
        self.n_particles
    }

    pub fn dim(&self) -> usize {
        self.n_particles as usize + 1
    }

    pub fn j(&self) -> HalfInt {
        HalfInt(self.n_particles as i64)
    }

    /// Basis index of the label `μ`, or `None` when `|μ| > j` or `j - μ` is
    /// not an integer.
    pub fn index_of(&self, mu: HalfInt) -> Option<usize> {
        let n = self.n_particles as i64;
        let shifted = mu.twice() + n;
        if !(0..=2 * n).contains(&shifted) || shifted % 2 != 0 {
            return None;
        }
        Some((shifted / 2) as usize)
    }

    pub fn label(&self, index: usize) -> HalfInt {
        debug_assert!(index < self.dim());
        HalfInt(2 * index as i64 - self.n_particles as i64)
    }

    /// All labels, ascending.
    pub fn labels(&self) -> impl Iterator<Item = HalfInt> + '_ {
        (0..self.dim()).map(|i| self.label(i))
    }

    /// Particle numbers `(n_a, n_b) = (j + μ, j − μ)` of basis state `index`.
    pub fn occupations(&self, index: usize) -> (u32, u32) {
        let n_a = index as u32;
        (n_a, self.n_particles - n_a)
    }

    /// `Ĵ_z`, diagonal in the Dicke basis.
    pub fn jz(&self) -> HermitianOperator {
        let diag: Vec<f64> = self.labels().map(HalfInt::value).collect();
        HermitianOperator::from_diagonal(&diag)
    }

    /// Raising operator `Ĵ_+ = â†b̂`.
    pub fn j_plus(&self) -> CMatrix {
        let dim = self.dim();
        let j = self.j().value();
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim - 1 {
            let mu = self.label(i).value();
            m[(i + 1, i)] = c64((j * (j + 1.0) - mu * (mu + 1.0)).sqrt(), 0.0);
        }
        m
    }

    /// Lowering operator `Ĵ_- = b̂†â`.
    pub fn j_minus(&self) -> CMatrix {
        self.j_plus().adjoint()
    }

    pub fn jx(&self) -> HermitianOperator {
        let jp = self.j_plus();
        let m = (&jp + jp.adjoint()) * c64(0.5, 0.0);
        HermitianOperator::new(m).expect("Jx is Hermitian by construction")
    }

    pub fn jy(&self) -> HermitianOperator {
        let jp = self.j_plus();
        let m = (&jp - jp.adjoint()) * c64(0.0, -0.5);
        HermitianOperator::new(m).expect("Jy is Hermitian by construction")
    }

    /// `n·Ĵ`.
    pub fn op_j(&self, axis: SpinAxis) -> HermitianOperator {
        let n = axis.vector();
        let (jx, jy, jz) = (self.jx(), self.jy(), self.jz());
        HermitianOperator::linear_combination(&[(n.x, &jx), (n.y, &jy), (n.z, &jz)])
            .expect("collective spin components share a dimension")
    }

    /// Eigenvalue `(N/2)(N/2 + 1)` of the Casimir operator `Ĵ²`.
    pub fn casimir(&self) -> f64 {
        let j = self.j().value();
        j * (j + 1.0)
    }

    /// `Ĵ_x² + Ĵ_y² + Ĵ_z²` assembled from the matrices.
    pub fn casimir_operator(&self) -> CMatrix {
        let (jx, jy, jz) = (self.jx(), self.jy(), self.jz());
        jx.matrix() * jx.matrix() + jy.matrix() * jy.matrix() + jz.matrix() * jz.matrix()
    }

    /// `e^{-iθ Ĵ_n}`.
    pub fn rotation(&self, axis: SpinAxis, theta: f64) -> UnitaryOperator {
        numerics::expm_generator(&self.op_j(axis), theta).expect("collective spin operators are Hermitian and small")
    }

    /// Phase shifter `e^{-iθĴ_z}`.
    pub fn phase_shifter(&self, theta: f64) -> UnitaryOperator {
        let diag: Vec<Complex64> = self
            .labels()
            .map(|mu| Complex64::from_polar(1.0, -theta * mu.value()))
            .collect();
        let d = nalgebra::DVector::from_vec(diag);
        UnitaryOperator::new(CMatrix::from_diagonal(&d)).expect("diagonal phases are unitary")
    }

    /// Symmetric beam splitter `e^{-iθĴ_x}`; `θ = π/2` is the balanced one.
    pub fn beam_splitter(&self, theta: f64) -> UnitaryOperator {
        self.rotation(SpinAxis::X, theta)
    }

    /// Balanced Mach-Zehnder (or Ramsey) sequence
    /// `e^{iπ/2 Ĵ_x} e^{-iθĴ_z} e^{-iπ/2 Ĵ_x}`, with the two beam splitters
    /// rotating by opposite angles. Equal to `e^{-iθĴ_y}`.
    pub fn mach_zehnder(&self, theta: f64) -> UnitaryOperator {
        let first = self.beam_splitter(FRAC_PI_2);
        let second = self.beam_splitter(-FRAC_PI_2);
        second.compose(&self.phase_shifter(theta)).compose(&first)
    }

    /// `e^{-iφĴ_z} e^{-iϑĴ_y}`, which carries `Ĵ_z` onto the axis with polar
    /// angle `ϑ` and azimuth `φ`.
    pub fn orienting_rotation(&self, polar: f64, azimuth: f64) -> UnitaryOperator {
        let shift = self.phase_shifter(azimuth);
        if polar == 0.0 {
            return shift;
        }
        shift.compose(&self.rotation(SpinAxis::Y, polar))
    }

    /// `e^{-iθĴ_y}` assembled element-wise from [`wigner_d`].
    pub fn wigner_rotation_y(&self, theta: f64) -> CMatrix {
        wigner_d_matrix(self.j(), theta).map(|x| c64(x, 0.0))
    }

    /// `e^{-iθĴ_x}` assembled element-wise as `e^{-iπ/2(μ-ν)} d^j_{μν}(θ)`.
    pub fn wigner_rotation_x(&self, theta: f64) -> CMatrix {
        let d = wigner_d_matrix(self.j(), theta);
        CMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            let diff = (self.label(r).twice() - self.label(c).twice()) as f64 / 2.0;
            Complex64::from_polar(d[(r, c)], -FRAC_PI_2 * diff)
        })
    }
}

/// Unit vector `n` selecting the collective spin component `Ĵ_n = n·Ĵ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SpinAxis {
    n: Vector3<f64>,
}

impl SpinAxis {
    pub const X: SpinAxis = SpinAxis {
        n: Vector3::new(1.0, 0.0, 0.0),
    };
    pub const Y: SpinAxis = SpinAxis {
        n: Vector3::new(0.0, 1.0, 0.0),
    };
    pub const Z: SpinAxis = SpinAxis {
        n: Vector3::new(0.0, 0.0, 1.0),
    };

    /// Normalises `(x, y, z)`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vector3::new(x, y, z);
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(SpinError::DegenerateAxis(x, y, z));
        }
        Ok(Self { n: v / norm })
    }

    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        Self::new(v.x, v.y, v.z)
    }

    /// Direction with polar angle `polar` from `z` and azimuth `azimuth`
    /// from `x`.
    pub fn from_angles(polar: f64, azimuth: f64) -> Self {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Self {
            n: Vector3::new(sp * ca, sp * sa, cp),
        }
    }

    pub fn vector(&self) -> Vector3<f64> {
        self.n
    }

    pub fn dot(&self, other: &SpinAxis) -> f64 {
        self.n.dot(&other.n)
    }

    pub fn cross(&self, other: &SpinAxis) -> Result<SpinAxis> {
        SpinAxis::from_vector(self.n.cross(&other.n))
    }

    pub fn neg(&self) -> SpinAxis {
        SpinAxis { n: -self.n }
    }

    /// Polar and azimuthal angles of the axis.
    pub fn angles(&self) -> (f64, f64) {
        let polar = self.n.z.clamp(-1.0, 1.0).acos();
        let azimuth = self.n.y.atan2(self.n.x);
        (polar, azimuth)
    }
}

impl TryFrom<[f64; 3]> for SpinAxis {
    type Error = SpinError;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        SpinAxis::new(v[0], v[1], v[2])
    }
}

impl From<SpinAxis> for [f64; 3] {
    fn from(a: SpinAxis) -> Self {
        [a.n.x, a.n.y, a.n.z]
    }
}

impl FromStr for SpinAxis {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "x" | "X" => Ok(SpinAxis::X),
            "y" | "Y" => Ok(SpinAxis::Y),
            "z" | "Z" => Ok(SpinAxis::Z),
            other => {
                let parts: Vec<f64> = other
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| SpinError::AxisSyntax(s.to_string()))?;
                match parts.as_slice() {
                    [x, y, z] => SpinAxis::new(*x, *y, *z),
                    _ => Err(SpinError::AxisSyntax(s.to_string())),
                }
            }
        }
    }
}

impl fmt::Display for SpinAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.n.x, self.n.y, self.n.z)
    }
}

/// Whether a Wigner-d value was computed inside the range where the
/// closed form is accurate to near machine precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WignerAccuracy {
    Full,
    Reduced,
}

fn ln_factorial(n: i64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Jacobi polynomial `P_n^{(α,β)}(x)` by the three-term recurrence.
pub fn jacobi(n: u32, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p_prev = 1.0;
    let mut p = (alpha + 1.0) + 0.5 * (alpha + beta + 2.0) * (x - 1.0);
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + alpha + beta;
        let a = 2.0 * k * (k + alpha + beta) * (s - 2.0);
        let b = (s - 1.0) * (s * (s - 2.0) * x + alpha * alpha - beta * beta);
        let c = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * s;
        let next = (b * p - c * p_prev) / a;
        p_prev = p;
        p = next;
    }
    p
}

/// Rotation matrix element `d^j_{μν}(θ) = ⟨j,μ| e^{-iθĴ_y} |j,ν⟩`.
pub fn wigner_d(j: f64, mu: f64, nu: f64, theta: f64) -> Result<f64> {
    wigner_d_status(j, mu, nu, theta).map(|(d, _)| d)
}

/// Like [`wigner_d`], also reporting whether `j` lies in the accurate range.
pub fn wigner_d_status(j: f64, mu: f64, nu: f64, theta: f64) -> Result<(f64, WignerAccuracy)> {
    let invalid = || SpinError::InvalidQuantumNumbers { j, mu, nu };
    let (tj, tm, tn) = match (HalfInt::from_f64(j), HalfInt::from_f64(mu), HalfInt::from_f64(nu)) {
        (Some(a), Some(b), Some(c)) => (a.twice(), b.twice(), c.twice()),
        _ => return Err(invalid()),
    };
    if tj < 0 || tm.abs() > tj || tn.abs() > tj || (tj - tm) % 2 != 0 || (tj - tn) % 2 != 0 {
        return Err(invalid());
    }
    if !theta.is_finite() {
        return Err(invalid());
    }
    let accuracy = if j > WIGNER_ACCURATE_MAX_J {
        WignerAccuracy::Reduced
    } else {
        WignerAccuracy::Full
    };
    Ok((wigner_d_twice(tj, tm, tn, theta), accuracy))
}

/// Core evaluation on doubled labels. Uses the symmetries
/// `d_{μν} = (-1)^{μ-ν} d_{νμ}` and `d_{μν} = (-1)^{μ-ν} d_{-μ,-ν}` to reach
/// `ν ≥ |μ|`, where every power in the closed form is non-negative and the
/// `θ = 0, π` endpoints need no special casing.
fn wigner_d_twice(tj: i64, tm: i64, tn: i64, theta: f64) -> f64 {
    let mut sign = 1.0;
    let (mut tm, mut tn) = (tm, tn);
    let parity = |a: i64, b: i64| if ((a - b) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    if tm.abs() > tn.abs() {
        sign *= parity(tm, tn);
        std::mem::swap(&mut tm, &mut tn);
    }
    if tn < 0 {
        sign *= parity(tm, tn);
        tm = -tm;
        tn = -tn;
    }
    // now tn >= |tm|
    let j_minus_nu = (tj - tn) / 2;
    let j_plus_nu = (tj + tn) / 2;
    let j_minus_mu = (tj - tm) / 2;
    let j_plus_mu = (tj + tm) / 2;
    let a = (tn - tm) / 2;
    let b = (tn + tm) / 2;

    let ln_pref =
        0.5 * (ln_factorial(j_minus_nu) + ln_factorial(j_plus_nu) - ln_factorial(j_minus_mu) - ln_factorial(j_plus_mu));
    let (s, c) = (0.5 * theta).sin_cos();
    let p = jacobi(j_minus_nu as u32, a as f64, b as f64, theta.cos());
    sign * ln_pref.exp() * s.powi(a as i32) * c.powi(b as i32) * p
}

/// Full `(2j+1)²` matrix of `d^j_{μν}(θ)` in ascending-label order.
pub fn wigner_d_matrix(j: HalfInt, theta: f64) -> DMatrix<f64> {
    let tj = j.twice();
    let dim = (tj + 1) as usize;
    DMatrix::from_fn(dim, dim, |r, c| {
        let tm = 2 * r as i64 - tj;
        let tn = 2 * c as i64 - tj;
        wigner_d_twice(tj, tm, tn, theta)
    })
}
