#![allow(dead_code)]

use phase_metrology::numerics::{c64, CMatrix, CVector, HermitianOperator};
use phase_metrology::probes::{MixedState, PureState};
use phase_metrology::spinspace::{SpinAxis, SpinSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(r: &mut ChaCha8Rng, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| c64(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

pub fn random_pure(r: &mut ChaCha8Rng, space: SpinSpace) -> PureState {
    PureState::normalized(space, random_vector(r, space.dim())).unwrap()
}

pub fn random_axis(r: &mut ChaCha8Rng) -> SpinAxis {
    loop {
        let v = [
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-2 && n2 <= 1.0 {
            return SpinAxis::new(v[0], v[1], v[2]).unwrap();
        }
    }
}

/// Orthonormal basis from the eigenvectors of a random Hermitian matrix.
pub fn random_basis(r: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        c64(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
    });
    let h = HermitianOperator::new((&a + a.adjoint()) * c64(0.5, 0.0)).unwrap();
    h.eig().unwrap().eigenvectors
}

/// Density matrix of exact rank `rank` from random vectors and weights.
pub fn random_density(r: &mut ChaCha8Rng, dim: usize, rank: usize) -> CMatrix {
    let basis = random_basis(r, dim);
    let weights: Vec<f64> = (0..rank).map(|_| r.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros(dim, dim);
    for (k, w) in weights.iter().enumerate() {
        let v = basis.column(k);
        rho += v * v.adjoint() * c64(w / total, 0.0);
    }
    (&rho + rho.adjoint()) * c64(0.5, 0.0)
}

pub fn random_mixed(r: &mut ChaCha8Rng, space: SpinSpace, rank: usize) -> MixedState {
    MixedState::new(space, random_density(r, space.dim(), rank)).unwrap()
}
