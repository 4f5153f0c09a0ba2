//! Seeded random instances for the invariant suites: Gaussian Hermitian
//! operators, Haar-distributed states, directions and admissible moment
//! sets.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::gram::GammaVector;
use crate::moments::MomentSet;
use crate::operator::{c64, HermitianOperator, QuantumState};

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// `(G + G†)/2` with independent standard-normal real and imaginary parts.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> HermitianOperator {
    let g = DMatrix::from_fn(dim, dim, |_, _| c64(normal(rng), normal(rng)));
    let sym = (&g + g.adjoint()).scale(0.5);
    HermitianOperator::new(sym).expect("symmetrized matrix is Hermitian")
}

/// Haar-distributed unit vector (normalized complex Gaussian).
pub fn haar_state(rng: &mut impl Rng, dim: usize) -> QuantumState {
    loop {
        let v: DVector<Complex64> =
            DVector::from_fn(dim, |_, _| c64(normal(rng), normal(rng)));
        if let Ok(state) = QuantumState::normalized(v) {
            return state;
        }
    }
}

/// Standard-normal direction, redrawn when all components vanish.
pub fn random_gamma(rng: &mut impl Rng) -> GammaVector {
    loop {
        if let Ok(g) = GammaVector::new(normal(rng), normal(rng), normal(rng)) {
            return g;
        }
    }
}

/// Random scalars satisfying the admissibility constraints
/// (`a, b ≥ 0`, `f ≥ c²`).
pub fn random_moment_set(rng: &mut impl Rng) -> MomentSet {
    let a = normal(rng).abs() * 2.0;
    let b = normal(rng).abs() * 2.0;
    let c = normal(rng) * 2.0;
    let f = c * c + normal(rng).abs() * 2.0;
    let e = normal(rng) * 2.0;
    let d = normal(rng) * 2.0;
    MomentSet::from_raw(a, b, c, f, e, d).expect("constructed admissible")
}

/// A full random instance: operators, a state, and its extracted moments.
pub fn random_instance(
    rng: &mut impl Rng,
    dim: usize,
) -> (HermitianOperator, HermitianOperator, QuantumState) {
    (
        random_hermitian(rng, dim),
        random_hermitian(rng, dim),
        haar_state(rng, dim),
    )
}
