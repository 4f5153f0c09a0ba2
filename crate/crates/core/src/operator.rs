//! Dense complex linear algebra over finite Hilbert spaces: validated
//! Hermitian operators, unit-norm states, commutators, expectations and
//! eigenvalue queries.
//!
//! Everything here is immutable after construction and every operation is
//! pure, so values can be shared freely across threads.

use nalgebra::{DMatrix, DVector, Vector2};
use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance on the Hermiticity defect accepted by [`HermitianOperator::new`].
pub const HERMITICITY_REL_TOL: f64 = 1e-10;
/// Absolute tolerance on `|‖ψ‖ − 1|` accepted by [`QuantumState::new`].
pub const STATE_NORM_TOL: f64 = 1e-12;

const MAX_EIGEN_SWEEPS: usize = 10_000;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has zero dimension")]
    EmptyDimension,
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NonHermitian { defect: f64, tol: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("vector norm {norm} is not 1 within {STATE_NORM_TOL:e}")]
    NotNormalized { norm: f64 },
    #[error("cannot normalize a vector with vanishing norm")]
    ZeroVector,
    #[error("eigenvalue iteration failed to converge")]
    ConvergenceFailure,
}

/// Shorthand complex constructor used throughout the crate.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry modulus of a complex matrix.
pub fn max_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// A validated self-adjoint matrix on a finite-dimensional Hilbert space.
///
/// Construction symmetrizes the input as `(M + M†)/2` once the Hermiticity
/// defect is within [`HERMITICITY_REL_TOL`], so stored entries are exactly
/// self-adjoint up to the symmetrization arithmetic. The `unit` tag is a
/// free-text label for the physical dimension and takes no part in any
/// computation.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: DMatrix<Complex64>,
    unit: String,
}

impl HermitianOperator {
    /// Validates and symmetrizes a square complex matrix.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, OperatorError> {
        if entries.nrows() != entries.ncols() {
            return Err(OperatorError::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(OperatorError::EmptyDimension);
        }
        let defect = max_norm(&(&entries - entries.adjoint()));
        let tol = HERMITICITY_REL_TOL * max_norm(&entries).max(1.0);
        if defect > tol {
            return Err(OperatorError::NonHermitian { defect, tol });
        }
        let sym = (&entries + entries.adjoint()).scale(0.5);
        Ok(Self {
            entries: sym,
            unit: String::new(),
        })
    }

    /// Identity operator of the given dimension.
    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
            unit: String::new(),
        }
    }

    pub fn with_unit(mut self, unit: &str) -> Self {
        self.unit = unit.to_string();
        self
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    fn check_dim(&self, other: usize) -> Result<(), OperatorError> {
        if self.dim() != other {
            return Err(OperatorError::DimMismatch {
                left: self.dim(),
                right: other,
            });
        }
        Ok(())
    }

    /// Hermitian commutator `i[A, B] = i(AB − BA)`.
    ///
    /// The factor `i` makes the result self-adjoint for self-adjoint inputs.
    pub fn commutator(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_dim(other.dim())?;
        let ab = &self.entries * &other.entries;
        let ba = &other.entries * &self.entries;
        let m = (ab - ba) * c64(0.0, 1.0);
        Self::new(m)
    }

    /// `⟨ψ|O|ψ⟩`. The imaginary residue of the quadratic form is pure
    /// rounding for a validated operator and is discarded after a debug
    /// assertion.
    pub fn expectation(&self, psi: &QuantumState) -> Result<f64, OperatorError> {
        self.check_dim(psi.dim())?;
        let o_psi = &self.entries * psi.vector();
        let z = psi.vector().dotc(&o_psi);
        debug_assert!(
            z.im.abs() <= 1e-12 * o_psi.norm().max(1.0),
            "imaginary residue {} above rounding scale",
            z.im
        );
        Ok(z.re)
    }

    /// `⟨(δO)²⟩ = ⟨O²⟩ − ⟨O⟩²`, evaluated as `‖(O − ⟨O⟩)ψ‖²` so the result
    /// is nonnegative by construction; the clamp guards the contract anyway.
    pub fn variance(&self, psi: &QuantumState) -> Result<f64, OperatorError> {
        let u = self.deviation_apply(psi)?;
        Ok(u.norm_squared().max(0.0))
    }

    /// Deviation operator `δO = O − ⟨O⟩·1`.
    pub fn deviation(&self, psi: &QuantumState) -> Result<Self, OperatorError> {
        let mean = self.expectation(psi)?;
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[(i, i)] -= c64(mean, 0.0);
        }
        Ok(Self {
            entries,
            unit: self.unit.clone(),
        })
    }

    /// `(O − ⟨O⟩)ψ` without forming the shifted matrix.
    pub fn deviation_apply(&self, psi: &QuantumState) -> Result<DVector<Complex64>, OperatorError> {
        let mean = self.expectation(psi)?;
        Ok(&self.entries * psi.vector() - psi.vector().scale(mean))
    }

    /// Tensor product with row-major block convention: block `(i, j)` of the
    /// result equals `self[i, j] · other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.kronecker(&other.entries),
            unit: String::new(),
        }
    }

    /// Smallest eigenvalue, by full deterministic decomposition.
    pub fn min_eig(&self) -> Result<f64, OperatorError> {
        let eig = self
            .entries
            .clone()
            .try_symmetric_eigen(f64::EPSILON, MAX_EIGEN_SWEEPS)
            .ok_or(OperatorError::ConvergenceFailure)?;
        Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    /// Smallest eigenvalue together with a unit eigenvector.
    pub fn min_eigenpair(&self) -> Result<(f64, DVector<Complex64>), OperatorError> {
        let eig = self
            .entries
            .clone()
            .try_symmetric_eigen(f64::EPSILON, MAX_EIGEN_SWEEPS)
            .ok_or(OperatorError::ConvergenceFailure)?;
        let mut idx = 0;
        for (i, v) in eig.eigenvalues.iter().enumerate() {
            if *v < eig.eigenvalues[idx] {
                idx = i;
            }
        }
        let vec = eig.eigenvectors.column(idx).into_owned();
        Ok((eig.eigenvalues[idx], vec))
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, OperatorError> {
        let eig = self
            .entries
            .clone()
            .try_symmetric_eigen(f64::EPSILON, MAX_EIGEN_SWEEPS)
            .ok_or(OperatorError::ConvergenceFailure)?;
        let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    pub fn apply(&self, psi: &QuantumState) -> Result<DVector<Complex64>, OperatorError> {
        self.check_dim(psi.dim())?;
        Ok(&self.entries * psi.vector())
    }

    pub fn add(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
            unit: String::new(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: &self.entries - &other.entries,
            unit: String::new(),
        })
    }

    /// Multiplication by a real scalar (keeps self-adjointness).
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.scale(factor),
            unit: self.unit.clone(),
        }
    }

    /// `O + s·1` for real `s`.
    pub fn shift(&self, offset: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[(i, i)] += c64(offset, 0.0);
        }
        Self {
            entries,
            unit: self.unit.clone(),
        }
    }

    /// `O·O`, self-adjoint for self-adjoint `O`.
    pub fn square(&self) -> Self {
        let m = &self.entries * &self.entries;
        Self {
            entries: (&m + m.adjoint()).scale(0.5),
            unit: String::new(),
        }
    }

    /// Raw matrix product; the result is generally not Hermitian.
    pub fn matmul(&self, other: &Self) -> Result<DMatrix<Complex64>, OperatorError> {
        self.check_dim(other.dim())?;
        Ok(&self.entries * &other.entries)
    }
}

/// Unit-norm complex amplitude vector over a model basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<Complex64>,
}

impl QuantumState {
    /// Accepts a vector already normalized within [`STATE_NORM_TOL`].
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self, OperatorError> {
        if amplitudes.is_empty() {
            return Err(OperatorError::EmptyDimension);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(OperatorError::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: DVector<Complex64>) -> Result<Self, OperatorError> {
        if amplitudes.is_empty() {
            return Err(OperatorError::EmptyDimension);
        }
        let norm = amplitudes.norm();
        if norm <= f64::MIN_POSITIVE.sqrt() {
            return Err(OperatorError::ZeroVector);
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Basis vector `|k⟩` of the given dimension.
    pub fn basis(dim: usize, k: usize) -> Result<Self, OperatorError> {
        if dim == 0 {
            return Err(OperatorError::EmptyDimension);
        }
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut v = DVector::zeros(dim);
        v[k] = c64(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|ψ⟩⊗|χ⟩` on the doubled space, system index major.
    pub fn product_with_spinor(&self, chi: &Spinor) -> Self {
        let n = self.dim();
        let mut v = DVector::zeros(2 * n);
        for i in 0..n {
            v[2 * i] = self.amplitudes[i] * chi.up();
            v[2 * i + 1] = self.amplitudes[i] * chi.down();
        }
        Self { amplitudes: v }
    }
}

/// Unit-norm two-component spin state.
#[derive(Debug, Clone, PartialEq)]
pub struct Spinor {
    amplitudes: Vector2<Complex64>,
}

impl Spinor {
    pub fn new(up: Complex64, down: Complex64) -> Result<Self, OperatorError> {
        let amplitudes = Vector2::new(up, down);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(OperatorError::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(up: Complex64, down: Complex64) -> Result<Self, OperatorError> {
        let amplitudes = Vector2::new(up, down);
        let norm = amplitudes.norm();
        if norm <= f64::MIN_POSITIVE.sqrt() {
            return Err(OperatorError::ZeroVector);
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn basis_up() -> Self {
        Self {
            amplitudes: Vector2::new(c64(1.0, 0.0), c64(0.0, 0.0)),
        }
    }

    pub fn basis_down() -> Self {
        Self {
            amplitudes: Vector2::new(c64(0.0, 0.0), c64(1.0, 0.0)),
        }
    }

    pub fn up(&self) -> Complex64 {
        self.amplitudes[0]
    }

    pub fn down(&self) -> Complex64 {
        self.amplitudes[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sigma_x() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
    }

    fn sigma_y() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
    }

    fn sigma_z() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
    }

    #[test]
    fn identity_is_accepted() {
        let op = HermitianOperator::new(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(op.dim(), 2);
        assert_eq!(op.matrix()[(0, 0)], c64(1.0, 0.0));
    }

    #[test]
    fn sigma_y_is_accepted_unchanged() {
        let op = HermitianOperator::new(sigma_y()).unwrap();
        assert_eq!(op.matrix(), &sigma_y());
    }

    #[test]
    fn hermiticity_defect_above_tolerance_rejected() {
        let mut m = sigma_x();
        m[(0, 1)] += c64(0.0, 1e-3);
        match HermitianOperator::new(m) {
            Err(OperatorError::NonHermitian { defect, .. }) => {
                assert!(defect > 1e-4);
            }
            other => panic!("expected NonHermitian, got {other:?}"),
        }
    }

    #[test]
    fn small_defect_is_symmetrized() {
        let mut m = sigma_x();
        m[(0, 1)] += c64(1e-12, 0.0);
        let op = HermitianOperator::new(m).unwrap();
        let defect = max_norm(&(op.matrix() - op.matrix().adjoint()));
        assert!(defect <= 1e-15);
    }

    #[test]
    fn non_square_rejected() {
        let m = DMatrix::<Complex64>::zeros(2, 3);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(OperatorError::NotSquare { .. })
        ));
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = HermitianOperator::new(sigma_x()).unwrap();
        let z = a.commutator(&a).unwrap();
        assert_eq!(max_norm(z.matrix()), 0.0);
    }

    #[test]
    fn pauli_commutator_halves() {
        // i[σx/2, σy/2] = −σz/2
        let a = HermitianOperator::new(sigma_x().scale(0.5)).unwrap();
        let b = HermitianOperator::new(sigma_y().scale(0.5)).unwrap();
        let c = a.commutator(&b).unwrap();
        let expected = sigma_z().scale(-0.5);
        assert!(max_norm(&(c.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn commutator_antisymmetry_exact() {
        let a = HermitianOperator::new(sigma_x() + sigma_z().scale(0.3)).unwrap();
        let b = HermitianOperator::new(sigma_y().scale(1.7)).unwrap();
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        let sum = ab.add(&ba).unwrap();
        assert!(max_norm(sum.matrix()) <= 1e-14 * max_norm(ab.matrix()).max(1.0));
    }

    #[test]
    fn commutator_dim_mismatch() {
        let a = HermitianOperator::identity(2);
        let b = HermitianOperator::identity(3);
        assert!(matches!(
            a.commutator(&b),
            Err(OperatorError::DimMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn expectation_of_identity_is_one() {
        let psi = QuantumState::normalized(DVector::from_vec(vec![c64(1., 2.), c64(-0.3, 0.4)]))
            .unwrap();
        let id = HermitianOperator::identity(2);
        assert_abs_diff_eq!(id.expectation(&psi).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn expectation_spin_up_sigma_z_half() {
        let op = HermitianOperator::new(sigma_z().scale(0.5)).unwrap();
        let up = QuantumState::basis(2, 0).unwrap();
        assert_abs_diff_eq!(op.expectation(&up).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn expectation_invariant_under_global_phase() {
        let op = HermitianOperator::new(sigma_x() + sigma_y().scale(0.6)).unwrap();
        let psi =
            QuantumState::normalized(DVector::from_vec(vec![c64(0.8, 0.1), c64(0.2, -0.5)]))
                .unwrap();
        let phase = c64(0.0, 1.234).exp();
        let rotated = QuantumState::new(psi.vector().clone().map(|z| z * phase)).unwrap();
        let e1 = op.expectation(&psi).unwrap();
        let e2 = op.expectation(&rotated).unwrap();
        assert!((e1 - e2).abs() <= 1e-14 * e1.abs().max(1.0));
    }

    #[test]
    fn variance_of_eigenstate_is_zero() {
        let op = HermitianOperator::new(sigma_z()).unwrap();
        let up = QuantumState::basis(2, 0).unwrap();
        assert_eq!(op.variance(&up).unwrap(), 0.0);
    }

    #[test]
    fn variance_spin_up_sigma_x_half() {
        let op = HermitianOperator::new(sigma_x().scale(0.5)).unwrap();
        let up = QuantumState::basis(2, 0).unwrap();
        assert_abs_diff_eq!(op.variance(&up).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn variance_matches_deviation_square() {
        let op = HermitianOperator::new(sigma_x().scale(0.7) + sigma_z().scale(0.2)).unwrap();
        let psi =
            QuantumState::normalized(DVector::from_vec(vec![c64(0.6, 0.3), c64(-0.1, 0.9)]))
                .unwrap();
        let dev = op.deviation(&psi).unwrap();
        let via_square = dev.square().expectation(&psi).unwrap();
        let direct = op.variance(&psi).unwrap();
        assert!((via_square - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn deviation_of_identity_is_zero() {
        let id = HermitianOperator::identity(3);
        let psi = QuantumState::basis(3, 1).unwrap();
        let dev = id.deviation(&psi).unwrap();
        assert!(max_norm(dev.matrix()) <= 1e-15);
    }

    #[test]
    fn deviation_has_zero_expectation() {
        let op = HermitianOperator::new(sigma_z().scale(0.5)).unwrap();
        let up = QuantumState::basis(2, 0).unwrap();
        let dev = op.deviation(&up).unwrap();
        assert!(dev.expectation(&up).unwrap().abs() <= 1e-12);
        // σz/2 − ½·1
        assert_eq!(dev.matrix()[(0, 0)], c64(0.0, 0.0));
        assert_eq!(dev.matrix()[(1, 1)], c64(-1.0, 0.0));
    }

    #[test]
    fn kron_identity_blocks() {
        let id = HermitianOperator::identity(2);
        let k = id.kron(&id);
        assert_eq!(k.matrix(), &DMatrix::identity(4, 4));

        let sz = HermitianOperator::new(sigma_z()).unwrap();
        let sx = HermitianOperator::new(sigma_x()).unwrap();
        let k = sz.kron(&sx);
        assert_eq!(k.dim(), 4);
        assert_eq!(k.matrix()[(0, 1)], c64(1.0, 0.0));
        assert_eq!(k.matrix()[(2, 3)], c64(-1.0, 0.0));
    }

    #[test]
    fn kron_dims_multiply() {
        let a = HermitianOperator::identity(2);
        let b = HermitianOperator::identity(3);
        assert_eq!(a.kron(&b).dim(), 6);
    }

    #[test]
    fn kron_associative_exact() {
        let a = HermitianOperator::new(sigma_x()).unwrap();
        let b = HermitianOperator::new(sigma_y()).unwrap();
        let c = HermitianOperator::new(sigma_z().scale(2.0)).unwrap();
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        assert_eq!(left.matrix(), right.matrix());
    }

    #[test]
    fn min_eig_basics() {
        assert_abs_diff_eq!(
            HermitianOperator::identity(4).min_eig().unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let sz = HermitianOperator::new(sigma_z()).unwrap();
        assert_abs_diff_eq!(sz.min_eig().unwrap(), -1.0, epsilon = 1e-12);
        let diag = HermitianOperator::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            c64(0.3, 0.0),
            c64(0.1, 0.0),
            c64(0.2, 0.0),
        ])))
        .unwrap();
        assert_abs_diff_eq!(diag.min_eig().unwrap(), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn min_eigenpair_returns_matching_vector() {
        let op = HermitianOperator::new(sigma_x() + sigma_z().scale(0.5)).unwrap();
        let (val, vec) = op.min_eigenpair().unwrap();
        let residual = (op.matrix() * &vec - vec.scale(val)).norm();
        assert!(residual < 1e-12);
    }

    #[test]
    fn state_norm_validation() {
        let bad = DVector::from_vec(vec![c64(1.0, 0.0), c64(0.1, 0.0)]);
        assert!(matches!(
            QuantumState::new(bad),
            Err(OperatorError::NotNormalized { .. })
        ));
        let zero = DVector::from_vec(vec![c64(0.0, 0.0)]);
        assert!(matches!(
            QuantumState::normalized(zero),
            Err(OperatorError::ZeroVector)
        ));
    }

    #[test]
    fn product_with_spinor_layout_is_system_major() {
        let psi = QuantumState::basis(3, 1).unwrap();
        let chi = Spinor::basis_down();
        let prod = psi.product_with_spinor(&chi);
        assert_eq!(prod.dim(), 6);
        assert_eq!(prod.vector()[3], c64(1.0, 0.0));
        assert_eq!(prod.vector().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }
}
