//! Spin-extended operator `F`, its averaged 2×2 matrix `N(γ)`, and the 6×6
//! moment matrix with its sector decomposition and determinants.
//!
//! `F = γ₁·δA⊗σx + γ₂·δB⊗σy + γ₃·C⊗σz` couples three non-commuting slots
//! through the Pauli algebra. Averaging `F²` over the system state leaves a
//! 2×2 spin-space matrix `N(γ)` which is positive semidefinite for every
//! real `γ` — that much is rigorous, being the average of a squared
//! Hermitian operator, and holds on product test vectors ψ⊗χ. Reading the
//! quadratic form in `γ` as a 6×6 matrix and demanding full positive
//! semidefiniteness is a strictly stronger claim; no operation here asserts
//! it, and its determinant is a perfect square carrying no sign information
//! about the refined bounds.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use thiserror::Error;

use crate::moments::MomentSet;
use crate::operator::{c64, max_norm, HermitianOperator, OperatorError, QuantumState};

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("gamma vector must not be all zero")]
    AllZero,
    #[error("gamma vector entries must be finite")]
    NotFinite,
}

/// Real coupling coefficients of the three slots of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaVector {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

impl GammaVector {
    pub fn new(g1: f64, g2: f64, g3: f64) -> Result<Self, GammaError> {
        if !(g1.is_finite() && g2.is_finite() && g3.is_finite()) {
            return Err(GammaError::NotFinite);
        }
        if g1 == 0.0 && g2 == 0.0 && g3 == 0.0 {
            return Err(GammaError::AllZero);
        }
        Ok(Self { g1, g2, g3 })
    }

    /// Unit direction `(sin u cos v, sin u sin v, cos u)`. The kernel
    /// condition for `F` is scale-invariant, so searches walk this sphere.
    pub fn from_angles(u: f64, v: f64) -> Self {
        Self {
            g1: u.sin() * v.cos(),
            g2: u.sin() * v.sin(),
            g3: u.cos(),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.g1 * self.g1 + self.g2 * self.g2 + self.g3 * self.g3).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            g1: self.g1 / n,
            g2: self.g2 / n,
            g3: self.g3 / n,
        }
    }
}

pub fn pauli_x() -> Matrix2<Complex64> {
    Matrix2::new(c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.))
}

pub fn pauli_y() -> Matrix2<Complex64> {
    Matrix2::new(c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.))
}

pub fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.))
}

fn pauli_op(m: Matrix2<Complex64>) -> HermitianOperator {
    let dm = DMatrix::from_fn(2, 2, |i, j| m[(i, j)]);
    HermitianOperator::new(dm).expect("pauli matrices are Hermitian")
}

/// `F = γ₁·δA⊗σx + γ₂·δB⊗σy + γ₃·C⊗σz` on the doubled space, system index
/// major. The state enters only through the deviation shifts.
pub fn build_f(
    op_a: &HermitianOperator,
    op_b: &HermitianOperator,
    psi: &QuantumState,
    gamma: &GammaVector,
) -> Result<HermitianOperator, OperatorError> {
    let dev_a = op_a.deviation(psi)?;
    let dev_b = op_b.deviation(psi)?;
    let comm = op_a.commutator(op_b)?;
    build_f_from_parts(&dev_a, &dev_b, &comm, gamma)
}

/// Same construction from pre-shifted parts; used by searches where the
/// shifts are search variables rather than state expectations.
pub fn build_f_from_parts(
    dev_a: &HermitianOperator,
    dev_b: &HermitianOperator,
    comm: &HermitianOperator,
    gamma: &GammaVector,
) -> Result<HermitianOperator, OperatorError> {
    let t1 = dev_a.kron(&pauli_op(pauli_x())).scale(gamma.g1);
    let t2 = dev_b.kron(&pauli_op(pauli_y())).scale(gamma.g2);
    let t3 = comm.kron(&pauli_op(pauli_z())).scale(gamma.g3);
    t1.add(&t2)?.add(&t3)
}

/// Max-norm residual between `F²` and its expansion
/// `γ₁²(δA)² + γ₂²(δB)² + γ₃²C² (each ⊗1) + γ₁γ₂C⊗σz + γ₂γ₃C₂⊗σx − γ₁γ₃C₃⊗σy`.
pub fn expansion_check(
    op_a: &HermitianOperator,
    op_b: &HermitianOperator,
    psi: &QuantumState,
    gamma: &GammaVector,
) -> Result<f64, OperatorError> {
    let dev_a = op_a.deviation(psi)?;
    let dev_b = op_b.deviation(psi)?;
    let comm = op_a.commutator(op_b)?;
    let c2 = dev_b.commutator(&comm)?;
    let c3 = dev_a.commutator(&comm)?;

    let f = build_f_from_parts(&dev_a, &dev_b, &comm, gamma)?;
    let f_sq = f.square();

    let id2 = HermitianOperator::identity(2);
    let expanded = dev_a
        .square()
        .kron(&id2)
        .scale(gamma.g1 * gamma.g1)
        .add(&dev_b.square().kron(&id2).scale(gamma.g2 * gamma.g2))?
        .add(&comm.square().kron(&id2).scale(gamma.g3 * gamma.g3))?
        .add(&comm.kron(&pauli_op(pauli_z())).scale(gamma.g1 * gamma.g2))?
        .add(&c2.kron(&pauli_op(pauli_x())).scale(gamma.g2 * gamma.g3))?
        .add(&c3.kron(&pauli_op(pauli_y())).scale(-gamma.g1 * gamma.g3))?;

    Ok(max_norm(&(f_sq.matrix() - expanded.matrix())))
}

/// Spin-space average `N(γ) = ⟨ψ|F²|ψ⟩`:
/// `(γ₁²a + γ₂²b + γ₃²f)·1 + γ₁γ₂c·σz + γ₂γ₃e·σx − γ₁γ₃d·σy`.
///
/// Its minimum eigenvalue is
/// `γ₁²a + γ₂²b + γ₃²f − √(γ₁²γ₂²c² + γ₂²γ₃²e² + γ₁²γ₃²d²)` and is
/// nonnegative for every genuine moment set.
pub fn spin_matrix_n(m: &MomentSet, gamma: &GammaVector) -> HermitianOperator {
    let q = gamma.g1 * gamma.g1 * m.var_a
        + gamma.g2 * gamma.g2 * m.var_b
        + gamma.g3 * gamma.g3 * m.mean_c_sq;
    let zz = gamma.g1 * gamma.g2 * m.mean_c;
    let xx = gamma.g2 * gamma.g3 * m.mean_c2;
    let yy = -gamma.g1 * gamma.g3 * m.mean_c3;
    let mat = Matrix2::identity().map(|z: Complex64| z * q)
        + pauli_z().map(|z| z * zz)
        + pauli_x().map(|z| z * xx)
        + pauli_y().map(|z| z * yy);
    pauli_op(mat)
}

/// The 6×6 matrix, its two decoupled 3×3 sectors and determinants.
#[derive(Debug, Clone)]
pub struct GramAssembly {
    /// Blocks `diag(a·1, b·1, f·1)` with off-diagonal `(½c)σz`, `(−½d)σy`,
    /// `(½e)σx`, slot index major.
    pub m6: DMatrix<Complex64>,
    /// Rows/columns `{1↑, 2↑, 3↓}` of `m6`.
    pub sector_plus: DMatrix<Complex64>,
    /// Rows/columns `{1↓, 2↓, 3↑}` of `m6`.
    pub sector_minus: DMatrix<Complex64>,
    /// The printed 3×3 form `[a, −c/2, −i d/2; −c/2, b, e/2; i d/2, e/2, f]`.
    pub m2: DMatrix<Complex64>,
    pub det_m6: f64,
    pub det_m2: f64,
    pub det_plus: f64,
    pub det_minus: f64,
    pub moments: MomentSet,
}

const SECTOR_PLUS: [usize; 3] = [0, 2, 5];
const SECTOR_MINUS: [usize; 3] = [1, 3, 4];

fn submatrix(m: &DMatrix<Complex64>, idx: &[usize; 3]) -> DMatrix<Complex64> {
    DMatrix::from_fn(3, 3, |i, j| m[(idx[i], idx[j])])
}

fn real_det(m: &DMatrix<Complex64>) -> f64 {
    let det = m.clone().determinant();
    debug_assert!(
        det.im.abs() <= 1e-8 * det.norm().max(1.0),
        "determinant of a Hermitian matrix must be real, got {det}"
    );
    det.re
}

/// Builds the 6×6 matrix from a moment set, splits it into the two sectors
/// under which it is block-diagonal, and evaluates all four determinants.
pub fn assemble_m6(m: &MomentSet) -> GramAssembly {
    let blocks: [[Matrix2<Complex64>; 3]; 3] = {
        let ident = Matrix2::identity();
        let b11 = ident.map(|z: Complex64| z * m.var_a);
        let b22 = ident.map(|z: Complex64| z * m.var_b);
        let b33 = ident.map(|z: Complex64| z * m.mean_c_sq);
        let b12 = pauli_z().map(|z| z * (0.5 * m.mean_c));
        let b13 = pauli_y().map(|z| z * (-0.5 * m.mean_c3));
        let b23 = pauli_x().map(|z| z * (0.5 * m.mean_c2));
        [[b11, b12, b13], [b12, b22, b23], [b13, b23, b33]]
    };
    let m6 = DMatrix::from_fn(6, 6, |r, c| blocks[r / 2][c / 2][(r % 2, c % 2)]);

    let sector_plus = submatrix(&m6, &SECTOR_PLUS);
    let sector_minus = submatrix(&m6, &SECTOR_MINUS);
    let m2 = DMatrix::from_row_slice(
        3,
        3,
        &[
            c64(m.var_a, 0.0),
            c64(-0.5 * m.mean_c, 0.0),
            c64(0.0, -0.5 * m.mean_c3),
            c64(-0.5 * m.mean_c, 0.0),
            c64(m.var_b, 0.0),
            c64(0.5 * m.mean_c2, 0.0),
            c64(0.0, 0.5 * m.mean_c3),
            c64(0.5 * m.mean_c2, 0.0),
            c64(m.mean_c_sq, 0.0),
        ],
    );

    GramAssembly {
        det_m6: real_det(&m6),
        det_m2: real_det(&m2),
        det_plus: real_det(&sector_plus),
        det_minus: real_det(&sector_minus),
        m6,
        sector_plus,
        sector_minus,
        m2,
        moments: m.clone(),
    }
}

/// Closed form `det M₂ = a·b·f − a·e²/4 − c²·f/4 − b·d²/4`.
pub fn det_m2_closed_form(m: &MomentSet) -> f64 {
    m.var_a * m.var_b * m.mean_c_sq
        - 0.25 * m.var_a * m.mean_c2 * m.mean_c2
        - 0.25 * m.mean_c * m.mean_c * m.mean_c_sq
        - 0.25 * m.var_b * m.mean_c3 * m.mean_c3
}

/// One labelled principal-minor value.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorValue {
    pub id: &'static str,
    pub value: f64,
    /// Whether nonnegativity of this minor is proven or an empirical
    /// question.
    pub proven: bool,
}

/// The three proven second-order minors plus the conjectured-sign `det M₂`.
pub fn minor_report(assembly: &GramAssembly) -> Vec<MinorValue> {
    let m = &assembly.moments;
    vec![
        MinorValue {
            id: "minor_ab",
            value: m.var_a * m.var_b - 0.25 * m.mean_c * m.mean_c,
            proven: true,
        },
        MinorValue {
            id: "minor_af",
            value: m.var_a * m.mean_c_sq - 0.25 * m.mean_c3 * m.mean_c3,
            proven: true,
        },
        MinorValue {
            id: "minor_bf",
            value: m.var_b * m.mean_c_sq - 0.25 * m.mean_c2 * m.mean_c2,
            proven: true,
        },
        MinorValue {
            id: "det_m2",
            value: assembly.det_m2,
            proven: false,
        },
    ]
}
