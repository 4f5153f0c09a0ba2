//! Extraction of the scalar moment set that feeds every bound evaluator.
//!
//! For a pair `(A, B)` and a state `ψ` the relevant operators are the
//! commutator `C = i[A, B]` and the third-order commutators
//! `C₂ = i[δB, C]`, `C₃ = i[δA, C]` built from deviation operators. Note
//! that `⟨C⟩²` and `⟨C²⟩` are distinct quantities; both are carried.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::{HermitianOperator, OperatorError, QuantumState};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("moment set rejected: {0}")]
    Invalid(String),
}

/// The six scalars used by the inequalities plus diagnostic covariances.
///
/// `var_a = ⟨(δA)²⟩`, `var_b = ⟨(δB)²⟩`, `mean_c = ⟨C⟩`, `mean_c_sq = ⟨C²⟩`,
/// `mean_c2 = ⟨C₂⟩`, `mean_c3 = ⟨C₃⟩`. The symmetrized covariances
/// `cov_xy = ½⟨{δX, δY}⟩` are diagnostics only: no implemented bound uses
/// them, but they explain observed negative margins of the conjectured
/// bounds in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub var_a: f64,
    pub var_b: f64,
    pub mean_c: f64,
    pub mean_c_sq: f64,
    pub mean_c2: f64,
    pub mean_c3: f64,
    pub var_c: f64,
    pub cov_ab: f64,
    pub cov_ac: f64,
    pub cov_bc: f64,
    /// Largest magnitude among the six primary scalars, used for relative
    /// tolerances downstream.
    pub scale: f64,
}

impl MomentSet {
    /// Builds a moment set from the six primary scalars, with `var_c`
    /// derived and covariances zeroed. Rejects combinations no state can
    /// produce.
    pub fn from_raw(
        var_a: f64,
        var_b: f64,
        mean_c: f64,
        mean_c_sq: f64,
        mean_c2: f64,
        mean_c3: f64,
    ) -> Result<Self, MomentError> {
        let scale = Self::scale_of(var_a, var_b, mean_c, mean_c_sq, mean_c2, mean_c3);
        let slack = 1e-10 * scale;
        if var_a < -slack || var_b < -slack || mean_c_sq < -slack {
            return Err(MomentError::Invalid(format!(
                "variances and <C^2> must be nonnegative: {var_a}, {var_b}, {mean_c_sq}"
            )));
        }
        if mean_c_sq < mean_c * mean_c - slack {
            return Err(MomentError::Invalid(format!(
                "<C^2> = {mean_c_sq} below <C>^2 = {}",
                mean_c * mean_c
            )));
        }
        Ok(Self {
            var_a,
            var_b,
            mean_c,
            mean_c_sq,
            mean_c2,
            mean_c3,
            var_c: mean_c_sq - mean_c * mean_c,
            cov_ab: 0.0,
            cov_ac: 0.0,
            cov_bc: 0.0,
            scale,
        })
    }

    fn scale_of(a: f64, b: f64, c: f64, f: f64, e: f64, d: f64) -> f64 {
        [a, b, c, f, e, d]
            .into_iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// True when `⟨C²⟩` sits below the degenerate-commutator threshold; the
    /// division-bearing bounds are vacuous in that regime.
    pub fn degenerate_commutator(&self, tol: &Tolerances) -> bool {
        self.mean_c_sq <= tol.degenerate_commutator * self.scale
    }
}

/// Computes the full moment set for `(A, B, ψ)`.
///
/// The scalar formulas run on matrix-vector products: with `u = δA ψ`,
/// `v = δB ψ`, `w = C ψ` one has `⟨C₂⟩ = −2 Im(v†w)` and `⟨C₃⟩ = −2 Im(u†w)`,
/// which is the deviation-operator form of the third-order commutators. The
/// equality with the full operator composition is exercised by tests, not
/// assumed.
pub fn extract_moments(
    op_a: &HermitianOperator,
    op_b: &HermitianOperator,
    psi: &QuantumState,
) -> Result<MomentSet, OperatorError> {
    if op_a.dim() != op_b.dim() {
        return Err(OperatorError::DimMismatch {
            left: op_a.dim(),
            right: op_b.dim(),
        });
    }
    let comm = op_a.commutator(op_b)?;

    let u = op_a.deviation_apply(psi)?;
    let v = op_b.deviation_apply(psi)?;
    let w = comm.apply(psi)?;

    let var_a = u.norm_squared();
    let var_b = v.norm_squared();
    let mean_c = comm.expectation(psi)?;
    let mean_c_sq = w.norm_squared();
    let mean_c2 = -2.0 * v.dotc(&w).im;
    let mean_c3 = -2.0 * u.dotc(&w).im;

    let cov_ab = u.dotc(&v).re;
    let cov_ac = u.dotc(&w).re - mean_c * u.dotc(psi.vector()).re;
    let cov_bc = v.dotc(&w).re - mean_c * v.dotc(psi.vector()).re;

    let scale = MomentSet::scale_of(var_a, var_b, mean_c, mean_c_sq, mean_c2, mean_c3);
    debug_assert!(mean_c_sq >= mean_c * mean_c - 1e-10 * scale);

    Ok(MomentSet {
        var_a,
        var_b,
        mean_c,
        mean_c_sq,
        mean_c2,
        mean_c3,
        var_c: mean_c_sq - mean_c * mean_c,
        cov_ab,
        cov_ac,
        cov_bc,
        scale,
    })
}
