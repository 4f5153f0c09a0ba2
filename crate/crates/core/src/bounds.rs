//! Inequality evaluators and the per-run report.
//!
//! Each evaluator turns a [`MomentSet`] into a [`BoundValue`] carrying both
//! sides, the margin and a fixed proven/conjectured status. The status table
//! is not data-dependent: the Robertson bound and the two auxiliary
//! third-order bounds follow from the Cauchy–Schwarz argument, while the
//! refined family rests on a positivity claim for the full 6×6 moment
//! matrix that the search facilities of this crate falsify on specific
//! states. Reports must therefore never present the refined family as
//! theorems, and a negative margin on them is data, not an error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moments::{extract_moments, MomentSet};
use crate::operator::{HermitianOperator, OperatorError, QuantumState};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("mean kinetic energy must be positive, got {0}")]
    NonpositiveEnergy(f64),
    #[error("mean momentum is zero; the effective-time form is undefined")]
    ZeroMomentum,
    #[error("degenerate commutator: <C^2> = {0:.3e} is below threshold")]
    DegenerateCommutator(f64),
}

/// Stable identifiers for every implemented inequality. The serialized
/// strings are part of the CLI and file-format contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    Robertson,
    AuxA,
    AuxB,
    Refined,
    Triple,
    Root,
    KineticPosition,
    EffectiveTimePrinted,
    EffectiveTimeDerived,
}

impl InequalityId {
    pub const ALL: [InequalityId; 9] = [
        InequalityId::Robertson,
        InequalityId::AuxA,
        InequalityId::AuxB,
        InequalityId::Refined,
        InequalityId::Triple,
        InequalityId::Root,
        InequalityId::KineticPosition,
        InequalityId::EffectiveTimePrinted,
        InequalityId::EffectiveTimeDerived,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::Robertson => "robertson",
            InequalityId::AuxA => "aux_a",
            InequalityId::AuxB => "aux_b",
            InequalityId::Refined => "refined",
            InequalityId::Triple => "triple",
            InequalityId::Root => "root",
            InequalityId::KineticPosition => "kinetic_position",
            InequalityId::EffectiveTimePrinted => "effective_time_printed",
            InequalityId::EffectiveTimeDerived => "effective_time_derived",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.as_str() == s)
    }

    pub fn status(&self) -> BoundStatus {
        match self {
            InequalityId::Robertson | InequalityId::AuxA | InequalityId::AuxB => {
                BoundStatus::Proven
            }
            _ => BoundStatus::Conjectured,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Proven,
    Conjectured,
}

/// One evaluated inequality: `margin = lhs − rhs` exactly as computed, and
/// `saturated` when `|margin|` sits within the saturation window relative to
/// the moment scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub saturated: bool,
    pub status: BoundStatus,
}

impl BoundValue {
    fn new(id: InequalityId, lhs: f64, rhs: f64, scale: f64, tol: &Tolerances) -> Self {
        let margin = lhs - rhs;
        Self {
            id,
            lhs,
            rhs,
            margin,
            saturated: margin.abs() <= tol.saturation * scale,
            status: id.status(),
        }
    }
}

/// `Var(A)·Var(B) ≥ ¼⟨C⟩²`.
pub fn robertson(m: &MomentSet, tol: &Tolerances) -> BoundValue {
    BoundValue::new(
        InequalityId::Robertson,
        m.var_a * m.var_b,
        0.25 * m.mean_c * m.mean_c,
        m.scale,
        tol,
    )
}

/// The third-order pair: `⟨C²⟩·Var(A) ≥ ¼⟨C₃⟩²` and `⟨C²⟩·Var(B) ≥ ¼⟨C₂⟩²`.
/// Both are proven (Robertson on `(A, C)` resp. `(B, C)` plus `⟨C²⟩ ≥ Var C`).
pub fn aux_bounds(m: &MomentSet, tol: &Tolerances) -> (BoundValue, BoundValue) {
    let first = BoundValue::new(
        InequalityId::AuxA,
        m.mean_c_sq * m.var_a,
        0.25 * m.mean_c3 * m.mean_c3,
        m.scale,
        tol,
    );
    let second = BoundValue::new(
        InequalityId::AuxB,
        m.mean_c_sq * m.var_b,
        0.25 * m.mean_c2 * m.mean_c2,
        m.scale,
        tol,
    );
    (first, second)
}

/// The refined product bound
/// `Var(A)·Var(B) ≥ ¼[⟨C⟩² + ⟨C₂⟩²Var(A)/⟨C²⟩ + ⟨C₃⟩²Var(B)/⟨C²⟩]`.
///
/// When `⟨C²⟩` is degenerate the commutator annihilates the state, the
/// division-bearing terms are vacuous and the right side falls back to the
/// Robertson form.
pub fn refined(m: &MomentSet, tol: &Tolerances) -> BoundValue {
    let lhs = m.var_a * m.var_b;
    let rhs = if m.degenerate_commutator(tol) {
        0.25 * m.mean_c * m.mean_c
    } else {
        0.25 * (m.mean_c * m.mean_c
            + m.var_a * m.mean_c2 * m.mean_c2 / m.mean_c_sq
            + m.var_b * m.mean_c3 * m.mean_c3 / m.mean_c_sq)
    };
    BoundValue::new(InequalityId::Refined, lhs, rhs, m.scale, tol)
}

/// The `⟨C²⟩`-multiplied margin
/// `Var(A)·Var(B)·⟨C²⟩ − ¼[⟨C⟩²⟨C²⟩ + ⟨C₂⟩²Var(A) + ⟨C₃⟩²Var(B)]`,
/// equal to the determinant of the 3×3 sector matrix.
pub fn triple_margin(m: &MomentSet) -> f64 {
    m.var_a * m.var_b * m.mean_c_sq
        - 0.25
            * (m.mean_c * m.mean_c * m.mean_c_sq
                + m.var_a * m.mean_c2 * m.mean_c2
                + m.var_b * m.mean_c3 * m.mean_c3)
}

/// [`triple_margin`] packaged as a bound.
pub fn triple(m: &MomentSet, tol: &Tolerances) -> BoundValue {
    BoundValue::new(
        InequalityId::Triple,
        m.var_a * m.var_b * m.mean_c_sq,
        0.25 * (m.mean_c * m.mean_c * m.mean_c_sq
            + m.var_a * m.mean_c2 * m.mean_c2
            + m.var_b * m.mean_c3 * m.mean_c3),
        m.scale,
        tol,
    )
}

/// Root form: `√(Var(A)·Var(B)) ≥ [|⟨C₂⟩⟨C₃⟩| + √(⟨C₂⟩²⟨C₃⟩² + 4⟨C²⟩²⟨C⟩²)] / (4⟨C²⟩)`.
pub fn root_form(m: &MomentSet, tol: &Tolerances) -> Result<BoundValue, BoundError> {
    if m.degenerate_commutator(tol) {
        return Err(BoundError::DegenerateCommutator(m.mean_c_sq));
    }
    let lhs = (m.var_a * m.var_b).sqrt();
    let de = (m.mean_c2 * m.mean_c3).abs();
    let rhs = (de
        + (de * de + 4.0 * m.mean_c_sq * m.mean_c_sq * m.mean_c * m.mean_c).sqrt())
        / (4.0 * m.mean_c_sq);
    Ok(BoundValue::new(InequalityId::Root, lhs, rhs, m.scale, tol))
}

/// State moments of the truncated oscillator needed by the kinetic-energy
/// specializations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorMoments {
    pub mean_p: f64,
    pub var_p: f64,
    pub mean_kinetic: f64,
    pub var_kinetic: f64,
    pub var_x: f64,
}

impl OscillatorMoments {
    /// Moment-set mapping of the kinetic/coordinate pair:
    /// `⟨C⟩ = ħ⟨p⟩`, `⟨C²⟩ = 2ħ²⟨E_kin⟩`, `⟨C₂⟩ = −ħ²`, `⟨C₃⟩ = 0`.
    pub fn scale(&self, hbar: f64) -> f64 {
        [
            self.var_kinetic,
            self.var_x,
            hbar * self.mean_p,
            2.0 * hbar * hbar * self.mean_kinetic,
            hbar * hbar,
        ]
        .into_iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Kinetic-energy/coordinate bound
/// `Var(E_kin)·Var(x) ≥ (ħ²/4)⟨p⟩² + (ħ²/8)·Var(E_kin)/⟨E_kin⟩`.
pub fn kinetic_position_bound(
    osc: &OscillatorMoments,
    hbar: f64,
    tol: &Tolerances,
) -> Result<BoundValue, BoundError> {
    if osc.mean_kinetic <= 0.0 {
        return Err(BoundError::NonpositiveEnergy(osc.mean_kinetic));
    }
    let lhs = osc.var_kinetic * osc.var_x;
    let rhs = 0.25 * hbar * hbar * osc.mean_p * osc.mean_p
        + 0.125 * hbar * hbar * osc.var_kinetic / osc.mean_kinetic;
    Ok(BoundValue::new(
        InequalityId::KineticPosition,
        lhs,
        rhs,
        osc.scale(hbar),
        tol,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectiveTimeMode {
    /// The variant with `Var(p)·⟨p⟩²` in the denominator.
    AsPrinted,
    /// Denominator `2⟨E_kin⟩·⟨p⟩²`, obtained by dividing the
    /// kinetic-position bound by `⟨p⟩²`.
    AsDerived,
}

/// Effective-time form with `(δt)² = Var(x)/⟨p⟩²`. The two modes differ in
/// the right-hand denominator; reports carry both rather than choosing.
pub fn effective_time_bound(
    osc: &OscillatorMoments,
    hbar: f64,
    mode: EffectiveTimeMode,
    tol: &Tolerances,
) -> Result<BoundValue, BoundError> {
    let p_sq = osc.mean_p * osc.mean_p;
    if p_sq <= 1e-24 * osc.var_p.max(1.0) {
        return Err(BoundError::ZeroMomentum);
    }
    let dt_sq = osc.var_x / p_sq;
    let lhs = osc.var_kinetic * dt_sq;
    let quarter = 0.25 * hbar * hbar;
    let (id, rhs) = match mode {
        EffectiveTimeMode::AsPrinted => {
            let term = if osc.var_kinetic == 0.0 {
                0.0
            } else {
                quarter * osc.var_kinetic / (osc.var_p * p_sq)
            };
            (InequalityId::EffectiveTimePrinted, quarter + term)
        }
        EffectiveTimeMode::AsDerived => {
            if osc.mean_kinetic <= 0.0 {
                return Err(BoundError::NonpositiveEnergy(osc.mean_kinetic));
            }
            let term = 0.125 * hbar * hbar * osc.var_kinetic / (osc.mean_kinetic * p_sq);
            (InequalityId::EffectiveTimeDerived, quarter + term)
        }
    };
    Ok(BoundValue::new(id, lhs, rhs, osc.scale(hbar), tol))
}

/// Options for [`full_report`].
#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    pub tolerances: Tolerances,
    /// Present when the scenario provides oscillator moments; enables the
    /// kinetic/effective-time specializations.
    pub oscillator: Option<OscillatorMoments>,
    pub hbar: f64,
    /// Restrict the report to these ids; `None` evaluates everything
    /// applicable.
    pub evaluate: Option<Vec<InequalityId>>,
    /// Notes threaded in from model construction (truncation warnings etc.).
    pub notes: Vec<String>,
}

impl ReportOptions {
    pub fn new() -> Self {
        Self {
            tolerances: Tolerances::default(),
            oscillator: None,
            hbar: 1.0,
            evaluate: None,
            notes: Vec::new(),
        }
    }

    fn wants(&self, id: InequalityId) -> bool {
        self.evaluate.as_ref().is_none_or(|list| list.contains(&id))
    }
}

/// Evaluated bounds for one `(A, B, ψ)` triple, with the moments they came
/// from and any fallback or truncation notes. Holds at most one entry per
/// inequality id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub moments: MomentSet,
    pub bounds: Vec<BoundValue>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn get(&self, id: InequalityId) -> Option<&BoundValue> {
        self.bounds.iter().find(|b| b.id == id)
    }
}

/// Runs [`extract_moments`] and every applicable evaluator.
pub fn full_report(
    op_a: &HermitianOperator,
    op_b: &HermitianOperator,
    psi: &QuantumState,
    options: &ReportOptions,
) -> Result<BoundReport, OperatorError> {
    let m = extract_moments(op_a, op_b, psi)?;
    let tol = &options.tolerances;
    let mut bounds = Vec::new();
    let mut notes = options.notes.clone();

    if options.wants(InequalityId::Robertson) {
        bounds.push(robertson(&m, tol));
    }
    let (aux_a, aux_b) = aux_bounds(&m, tol);
    if options.wants(InequalityId::AuxA) {
        bounds.push(aux_a);
    }
    if options.wants(InequalityId::AuxB) {
        bounds.push(aux_b);
    }
    if options.wants(InequalityId::Refined) {
        if m.degenerate_commutator(tol) {
            notes.push(
                "refined: <C^2> below the degenerate-commutator threshold; \
                 right side fell back to the Robertson form"
                    .to_string(),
            );
        }
        bounds.push(refined(&m, tol));
    }
    if options.wants(InequalityId::Triple) {
        bounds.push(triple(&m, tol));
    }
    if options.wants(InequalityId::Root) {
        match root_form(&m, tol) {
            Ok(b) => bounds.push(b),
            Err(BoundError::DegenerateCommutator(_)) => notes.push(
                "root: skipped, <C^2> below the degenerate-commutator threshold".to_string(),
            ),
            Err(e) => notes.push(format!("root: skipped, {e}")),
        }
    }

    match &options.oscillator {
        Some(osc) => {
            if options.wants(InequalityId::KineticPosition) {
                match kinetic_position_bound(osc, options.hbar, tol) {
                    Ok(b) => bounds.push(b),
                    Err(e) => notes.push(format!("kinetic_position: skipped, {e}")),
                }
            }
            let mut time_bounds_reported = false;
            for mode in [EffectiveTimeMode::AsPrinted, EffectiveTimeMode::AsDerived] {
                let id = match mode {
                    EffectiveTimeMode::AsPrinted => InequalityId::EffectiveTimePrinted,
                    EffectiveTimeMode::AsDerived => InequalityId::EffectiveTimeDerived,
                };
                if options.wants(id) {
                    match effective_time_bound(osc, options.hbar, mode, tol) {
                        Ok(b) => {
                            bounds.push(b);
                            time_bounds_reported = true;
                        }
                        Err(BoundError::ZeroMomentum) => notes.push(format!(
                            "{}: skipped, mean momentum is zero",
                            id.as_str()
                        )),
                        Err(e) => notes.push(format!("{}: skipped, {e}", id.as_str())),
                    }
                }
            }
            if time_bounds_reported {
                notes.push(
                    "effective_time: the printed right side uses Var(p)*<p>^2 in the \
                     denominator; the derived variant divides the kinetic-position bound \
                     by <p>^2 instead; both are reported"
                        .to_string(),
                );
            }
        }
        None => {
            for id in [
                InequalityId::KineticPosition,
                InequalityId::EffectiveTimePrinted,
                InequalityId::EffectiveTimeDerived,
            ] {
                if options
                    .evaluate
                    .as_ref()
                    .is_some_and(|list| list.contains(&id))
                {
                    notes.push(format!(
                        "{}: skipped, scenario provides no oscillator moments",
                        id.as_str()
                    ));
                }
            }
        }
    }

    Ok(BoundReport {
        moments: m,
        bounds,
        notes,
    })
}
