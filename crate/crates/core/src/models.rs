//! Concrete operator families: the truncated harmonic oscillator and spin-j
//! angular momentum, plus declarative scenario construction.
//!
//! Oscillator convention: mass and frequency are fixed at 1 and only ħ is a
//! knob, so `E_kin = p²/2` with `x = √(ħ/2)(a + a†)`, `p = i√(ħ/2)(a† − a)`.
//! The kinetic energy is formed by squaring the *truncated* `p` matrix,
//! which keeps it consistent with the commutators actually evaluated;
//! states must stay away from the truncation edge, which the leakage gate
//! enforces (p² couples level k to k±2, so the top two levels control the
//! moment error).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::OscillatorMoments;
use crate::operator::{c64, HermitianOperator, OperatorError, QuantumState};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("oscillator truncation must be at least 4, got {0}")]
    TruncationTooSmall(usize),
    #[error("hbar must be positive and finite, got {0}")]
    BadHbar(f64),
    #[error("basis index {index} out of range for truncation {n_trunc}")]
    IndexOutOfRange { index: usize, n_trunc: usize },
    #[error(
        "coherent state leaks {top_weight:.3e} onto the top two levels (threshold {threshold:.3e}); increase n_trunc"
    )]
    ExcessiveLeakage { top_weight: f64, threshold: f64 },
    #[error("spin j must be a half-integer with 2j >= 1, got {0}")]
    BadSpin(f64),
    #[error("unknown operator `{name}` for model `{model}`")]
    UnknownOperator { name: String, model: &'static str },
    #[error("state `{state}` is not defined for model `{model}`")]
    StateModelMismatch { state: &'static str, model: &'static str },
    #[error("missing parameter `{0}`")]
    MissingParam(&'static str),
    #[error("invalid parameter `{name}`: {reason}")]
    BadParam { name: &'static str, reason: String },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Probability mass a truncated expansion leaves on the top two basis
/// levels, measured before renormalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageMetric {
    pub top_weight: f64,
}

/// Truncated harmonic oscillator with its standard operator set.
#[derive(Debug, Clone)]
pub struct OscillatorModel {
    n_trunc: usize,
    hbar: f64,
    x: HermitianOperator,
    p: HermitianOperator,
    e_kin: HermitianOperator,
    number: HermitianOperator,
}

/// Lowering operator with entries `√k` at `(k−1, k)`.
fn ladder(n: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = c64((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn oscillator(n_trunc: usize, hbar: f64) -> Result<OscillatorModel, ModelError> {
    if n_trunc < 4 {
        return Err(ModelError::TruncationTooSmall(n_trunc));
    }
    if !hbar.is_finite() || hbar <= 0.0 {
        return Err(ModelError::BadHbar(hbar));
    }
    let a = ladder(n_trunc);
    let coef = (hbar / 2.0).sqrt();
    let x = HermitianOperator::new((&a + a.adjoint()).scale(coef))?.with_unit("length");
    let p = HermitianOperator::new((a.adjoint() - &a).scale(coef) * c64(0.0, 1.0))?
        .with_unit("momentum");
    let e_kin = p.square().scale(0.5).with_unit("energy");
    let number = HermitianOperator::new(a.adjoint() * &a)?.with_unit("count");
    Ok(OscillatorModel {
        n_trunc,
        hbar,
        x,
        p,
        e_kin,
        number,
    })
}

impl OscillatorModel {
    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn x(&self) -> &HermitianOperator {
        &self.x
    }

    pub fn p(&self) -> &HermitianOperator {
        &self.p
    }

    pub fn e_kin(&self) -> &HermitianOperator {
        &self.e_kin
    }

    pub fn number(&self) -> &HermitianOperator {
        &self.number
    }

    pub fn operator(&self, name: &str) -> Result<&HermitianOperator, ModelError> {
        match name {
            "x" => Ok(&self.x),
            "p" => Ok(&self.p),
            "e_kin" => Ok(&self.e_kin),
            "number" => Ok(&self.number),
            _ => Err(ModelError::UnknownOperator {
                name: name.to_string(),
                model: "oscillator",
            }),
        }
    }

    /// The oscillator state moments consumed by the kinetic-energy bounds.
    pub fn state_moments(&self, psi: &QuantumState) -> Result<OscillatorMoments, ModelError> {
        Ok(OscillatorMoments {
            mean_p: self.p.expectation(psi)?,
            var_p: self.p.variance(psi)?,
            mean_kinetic: self.e_kin.expectation(psi)?,
            var_kinetic: self.e_kin.variance(psi)?,
            var_x: self.x.variance(psi)?,
        })
    }
}

/// Number eigenstate `|k⟩`.
pub fn fock_state(model: &OscillatorModel, k: usize) -> Result<QuantumState, ModelError> {
    if k >= model.n_trunc {
        return Err(ModelError::IndexOutOfRange {
            index: k,
            n_trunc: model.n_trunc,
        });
    }
    Ok(QuantumState::basis(model.n_trunc, k)?)
}

/// Truncated coherent expansion `e^{−|α|²/2} Σ αᵏ/√k! |k⟩`, renormalized.
///
/// Fails when the pre-normalization weight on the top two levels exceeds
/// `max_leakage`; `|α|² + 4|α| + 4 ≪ n_trunc` keeps expansions comfortably
/// inside the basis.
pub fn coherent_state_with_leakage_cap(
    model: &OscillatorModel,
    alpha: Complex64,
    max_leakage: f64,
) -> Result<(QuantumState, LeakageMetric), ModelError> {
    let n = model.n_trunc;
    let mut amps = DVector::zeros(n);
    amps[0] = c64((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for k in 1..n {
        amps[k] = amps[k - 1] * alpha / c64((k as f64).sqrt(), 0.0);
    }
    let top_weight = amps[n - 1].norm_sqr() + amps[n - 2].norm_sqr();
    if top_weight > max_leakage {
        return Err(ModelError::ExcessiveLeakage {
            top_weight,
            threshold: max_leakage,
        });
    }
    let state = QuantumState::normalized(amps)?;
    Ok((state, LeakageMetric { top_weight }))
}

pub fn coherent_state(
    model: &OscillatorModel,
    alpha: Complex64,
) -> Result<(QuantumState, LeakageMetric), ModelError> {
    coherent_state_with_leakage_cap(model, alpha, Tolerances::default().leakage)
}

/// Angular-momentum operators for arbitrary half-integer j, dimension 2j+1,
/// ħ = 1 units. Basis ordered by descending magnetic number so index 0 is
/// the highest-weight state.
#[derive(Debug, Clone)]
pub struct SpinModel {
    two_j: u32,
    l_x: HermitianOperator,
    l_y: HermitianOperator,
    l_z: HermitianOperator,
}

pub fn spin(j: f64) -> Result<SpinModel, ModelError> {
    let two_j_f = 2.0 * j;
    let two_j = two_j_f.round();
    if !j.is_finite() || (two_j_f - two_j).abs() > 1e-9 || two_j < 1.0 {
        return Err(ModelError::BadSpin(j));
    }
    let two_j = two_j as u32;
    let dim = two_j as usize + 1;
    let jj = two_j as f64 / 2.0;

    // raising operator: <m+1|L+|m> = sqrt(j(j+1) − m(m+1)), m = j − index
    let mut l_plus = DMatrix::<Complex64>::zeros(dim, dim);
    for idx in 1..dim {
        let m = jj - idx as f64;
        l_plus[(idx - 1, idx)] = c64((jj * (jj + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let l_minus = l_plus.adjoint();
    let l_x = HermitianOperator::new((&l_plus + &l_minus).scale(0.5))?.with_unit("angular momentum");
    let l_y = HermitianOperator::new((&l_plus - &l_minus) * c64(0.0, -0.5))?
        .with_unit("angular momentum");
    let l_z = HermitianOperator::new(DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            c64(jj - r as f64, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    }))?
    .with_unit("angular momentum");
    Ok(SpinModel {
        two_j,
        l_x,
        l_y,
        l_z,
    })
}

impl SpinModel {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn l_x(&self) -> &HermitianOperator {
        &self.l_x
    }

    pub fn l_y(&self) -> &HermitianOperator {
        &self.l_y
    }

    pub fn l_z(&self) -> &HermitianOperator {
        &self.l_z
    }

    pub fn operator(&self, name: &str) -> Result<&HermitianOperator, ModelError> {
        match name {
            "l_x" => Ok(&self.l_x),
            "l_y" => Ok(&self.l_y),
            "l_z" => Ok(&self.l_z),
            _ => Err(ModelError::UnknownOperator {
                name: name.to_string(),
                model: "spin",
            }),
        }
    }
}

/// Rotation of the highest-weight state by polar angles:
/// `e^{iφj}·e^{−iφ L_z}·e^{−iθ L_y}|j, j⟩`, which for j = ½ fixes the phase
/// convention to amplitudes `(cos θ/2, e^{iφ} sin θ/2)`.
pub fn bloch_state(model: &SpinModel, theta: f64, phi: f64) -> QuantumState {
    let dim = model.dim();
    let jj = model.j();
    let highest = QuantumState::basis(dim, 0).expect("dim >= 2");

    let rot_y = unitary_exp(&model.l_y, -theta);
    let mut v = &rot_y * highest.vector();

    // l_z is diagonal, so the azimuthal rotation is entrywise.
    for idx in 0..dim {
        let m = jj - idx as f64;
        v[idx] *= c64(0.0, -phi * m).exp();
    }
    let global = c64(0.0, phi * jj).exp();
    QuantumState::normalized(v.map(|z| z * global)).expect("rotation preserves norm")
}

/// `e^{iθH}` by eigendecomposition of the Hermitian generator.
fn unitary_exp(h: &HermitianOperator, theta: f64) -> DMatrix<Complex64> {
    let eig = h
        .matrix()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .expect("eigendecomposition of a validated Hermitian matrix");
    let n = h.dim();
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let phase = c64(0.0, theta * eig.eigenvalues[k]).exp();
        let col = eig.eigenvectors.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += phase * col[i] * col[j].conj();
            }
        }
    }
    out
}

/// JSON-facing model parameters; unused entries stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_trunc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Oscillator,
    Spin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Fock { k: usize },
    Coherent { re: f64, im: f64 },
    Bloch { theta: f64, phi: f64 },
}

impl StateSpec {
    fn kind(&self) -> &'static str {
        match self {
            StateSpec::Fock { .. } => "fock",
            StateSpec::Coherent { .. } => "coherent",
            StateSpec::Bloch { .. } => "bloch",
        }
    }
}

/// Declarative description of a model, a state, an operator pair and the
/// requested evaluations. This is the schema behind `report` scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub model: ModelKind,
    #[serde(default)]
    pub params: ModelParams,
    pub state: StateSpec,
    pub pair: (String, String),
    /// Inequality ids to evaluate; empty means every applicable one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evaluate: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

fn default_schema_version() -> u32 {
    1
}

/// Optional per-run overrides of the named defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saturation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_commutator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leakage: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: &Tolerances) -> Result<Tolerances, ModelError> {
        let mut out = base.clone();
        for (name, value, slot) in [
            ("tolerances.saturation", self.saturation, &mut out.saturation),
            (
                "tolerances.degenerate_commutator",
                self.degenerate_commutator,
                &mut out.degenerate_commutator,
            ),
            ("tolerances.leakage", self.leakage, &mut out.leakage),
        ] {
            if let Some(v) = value {
                if !v.is_finite() || v <= 0.0 {
                    return Err(ModelError::BadParam {
                        name: Box::leak(name.to_string().into_boxed_str()),
                        reason: format!("must be finite and positive, got {v}"),
                    });
                }
                *slot = v;
            }
        }
        Ok(out)
    }
}

/// A fully built scenario: the operator pair, the state, and metadata
/// threaded into reports.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub op_a: HermitianOperator,
    pub op_b: HermitianOperator,
    pub state: QuantumState,
    pub meta: ScenarioMeta,
}

#[derive(Debug, Clone)]
pub struct ScenarioMeta {
    pub hbar: f64,
    pub leakage: Option<LeakageMetric>,
    pub oscillator: Option<OscillatorMoments>,
    pub notes: Vec<String>,
}

const DEFAULT_N_TRUNC: usize = 32;

/// Resolves a declarative spec against the model registry. Unknown operator
/// or state names are input errors, never defaults.
pub fn scenario(spec: &ScenarioSpec, tol: &Tolerances) -> Result<Scenario, ModelError> {
    match spec.model {
        ModelKind::Oscillator => {
            if spec.params.j.is_some() {
                return Err(ModelError::BadParam {
                    name: "params.j",
                    reason: "not applicable to the oscillator model".to_string(),
                });
            }
            let n_trunc = spec.params.n_trunc.unwrap_or(DEFAULT_N_TRUNC);
            let hbar = spec.params.hbar.unwrap_or(1.0);
            let model = oscillator(n_trunc, hbar)?;
            let mut notes = Vec::new();
            let (state, leakage) = match &spec.state {
                StateSpec::Fock { k } => (fock_state(&model, *k)?, None),
                StateSpec::Coherent { re, im } => {
                    let (s, leak) =
                        coherent_state_with_leakage_cap(&model, c64(*re, *im), tol.leakage)?;
                    notes.push(format!(
                        "truncation: coherent expansion leaves {:.3e} on the top two of {} levels",
                        leak.top_weight, n_trunc
                    ));
                    (s, Some(leak))
                }
                StateSpec::Bloch { .. } => {
                    return Err(ModelError::StateModelMismatch {
                        state: spec.state.kind(),
                        model: "oscillator",
                    });
                }
            };
            let op_a = model.operator(&spec.pair.0)?.clone();
            let op_b = model.operator(&spec.pair.1)?.clone();
            let kinetic_pair = (spec.pair.0 == "e_kin" && spec.pair.1 == "x")
                || (spec.pair.0 == "x" && spec.pair.1 == "e_kin");
            let oscillator_moments = if kinetic_pair {
                Some(model.state_moments(&state)?)
            } else {
                None
            };
            Ok(Scenario {
                op_a,
                op_b,
                state,
                meta: ScenarioMeta {
                    hbar,
                    leakage,
                    oscillator: oscillator_moments,
                    notes,
                },
            })
        }
        ModelKind::Spin => {
            for (name, present) in [
                ("params.n_trunc", spec.params.n_trunc.is_some()),
                ("params.hbar", spec.params.hbar.is_some()),
            ] {
                if present {
                    return Err(ModelError::BadParam {
                        name: Box::leak(name.to_string().into_boxed_str()),
                        reason: "not applicable to the spin model".to_string(),
                    });
                }
            }
            let j = spec.params.j.ok_or(ModelError::MissingParam("params.j"))?;
            let model = spin(j)?;
            let state = match &spec.state {
                StateSpec::Bloch { theta, phi } => bloch_state(&model, *theta, *phi),
                other => {
                    return Err(ModelError::StateModelMismatch {
                        state: other.kind(),
                        model: "spin",
                    });
                }
            };
            let op_a = model.operator(&spec.pair.0)?.clone();
            let op_b = model.operator(&spec.pair.1)?.clone();
            Ok(Scenario {
                op_a,
                op_b,
                state,
                meta: ScenarioMeta {
                    hbar: 1.0,
                    leakage: None,
                    oscillator: None,
                    notes: Vec::new(),
                },
            })
        }
    }
}
