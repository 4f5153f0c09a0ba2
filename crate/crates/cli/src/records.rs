//! On-disk document schemas: run records, sweep specs, search specs and
//! search records. All documents carry `schema_version: 1` and serialize
//! numbers as plain decimal doubles.

use serde::{Deserialize, Serialize};

use uncbench_core::bounds::BoundReport;
use uncbench_core::models::{ModelKind, ModelParams, ScenarioSpec};
use uncbench_core::search::{FamilySpec, SearchResult};
use uncbench_core::{QuantumState, Spinor};

pub const SCHEMA_VERSION: u32 = 1;

pub fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Versions {
    pub tool: String,
    pub schema: String,
}

impl Versions {
    pub fn current() -> Self {
        Self {
            tool: env!("CARGO_PKG_VERSION").to_string(),
            schema: SCHEMA_VERSION.to_string(),
        }
    }
}

/// Output document of `uncbench report`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub versions: Versions,
    pub timestamp: String,
    pub seed: u64,
    pub spec: ScenarioSpec,
    pub report: BoundReport,
}

/// Input document of `uncbench sweep`: one scenario plus exactly one swept
/// parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub scenario: ScenarioSpec,
    pub sweep: SweepRange,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    /// One of `theta`, `phi` (bloch states), `re`, `im` (coherent states)
    /// or `hbar` (oscillator model).
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// Input document of `uncbench search`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSpec {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    #[serde(flatten)]
    pub kind: SearchKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "search", rename_all = "snake_case")]
pub enum SearchKind {
    /// Minimize the margin of one inequality over a registered family.
    Violation {
        family: FamilySpec,
        inequality: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        refine_iters: Option<usize>,
    },
    /// Seek a product kernel state of the spin-extended operator for a
    /// model pair.
    Saturation {
        model: ModelKind,
        #[serde(default)]
        params: ModelParams,
        pair: (String, String),
        #[serde(default, skip_serializing_if = "Option::is_none")]
        multi_start: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_grid: Option<(usize, usize)>,
    },
}

/// Machine-readable search status. Violations are never silent: a certified
/// negative margin is reported both here and through exit code 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    ViolationCertified,
    NoViolation,
    Completed,
    NotConverged,
}

/// Output document of `uncbench search`. Deliberately timestamp-free so
/// identical seeds give byte-identical documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchRecord {
    pub schema_version: u32,
    pub versions: Versions,
    pub seed: u64,
    pub spec: SearchSpec,
    pub status: SearchStatus,
    pub result: SearchResultJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResultJson {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub best_state: StateJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spinor: Option<[[f64; 2]; 2]>,
    pub iterations: u64,
    pub seed: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    /// Amplitudes as `[re, im]` pairs.
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&QuantumState> for StateJson {
    fn from(psi: &QuantumState) -> Self {
        Self {
            dim: psi.dim(),
            amplitudes: psi.vector().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

fn spinor_json(chi: &Spinor) -> [[f64; 2]; 2] {
    [
        [chi.up().re, chi.up().im],
        [chi.down().re, chi.down().im],
    ]
}

impl From<&SearchResult> for SearchResultJson {
    fn from(r: &SearchResult) -> Self {
        Self {
            best_params: r.best_params.clone(),
            best_value: r.best_value,
            best_state: StateJson::from(&r.best_state),
            gamma: r.gamma.as_ref().map(|g| [g.g1, g.g2, g.g3]),
            spinor: r.spinor.as_ref().map(spinor_json),
            iterations: r.iterations,
            seed: r.seed,
            converged: r.converged,
        }
    }
}
