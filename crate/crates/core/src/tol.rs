//! Named tolerances shared by evaluators, models and searches.

use serde::{Deserialize, Serialize};

/// Runtime tolerances. Each field is multiplied by the relevant scale at the
/// point of use; see the individual consumers for the scale convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative half-width of the saturation window on bound margins.
    pub saturation: f64,
    /// Relative threshold on `⟨C²⟩` below which the commutator is treated as
    /// degenerate and refined bounds fall back to the Robertson form.
    pub degenerate_commutator: f64,
    /// Absolute cap on the pre-normalization weight of the top two basis
    /// levels of a truncated state.
    pub leakage: f64,
    /// Relative margin threshold below which a negative margin counts as a
    /// violation candidate.
    pub violation: f64,
    /// Relative tolerance for re-verifying a search result through the full
    /// evaluator path.
    pub reverify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            saturation: 1e-9,
            degenerate_commutator: 1e-12,
            leakage: 1e-10,
            violation: 1e-9,
            reverify: 1e-10,
        }
    }
}

impl Tolerances {
    /// Uniformly rescaled copy (used by the `UNCBENCH_TOL_SCALE` knob).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            saturation: self.saturation * factor,
            degenerate_commutator: self.degenerate_commutator * factor,
            leakage: self.leakage * factor,
            violation: self.violation * factor,
            reverify: self.reverify * factor,
        }
    }

    /// All entries must be finite and strictly positive.
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("saturation", self.saturation),
            ("degenerate_commutator", self.degenerate_commutator),
            ("leakage", self.leakage),
            ("violation", self.violation),
            ("reverify", self.reverify),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(format!("tolerance `{name}` must be finite and positive, got {v}"));
            }
        }
        Ok(())
    }
}
