//! Numerical workbench for commutator-based uncertainty bounds on
//! finite-dimensional Hilbert spaces.
//!
//! The crate provides dense Hermitian operator arithmetic, extraction of
//! commutator moments, evaluators for the Robertson bound and its
//! third-order refinements, the spin-extended 6×6 moment matrix with its
//! sector decomposition, truncated oscillator and spin models, and
//! optimization-based searches for saturating states and counterexamples.

pub mod bounds;
pub mod gram;
pub mod models;
pub mod moments;
pub mod operator;
pub mod sampling;
pub mod search;
pub mod selftest;
pub mod tol;

pub use bounds::{
    aux_bounds, full_report, kinetic_position_bound, refined, robertson, root_form, triple,
    triple_margin, BoundReport, BoundStatus, BoundValue, EffectiveTimeMode, InequalityId,
    OscillatorMoments, ReportOptions,
};
pub use gram::{assemble_m6, build_f, expansion_check, minor_report, spin_matrix_n, GammaVector,
    GramAssembly};
pub use moments::{extract_moments, MomentSet};
pub use operator::{c64, HermitianOperator, OperatorError, QuantumState, Spinor};
pub use search::{eq2_residual, saturation_search, violation_search, FamilySpec, SearchError,
    SearchOptions, SearchResult, ViolationOutcome};
pub use tol::Tolerances;
