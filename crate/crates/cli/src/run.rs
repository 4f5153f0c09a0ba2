//! Implementations of the four subcommands. Every function returns the
//! process exit code; input and schema problems surface as `CliError` and
//! exit 2, margins and violations are data.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use uncbench_core::bounds::{full_report, InequalityId, ReportOptions};
use uncbench_core::models::{scenario, ModelKind, ScenarioSpec, StateSpec};
use uncbench_core::search::{saturation_search, violation_search, SearchOptions};
use uncbench_core::selftest::run_selftest;
use uncbench_core::Tolerances;

use crate::records::{
    RunRecord, SearchKind, SearchRecord, SearchResultJson, SearchSpec, SweepSpec, Versions,
    SCHEMA_VERSION,
};

#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(format!("io error: {e}"))
    }
}

fn err(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| err(format!("{}: {e}", path.display())))
}

fn check_schema_version(version: u32) -> Result<(), CliError> {
    if version != SCHEMA_VERSION {
        return Err(err(format!(
            "schema_version: expected {SCHEMA_VERSION}, got {version}"
        )));
    }
    Ok(())
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| err(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

/// Seventeen significant digits, locale-independent.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Resolves the effective tolerances: defaults, the `UNCBENCH_TOL_SCALE`
/// multiplier, then per-spec overrides.
fn effective_tolerances(
    spec_overrides: Option<&uncbench_core::models::ToleranceOverrides>,
    tol_scale: f64,
) -> Result<Tolerances, CliError> {
    let base = Tolerances::default().scaled(tol_scale);
    let tol = match spec_overrides {
        Some(ov) => ov.apply(&base).map_err(|e| err(e.to_string()))?,
        None => base,
    };
    tol.validate().map_err(err)?;
    Ok(tol)
}

fn parse_evaluate(list: &[String]) -> Result<Option<Vec<InequalityId>>, CliError> {
    if list.is_empty() {
        return Ok(None);
    }
    let mut ids = Vec::with_capacity(list.len());
    for name in list {
        ids.push(
            InequalityId::parse(name)
                .ok_or_else(|| err(format!("evaluate: unknown inequality id `{name}`")))?,
        );
    }
    Ok(Some(ids))
}

fn report_for(spec: &ScenarioSpec, tol: &Tolerances) -> Result<uncbench_core::bounds::BoundReport, CliError> {
    let built = scenario(spec, tol).map_err(|e| err(e.to_string()))?;
    let mut opts = ReportOptions::new();
    opts.tolerances = tol.clone();
    opts.hbar = built.meta.hbar;
    opts.oscillator = built.meta.oscillator.clone();
    opts.notes = built.meta.notes.clone();
    opts.evaluate = parse_evaluate(&spec.evaluate)?;
    full_report(&built.op_a, &built.op_b, &built.state, &opts).map_err(|e| err(e.to_string()))
}

pub fn cmd_report(
    spec_path: &Path,
    out: Option<&PathBuf>,
    tol_scale: f64,
) -> Result<i32, CliError> {
    let spec: ScenarioSpec = read_json(spec_path)?;
    check_schema_version(spec.schema_version)?;
    let tol = effective_tolerances(spec.tolerances.as_ref(), tol_scale)?;
    let report = report_for(&spec, &tol)?;
    let record = RunRecord {
        schema_version: SCHEMA_VERSION,
        versions: Versions::current(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        seed: 0,
        spec,
        report,
    };
    let json = serde_json::to_string_pretty(&record).expect("record serializes");
    write_output(out, &json)?;
    Ok(0)
}

/// Applies the swept parameter to a copy of the scenario.
fn apply_parameter(
    spec: &ScenarioSpec,
    parameter: &str,
    value: f64,
) -> Result<ScenarioSpec, CliError> {
    let mut out = spec.clone();
    match (parameter, &mut out.state) {
        ("theta", StateSpec::Bloch { theta, .. }) => *theta = value,
        ("phi", StateSpec::Bloch { phi, .. }) => *phi = value,
        ("re", StateSpec::Coherent { re, .. }) => *re = value,
        ("im", StateSpec::Coherent { im, .. }) => *im = value,
        ("hbar", _) if spec.model == ModelKind::Oscillator => out.params.hbar = Some(value),
        _ => {
            return Err(err(format!(
                "sweep.parameter: `{parameter}` does not apply to this scenario"
            )))
        }
    }
    Ok(out)
}

pub fn cmd_sweep(spec_path: &Path, out: &PathBuf, tol_scale: f64) -> Result<i32, CliError> {
    let sweep: SweepSpec = read_json(spec_path)?;
    check_schema_version(sweep.schema_version)?;
    check_schema_version(sweep.scenario.schema_version)?;
    let range = &sweep.sweep;
    if !range.step.is_finite() || range.step <= 0.0 {
        return Err(err(format!(
            "sweep.step: must be positive and finite, got {}",
            range.step
        )));
    }
    if !range.start.is_finite() || !range.stop.is_finite() || range.stop < range.start {
        return Err(err(format!(
            "sweep.start/stop: invalid range [{}, {}]",
            range.start, range.stop
        )));
    }
    let tol = effective_tolerances(sweep.scenario.tolerances.as_ref(), tol_scale)?;

    let steps = ((range.stop - range.start) / range.step + 1e-9).floor() as usize;
    let mut csv = String::from("param,lhs,rhs,margin,inequality\n");
    for i in 0..=steps {
        let value = range.start + range.step * i as f64;
        let point = apply_parameter(&sweep.scenario, &range.parameter, value)?;
        let report = report_for(&point, &tol)?;
        for bound in &report.bounds {
            writeln!(
                csv,
                "{},{},{},{},{}",
                fmt_f64(value),
                fmt_f64(bound.lhs),
                fmt_f64(bound.rhs),
                fmt_f64(bound.margin),
                bound.id.as_str()
            )
            .expect("string write");
        }
    }
    fs::write(out, csv).map_err(|e| err(format!("cannot write {}: {e}", out.display())))?;
    Ok(0)
}

pub fn cmd_search(
    spec_path: &Path,
    out: Option<&PathBuf>,
    seed: u64,
    tol_scale: f64,
) -> Result<i32, CliError> {
    let spec: SearchSpec = read_json(spec_path)?;
    check_schema_version(spec.schema_version)?;
    let tol = effective_tolerances(None, tol_scale)?;
    let mut opts = SearchOptions {
        seed,
        tolerances: tol.clone(),
        ..SearchOptions::default()
    };

    let (status, result_json, exit) = match &spec.kind {
        SearchKind::Violation {
            family,
            inequality,
            resolution,
            refine_iters,
        } => {
            if let Some(r) = resolution {
                opts.resolution = *r;
            }
            if let Some(r) = refine_iters {
                opts.refine_iters = *r;
            }
            let outcome =
                violation_search(family, inequality, &opts).map_err(|e| err(e.to_string()))?;
            let status = if outcome.certified {
                crate::records::SearchStatus::ViolationCertified
            } else if outcome.result.converged {
                crate::records::SearchStatus::NoViolation
            } else {
                crate::records::SearchStatus::NotConverged
            };
            let exit = if outcome.certified { 1 } else { 0 };
            (status, SearchResultJson::from(&outcome.result), exit)
        }
        SearchKind::Saturation {
            model,
            params,
            pair,
            multi_start,
            gamma_grid,
        } => {
            if let Some(m) = multi_start {
                opts.multi_start = *m;
            }
            if let Some(g) = gamma_grid {
                opts.gamma_grid = *g;
            }
            let scenario_spec = ScenarioSpec {
                schema_version: SCHEMA_VERSION,
                model: *model,
                params: params.clone(),
                // placeholder state; only the operators are used
                state: match model {
                    ModelKind::Oscillator => StateSpec::Fock { k: 0 },
                    ModelKind::Spin => StateSpec::Bloch {
                        theta: 0.0,
                        phi: 0.0,
                    },
                },
                pair: pair.clone(),
                evaluate: vec![],
                tolerances: None,
            };
            let built = scenario(&scenario_spec, &tol).map_err(|e| err(e.to_string()))?;
            let result = saturation_search(&built.op_a, &built.op_b, &opts)
                .map_err(|e| err(e.to_string()))?;
            let status = if result.converged {
                crate::records::SearchStatus::Completed
            } else {
                crate::records::SearchStatus::NotConverged
            };
            (status, SearchResultJson::from(&result), 0)
        }
    };

    let record = SearchRecord {
        schema_version: SCHEMA_VERSION,
        versions: Versions::current(),
        seed,
        spec,
        status,
        result: result_json,
    };
    let json = serde_json::to_string_pretty(&record).expect("record serializes");
    write_output(out, &json)?;
    Ok(exit)
}

pub fn cmd_selftest(seed: u64, tol_scale: f64) -> Result<i32, CliError> {
    let tol = effective_tolerances(None, tol_scale)?;
    let outcomes = run_selftest(seed, &tol);
    let mut failed = 0usize;
    println!("uncbench selftest (seed {seed})");
    println!("{:-<100}", "");
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!("{status}  {:<38} {:>9} cases  {}", o.name, o.cases, o.detail);
    }
    println!("{:-<100}", "");
    println!(
        "{} checks, {} passed, {} failed",
        outcomes.len(),
        outcomes.len() - failed,
        failed
    );
    Ok(if failed == 0 { 0 } else { 1 })
}
