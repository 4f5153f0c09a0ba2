//! The built-in verification suite behind `uncbench selftest`: every module
//! invariant plus the headline scenario equalities and counterexamples, run
//! from a single seed with a deterministic pass/fail table.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use crate::bounds::{
    aux_bounds, full_report, refined, robertson, root_form, triple_margin, InequalityId,
    ReportOptions,
};
use crate::gram::{assemble_m6, det_m2_closed_form, expansion_check, spin_matrix_n};
use crate::models::{coherent_state_with_leakage_cap, fock_state, oscillator, spin};
use crate::moments::extract_moments;
use crate::operator::{c64, max_norm, QuantumState, Spinor};
use crate::sampling::{haar_state, random_gamma, random_hermitian, random_instance,
    random_moment_set};
use crate::search::{eq2_residual, saturation_search, violation_search, FamilySpec,
    SearchOptions};
use crate::tol::Tolerances;

/// One row of the selftest table.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, cases: usize, detail: String) -> Self {
        Self {
            name,
            passed: true,
            cases,
            detail,
        }
    }

    fn fail(name: &'static str, cases: usize, detail: String) -> Self {
        Self {
            name,
            passed: false,
            cases,
            detail,
        }
    }

    fn from_worst(
        name: &'static str,
        cases: usize,
        worst: f64,
        limit: f64,
        describe: &str,
    ) -> Self {
        let detail = format!("worst {describe} {worst:.3e} vs limit {limit:.3e}");
        if worst <= limit {
            Self::pass(name, cases, detail)
        } else {
            Self::fail(name, cases, detail)
        }
    }
}

/// Runs the whole suite. Same seed, same table.
pub fn run_selftest(seed: u64, tol: &Tolerances) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        commutator_antisymmetry(&mut rng),
        variance_identity(&mut rng),
        phase_invariance(&mut rng),
        moment_shift_invariance(&mut rng),
        moment_scale_covariance(&mut rng),
        third_order_consistency(&mut rng),
        proven_bounds_nonnegative(&mut rng, tol),
        refined_triple_consistency(&mut rng, tol),
        refined_reduction_exact(&mut rng, tol),
        root_implication(&mut rng, tol),
        am_gm_step(&mut rng),
        margin_scale_covariance(&mut rng, tol),
        averaging_identity(&mut rng),
        product_vector_positivity(&mut rng),
        expansion_identity(&mut rng),
        sector_determinants(&mut rng),
        kinetic_identity_list(),
        spin_moment_relations(),
        ground_state_equality(tol),
        spin_up_equality(tol),
        moving_coherent_probe(tol),
        bloch_triple_counterexample(tol),
        bloch_robertson_clean(tol),
        canonical_saturation(seed, tol),
        search_determinism(seed, tol),
    ]
}

fn dims(rng: &mut impl Rng) -> usize {
    rng.random_range(2..=8)
}

fn commutator_antisymmetry(rng: &mut impl Rng) -> CheckOutcome {
    let cases = 300;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let d = dims(rng);
        let a = random_hermitian(rng, d);
        let b = random_hermitian(rng, d);
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        let scale = max_norm(ab.matrix()).max(1.0);
        worst = worst.max(max_norm(ab.add(&ba).unwrap().matrix()) / scale);
    }
    CheckOutcome::from_worst("operator/commutator-antisymmetry", cases, worst, 1e-14, "defect")
}

fn variance_identity(rng: &mut impl Rng) -> CheckOutcome {
    let cases = 300;
    let mut worst = 0.0_f64;
    let mut nonneg = true;
    for _ in 0..cases {
        let d = dims(rng);
        let o = random_hermitian(rng, d);
        let psi = haar_state(rng, d);
        let var = o.variance(&psi).unwrap();
        nonneg &= var >= 0.0;
        let via_dev = o
            .deviation(&psi)
            .unwrap()
            .square()
            .expectation(&psi)
            .unwrap();
        worst = worst.max((var - via_dev).abs() / var.abs().max(1.0));
    }
    if !nonneg {
        return CheckOutcome::fail(
            "operator/variance-identity",
            cases,
            "negative variance observed".to_string(),
        );
    }
    CheckOutcome::from_worst("operator/variance-identity", cases, worst, 1e-12, "deviation")
}

fn phase_invariance(rng: &mut impl Rng) -> CheckOutcome {
    let cases = 200;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let d = dims(rng);
        let o = random_hermitian(rng, d);
        let psi = haar_state(rng, d);
        let phase = c64(0.0, rng.random::<f64>() * 2.0 * PI).exp();
        let rotated = QuantumState::new(psi.vector().clone().map(|z| z * phase)).unwrap();
        let e1 = o.expectation(&psi).unwrap();
        let e2 = o.expectation(&rotated).unwrap();
        worst = worst.max((e1 - e2).abs() / e1.abs().max(1.0));
    }
    CheckOutcome::from_worst("operator/phase-invariance", cases, worst, 1e-14, "difference")
}

fn moment_shift_invariance(rng: &mut impl Rng) -> CheckOutcome {
    let cases = 300;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let d = dims(rng);
        let (a, b, psi) = random_instance(rng, d);
        let s = rng.random::<f64>() * 6.0 - 3.0;
        let t = rng.random::<f64>() * 6.0 - 3.0;
        let m0 = extract_moments(&a, &b, &psi).unwrap();
        let m1 = extract_moments(&a.shift(s), &b.shift(t), &psi).unwrap();
        let scale = m0.scale.max(1.0);
        for (x, y) in [
            (m0.var_a, m1.var_a),
            (m0.var_b, m1.var_b),
            (m0.mean_c, m1.mean_c),
            (m0.mean_c_sq, m1.mean_c_sq),
            (m0.mean_c2, m1.mean_c2),
            (m0.mean_c3, m1.mean_c3),
        ] {
            worst = worst.max((x - y).abs() / scale);
        }
    }
    CheckOutcome::from_worst("moments/shift-invariance", cases, worst, 1e-10, "drift")
}

fn moment_scale_covariance(rng: &mut impl Rng) -> CheckOutcome {
    let cases = 300;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let d = dims(rng);
        let (a, b, psi) = random_instance(rng, d);
        let lam = rng.random::<f64>() * 3.0 + 0.2;
        let mu = -(rng.random::<f64>() * 3.0 + 0.2);
        let m0 = extract_moments(&a, &b, &psi).unwrap();
        let m1 = extract_moments(&a.scale(lam), &b.scale(mu), &psi).unwrap();
        let scale = m1.scale.max(1.0);
        for (got, expect) in [
            (m1.var_a, lam * lam * m0.var_a),
            (m1.var_b, mu * mu * m0.var_b),
            (m1.mean_c, lam * mu * m0.mean_c),
            (m1.mean_c_sq, lam * lam * mu * mu * m0.mean_c_sq),
            (m1.mean_c2, lam * mu * mu * m0.mean_c2),
            (m1.mean_c3, lam * lam * mu * m0.mean_c3),
        ] {
            worst = worst.max((got - expect).abs() / scale);
        }
    }
    CheckOutcome::from_worst("moments/scale-covariance", cases, worst, 1e-10, "drift")
}

fn third_order_consistency(rng: &mut impl Rng) -> CheckOutcome {
    let cases = 300;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let d = dims(rng);
        let (a, b, psi) = random_instance(rng, d);
        let m = extract_moments(&a, &b, &psi).unwrap();
        let comm = a.commutator(&b).unwrap();
        let c2 = b.deviation(&psi).unwrap().commutator(&comm).unwrap();
        let c3 = a.deviation(&psi).unwrap().commutator(&comm).unwrap();
        let scale = m.scale.max(1.0);
        worst = worst.max((m.mean_c2 - c2.expectation(&psi).unwrap()).abs() / scale);
        worst = worst.max((m.mean_c3 - c3.expectation(&psi).unwrap()).abs() / scale);
    }
    CheckOutcome::from_worst("moments/third-order-consistency", cases, worst, 1e-12, "gap")
}

fn proven_bounds_nonnegative(rng: &mut impl Rng, tol: &Tolerances) -> CheckOutcome {
    let cases = 10_000;
    let mut worst = f64::INFINITY;
    for _ in 0..cases {
        let d = dims(rng);
        let (a, b, psi) = random_instance(rng, d);
        let m = extract_moments(&a, &b, &psi).unwrap();
        let scale = m.scale.max(1.0);
        let rb = robertson(&m, tol);
        let (aux_a, aux_b) = aux_bounds(&m, tol);
        for bv in [rb, aux_a, aux_b] {
            worst = worst.min(bv.margin / scale);
        }
    }
    let detail = format!("worst relative margin {worst:.3e} vs floor -1e-10");
    if worst >= -1e-10 {
        CheckOutcome::pass("bounds/proven-nonnegative", cases, detail)
    } else {
        CheckOutcome::fail("bounds/proven-nonnegative", cases, detail)
    }
}

fn refined_triple_consistency(rng: &mut impl Rng, tol: &Tolerances) -> CheckOutcome {
    let cases = 500;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let m = random_moment_set(rng);
        if m.degenerate_commutator(tol) {
            continue;
        }
        let bv = refined(&m, tol);
        let lhs = (bv.lhs - bv.rhs) * m.mean_c_sq;
        worst = worst.max((lhs - triple_margin(&m)).abs() / m.scale.powi(3).max(1.0));
    }
    CheckOutcome::from_worst("bounds/refined-triple-consistency", cases, worst, 1e-11, "gap")
}

fn refined_reduction_exact(rng: &mut impl Rng, tol: &Tolerances) -> CheckOutcome {
    let cases = 500;
    for _ in 0..cases {
        let base = random_moment_set(rng);
        let m = crate::moments::MomentSet::from_raw(
            base.var_a,
            base.var_b,
            base.mean_c,
            base.mean_c_sq,
            0.0,
            0.0,
        )
        .unwrap();
        let want = robertson(&m, tol).rhs;
        let got = refined(&m, tol).rhs;
        if got != want {
            return CheckOutcome::fail(
                "bounds/reduction-to-robertson",
                cases,
                format!("rhs {got} != {want}"),
            );
        }
    }
    CheckOutcome::pass(
        "bounds/reduction-to-robertson",
        cases,
        "exact equality".to_string(),
    )
}

fn root_implication(rng: &mut impl Rng, tol: &Tolerances) -> CheckOutcome {
    let mut cases = 0;
    let mut worst = 0.0_f64;
    while cases < 500 {
        let m = random_moment_set(rng);
        if m.degenerate_commutator(tol) || triple_margin(&m) < 0.0 {
            continue;
        }
        cases += 1;
        let bv = root_form(&m, tol).unwrap();
        worst = worst.max((bv.rhs - bv.lhs) / m.scale.max(1.0));
    }
    CheckOutcome::from_worst("bounds/root-implication", cases, worst, 1e-10, "excess")
}

fn am_gm_step(rng: &mut impl Rng) -> CheckOutcome {
    let cases = 1000;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let m = random_moment_set(rng);
        let lhs = m.var_a * m.mean_c2 * m.mean_c2 + m.var_b * m.mean_c3 * m.mean_c3;
        let rhs = 2.0
            * (m.var_a * m.var_b).sqrt()
            * (m.mean_c2 * m.mean_c3).abs();
        worst = worst.max((rhs - lhs) / m.scale.powi(3).max(1.0));
    }
    CheckOutcome::from_worst("bounds/am-gm-step", cases, worst, 1e-12, "excess")
}

fn margin_scale_covariance(rng: &mut impl Rng, tol: &Tolerances) -> CheckOutcome {
    let cases = 1000;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let d = dims(rng);
        let (a, b, psi) = random_instance(rng, d);
        let lam = rng.random::<f64>() * 2.0 + 0.3;
        let mu = rng.random::<f64>() * 2.0 + 0.3;
        let m0 = extract_moments(&a, &b, &psi).unwrap();
        let m1 = extract_moments(&a.scale(lam), &b.scale(mu), &psi).unwrap();
        let factor = lam * lam * mu * mu;
        for (before, after) in [
            (robertson(&m0, tol), robertson(&m1, tol)),
            (refined(&m0, tol), refined(&m1, tol)),
        ] {
            let expect = factor * before.margin;
            let denom = expect.abs().max(m1.scale * m1.scale).max(1e-12);
            worst = worst.max((after.margin - expect).abs() / denom);
        }
    }
    CheckOutcome::from_worst("bounds/margin-scale-covariance", cases, worst, 1e-10, "drift")
}

fn averaging_identity(rng: &mut impl Rng) -> CheckOutcome {
    let cases = 300;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let d = dims(rng);
        let (a, b, psi) = random_instance(rng, d);
        let gamma = random_gamma(rng);
        let chi_raw = haar_state(rng, 2);
        let chi = Spinor::new(chi_raw.vector()[0], chi_raw.vector()[1]).unwrap();
        let m = extract_moments(&a, &b, &psi).unwrap();
        let f = crate::gram::build_f(&a, &b, &psi, &gamma).unwrap();
        let lhs = f
            .square()
            .expectation(&psi.product_with_spinor(&chi))
            .unwrap();
        let n = spin_matrix_n(&m, &gamma);
        let rhs = n.expectation(&chi_raw).unwrap();
        let scale = m.scale.max(1.0) * gamma.norm() * gamma.norm();
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    CheckOutcome::from_worst("gram/averaging-identity", cases, worst, 1e-11, "gap")
}

fn product_vector_positivity(rng: &mut impl Rng) -> CheckOutcome {
    let instances = 1000;
    let gammas = 100;
    let mut worst = f64::INFINITY;
    for _ in 0..instances {
        let d = dims(rng);
        let (a, b, psi) = random_instance(rng, d);
        let m = extract_moments(&a, &b, &psi).unwrap();
        let scale = m.scale.max(1.0);
        for _ in 0..gammas {
            let gamma = random_gamma(rng);
            let n = spin_matrix_n(&m, &gamma);
            let min = n.min_eig().unwrap() / (gamma.norm() * gamma.norm());
            worst = worst.min(min / scale);
        }
    }
    let detail = format!("worst relative eigenvalue {worst:.3e} vs floor -1e-10");
    if worst >= -1e-10 {
        CheckOutcome::pass("gram/product-positivity", instances * gammas, detail)
    } else {
        CheckOutcome::fail("gram/product-positivity", instances * gammas, detail)
    }
}

fn expansion_identity(rng: &mut impl Rng) -> CheckOutcome {
    let cases = 1000;
    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let d = dims(rng);
        let (a, b, psi) = random_instance(rng, d);
        let gamma = random_gamma(rng);
        let residual = expansion_check(&a, &b, &psi, &gamma).unwrap();
        let f = crate::gram::build_f(&a, &b, &psi, &gamma).unwrap();
        let scale = max_norm(f.square().matrix()).max(1.0);
        worst = worst.max(residual / scale);
    }
    CheckOutcome::from_worst("gram/expansion-identity", cases, worst, 1e-11, "residual")
}

fn sector_determinants(rng: &mut impl Rng) -> CheckOutcome {
    // Relative errors are taken against the natural determinant magnitude
    // max(|det|, scale³), which keeps near-singular draws meaningful.
    let cases = 1000;
    let mut worst_sector = 0.0_f64;
    let mut worst_square = 0.0_f64;
    let mut worst_closed = 0.0_f64;
    let mut min_det6 = f64::INFINITY;
    for _ in 0..cases {
        let m = random_moment_set(rng);
        let ga = assemble_m6(&m);
        let scale3 = m.scale.powi(3).max(1e-30);
        let denom = ga.det_m2.abs().max(scale3);
        worst_sector = worst_sector.max((ga.det_plus - ga.det_m2).abs() / denom);
        worst_sector = worst_sector.max((ga.det_minus - ga.det_m2).abs() / denom);
        let sq = ga.det_m2 * ga.det_m2;
        worst_square = worst_square.max((ga.det_m6 - sq).abs() / sq.max(scale3 * scale3));
        worst_closed = worst_closed.max((ga.det_m2 - det_m2_closed_form(&m)).abs() / scale3);
        min_det6 = min_det6.min(ga.det_m6 / (scale3 * scale3));
    }
    let ok = worst_sector <= 1e-11 && worst_square <= 1e-8 && worst_closed <= 1e-12
        && min_det6 >= -1e-10;
    let detail = format!(
        "sector {worst_sector:.3e} (<=1e-11), square {worst_square:.3e} (<=1e-8), closed {worst_closed:.3e} (<=1e-12), min det6 {min_det6:.3e}"
    );
    if ok {
        CheckOutcome::pass("gram/sector-determinants", cases, detail)
    } else {
        CheckOutcome::fail("gram/sector-determinants", cases, detail)
    }
}

fn kinetic_identity_list() -> CheckOutcome {
    // c = ħ<p>, f = 2ħ²<E>, e = −ħ², d = 0 for low-leakage states
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for hbar in [1.0, 2.0] {
        let model = oscillator(48, hbar).unwrap();
        for (re, im) in [(0.0, 0.0), (0.4, 0.0), (0.0, 0.7), (0.5, -0.6)] {
            let (psi, leak) =
                coherent_state_with_leakage_cap(&model, c64(re, im), 1e-10).unwrap();
            if leak.top_weight > 1e-10 {
                continue;
            }
            cases += 1;
            let m = extract_moments(model.e_kin(), model.x(), &psi).unwrap();
            let mean_p = model.p().expectation(&psi).unwrap();
            let mean_e = model.e_kin().expectation(&psi).unwrap();
            worst = worst.max((m.mean_c - hbar * mean_p).abs());
            worst = worst.max((m.mean_c_sq - 2.0 * hbar * hbar * mean_e).abs());
            worst = worst.max((m.mean_c2 + hbar * hbar).abs());
            worst = worst.max(m.mean_c3.abs());
        }
    }
    CheckOutcome::from_worst("models/kinetic-identities", cases, worst, 1e-8, "defect")
}

fn spin_moment_relations() -> CheckOutcome {
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for two_j in 1..=5u32 {
        let model = spin(two_j as f64 / 2.0).unwrap();
        for (theta, phi) in [(0.0, 0.0), (0.9, 0.3), (2.2, 4.4)] {
            cases += 1;
            let psi = crate::models::bloch_state(&model, theta, phi);
            let m = extract_moments(model.l_x(), model.l_y(), &psi).unwrap();
            worst = worst.max((m.mean_c + model.l_z().expectation(&psi).unwrap()).abs());
            worst = worst.max((m.mean_c2 - model.l_x().expectation(&psi).unwrap()).abs());
            worst = worst.max((m.mean_c3 + model.l_y().expectation(&psi).unwrap()).abs());
            worst = worst
                .max((m.mean_c_sq - model.l_z().square().expectation(&psi).unwrap()).abs());
        }
    }
    CheckOutcome::from_worst("models/spin-moment-relations", cases, worst, 1e-12, "defect")
}

fn ground_state_equality(tol: &Tolerances) -> CheckOutcome {
    let model = oscillator(8, 1.0).unwrap();
    let psi = fock_state(&model, 0).unwrap();
    let mut opts = ReportOptions::new();
    opts.tolerances = tol.clone();
    opts.oscillator = Some(model.state_moments(&psi).unwrap());
    let report = full_report(model.e_kin(), model.x(), &psi, &opts).unwrap();
    let refined_bv = report.get(InequalityId::Refined).unwrap();
    let kin = report.get(InequalityId::KineticPosition).unwrap();
    let rob = report.get(InequalityId::Robertson).unwrap();
    let ok = (refined_bv.lhs - 1.0 / 16.0).abs() <= 1e-9
        && (refined_bv.rhs - 1.0 / 16.0).abs() <= 1e-9
        && (kin.lhs - 1.0 / 16.0).abs() <= 1e-9
        && (kin.rhs - 1.0 / 16.0).abs() <= 1e-9
        && rob.rhs == 0.0
        && refined_bv.saturated
        && kin.saturated;
    let detail = format!(
        "refined {:.12}={:.12}, robertson rhs {:.1e}",
        refined_bv.lhs, refined_bv.rhs, rob.rhs
    );
    if ok {
        CheckOutcome::pass("scenario/ground-state-equality", 1, detail)
    } else {
        CheckOutcome::fail("scenario/ground-state-equality", 1, detail)
    }
}

fn spin_up_equality(_tol: &Tolerances) -> CheckOutcome {
    let model = spin(0.5).unwrap();
    let up = QuantumState::basis(2, 0).unwrap();
    let m = extract_moments(model.l_x(), model.l_y(), &up).unwrap();
    let margin = triple_margin(&m);
    let product = m.var_a * m.var_b * m.mean_c_sq;
    let ok = margin.abs() <= 1e-12 && (product - 1.0 / 64.0).abs() <= 1e-12;
    let detail = format!("triple margin {margin:.3e}, a*b*f {product:.12}");
    if ok {
        CheckOutcome::pass("scenario/spin-up-equality", 1, detail)
    } else {
        CheckOutcome::fail("scenario/spin-up-equality", 1, detail)
    }
}

fn moving_coherent_probe(tol: &Tolerances) -> CheckOutcome {
    let model = oscillator(40, 1.0).unwrap();
    let (psi, leak) =
        coherent_state_with_leakage_cap(&model, c64(0.0, 1.0 / SQRT_2), tol.leakage).unwrap();
    let m = extract_moments(model.e_kin(), model.x(), &psi).unwrap();
    let mut opts = ReportOptions::new();
    opts.tolerances = tol.clone();
    opts.oscillator = Some(model.state_moments(&psi).unwrap());
    let report = full_report(model.e_kin(), model.x(), &psi, &opts).unwrap();
    let kin = report.get(InequalityId::KineticPosition).unwrap();
    let ok = leak.top_weight <= 1e-10
        && (m.var_a - 0.625).abs() <= 1e-8
        && (m.var_b - 0.5).abs() <= 1e-8
        && (m.mean_c - 1.0).abs() <= 1e-8
        && (m.mean_c_sq - 1.5).abs() <= 1e-8
        && (kin.margin + 0.041667).abs() <= 1e-6;
    let detail = format!(
        "moments ({:.8}, {:.8}, {:.8}, {:.8}), kinetic margin {:.8}",
        m.var_a, m.var_b, m.mean_c, m.mean_c_sq, kin.margin
    );
    if ok {
        CheckOutcome::pass("scenario/moving-coherent-probe", 1, detail)
    } else {
        CheckOutcome::fail("scenario/moving-coherent-probe", 1, detail)
    }
}

fn bloch_triple_counterexample(tol: &Tolerances) -> CheckOutcome {
    let family = FamilySpec::BlochTheta {
        j: 0.5,
        phi: 0.0,
        theta_min: 0.0,
        theta_max: PI,
    };
    let opts = SearchOptions {
        tolerances: tol.clone(),
        ..SearchOptions::default()
    };
    match violation_search(&family, "triple", &opts) {
        Ok(out) => {
            let ok = out.certified
                && (out.result.best_value + 1.0 / 256.0).abs() <= 1e-6
                && (out.result.best_params[0] - FRAC_PI_4).abs() <= 1e-3;
            let detail = format!(
                "margin {:.9} at theta {:.6}",
                out.result.best_value, out.result.best_params[0]
            );
            if ok {
                CheckOutcome::pass("search/bloch-triple-counterexample", 1, detail)
            } else {
                CheckOutcome::fail("search/bloch-triple-counterexample", 1, detail)
            }
        }
        Err(e) => CheckOutcome::fail("search/bloch-triple-counterexample", 1, e.to_string()),
    }
}

fn bloch_robertson_clean(tol: &Tolerances) -> CheckOutcome {
    let family = FamilySpec::BlochTheta {
        j: 0.5,
        phi: 0.0,
        theta_min: 0.0,
        theta_max: PI,
    };
    let opts = SearchOptions {
        tolerances: tol.clone(),
        ..SearchOptions::default()
    };
    match violation_search(&family, "robertson", &opts) {
        Ok(out) => {
            let detail = format!("best margin {:.3e}", out.result.best_value);
            if !out.certified {
                CheckOutcome::pass("search/bloch-robertson-clean", 1, detail)
            } else {
                CheckOutcome::fail("search/bloch-robertson-clean", 1, detail)
            }
        }
        Err(e) => CheckOutcome::fail("search/bloch-robertson-clean", 1, e.to_string()),
    }
}

fn canonical_saturation(seed: u64, tol: &Tolerances) -> CheckOutcome {
    let model = oscillator(32, 1.0).unwrap();
    let opts = SearchOptions {
        seed,
        multi_start: 1,
        tolerances: tol.clone(),
        ..SearchOptions::default()
    };
    match saturation_search(model.x(), model.p(), &opts) {
        Ok(res) => {
            let var_x = model.x().variance(&res.best_state).unwrap();
            let var_p = model.p().variance(&res.best_state).unwrap();
            let eq2 = eq2_residual(model.x(), model.p(), &res.best_state);
            let eq2_val = eq2.as_ref().map(|v| *v).unwrap_or(f64::INFINITY);
            let ok = res.best_value <= 1e-6
                && (var_x * var_p - 0.25) <= 1e-6
                && eq2_val <= 1e-6;
            let detail = format!(
                "residual {:.3e}, VarX*VarP-1/4 {:.3e}, eq2 {:.3e}",
                res.best_value,
                var_x * var_p - 0.25,
                eq2_val
            );
            if ok {
                CheckOutcome::pass("search/canonical-saturation", 1, detail)
            } else {
                CheckOutcome::fail("search/canonical-saturation", 1, detail)
            }
        }
        Err(e) => CheckOutcome::fail("search/canonical-saturation", 1, e.to_string()),
    }
}

fn search_determinism(seed: u64, tol: &Tolerances) -> CheckOutcome {
    let model = spin(0.5).unwrap();
    let opts = SearchOptions {
        seed,
        multi_start: 2,
        tolerances: tol.clone(),
        ..SearchOptions::default()
    };
    let r1 = saturation_search(model.l_x(), model.l_y(), &opts);
    let r2 = saturation_search(model.l_x(), model.l_y(), &opts);
    match (r1, r2) {
        (Ok(a), Ok(b)) => {
            let identical = a.best_params == b.best_params
                && a.best_value.to_bits() == b.best_value.to_bits();
            let detail = format!("params {:?}", a.best_params);
            if identical {
                CheckOutcome::pass("search/determinism", 2, detail)
            } else {
                CheckOutcome::fail("search/determinism", 2, detail)
            }
        }
        _ => CheckOutcome::fail("search/determinism", 2, "search errored".to_string()),
    }
}
