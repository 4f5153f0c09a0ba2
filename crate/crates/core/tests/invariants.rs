//! Cross-module property suite: randomized instances exercise the contracts
//! that hold for every genuine `(A, B, ψ)` triple, with seeds as the
//! shrinkable input.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uncbench_core::bounds::{
    aux_bounds, refined, robertson, root_form, triple_margin,
};
use uncbench_core::gram::{assemble_m6, build_f, det_m2_closed_form, expansion_check,
    spin_matrix_n};
use uncbench_core::moments::extract_moments;
use uncbench_core::operator::max_norm;
use uncbench_core::sampling::{haar_state, random_gamma, random_hermitian, random_instance,
    random_moment_set};
use uncbench_core::{QuantumState, Spinor, Tolerances};

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #[test]
    fn commutator_antisymmetry(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = rng_for(seed);
        let a = random_hermitian(&mut rng, dim);
        let b = random_hermitian(&mut rng, dim);
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        let scale = max_norm(ab.matrix()).max(1.0);
        prop_assert!(max_norm(ab.add(&ba).unwrap().matrix()) <= 1e-14 * scale);
    }

    #[test]
    fn variance_nonnegative_and_consistent(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = rng_for(seed);
        let o = random_hermitian(&mut rng, dim);
        let psi = haar_state(&mut rng, dim);
        let var = o.variance(&psi).unwrap();
        prop_assert!(var >= 0.0);
        let via_dev = o.deviation(&psi).unwrap().square().expectation(&psi).unwrap();
        prop_assert!((var - via_dev).abs() <= 1e-12 * var.abs().max(1.0));
    }

    #[test]
    fn proven_bounds_never_negative(seed in any::<u64>(), dim in 2usize..=8) {
        let mut rng = rng_for(seed);
        let (a, b, psi) = random_instance(&mut rng, dim);
        let m = extract_moments(&a, &b, &psi).unwrap();
        let tol = Tolerances::default();
        let floor = -1e-10 * m.scale.max(1.0);
        let rb = robertson(&m, &tol);
        let (aux_a, aux_b) = aux_bounds(&m, &tol);
        prop_assert!(rb.margin >= floor, "robertson margin {}", rb.margin);
        prop_assert!(aux_a.margin >= floor, "aux_a margin {}", aux_a.margin);
        prop_assert!(aux_b.margin >= floor, "aux_b margin {}", aux_b.margin);
    }

    #[test]
    fn moment_invariants_hold(seed in any::<u64>(), dim in 2usize..=8) {
        let mut rng = rng_for(seed);
        let (a, b, psi) = random_instance(&mut rng, dim);
        let m = extract_moments(&a, &b, &psi).unwrap();
        let slack = 1e-10 * m.scale.max(1.0);
        prop_assert!(m.var_a >= 0.0 && m.var_b >= 0.0 && m.mean_c_sq >= 0.0);
        prop_assert!(m.mean_c_sq >= m.mean_c * m.mean_c - slack);
        prop_assert!(m.mean_c_sq >= m.var_c - slack);
    }

    #[test]
    fn refined_times_c_sq_matches_triple(seed in any::<u64>()) {
        let mut rng = rng_for(seed);
        let m = random_moment_set(&mut rng);
        let tol = Tolerances::default();
        prop_assume!(!m.degenerate_commutator(&tol));
        let bv = refined(&m, &tol);
        let product_form = (bv.lhs - bv.rhs) * m.mean_c_sq;
        prop_assert!(
            (product_form - triple_margin(&m)).abs() <= 1e-11 * m.scale.powi(3).max(1.0)
        );
    }

    #[test]
    fn root_follows_from_nonnegative_triple(seed in any::<u64>()) {
        let mut rng = rng_for(seed);
        let m = random_moment_set(&mut rng);
        let tol = Tolerances::default();
        prop_assume!(!m.degenerate_commutator(&tol));
        prop_assume!(triple_margin(&m) >= 0.0);
        let bv = root_form(&m, &tol).unwrap();
        prop_assert!(bv.lhs >= bv.rhs - 1e-10 * m.scale.max(1.0));
    }

    #[test]
    fn am_gm_is_unconditional(seed in any::<u64>()) {
        let mut rng = rng_for(seed);
        let m = random_moment_set(&mut rng);
        let lhs = m.var_a * m.mean_c2 * m.mean_c2 + m.var_b * m.mean_c3 * m.mean_c3;
        let rhs = 2.0 * (m.var_a * m.var_b).sqrt() * (m.mean_c2 * m.mean_c3).abs();
        prop_assert!(lhs >= rhs - 1e-12 * m.scale.powi(3).max(1.0));
    }

    #[test]
    fn product_vector_positivity(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = rng_for(seed);
        let (a, b, psi) = random_instance(&mut rng, dim);
        let m = extract_moments(&a, &b, &psi).unwrap();
        let gamma = random_gamma(&mut rng);
        let n = spin_matrix_n(&m, &gamma);
        let floor = -1e-10 * m.scale.max(1.0) * gamma.norm() * gamma.norm();
        prop_assert!(n.min_eig().unwrap() >= floor);
    }

    #[test]
    fn averaging_identity(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = rng_for(seed);
        let (a, b, psi) = random_instance(&mut rng, dim);
        let gamma = random_gamma(&mut rng);
        let chi_raw = haar_state(&mut rng, 2);
        let chi = Spinor::new(chi_raw.vector()[0], chi_raw.vector()[1]).unwrap();
        let m = extract_moments(&a, &b, &psi).unwrap();
        let f = build_f(&a, &b, &psi, &gamma).unwrap();
        let lhs = f.square().expectation(&psi.product_with_spinor(&chi)).unwrap();
        let rhs = spin_matrix_n(&m, &gamma).expectation(&chi_raw).unwrap();
        let scale = m.scale.max(1.0) * gamma.norm() * gamma.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale);
    }

    #[test]
    fn expansion_identity(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = rng_for(seed);
        let (a, b, psi) = random_instance(&mut rng, dim);
        let gamma = random_gamma(&mut rng);
        let residual = expansion_check(&a, &b, &psi, &gamma).unwrap();
        let f = build_f(&a, &b, &psi, &gamma).unwrap();
        prop_assert!(residual <= 1e-12 * max_norm(f.square().matrix()).max(1.0));
    }

    #[test]
    fn sector_identities(seed in any::<u64>()) {
        let mut rng = rng_for(seed);
        let m = random_moment_set(&mut rng);
        let ga = assemble_m6(&m);
        let scale3 = m.scale.powi(3).max(1e-30);
        let denom = ga.det_m2.abs().max(scale3);
        prop_assert!((ga.det_plus - ga.det_m2).abs() <= 1e-11 * denom);
        prop_assert!((ga.det_minus - ga.det_m2).abs() <= 1e-11 * denom);
        let sq = ga.det_m2 * ga.det_m2;
        prop_assert!((ga.det_m6 - sq).abs() <= 1e-8 * sq.max(scale3 * scale3));
        prop_assert!(ga.det_m6 >= -1e-10 * scale3 * scale3);
        prop_assert!((ga.det_m2 - det_m2_closed_form(&m)).abs() <= 1e-12 * scale3);
    }

    #[test]
    fn triple_margin_equals_sector_determinant(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = rng_for(seed);
        let (a, b, psi) = random_instance(&mut rng, dim);
        let m = extract_moments(&a, &b, &psi).unwrap();
        let ga = assemble_m6(&m);
        prop_assert!(
            (triple_margin(&m) - ga.det_m2).abs() <= 1e-12 * m.scale.powi(3).max(1.0)
        );
    }

    #[test]
    fn margins_scale_as_lambda_sq_mu_sq(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = rng_for(seed);
        let (a, b, psi) = random_instance(&mut rng, dim);
        let tol = Tolerances::default();
        let (lam, mu) = (1.75, 0.4);
        let m0 = extract_moments(&a, &b, &psi).unwrap();
        let m1 = extract_moments(&a.scale(lam), &b.scale(mu), &psi).unwrap();
        let factor = lam * lam * mu * mu;
        for (before, after) in [
            (robertson(&m0, &tol), robertson(&m1, &tol)),
            (refined(&m0, &tol), refined(&m1, &tol)),
        ] {
            let expect = factor * before.margin;
            let denom = expect.abs().max(m1.scale * m1.scale).max(1e-12);
            prop_assert!((after.margin - expect).abs() <= 1e-10 * denom);
        }
    }

    #[test]
    fn global_phase_leaves_moments_unchanged(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = rng_for(seed);
        let (a, b, psi) = random_instance(&mut rng, dim);
        let phase = uncbench_core::c64(0.0, 2.13).exp();
        let rotated = QuantumState::new(psi.vector().clone().map(|z| z * phase)).unwrap();
        let m0 = extract_moments(&a, &b, &psi).unwrap();
        let m1 = extract_moments(&a, &b, &rotated).unwrap();
        let scale = m0.scale.max(1.0);
        prop_assert!((m0.var_a - m1.var_a).abs() <= 1e-13 * scale);
        prop_assert!((m0.mean_c - m1.mean_c).abs() <= 1e-13 * scale);
        prop_assert!((m0.mean_c2 - m1.mean_c2).abs() <= 1e-13 * scale);
    }
}

/// Kernel states found by the saturation search satisfy the averaging
/// identity: the squared residual equals the spin-space quadratic form at
/// the found spinor.
#[test]
fn saturation_residual_matches_spin_average() {
    use uncbench_core::models::oscillator;
    use uncbench_core::search::{saturation_search, SearchOptions};

    let model = oscillator(24, 1.0).unwrap();
    let opts = SearchOptions {
        seed: 5,
        multi_start: 1,
        ..SearchOptions::default()
    };
    let res = saturation_search(model.x(), model.p(), &opts).unwrap();
    assert!(res.converged);
    let psi = &res.best_state;
    let gamma = res.gamma.as_ref().unwrap();
    let chi = res.spinor.as_ref().unwrap();
    let m = extract_moments(model.x(), model.p(), psi).unwrap();
    let n = spin_matrix_n(&m, gamma);
    let chi_state = QuantumState::new(nalgebra::DVector::from_vec(vec![chi.up(), chi.down()]))
        .unwrap();
    let quad = n.expectation(&chi_state).unwrap();
    let residual_sq = res.best_value * res.best_value;
    assert!(
        (quad - residual_sq).abs() <= 1e-11 * m.scale.max(1.0),
        "quadratic form {quad} vs residual² {residual_sq}"
    );
    assert!(quad >= -1e-12);
}

/// Degenerate pair: every right side vanishes, margins are the squared
/// variance, and the report carries the fallback note.
#[test]
fn degenerate_pair_report() {
    use uncbench_core::bounds::{full_report, InequalityId, ReportOptions};
    use uncbench_core::sampling::random_hermitian;

    let mut rng = rng_for(3);
    let a = random_hermitian(&mut rng, 4);
    let psi = haar_state(&mut rng, 4);
    let report = full_report(&a, &a, &psi, &ReportOptions::new()).unwrap();
    let var = a.variance(&psi).unwrap();
    for id in [
        InequalityId::Robertson,
        InequalityId::AuxA,
        InequalityId::AuxB,
        InequalityId::Refined,
        InequalityId::Triple,
    ] {
        let bv = report.get(id).unwrap();
        assert_eq!(bv.rhs, 0.0, "{id:?}");
    }
    let rb = report.get(InequalityId::Robertson).unwrap();
    assert!((rb.margin - var * var).abs() <= 1e-12 * (var * var).max(1.0));
    assert!(report.get(InequalityId::Root).is_none());
    assert!(report.notes.iter().any(|n| n.contains("root")));
    // one bound per id
    for bv in &report.bounds {
        assert_eq!(report.bounds.iter().filter(|b| b.id == bv.id).count(), 1);
    }
}
