mod common;

use std::f64::consts::FRAC_PI_8;

use spqcnn_core::ansatz::{build_split_plan, forward_nonsplit, forward_sp, Angle, ParamId, SpQcnnModel};
use spqcnn_core::estimation::*;
use spqcnn_core::qsim::*;
use spqcnn_core::rng::substream;
use spqcnn_core::training::grad_per_instance;

#[test]
fn basis_state_estimates_are_exact() {
    let zero = PureState::zero(5).unwrap();
    let mut rng = substream(1, 0);
    for shots in [1, 7, 100, 1000] {
        assert_eq!(estimate_zavg(&zero, shots, &mut rng), 1.0);
        assert_eq!(estimate_z1(&zero, 2, shots, &mut rng).unwrap(), 1.0);
    }
}

#[test]
fn ghz_estimates() {
    let ghz = PureState::ghz(6).unwrap();
    let mut rng = substream(2, 0);
    for _ in 0..200 {
        let z = estimate_zavg(&ghz, 1, &mut rng);
        assert!(z == 1.0 || z == -1.0);
        let z1 = estimate_z1(&ghz, 0, 1, &mut rng).unwrap();
        assert!(z1 == 1.0 || z1 == -1.0);
    }
    assert!(estimate_zavg(&ghz, 100_000, &mut rng).abs() <= 0.02);
    assert!(estimate_z1(&ghz, 0, 100_000, &mut rng).unwrap().abs() <= 0.02);
}

#[test]
fn equator_state_single_qubit() {
    let mut s = PureState::zero(1).unwrap();
    apply_pauli_rotation(&mut s, &PauliString::single(0, Axis::X), FRAC_PI_8).unwrap();
    let exact = (2.0 * FRAC_PI_8).cos();
    let shots = 20_000;
    let est = estimate_z1(&s, 0, shots, &mut substream(3, 0)).unwrap();
    let sigma = ((1.0 - exact * exact) / shots as f64).sqrt();
    assert!((est - exact).abs() < 3.0 * sigma, "{est} vs {exact}");
}

#[test]
fn w_state_needs_one_shot() {
    let w = PureState::w(4).unwrap();
    let stats = repeat_estimates(100, 4, 0, |rng| estimate_zavg(&w, 1, rng));
    assert!(stats.per_rep.iter().all(|&z| z == 0.5));
    assert_eq!(stats.variance, 0.0);
}

#[test]
fn estimators_are_unbiased() {
    let n = 6;
    let state = haar_random_state(n, &mut substream(5, 0)).unwrap();
    let reps = 10_000;
    let exact_avg = zavg_expectation(&state);
    let exact_z1 = common::z_of(&state, 0);
    let avg = repeat_estimates(reps, 5, 1, |rng| estimate_zavg(&state, 20, rng));
    let z1 = repeat_estimates(reps, 5, 2, |rng| estimate_z1(&state, 0, 20, rng).unwrap());
    assert!((avg.mean - exact_avg).abs() < 4.0 * avg.std() / (reps as f64).sqrt());
    assert!((z1.mean - exact_z1).abs() < 4.0 * z1.std() / (reps as f64).sqrt());
}

#[test]
fn single_qubit_variance_law() {
    let mut s = PureState::zero(3).unwrap();
    apply_pauli_rotation(&mut s, &PauliString::single(0, Axis::X), 0.3).unwrap();
    let z = common::z_of(&s, 0);
    for shots in [10, 100, 1000] {
        let stats = repeat_estimates(10_000, 6, shots as u64, |rng| estimate_z1(&s, 0, shots, rng).unwrap());
        let expect = (1.0 - z * z) / shots as f64;
        assert!((stats.variance / expect - 1.0).abs() < 0.1, "shots={shots}: {} vs {expect}", stats.variance);
    }
}

#[test]
fn single_shot_variance_matches_enumeration() {
    let s = haar_random_state(5, &mut substream(7, 0)).unwrap();
    let probs = s.probabilities();
    let zavg = |b: usize| 1.0 - 2.0 * b.count_ones() as f64 / 5.0;
    let m: f64 = probs.iter().enumerate().map(|(b, p)| p * zavg(b)).sum();
    let v: f64 = probs.iter().enumerate().map(|(b, p)| p * (zavg(b) - m).powi(2)).sum();
    assert!((single_shot_zavg_variance(&s) - v).abs() < 1e-12);
}

#[test]
fn ghz_gives_unit_efficiency() {
    let ghz = PureState::ghz(8).unwrap();
    let r = relative_efficiency(&ghz, &ghz, 0, 1000, 2000, 8, "ghz").unwrap();
    assert!((0.8..=1.2).contains(&r.r), "r = {}", r.r);
    assert!(!r.zero_variance);
    assert!((r.r - (r.sigma0 / r.sigma_sp).powi(2)).abs() < 1e-12 * r.r);
    assert_eq!((r.n, r.n_shots, r.n_reps, r.seed), (8, 1000, 2000, 8));
}

#[test]
fn w_state_flags_zero_variance() {
    let w = PureState::w(8).unwrap();
    let ns = PureState::ghz(8).unwrap();
    let r = relative_efficiency(&w, &ns, 0, 1000, 40, 9, "w").unwrap();
    assert!(r.zero_variance);
    assert_eq!(r.sigma_sp, 0.0);
    assert_eq!(r.r, f64::INFINITY);
}

#[test]
fn efficiency_rejects_bad_counts() {
    let s = PureState::zero(4).unwrap();
    assert!(matches!(relative_efficiency(&s, &s, 0, 0, 40, 0, ""), Err(EstimationError::NoShots)));
    assert!(matches!(relative_efficiency(&s, &s, 0, 10, 29, 0, ""), Err(EstimationError::TooFewReps(29))));
    assert!(relative_efficiency(&s, &s, 4, 10, 40, 0, "").is_err());
}

#[test]
fn reports_are_reproducible() {
    let plan = build_split_plan(8, &[2, 2, 2]).unwrap();
    let m = SpQcnnModel::random(plan, 2, &mut substream(10, 0));
    let input = random_symmetric_state(8, &mut substream(10, 1)).unwrap();
    let sp = forward_sp(&m, &input).unwrap();
    let (ns, q) = forward_nonsplit(&m, &input).unwrap();
    let a = relative_efficiency(&sp, &ns, q, 500, 60, 42, "x").unwrap();
    let b = relative_efficiency(&sp, &ns, q, 500, 60, 42, "x").unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.sigma0.to_bits(), b.sigma0.to_bits());
    let c = relative_efficiency(&sp, &ns, q, 500, 60, 43, "x").unwrap();
    assert_ne!(a.sigma0.to_bits(), c.sigma0.to_bits());

    let id = ParamId { level: 0, sublayer: 0, angle: Angle::Alpha };
    let g1 = gradient_efficiency(&m, &input, id, 50, 40, 3).unwrap();
    let g2 = gradient_efficiency(&m, &input, id, 50, 40, 3).unwrap();
    assert_eq!(serde_json::to_string(&g1).unwrap(), serde_json::to_string(&g2).unwrap());
    assert_eq!(g1.context, "gradient:L0.k0.alpha");
}

#[test]
fn stationary_gradient_report_is_well_formed() {
    let m = SpQcnnModel::zeros(build_split_plan(8, &[2, 2, 2]).unwrap(), 1);
    let input = PureState::zero(8).unwrap();
    let id = ParamId { level: 1, sublayer: 0, angle: Angle::Gamma };
    let g = gradient_estimates(&m, &input, id, 100, 200, 11).unwrap();
    assert_eq!(g.exact, 0.0);
    assert!(g.nonsplit.mean.abs() < 4.0 * g.nonsplit.sem() + 1e-12);
    assert!(g.split.mean.abs() < 4.0 * g.split.sem() + 1e-12);
    let r = gradient_efficiency(&m, &input, id, 100, 200, 11).unwrap();
    assert!(r.r > 0.0 && r.r.is_finite());
    assert_eq!(r.n_reps, 200);
}

#[test]
fn gradient_estimators_share_budget_and_mean() {
    let plan = build_split_plan(8, &[2, 2, 2]).unwrap();
    let m = SpQcnnModel::random(plan, 2, &mut substream(12, 0));
    let input = random_symmetric_state(8, &mut substream(12, 1)).unwrap();
    for id in [
        ParamId { level: 0, sublayer: 0, angle: Angle::Alpha },
        ParamId { level: 1, sublayer: 1, angle: Angle::Delta },
        ParamId { level: 2, sublayer: 0, angle: Angle::Beta },
    ] {
        let g = gradient_estimates(&m, &input, id, 200, 2000, 13).unwrap();
        assert_eq!(g.budget, 2 * m.m_theta(id) * 200);
        let oracle = grad_per_instance(&m.as_nonsplit(), &input, m.param_index(id).unwrap()).unwrap();
        assert!((g.exact - oracle).abs() < 1e-10, "{id}: {} vs {oracle}", g.exact);
        for s in [&g.nonsplit, &g.split] {
            assert!((s.mean - oracle).abs() < 4.0 * s.sem() + 1e-12, "{id}: {} vs {oracle}", s.mean);
        }
    }
}

#[test]
fn gradient_efficiency_grows_with_n() {
    let mut mean_r = Vec::new();
    for (n, primes) in [(8, vec![2, 2, 2]), (16, vec![2, 2, 2, 2])] {
        let id = ParamId { level: 0, sublayer: 0, angle: Angle::Alpha };
        let rs: Vec<f64> = (0..6)
            .map(|seed| {
                let m = SpQcnnModel::random(build_split_plan(n, &primes).unwrap(), 2, &mut substream(14, seed));
                let input = random_symmetric_state(n, &mut substream(15, seed)).unwrap();
                gradient_efficiency(&m, &input, id, 1000, 400, seed).unwrap().r
            })
            .collect();
        mean_r.push(rs.iter().sum::<f64>() / rs.len() as f64);
    }
    assert!(mean_r[1] > mean_r[0], "{mean_r:?}");
}
