mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use spqcnn_core::ansatz::*;
use spqcnn_core::qsim::*;
use spqcnn_core::rng::substream;

fn set(r: &QubitRing) -> BTreeSet<usize> {
    r.qubits().iter().copied().collect()
}

fn max_amp_diff(a: &PureState, b: &PureState) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_product_state(n: usize, seed: u64) -> PureState {
    let mut rng = substream(seed, 1);
    let mut s = PureState::zero(n).unwrap();
    for q in 0..n {
        use rand::Rng;
        let (a, b): (f64, f64) = (rng.random_range(0.0..3.2), rng.random_range(0.0..6.3));
        apply_pauli_rotation(&mut s, &PauliString::single(q, Axis::Y), a).unwrap();
        apply_pauli_rotation(&mut s, &PauliString::single(q, Axis::Z), b).unwrap();
    }
    s
}

#[test]
fn plan_n16_binary() {
    let plan = build_split_plan(16, &[2, 2, 2, 2]).unwrap();
    assert_eq!(plan.widths(), vec![16, 8, 4, 2, 1]);
    assert_eq!(plan.rings(1)[0].qubits(), &[0, 2, 4, 6, 8, 10, 12, 14]);
    assert_eq!(plan.rings(1)[1].qubits(), &[1, 3, 5, 7, 9, 11, 13, 15]);
    assert_eq!(plan.n_layers(), 4);
    assert_eq!(plan.readout(), 0);
}

#[test]
fn plan_n18_mixed() {
    let plan = build_split_plan(18, &[2, 3, 3]).unwrap();
    assert_eq!(plan.widths(), vec![18, 9, 3, 1]);
}

#[test]
fn plan_n4_by_hand() {
    let plan = build_split_plan(4, &[2, 2]).unwrap();
    let l1: Vec<_> = plan.rings(1).iter().map(|r| r.qubits().to_vec()).collect();
    assert_eq!(l1, vec![vec![0, 2], vec![1, 3]]);
    let l2: Vec<_> = plan.rings(2).iter().map(|r| r.qubits().to_vec()).collect();
    assert_eq!(l2, vec![vec![0], vec![2], vec![1], vec![3]]);
}

#[test]
fn plan_rejects_bad_factorizations() {
    for (n, primes) in [(12, vec![2, 2]), (8, vec![4, 2]), (6, vec![2, 2]), (9, vec![3, 2]), (0, vec![])] {
        assert!(matches!(build_split_plan(n, &primes), Err(ModelError::Plan(_))), "{n} {primes:?}");
    }
}

#[test]
fn children_partition_parents() {
    for (n, primes) in [(16, vec![2, 2, 2, 2]), (12, vec![3, 2, 2]), (12, vec![2, 3, 2]), (18, vec![2, 3, 3]), (15, vec![5, 3])] {
        let plan = build_split_plan(n, &primes).unwrap();
        for (level, &p) in primes.iter().enumerate() {
            let parents = plan.rings(level);
            let children = plan.rings(level + 1);
            assert_eq!(children.len(), parents.len() * p);
            for (i, parent) in parents.iter().enumerate() {
                let kids = &children[i * p..(i + 1) * p];
                let mut union = BTreeSet::new();
                for k in kids {
                    let s = set(k);
                    assert!(union.is_disjoint(&s));
                    union.extend(s);
                }
                assert_eq!(union, set(parent));
            }
        }
        assert!(plan.rings(primes.len()).iter().all(|r| r.len() == 1));
    }
}

#[test]
fn translating_level0_rotates_branches() {
    for (n, primes) in [(16, vec![2, 2, 2, 2]), (12, vec![3, 2, 2]), (18, vec![2, 3, 3])] {
        let plan = build_split_plan(n, &primes).unwrap();
        let p = primes[0];
        let branches = plan.rings(1);
        for j in 0..p {
            let moved: BTreeSet<usize> = branches[j].qubits().iter().map(|&q| (q + 1) % n).collect();
            assert_eq!(moved, set(&branches[(j + 1) % p]));
        }
    }
}

#[test]
fn parameter_counts() {
    let m = SpQcnnModel::zeros(build_split_plan(8, &[2, 2, 2]).unwrap(), 10);
    assert!(m.layers().iter().all(|l| l.n_params() == 40));
    assert_eq!(SpQcnnModel::zeros(build_split_plan(8, &[2, 2, 2]).unwrap(), 5).n_params(), 60);
    assert_eq!(SpQcnnModel::zeros(build_split_plan(16, &[2, 2, 2, 2]).unwrap(), 5).n_params(), 80);
    assert!(SpQcnnModel::new(build_split_plan(8, &[2, 2, 2]).unwrap(), vec![SymLayerParams::zeros(2); 2]).is_err());
}

#[test]
fn zero_angles_are_identity() {
    let input = haar_random_state(8, &mut substream(1, 0)).unwrap();
    let m = SpQcnnModel::zeros(build_split_plan(8, &[2, 2, 2]).unwrap(), 3);
    assert!(max_amp_diff(&forward_sp(&m, &input).unwrap(), &input) < 1e-14);
    let (out, readout) = forward_nonsplit(&m, &input).unwrap();
    assert!(max_amp_diff(&out, &input) < 1e-14);
    assert_eq!(readout, 0);
    let c = ConvQcnnModel::zeros(8).unwrap();
    let (out, readout) = forward_conventional(&c, &input).unwrap();
    assert!(max_amp_diff(&out, &input) < 1e-14);
    assert_eq!(readout, 0);
}

#[test]
fn identity_zavg_examples() {
    let m = SpQcnnModel::zeros(build_split_plan(6, &[3, 2]).unwrap(), 2);
    assert!((output_zavg(&m, &PureState::zero(6).unwrap()).unwrap() - 1.0).abs() < 1e-14);
    assert!(output_zavg(&m, &PureState::ghz(6).unwrap()).unwrap().abs() < 1e-14);
}

#[test]
fn dimension_mismatch_is_an_error() {
    let m = SpQcnnModel::zeros(build_split_plan(8, &[2, 2, 2]).unwrap(), 1);
    let s = PureState::zero(6).unwrap();
    assert!(matches!(forward_sp(&m, &s), Err(ModelError::Dimension { expected: 8, got: 6 })));
    assert!(forward_nonsplit(&m, &s).is_err());
    assert!(forward_conventional(&ConvQcnnModel::zeros(8).unwrap(), &s).is_err());
}

#[test]
fn symmetric_input_gives_uniform_z() {
    for (n, primes) in [(8, vec![2, 2, 2]), (12, vec![3, 2, 2]), (9, vec![3, 3])] {
        let m = SpQcnnModel::random(build_split_plan(n, &primes).unwrap(), 3, &mut substream(2, n as u64));
        let input = random_symmetric_state(n, &mut substream(3, n as u64)).unwrap();
        let zs = z_expectations(&forward_sp(&m, &input).unwrap());
        assert!(zs.iter().all(|z| (z - zs[0]).abs() < 1e-10), "{zs:?}");
    }
}

#[test]
fn forward_matches_gate_by_gate_oracle() {
    for (n, primes, d) in [(8, vec![2, 2, 2], 4), (12, vec![3, 2, 2], 2), (6, vec![2, 3], 3)] {
        let m = SpQcnnModel::random(build_split_plan(n, &primes).unwrap(), d, &mut substream(4, n as u64));
        let input = haar_random_state(n, &mut substream(5, n as u64)).unwrap();
        let fast = forward_sp(&m, &input).unwrap();
        assert!(max_amp_diff(&fast, &common::sp_gate_by_gate(&m, &input, true)) < 1e-12);
        let (ns, _) = forward_nonsplit(&m, &input).unwrap();
        assert!(max_amp_diff(&ns, &common::sp_gate_by_gate(&m, &input, false)) < 1e-12);
    }
}

#[test]
fn nonsplit_readout_equals_zavg_on_symmetric_inputs() {
    for (n, primes) in [(8, vec![2, 2, 2]), (12, vec![3, 2, 2]), (12, vec![2, 2, 3])] {
        for seed in 0..3 {
            let m = SpQcnnModel::random(build_split_plan(n, &primes).unwrap(), 4, &mut substream(6, seed));
            let input = random_symmetric_state(n, &mut substream(7, seed)).unwrap();
            let zavg = output_zavg(&m, &input).unwrap();
            let (out, readout) = forward_nonsplit(&m, &input).unwrap();
            let z1 = common::z_of(&out, readout);
            assert!((zavg - z1).abs() < 1e-10, "n={n} seed={seed}: {zavg} vs {z1}");
            assert!((m.as_nonsplit().output(&input).unwrap() - z1).abs() < 1e-12);
        }
    }
}

#[test]
fn nonsplit_equality_fails_without_symmetry() {
    let m = SpQcnnModel::random(build_split_plan(8, &[2, 2, 2]).unwrap(), 3, &mut substream(8, 0));
    let worst = (0..20)
        .map(|seed| {
            let input = random_product_state(8, seed);
            let (out, readout) = forward_nonsplit(&m, &input).unwrap();
            (output_zavg(&m, &input).unwrap() - common::z_of(&out, readout)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "largest gap {worst}");
}

#[test]
fn conventional_single_zz_level() {
    let theta = 0.37;
    let mut angles = [0.0; 15];
    angles[14] = theta;
    let m = ConvQcnnModel::from_levels(2, vec![angles]).unwrap();
    let input = haar_random_state(2, &mut substream(9, 0)).unwrap();
    let (out, readout) = forward_conventional(&m, &input).unwrap();
    let mut expect = input.clone();
    apply_pauli_rotation(&mut expect, &PauliString::zz(0, 1), theta).unwrap();
    assert!(max_amp_diff(&out, &expect) < 1e-14);
    assert_eq!(readout, 0);
}

/// Independent oracle: apply every pair gate as fifteen rotations in table order.
fn conventional_oracle(m: &ConvQcnnModel, input: &PureState) -> PureState {
    let mut s = input.clone();
    for level in m.levels() {
        for (a, b) in level.pairs() {
            for (j, (pa, pb)) in TWO_QUBIT_PAULIS.iter().enumerate() {
                let terms = pa.map(|x| (a, x)).into_iter().chain(pb.map(|x| (b, x))).collect();
                apply_pauli_rotation(&mut s, &PauliString::new(terms).unwrap(), level.params[j]).unwrap();
            }
        }
    }
    s
}

#[test]
fn conventional_layout_and_oracle() {
    let m8 = ConvQcnnModel::random(8, &mut substream(10, 0)).unwrap();
    assert_eq!(m8.levels().len(), 5);
    assert_eq!(m8.n_params(), 75);
    assert_eq!(ConvQcnnModel::zeros(16).unwrap().n_params(), 105);
    let mut prev = usize::MAX;
    for l in m8.levels() {
        assert!(l.keep_after.len() <= prev);
        prev = l.keep_after.len();
    }
    assert_eq!(m8.levels().last().unwrap().keep_after, vec![m8.readout()]);
    let input = haar_random_state(8, &mut substream(10, 1)).unwrap();
    let (out, _) = forward_conventional(&m8, &input).unwrap();
    assert!(max_amp_diff(&out, &conventional_oracle(&m8, &input)) < 1e-12);
}

#[test]
fn model_kind_names() {
    assert_eq!(ModelKind::SpQcnn.to_string(), "sp-qcnn");
    assert_eq!(ModelKind::Nonsplit.to_string(), "nonsplit-qcnn");
    assert_eq!(ModelKind::Conventional.to_string(), "conventional-qcnn");
}

#[test]
fn document_errors() {
    let m = SpQcnnModel::zeros(build_split_plan(4, &[2, 2]).unwrap(), 1);
    let json = ModelDocument::from(&m).to_json();
    assert!(ModelDocument::from_json(&json.replace("\"format_version\": 1", "\"format_version\": 9")).is_err());
    assert!(ModelDocument::from_json(&json.replace("\"n\": 4", "\"n\": 4, \"extra\": 0")).is_err());
    assert!(ModelDocument::from_json(&json).unwrap().into_conventional().is_err());
}

fn plans() -> impl Strategy<Value = (usize, Vec<usize>)> {
    prop_oneof![
        Just((4, vec![2, 2])),
        Just((6, vec![3, 2])),
        Just((6, vec![2, 3])),
        Just((8, vec![2, 2, 2])),
        Just((9, vec![3, 3])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sp_circuit_is_translation_equivariant((n, primes) in plans(), d in 1usize..4, seed in any::<u64>()) {
        let m = SpQcnnModel::random(build_split_plan(n, &primes).unwrap(), d, &mut substream(seed, 0));
        let input = haar_random_state(n, &mut substream(seed, 1)).unwrap();
        let ring = QubitRing::full(n);
        let a = forward_sp(&m, &translate(&input, &ring, 1).unwrap()).unwrap();
        let b = translate(&forward_sp(&m, &input).unwrap(), &ring, 1).unwrap();
        prop_assert!(max_amp_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn zavg_is_translation_invariant((n, primes) in plans(), shift in 0i64..9, seed in any::<u64>()) {
        let m = SpQcnnModel::random(build_split_plan(n, &primes).unwrap(), 2, &mut substream(seed, 0));
        let input = haar_random_state(n, &mut substream(seed, 1)).unwrap();
        let moved = translate(&input, &QubitRing::full(n), shift).unwrap();
        prop_assert!((output_zavg(&m, &input).unwrap() - output_zavg(&m, &moved).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn sp_documents_roundtrip_bit_exact((n, primes) in plans(), d in 0usize..4, seed in any::<u64>()) {
        let m = SpQcnnModel::random(build_split_plan(n, &primes).unwrap(), d, &mut substream(seed, 0));
        let back = ModelDocument::from_json(&ModelDocument::from(&m).to_json()).unwrap().into_sp().unwrap();
        let bits = |v: Vec<f64>| v.into_iter().map(f64::to_bits).collect::<Vec<_>>();
        prop_assert_eq!(bits(back.params()), bits(m.params()));
        prop_assert_eq!(back, m);
    }

    #[test]
    fn conv_documents_roundtrip_bit_exact(n in 2usize..9, seed in any::<u64>()) {
        let m = ConvQcnnModel::random(n, &mut substream(seed, 0)).unwrap();
        let back = ModelDocument::from_json(&ModelDocument::from(&m).to_json()).unwrap().into_conventional().unwrap();
        prop_assert_eq!(back, m);
    }
}
