#![allow(dead_code)]

use num_complex::Complex64;
use spqcnn_core::ansatz::{Angle, SpQcnnModel};
use spqcnn_core::qsim::{apply_pauli_rotation, Axis, PauliString, PureState, StepKind};

/// Cluster state `2^{-n/2} Σ_b (-1)^{Σ_j b_j b_{j+1}} |b⟩` on a periodic ring.
pub fn cluster_state(n: usize) -> PureState {
    let amp = (0.5f64).powf(n as f64 / 2.0);
    let amps = (0..1usize << n)
        .map(|b| {
            let bonds = (0..n).filter(|&j| (b >> j) & 1 == 1 && (b >> ((j + 1) % n)) & 1 == 1).count();
            Complex64::new(if bonds % 2 == 0 { amp } else { -amp }, 0.0)
        })
        .collect();
    PureState::from_amplitudes(amps).unwrap()
}

/// Applies an sp model gate by gate: one `exp(-iθP)` call per Pauli.
pub fn sp_gate_by_gate(model: &SpQcnnModel, input: &PureState, split: bool) -> PureState {
    let mut s = input.clone();
    let plan = model.plan();
    for (level, layer) in model.layers().iter().enumerate() {
        let rings = if split { plan.rings(level).to_vec() } else { vec![plan.rings(level)[0].clone()] };
        for k in 0..layer.depth() {
            for angle in Angle::ALL {
                let theta = layer.get(k, angle);
                for ring in &rings {
                    let qs = ring.qubits();
                    let gates: Vec<PauliString> = match angle.step() {
                        StepKind::X => qs.iter().map(|&q| PauliString::single(q, Axis::X)).collect(),
                        StepKind::Z => qs.iter().map(|&q| PauliString::single(q, Axis::Z)).collect(),
                        StepKind::ZZ => match qs.len() {
                            1 => vec![],
                            2 => vec![PauliString::zz(qs[0], qs[1])],
                            w => (0..w).map(|i| PauliString::zz(qs[i], qs[(i + 1) % w])).collect(),
                        },
                    };
                    for g in gates {
                        apply_pauli_rotation(&mut s, &g, theta).unwrap();
                    }
                }
            }
        }
    }
    s
}

/// `⟨Z_q⟩` computed from probabilities.
pub fn z_of(state: &PureState, q: usize) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(b, a)| if (b >> q) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}
