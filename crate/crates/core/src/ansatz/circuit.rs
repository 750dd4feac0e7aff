//! Compiled parametrized circuits.
//!
//! A circuit is a list of ops; each op is a product of mutually commuting
//! Pauli rotations `∏_g exp(-iθ P_g)` sharing one parameter `θ`. Every
//! generator `P_g` is one gate instance. Shifting a single instance by `δ`
//! is exact as an extra `exp(-iδ P_g)` right after its op, because all
//! generators of an op commute.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::qsim::{apply_diag_phase, rotate, rotate_x, PauliMasks, PauliString, PureState};

/// Diagonal observable measured at the end of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// `(1/n) Σ_j Z_j`.
    Zavg,
    /// `Z_q`.
    Z(usize),
}

impl Observable {
    #[inline]
    pub fn weight(self, n_qubits: usize, b: usize) -> f64 {
        match self {
            Observable::Zavg => {
                let n = n_qubits as f64;
                (n - 2.0 * b.count_ones() as f64) / n
            }
            Observable::Z(q) => {
                if (b >> q) & 1 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    pub fn evaluate(self, state: &PureState) -> f64 {
        let n = state.n_qubits();
        state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(b, a)| a.norm_sqr() * self.weight(n, b))
            .sum()
    }
}

/// One gate instance of an op.
#[derive(Debug, Clone)]
pub struct Instance {
    pub pauli: PauliString,
    pub masks: PauliMasks,
    /// Branch (sp circuits) or pair (conventional circuits) holding the gate.
    pub group: usize,
}

#[derive(Debug, Clone)]
enum Body {
    /// X rotations on distinct qubits.
    XBatch { qubits: Vec<usize> },
    /// Commuting diagonal generators; `eig[b] = Σ_g ⟨b|P_g|b⟩`.
    Diagonal { eig: Arc<Vec<i8>>, span: usize },
    /// One arbitrary Pauli rotation.
    Single,
}

#[derive(Debug, Clone)]
pub struct Op {
    pub param: usize,
    pub level: usize,
    pub instances: Vec<Instance>,
    body: Body,
}

/// Request to offset one gate instance by `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shift {
    pub op: usize,
    pub instance: usize,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct Circuit {
    n_qubits: usize,
    n_params: usize,
    ops: Vec<Op>,
    diag_cache: HashMap<Vec<(u64, u32)>, Arc<Vec<i8>>>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_params: usize) -> Self {
        Self { n_qubits, n_params, ops: Vec::new(), diag_cache: HashMap::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// `∏_q exp(-iθ X_q)` over `(qubit, group)` pairs.
    pub fn push_x_batch(&mut self, param: usize, level: usize, gates: Vec<(usize, usize)>) {
        let instances = gates
            .iter()
            .map(|&(q, group)| {
                let pauli = PauliString::single(q, crate::qsim::Axis::X);
                Instance { masks: pauli.masks(), pauli, group }
            })
            .collect();
        let qubits = gates.iter().map(|g| g.0).collect();
        self.push(param, level, instances, Body::XBatch { qubits });
    }

    /// `∏_g exp(-iθ P_g)` for diagonal, mutually commuting `P_g`.
    pub fn push_diagonal_batch(&mut self, param: usize, level: usize, gates: Vec<(PauliString, usize)>) {
        assert!(gates.len() <= i8::MAX as usize, "too many generators in one diagonal op");
        let instances: Vec<Instance> = gates
            .into_iter()
            .map(|(pauli, group)| {
                let masks = pauli.masks();
                assert!(masks.is_diagonal(), "non-diagonal generator in diagonal batch");
                Instance { pauli, masks, group }
            })
            .collect();
        let key: Vec<(u64, u32)> = instances.iter().map(|i| (i.masks.z, i.masks.n_y)).collect();
        let dim = 1usize << self.n_qubits;
        let eig = self
            .diag_cache
            .entry(key)
            .or_insert_with(|| {
                Arc::new(
                    (0..dim)
                        .map(|b| instances.iter().map(|i| i.masks.diag_sign(b) as i8).sum())
                        .collect(),
                )
            })
            .clone();
        let span = instances.len();
        self.push(param, level, instances, Body::Diagonal { eig, span });
    }

    /// Single rotation `exp(-iθ P)`.
    pub fn push_single(&mut self, param: usize, level: usize, pauli: PauliString, group: usize) {
        let masks = pauli.masks();
        self.push(param, level, vec![Instance { pauli, masks, group }], Body::Single);
    }

    fn push(&mut self, param: usize, level: usize, instances: Vec<Instance>, body: Body) {
        assert!(param < self.n_params, "parameter index {param} out of range");
        for inst in &instances {
            inst.pauli.check_for(self.n_qubits).expect("gate outside register");
        }
        self.ops.push(Op { param, level, instances, body });
    }

    /// Every `(op, instance)` carrying parameter `param`.
    pub fn instances_of(&self, param: usize) -> Vec<(usize, usize)> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, op)| op.param == param)
            .flat_map(|(k, op)| (0..op.instances.len()).map(move |i| (k, i)))
            .collect()
    }

    fn apply_op(&self, k: usize, theta: f64, amps: &mut [Complex64]) {
        let op = &self.ops[k];
        match &op.body {
            Body::XBatch { qubits } => {
                let (s, c) = theta.sin_cos();
                for &q in qubits {
                    rotate_x(amps, q, c, s);
                }
            }
            Body::Diagonal { eig, span } => apply_diag_phase(amps, eig, *span, theta),
            Body::Single => rotate(amps, &op.instances[0].masks, theta),
        }
    }

    /// Runs the circuit in place.
    pub fn run(&self, params: &[f64], state: &mut PureState) {
        self.run_shifted(params, state, &[]);
    }

    /// Runs the circuit with the given instance offsets applied.
    pub fn run_shifted(&self, params: &[f64], state: &mut PureState, shifts: &[Shift]) {
        self.check(params, state);
        let amps = state.amplitudes_mut();
        for k in 0..self.ops.len() {
            self.apply_op(k, params[self.ops[k].param], amps);
            for s in shifts.iter().filter(|s| s.op == k) {
                rotate(amps, &self.ops[k].instances[s.instance].masks, s.delta);
            }
        }
    }

    pub fn output(&self, params: &[f64], input: &PureState) -> PureState {
        let mut s = input.clone();
        self.run(params, &mut s);
        s
    }

    pub fn expectation(&self, params: &[f64], input: &PureState, obs: Observable) -> f64 {
        obs.evaluate(&self.output(params, input))
    }

    /// Output states for several shift sets, sharing one forward sweep for
    /// the unshifted prefix of each set.
    pub fn shifted_outputs(&self, params: &[f64], input: &PureState, sets: &[Vec<Shift>]) -> Vec<PureState> {
        let mut order: Vec<usize> = (0..sets.len()).collect();
        let first = |i: usize| sets[i].iter().map(|s| s.op).min().unwrap_or(self.ops.len());
        order.sort_by_key(|&i| first(i));
        let mut out: Vec<Option<PureState>> = vec![None; sets.len()];
        let mut state = input.clone();
        self.check(params, &state);
        let mut done = 0usize;
        for &i in &order {
            let start = first(i);
            while done < start.min(self.ops.len()) {
                self.apply_op(done, params[self.ops[done].param], state.amplitudes_mut());
                done += 1;
            }
            let mut s = state.clone();
            let amps = s.amplitudes_mut();
            for k in start..self.ops.len() {
                self.apply_op(k, params[self.ops[k].param], amps);
                for sh in sets[i].iter().filter(|sh| sh.op == k) {
                    rotate(amps, &self.ops[k].instances[sh.instance].masks, sh.delta);
                }
            }
            out[i] = Some(s);
        }
        out.into_iter().map(|s| s.expect("every set evaluated")).collect()
    }

    /// Exact value and gradient of `⟨obs⟩` with respect to every parameter,
    /// by reverse-mode (adjoint) propagation.
    pub fn gradient(&self, params: &[f64], input: &PureState, obs: Observable) -> (f64, Vec<f64>) {
        let psi_state = self.output(params, input);
        let n = self.n_qubits;
        let mut psi = psi_state.into_amplitudes();
        let mut lam: Vec<Complex64> =
            psi.iter().enumerate().map(|(b, a)| a * obs.weight(n, b)).collect();
        let value: f64 = psi.iter().zip(&lam).map(|(a, l)| (a.conj() * l).re).sum();
        let mut grad = vec![0.0; self.n_params];

        for op in self.ops.iter().rev() {
            let theta = params[op.param];
            let d = match &op.body {
                Body::XBatch { qubits } => {
                    let (s, c) = theta.sin_cos();
                    let mut acc = 0.0;
                    for &q in qubits {
                        acc += x_overlap_im(&lam, &psi, q);
                        rotate_x(&mut psi, q, c, -s);
                        rotate_x(&mut lam, q, c, -s);
                    }
                    acc
                }
                Body::Diagonal { eig, span } => {
                    let acc: f64 = lam
                        .iter()
                        .zip(&psi)
                        .zip(eig.iter())
                        .map(|((l, p), &e)| (l.conj() * p).im * e as f64)
                        .sum();
                    apply_diag_phase(&mut psi, eig, *span, -theta);
                    apply_diag_phase(&mut lam, eig, *span, -theta);
                    acc
                }
                Body::Single => {
                    let m = &op.instances[0].masks;
                    let x = m.x as usize;
                    let acc: f64 = lam
                        .iter()
                        .enumerate()
                        .map(|(b, l)| {
                            let j = b ^ x;
                            (l.conj() * m.phase(j) * psi[j]).im
                        })
                        .sum();
                    rotate(&mut psi, m, -theta);
                    rotate(&mut lam, m, -theta);
                    acc
                }
            };
            grad[op.param] += 2.0 * d;
        }
        (value, grad)
    }

    fn check(&self, params: &[f64], state: &PureState) {
        assert_eq!(params.len(), self.n_params, "parameter vector length");
        assert_eq!(state.n_qubits(), self.n_qubits, "register size");
    }
}

/// `Im Σ_b conj(λ_b) ψ_{b ⊕ 2^q}`.
fn x_overlap_im(lam: &[Complex64], psi: &[Complex64], q: usize) -> f64 {
    let bit = 1usize << q;
    let mut acc = 0.0;
    for base in (0..psi.len()).step_by(bit << 1) {
        for b in base..base + bit {
            let j = b | bit;
            acc += (lam[b].conj() * psi[j]).im + (lam[j].conj() * psi[b]).im;
        }
    }
    acc
}
