use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::ansatz::{Circuit, ConvQcnnModel, Nonsplit, Observable, ParamId, Qcnn, Shift, SpQcnnModel};
use crate::qsim::{is_translation_symmetric, OutcomeDistribution, PureState};
use crate::tolerance::TOL;

/// Shift used by the parameter-shift rule for `exp(-iθP)`.
pub const SHIFT: f64 = FRAC_PI_4;

/// How a parameter's gradient is assembled from shifted circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientScheme {
    /// Two circuits with one representative gate shifted, rescaled.
    Parallelized,
    /// Two circuits for every gate instance sharing the parameter.
    PerInstance,
}

/// Which representative gates the parallelized estimator shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftScope {
    /// First gate of every branch at the parameter's level; prefactor `m_θ/n`.
    EveryBranch,
    /// First gate of the branch holding qubit 0 only; prefactor `m_θ/w` for
    /// branch width `w`.
    SingleInstance,
}

/// One `±` pair of shifted circuits contributing `weight·(⟨O⟩₊ − ⟨O⟩₋)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftTerm {
    pub param: usize,
    pub plus: Vec<Shift>,
    pub minus: Vec<Shift>,
    pub weight: f64,
    /// Shots per shifted circuit when sampled.
    pub shots: usize,
}

impl ShiftTerm {
    fn new(param: usize, at: &[(usize, usize)], weight: f64, shots: usize) -> Self {
        let mk = |delta| at.iter().map(|&(op, instance)| Shift { op, instance, delta }).collect();
        Self { param, plus: mk(SHIFT), minus: mk(-SHIFT), weight, shots }
    }
}

/// One term per gate instance carrying `param`.
pub fn per_instance_terms(circuit: &Circuit, param: usize, shots: usize) -> Vec<ShiftTerm> {
    circuit
        .instances_of(param)
        .into_iter()
        .map(|g| ShiftTerm::new(param, &[g], 1.0, shots))
        .collect()
}

/// Representative-gate term for an sp parameter, with the prefactor written
/// against `Σ_j [⟨Z_j⟩₊ − ⟨Z_j⟩₋]`.
pub fn parallel_term(
    model: &SpQcnnModel,
    circuit: &Circuit,
    id: ParamId,
    scope: ShiftScope,
    shots: usize,
) -> Result<(ShiftTerm, f64), TrainError> {
    let param = model.param_index(id)?;
    let instances = circuit.instances_of(param);
    let n_branches = model.plan().rings(id.level).len();
    let mut reps: Vec<(usize, usize)> = Vec::new();
    for b in 0..n_branches {
        let first = instances
            .iter()
            .copied()
            .find(|&(op, i)| circuit.ops()[op].instances[i].group == b)
            .ok_or_else(|| TrainError::Unsupported(format!("no gate for {id} in branch {b}")))?;
        reps.push(first);
        if scope == ShiftScope::SingleInstance {
            break;
        }
    }
    let n = model.n_qubits() as f64;
    let m = model.m_theta(id) as f64;
    let prefactor = match scope {
        ShiftScope::EveryBranch => m / n,
        ShiftScope::SingleInstance => m / model.plan().width(id.level) as f64,
    };
    // ⟨Z_avg⟩ = (1/n) Σ_j ⟨Z_j⟩
    Ok((ShiftTerm::new(param, &reps, prefactor * n, shots), prefactor))
}

/// Models whose gradients can be assembled from [`ShiftTerm`]s.
pub trait Trainable: Qcnn {
    /// Terms for every parameter, in parameter order.
    fn gradient_terms(&self, circuit: &Circuit, scheme: GradientScheme, n_shot: usize) -> Result<Vec<ShiftTerm>, TrainError> {
        match scheme {
            GradientScheme::PerInstance => Ok((0..self.n_params())
                .flat_map(|p| per_instance_terms(circuit, p, n_shot))
                .collect()),
            GradientScheme::Parallelized => Err(TrainError::Unsupported(format!(
                "parallelized gradients need an sp model, not {}",
                self.kind()
            ))),
        }
    }

    /// Gate instances sharing flat parameter `param` within one branch.
    fn m_theta_of(&self, circuit: &Circuit, param: usize) -> usize {
        circuit.instances_of(param).len()
    }
}

impl Trainable for ConvQcnnModel {}
impl Trainable for Nonsplit {}

impl Trainable for SpQcnnModel {
    /// The parallelized scheme gives each parameter `m_θ·n_shot` shots per
    /// shifted circuit, matching the per-instance budget `2 m_θ n_shot`.
    fn gradient_terms(&self, circuit: &Circuit, scheme: GradientScheme, n_shot: usize) -> Result<Vec<ShiftTerm>, TrainError> {
        match scheme {
            GradientScheme::PerInstance => Ok((0..self.n_params())
                .flat_map(|p| per_instance_terms(circuit, p, n_shot))
                .collect()),
            GradientScheme::Parallelized => self
                .param_ids()
                .into_iter()
                .map(|id| {
                    let shots = self.m_theta(id) * n_shot;
                    parallel_term(self, circuit, id, ShiftScope::EveryBranch, shots).map(|t| t.0)
                })
                .collect(),
        }
    }

    fn m_theta_of(&self, _circuit: &Circuit, param: usize) -> usize {
        self.m_theta(self.param_ids()[param])
    }
}

fn distribution(obs: Observable, state: &PureState) -> OutcomeDistribution {
    match obs {
        Observable::Zavg => OutcomeDistribution::zavg(state),
        Observable::Z(q) => OutcomeDistribution::z_qubit(state, q),
    }
}

/// Shifted-circuit outcome distributions for every term, `(plus, minus)`.
pub fn term_distributions(
    circuit: &Circuit,
    params: &[f64],
    input: &PureState,
    obs: Observable,
    terms: &[ShiftTerm],
) -> Vec<(OutcomeDistribution, OutcomeDistribution)> {
    let sets: Vec<Vec<Shift>> = terms.iter().flat_map(|t| [t.plus.clone(), t.minus.clone()]).collect();
    let outs = circuit.shifted_outputs(params, input, &sets);
    outs.chunks(2)
        .map(|pm| (distribution(obs, &pm[0]), distribution(obs, &pm[1])))
        .collect()
}

/// Exact value of `Σ_terms weight·(⟨O⟩₊ − ⟨O⟩₋)` accumulated per parameter.
pub fn exact_from_terms(
    circuit: &Circuit,
    params: &[f64],
    input: &PureState,
    obs: Observable,
    terms: &[ShiftTerm],
) -> Vec<f64> {
    let mut g = vec![0.0; circuit.n_params()];
    for (t, (p, m)) in terms.iter().zip(term_distributions(circuit, params, input, obs, terms)) {
        g[t.param] += t.weight * (p.mean() - m.mean());
    }
    g
}

/// One shot-noise realization of the term estimator, per parameter.
pub fn sample_from_terms<R: Rng + ?Sized>(
    terms: &[ShiftTerm],
    dists: &[(OutcomeDistribution, OutcomeDistribution)],
    n_params: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut g = vec![0.0; n_params];
    for (t, (p, m)) in terms.iter().zip(dists) {
        g[t.param] += t.weight * (p.sample_mean(t.shots, rng) - m.sample_mean(t.shots, rng));
    }
    g
}

/// Exact `∂⟨O⟩/∂θ` by shifting every instance of `param` separately.
pub fn grad_per_instance<M: Qcnn>(model: &M, input: &PureState, param: usize) -> Result<f64, TrainError> {
    model.check_input(input)?;
    if param >= model.n_params() {
        return Err(TrainError::Unsupported(format!("parameter {param} out of range")));
    }
    let c = model.circuit();
    let terms = per_instance_terms(&c, param, 1);
    Ok(exact_from_terms(&c, &model.params(), input, model.observable(), &terms)[param])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradMode {
    Exact,
    /// Shots per shifted circuit.
    Sampled { n_shots: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelGradient {
    pub value: f64,
    /// Factor multiplying `Σ_j [z_j₊ − z_j₋]`.
    pub prefactor: f64,
    pub m_theta: usize,
    pub scope: ShiftScope,
}

/// Parallelized gradient of `⟨Z_avg⟩` from two shifted circuits. Requires a
/// translation-symmetric input.
pub fn grad_parallel<R: Rng + ?Sized>(
    model: &SpQcnnModel,
    input: &PureState,
    id: ParamId,
    mode: GradMode,
    scope: ShiftScope,
    rng: &mut R,
) -> Result<ParallelGradient, TrainError> {
    model.check_input(input)?;
    if !is_translation_symmetric(input, TOL.symmetry) {
        return Err(TrainError::NotSymmetric);
    }
    let c = model.split_circuit();
    let shots = match mode {
        GradMode::Exact => 1,
        GradMode::Sampled { n_shots } if n_shots >= 1 => n_shots,
        GradMode::Sampled { .. } => return Err(TrainError::Unsupported("zero shots".into())),
    };
    let (term, prefactor) = parallel_term(model, &c, id, scope, shots)?;
    let terms = [term];
    let dists = term_distributions(&c, &model.params(), input, Observable::Zavg, &terms);
    let (p, m) = &dists[0];
    let value = match mode {
        GradMode::Exact => terms[0].weight * (p.mean() - m.mean()),
        GradMode::Sampled { .. } => sample_from_terms(&terms, &dists, c.n_params(), rng)[terms[0].param],
    };
    Ok(ParallelGradient { value, prefactor, m_theta: model.m_theta(id), scope })
}
