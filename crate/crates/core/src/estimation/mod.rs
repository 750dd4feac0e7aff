//! Shot-based estimators of `⟨Z_q⟩` and `⟨Z_avg⟩` and the repeated-experiment
//! measurement-efficiency protocol.
//!
//! Each shot is drawn from the exact distribution of the measured quantity
//! (`z_avg` or `z_q`), which has the same law as sampling a full bitstring
//! and reducing it.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{ModelError, Observable, ParamId, Qcnn, SpQcnnModel};
use crate::qsim::{OutcomeDistribution, PureState, SimError};
use crate::rng::{stream_id, substream, StreamRng};
use crate::training::{parallel_term, per_instance_terms, sample_from_terms, term_distributions, ShiftScope, TrainError};

pub const MIN_REPS: usize = 30;

#[derive(Debug, thiserror::Error)]
pub enum EstimationError {
    #[error("need at least {MIN_REPS} repetitions, got {0}")]
    TooFewReps(usize),
    #[error("need at least one shot")]
    NoShots,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// Mean of `n_shots` single-shot values of `z_avg`.
pub fn estimate_zavg<R: Rng + ?Sized>(state: &PureState, n_shots: usize, rng: &mut R) -> f64 {
    OutcomeDistribution::zavg(state).sample_mean(n_shots, rng)
}

/// Mean of `n_shots` single-shot values of `z_q`.
pub fn estimate_z1<R: Rng + ?Sized>(state: &PureState, qubit: usize, n_shots: usize, rng: &mut R) -> Result<f64, SimError> {
    if qubit >= state.n_qubits() {
        return Err(SimError::QubitOutOfRange { qubit, n_qubits: state.n_qubits() });
    }
    Ok(OutcomeDistribution::z_qubit(state, qubit).sample_mean(n_shots, rng))
}

/// Exact variance of a single `z_avg` shot.
pub fn single_shot_zavg_variance(state: &PureState) -> f64 {
    OutcomeDistribution::zavg(state).variance()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorStats {
    pub per_rep: Vec<f64>,
    pub mean: f64,
    /// Unbiased sample variance across repetitions.
    pub variance: f64,
}

impl EstimatorStats {
    pub fn from_estimates(per_rep: Vec<f64>) -> Self {
        let m = per_rep.len() as f64;
        let mean = per_rep.iter().sum::<f64>() / m;
        let variance = if per_rep.len() > 1 {
            per_rep.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        Self { per_rep, mean, variance }
    }

    pub fn std(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Standard error of the mean.
    pub fn sem(&self) -> f64 {
        (self.variance / self.per_rep.len() as f64).sqrt()
    }
}

/// Runs `estimate` once per repetition, each on its own substream.
pub fn repeat_estimates<F>(n_reps: usize, seed: u64, tag: u64, estimate: F) -> EstimatorStats
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    let per_rep = (0..n_reps as u64)
        .into_par_iter()
        .map(|r| estimate(&mut substream(seed, stream_id(&[tag, r]))))
        .collect();
    EstimatorStats::from_estimates(per_rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub context: String,
    pub n: usize,
    pub n_shots: usize,
    pub n_reps: usize,
    pub sigma0: f64,
    pub sigma_sp: f64,
    /// `(σ₀/σ_sp)²`; `+∞` when `σ_sp = 0`.
    pub r: f64,
    pub seed: u64,
    #[serde(skip)]
    pub zero_variance: bool,
}

impl EfficiencyReport {
    pub fn from_stats(
        context: impl Into<String>,
        n: usize,
        n_shots: usize,
        ns: &EstimatorStats,
        sp: &EstimatorStats,
        seed: u64,
    ) -> Self {
        let zero_variance = sp.variance == 0.0;
        let r = if zero_variance {
            if ns.variance > 0.0 {
                f64::INFINITY
            } else {
                f64::NAN
            }
        } else {
            ns.variance / sp.variance
        };
        Self {
            context: context.into(),
            n,
            n_shots,
            n_reps: ns.per_rep.len(),
            sigma0: ns.std(),
            sigma_sp: sp.std(),
            r,
            seed,
            zero_variance,
        }
    }
}

const NS_TAG: u64 = 0x4E53;
const SP_TAG: u64 = 0x5350;

fn check_counts(n_shots: usize, n_reps: usize) -> Result<(), EstimationError> {
    if n_shots == 0 {
        return Err(EstimationError::NoShots);
    }
    if n_reps < MIN_REPS {
        return Err(EstimationError::TooFewReps(n_reps));
    }
    Ok(())
}

/// `σ₀` from `Z_readout` on the nonsplitting output, `σ_sp` from `Z_avg` on
/// the sp output, both at `n_shots` per repetition.
pub fn relative_efficiency(
    sp_output: &PureState,
    ns_output: &PureState,
    ns_readout: usize,
    n_shots: usize,
    n_reps: usize,
    seed: u64,
    context: &str,
) -> Result<EfficiencyReport, EstimationError> {
    check_counts(n_shots, n_reps)?;
    if ns_readout >= ns_output.n_qubits() {
        return Err(SimError::QubitOutOfRange { qubit: ns_readout, n_qubits: ns_output.n_qubits() }.into());
    }
    let d0 = OutcomeDistribution::z_qubit(ns_output, ns_readout);
    let dsp = OutcomeDistribution::zavg(sp_output);
    let ns = repeat_estimates(n_reps, seed, NS_TAG, |rng| d0.sample_mean(n_shots, rng));
    let sp = repeat_estimates(n_reps, seed, SP_TAG, |rng| dsp.sample_mean(n_shots, rng));
    Ok(EfficiencyReport::from_stats(context, sp_output.n_qubits(), n_shots, &ns, &sp, seed))
}

/// Repeated sampled estimates of `∂⟨·⟩/∂θ` for parameter `id`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimates {
    /// Per-instance estimator on the nonsplitting circuit.
    pub nonsplit: EstimatorStats,
    /// Parallelized estimator on the sp circuit.
    pub split: EstimatorStats,
    /// Exact common value.
    pub exact: f64,
    /// Total shots spent per repetition by each estimator.
    pub budget: usize,
}

/// Both estimators spend `2 m_θ n_shots` shots: the nonsplitting one over
/// `2 m_θ` circuits, the sp one over two circuits.
pub fn gradient_estimates(
    model: &SpQcnnModel,
    input: &PureState,
    id: ParamId,
    n_shots: usize,
    n_reps: usize,
    seed: u64,
) -> Result<GradientEstimates, EstimationError> {
    check_counts(n_shots, n_reps)?;
    model.check_input(input)?;
    let param = model.param_index(id)?;
    let params = model.params();
    let m = model.m_theta(id);

    let ns_model = model.as_nonsplit();
    let ns_c = ns_model.circuit();
    let ns_terms = per_instance_terms(&ns_c, param, n_shots);
    let ns_obs = ns_model.observable();
    let ns_d = term_distributions(&ns_c, &params, input, ns_obs, &ns_terms);

    let sp_c = model.split_circuit();
    let (sp_term, _) = parallel_term(model, &sp_c, id, ShiftScope::EveryBranch, m * n_shots)?;
    let sp_terms = [sp_term];
    let sp_d = term_distributions(&sp_c, &params, input, Observable::Zavg, &sp_terms);

    let budget = 2 * m * n_shots;
    debug_assert_eq!(ns_terms.iter().map(|t| 2 * t.shots).sum::<usize>(), budget);
    let np = params.len();
    let nonsplit = repeat_estimates(n_reps, seed, NS_TAG, |rng| sample_from_terms(&ns_terms, &ns_d, np, rng)[param]);
    let split = repeat_estimates(n_reps, seed, SP_TAG, |rng| sample_from_terms(&sp_terms, &sp_d, np, rng)[param]);
    let exact = sp_terms[0].weight * (sp_d[0].0.mean() - sp_d[0].1.mean());
    Ok(GradientEstimates { nonsplit, split, exact, budget })
}

pub fn gradient_efficiency(
    model: &SpQcnnModel,
    input: &PureState,
    id: ParamId,
    n_shots: usize,
    n_reps: usize,
    seed: u64,
) -> Result<EfficiencyReport, EstimationError> {
    let g = gradient_estimates(model, input, id, n_shots, n_reps, seed)?;
    Ok(EfficiencyReport::from_stats(
        format!("gradient:{id}"),
        model.n_qubits(),
        n_shots,
        &g.nonsplit,
        &g.split,
        seed,
    ))
}
