use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gradients::{sample_from_terms, term_distributions, GradientScheme, ShiftTerm, Trainable};
use super::TrainError;
use crate::ansatz::{Circuit, ConvQcnnModel, ModelKind, Observable, Qcnn, SpQcnnModel};
use crate::estimation::EfficiencyReport;
use crate::qsim::{is_translation_symmetric, OutcomeDistribution, PureState};
use crate::rng::{stream_id, substream};
use crate::spin::LabeledSample;
use crate::tolerance::TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMode {
    Exact,
    Sampled,
}

impl std::fmt::Display for GradientMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GradientMode::Exact => "exact",
            GradientMode::Sampled => "sampled",
        })
    }
}

/// Affine map from circuit output to the value compared with the label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutMap {
    /// `f` against `y`.
    #[default]
    Identity,
    /// `1 - f` against `1 - y`.
    Complement,
}

impl ReadoutMap {
    fn output(self, f: f64) -> f64 {
        match self {
            ReadoutMap::Identity => f,
            ReadoutMap::Complement => 1.0 - f,
        }
    }

    fn target(self, y: f64) -> f64 {
        self.output(y)
    }

    fn slope(self) -> f64 {
        match self {
            ReadoutMap::Identity => 1.0,
            ReadoutMap::Complement => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub eta0: f64,
    pub epochs: usize,
    pub seed: u64,
    pub gradient_mode: GradientMode,
    pub gradient_scheme: GradientScheme,
    pub n_shot_per_observable: usize,
    #[serde(default)]
    pub readout: ReadoutMap,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            eta0: 200.0,
            epochs: 200,
            seed: 0,
            gradient_mode: GradientMode::Exact,
            gradient_scheme: GradientScheme::Parallelized,
            n_shot_per_observable: 5,
            readout: ReadoutMap::Identity,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(TrainError::Config(format!("eta0 must be positive, got {}", self.eta0)));
        }
        if self.epochs == 0 {
            return Err(TrainError::Config("epochs must be at least 1".into()));
        }
        if self.gradient_mode == GradientMode::Sampled && self.n_shot_per_observable == 0 {
            return Err(TrainError::Config("sampled gradients need at least one shot".into()));
        }
        Ok(())
    }

    /// `η(t) = η₀/t` for the 1-based update step `t`.
    pub fn eta(&self, t: usize) -> f64 {
        self.eta0 / t as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    pub kind: ModelKind,
    pub seed: u64,
    pub mode: GradientMode,
    /// Exact loss before training and after every epoch.
    pub losses: Vec<f64>,
    pub params: Vec<Vec<f64>>,
    pub efficiency: Vec<(usize, EfficiencyReport)>,
}

/// One CSV row of a loss trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub epoch: usize,
    pub loss: f64,
    pub seed: u64,
    pub model_kind: String,
    pub gradient_mode: String,
}

impl TrainingTrace {
    pub fn rows(&self) -> Vec<TraceRow> {
        self.losses
            .iter()
            .enumerate()
            .map(|(epoch, &loss)| TraceRow {
                epoch,
                loss,
                seed: self.seed,
                model_kind: self.kind.to_string(),
                gradient_mode: self.mode.to_string(),
            })
            .collect()
    }

    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("trace holds the initial loss")
    }
}

fn mapped_loss<M: Qcnn>(model: &M, data: &[LabeledSample], map: ReadoutMap) -> f64 {
    let c = model.circuit();
    let params = model.params();
    let obs = model.observable();
    let total: f64 = data
        .iter()
        .map(|s| {
            let f = map.output(c.expectation(&params, &s.state, obs));
            (f - map.target(s.target())).powi(2)
        })
        .sum();
    total / (2.0 * data.len() as f64)
}

/// `L = (1/2M) Σ (f(ψ_i) − y_i)²` with exact outputs.
pub fn mse_loss<M: Qcnn>(model: &M, data: &[LabeledSample]) -> Result<f64, TrainError> {
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    for s in data {
        model.check_input(&s.state)?;
    }
    Ok(mapped_loss(model, data, ReadoutMap::Identity))
}

/// Shots spent estimating the unshifted output in a sampled step.
pub fn output_shots(n_qubits: usize, n_shot: usize) -> usize {
    n_qubits * n_shot
}

fn output_distribution(obs: Observable, state: &PureState) -> OutcomeDistribution {
    match obs {
        Observable::Zavg => OutcomeDistribution::zavg(state),
        Observable::Z(q) => OutcomeDistribution::z_qubit(state, q),
    }
}

/// Sampled output and output gradient for one input.
fn sampled_output_and_gradient<R: Rng + ?Sized>(
    circuit: &Circuit,
    params: &[f64],
    obs: Observable,
    terms: &[ShiftTerm],
    input: &PureState,
    n_shot: usize,
    rng: &mut R,
) -> (f64, Vec<f64>) {
    let out = circuit.output(params, input);
    let f = output_distribution(obs, &out).sample_mean(output_shots(circuit.n_qubits(), n_shot), rng);
    let dists = term_distributions(circuit, params, input, obs, terms);
    (f, sample_from_terms(terms, &dists, circuit.n_params(), rng))
}

pub fn sgd_train<M: Trainable>(
    model: &mut M,
    data: &[LabeledSample],
    config: &TrainConfig,
) -> Result<TrainingTrace, TrainError> {
    sgd_train_with(model, data, config, |_, _| None)
}

const SHUFFLE_STREAM: u64 = 1;
const STEP_STREAM: u64 = 2;

/// SGD over single samples with `η(t) = η₀/t`. Each step follows the
/// gradient of the sample's own term `(f − y)²/2M` of the loss.
/// `on_epoch(epoch, model)` runs
/// after the initial point and after every epoch; a returned report is
/// stored in the trace.
pub fn sgd_train_with<M, F>(
    model: &mut M,
    data: &[LabeledSample],
    config: &TrainConfig,
    mut on_epoch: F,
) -> Result<TrainingTrace, TrainError>
where
    M: Trainable,
    F: FnMut(usize, &M) -> Option<EfficiencyReport>,
{
    config.validate()?;
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    for s in data {
        model.check_input(&s.state)?;
    }
    let circuit = model.circuit();
    let obs = model.observable();
    let sampled = config.gradient_mode == GradientMode::Sampled;
    let terms = if sampled {
        if config.gradient_scheme == GradientScheme::Parallelized
            && data.iter().any(|s| !is_translation_symmetric(&s.state, TOL.symmetry))
        {
            return Err(TrainError::NotSymmetric);
        }
        model.gradient_terms(&circuit, config.gradient_scheme, config.n_shot_per_observable)?
    } else {
        Vec::new()
    };
    let map = config.readout;
    let m = data.len() as f64;

    let mut trace = TrainingTrace {
        kind: model.kind(),
        seed: config.seed,
        mode: config.gradient_mode,
        losses: vec![mapped_loss(model, data, map)],
        params: vec![model.params()],
        efficiency: Vec::new(),
    };
    if let Some(r) = on_epoch(0, model) {
        trace.efficiency.push((0, r));
    }
    let mut params = model.params();
    let mut t = 0usize;
    for epoch in 1..=config.epochs {
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut substream(config.seed, stream_id(&[SHUFFLE_STREAM, epoch as u64])));
        for &i in &order {
            t += 1;
            let s = &data[i];
            let (f, df) = if sampled {
                let mut rng = substream(config.seed, stream_id(&[STEP_STREAM, t as u64]));
                sampled_output_and_gradient(&circuit, &params, obs, &terms, &s.state, config.n_shot_per_observable, &mut rng)
            } else {
                circuit.gradient(&params, &s.state, obs)
            };
            let residual = map.output(f) - map.target(s.target());
            let scale = config.eta(t) * residual * map.slope() / m;
            if !scale.is_finite() || df.iter().any(|g| !g.is_finite()) {
                model.set_params(&params)?;
                return Err(TrainError::NonFinite { epoch, step: t, trace: Box::new(trace) });
            }
            params.iter_mut().zip(&df).for_each(|(p, g)| *p -= scale * g);
        }
        model.set_params(&params)?;
        let loss = mapped_loss(model, data, map);
        trace.losses.push(loss);
        trace.params.push(params.clone());
        if !loss.is_finite() {
            return Err(TrainError::NonFinite { epoch, step: t, trace: Box::new(trace) });
        }
        if let Some(r) = on_epoch(epoch, model) {
            trace.efficiency.push((epoch, r));
        }
    }
    Ok(trace)
}

/// Gradients of `(f − y)²/2` for an sp model and a conventional model from
/// one sample under matched per-parameter shot budgets. A training loop over
/// `M` samples scales the step by `1/M` to match [`sgd_train`].
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetedStep {
    pub sp_gradient: Vec<f64>,
    pub conv_gradient: Vec<f64>,
    /// Gradient shots per parameter, `2 m_θ N_shot`.
    pub sp_shots: Vec<usize>,
    pub conv_shots: Vec<usize>,
}

impl BudgetedStep {
    /// `θ ← θ − η g` for both models.
    pub fn apply(&self, sp: &mut SpQcnnModel, conv: &mut ConvQcnnModel, eta: f64) -> Result<(), TrainError> {
        let upd = |p: Vec<f64>, g: &[f64]| p.into_iter().zip(g).map(|(p, g)| p - eta * g).collect::<Vec<_>>();
        sp.set_params(&upd(sp.params(), &self.sp_gradient))?;
        conv.set_params(&upd(conv.params(), &self.conv_gradient))?;
        Ok(())
    }
}

fn shots_per_param(terms: &[ShiftTerm], n_params: usize) -> Vec<usize> {
    let mut s = vec![0; n_params];
    for t in terms {
        s[t.param] += 2 * t.shots;
    }
    s
}

fn budgeted_one<M: Trainable, R: Rng + ?Sized>(
    model: &M,
    scheme: GradientScheme,
    sample: &LabeledSample,
    n_shot: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<usize>), TrainError> {
    model.check_input(&sample.state)?;
    let c = model.circuit();
    let terms = model.gradient_terms(&c, scheme, n_shot)?;
    let shots = shots_per_param(&terms, c.n_params());
    for (p, &s) in shots.iter().enumerate() {
        assert_eq!(s, 2 * model.m_theta_of(&c, p) * n_shot, "shot budget for parameter {p}");
    }
    let params = model.params();
    let (f, df) = sampled_output_and_gradient(&c, &params, model.observable(), &terms, &sample.state, n_shot, rng);
    let r = f - sample.target();
    Ok((df.into_iter().map(|g| r * g).collect(), shots))
}

/// sp gradients use two circuits with `m_θ N_shot` shots each; conventional
/// gradients use `2 m_θ` per-instance circuits with `N_shot` shots each.
pub fn sampled_sgd_step_budgeted<R: Rng + ?Sized>(
    sp: &SpQcnnModel,
    conv: &ConvQcnnModel,
    sample: &LabeledSample,
    n_shot: usize,
    rng: &mut R,
) -> Result<BudgetedStep, TrainError> {
    if n_shot == 0 {
        return Err(TrainError::Config("N_shot must be at least 1".into()));
    }
    if !is_translation_symmetric(&sample.state, TOL.symmetry) {
        return Err(TrainError::NotSymmetric);
    }
    let (sp_gradient, sp_shots) = budgeted_one(sp, GradientScheme::Parallelized, sample, n_shot, rng)?;
    let (conv_gradient, conv_shots) = budgeted_one(conv, GradientScheme::PerInstance, sample, n_shot, rng)?;
    Ok(BudgetedStep { sp_gradient, conv_gradient, sp_shots, conv_shots })
}
