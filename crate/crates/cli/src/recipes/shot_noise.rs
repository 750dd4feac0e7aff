use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spqcnn_core::ansatz::{ConvQcnnModel, ModelKind};
use spqcnn_core::rng::{stream_id, substream};
use spqcnn_core::spin::{make_training_set, LabeledSample};
use spqcnn_core::training::{
    mse_loss, sampled_sgd_step_budgeted, sgd_train, GradientMode, GradientScheme, TraceRow, TrainConfig, TrainError,
};

use super::{init_sp, seeds, Solver, CONV_TAG};
use crate::config::ExperimentConfig;
use crate::output::{median, percentile, OutputDir, RunManifest};
use crate::CliError;

const SHUFFLE_TAG: u64 = 1;
const STEP_TAG: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotNoiseSummaryRow {
    pub model_kind: String,
    pub gradient_mode: String,
    pub epoch: usize,
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
}

fn rows(kind: ModelKind, mode: GradientMode, seed: u64, losses: &[f64]) -> Vec<TraceRow> {
    losses
        .iter()
        .enumerate()
        .map(|(epoch, &loss)| TraceRow {
            epoch,
            loss,
            seed,
            model_kind: kind.to_string(),
            gradient_mode: mode.to_string(),
        })
        .collect()
}

/// Trains an sp model and a conventional model side by side on sampled
/// gradients with matched per-parameter budgets. Returns exact losses
/// before training and after every epoch.
pub fn sampled_pair(
    config: &ExperimentConfig,
    data: &[LabeledSample],
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let n = config.model.n;
    let sn = &config.shot_noise;
    let mut sp = init_sp(n, &config.primes(), sn.depth, seed)?;
    let mut conv = ConvQcnnModel::random(n, &mut substream(seed, stream_id(&[CONV_TAG, n as u64])))?;
    let mut sp_losses = vec![mse_loss(&sp, data)?];
    let mut conv_losses = vec![mse_loss(&conv, data)?];
    let mut t = 0usize;
    for epoch in 1..=sn.sampled_epochs {
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut substream(seed, stream_id(&[SHUFFLE_TAG, epoch as u64])));
        for &i in &order {
            t += 1;
            let mut rng = substream(seed, stream_id(&[STEP_TAG, t as u64]));
            let step = sampled_sgd_step_budgeted(&sp, &conv, &data[i], sn.n_shot, &mut rng)?;
            step.apply(&mut sp, &mut conv, config.train.eta0 / (t * data.len()) as f64)?;
        }
        let (a, b) = (mse_loss(&sp, data)?, mse_loss(&conv, data)?);
        if !a.is_finite() || !b.is_finite() {
            return Err(TrainError::Unsupported(format!("non-finite loss at epoch {epoch}")).into());
        }
        sp_losses.push(a);
        conv_losses.push(b);
    }
    Ok((sp_losses, conv_losses))
}

/// Exact-gradient runs of both models from the same initial parameters.
pub fn noiseless_pair(
    config: &ExperimentConfig,
    data: &[LabeledSample],
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let n = config.model.n;
    let sn = &config.shot_noise;
    let mut sp = init_sp(n, &config.primes(), sn.depth, seed)?;
    let mut conv = ConvQcnnModel::random(n, &mut substream(seed, stream_id(&[CONV_TAG, n as u64])))?;
    let base = TrainConfig {
        eta0: config.train.eta0,
        epochs: sn.noiseless_epochs,
        seed,
        gradient_mode: GradientMode::Exact,
        ..TrainConfig::default()
    };
    let sp_trace = sgd_train(&mut sp, data, &base)?;
    let conv_cfg = TrainConfig { gradient_scheme: GradientScheme::PerInstance, ..base };
    let conv_trace = sgd_train(&mut conv, data, &conv_cfg)?;
    Ok((sp_trace.losses, conv_trace.losses))
}

pub fn run(config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let mut out = OutputDir::create(&config.out_dir)?;
    let n = config.model.n;
    let solver = Solver::new(config)?;
    let data = make_training_set(n, |p| solver.solve(p))?;
    let results = seeds(config.seeds.base, config.shot_noise.seeds)
        .into_par_iter()
        .map(|seed| {
            let (sp_s, conv_s) = sampled_pair(config, &data, seed)?;
            let (sp_e, conv_e) = noiseless_pair(config, &data, seed)?;
            Ok([
                (ModelKind::SpQcnn, GradientMode::Sampled, seed, sp_s),
                (ModelKind::Conventional, GradientMode::Sampled, seed, conv_s),
                (ModelKind::SpQcnn, GradientMode::Exact, seed, sp_e),
                (ModelKind::Conventional, GradientMode::Exact, seed, conv_e),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let runs: Vec<_> = results.into_iter().flatten().collect();
    let trace_rows: Vec<TraceRow> = runs.iter().flat_map(|(k, m, s, l)| rows(*k, *m, *s, l)).collect();
    let mut groups: BTreeMap<(String, String, usize), Vec<f64>> = BTreeMap::new();
    for r in &trace_rows {
        groups.entry((r.model_kind.clone(), r.gradient_mode.clone(), r.epoch)).or_default().push(r.loss);
    }
    let summary: Vec<ShotNoiseSummaryRow> = groups
        .into_iter()
        .map(|((model_kind, gradient_mode, epoch), v)| ShotNoiseSummaryRow {
            model_kind,
            gradient_mode,
            epoch,
            median: median(&v),
            p10: percentile(&v, 10.0),
            p90: percentile(&v, 90.0),
        })
        .collect();

    out.write_csv("shot_noise_traces.csv", &trace_rows)?;
    out.write_csv("shot_noise_summary.csv", &summary)?;
    out.finish(config)
}
