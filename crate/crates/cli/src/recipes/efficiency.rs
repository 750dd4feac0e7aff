use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spqcnn_core::ansatz::{forward_nonsplit, forward_sp, Angle, ParamId, SpQcnnModel};
use spqcnn_core::estimation::{gradient_efficiency, relative_efficiency, EfficiencyReport};
use spqcnn_core::qsim::PureState;
use spqcnn_core::rng::stream_id;
use spqcnn_core::spin::{afm_proxy, make_training_set};
use spqcnn_core::training::{sgd_train_with, TraceRow};

use super::train::train_config;
use super::{init_sp, seeds, Solver};
use crate::config::{default_primes, ExperimentConfig};
use crate::output::{mean, median, percentile, OutputDir, RunManifest};
use crate::CliError;

/// Parameter whose gradient efficiency is tracked.
pub const TRACKED_PARAM: ParamId = ParamId { level: 0, sublayer: 0, angle: Angle::Alpha };

/// Output efficiency of `model` on `input`.
pub fn output_report(
    model: &SpQcnnModel,
    input: &PureState,
    n_shots: usize,
    n_reps: usize,
    seed: u64,
    context: &str,
) -> Result<EfficiencyReport, CliError> {
    let sp = forward_sp(model, input)?;
    let (ns, q) = forward_nonsplit(model, input)?;
    Ok(relative_efficiency(&sp, &ns, q, n_shots, n_reps, seed, context)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencySummaryRow {
    pub input: String,
    pub epoch: usize,
    pub count: usize,
    pub median_r: f64,
    pub p10_r: f64,
    pub p90_r: f64,
}

struct Tagged {
    input: &'static str,
    epoch: usize,
    report: EfficiencyReport,
}

fn reports_at(
    model: &SpQcnnModel,
    inputs: &[(&'static str, PureState)],
    epoch: usize,
    run_seed: u64,
    config: &ExperimentConfig,
) -> Result<Vec<Tagged>, CliError> {
    let (shots, reps) = (config.estimation.n_shots, config.estimation.n_reps);
    let seed_for = |i: usize| stream_id(&[run_seed, epoch as u64, i as u64]);
    let mut out = Vec::with_capacity(inputs.len() + 1);
    for (i, (name, state)) in inputs.iter().enumerate() {
        let report = output_report(model, state, shots, reps, seed_for(i), &format!("{name}:epoch={epoch}"))?;
        out.push(Tagged { input: name, epoch, report });
    }
    let mut g = gradient_efficiency(model, &inputs[0].1, TRACKED_PARAM, shots, reps, seed_for(inputs.len()))?;
    g.context = format!("{}:epoch={epoch}", g.context);
    out.push(Tagged { input: "gradient", epoch, report: g });
    Ok(out)
}

/// Efficiency reports along training, every `estimation.every` epochs.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let mut out = OutputDir::create(&config.out_dir)?;
    let n = config.model.n;
    let primes = config.primes();
    let solver = Solver::new(config)?;
    let data = make_training_set(n, |p| solver.solve(p))?;
    let inputs: Vec<(&'static str, PureState)> = vec![
        ("spt", solver.at(n, 0.0, 0.0)?),
        ("pm", solver.at(n, 1.95, 0.0)?),
        ("afm", solver.solve(&afm_proxy(n))?),
    ];
    let every = config.estimation.every;
    let epochs = config.train.epochs;

    let results = seeds(config.seeds.base, config.seeds.count)
        .into_par_iter()
        .map(|seed| {
            let mut model = init_sp(n, &primes, config.model.depth, seed)?;
            let mut tagged = Vec::new();
            let mut failure = None;
            let trace = sgd_train_with(&mut model, &data, &train_config(config, seed), |epoch, m| {
                if failure.is_none() && (epoch % every == 0 || epoch == epochs) {
                    match reports_at(m, &inputs, epoch, seed, config) {
                        Ok(r) => tagged.extend(r),
                        Err(e) => failure = Some(e),
                    }
                }
                None
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok((trace.rows(), tagged))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut groups: BTreeMap<(usize, &str), Vec<f64>> = BTreeMap::new();
    for t in results.iter().flat_map(|(_, t)| t) {
        groups.entry((t.epoch, t.input)).or_default().push(t.report.r);
    }
    let summary: Vec<EfficiencySummaryRow> = groups
        .into_iter()
        .map(|((epoch, input), r)| EfficiencySummaryRow {
            input: input.to_string(),
            epoch,
            count: r.len(),
            median_r: median(&r),
            p10_r: percentile(&r, 10.0),
            p90_r: percentile(&r, 90.0),
        })
        .collect();

    let reports: Vec<&EfficiencyReport> = results.iter().flat_map(|(_, t)| t.iter().map(|t| &t.report)).collect();
    out.write_csv("efficiency.csv", &reports)?;
    out.write_csv("efficiency_summary.csv", &summary)?;
    let rows: Vec<&TraceRow> = results.iter().flat_map(|(r, _)| r).collect();
    out.write_csv("loss_per_seed.csv", &rows)?;
    out.finish(config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummaryRow {
    pub n: usize,
    pub context: String,
    pub count: usize,
    pub mean_r: f64,
    pub median_r: f64,
}

/// Output and gradient efficiency of randomly initialized models on the
/// `(0, 0)` ground state for each register size.
pub fn run_vs_n(config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let mut out = OutputDir::create(&config.out_dir)?;
    let solver = Solver::new(config)?;
    let (shots, reps) = (config.estimation.n_shots, config.estimation.n_reps);
    let seed_list = seeds(config.seeds.base, config.seeds.count);
    let mut reports = Vec::new();
    for &n in &config.estimation.sizes {
        let input = solver.at(n, 0.0, 0.0)?;
        let primes = default_primes(n);
        let per_n = seed_list
            .par_iter()
            .map(|&seed| {
                let model = init_sp(n, &primes, config.model.depth, seed)?;
                let out = output_report(&model, &input, shots, reps, stream_id(&[seed, n as u64, 0]), "output")?;
                let grad = gradient_efficiency(&model, &input, TRACKED_PARAM, shots, reps, stream_id(&[seed, n as u64, 1]))?;
                Ok([out, grad])
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        reports.extend(per_n.into_iter().flatten());
    }

    let mut groups: BTreeMap<(usize, String), Vec<f64>> = BTreeMap::new();
    for r in &reports {
        groups.entry((r.n, r.context.clone())).or_default().push(r.r);
    }
    let summary: Vec<SizeSummaryRow> = groups
        .into_iter()
        .map(|((n, context), r)| SizeSummaryRow { n, context, count: r.len(), mean_r: mean(&r), median_r: median(&r) })
        .collect();

    out.write_csv("efficiency_vs_n.csv", &reports)?;
    out.write_csv("efficiency_vs_n_summary.csv", &summary)?;
    out.finish(config)
}
