use rayon::prelude::*;
use spqcnn_core::ansatz::ModelDocument;
use spqcnn_core::spin::make_training_set;
use spqcnn_core::training::{sgd_train, TraceRow, TrainConfig};

use super::{init_sp, seeds, summarize_losses, Solver};
use crate::config::ExperimentConfig;
use crate::output::{OutputDir, RunManifest};
use crate::CliError;

pub fn train_config(config: &ExperimentConfig, seed: u64) -> TrainConfig {
    TrainConfig {
        eta0: config.train.eta0,
        epochs: config.train.epochs,
        seed,
        gradient_mode: config.train.gradient_mode,
        gradient_scheme: config.train.gradient_scheme,
        n_shot_per_observable: config.train.n_shot,
        ..TrainConfig::default()
    }
}

/// Trains one sp model per seed on the `h2 = 0` training set.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let mut out = OutputDir::create(&config.out_dir)?;
    let n = config.model.n;
    let primes = config.primes();
    let solver = Solver::new(config)?;
    let data = make_training_set(n, |p| solver.solve(p))?;

    let results = seeds(config.seeds.base, config.seeds.count)
        .into_par_iter()
        .map(|seed| {
            let mut model = init_sp(n, &primes, config.model.depth, seed)?;
            let trace = sgd_train(&mut model, &data, &train_config(config, seed))?;
            Ok((seed, trace, ModelDocument::from(&model)))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let rows: Vec<TraceRow> = results.iter().flat_map(|(_, t, _)| t.rows()).collect();
    out.write_csv("loss_per_seed.csv", &rows)?;
    let losses: Vec<Vec<f64>> = results.iter().map(|(_, t, _)| t.losses.clone()).collect();
    out.write_csv("loss_summary.csv", &summarize_losses(&losses))?;
    for (seed, _, doc) in &results {
        out.write_text(&format!("models/seed_{seed:04}.json"), doc.to_json() + "\n")?;
    }
    out.finish(config)
}
