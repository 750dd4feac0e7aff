//! Experiment runner: TOML configs in, CSV tables plus a checksummed
//! manifest out.

pub mod config;
pub mod output;
pub mod recipes;

use spqcnn_core::ansatz::ModelError;
use spqcnn_core::combinatorics::CombError;
use spqcnn_core::estimation::EstimationError;
use spqcnn_core::qsim::SimError;
use spqcnn_core::spin::SpinError;
use spqcnn_core::training::TrainError;

pub use config::{ExperimentConfig, ExperimentKind};
pub use output::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("invariant check failed: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error(transparent)]
    Comb(#[from] CombError),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Runs the experiment named in `config`, writing into `config.out_dir`.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::Train => recipes::train::run(config),
        ExperimentKind::PhaseDiagram => recipes::phase::run(config),
        ExperimentKind::Efficiency => recipes::efficiency::run(config),
        ExperimentKind::EfficiencyVsN => recipes::efficiency::run_vs_n(config),
        ExperimentKind::ShotNoiseCompare => recipes::shot_noise::run(config),
        ExperimentKind::Dims => recipes::dims::run(config),
        ExperimentKind::Verify => recipes::verify::run(config),
    }
}
