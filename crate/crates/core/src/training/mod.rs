//! Loss, parameter-shift gradients and the SGD loop.

mod gradients;
mod sgd;

pub use gradients::{
    exact_from_terms, grad_parallel, grad_per_instance, parallel_term, per_instance_terms, sample_from_terms,
    term_distributions, GradMode, GradientScheme, ParallelGradient, ShiftScope, ShiftTerm, Trainable, SHIFT,
};
pub use sgd::{
    mse_loss, output_shots, sampled_sgd_step_budgeted, sgd_train, sgd_train_with, BudgetedStep, GradientMode,
    ReadoutMap, TraceRow, TrainConfig, TrainingTrace,
};

use crate::ansatz::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("training configuration: {0}")]
    Config(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("input is not translation symmetric; the parallelized estimator does not apply")]
    NotSymmetric,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("non-finite loss or gradient at epoch {epoch}, step {step}")]
    NonFinite { epoch: usize, step: usize, trace: Box<TrainingTrace> },
    #[error(transparent)]
    Model(#[from] ModelError),
}
