//! Split plans, translation-symmetric layers and the three QCNN variants:
//! split-parallelized, nonsplitting and conventional.

mod circuit;
mod conventional;
mod params;
mod plan;
mod serialize;
mod sp;

pub use circuit::{Circuit, Instance, Observable, Op, Shift};
pub use conventional::{forward_conventional, ConvLevel, ConvQcnnModel, Pairing, TWO_QUBIT_PAULIS};
pub use params::{Angle, SymLayerParams};
pub use plan::{build_split_plan, SplitPlan};
pub use serialize::{ModelDocument, FORMAT_VERSION};
pub use sp::{forward_nonsplit, forward_sp, output_zavg, Nonsplit, ParamId, SpQcnnModel};

use crate::qsim::{PureState, SimError};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("split plan: {0}")]
    Plan(String),
    #[error("input has {got} qubits, model expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("unknown parameter: {0}")]
    UnknownParam(String),
    #[error("model document: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Which model family a circuit belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    SpQcnn,
    Nonsplit,
    Conventional,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::SpQcnn => "sp-qcnn",
            ModelKind::Nonsplit => "nonsplit-qcnn",
            ModelKind::Conventional => "conventional-qcnn",
        })
    }
}

/// Common interface for trainable models: a flat parameter vector plus a
/// compiled circuit and a diagonal readout.
pub trait Qcnn: Clone + Send + Sync {
    fn kind(&self) -> ModelKind;
    fn n_qubits(&self) -> usize;
    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, params: &[f64]) -> Result<(), ModelError>;
    fn circuit(&self) -> Circuit;
    fn observable(&self) -> Observable;

    fn n_params(&self) -> usize {
        self.params().len()
    }

    fn check_input(&self, input: &PureState) -> Result<(), ModelError> {
        if input.n_qubits() != self.n_qubits() {
            return Err(ModelError::Dimension { expected: self.n_qubits(), got: input.n_qubits() });
        }
        Ok(())
    }

    /// Exact model output on `input`.
    fn output(&self, input: &PureState) -> Result<f64, ModelError> {
        self.check_input(input)?;
        Ok(self.circuit().expectation(&self.params(), input, self.observable()))
    }
}
