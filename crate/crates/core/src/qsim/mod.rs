//! Dense statevector engine: Pauli rotations, ring translations, exact
//! expectation values and computational-basis sampling.

mod gates;
mod measure;
mod pauli;
mod random;
mod ring;
mod state;
mod translate;

pub use gates::{apply_pauli_rotation, apply_sym_layer_step, StepKind};
pub(crate) use gates::{apply_diag_phase, rotate, rotate_x};
pub use measure::{
    expectation_pauli, prob_one, sample_bitstrings, weight_distribution, z_expectations,
    zavg_expectation, OutcomeDistribution,
};
pub use pauli::{Axis, PauliMasks, PauliString};
pub use random::{haar_random_state, random_symmetric_state};
pub use ring::QubitRing;
pub use state::{PureState, MAX_QUBITS};
pub use translate::{is_translation_symmetric, translate, translation_map, translation_overlap};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {qubit} repeated in a Pauli string")]
    RepeatedQubit { qubit: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("amplitude vector length {dim} is not a power of two")]
    BadDimension { dim: usize },
    #[error("state is not normalized (norm² = {norm})")]
    NotNormalized { norm: f64 },
    #[error("basis index {index} outside dimension {dim}")]
    BasisIndex { index: usize, dim: usize },
    #[error("{n} qubits exceeds the dense limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("need at least {min} qubits, got {n}")]
    TooFewQubits { n: usize, min: usize },
    #[error("symmetrized random state degenerate after {attempts} draws")]
    Degenerate { attempts: usize },
}
