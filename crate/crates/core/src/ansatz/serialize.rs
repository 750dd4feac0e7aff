use serde::{Deserialize, Serialize};

use super::conventional::ConvQcnnModel;
use super::params::SymLayerParams;
use super::plan::build_split_plan;
use super::sp::SpQcnnModel;
use super::{ModelError, Qcnn};

pub const FORMAT_VERSION: u32 = 1;

/// Versioned JSON form of a model. Floats round-trip bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelDocument {
    SpQcnn {
        format_version: u32,
        n: usize,
        primes: Vec<usize>,
        layers: Vec<SymLayerParams>,
    },
    ConventionalQcnn {
        format_version: u32,
        n: usize,
        levels: Vec<[f64; 15]>,
    },
}

impl From<&SpQcnnModel> for ModelDocument {
    fn from(m: &SpQcnnModel) -> Self {
        ModelDocument::SpQcnn {
            format_version: FORMAT_VERSION,
            n: m.n_qubits(),
            primes: m.plan().primes().to_vec(),
            layers: m.layers().to_vec(),
        }
    }
}

impl From<&ConvQcnnModel> for ModelDocument {
    fn from(m: &ConvQcnnModel) -> Self {
        ModelDocument::ConventionalQcnn {
            format_version: FORMAT_VERSION,
            n: m.n_qubits(),
            levels: m.levels().iter().map(|l| l.params).collect(),
        }
    }
}

impl ModelDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: Self = serde_json::from_str(text)?;
        let v = match &doc {
            ModelDocument::SpQcnn { format_version, .. } | ModelDocument::ConventionalQcnn { format_version, .. } => {
                *format_version
            }
        };
        if v != FORMAT_VERSION {
            return Err(ModelError::Format(format!("unsupported format version {v}")));
        }
        Ok(doc)
    }

    pub fn into_sp(self) -> Result<SpQcnnModel, ModelError> {
        match self {
            ModelDocument::SpQcnn { n, primes, layers, .. } => SpQcnnModel::new(build_split_plan(n, &primes)?, layers),
            _ => Err(ModelError::Format("document holds a conventional QCNN".into())),
        }
    }

    pub fn into_conventional(self) -> Result<ConvQcnnModel, ModelError> {
        match self {
            ModelDocument::ConventionalQcnn { n, levels, .. } => ConvQcnnModel::from_levels(n, levels),
            _ => Err(ModelError::Format("document holds an sp-QCNN".into())),
        }
    }
}
