use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spqcnn_core::ansatz::{ConvQcnnModel, ModelDocument, Qcnn, SpQcnnModel};
use spqcnn_core::qsim::PureState;
use spqcnn_core::spin::make_phase_grid;

use super::Solver;
use crate::config::ExperimentConfig;
use crate::output::{mean, OutputDir, RunManifest};
use crate::CliError;

/// Outputs above this value classify a state as SPT.
pub const PHASE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone)]
pub enum LoadedModel {
    Sp(SpQcnnModel),
    Conventional(ConvQcnnModel),
}

impl LoadedModel {
    pub fn n_qubits(&self) -> usize {
        match self {
            LoadedModel::Sp(m) => m.n_qubits(),
            LoadedModel::Conventional(m) => m.n_qubits(),
        }
    }

    pub fn output(&self, input: &PureState) -> Result<f64, CliError> {
        Ok(match self {
            LoadedModel::Sp(m) => m.output(input)?,
            LoadedModel::Conventional(m) => m.output(input)?,
        })
    }
}

/// Every `*.json` model document in `dir`, in file-name order.
pub fn load_models(dir: &Path) -> Result<Vec<LoadedModel>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Config(format!("models_dir {}: {e}", dir.display())))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Config(format!("no model files in {}", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let doc = ModelDocument::from_json(&fs::read_to_string(p)?)?;
            Ok(match doc {
                ModelDocument::SpQcnn { .. } => LoadedModel::Sp(doc.into_sp()?),
                ModelDocument::ConventionalQcnn { .. } => LoadedModel::Conventional(doc.into_conventional()?),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub h1: f64,
    pub h2: f64,
    pub mean_output: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub h2: f64,
    pub h1_crossing: Option<f64>,
}

/// First `h1` where `values` falls through `threshold`, linearly interpolated.
pub fn crossing(h1: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    h1.windows(2).zip(values.windows(2)).find_map(|(x, y)| {
        let (a, b) = (y[0] - threshold, y[1] - threshold);
        if a >= 0.0 && b < 0.0 {
            Some(x[0] + (x[1] - x[0]) * a / (a - b))
        } else {
            None
        }
    })
}

/// Crossing for each `h2` row of a row-major table.
pub fn boundary(rows: &[PhaseRow], h1_points: usize) -> Vec<BoundaryRow> {
    rows.chunks(h1_points)
        .map(|row| {
            let h1: Vec<f64> = row.iter().map(|r| r.h1).collect();
            let f: Vec<f64> = row.iter().map(|r| r.mean_output).collect();
            BoundaryRow { h2: row[0].h2, h1_crossing: crossing(&h1, &f, PHASE_THRESHOLD) }
        })
        .collect()
}

/// Mean and spread of trained-model outputs over the `(h1, h2)` grid.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let mut out = OutputDir::create(&config.out_dir)?;
    let dir = config
        .models_dir
        .as_ref()
        .ok_or_else(|| CliError::Config("phase-diagram needs models_dir".into()))?;
    let models = load_models(dir)?;
    let n = models[0].n_qubits();
    if models.iter().any(|m| m.n_qubits() != n) {
        return Err(CliError::Config("models in models_dir have different register sizes".into()));
    }
    let solver = Solver::new(config)?;
    let grid = make_phase_grid(n, &config.grid, |p| solver.solve(p))?;
    let rows = grid
        .points
        .par_iter()
        .map(|pt| {
            let f = models.iter().map(|m| m.output(&pt.state)).collect::<Result<Vec<_>, _>>()?;
            let mu = mean(&f);
            let var = if f.len() > 1 {
                f.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (f.len() - 1) as f64
            } else {
                0.0
            };
            Ok(PhaseRow { h1: pt.h1, h2: pt.h2, mean_output: mu, std: var.sqrt() })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    out.write_csv("phase_diagram.csv", &rows)?;
    out.write_csv("boundary.csv", &boundary(&rows, config.grid.h1_points))?;
    out.finish(config)
}
