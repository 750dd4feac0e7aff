use serde::{Deserialize, Serialize};
use spqcnn_core::combinatorics::{eigenvalue_distribution_width, DimRow, DimTable};

use crate::config::ExperimentConfig;
use crate::output::{OutputDir, RunManifest};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthRow {
    pub n: usize,
    pub total_dim: String,
    pub width: f64,
    pub width_sqrt_n: f64,
}

/// Symmetric-subspace dimension tables and eigenvalue widths.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let mut out = OutputDir::create(&config.out_dir)?;
    let mut dims: Vec<DimRow> = Vec::new();
    let mut widths = Vec::new();
    for &n in &config.dims.sizes {
        let table = DimTable::new(n)?;
        dims.extend(table.rows());
        if n >= 4 {
            let w = eigenvalue_distribution_width(n)?;
            widths.push(WidthRow { n, total_dim: table.total().to_string(), width: w, width_sqrt_n: w * (n as f64).sqrt() });
        }
    }
    out.write_csv("dims.csv", &dims)?;
    out.write_csv("widths.csv", &widths)?;
    out.finish(config)
}
