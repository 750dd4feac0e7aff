//! One module per experiment.

pub mod dims;
pub mod efficiency;
pub mod phase;
pub mod shot_noise;
pub mod train;
pub mod verify;

use serde::{Deserialize, Serialize};
use spqcnn_core::ansatz::{build_split_plan, SpQcnnModel};
use spqcnn_core::qsim::PureState;
use spqcnn_core::rng::{stream_id, substream};
use spqcnn_core::spin::{ground_state, ClusterIsingParams, DatasetCache, SpinError};

use crate::config::ExperimentConfig;
use crate::output::{median, percentile};
use crate::CliError;

/// Stream tag for parameter initialization ("INIT").
pub const INIT_TAG: u64 = 0x494E_4954;
/// Stream tag for conventional-model initialization ("CONV").
pub const CONV_TAG: u64 = 0x434F_4E56;

/// Ground-state solver, cached on disk when the config names a cache.
#[derive(Debug, Clone)]
pub struct Solver {
    cache: Option<DatasetCache>,
}

impl Solver {
    pub fn new(config: &ExperimentConfig) -> Result<Self, CliError> {
        let cache = config.cache_dir.as_ref().map(DatasetCache::new).transpose()?;
        Ok(Self { cache })
    }

    pub fn solve(&self, p: &ClusterIsingParams) -> Result<PureState, SpinError> {
        match &self.cache {
            Some(c) => c.ground_state(p),
            None => ground_state(p),
        }
    }

    pub fn at(&self, n: usize, h1: f64, h2: f64) -> Result<PureState, CliError> {
        Ok(self.solve(&ClusterIsingParams::new(n, h1, h2)?)?)
    }
}

pub fn seeds(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|k| base + k).collect()
}

/// Random sp model for `seed`, independent of everything else the seed drives.
pub fn init_sp(n: usize, primes: &[usize], depth: usize, seed: u64) -> Result<SpQcnnModel, CliError> {
    let plan = build_split_plan(n, primes)?;
    Ok(SpQcnnModel::random(plan, depth, &mut substream(seed, stream_id(&[INIT_TAG, n as u64]))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossSummaryRow {
    pub epoch: usize,
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
}

/// Per-epoch median and 10/90 percentiles over equally long loss traces.
pub fn summarize_losses(traces: &[Vec<f64>]) -> Vec<LossSummaryRow> {
    let len = traces.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|epoch| {
            let v: Vec<f64> = traces.iter().map(|t| t[epoch]).collect();
            LossSummaryRow { epoch, median: median(&v), p10: percentile(&v, 10.0), p90: percentile(&v, 90.0) }
        })
        .collect()
}
