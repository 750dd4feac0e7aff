use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClusterIsingParams, SpinError};
use crate::qsim::PureState;

pub const TRAINING_SET_SIZE: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub state: PureState,
    /// 1 for the SPT phase, 0 otherwise.
    pub label: u8,
    pub h1: f64,
    pub h2: f64,
}

impl LabeledSample {
    pub fn target(&self) -> f64 {
        self.label as f64
    }
}

/// Ground states at `h1 = 0.05, 0.15, …, 1.95` on `h2 = 0`, labelled
/// `y = 1` iff `h1 < 1`. The solver is pluggable so callers can route
/// through a cache.
pub fn make_training_set<F>(n: usize, solve: F) -> Result<Vec<LabeledSample>, SpinError>
where
    F: Fn(&ClusterIsingParams) -> Result<PureState, SpinError> + Sync,
{
    (0..TRAINING_SET_SIZE)
        .into_par_iter()
        .map(|i| {
            let h1 = 0.05 + 0.1 * i as f64;
            let p = ClusterIsingParams::new(n, h1, 0.0)?;
            Ok(LabeledSample { state: solve(&p)?, label: u8::from(h1 < 1.0), h1, h2: 0.0 })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseGridSpec {
    pub h1_min: f64,
    pub h1_max: f64,
    pub h2_min: f64,
    pub h2_max: f64,
    pub h1_points: usize,
    pub h2_points: usize,
}

impl Default for PhaseGridSpec {
    fn default() -> Self {
        Self { h1_min: 0.0, h1_max: 2.0, h2_min: -1.6, h2_max: 1.6, h1_points: 21, h2_points: 21 }
    }
}

fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    (0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect()
}

impl PhaseGridSpec {
    pub fn validate(&self) -> Result<(), SpinError> {
        let finite = [self.h1_min, self.h1_max, self.h2_min, self.h2_max].iter().all(|x| x.is_finite());
        if !finite || self.h1_min > self.h1_max || self.h2_min > self.h2_max {
            return Err(SpinError::InvalidParams(format!("bad grid ranges {self:?}")));
        }
        if self.h1_points < 2 || self.h2_points < 2 {
            return Err(SpinError::InvalidParams("grid resolution must be at least 2".into()));
        }
        Ok(())
    }

    pub fn h1_values(&self) -> Vec<f64> {
        linspace(self.h1_min, self.h1_max, self.h1_points)
    }

    pub fn h2_values(&self) -> Vec<f64> {
        linspace(self.h2_min, self.h2_max, self.h2_points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub h1: f64,
    pub h2: f64,
    pub state: PureState,
}

/// Ground states on a grid, row-major with `h2` as the row index: point
/// `(i, j)` at `h2_values[i]`, `h1_values[j]` is entry `i * h1_points + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub spec: PhaseGridSpec,
    pub points: Vec<GridPoint>,
}

pub fn make_phase_grid<F>(n: usize, spec: &PhaseGridSpec, solve: F) -> Result<PhaseGrid, SpinError>
where
    F: Fn(&ClusterIsingParams) -> Result<PureState, SpinError> + Sync,
{
    spec.validate()?;
    let coords: Vec<(f64, f64)> = spec
        .h2_values()
        .into_iter()
        .flat_map(|h2| spec.h1_values().into_iter().map(move |h1| (h1, h2)))
        .collect();
    let points = coords
        .into_par_iter()
        .map(|(h1, h2)| {
            let p = ClusterIsingParams::new(n, h1, h2)?;
            Ok(GridPoint { h1, h2, state: solve(&p)? })
        })
        .collect::<Result<Vec<_>, SpinError>>()?;
    Ok(PhaseGrid { spec: *spec, points })
}

/// Finite stand-in for the `(0, -∞)` antiferromagnetic fixed point.
pub fn afm_proxy(n: usize) -> ClusterIsingParams {
    ClusterIsingParams { n, h1: 0.05, h2: -4.0 }
}
