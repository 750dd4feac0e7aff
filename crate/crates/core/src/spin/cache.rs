use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lanczos::{ground_state_with, LanczosOptions};
use super::{ClusterIsingParams, SpinError};
use crate::qsim::PureState;

/// Bumped whenever the solver could produce different amplitudes.
pub const SOLVER_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    n: usize,
    h1: f64,
    h2: f64,
    solver_version: u32,
    energy: f64,
    momentum: usize,
    residual: f64,
}

/// On-disk ground-state store: `<key>.bin` holds little-endian `(re, im)`
/// pairs, `<key>.json` the metadata. Keys use the exact bit patterns of the
/// fields so distinct floats never collide.
#[derive(Debug, Clone)]
pub struct DatasetCache {
    dir: PathBuf,
    opts: LanczosOptions,
}

impl DatasetCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, SpinError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, opts: LanczosOptions::default() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn key(p: &ClusterIsingParams) -> String {
        format!("cim-n{}-h1_{:016x}-h2_{:016x}-v{}", p.n, p.h1.to_bits(), p.h2.to_bits(), SOLVER_VERSION)
    }

    pub fn ground_state(&self, p: &ClusterIsingParams) -> Result<PureState, SpinError> {
        let key = Self::key(p);
        let bin = self.dir.join(format!("{key}.bin"));
        let json = self.dir.join(format!("{key}.json"));
        if bin.exists() && json.exists() {
            return self.load(p, &bin, &json);
        }
        let g = ground_state_with(p, &self.opts)?;
        let state = g.state.clone().expect("solver returns a state");
        let meta = Meta {
            n: p.n,
            h1: p.h1,
            h2: p.h2,
            solver_version: SOLVER_VERSION,
            energy: g.energy,
            momentum: g.momentum,
            residual: g.residual,
        };
        let mut bytes = Vec::with_capacity(16 * state.dim());
        for a in state.amplitudes() {
            bytes.extend_from_slice(&a.re.to_le_bytes());
            bytes.extend_from_slice(&a.im.to_le_bytes());
        }
        // write to temporaries first so a crash never leaves a half entry
        let tmp_bin = bin.with_extension("bin.tmp");
        let tmp_json = json.with_extension("json.tmp");
        fs::write(&tmp_bin, bytes)?;
        fs::write(&tmp_json, serde_json::to_string_pretty(&meta).map_err(|e| SpinError::Cache(e.to_string()))?)?;
        fs::rename(tmp_bin, &bin)?;
        fs::rename(tmp_json, &json)?;
        Ok(state)
    }

    fn load(&self, p: &ClusterIsingParams, bin: &Path, json: &Path) -> Result<PureState, SpinError> {
        let meta: Meta =
            serde_json::from_str(&fs::read_to_string(json)?).map_err(|e| SpinError::Cache(e.to_string()))?;
        if meta.n != p.n
            || meta.h1.to_bits() != p.h1.to_bits()
            || meta.h2.to_bits() != p.h2.to_bits()
            || meta.solver_version != SOLVER_VERSION
        {
            return Err(SpinError::Cache(format!("metadata mismatch in {}", json.display())));
        }
        let bytes = fs::read(bin)?;
        if bytes.len() != 16 << p.n {
            return Err(SpinError::Cache(format!("{} has {} bytes", bin.display(), bytes.len())));
        }
        let amps = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        Ok(PureState::from_amplitudes(amps)?)
    }
}
