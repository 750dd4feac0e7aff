use std::fs;
use std::path::{Component, Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";
const MANIFEST_LINE: &str = "# manifest: manifest.json\n";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Checksums keyed by output path, sorted.
    pub fn checksums(&self) -> Vec<(String, String)> {
        let mut v: Vec<_> = self.outputs.iter().map(|o| (o.path.clone(), o.sha256.clone())).collect();
        v.sort();
        v
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects every file a run writes and seals them in a manifest.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<(String, Vec<u8>)>,
    started: Instant,
    started_unix: u64,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Ok(Self { root: root.to_path_buf(), written: Vec::new(), started: Instant::now(), started_unix })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn target(&self, name: &str) -> Result<PathBuf, CliError> {
        let rel = Path::new(name);
        if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
            return Err(CliError::Config(format!("output name {name:?} escapes the output directory")));
        }
        Ok(self.root.join(rel))
    }

    fn write_bytes(&mut self, name: &str, bytes: Vec<u8>) -> Result<PathBuf, CliError> {
        let path = self.target(name)?;
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, &bytes)?;
        self.written.retain(|(n, _)| n != name);
        self.written.push((name.to_string(), bytes));
        Ok(path)
    }

    /// CSV with a manifest reference line followed by a header row.
    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf, CliError> {
        let mut buf = MANIFEST_LINE.as_bytes().to_vec();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        self.write_bytes(name, buf)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.into_bytes())
    }

    pub fn write_text(&mut self, name: &str, text: String) -> Result<PathBuf, CliError> {
        self.write_bytes(name, text.into_bytes())
    }

    pub fn finish(self, config: &ExperimentConfig) -> Result<RunManifest, CliError> {
        let mut outputs: Vec<OutputRecord> = self
            .written
            .iter()
            .map(|(name, bytes)| OutputRecord { path: name.clone(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 })
            .collect();
        outputs.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = RunManifest {
            tool: "spqcnn".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: config.experiment.name().to_string(),
            config: config.clone(),
            started_unix: self.started_unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(self.root.join(MANIFEST_NAME), text)?;
        Ok(manifest)
    }
}

/// Reads a CSV written by [`OutputDir::write_csv`].
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let rows = r.deserialize().collect::<Result<Vec<T>, _>>()?;
    Ok(rows)
}

/// Percentile with linear interpolation between order statistics.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty set");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    percentile(values, 50.0)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
