use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spqcnn_core::ansatz::build_split_plan;
use spqcnn_core::spin::PhaseGridSpec;
use spqcnn_core::training::{GradientMode, GradientScheme};

use crate::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Train,
    PhaseDiagram,
    Efficiency,
    EfficiencyVsN,
    ShotNoiseCompare,
    Dims,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Train => "train",
            ExperimentKind::PhaseDiagram => "phase-diagram",
            ExperimentKind::Efficiency => "efficiency",
            ExperimentKind::EfficiencyVsN => "efficiency-vs-n",
            ExperimentKind::ShotNoiseCompare => "shot-noise-compare",
            ExperimentKind::Dims => "dims",
            ExperimentKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub n: usize,
    /// Split primes; empty means the ascending prime factorization of `n`.
    pub primes: Vec<usize>,
    pub depth: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { n: 8, primes: Vec::new(), depth: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedSection {
    pub count: usize,
    pub base: u64,
}

impl Default for SeedSection {
    fn default() -> Self {
        Self { count: 20, base: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub epochs: usize,
    pub eta0: f64,
    pub gradient_mode: GradientMode,
    pub gradient_scheme: GradientScheme,
    pub n_shot: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            epochs: 200,
            eta0: 200.0,
            gradient_mode: GradientMode::Exact,
            gradient_scheme: GradientScheme::Parallelized,
            n_shot: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimationSection {
    pub n_shots: usize,
    pub n_reps: usize,
    /// Register sizes for size sweeps.
    pub sizes: Vec<usize>,
    /// Epoch stride between efficiency reports during training.
    pub every: usize,
}

impl Default for EstimationSection {
    fn default() -> Self {
        Self { n_shots: 1000, n_reps: 2000, sizes: vec![8, 12, 16], every: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShotNoiseSection {
    pub depth: usize,
    pub n_shot: usize,
    pub sampled_epochs: usize,
    pub noiseless_epochs: usize,
    pub seeds: usize,
}

impl Default for ShotNoiseSection {
    fn default() -> Self {
        Self { depth: 5, n_shot: 5, sampled_epochs: 50, noiseless_epochs: 200, seeds: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub max_n: usize,
    pub models: usize,
    pub inputs: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { max_n: 12, models: 5, inputs: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DimsSection {
    pub sizes: Vec<usize>,
}

impl Default for DimsSection {
    fn default() -> Self {
        Self { sizes: vec![8, 16, 32, 64] }
    }
}

/// One experiment run, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub experiment: ExperimentKind,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    /// Ground-state cache; none disables caching.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    /// Directory of trained model JSON files for `phase-diagram`.
    #[serde(default)]
    pub models_dir: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub seeds: SeedSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub estimation: EstimationSection,
    #[serde(default)]
    pub grid: PhaseGridSpec,
    #[serde(default)]
    pub shot_noise: ShotNoiseSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub dims: DimsSection,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Ascending prime factorization.
pub fn default_primes(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        while m % p == 0 {
            out.push(p);
            m /= p;
        }
        p += 1;
    }
    out
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            version: CONFIG_VERSION,
            experiment,
            out_dir: default_out(),
            cache_dir: None,
            models_dir: None,
            model: ModelSection::default(),
            seeds: SeedSection::default(),
            train: TrainSection::default(),
            estimation: EstimationSection::default(),
            grid: PhaseGridSpec::default(),
            shot_noise: ShotNoiseSection::default(),
            verify: VerifySection::default(),
            dims: DimsSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    pub fn primes(&self) -> Vec<usize> {
        if self.model.primes.is_empty() {
            default_primes(self.model.n)
        } else {
            self.model.primes.clone()
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.version != CONFIG_VERSION {
            return bad(format!("unsupported config version {}", self.version));
        }
        if self.model.n < 2 {
            return bad(format!("model.n must be at least 2, got {}", self.model.n));
        }
        build_split_plan(self.model.n, &self.primes()).map_err(|e| CliError::Config(e.to_string()))?;
        let counts = [
            ("model.depth", self.model.depth),
            ("seeds.count", self.seeds.count),
            ("train.epochs", self.train.epochs),
            ("train.n_shot", self.train.n_shot),
            ("estimation.n_shots", self.estimation.n_shots),
            ("estimation.n_reps", self.estimation.n_reps),
            ("estimation.every", self.estimation.every),
            ("shot_noise.depth", self.shot_noise.depth),
            ("shot_noise.n_shot", self.shot_noise.n_shot),
            ("shot_noise.sampled_epochs", self.shot_noise.sampled_epochs),
            ("shot_noise.noiseless_epochs", self.shot_noise.noiseless_epochs),
            ("shot_noise.seeds", self.shot_noise.seeds),
            ("verify.max_n", self.verify.max_n),
            ("verify.models", self.verify.models),
            ("verify.inputs", self.verify.inputs),
        ];
        for (name, v) in counts {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if !(self.train.eta0 > 0.0 && self.train.eta0.is_finite()) {
            return bad(format!("train.eta0 must be positive, got {}", self.train.eta0));
        }
        if self.estimation.sizes.is_empty() || self.estimation.sizes.iter().any(|&n| n < 2) {
            return bad("estimation.sizes needs register sizes of at least 2".into());
        }
        if self.dims.sizes.is_empty() || self.dims.sizes.contains(&0) {
            return bad("dims.sizes needs positive register sizes".into());
        }
        self.grid.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ExperimentConfig::from_toml("version = 1\nexperiment = \"train\"\n").unwrap();
        assert_eq!(cfg.model.n, 8);
        assert_eq!(cfg.model.depth, 10);
        assert_eq!(cfg.seeds.count, 20);
        assert_eq!(cfg.train.eta0, 200.0);
        assert_eq!(cfg.primes(), vec![2, 2, 2]);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::from_toml("version = 1\nexperiment = \"train\"\ncolour = 3\n").is_err());
        assert!(ExperimentConfig::from_toml("version = 1\nexperiment = \"train\"\n[model]\nwidth = 3\n").is_err());
        assert!(ExperimentConfig::from_toml("version = 2\nexperiment = \"train\"\n").is_err());
        assert!(ExperimentConfig::from_toml("version = 1\nexperiment = \"fly\"\n").is_err());
        let primes = "version = 1\nexperiment = \"train\"\n[model]\nn = 12\nprimes = [2, 2]\n";
        assert!(ExperimentConfig::from_toml(primes).is_err());
        let zero = "version = 1\nexperiment = \"train\"\n[seeds]\ncount = 0\n";
        assert!(ExperimentConfig::from_toml(zero).is_err());
    }

    #[test]
    fn toml_roundtrip() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ShotNoiseCompare);
        cfg.model.primes = vec![2, 3];
        cfg.model.n = 6;
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn factorization() {
        assert_eq!(default_primes(12), vec![2, 2, 3]);
        assert_eq!(default_primes(18), vec![2, 3, 3]);
        assert_eq!(default_primes(16), vec![2, 2, 2, 2]);
    }
}
