use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use spqcnn::config::{ExperimentConfig, ExperimentKind};
use spqcnn::output::{read_csv, sha256_hex, RunManifest};
use spqcnn::recipes::phase::PhaseRow;
use spqcnn::recipes::LossSummaryRow;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spqcnn"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 7);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "a.toml", "version = 1\nexperiment = \"dims\"\nspeed = 3\n");
    let status = bin().args(["dims", "--config"]).arg(&unknown).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let dims = write_config(dir.path(), "b.toml", "version = 1\nexperiment = \"dims\"\n");
    let status = bin().args(["train", "--config"]).arg(&dims).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let missing = bin().args(["dims", "--config"]).arg(dir.path().join("nope.toml")).status().unwrap();
    assert_eq!(missing.code(), Some(2));

    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let phase = format!(
        "version = 1\nexperiment = \"phase-diagram\"\nmodels_dir = {:?}\nout_dir = {:?}\n",
        empty,
        dir.path().join("out")
    );
    let p = write_config(dir.path(), "c.toml", &phase);
    assert_eq!(bin().args(["phase-diagram", "--config"]).arg(&p).status().unwrap().code(), Some(2));
}

#[test]
fn dims_run_writes_checksummed_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "d.toml", "version = 1\nexperiment = \"dims\"\n[dims]\nsizes = [4, 8]\n");
    let out = dir.path().join("out");
    let status = bin().args(["dims", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let m = RunManifest::load(&out).unwrap();
    assert_eq!(m.experiment, "dims");
    assert_eq!(m.outputs.len(), 2);
    for o in &m.outputs {
        let bytes = fs::read(out.join(&o.path)).unwrap();
        assert_eq!(sha256_hex(&bytes), o.sha256);
        assert!(bytes.starts_with(b"# manifest: manifest.json\n"));
    }
    let dims = fs::read_to_string(out.join("dims.csv")).unwrap();
    // n=8, ell=4 has ten necklaces
    assert!(dims.lines().any(|l| l.starts_with("8,4,0,10,")), "{dims}");
}

#[test]
fn verify_passes_on_small_registers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "v.toml",
        "version = 1\nexperiment = \"verify\"\n[verify]\nmax_n = 8\nmodels = 2\ninputs = 2\n",
    );
    let out = dir.path().join("out");
    let status = bin().args(["verify", "--config"]).arg(&cfg).arg("--out").arg(&out).args(["--jobs", "1"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(out.join("verify.csv")).unwrap();
    for suite in ["burnside", "symmetry", "gradient", "lanczos"] {
        assert!(text.contains(suite), "missing {suite}");
    }
    assert!(!text.contains(",false"));
}

#[test]
fn train_then_phase_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::Train);
    cfg.model.n = 6;
    cfg.model.depth = 2;
    cfg.seeds.count = 2;
    cfg.train.epochs = 3;
    cfg.out_dir = dir.path().join("train");
    cfg.cache_dir = Some(dir.path().join("cache"));
    let m = spqcnn::run(&cfg).unwrap();
    assert_eq!(m.outputs.iter().filter(|o| o.path.starts_with("models/")).count(), 2);
    let summary: Vec<LossSummaryRow> = read_csv(&cfg.out_dir.join("loss_summary.csv")).unwrap();
    assert_eq!(summary.len(), 4);

    let mut phase = ExperimentConfig::new(ExperimentKind::PhaseDiagram);
    phase.models_dir = Some(cfg.out_dir.join("models"));
    phase.out_dir = dir.path().join("phase");
    phase.cache_dir = cfg.cache_dir.clone();
    phase.grid.h1_points = 3;
    phase.grid.h2_points = 2;
    spqcnn::run(&phase).unwrap();
    let rows: Vec<PhaseRow> = read_csv(&phase.out_dir.join("phase_diagram.csv")).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!((rows[0].h1, rows[0].h2), (0.0, -1.6));
    assert_eq!((rows[1].h1, rows[1].h2), (1.0, -1.6));
    assert!(rows.iter().all(|r| r.mean_output.abs() <= 1.0 && r.std >= 0.0));
}

#[test]
fn seed_base_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let text = "version = 1\nexperiment = \"train\"\n[model]\nn = 4\ndepth = 1\n[seeds]\ncount = 1\n[train]\nepochs = 1\n";
    let cfg = write_config(dir.path(), "t.toml", text);
    let run = |base: &str, out: &str| {
        let status = bin()
            .args(["train", "--config"])
            .arg(&cfg)
            .args(["--seed-base", base, "--out"])
            .arg(dir.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(dir.path().join(out).join("loss_per_seed.csv")).unwrap()
    };
    let a = run("5", "a");
    let b = run("5", "b");
    let c = run("6", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
}
