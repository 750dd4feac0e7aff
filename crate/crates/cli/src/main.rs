use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spqcnn::{run, CliError, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "spqcnn", version, about = "Run sp-QCNN experiments from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train sp-QCNN models over several seeds.
    Train(Common),
    /// Evaluate trained models over the (h1, h2) grid.
    PhaseDiagram(Common),
    /// Measurement efficiency along training.
    Efficiency(Common),
    /// Measurement efficiency against register size.
    EfficiencyVsN(Common),
    /// Sampled-gradient training of sp and conventional models.
    ShotNoiseCompare(Common),
    /// Symmetric-subspace dimension tables.
    Dims(Common),
    /// Cross-check independent implementations.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `seeds.base`.
    #[arg(long)]
    seed_base: Option<u64>,
    /// Overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::Train(c) => (ExperimentKind::Train, c),
            Command::PhaseDiagram(c) => (ExperimentKind::PhaseDiagram, c),
            Command::Efficiency(c) => (ExperimentKind::Efficiency, c),
            Command::EfficiencyVsN(c) => (ExperimentKind::EfficiencyVsN, c),
            Command::ShotNoiseCompare(c) => (ExperimentKind::ShotNoiseCompare, c),
            Command::Dims(c) => (ExperimentKind::Dims, c),
            Command::Verify(c) => (ExperimentKind::Verify, c),
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (kind, args) = cli.command.split();
    let mut config = ExperimentConfig::load(&args.config)?;
    if config.experiment != kind {
        return Err(CliError::Config(format!(
            "{} names experiment {:?}, not {:?}",
            args.config.display(),
            config.experiment.name(),
            kind.name()
        )));
    }
    if let Some(base) = args.seed_base {
        config.seeds.base = base;
    }
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let manifest = run(&config)?;
    println!("{} finished in {:.1} s", manifest.experiment, manifest.wall_clock_seconds);
    for o in &manifest.outputs {
        println!("  {}  {}", o.sha256, config.out_dir.join(&o.path).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
