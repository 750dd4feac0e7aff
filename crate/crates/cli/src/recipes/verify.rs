use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spqcnn_core::ansatz::{forward_nonsplit, forward_sp, Observable, Qcnn, SpQcnnModel};
use spqcnn_core::combinatorics::{dim_vz_bruteforce, dim_vz_burnside};
use spqcnn_core::qsim::{random_symmetric_state, z_expectations, zavg_expectation, PureState};
use spqcnn_core::rng::{stream_id, substream};
use spqcnn_core::spin::{dense_ground_energy, energy, ClusterIsingParams};
use spqcnn_core::training::{grad_parallel, grad_per_instance, GradMode, ShiftScope};

use super::{init_sp, Solver};
use crate::config::{default_primes, ExperimentConfig};
use crate::output::{OutputDir, RunManifest};
use crate::CliError;

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const GRADIENT_TOL: f64 = 1e-9;
pub const ENERGY_TOL: f64 = 1e-8;

const INPUT_TAG: u64 = 0x494E_5055;
/// Largest register that gets a dense diagonalization.
const DENSE_MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub suite: String,
    pub case: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerifyRow {
    fn new(suite: &str, case: String, max_error: f64, tolerance: f64) -> Self {
        Self { suite: suite.into(), case, max_error, tolerance, passed: max_error <= tolerance }
    }
}

/// Largest spread of `⟨Z_q⟩` across qubits of the sp output, and largest gap
/// between the nonsplit readout and the sp `⟨Z_avg⟩`.
pub fn symmetry_errors(model: &SpQcnnModel, input: &PureState) -> Result<(f64, f64), CliError> {
    let sp = forward_sp(model, input)?;
    let z = z_expectations(&sp);
    let spread = z.iter().map(|v| (v - z[0]).abs()).fold(0.0, f64::max);
    let (ns, q) = forward_nonsplit(model, input)?;
    let gap = (z_expectations(&ns)[q] - zavg_expectation(&sp)).abs();
    Ok((spread, gap))
}

/// Largest disagreement per level between the parallelized, per-instance
/// and adjoint gradients.
pub fn gradient_errors(model: &SpQcnnModel, input: &PureState) -> Result<Vec<f64>, CliError> {
    let (_, adjoint) = model.split_circuit().gradient(&model.params(), input, Observable::Zavg);
    let mut worst = vec![0.0f64; model.plan().n_layers()];
    let mut rng = substream(0, 0);
    for id in model.param_ids() {
        let p = model.param_index(id)?;
        let per = grad_per_instance(model, input, p)?;
        let par = grad_parallel(model, input, id, GradMode::Exact, ShiftScope::EveryBranch, &mut rng)?.value;
        let err = (par - per).abs().max((adjoint[p] - per).abs());
        worst[id.level] = worst[id.level].max(err);
    }
    Ok(worst)
}

fn burnside_rows(max_n: usize) -> Result<Vec<VerifyRow>, CliError> {
    let mut rows = Vec::new();
    for n in 1..=max_n {
        for ell in 0..=n {
            let agree = dim_vz_burnside(n, ell)? == dim_vz_bruteforce(n, ell)?;
            rows.push(VerifyRow::new("burnside", format!("n={n} ell={ell}"), if agree { 0.0 } else { 1.0 }, 0.0));
        }
    }
    Ok(rows)
}

fn symmetry_rows(config: &ExperimentConfig) -> Result<Vec<VerifyRow>, CliError> {
    let v = &config.verify;
    let sizes: Vec<usize> = [4, 6, 8, 9, 12, 16].into_iter().filter(|&n| n <= v.max_n).collect();
    let mut rows = Vec::new();
    for n in sizes {
        let errs = (0..v.models as u64)
            .into_par_iter()
            .map(|k| {
                let model = init_sp(n, &default_primes(n), 2, config.seeds.base + k)?;
                let mut worst = (0.0f64, 0.0f64);
                for i in 0..v.inputs as u64 {
                    let mut rng = substream(config.seeds.base + k, stream_id(&[INPUT_TAG, n as u64, i]));
                    let input = random_symmetric_state(n, &mut rng)?;
                    let (a, b) = symmetry_errors(&model, &input)?;
                    worst = (worst.0.max(a), worst.1.max(b));
                }
                Ok(worst)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let spread = errs.iter().map(|e| e.0).fold(0.0, f64::max);
        let gap = errs.iter().map(|e| e.1).fold(0.0, f64::max);
        rows.push(VerifyRow::new("symmetry", format!("qubit-equivalence n={n}"), spread, SYMMETRY_TOL));
        rows.push(VerifyRow::new("symmetry", format!("split-vs-nonsplit n={n}"), gap, SYMMETRY_TOL));
    }
    Ok(rows)
}

fn gradient_rows(config: &ExperimentConfig, solver: &Solver) -> Result<Vec<VerifyRow>, CliError> {
    let mut rows = Vec::new();
    for (n, depth) in [(8, 2), (12, 1)] {
        if n > config.verify.max_n {
            continue;
        }
        let model = init_sp(n, &default_primes(n), depth, config.seeds.base)?;
        let input = solver.at(n, 0.6, 0.2)?;
        for (level, err) in gradient_errors(&model, &input)?.into_iter().enumerate() {
            rows.push(VerifyRow::new("gradient", format!("n={n} level={level}"), err, GRADIENT_TOL));
        }
    }
    Ok(rows)
}

fn lanczos_rows(config: &ExperimentConfig, solver: &Solver) -> Result<Vec<VerifyRow>, CliError> {
    let mut rows = Vec::new();
    for n in 3..=config.verify.max_n.min(DENSE_MAX_N) {
        for h1 in [0.3, 1.0, 1.7] {
            for h2 in [-0.8, 0.0, 0.8] {
                let p = ClusterIsingParams::new(n, h1, h2)?;
                let state = solver.solve(&p)?;
                let err = (energy(&p, state.amplitudes()) - dense_ground_energy(&p)?).abs();
                rows.push(VerifyRow::new("lanczos", format!("n={n} h1={h1} h2={h2}"), err, ENERGY_TOL));
            }
        }
    }
    Ok(rows)
}

/// Cross-checks between independent implementations. Fails with an
/// invariant error, after writing its report, if any check fails.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let mut out = OutputDir::create(&config.out_dir)?;
    let solver = Solver::new(config)?;
    let mut rows = burnside_rows(config.verify.max_n)?;
    rows.extend(symmetry_rows(config)?);
    rows.extend(gradient_rows(config, &solver)?);
    rows.extend(lanczos_rows(config, &solver)?);

    out.write_csv("verify.csv", &rows)?;
    let manifest = out.finish(config)?;
    let failed: Vec<&VerifyRow> = rows.iter().filter(|r| !r.passed).collect();
    if let Some(first) = failed.first() {
        return Err(CliError::Invariant(format!(
            "{} of {} checks failed; first: {} {} (error {:e}, tolerance {:e})",
            failed.len(),
            rows.len(),
            first.suite,
            first.case,
            first.max_error,
            first.tolerance
        )));
    }
    Ok(manifest)
}
