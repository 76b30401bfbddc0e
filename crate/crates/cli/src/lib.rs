//! Batch experiment driver: run matrices, CSV tables and rate reports.

pub mod config;
pub mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use wavext_core::aposteriori::{compute_estimator, effectivity};
use wavext_core::fem::{LagrangeSpace, SpatialOperators};
use wavext_core::mesh::Mesh;
use wavext_core::postprocess::{energy_drift, energy_trace, error_c0, postprocess_ustar};
use wavext_core::solver::{solve_with_operators, Discretization};
use wavext_core::time::TimePartition;

pub use config::{Cell, Experiment, ExperimentConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure in {cell}: {message}")]
    Solver { cell: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Everything measured for one cell of the run matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    pub experiment: Experiment,
    pub cell: Cell,
    pub h: f64,
    /// Spatial DOFs times temporal nodes of the degree-`q` trial space, for `u` and `v` together.
    pub total_dofs: usize,
    /// `[err_u, err_ustar, err_v, err_gradu]` when an exact solution is known.
    pub errors: Option<[f64; 4]>,
    pub eta: Option<f64>,
    pub osc_f: Option<f64>,
    pub effectivity: Option<f64>,
    pub energy_drift: f64,
    pub seconds: f64,
}

impl RunRecord {
    pub fn err_u(&self) -> Option<f64> {
        self.errors.map(|e| e[0])
    }
}

pub fn describe_cell(preset: &str, cell: &Cell) -> String {
    format!(
        "preset={preset} method={} bc_mode={} p={} q={} mesh={}x{} tau={}",
        cell.method.name(),
        cell.bc_mode.name(),
        cell.p,
        cell.q,
        cell.mesh,
        cell.mesh,
        cell.tau
    )
}

/// Solves a single cell and evaluates all requested quantities.
pub fn run_cell(
    config: &ExperimentConfig,
    run_id: usize,
    cell: &Cell,
) -> Result<RunRecord, CliError> {
    let started = Instant::now();
    let preset = config.preset()?;
    let solver_err = |e: wavext_core::Error| CliError::Solver {
        cell: format!(
            "run {run_id} ({})",
            describe_cell(&config.preset_name, cell)
        ),
        message: e.to_string(),
    };
    let mesh = Mesh::structured(cell.mesh, cell.mesh, preset.domain)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let h = mesh.mesh_size();
    let space =
        Arc::new(LagrangeSpace::new(mesh, cell.p).map_err(|e| CliError::Config(e.to_string()))?);
    let partition = TimePartition::with_step(preset.final_time, cell.tau)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let total_dofs = 2 * space.num_dofs() * (partition.num_slabs() * cell.q + 1);
    let disc = Discretization::new(space.clone(), partition, cell.q, cell.method, cell.bc_mode)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let ops = SpatialOperators::new(space, preset.problem.wavespeed.clone()).map_err(solver_err)?;
    let sol = solve_with_operators(&preset.problem, &disc, &ops).map_err(|e| match e {
        wavext_core::Error::Config(m) => CliError::Config(m),
        other => solver_err(other),
    })?;
    let ustar = postprocess_ustar(&sol);
    let errors = match preset.problem.exact.as_ref() {
        Some(exact) => {
            let r = error_c0(
                &sol,
                &ustar,
                Some(exact),
                &*preset.problem.wavespeed,
                config.samples_per_slab,
            )
            .map_err(solver_err)?;
            Some([r.err_u, r.err_ustar, r.err_v, r.err_gradu])
        }
        None => None,
    };
    let (eta, osc_f, eff) = if config.experiment == Experiment::Estimate {
        let est = compute_estimator(&preset.problem, &sol, &ustar).map_err(|e| match e {
            wavext_core::Error::Config(m) => CliError::Config(m),
            other => solver_err(other),
        })?;
        let eff = errors.and_then(|e| effectivity(est.eta, e[0]));
        (Some(est.eta), Some(est.osc_f), eff)
    } else {
        (None, None, None)
    };
    let drift = energy_drift(&energy_trace(&sol, &ops));
    Ok(RunRecord {
        run_id,
        experiment: config.experiment,
        cell: *cell,
        h,
        total_dofs,
        errors,
        eta,
        osc_f,
        effectivity: eff,
        energy_drift: drift,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Runs the whole matrix on `jobs` worker threads; records come back in matrix order.
pub fn run_experiment(
    config: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<Vec<RunRecord>, CliError> {
    let cells = config.cells();
    let work = || {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, c)| run_cell(config, i + 1, c))
            .collect::<Vec<_>>()
    };
    let results = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    };
    results.into_iter().collect()
}

/// Files written by [`execute`] and the outcome of `--check`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub records: Vec<RunRecord>,
    pub results_csv: PathBuf,
    pub rates_txt: PathBuf,
    pub run_log: PathBuf,
    pub check_failures: Vec<String>,
}

/// Runs an experiment and writes `results.csv`, `rates.txt` and `run.log` into `out`.
pub fn execute(
    config: &ExperimentConfig,
    out: &Path,
    jobs: Option<usize>,
    check: bool,
) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(out)?;
    let started = Instant::now();
    let records = run_experiment(config, jobs)?;
    let results_csv = out.join("results.csv");
    let rates_txt = out.join("rates.txt");
    let run_log = out.join("run.log");
    std::fs::write(&results_csv, report::results_csv(&records)?)?;
    std::fs::write(&rates_txt, report::rates_report(config, &records))?;
    let check_failures = if check {
        report::check(config, &records)
    } else {
        Vec::new()
    };

    let mut log = String::new();
    let _ = writeln!(
        log,
        "experiment {} on preset {}",
        config.experiment, config.preset_name
    );
    let _ = writeln!(
        log,
        "{} runs, {} samples per slab",
        records.len(),
        config.samples_per_slab
    );
    for r in &records {
        let _ = writeln!(
            log,
            "run {:>3}: {} h={:.4e} dofs={} err_u={} energy_drift={:.3e} ({:.2}s)",
            r.run_id,
            describe_cell(&config.preset_name, &r.cell),
            r.h,
            r.total_dofs,
            r.err_u().map_or("n/a".into(), |e| format!("{e:.4e}")),
            r.energy_drift,
            r.seconds
        );
    }
    if check {
        if check_failures.is_empty() {
            let _ = writeln!(log, "check: all thresholds met");
        }
        for f in &check_failures {
            let _ = writeln!(log, "check failed: {f}");
        }
    }
    let _ = writeln!(log, "total {:.2}s", started.elapsed().as_secs_f64());
    std::fs::write(&run_log, log)?;
    Ok(Outcome {
        records,
        results_csv,
        rates_txt,
        run_log,
        check_failures,
    })
}
