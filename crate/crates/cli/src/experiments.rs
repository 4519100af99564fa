//! Experiment runners. Grid points run on a bounded rayon pool and are
//! gathered in grid order, so the output never depends on the worker count.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use doublewell_core::classical::{
    self, ClassicalParams, CriticalCoupling, IntegrationOptions, PhaseState, Regime, Stability,
    Termination,
};
use doublewell_core::dynamics::{self, ModelParams, Propagator};
use doublewell_core::qfi;
use doublewell_core::spin;
use rayon::prelude::*;

use crate::config::{linspace, ExperimentConfig, ExperimentKind, InitialState, Metric};
use crate::output::{self, Cell, FileRecord, Table};
use crate::{ExperimentError, Result};

/// What a finished run produced.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub files: Vec<FileRecord>,
    pub manifest: PathBuf,
    pub tables: Vec<Table>,
}

/// Computes and writes one experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let tables = compute(cfg)?;
    let (files, manifest) =
        output::write_run(&cfg.output, cfg, &tables, start.elapsed().as_secs_f64())?;
    Ok(RunReport {
        output_dir: cfg.output.clone(),
        files,
        manifest,
        tables,
    })
}

/// Computes the tables of one experiment without touching the filesystem.
pub fn compute(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    pool.install(|| match cfg.experiment {
        ExperimentKind::PhasePortrait => phase_portrait(cfg),
        ExperimentKind::Fidelity => series_table(cfg, Metric::Fidelity, "fidelity.csv"),
        ExperimentKind::JzSeries => series_table(cfg, Metric::Jz, "jz_series.csv"),
        ExperimentKind::QfiMap => qfi_map(cfg),
        ExperimentKind::Sweep => sweep(cfg),
    })
}

/// One quantum observable along `times` for a single `Λ`.
///
/// `metric` must be one of the time-dependent metrics; any failure is
/// reported with the offending `(Λ, κt)`.
pub fn quantum_series(
    n_particles: u32,
    lambda: f64,
    initial: InitialState,
    times: &[f64],
    metric: Metric,
) -> Result<Vec<f64>> {
    let at = |kappa_t: f64| {
        move |source| ExperimentError::PointFailed {
            lambda,
            kappa_t,
            source,
        }
    };
    let first = times.first().copied().unwrap_or(0.0);
    let params = ModelParams::new(n_particles, lambda).map_err(at(first))?;
    let spin = params.spin();
    let psi0 = spin::spin_coherent_state(spin, initial.theta, initial.phi).map_err(at(first))?;
    let prop = Propagator::for_params(params).map_err(at(first))?;
    let prepared = prop.prepare(&psi0).map_err(at(first))?;
    let ops = match metric {
        Metric::FBarMax | Metric::Jz => Some(spin::build_operators(spin)),
        Metric::Fidelity => None,
        Metric::LambdaC => {
            return Err(ExperimentError::Config(
                "lambda_c is not a time-dependent metric".into(),
            ))
        }
    };
    times
        .iter()
        .map(|&kappa_t| {
            let psi = prepared.at(kappa_t);
            let value = match (metric, &ops) {
                (Metric::FBarMax, Some(ops)) => {
                    qfi::pure_qfi_matrix(&psi, ops).map(|qm| qfi::max_mean_qfi(&qm, n_particles))
                }
                (Metric::Jz, Some(ops)) => spin::expectation(ops, &psi).map(|e| e[2]),
                _ => dynamics::fidelity(&psi0, &psi),
            };
            value.map_err(at(kappa_t))
        })
        .collect()
}

/// Evaluates `metric` over the `Λ` grid in parallel, in grid order.
fn lambda_grid(
    cfg: &ExperimentConfig,
    times: &[f64],
    metric: Metric,
) -> Result<Vec<(f64, Vec<f64>)>> {
    cfg.lambda
        .values()
        .par_iter()
        .map(|&lambda| {
            quantum_series(cfg.n_particles, lambda, cfg.initial_state, times, metric)
                .map(|v| (lambda, v))
        })
        .collect()
}

fn long_table(
    file_name: &str,
    metric: Metric,
    times: &[f64],
    results: &[(f64, Vec<f64>)],
) -> Table {
    let mut table = Table::new(file_name, &["lambda", "kappa_t", metric.column()]);
    for (lambda, values) in results {
        for (&t, &v) in times.iter().zip(values) {
            table.push(vec![(*lambda).into(), t.into(), v.into()]);
        }
    }
    table
}

fn state_note(cfg: &ExperimentConfig) -> String {
    format!(
        "N = {}; initial spin coherent state theta = {}, phi = {}",
        cfg.n_particles, cfg.initial_state.theta, cfg.initial_state.phi
    )
}

fn series_table(cfg: &ExperimentConfig, metric: Metric, file_name: &str) -> Result<Vec<Table>> {
    let times = cfg.time.values();
    let results = lambda_grid(cfg, &times, metric)?;
    let mut table = long_table(file_name, metric, &times, &results);
    table.notes.push(state_note(cfg));
    Ok(vec![table])
}

fn qfi_map(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let times = cfg.time.values();
    let mut all_times = times.clone();
    all_times.extend_from_slice(&cfg.slices);
    let results = lambda_grid(cfg, &all_times, Metric::FBarMax)?;
    let grid: Vec<(f64, Vec<f64>)> = results
        .iter()
        .map(|(l, v)| (*l, v[..times.len()].to_vec()))
        .collect();

    let mut tables = Vec::new();
    let mut map = long_table("qfi_map.csv", Metric::FBarMax, &times, &grid);
    map.notes.push(state_note(cfg));
    tables.push(map);

    for (k, &slice) in cfg.slices.iter().enumerate() {
        let mut table = Table::new(
            format!("qfi_slice_{k}.csv"),
            &["lambda", "kappa_t", Metric::FBarMax.column()],
        );
        table.notes.push(state_note(cfg));
        table.notes.push(format!("slice at kappa_t = {slice}"));
        for (lambda, values) in &results {
            table.push(vec![
                (*lambda).into(),
                slice.into(),
                values[times.len() + k].into(),
            ]);
        }
        tables.push(table);
    }

    if cfg.matrix {
        let headers: Vec<String> = times.iter().map(|t| format!("kt={t}")).collect();
        let mut columns = vec!["lambda"];
        columns.extend(headers.iter().map(String::as_str));
        let mut table = Table::new("qfi_map_matrix.csv", &columns);
        table.notes.push(state_note(cfg));
        table
            .notes
            .push("rows: lambda; columns: f_bar_max at each kappa_t".into());
        for (lambda, values) in &grid {
            let mut row: Vec<Cell> = vec![(*lambda).into()];
            row.extend(values.iter().map(|&v| Cell::from(v)));
            table.push(row);
        }
        tables.push(table);
    }
    Ok(tables)
}

fn sweep(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    if cfg.metric != Metric::LambdaC {
        return series_table(cfg, cfg.metric, "sweep.csv");
    }
    let thetas = cfg.theta0.values();
    let phis = cfg.phi0.values();
    let mut table = Table::new("sweep.csv", &["theta0", "phi0", Metric::LambdaC.column()]);
    table.notes.push(
        "lambda_c = cos^2(theta0) / (1 - sin(theta0) cos(phi0)); \
         unbounded: vanishing denominator; indeterminate: 0/0"
            .into(),
    );
    for &theta0 in &thetas {
        for &phi0 in &phis {
            let value = match classical::self_trapping_critical_omega(theta0, phi0) {
                CriticalCoupling::Finite(v) => Cell::Num(v),
                CriticalCoupling::Unbounded => "unbounded".into(),
                CriticalCoupling::Indeterminate => "indeterminate".into(),
            };
            table.push(vec![theta0.into(), phi0.into(), value]);
        }
    }
    Ok(vec![table])
}

/// Status of one phase-portrait trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrajectoryStatus {
    Complete,
    /// Truncated before a step would reach a pole.
    Pole,
    /// Energy drift exceeded the conservation bound.
    Drift,
}

impl TrajectoryStatus {
    pub fn label(self) -> &'static str {
        match self {
            TrajectoryStatus::Complete => "complete",
            TrajectoryStatus::Pole => "pole",
            TrajectoryStatus::Drift => "drift",
        }
    }
}

fn stability_label(s: Stability) -> &'static str {
    match s {
        Stability::StableCenter => "stable-center",
        Stability::UnstableSaddle => "unstable-saddle",
        Stability::Marginal => "marginal",
    }
}

fn regime_label(r: Regime) -> &'static str {
    match r {
        Regime::AboveBifurcation => "above-bifurcation",
        Regime::BelowBifurcation => "below-bifurcation",
        Regime::AtBifurcation => "at-bifurcation",
    }
}

/// Initial conditions: `p` on `[−0.95, 0.95]`, `φ` on `[0, 2π)`.
pub fn portrait_lattice(n: usize) -> Vec<PhaseState> {
    let ps = linspace(-0.95, 0.95, n);
    let mut starts = Vec::with_capacity(n * n);
    for &p in &ps {
        for k in 0..n {
            starts.push(PhaseState::new(p, 2.0 * PI * k as f64 / n as f64));
        }
    }
    starts
}

fn phase_portrait(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let lambdas = cfg.lambda.values();
    let starts = portrait_lattice(cfg.lattice);
    let dt = IntegrationOptions::DEFAULT_DT;
    let steps = (cfg.time.max / dt).ceil() as usize;
    let stride = (steps / cfg.time.samples.saturating_sub(1).max(1)).max(1);
    let options = IntegrationOptions {
        t_end: cfg.time.max,
        dt,
        stride,
    };

    let work: Vec<(usize, usize)> = (0..lambdas.len())
        .flat_map(|i| (0..starts.len()).map(move |k| (i, k)))
        .collect();
    let runs: Vec<(TrajectoryStatus, classical::Trajectory)> = work
        .par_iter()
        .map(|&(i, k)| {
            let params = ClassicalParams::new(lambdas[i])?;
            let (traj, term) = classical::integrate(starts[k], params, &options)?;
            let h0 = traj.points[0].energy;
            let status = if let Termination::PoleReached { .. } = term {
                TrajectoryStatus::Pole
            } else if traj.max_energy_drift > classical::drift_bound(h0) {
                TrajectoryStatus::Drift
            } else {
                TrajectoryStatus::Complete
            };
            Ok((status, traj))
        })
        .collect::<Result<_>>()?;

    let time_note =
        "phase-portrait t is the classical time tau = (N-1) kappa t, in units of 1/kappa_r";
    let mut tables = Vec::new();
    for (i, &lambda) in lambdas.iter().enumerate() {
        let mut table = Table::new(
            format!("trajectories_{i:03}.csv"),
            &[
                "lambda",
                "trajectory",
                "p0",
                "phi0",
                "status",
                "t",
                "p",
                "phi",
                "H",
            ],
        );
        table.notes.push(format!("lambda = {lambda}"));
        table.notes.push(time_note.into());
        for (k, start) in starts.iter().enumerate() {
            let (status, traj) = &runs[i * starts.len() + k];
            for pt in &traj.points {
                table.push(vec![
                    lambda.into(),
                    k.into(),
                    start.p.into(),
                    start.phi.into(),
                    status.label().into(),
                    pt.t.into(),
                    pt.p.into(),
                    pt.phi.into(),
                    pt.energy.into(),
                ]);
            }
        }
        tables.push(table);
    }

    let mut fixed = Table::new(
        "fixed_points.csv",
        &[
            "lambda",
            "p",
            "phi",
            "theta",
            "eigenvalue_squared",
            "stability",
            "regime",
        ],
    );
    fixed.notes.push(
        "stationary points at the poles p = +-1 are not listed (phi-dot diverges there)".into(),
    );
    for &lambda in &lambdas {
        let params = ClassicalParams::new(lambda)?;
        for fp in classical::find_fixed_points(params) {
            fixed.push(vec![
                lambda.into(),
                fp.location.p.into(),
                fp.location.phi.into(),
                fp.theta_equivalent.into(),
                fp.eigenvalue_squared.into(),
                stability_label(fp.stability).into(),
                regime_label(fp.regime).into(),
            ]);
        }
    }
    tables.push(fixed);
    Ok(tables)
}
