//! Solving a configuration: one worker per order, results gathered in order.

use std::time::{Duration, Instant};

use fracstab_core::lyapunov::{caputo_of_functional, LyapunovFunctional};
use fracstab_core::{solve_fde_abm, Signal64, Trajectory64};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, FunctionalKind};
use crate::error::{CliError, CliResult};

pub struct FunctionalSeries {
    pub label: String,
    pub values: Signal64,
    /// Discrete Caputo derivative of `values` at the trajectory's order.
    pub caputo: Signal64,
}

pub struct OrderRun {
    pub index: usize,
    pub theta: f64,
    pub trajectory: Trajectory64,
    pub functionals: Vec<FunctionalSeries>,
    pub elapsed: Duration,
}

pub fn solve_order(cfg: &ExperimentConfig, i: usize) -> CliResult<Trajectory64> {
    let theta = cfg.orders[i].theta;
    solve_fde_abm(&cfg.params, cfg.order(i), &cfg.initial_state, cfg.grid(i)).map_err(CliError::at_order(theta))
}

pub fn build_functionals(
    cfg: &ExperimentConfig,
    kinds: &[FunctionalKind],
) -> CliResult<Vec<(String, LyapunovFunctional<f64>)>> {
    kinds
        .iter()
        .map(|&k| Ok((k.label().to_string(), cfg.functional(k)?)))
        .collect()
}

fn run_one(cfg: &ExperimentConfig, i: usize, functionals: &[(String, LyapunovFunctional<f64>)]) -> CliResult<OrderRun> {
    let start = Instant::now();
    let trajectory = solve_order(cfg, i)?;
    let functionals = functionals
        .iter()
        .map(|(label, f)| {
            let values = f.along(&trajectory)?;
            let caputo = caputo_of_functional(f, &trajectory)?;
            Ok(FunctionalSeries {
                label: label.clone(),
                values,
                caputo,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(OrderRun {
        index: i,
        theta: cfg.orders[i].theta,
        trajectory,
        functionals,
        elapsed: start.elapsed(),
    })
}

/// Runs every order of the configuration in parallel, evaluating the given
/// functionals along each trajectory. Results come back in config order.
pub fn run_all(cfg: &ExperimentConfig, kinds: &[FunctionalKind]) -> CliResult<Vec<OrderRun>> {
    let functionals = build_functionals(cfg, kinds)?;
    (0..cfg.orders.len())
        .into_par_iter()
        .map(|i| run_one(cfg, i, &functionals))
        .collect()
}

/// `|x - target| / |target|` in the Euclidean norm.
pub fn relative_distance(x: &[f64], target: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = target.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

/// Time of the first node within `radius` (relative) of `target`.
pub fn entry_time(traj: &Trajectory64, target: &[f64], radius: f64) -> Option<f64> {
    traj.states()
        .position(|s| relative_distance(s, target) <= radius)
        .map(|k| traj.grid.time(k))
}
