//! The four subcommands, as library functions returning their results.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use fracstab_core::lyapunov::{lemma_certificate, Certificate, GFunction};
use fracstab_core::{Grid64, Order64, Signal64};
use serde_json::{json, Value};

use crate::config::{teiv_anchor, ExperimentConfig, ModelParams};
use crate::csv::write_run;
use crate::error::{CliError, CliResult};
use crate::report::classify;
use crate::run::{run_all, solve_order};
use crate::svg::{panels_from_runs, render};

pub fn r0(cfg: &ExperimentConfig) -> CliResult<Value> {
    Ok(match cfg.params {
        ModelParams::Sica(p) => {
            let endemic = if p.threshold() > 1.0 {
                Some(p.endemic()?.to_vec())
            } else {
                None
            };
            json!({
                "model": "sica",
                "incidence": p.incidence,
                "r0": p.r0(),
                "threshold": p.threshold(),
                "s0": p.s0(),
                "disease_free": p.disease_free(),
                "spectral_abscissa": p.disease_free_abscissa()?,
                "endemic": endemic,
            })
        }
        ModelParams::Teiv(p) => {
            let chronic = if p.r0() > 1.0 {
                Some(p.chronic()?.to_vec())
            } else {
                None
            };
            json!({
                "model": "teiv",
                "r0": p.r0(),
                "infection_free": p.infection_free(),
                "spectral_abscissa": p.infection_free_abscissa()?,
                "chronic": chronic,
            })
        }
    })
}

fn csv_name(stem: &str, theta: f64) -> String {
    format!("{stem}_theta{theta}.csv")
}

/// Solves every order, then writes one CSV per order and one SVG. Nothing
/// is written if any solve fails; files already written are removed if a
/// later write fails.
pub fn simulate(cfg: &ExperimentConfig, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let runs = run_all(cfg, &cfg.functionals)?;
    fs::create_dir_all(out_dir).map_err(CliError::io(format!("creating {}", out_dir.display())))?;
    let model = cfg.params.kind();
    let default_stem = match model {
        crate::config::ModelKind::Sica => "sica",
        crate::config::ModelKind::Teiv => "teiv",
    };
    let stem = cfg.outputs.csv.clone().unwrap_or_else(|| default_stem.to_string());
    let svg_name = cfg.outputs.svg.clone().unwrap_or_else(|| format!("{stem}.svg"));
    let labels = cfg.state_labels();

    let mut written = Vec::new();
    let result = (|| {
        for run in &runs {
            let path = out_dir.join(csv_name(&stem, run.theta));
            let file = fs::File::create(&path).map_err(CliError::io(format!("creating {}", path.display())))?;
            written.push(path.clone());
            write_run(BufWriter::new(file), labels, run, cfg.outputs.max_rows)
                .map_err(CliError::io(format!("writing {}", path.display())))?;
        }
        let path = out_dir.join(&svg_name);
        let svg = render(
            &panels_from_runs(labels, &runs, cfg.outputs.log_time),
            cfg.outputs.log_time,
        );
        written.push(path.clone());
        fs::write(&path, svg).map_err(CliError::io(format!("writing {}", path.display())))
    })();
    if let Err(e) = result {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        return Err(e);
    }
    Ok(written)
}

#[derive(Debug, Clone)]
pub enum SignalSource {
    /// A state coordinate of the trajectory at the chosen order.
    Coordinate(String),
    /// A constant signal on the chosen order's grid.
    Constant(f64),
    /// Whitespace-separated samples on a uniform grid over `[0, t_end]`.
    Samples(PathBuf),
}

#[derive(Debug, Clone, Copy)]
pub enum Xbar {
    Value(f64),
    /// The coordinate of the equilibrium the stability report targets.
    Equilibrium,
}

impl std::str::FromStr for Xbar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "equilibrium" => Ok(Xbar::Equilibrium),
            _ => s
                .parse()
                .map(Xbar::Value)
                .map_err(|_| format!("expected a number or 'equilibrium', got '{s}'")),
        }
    }
}

pub fn verify_lemma(
    cfg: &ExperimentConfig,
    source: &SignalSource,
    g_label: &str,
    xbar: Xbar,
    theta: Option<f64>,
) -> CliResult<Certificate> {
    let g = GFunction::<f64>::from_label(g_label).map_err(|e| CliError::Config(e.to_string()))?;
    let (index, order) = match theta {
        None => (Some(0), cfg.order(0)),
        Some(t) => (
            cfg.find_order(t),
            Order64::new(t).map_err(|e| CliError::Config(e.to_string()))?,
        ),
    };
    let grid = match index {
        Some(i) => cfg.grid(i),
        None => Grid64::spanning(0.0, cfg.t_end, cfg.steps)?,
    };
    let coordinate = match source {
        SignalSource::Coordinate(label) => Some(
            cfg.state_labels()
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| CliError::Config(format!("unknown coordinate '{label}'")))?,
        ),
        _ => None,
    };
    let xbar = match xbar {
        Xbar::Value(v) => v,
        Xbar::Equilibrium => {
            let c = coordinate.ok_or_else(|| CliError::Config("xbar 'equilibrium' needs --coordinate".into()))?;
            equilibrium(cfg)?[c]
        }
    };
    let signal = match source {
        SignalSource::Coordinate(_) => {
            let traj = match index {
                Some(i) => solve_order(cfg, i)?,
                None => fracstab_core::solve_fde_abm(&cfg.params, order, &cfg.initial_state, grid)
                    .map_err(CliError::at_order(order.alpha()))?,
            };
            traj.component(coordinate.expect("coordinate source"))
        }
        SignalSource::Constant(v) => Signal64::new(grid, vec![*v; grid.node_count()])?,
        SignalSource::Samples(path) => {
            let text = fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
            let values = text
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|e| CliError::Config(format!("{}: '{t}': {e}", path.display())))
                })
                .collect::<CliResult<Vec<_>>>()?;
            if values.len() < 2 {
                return Err(CliError::Config(format!(
                    "{}: need at least two samples",
                    path.display()
                )));
            }
            let g = Grid64::spanning(0.0, grid.t_end(), values.len() - 1)?;
            Signal64::new(g, values)?
        }
    };
    Ok(lemma_certificate(&signal, &g, xbar, order)?)
}

/// The equilibrium the stability report compares against.
pub fn equilibrium(cfg: &ExperimentConfig) -> CliResult<Vec<f64>> {
    match cfg.params {
        ModelParams::Teiv(p) => Ok(teiv_anchor(&p)?.to_vec()),
        ModelParams::Sica(_) => Ok(classify(cfg)?.equilibrium),
    }
}
