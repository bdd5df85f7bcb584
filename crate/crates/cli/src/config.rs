//! Experiment configuration: a JSON document naming a model, its parameters,
//! the fractional orders to run and what to emit.

use std::path::Path;

use fracstab_core::lyapunov::LyapunovFunctional;
use fracstab_core::models::sica::STATE_LABELS as SICA_LABELS;
use fracstab_core::models::teiv::STATE_LABELS as TEIV_LABELS;
use fracstab_core::{Grid64, ModelDefinition, Order64, Result as CoreResult, SicaParams, TeivParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Sica,
    Teiv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    Sica(SicaParams),
    Teiv(TeivParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Sica(_) => ModelKind::Sica,
            ModelParams::Teiv(_) => ModelKind::Teiv,
        }
    }

    fn to_value(self) -> Value {
        match self {
            ModelParams::Sica(p) => serde_json::to_value(p),
            ModelParams::Teiv(p) => serde_json::to_value(p),
        }
        .expect("parameter records serialize")
    }
}

impl ModelDefinition<f64> for ModelParams {
    fn name(&self) -> &str {
        match self {
            ModelParams::Sica(p) => p.name(),
            ModelParams::Teiv(p) => p.name(),
        }
    }

    fn state_labels(&self) -> Vec<String> {
        match self {
            ModelParams::Sica(p) => p.state_labels(),
            ModelParams::Teiv(p) => p.state_labels(),
        }
    }

    fn dimension(&self) -> usize {
        4
    }

    fn rhs(&self, state: &[f64], out: &mut [f64]) -> CoreResult<()> {
        match self {
            ModelParams::Sica(p) => ModelDefinition::rhs(p, state, out),
            ModelParams::Teiv(p) => ModelDefinition::rhs(p, state, out),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    V0,
    V1,
    TeivAtAnchor,
}

impl FunctionalKind {
    pub fn label(self) -> &'static str {
        match self {
            FunctionalKind::V0 => "V0",
            FunctionalKind::V1 => "V1",
            FunctionalKind::TeivAtAnchor => "L",
        }
    }
}

/// One fractional order, optionally with its own horizon. Written either as
/// a bare number or as `{"theta": .., "t_end": .., "steps": ..}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderSpec {
    pub theta: f64,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderDoc {
    theta: f64,
    #[serde(default)]
    t_end: Option<f64>,
    #[serde(default)]
    steps: Option<usize>,
}

impl OrderSpec {
    fn to_value(self) -> Value {
        if self.t_end.is_none() && self.steps.is_none() {
            return Value::from(self.theta);
        }
        let mut m = serde_json::Map::new();
        m.insert("theta".into(), Value::from(self.theta));
        if let Some(t) = self.t_end {
            m.insert("t_end".into(), Value::from(t));
        }
        if let Some(s) = self.steps {
            m.insert("steps".into(), Value::from(s));
        }
        Value::Object(m)
    }

    fn from_value(v: Value, i: usize) -> CliResult<Self> {
        match v {
            Value::Number(n) => Ok(OrderSpec {
                theta: n.as_f64().unwrap_or(f64::NAN),
                t_end: None,
                steps: None,
            }),
            obj @ Value::Object(_) => {
                let d: OrderDoc =
                    serde_json::from_value(obj).map_err(|e| CliError::Config(format!("orders[{i}]: {e}")))?;
                Ok(OrderSpec {
                    theta: d.theta,
                    t_end: d.t_end,
                    steps: d.steps,
                })
            }
            other => Err(CliError::Config(format!(
                "orders[{i}]: expected a number or an object, got {other}"
            ))),
        }
    }
}

/// Output file names, relative to the directory given on the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Stem of the per-order CSV files: `<stem>_theta<θ>.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    /// Thin CSV files to at most this many rows (endpoints kept). Absent
    /// means every node is written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rows: Option<usize>,
    /// Logarithmic time axis in the SVG.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub log_time: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    model: ModelKind,
    params: Value,
    orders: Vec<Value>,
    initial_state: Vec<f64>,
    t_end: f64,
    steps: usize,
    #[serde(default)]
    functionals: Vec<FunctionalKind>,
    #[serde(default)]
    outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub orders: Vec<OrderSpec>,
    pub initial_state: Vec<f64>,
    pub t_end: f64,
    pub steps: usize,
    pub functionals: Vec<FunctionalKind>,
    pub outputs: Outputs,
}

pub const MIN_STEPS: usize = 10;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let doc: ConfigDoc = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let params = match doc.model {
            ModelKind::Sica => serde_json::from_value(doc.params).map(ModelParams::Sica),
            ModelKind::Teiv => serde_json::from_value(doc.params).map(ModelParams::Teiv),
        }
        .map_err(|e| CliError::Config(format!("params: {e}")))?;
        let orders = doc
            .orders
            .into_iter()
            .enumerate()
            .map(|(i, v)| OrderSpec::from_value(v, i))
            .collect::<CliResult<Vec<_>>>()?;
        let cfg = ExperimentConfig {
            params,
            orders,
            initial_state: doc.initial_state,
            t_end: doc.t_end,
            steps: doc.steps,
            functionals: doc.functionals,
            outputs: doc.outputs,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> CliResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let doc = ConfigDoc {
            model: self.params.kind(),
            params: self.params.to_value(),
            orders: self.orders.iter().map(|o| o.to_value()).collect(),
            initial_state: self.initial_state.clone(),
            t_end: self.t_end,
            steps: self.steps,
            functionals: self.functionals.clone(),
            outputs: self.outputs.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        match self.params {
            ModelParams::Sica(p) => p.validate(),
            ModelParams::Teiv(p) => p.validate(),
        }
        .map_err(|e| CliError::Config(format!("params: {e}")))?;
        if self.orders.is_empty() {
            return bad("orders must not be empty".into());
        }
        check_horizon("", self.t_end, self.steps)?;
        for (i, o) in self.orders.iter().enumerate() {
            Order64::new(o.theta).map_err(|e| CliError::Config(format!("orders[{i}]: {e}")))?;
            check_horizon(
                &format!("orders[{i}]."),
                o.t_end.unwrap_or(self.t_end),
                o.steps.unwrap_or(self.steps),
            )?;
        }
        if self.initial_state.len() != 4 {
            return bad(format!(
                "initial_state must have 4 entries, got {}",
                self.initial_state.len()
            ));
        }
        if let Some(v) = self.initial_state.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return bad(format!(
                "initial_state entries must be finite and non-negative, got {v}"
            ));
        }
        for f in &self.functionals {
            let ok = matches!(
                (f, self.params),
                (FunctionalKind::V0 | FunctionalKind::V1, ModelParams::Sica(_))
                    | (FunctionalKind::TeivAtAnchor, ModelParams::Teiv(_))
            );
            if !ok {
                return bad(format!(
                    "functional {f:?} does not apply to model {:?}",
                    self.params.kind()
                ));
            }
        }
        if self.outputs.max_rows.is_some_and(|r| r < 2) {
            return bad("outputs.max_rows must be at least 2".into());
        }
        Ok(())
    }

    pub fn state_labels(&self) -> &'static [&'static str; 4] {
        match self.params {
            ModelParams::Sica(_) => &SICA_LABELS,
            ModelParams::Teiv(_) => &TEIV_LABELS,
        }
    }

    pub fn order(&self, i: usize) -> Order64 {
        Order64::new(self.orders[i].theta).expect("validated")
    }

    pub fn grid(&self, i: usize) -> Grid64 {
        let o = &self.orders[i];
        Grid64::spanning(0.0, o.t_end.unwrap_or(self.t_end), o.steps.unwrap_or(self.steps)).expect("validated")
    }

    /// Index of the order equal to `theta`.
    pub fn find_order(&self, theta: f64) -> Option<usize> {
        self.orders.iter().position(|o| (o.theta - theta).abs() < 1e-12)
    }

    pub fn functional(&self, kind: FunctionalKind) -> CliResult<LyapunovFunctional<f64>> {
        Ok(match (kind, self.params) {
            (FunctionalKind::V0, ModelParams::Sica(p)) => p.v0()?,
            (FunctionalKind::V1, ModelParams::Sica(p)) => p.v1()?,
            (FunctionalKind::TeivAtAnchor, ModelParams::Teiv(p)) => p.lyapunov(&teiv_anchor(&p)?)?,
            _ => {
                return Err(CliError::Config(format!(
                    "functional {kind:?} does not apply to this model"
                )))
            }
        })
    }
}

/// Chronic equilibrium when `R₀ > 1`, otherwise the infection-free point.
pub fn teiv_anchor(p: &TeivParams) -> CliResult<[f64; 4]> {
    Ok(*p.equilibria()?.last().expect("infection-free point always present"))
}

fn check_horizon(prefix: &str, t_end: f64, steps: usize) -> CliResult<()> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(CliError::Config(format!(
            "{prefix}t_end must be positive and finite, got {t_end}"
        )));
    }
    if steps < MIN_STEPS {
        return Err(CliError::Config(format!(
            "{prefix}steps must be at least {MIN_STEPS}, got {steps}"
        )));
    }
    Ok(())
}
