//! TOML documents describing a user-defined grid.
//!
//! ```toml
//! name = "g-phi"
//! layout = "two_node"              # one_phonon_many_magnons, one_magnon_many_phonons, four_mode
//! n_nodes = 2
//! rate_units = "cyclic"            # default
//! partitions = ["m2|b1"]
//!
//! [set]                            # fixed template values, by parameter path
//! kappa = 3.5
//!
//! [evaluation]
//! tau = 3.0                        # or t_max + step, or steady = true
//!
//! [[axes]]
//! path = "g"
//! from = 0.5
//! to = 3.0
//! count = 6                        # or step = 0.5, or values = [...]
//!
//! [[axes]]
//! path = "phi"
//! values = ["pi/2", "3pi/4", "pi"]
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;

use super::catalog::Preset;
use super::grid::{Axis, Evaluation};
use super::template::{Layout, ParamPath, ScenarioTemplate};
use crate::error::{Error, Result};
use crate::model::{Phase, RateUnits};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDocument {
    name: Option<String>,
    layout: Layout,
    n_nodes: Option<usize>,
    rate_units: Option<RateUnits>,
    partitions: Vec<String>,
    #[serde(default)]
    set: BTreeMap<String, Phase>,
    evaluation: EvaluationSection,
    #[serde(default)]
    axes: Vec<AxisSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluationSection {
    tau: Option<f64>,
    t_max: Option<f64>,
    step: Option<f64>,
    #[serde(default)]
    steady: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisSection {
    path: String,
    values: Option<Vec<Phase>>,
    from: Option<Phase>,
    to: Option<Phase>,
    count: Option<usize>,
    step: Option<f64>,
}

impl AxisSection {
    fn axis(&self) -> Result<Axis> {
        let path: ParamPath = self.path.parse()?;
        let field = format!("axes.{}", self.path);
        let axis = match (&self.values, &self.from, &self.to, self.count, self.step) {
            (Some(v), None, None, None, None) => {
                Axis::new(path, v.iter().map(Phase::radians).collect::<Result<_>>()?)
            }
            (None, Some(lo), Some(hi), Some(n), None) => {
                Axis::linspace(path, lo.radians()?, hi.radians()?, n)
            }
            (None, Some(lo), Some(hi), None, Some(step)) if step > 0.0 => {
                Axis::stepped(path, lo.radians()?, hi.radians()?, step)
            }
            _ => {
                return Err(Error::invalid(
                    field,
                    "give `values`, or `from`/`to` with `count` or a positive `step`",
                ))
            }
        };
        if axis.values.is_empty() {
            return Err(Error::invalid(field, "no values"));
        }
        Ok(axis)
    }
}

impl EvaluationSection {
    fn evaluation(&self) -> Result<Evaluation> {
        match (self.tau, self.t_max, self.step, self.steady) {
            (Some(t), None, None, false) => Ok(Evaluation::FixedTime(t)),
            (None, Some(t), Some(s), false) => Evaluation::time_grid(t, s),
            (None, None, None, true) => Ok(Evaluation::Steady),
            _ => Err(Error::invalid(
                "evaluation",
                "give exactly one of `tau`, `t_max` with `step`, or `steady = true`",
            )),
        }
    }
}

/// Parse a grid document into a preset named after its `name` key
/// (`"grid"` when absent).
pub fn parse_grid_spec(text: &str) -> Result<Preset> {
    let doc: GridDocument = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = doc.n_nodes.unwrap_or(match doc.layout {
        Layout::FourMode => 4,
        _ => 2,
    });
    let mut template = ScenarioTemplate::new(doc.layout, n);
    if let Some(u) = doc.rate_units {
        template.units = u;
    }
    for (key, value) in &doc.set {
        key.parse::<ParamPath>()?
            .apply(&mut template, value.radians()?)?;
    }
    let axes = doc
        .axes
        .iter()
        .map(AxisSection::axis)
        .collect::<Result<Vec<_>>>()?;
    if doc.partitions.is_empty() {
        return Err(Error::MissingKey("partitions".into()));
    }
    Ok(Preset {
        name: doc.name.unwrap_or_else(|| "grid".into()),
        description: "user-defined grid".into(),
        template,
        axes,
        partitions: doc.partitions,
        evaluation: doc.evaluation.evaluation()?,
    })
}
