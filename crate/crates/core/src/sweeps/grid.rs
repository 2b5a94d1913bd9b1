use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::template::{ParamPath, ScenarioTemplate};
use crate::dynamics::{evolve, initial_cm, steady_state, CovarianceMatrix, IntegratorSettings};
use crate::entanglement::{log_negativity, Bipartition};
use crate::error::{Error, Result};
use crate::fingerprint::fingerprint;
use crate::model::{build_diffusion, build_drift, stability};
use crate::table::{format_float, write_csv};

/// When the covariance is sampled. Times are in the template's internal
/// time unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    Trajectory(Vec<f64>),
    FixedTime(f64),
    Steady,
}

impl Evaluation {
    /// `0, step, 2·step, …, t_max` (the last point clamped to `t_max`).
    pub fn time_grid(t_max: f64, step: f64) -> Result<Self> {
        if !(t_max >= 0.0 && step > 0.0) {
            return Err(Error::TimeGrid(format!(
                "bad grid t_max = {t_max}, step = {step}"
            )));
        }
        let n = (t_max / step - 1e-9).ceil().max(0.0) as usize;
        let mut times: Vec<f64> = (0..=n).map(|k| (k as f64 * step).min(t_max)).collect();
        times.dedup();
        Ok(Evaluation::Trajectory(times))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub path: ParamPath,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(path: ParamPath, values: Vec<f64>) -> Self {
        Self { path, values }
    }

    /// `n` evenly spaced values from `lo` to `hi` inclusive.
    pub fn linspace(path: ParamPath, lo: f64, hi: f64, n: usize) -> Self {
        let values = match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..n)
                .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
                .collect(),
        };
        Self { path, values }
    }

    /// `lo, lo + step, …` up to `hi` (inclusive within round-off).
    pub fn stepped(path: ParamPath, lo: f64, hi: f64, step: f64) -> Self {
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Self::linspace(path, lo, lo + step * (n - 1) as f64, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SweepSettings {
    pub integrator: IntegratorSettings,
    /// Worker threads; `0` uses the global pool.
    pub workers: usize,
    /// Replace the evaluation mode with the algebraic steady state.
    pub steady: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_values: Vec<f64>,
    /// Evaluation time; `None` for the steady state.
    pub time: Option<f64>,
    pub partition: String,
    pub ln: Option<f64>,
    pub stable: bool,
    pub physical: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub preset: Option<String>,
    pub template: ScenarioTemplate,
    pub axes: Vec<Axis>,
    pub partitions: Vec<String>,
    pub evaluation: Evaluation,
    pub integrator: IntegratorSettings,
    pub time_unit_us: f64,
    pub fingerprint: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metadata: SweepMetadata,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn axis_names(&self) -> Vec<String> {
        self.metadata
            .axes
            .iter()
            .map(|a| a.path.to_string())
            .collect()
    }

    /// Header: axis columns, `t`, `partition`, `ln`, `stable`, `physical`,
    /// `error`. Missing values are empty fields.
    pub fn to_csv(&self) -> Result<String> {
        let mut header = self.axis_names();
        header.extend(["t", "partition", "ln", "stable", "physical", "error"].map(String::from));
        let rows = self.rows.iter().map(|r| {
            let mut f: Vec<String> = r.axis_values.iter().map(|&x| format_float(x)).collect();
            f.push(r.time.map(format_float).unwrap_or_default());
            f.push(r.partition.clone());
            f.push(r.ln.map(format_float).unwrap_or_default());
            f.push(r.stable.to_string());
            f.push(r.physical.to_string());
            f.push(r.error.clone().unwrap_or_default());
            f
        });
        write_csv(&header, rows)
    }

    /// Rows for one partition, in sweep order.
    pub fn select<'a>(&'a self, partition: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.partition == partition)
    }
}

/// Cartesian product of the axis values, first axis outermost.
pub fn grid_points(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

/// Evaluate every grid point. Per-point failures are recorded in the rows;
/// only malformed sweeps are errors.
pub fn grid_sweep(
    template: &ScenarioTemplate,
    axes: &[Axis],
    partitions: &[String],
    evaluation: &Evaluation,
    settings: &SweepSettings,
) -> Result<SweepResult> {
    run(None, template, axes, partitions, evaluation, settings)
}

pub(crate) fn run(
    preset: Option<&str>,
    template: &ScenarioTemplate,
    axes: &[Axis],
    partitions: &[String],
    evaluation: &Evaluation,
    settings: &SweepSettings,
) -> Result<SweepResult> {
    settings.integrator.validate()?;
    if let Some(a) = axes.iter().find(|a| a.values.is_empty()) {
        return Err(Error::invalid(format!("axis {}", a.path), "no values"));
    }
    if partitions.is_empty() {
        return Err(Error::invalid(
            "partitions",
            "at least one partition is required",
        ));
    }
    // labels are checked against the largest chain; smaller points record
    // their own errors
    let max_nodes = axes
        .iter()
        .filter(|a| a.path == ParamPath::NNodes)
        .flat_map(|a| a.values.iter().map(|&v| v.max(0.0) as usize))
        .fold(template.n_nodes, usize::max);
    for spec in partitions {
        Bipartition::parse_for(spec, max_nodes)?;
    }
    let evaluation = if settings.steady {
        Evaluation::Steady
    } else {
        evaluation.clone()
    };
    match &evaluation {
        Evaluation::Trajectory(times) if times.is_empty() => {
            return Err(Error::TimeGrid("no output times requested".into()))
        }
        Evaluation::FixedTime(t) if !(*t >= 0.0) => {
            return Err(Error::TimeGrid(format!("evaluation time {t} is negative")))
        }
        _ => {}
    }

    let points = grid_points(axes);
    let eval_point = |values: &Vec<f64>| {
        evaluate_point(
            template,
            axes,
            values,
            partitions,
            &evaluation,
            &settings.integrator,
        )
    };
    let per_point: Vec<Vec<SweepRow>> = if settings.workers == 0 {
        points.par_iter().map(eval_point).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(settings.workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?;
        pool.install(|| points.par_iter().map(eval_point).collect())
    };

    let metadata = SweepMetadata {
        preset: preset.map(String::from),
        template: template.clone(),
        axes: axes.to_vec(),
        partitions: partitions.to_vec(),
        evaluation,
        integrator: settings.integrator,
        time_unit_us: template.units.time_unit_us(),
        fingerprint: String::new(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let fp = fingerprint(&(
        &metadata.template,
        &metadata.axes,
        &metadata.partitions,
        &metadata.evaluation,
        &metadata.integrator,
    ));
    Ok(SweepResult {
        metadata: SweepMetadata {
            fingerprint: fp,
            ..metadata
        },
        rows: per_point.into_iter().flatten().collect(),
    })
}

fn failed_rows(
    values: &[f64],
    times: &[Option<f64>],
    partitions: &[String],
    stable: bool,
    e: &Error,
) -> Vec<SweepRow> {
    times
        .iter()
        .flat_map(|&time| {
            partitions.iter().map(move |p| SweepRow {
                axis_values: values.to_vec(),
                time,
                partition: p.clone(),
                ln: None,
                stable,
                physical: false,
                error: Some(e.to_string()),
            })
        })
        .collect()
}

fn evaluate_point(
    template: &ScenarioTemplate,
    axes: &[Axis],
    values: &[f64],
    partitions: &[String],
    evaluation: &Evaluation,
    integrator: &IntegratorSettings,
) -> Vec<SweepRow> {
    let times: Vec<Option<f64>> = match evaluation {
        Evaluation::Trajectory(ts) => ts.iter().copied().map(Some).collect(),
        Evaluation::FixedTime(t) => vec![Some(*t)],
        Evaluation::Steady => vec![None],
    };
    let mut t = template.clone();
    let scenario = axes
        .iter()
        .zip(values)
        .try_for_each(|(axis, &v)| axis.path.apply(&mut t, v))
        .and_then(|_| t.build());
    let scenario = match scenario {
        Ok(s) => s,
        Err(e) => return failed_rows(values, &times, partitions, false, &e),
    };
    let (a, d) = (build_drift(&scenario), build_diffusion(&scenario));
    let stable = match stability(&a) {
        Ok(r) => r.stable,
        Err(e) => return failed_rows(values, &times, partitions, false, &e),
    };
    let snapshots: Vec<CovarianceMatrix> = match evaluation {
        Evaluation::Steady => match steady_state(&a, &d) {
            Ok(ss) => vec![ss.covariance],
            Err(e) => return failed_rows(values, &times, partitions, stable, &e),
        },
        _ => {
            let ts: Vec<f64> = times.iter().flatten().copied().collect();
            match evolve(&a, &d, &initial_cm(&scenario), &ts, integrator) {
                Ok(traj) => traj.into_snapshots(),
                Err(e) => return failed_rows(values, &times, partitions, stable, &e),
            }
        }
    };
    let n = scenario.n_nodes();
    let mut rows = Vec::with_capacity(snapshots.len() * partitions.len());
    for (v, &time) in snapshots.iter().zip(&times) {
        let physical = v.is_physical().unwrap_or(false);
        for spec in partitions {
            let ln = Bipartition::parse_for(spec, n).and_then(|p| log_negativity(v, &p));
            let (ln, error) = match ln {
                Ok(r) => (Some(r.value), None),
                Err(e) => (None, Some(e.to_string())),
            };
            rows.push(SweepRow {
                axis_values: values.to_vec(),
                time,
                partition: spec.clone(),
                ln,
                stable,
                physical,
                error,
            });
        }
    }
    rows
}
