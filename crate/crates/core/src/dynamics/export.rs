use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::modes::ModeLabel;
use crate::table::{format_float, write_csv};

/// JSON form of a trajectory: matrices flattened row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryJson {
    pub fingerprint: String,
    pub modes: Vec<ModeLabel>,
    pub dim: usize,
    pub times: Vec<f64>,
    pub matrices: Vec<Vec<f64>>,
}

impl From<&Trajectory> for TrajectoryJson {
    fn from(t: &Trajectory) -> Self {
        let first = &t.snapshots()[0];
        Self {
            fingerprint: t.fingerprint().to_string(),
            modes: first.modes().to_vec(),
            dim: first.dim(),
            times: t.times().to_vec(),
            matrices: t
                .snapshots()
                .iter()
                .map(|v| v.data().transpose().as_slice().to_vec())
                .collect(),
        }
    }
}

/// CSV with a `t` column and one column per requested `(row, col)` entry,
/// headed `V[row,col]` with 0-based indices.
pub fn trajectory_csv(t: &Trajectory, entries: &[(usize, usize)]) -> Result<String> {
    let dim = t.snapshots()[0].dim();
    if let Some(&(i, j)) = entries.iter().find(|&&(i, j)| i >= dim || j >= dim) {
        return Err(Error::Shape(format!(
            "entry ({i},{j}) outside a {dim}x{dim} matrix"
        )));
    }
    let mut header = vec!["t".to_string()];
    header.extend(entries.iter().map(|(i, j)| format!("V[{i},{j}]")));
    let rows = t.snapshots().iter().map(|v| {
        let mut row = vec![format_float(v.time())];
        row.extend(entries.iter().map(|&(i, j)| format_float(v.data()[(i, j)])));
        row
    });
    write_csv(&header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, initial_cm, IntegratorSettings};
    use crate::model::{build_diffusion, build_drift, RateUnits, ScenarioParams};

    fn short() -> Trajectory {
        let mut p = ScenarioParams::uniform(RateUnits::Cyclic, 1);
        p.gamma = vec![1.0];
        p.n_bar_m = 1.0;
        let s = p.build().unwrap();
        evolve(
            &build_drift(&s),
            &build_diffusion(&s),
            &initial_cm(&s),
            &[0.0, 0.5],
            &IntegratorSettings::with_dt(0.01).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn json_layout() {
        let t = short();
        let j = TrajectoryJson::from(&t);
        assert_eq!(j.dim, 4);
        assert_eq!(j.matrices.len(), 2);
        assert_eq!(j.matrices[1].len(), 16);
        assert_eq!(j.matrices[1][0], t.snapshots()[1].data()[(0, 0)]);
        let text = serde_json::to_string(&j).unwrap();
        let back: TrajectoryJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
    }

    #[test]
    fn csv_columns() {
        let t = short();
        let csv = trajectory_csv(&t, &[(0, 0), (2, 3)]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,\"V[0,0]\",\"V[2,3]\"");
        assert_eq!(lines.len(), 3);
        let v00: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v00, t.snapshots()[1].data()[(0, 0)]);
        assert!(trajectory_csv(&t, &[(4, 0)]).is_err());
    }
}
