use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::{run, Axis, Evaluation, SweepResult, SweepSettings};
use super::template::{Layout, ParamPath, ScenarioTemplate};
use crate::error::{Error, Result};

/// Side length of the two-parameter maps unless overridden.
pub const DEFAULT_MAP_RESOLUTION: usize = 41;

/// Time step of the sampled curves and their end time.
const CURVE_STEP: f64 = 0.05;
const CURVE_END: f64 = 4.0;

/// A named grid: template, swept axes, partitions and when to evaluate.
///
/// Partitions are kept as text so open ranges (`b1|m2..`) resolve against
/// each grid point's node count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub template: ScenarioTemplate,
    pub axes: Vec<Axis>,
    pub partitions: Vec<String>,
    pub evaluation: Evaluation,
}

impl Preset {
    pub fn run(&self, settings: &SweepSettings) -> Result<SweepResult> {
        run(
            Some(&self.name),
            &self.template,
            &self.axes,
            &self.partitions,
            &self.evaluation,
            settings,
        )
    }

    /// Number of grid points (rows per partition and output time).
    pub fn points(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }
}

fn preset(
    name: &str,
    description: &str,
    template: ScenarioTemplate,
    axes: Vec<Axis>,
    partitions: &[&str],
    evaluation: Evaluation,
) -> Preset {
    Preset {
        name: name.into(),
        description: description.into(),
        template,
        axes,
        partitions: partitions.iter().map(|s| s.to_string()).collect(),
        evaluation,
    }
}

fn curve() -> Evaluation {
    Evaluation::time_grid(CURVE_END, CURVE_STEP).expect("static time grid")
}

fn phases(values: &[f64]) -> Axis {
    Axis::new(ParamPath::Phi, values.to_vec())
}

fn node_counts() -> Axis {
    Axis::new(ParamPath::NNodes, (2..=12).map(f64::from).collect())
}

/// Every preset, with the two-parameter maps at [`DEFAULT_MAP_RESOLUTION`].
pub fn preset_catalog() -> Vec<Preset> {
    preset_catalog_with_resolution(DEFAULT_MAP_RESOLUTION)
}

/// Every preset, with `resolution × resolution` two-parameter maps.
pub fn preset_catalog_with_resolution(resolution: usize) -> Vec<Preset> {
    let two = ScenarioTemplate::new(Layout::TwoNode, 2);
    let one_phonon = |n| ScenarioTemplate::new(Layout::OnePhononManyMagnons, n);
    let one_magnon = |n| ScenarioTemplate::new(Layout::OneMagnonManyPhonons, n);
    let four = ScenarioTemplate::new(Layout::FourMode, 4);
    let three_phases = || phases(&[PI / 2.0, 3.0 * PI / 4.0, PI]);
    let tau3 = Evaluation::FixedTime(3.0);
    let tau4 = Evaluation::FixedTime(4.0);
    let four_mode = [
        "b1|m2,m3,b4",
        "m2|b1,m3,b4",
        "b1,m2|m3,b4",
        "b1,b4|m2,m3",
        "b4|b1,m2,m3",
        "m3|b1,m2,b4",
        "b1,m3|m2,b4",
    ];
    let four_mode_sub = [
        "b1|m2,b4", "m2|b1,b4", "b1|m2,m3", "m2|b1,m3", "b1|m2", "b1|b4", "m2|m3",
    ];
    let mut five_a = vec!["b1|m2,m3,m4", "b1|m2,m3", "b1|m2", "b1|m3", "b1|m4"];
    five_a.extend(["m2|m3", "m2|m4", "m3|m4"]);
    let six = ["m1|b2..", "b2|m1,b3..", "m1|b2,b3", "m1|b2"];

    vec![
        preset(
            "fig2a",
            "E(m2|b1) against time for g in {1, 2} MHz and phi in {pi/2, pi}",
            two.clone(),
            vec![
                Axis::new(ParamPath::G, vec![1.0, 2.0]),
                phases(&[PI / 2.0, PI]),
            ],
            &["m2|b1"],
            curve(),
        ),
        preset(
            "fig2b",
            "E(m2|b1) at tau = 3 against g in [0.1, 3] MHz for three phases",
            two.clone(),
            vec![Axis::stepped(ParamPath::G, 0.1, 3.0, 0.1), three_phases()],
            &["m2|b1"],
            tau3.clone(),
        ),
        preset(
            "fig2c",
            "E(m2|b1) at tau = 3 against temperature in [10, 200] mK for three phases",
            two.clone(),
            vec![
                Axis::stepped(ParamPath::TemperatureMk, 10.0, 200.0, 5.0),
                three_phases(),
            ],
            &["m2|b1"],
            tau3.clone(),
        ),
        preset(
            "fig2d",
            "E(m2|b1) at tau = 3 over g in [0.5, 3] MHz and kappa in [1, 4] MHz",
            two.clone(),
            vec![
                Axis::linspace(ParamPath::G, 0.5, 3.0, resolution),
                Axis::linspace(ParamPath::Kappa, 1.0, 4.0, resolution),
            ],
            &["m2|b1"],
            tau3.clone(),
        ),
        preset(
            "fig2e",
            "E(m2|b1) at tau = 3 over detunings delta1, delta2 in [-2 omega_b, 0]",
            two,
            vec![
                Axis::linspace(ParamPath::DeltaNode(0), -20.0, 0.0, resolution),
                Axis::linspace(ParamPath::DeltaNode(1), -20.0, 0.0, resolution),
            ],
            &["m2|b1"],
            tau3.clone(),
        ),
        preset(
            "fig3c",
            "one phonon, N = 4 magnons: E(b1|M) and E(b1|m2) against time",
            one_phonon(4),
            vec![phases(&[PI / 2.0, PI])],
            &["b1|m2..", "b1|m2"],
            curve(),
        ),
        preset(
            "fig3d",
            "one magnon, N = 4 phonons: E(m1|B) and E(m1|b2) against time",
            one_magnon(4),
            vec![phases(&[PI / 2.0, PI])],
            &["m1|b2..", "m1|b2"],
            curve(),
        ),
        preset(
            "fig3e",
            "E(b1|M) at tau = 4 against N in 2..12",
            one_phonon(4),
            vec![
                node_counts(),
                Axis::new(ParamPath::G, vec![2.0, 3.0]),
                phases(&[PI / 2.0, PI]),
            ],
            &["b1|m2.."],
            tau4.clone(),
        ),
        preset(
            "fig3f",
            "E(m1|B) at tau = 4 against N in 2..12",
            one_magnon(4),
            vec![
                node_counts(),
                Axis::new(ParamPath::G, vec![2.0, 3.0]),
                phases(&[PI / 2.0, PI]),
            ],
            &["m1|b2.."],
            tau4.clone(),
        ),
        preset(
            "fig4a",
            "four-mode chain: single-mode and two-mode bipartitions against time",
            four.clone(),
            vec![],
            &four_mode,
            curve(),
        ),
        preset(
            "fig4b",
            "four-mode chain: three-mode subsystems and pairs against time",
            four.clone(),
            vec![],
            &four_mode_sub,
            curve(),
        ),
        preset(
            "fig4c",
            "four-mode chain at tau = 3 against g in [0.5, 3.5] MHz",
            four.clone(),
            vec![Axis::stepped(ParamPath::G, 0.5, 3.5, 0.1)],
            &four_mode[..4],
            tau3.clone(),
        ),
        preset(
            "fig4d",
            "four-mode subsystems at tau = 3 against g in [0.5, 3.5] MHz",
            four,
            vec![Axis::stepped(ParamPath::G, 0.5, 3.5, 0.1)],
            &four_mode_sub,
            tau3,
        ),
        preset(
            "fig5a",
            "one phonon, N = 4 magnons, phi = pi: bipartitions against time",
            one_phonon(4),
            vec![],
            &five_a,
            curve(),
        ),
        preset(
            "fig5b",
            "one phonon, N = 5 magnons, phi = pi: bipartitions against time",
            one_phonon(5),
            vec![],
            &["b1|m2..", "b1|m2,m3,m4", "b1|m2,m3", "b1|m2", "b1|m5"],
            curve(),
        ),
        preset(
            "fig5c",
            "one phonon, phi = pi: E(b1|M) and E(b1|m2) at tau = 4 against N in 2..12",
            one_phonon(4),
            vec![node_counts(), Axis::new(ParamPath::G, vec![2.0, 3.0])],
            &["b1|m2..", "b1|m2"],
            tau4.clone(),
        ),
        preset(
            "fig6a",
            "one magnon, N = 4 phonons, phi = pi: bipartitions against time",
            one_magnon(4),
            vec![],
            &six,
            curve(),
        ),
        preset(
            "fig6b",
            "one magnon, N = 5 phonons, phi = pi: bipartitions against time",
            one_magnon(5),
            vec![],
            &["m1|b2..", "b2|m1,b3..", "m1|b2,b3,b4", "m1|b2"],
            curve(),
        ),
        preset(
            "fig6c",
            "one magnon, phi = pi: E(m1|B) and E(b2|m1,b3..bN) at tau = 4 against N in 2..12",
            one_magnon(4),
            vec![node_counts(), Axis::new(ParamPath::G, vec![2.0, 3.0])],
            &["m1|b2..", "b2|m1,b3.."],
            tau4,
        ),
    ]
}

pub fn find_preset(name: &str, resolution: usize) -> Result<Preset> {
    preset_catalog_with_resolution(resolution)
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

/// Run a catalog preset at the default map resolution.
pub fn run_preset(name: &str, settings: &SweepSettings) -> Result<SweepResult> {
    find_preset(name, DEFAULT_MAP_RESOLUTION)?.run(settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::IntegratorSettings;
    use std::collections::HashSet;

    const NAMES: [&str; 19] = [
        "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig3c", "fig3d", "fig3e", "fig3f", "fig4a",
        "fig4b", "fig4c", "fig4d", "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig6c",
    ];

    #[test]
    fn catalog_names_are_complete_and_unique() {
        let cat = preset_catalog();
        let names: Vec<&str> = cat.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, NAMES);
        assert_eq!(names.iter().collect::<HashSet<_>>().len(), names.len());
    }

    #[test]
    fn every_grid_point_builds_and_every_partition_resolves() {
        for p in preset_catalog_with_resolution(3) {
            for point in super::super::grid::grid_points(&p.axes) {
                let mut t = p.template.clone();
                for (axis, &v) in p.axes.iter().zip(&point) {
                    axis.path.apply(&mut t, v).unwrap();
                }
                let s = t.build().unwrap_or_else(|e| panic!("{}: {e}", p.name));
                for spec in &p.partitions {
                    crate::entanglement::Bipartition::parse_for(spec, s.n_nodes())
                        .unwrap_or_else(|e| panic!("{} {spec}: {e}", p.name));
                }
            }
        }
    }

    #[test]
    fn caption_parameters() {
        let d = find_preset("fig2d", 41).unwrap();
        assert_eq!(d.points(), 41 * 41);
        assert_eq!(d.axes[0].values[0], 0.5);
        assert_eq!(d.axes[1].values[40], 4.0);
        assert_eq!(d.evaluation, Evaluation::FixedTime(3.0));
        assert_eq!(d.template.phi, PI);
        let f = find_preset("fig3f", 41).unwrap();
        assert_eq!(
            f.axes[0].values,
            (2..=12).map(f64::from).collect::<Vec<_>>()
        );
        assert_eq!(f.evaluation, Evaluation::FixedTime(4.0));
        let e = find_preset("fig2e", 5).unwrap();
        assert_eq!(e.axes[0].values, vec![-20.0, -15.0, -10.0, -5.0, 0.0]);
        assert_eq!(find_preset("fig2b", 41).unwrap().axes[0].values.len(), 30);
        assert!(matches!(
            find_preset("fig9z", 41),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn empty_axes_preset_is_one_point() {
        let mut p = find_preset("fig4a", 41).unwrap();
        p.evaluation = Evaluation::FixedTime(0.1);
        p.partitions.truncate(1);
        let settings = SweepSettings {
            integrator: IntegratorSettings::with_dt(1e-3).unwrap(),
            ..SweepSettings::default()
        };
        let r = p.run(&settings).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.metadata.preset.as_deref(), Some("fig4a"));
    }
}
