//! TOML scenario documents.
//!
//! ```toml
//! [scenario]
//! n_nodes = 2
//! rate_units = "cyclic"            # or "angular" (default)
//! delta_over_2pi_mhz = -10.0       # scalars broadcast to every node
//! omega_b_over_2pi_mhz = 10.0
//! g_over_2pi_mhz = [2.0, 0.0]
//! kappa_over_2pi_mhz = 3.0
//! gamma_over_2pi_mhz = 1.0
//! kappa_b_hz = 100.0
//! phi_adjacent_rad = ["pi"]        # numbers or "pi", "3pi/4", "2*pi", ...
//! temperature_mk = 10.0            # or n_bar_m / n_bar_b
//!
//! [physical]                       # optional
//! drive_freq_ghz = 10.0
//! ```

use std::f64::consts::PI;

use serde::Deserialize;

use super::{
    classical_steady_amplitudes, derive_waveguide_params, thermal_occupation, AmplitudeOptions,
    MagnonFrequencies, PhysicalInputs, RabiDrive, RateUnits, Scenario, ScenarioParams, Waveguide,
};
use crate::error::{Error, Result};

const DEFAULT_DRIVE_GHZ: f64 = 10.0;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Broadcast<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> Broadcast<T> {
    fn expand(&self, field: &str, n: usize) -> Result<Vec<T>> {
        match self {
            Broadcast::One(x) => Ok(vec![x.clone(); n]),
            Broadcast::Many(v) if v.len() == n => Ok(v.clone()),
            Broadcast::Many(v) => Err(Error::DimensionMismatch {
                field: field.into(),
                expected: n,
                found: v.len(),
            }),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub(crate) enum Phase {
    Radians(f64),
    Expr(String),
}

impl Phase {
    pub(crate) fn radians(&self) -> Result<f64> {
        match self {
            Phase::Radians(x) => Ok(*x),
            Phase::Expr(s) => parse_phase(s),
        }
    }
}

/// Parse a phase: a plain number, or `[a][*]pi[/b]` such as `pi`, `3pi/4`, `2*pi`, `-pi/2`.
pub fn parse_phase(s: &str) -> Result<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::invalid("phase", format!("cannot parse `{s}`"));
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let lower = t.to_ascii_lowercase();
    let (head, tail) = lower.split_once("pi").ok_or_else(bad)?;
    let head = head.strip_suffix('*').unwrap_or(head);
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .ok_or_else(bad)?,
    };
    Ok(factor * PI / divisor)
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    n_nodes: Option<usize>,
    #[serde(default)]
    rate_units: RateUnits,
    delta_over_2pi_mhz: Option<Broadcast<f64>>,
    omega_b_over_2pi_mhz: Option<f64>,
    g_over_2pi_mhz: Option<Broadcast<f64>>,
    kappa_over_2pi_mhz: Option<Broadcast<f64>>,
    gamma_over_2pi_mhz: Option<Broadcast<f64>>,
    kappa_b_hz: Option<f64>,
    phi_adjacent_rad: Option<Broadcast<Phase>>,
    temperature_mk: Option<f64>,
    n_bar_m: Option<f64>,
    n_bar_b: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicalSection {
    drive_freq_ghz: Option<f64>,
    magnon_freq_ghz: Option<Broadcast<f64>>,
    bias_field_t: Option<Broadcast<f64>>,
    gyro_hz_per_t: Option<f64>,
    bare_coupling_hz: Option<Broadcast<f64>>,
    rabi_hz: Option<Broadcast<f64>>,
    drive_field_t: Option<Broadcast<f64>>,
    spin_count: Option<f64>,
    waveguide: Option<WaveguideSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaveguideSection {
    coupling: Broadcast<f64>,
    group_speed_m_per_s: f64,
    positions_m: Vec<f64>,
}

/// A parsed scenario document, not yet validated.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    scenario: ScenarioSection,
    physical: Option<PhysicalSection>,
}

fn required<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::MissingKey(format!("scenario.{key}")))
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn n_nodes(&self) -> Result<usize> {
        required(self.scenario.n_nodes, "n_nodes")
    }

    pub fn rate_units(&self) -> RateUnits {
        self.scenario.rate_units
    }

    /// Physical inputs from the optional `[physical]` section.
    pub fn physical_inputs(&self) -> Result<Option<PhysicalInputs>> {
        let Some(ph) = &self.physical else {
            return Ok(None);
        };
        let n = self.n_nodes()?;
        let gyro = ph.gyro_hz_per_t;
        let need_gyro = || gyro.ok_or_else(|| Error::MissingKey("physical.gyro_hz_per_t".into()));
        let magnon = match (&ph.magnon_freq_ghz, &ph.bias_field_t) {
            (Some(f), _) => Some(MagnonFrequencies::Direct(
                f.expand("physical.magnon_freq_ghz", n)?
                    .into_iter()
                    .map(|x| x * 1e9)
                    .collect(),
            )),
            (None, Some(h)) => Some(MagnonFrequencies::BiasField {
                fields_t: h.expand("physical.bias_field_t", n)?,
                gyro_hz_per_t: need_gyro()?,
            }),
            (None, None) => None,
        };
        let rabi = match (&ph.rabi_hz, &ph.drive_field_t) {
            (Some(r), _) => Some(RabiDrive::Direct(r.expand("physical.rabi_hz", n)?)),
            (None, Some(b)) => Some(RabiDrive::DriveField {
                fields_t: b.expand("physical.drive_field_t", n)?,
                spin_count: ph
                    .spin_count
                    .ok_or_else(|| Error::MissingKey("physical.spin_count".into()))?,
                gyro_hz_per_t: need_gyro()?,
            }),
            (None, None) => None,
        };
        let waveguide = match &ph.waveguide {
            Some(w) => Some(Waveguide {
                coupling: w.coupling.expand("physical.waveguide.coupling", n)?,
                group_speed_m_per_s: w.group_speed_m_per_s,
                positions_m: w.positions_m.clone(),
            }),
            None => None,
        };
        let drive_freq_hz = ph.drive_freq_ghz.unwrap_or(DEFAULT_DRIVE_GHZ) * 1e9;
        if !(drive_freq_hz > 0.0) {
            return Err(Error::invalid(
                "physical.drive_freq_ghz",
                "must be positive",
            ));
        }
        Ok(Some(PhysicalInputs {
            drive_freq_hz,
            magnon,
            bare_coupling_hz: ph
                .bare_coupling_hz
                .as_ref()
                .map(|g| g.expand("physical.bare_coupling_hz", n))
                .transpose()?,
            rabi,
            waveguide,
            temperature_k: self.scenario.temperature_mk.unwrap_or(0.0) * 1e-3,
        }))
    }

    /// Validate and convert to a [`Scenario`].
    ///
    /// Missing `kappa_over_2pi_mhz` / `phi_adjacent_rad` are derived from
    /// `[physical.waveguide]` when present; a missing `g_over_2pi_mhz` is
    /// derived from the classical amplitudes when `bare_coupling_hz` and a
    /// drive are given.
    pub fn build(&self) -> Result<Scenario> {
        let sc = &self.scenario;
        let n = self.n_nodes()?;
        if n == 0 {
            return Err(Error::invalid("scenario.n_nodes", "must be at least 1"));
        }
        let units = sc.rate_units;
        let rate = |f_mhz: f64| units.from_cyclic_mhz(f_mhz);
        let physical = self.physical_inputs()?;

        let delta_mhz = required(sc.delta_over_2pi_mhz.as_ref(), "delta_over_2pi_mhz")?
            .expand("scenario.delta_over_2pi_mhz", n)?;
        let omega_b_mhz = required(sc.omega_b_over_2pi_mhz, "omega_b_over_2pi_mhz")?;
        let gamma_mhz = required(sc.gamma_over_2pi_mhz.as_ref(), "gamma_over_2pi_mhz")?
            .expand("scenario.gamma_over_2pi_mhz", n)?;
        let kappa_b_hz = required(sc.kappa_b_hz, "kappa_b_hz")?;

        let delta_hz: Vec<f64> = delta_mhz.iter().map(|d| d * 1e6).collect();
        let mean_magnon_hz = physical.as_ref().map(|p| {
            let f = p.magnon_freqs_hz(&delta_hz);
            f.iter().sum::<f64>() / f.len().max(1) as f64
        });
        let waveguide = match physical.as_ref() {
            Some(p) if p.waveguide.is_some() => Some(derive_waveguide_params(
                p,
                mean_magnon_hz.unwrap_or(DEFAULT_DRIVE_GHZ * 1e9),
            )?),
            _ => None,
        };

        let kappa_mhz = match (&sc.kappa_over_2pi_mhz, &waveguide) {
            (Some(k), _) => k.expand("scenario.kappa_over_2pi_mhz", n)?,
            (None, Some(w)) => {
                let k = w.kappa_over_2pi_mhz();
                if k.len() != n {
                    return Err(Error::DimensionMismatch {
                        field: "physical.waveguide.coupling".into(),
                        expected: n,
                        found: k.len(),
                    });
                }
                k
            }
            (None, None) => return Err(Error::MissingKey("scenario.kappa_over_2pi_mhz".into())),
        };
        let phi = match (&sc.phi_adjacent_rad, &waveguide) {
            (Some(p), _) => p
                .expand("scenario.phi_adjacent_rad", n - 1)?
                .iter()
                .map(Phase::radians)
                .collect::<Result<Vec<_>>>()?,
            (None, Some(w)) => w.adjacent_phases(),
            (None, None) if n == 1 => Vec::new(),
            (None, None) => return Err(Error::MissingKey("scenario.phi_adjacent_rad".into())),
        };

        let (n_bar_m, n_bar_b) = match (sc.temperature_mk, sc.n_bar_m, sc.n_bar_b) {
            (_, Some(m), Some(b)) => (m, b),
            (Some(t_mk), m, b) => {
                if t_mk < 0.0 {
                    return Err(Error::NegativeValue {
                        field: "scenario.temperature_mk".into(),
                        value: t_mk,
                    });
                }
                let t = t_mk * 1e-3;
                let magnon_hz = mean_magnon_hz.unwrap_or_else(|| {
                    DEFAULT_DRIVE_GHZ * 1e9 + delta_hz.iter().sum::<f64>() / n as f64
                });
                (
                    m.unwrap_or_else(|| thermal_occupation(magnon_hz, t)),
                    b.unwrap_or_else(|| thermal_occupation(omega_b_mhz * 1e6, t)),
                )
            }
            _ => {
                return Err(Error::MissingKey(
                    "scenario.temperature_mk (or both n_bar_m and n_bar_b)".into(),
                ))
            }
        };

        let mut params = ScenarioParams {
            units,
            n_nodes: n,
            delta: delta_mhz.iter().map(|&d| rate(d)).collect(),
            omega_b: rate(omega_b_mhz),
            g: vec![0.0; n],
            kappa: kappa_mhz.iter().map(|&k| rate(k)).collect(),
            gamma: gamma_mhz.iter().map(|&k| rate(k)).collect(),
            kappa_b: rate(kappa_b_hz * 1e-6),
            phi,
            n_bar_m,
            n_bar_b,
        };

        match (&sc.g_over_2pi_mhz, &physical) {
            (Some(g), _) => {
                params.g = g
                    .expand("scenario.g_over_2pi_mhz", n)?
                    .iter()
                    .map(|&x| rate(x))
                    .collect();
            }
            (None, Some(p)) if p.bare_coupling_hz.is_some() && p.rabi.is_some() => {
                let uncoupled = params.clone().build()?;
                let amps = classical_steady_amplitudes(p, &uncoupled, AmplitudeOptions::default())?;
                let bare: Vec<f64> = p
                    .bare_coupling_hz
                    .as_ref()
                    .into_iter()
                    .flatten()
                    .map(|&g| rate(g * 1e-6))
                    .collect();
                params.g = amps.effective_coupling(&bare);
            }
            _ => return Err(Error::MissingKey("scenario.g_over_2pi_mhz".into())),
        }
        params.build()
    }
}

/// Parse and validate a TOML scenario document.
pub fn build_scenario(text: &str) -> Result<Scenario> {
    ScenarioConfig::from_toml_str(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    const FIG2: &str = r#"
        [scenario]
        n_nodes = 2
        delta_over_2pi_mhz = -10.0
        omega_b_over_2pi_mhz = 10.0
        g_over_2pi_mhz = [2.0, 0.0]
        kappa_over_2pi_mhz = 3.0
        gamma_over_2pi_mhz = 1.0
        kappa_b_hz = 100.0
        phi_adjacent_rad = ["pi"]
        temperature_mk = 10.0
    "#;

    #[test]
    fn parses_caption_parameter_set() {
        let s = build_scenario(FIG2).unwrap();
        assert_eq!(s.units(), RateUnits::Angular);
        assert!((s.delta()[1] + TAU * 10.0).abs() < 1e-12);
        assert!((s.g()[0] - TAU * 2.0).abs() < 1e-12);
        assert_eq!(s.g()[1], 0.0);
        assert!((s.kappa_b() - TAU * 1e-4).abs() < 1e-15);
        assert!((s.phi()[0] - PI).abs() < 1e-15);
        assert!((s.n_bar_b() - 20.3406).abs() < 1e-3);
        assert!(s.n_bar_m() < 1e-20);
    }

    #[test]
    fn cyclic_units_skip_the_two_pi() {
        let text = FIG2.replace("n_nodes = 2", "n_nodes = 2\nrate_units = \"cyclic\"");
        let s = build_scenario(&text).unwrap();
        assert_eq!(s.units(), RateUnits::Cyclic);
        assert_eq!(s.omega_b(), 10.0);
        assert_eq!(s.kappa()[0], 3.0);
    }

    #[test]
    fn phases_parse_and_reduce() {
        let text = FIG2.replace(r#"["pi"]"#, r#"["3pi"]"#);
        assert!((build_scenario(&text).unwrap().phi()[0] - PI).abs() < 1e-12);
        for (s, v) in [
            ("pi", PI),
            ("3pi/4", 0.75 * PI),
            ("2*pi", TAU),
            ("-pi/2", -PI / 2.0),
            ("0.5", 0.5),
        ] {
            assert!((parse_phase(s).unwrap() - v).abs() < 1e-15, "{s}");
        }
        assert!(parse_phase("tau").is_err());
        assert!(parse_phase("pi/").is_err());
    }

    #[test]
    fn single_node_needs_no_phase() {
        let text = r#"
            [scenario]
            n_nodes = 1
            delta_over_2pi_mhz = 0.0
            omega_b_over_2pi_mhz = 10.0
            g_over_2pi_mhz = 0.0
            kappa_over_2pi_mhz = 0.0
            gamma_over_2pi_mhz = 1.0
            kappa_b_hz = 100.0
            n_bar_m = 0.0
            n_bar_b = 0.0
        "#;
        let s = build_scenario(text).unwrap();
        assert_eq!(s.n_nodes(), 1);
    }

    #[test]
    fn errors_name_the_offending_key() {
        let missing = FIG2.replace("kappa_b_hz = 100.0", "");
        match build_scenario(&missing) {
            Err(Error::MissingKey(k)) => assert!(k.contains("kappa_b_hz")),
            other => panic!("{other:?}"),
        }
        let mismatch = FIG2.replace("[2.0, 0.0]", "[2.0, 0.0, 1.0]");
        match build_scenario(&mismatch) {
            Err(Error::DimensionMismatch { field, .. }) => assert!(field.contains("g_over")),
            other => panic!("{other:?}"),
        }
        let negative = FIG2.replace("gamma_over_2pi_mhz = 1.0", "gamma_over_2pi_mhz = -1.0");
        assert!(matches!(
            build_scenario(&negative),
            Err(Error::NegativeValue { .. })
        ));
        let no_temp = FIG2.replace("temperature_mk = 10.0", "");
        assert!(matches!(
            build_scenario(&no_temp),
            Err(Error::MissingKey(_))
        ));
        let unknown = FIG2.replace("kappa_b_hz", "kappa_bb_hz");
        assert!(matches!(build_scenario(&unknown), Err(Error::Parse(_))));
    }

    #[test]
    fn waveguide_section_supplies_rates_and_phases() {
        // κ = 2π G² / v_g, so κ/2π = 3 MHz needs G² = 3e6 · v_g
        let g = (3e6_f64 * 1e8).sqrt();
        let text = format!(
            r#"
            [scenario]
            n_nodes = 2
            delta_over_2pi_mhz = -10.0
            omega_b_over_2pi_mhz = 10.0
            g_over_2pi_mhz = [2.0, 0.0]
            gamma_over_2pi_mhz = 1.0
            kappa_b_hz = 100.0
            temperature_mk = 10.0
            [physical]
            drive_freq_ghz = 10.01
            [physical.waveguide]
            coupling = {g}
            group_speed_m_per_s = 1e8
            positions_m = [0.0, 0.005]
            "#
        );
        let s = build_scenario(&text).unwrap();
        assert!((s.kappa()[0] / TAU - 3.0).abs() < 1e-9);
        // magnon at 10 GHz, λ = 1 cm, half a wavelength apart
        assert!((s.phi()[0] - PI).abs() < 1e-9);
    }

    #[test]
    fn coupling_derived_from_drive() {
        let text = r#"
            [scenario]
            n_nodes = 1
            delta_over_2pi_mhz = -10.0
            omega_b_over_2pi_mhz = 10.0
            kappa_over_2pi_mhz = 3.0
            gamma_over_2pi_mhz = 1.0
            kappa_b_hz = 100.0
            temperature_mk = 10.0
            [physical]
            bare_coupling_hz = 0.06
            rabi_hz = 5e12
        "#;
        let s = build_scenario(text).unwrap();
        // |⟨m⟩| ≈ Ω/|Δ - iκ̃| with Δ/2π = -10 MHz, κ̃/2π = 4 MHz
        let m = 5e12 / (10e6_f64.hypot(4e6));
        let expected = TAU * 0.06 * m * 1e-6;
        assert!(
            (s.g()[0] / expected - 1.0).abs() < 1e-3,
            "{} vs {expected}",
            s.g()[0]
        );
    }
}
