use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{thermal_occupation, RateUnits, Scenario, ScenarioParams};

/// Which nodes carry magnomechanical coupling and how the phases are set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Two nodes, `g = (g, 0)`, `φ₁₂ = φ`.
    TwoNode,
    /// `g = (g, 0, …, 0)`, `φ₁₂ = φ`, remaining adjacent phases `2π`.
    OnePhononManyMagnons,
    /// `g = (0, g, …, g)`, `φ₁₂ = φ`, remaining adjacent phases `2π`.
    OneMagnonManyPhonons,
    /// Four nodes, `g = (g, 0, 0, g)`, every adjacent phase `2π`.
    FourMode,
}

/// Chain parameters in lab units, before conversion to internal rates.
///
/// Frequencies are cyclic (`ω/2π`) in MHz except `kappa_b_hz`;
/// `delta` holds per-node detunings when set, otherwise every node sits at
/// `Δ = −ω_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTemplate {
    pub layout: Layout,
    pub units: RateUnits,
    pub n_nodes: usize,
    pub g_mhz: f64,
    pub phi: f64,
    pub kappa_mhz: f64,
    pub gamma_mhz: f64,
    pub omega_b_mhz: f64,
    pub kappa_b_hz: f64,
    pub temperature_mk: f64,
    pub drive_ghz: f64,
    pub delta_mhz: Option<Vec<f64>>,
}

impl ScenarioTemplate {
    /// Shared defaults: `ω_b/2π = 10 MHz`, `κ_b/2π = 100 Hz`, `γ/2π = 1 MHz`,
    /// `κ/2π = 3 MHz`, `T = 10 mK`, `g/2π = 2 MHz`, `φ = π`, drive at 10 GHz,
    /// cyclic rate units.
    pub fn new(layout: Layout, n_nodes: usize) -> Self {
        Self {
            layout,
            units: RateUnits::Cyclic,
            n_nodes,
            g_mhz: 2.0,
            phi: PI,
            kappa_mhz: 3.0,
            gamma_mhz: 1.0,
            omega_b_mhz: 10.0,
            kappa_b_hz: 100.0,
            temperature_mk: 10.0,
            drive_ghz: 10.0,
            delta_mhz: None,
        }
    }

    pub fn detunings_mhz(&self) -> Vec<f64> {
        self.delta_mhz
            .clone()
            .unwrap_or_else(|| vec![-self.omega_b_mhz; self.n_nodes])
    }

    pub fn build(&self) -> Result<Scenario> {
        let n = self.n_nodes;
        let fixed = match self.layout {
            Layout::TwoNode => Some(2),
            Layout::FourMode => Some(4),
            _ => None,
        };
        if let Some(f) = fixed.filter(|&f| f != n) {
            return Err(Error::invalid(
                "n_nodes",
                format!("{:?} layout has {f} nodes, got {n}", self.layout),
            ));
        }
        if n < 2 {
            return Err(Error::invalid("n_nodes", "templates need at least 2 nodes"));
        }
        if self.temperature_mk < 0.0 {
            return Err(Error::NegativeValue {
                field: "temperature_mk".into(),
                value: self.temperature_mk,
            });
        }
        let delta = self.detunings_mhz();
        if delta.len() != n {
            return Err(Error::DimensionMismatch {
                field: "delta".into(),
                expected: n,
                found: delta.len(),
            });
        }
        let (g, phi): (Vec<f64>, Vec<f64>) = match self.layout {
            Layout::TwoNode => (vec![self.g_mhz, 0.0], vec![self.phi]),
            Layout::OnePhononManyMagnons => (
                (0..n)
                    .map(|j| if j == 0 { self.g_mhz } else { 0.0 })
                    .collect(),
                chain_phases(self.phi, n),
            ),
            Layout::OneMagnonManyPhonons => (
                (0..n)
                    .map(|j| if j == 0 { 0.0 } else { self.g_mhz })
                    .collect(),
                chain_phases(self.phi, n),
            ),
            Layout::FourMode => (vec![self.g_mhz, 0.0, 0.0, self.g_mhz], vec![TAU; 3]),
        };
        let t = self.temperature_mk * 1e-3;
        let mean_delta = delta.iter().sum::<f64>() / n as f64;
        let u = self.units;
        ScenarioParams {
            units: u,
            n_nodes: n,
            delta: delta.iter().map(|&d| u.from_cyclic_mhz(d)).collect(),
            omega_b: u.from_cyclic_mhz(self.omega_b_mhz),
            g: g.iter().map(|&x| u.from_cyclic_mhz(x)).collect(),
            kappa: vec![u.from_cyclic_mhz(self.kappa_mhz); n],
            gamma: vec![u.from_cyclic_mhz(self.gamma_mhz); n],
            kappa_b: u.from_cyclic_mhz(self.kappa_b_hz * 1e-6),
            phi,
            n_bar_m: thermal_occupation(self.drive_ghz * 1e9 + mean_delta * 1e6, t),
            n_bar_b: thermal_occupation(self.omega_b_mhz * 1e6, t),
        }
        .build()
    }
}

fn chain_phases(phi: f64, n: usize) -> Vec<f64> {
    (0..n - 1).map(|j| if j == 0 { phi } else { TAU }).collect()
}

/// A sweepable template field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamPath {
    G,
    Phi,
    Kappa,
    Gamma,
    OmegaB,
    KappaBHz,
    TemperatureMk,
    /// Every node's detuning.
    Delta,
    /// One node's detuning, 0-based.
    DeltaNode(usize),
    NNodes,
}

impl ParamPath {
    pub fn apply(self, t: &mut ScenarioTemplate, value: f64) -> Result<()> {
        match self {
            ParamPath::G => t.g_mhz = value,
            ParamPath::Phi => t.phi = value,
            ParamPath::Kappa => t.kappa_mhz = value,
            ParamPath::Gamma => t.gamma_mhz = value,
            ParamPath::OmegaB => t.omega_b_mhz = value,
            ParamPath::KappaBHz => t.kappa_b_hz = value,
            ParamPath::TemperatureMk => t.temperature_mk = value,
            ParamPath::Delta => t.delta_mhz = Some(vec![value; t.n_nodes]),
            ParamPath::DeltaNode(j) => {
                let mut d = t.detunings_mhz();
                let slot = d.get_mut(j).ok_or_else(|| {
                    Error::InvalidParameterPath(format!(
                        "delta{} on a {}-node chain",
                        j + 1,
                        t.n_nodes
                    ))
                })?;
                *slot = value;
                t.delta_mhz = Some(d);
            }
            ParamPath::NNodes => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::invalid(
                        "n_nodes",
                        format!("{value} is not a node count"),
                    ));
                }
                let n = value as usize;
                if let Some(d) = &mut t.delta_mhz {
                    let fill = d.last().copied().unwrap_or(-t.omega_b_mhz);
                    d.resize(n, fill);
                }
                t.n_nodes = n;
            }
        }
        Ok(())
    }
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let p = match s.trim() {
            "g" => ParamPath::G,
            "phi" => ParamPath::Phi,
            "kappa" => ParamPath::Kappa,
            "gamma" => ParamPath::Gamma,
            "omega_b" => ParamPath::OmegaB,
            "kappa_b_hz" => ParamPath::KappaBHz,
            "temperature_mk" | "T" => ParamPath::TemperatureMk,
            "delta" => ParamPath::Delta,
            "n_nodes" | "N" => ParamPath::NNodes,
            other => match other.strip_prefix("delta").map(str::parse::<usize>) {
                Some(Ok(j)) if j >= 1 => ParamPath::DeltaNode(j - 1),
                _ => return Err(Error::InvalidParameterPath(other.to_string())),
            },
        };
        Ok(p)
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamPath::G => write!(f, "g"),
            ParamPath::Phi => write!(f, "phi"),
            ParamPath::Kappa => write!(f, "kappa"),
            ParamPath::Gamma => write!(f, "gamma"),
            ParamPath::OmegaB => write!(f, "omega_b"),
            ParamPath::KappaBHz => write!(f, "kappa_b_hz"),
            ParamPath::TemperatureMk => write!(f, "temperature_mk"),
            ParamPath::Delta => write!(f, "delta"),
            ParamPath::DeltaNode(j) => write!(f, "delta{}", j + 1),
            ParamPath::NNodes => write!(f, "n_nodes"),
        }
    }
}

impl Serialize for ParamPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ParamPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
