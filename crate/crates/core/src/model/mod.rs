//! Scenario description of an N-node waveguide-magnomechanical chain and
//! everything derived directly from it: drift and diffusion matrices,
//! stability analysis, and physical parameter derivations.

mod config;
mod matrices;
mod physical;
pub(crate) mod stability;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::fingerprint;

pub(crate) use config::Phase;
pub use config::{build_scenario, parse_phase, ScenarioConfig};
pub use matrices::{build_diffusion, build_drift, DiffusionMatrix, DriftMatrix};
pub use physical::{
    classical_steady_amplitudes, derive_waveguide_params, rabi_frequency, thermal_occupation,
    AmplitudeOptions, ClassicalAmplitudes, MagnonFrequencies, PhysicalInputs, RabiDrive, Waveguide,
    WaveguideParams,
};
pub use stability::{stability, StabilityReport};

/// How cyclic frequencies `f = ω/2π` quoted in MHz become internal rates.
///
/// `Angular` multiplies by 2π and measures time in µs. `Cyclic` uses the
/// MHz number directly as a rate in µs⁻¹, which is the same physics with the
/// time axis measured in units of 1/(2π) µs. The preset catalog uses
/// `Cyclic`; config files default to `Angular`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateUnits {
    #[default]
    Angular,
    Cyclic,
}

impl RateUnits {
    /// Internal rate for a cyclic frequency given in MHz.
    pub fn from_cyclic_mhz(self, f_mhz: f64) -> f64 {
        match self {
            RateUnits::Angular => TAU * f_mhz,
            RateUnits::Cyclic => f_mhz,
        }
    }

    /// Inverse of [`RateUnits::from_cyclic_mhz`].
    pub fn to_cyclic_mhz(self, rate: f64) -> f64 {
        match self {
            RateUnits::Angular => rate / TAU,
            RateUnits::Cyclic => rate,
        }
    }

    /// Length of one internal time unit in µs.
    pub fn time_unit_us(self) -> f64 {
        match self {
            RateUnits::Angular => 1.0,
            RateUnits::Cyclic => 1.0 / TAU,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            RateUnits::Angular => "angular: rate = 2π × (value in MHz) [rad/µs]; time unit = 1 µs",
            RateUnits::Cyclic => {
                "cyclic: rate = (value in MHz) [1/µs]; time unit = 1/(2π) µs ≈ 0.159 µs"
            }
        }
    }
}

/// Unvalidated scenario fields, all rates already in internal units.
///
/// Per-node lists must have length `n_nodes`; `phi` holds the `n_nodes - 1`
/// adjacent phases `φ_{j,j+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub units: RateUnits,
    pub n_nodes: usize,
    pub delta: Vec<f64>,
    pub omega_b: f64,
    pub g: Vec<f64>,
    pub kappa: Vec<f64>,
    pub gamma: Vec<f64>,
    pub kappa_b: f64,
    pub phi: Vec<f64>,
    pub n_bar_m: f64,
    pub n_bar_b: f64,
}

impl ScenarioParams {
    /// Uniform chain: every per-node quantity equal, all couplings zero.
    pub fn uniform(units: RateUnits, n_nodes: usize) -> Self {
        Self {
            units,
            n_nodes,
            delta: vec![0.0; n_nodes],
            omega_b: 0.0,
            g: vec![0.0; n_nodes],
            kappa: vec![0.0; n_nodes],
            gamma: vec![0.0; n_nodes],
            kappa_b: 0.0,
            phi: vec![0.0; n_nodes.saturating_sub(1)],
            n_bar_m: 0.0,
            n_bar_b: 0.0,
        }
    }

    pub fn build(self) -> Result<Scenario> {
        Scenario::try_from(self)
    }
}

/// A validated chain description. Phases are stored reduced to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioParams", into = "ScenarioParams")]
pub struct Scenario {
    params: ScenarioParams,
}

impl TryFrom<ScenarioParams> for Scenario {
    type Error = Error;

    fn try_from(mut p: ScenarioParams) -> Result<Self> {
        let n = p.n_nodes;
        if n == 0 {
            return Err(Error::invalid("n_nodes", "must be at least 1"));
        }
        for (field, list) in [
            ("delta", &p.delta),
            ("g", &p.g),
            ("kappa", &p.kappa),
            ("gamma", &p.gamma),
        ] {
            if list.len() != n {
                return Err(Error::DimensionMismatch {
                    field: field.into(),
                    expected: n,
                    found: list.len(),
                });
            }
        }
        if p.phi.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                field: "phi".into(),
                expected: n - 1,
                found: p.phi.len(),
            });
        }
        let finite = p
            .delta
            .iter()
            .chain(&p.g)
            .chain(&p.kappa)
            .chain(&p.gamma)
            .chain(&p.phi)
            .chain([&p.omega_b, &p.kappa_b, &p.n_bar_m, &p.n_bar_b])
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::invalid("scenario", "all values must be finite"));
        }
        for (field, list) in [("kappa", &p.kappa), ("gamma", &p.gamma)] {
            if let Some(&value) = list.iter().find(|&&x| x < 0.0) {
                return Err(Error::NegativeValue {
                    field: field.into(),
                    value,
                });
            }
        }
        for (field, value) in [
            ("kappa_b", p.kappa_b),
            ("n_bar_m", p.n_bar_m),
            ("n_bar_b", p.n_bar_b),
        ] {
            if value < 0.0 {
                return Err(Error::NegativeValue {
                    field: field.into(),
                    value,
                });
            }
        }
        for phase in &mut p.phi {
            *phase = reduce_phase(*phase);
        }
        Ok(Self { params: p })
    }
}

impl From<Scenario> for ScenarioParams {
    fn from(s: Scenario) -> Self {
        s.params
    }
}

/// Reduce a phase to `[0, 2π)`.
pub fn reduce_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl Scenario {
    pub fn params(&self) -> &ScenarioParams {
        &self.params
    }

    pub fn into_params(self) -> ScenarioParams {
        self.params
    }

    pub fn units(&self) -> RateUnits {
        self.params.units
    }

    pub fn n_nodes(&self) -> usize {
        self.params.n_nodes
    }

    /// Dimension `4N` of the drift, diffusion and covariance matrices.
    pub fn dim(&self) -> usize {
        4 * self.params.n_nodes
    }

    pub fn delta(&self) -> &[f64] {
        &self.params.delta
    }

    pub fn omega_b(&self) -> f64 {
        self.params.omega_b
    }

    pub fn g(&self) -> &[f64] {
        &self.params.g
    }

    pub fn kappa(&self) -> &[f64] {
        &self.params.kappa
    }

    pub fn gamma(&self) -> &[f64] {
        &self.params.gamma
    }

    /// Total magnon decay `κ̃ⱼ = κⱼ + γⱼ`.
    pub fn kappa_total(&self, j: usize) -> f64 {
        self.params.kappa[j] + self.params.gamma[j]
    }

    pub fn kappa_b(&self) -> f64 {
        self.params.kappa_b
    }

    /// Adjacent traveling phases, reduced to `[0, 2π)`.
    pub fn phi(&self) -> &[f64] {
        &self.params.phi
    }

    /// Pairwise phase `φ_{jl}`: cumulative sum of adjacent phases between
    /// the two nodes, reduced mod 2π. Symmetric in `j` and `l`.
    pub fn pair_phase(&self, j: usize, l: usize) -> f64 {
        let (lo, hi) = if j <= l { (j, l) } else { (l, j) };
        reduce_phase(self.params.phi[lo..hi].iter().sum())
    }

    pub fn n_bar_m(&self) -> f64 {
        self.params.n_bar_m
    }

    pub fn n_bar_b(&self) -> f64 {
        self.params.n_bar_b
    }

    /// Content hash of the scenario.
    pub fn fingerprint(&self) -> String {
        fingerprint(&self.params)
    }
}
