//! Physical-parameter derivations feeding the linearized model.

use std::f64::consts::TAU;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{reduce_phase, Scenario};
use crate::error::{Error, Result};

const PLANCK: f64 = 6.626_070_15e-34;
const BOLTZMANN: f64 = 1.380_649e-23;

type C64 = Complex<f64>;

/// Bose-Einstein occupation `1/(exp(hf/k_B T) - 1)` of a mode with cyclic
/// frequency `freq_hz` at `temperature_k`. Zero at zero temperature.
pub fn thermal_occupation(freq_hz: f64, temperature_k: f64) -> f64 {
    if temperature_k <= 0.0 {
        return 0.0;
    }
    let x = PLANCK * freq_hz / (BOLTZMANN * temperature_k);
    1.0 / x.exp_m1()
}

/// Rabi frequency `Ω = γ̃ √(5N̄) B / 4` of a drive field `B` (Tesla) on a
/// sphere with `spin_count` spins; `gyro` in Hz/T, result in Hz.
pub fn rabi_frequency(field_t: f64, spin_count: f64, gyro_hz_per_t: f64) -> f64 {
    gyro_hz_per_t * (5.0 * spin_count).sqrt() * field_t / 4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MagnonFrequencies {
    /// Per-node magnon frequencies in Hz.
    Direct(Vec<f64>),
    /// `ωⱼ = γ̃ hⱼ` from bias fields (Tesla) and gyromagnetic ratio (Hz/T).
    BiasField {
        fields_t: Vec<f64>,
        gyro_hz_per_t: f64,
    },
}

impl MagnonFrequencies {
    pub fn hz(&self) -> Vec<f64> {
        match self {
            MagnonFrequencies::Direct(f) => f.clone(),
            MagnonFrequencies::BiasField {
                fields_t,
                gyro_hz_per_t,
            } => fields_t.iter().map(|h| gyro_hz_per_t * h).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RabiDrive {
    /// Per-node Rabi frequencies in Hz.
    Direct(Vec<f64>),
    DriveField {
        fields_t: Vec<f64>,
        spin_count: f64,
        gyro_hz_per_t: f64,
    },
}

impl RabiDrive {
    pub fn hz(&self) -> Vec<f64> {
        match self {
            RabiDrive::Direct(f) => f.clone(),
            RabiDrive::DriveField {
                fields_t,
                spin_count,
                gyro_hz_per_t,
            } => fields_t
                .iter()
                .map(|&b| rabi_frequency(b, *spin_count, *gyro_hz_per_t))
                .collect(),
        }
    }
}

/// Waveguide geometry. `coupling` is `Gⱼ` in rad/s·√(m/s), so that
/// `2πGⱼ²/v_g` is an angular rate in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveguide {
    pub coupling: Vec<f64>,
    pub group_speed_m_per_s: f64,
    /// Coupling-point positions relative to the first node, metres.
    pub positions_m: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalInputs {
    pub drive_freq_hz: f64,
    pub magnon: Option<MagnonFrequencies>,
    pub bare_coupling_hz: Option<Vec<f64>>,
    pub rabi: Option<RabiDrive>,
    pub waveguide: Option<Waveguide>,
    pub temperature_k: f64,
}

impl PhysicalInputs {
    /// Magnon frequencies in Hz, falling back to `ε + Δⱼ` when not given.
    pub fn magnon_freqs_hz(&self, detuning_hz: &[f64]) -> Vec<f64> {
        match &self.magnon {
            Some(m) => m.hz(),
            None => detuning_hz.iter().map(|d| self.drive_freq_hz + d).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveguideParams {
    /// Radiative decay `κⱼ = 2πGⱼ²/v_g`, rad/s.
    pub kappa: Vec<f64>,
    /// Per-node traveling phase `φⱼ = ω_m Lⱼ / v_g`.
    pub node_phase: Vec<f64>,
}

impl WaveguideParams {
    pub fn kappa_over_2pi_mhz(&self) -> Vec<f64> {
        self.kappa.iter().map(|k| k / TAU / 1e6).collect()
    }

    /// Adjacent phases `φ_{j,j+1} = φ_{j+1} − φⱼ`, reduced to `[0, 2π)`.
    pub fn adjacent_phases(&self) -> Vec<f64> {
        self.node_phase
            .windows(2)
            .map(|w| reduce_phase(w[1] - w[0]))
            .collect()
    }

    /// `φ_{jl} = φ_l − φⱼ`.
    pub fn pair_phase(&self, j: usize, l: usize) -> f64 {
        self.node_phase[l] - self.node_phase[j]
    }
}

/// Radiative rates and traveling phases from the waveguide geometry.
/// `magnon_freq_hz` is the common magnon frequency `ω_m/2π`.
pub fn derive_waveguide_params(
    inputs: &PhysicalInputs,
    magnon_freq_hz: f64,
) -> Result<WaveguideParams> {
    let wg = inputs
        .waveguide
        .as_ref()
        .ok_or_else(|| Error::MissingKey("physical.waveguide".into()))?;
    if !(wg.group_speed_m_per_s > 0.0) {
        return Err(Error::invalid("group_speed_m_per_s", "must be positive"));
    }
    if wg.coupling.len() != wg.positions_m.len() {
        return Err(Error::DimensionMismatch {
            field: "waveguide.positions_m".into(),
            expected: wg.coupling.len(),
            found: wg.positions_m.len(),
        });
    }
    let v = wg.group_speed_m_per_s;
    let omega_m = TAU * magnon_freq_hz;
    Ok(WaveguideParams {
        kappa: wg.coupling.iter().map(|g| TAU * g * g / v).collect(),
        node_phase: wg.positions_m.iter().map(|l| omega_m * l / v).collect(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct AmplitudeOptions {
    /// Relative change in the largest amplitude that counts as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalAmplitudes {
    pub magnon: Vec<C64>,
    pub phonon: Vec<C64>,
    /// Largest residual of the amplitude equations, relative to the largest drive.
    pub residual: f64,
    pub iterations: usize,
}

impl ClassicalAmplitudes {
    /// Driving-enhanced couplings `|g̃ⱼ⟨mⱼ⟩|` in the same units as `bare`.
    pub fn effective_coupling(&self, bare: &[f64]) -> Vec<f64> {
        bare.iter()
            .zip(&self.magnon)
            .map(|(g, m)| g * m.norm())
            .collect()
    }
}

/// Steady classical amplitudes `⟨mⱼ⟩`, `⟨bⱼ⟩` of the driven chain.
///
/// Starts from `⟨mⱼ⟩ = −Ωⱼ/Δⱼ`, then alternates `⟨bⱼ⟩ = −i g̃ⱼ|⟨mⱼ⟩|²/(iω_b+κ_b)`
/// with a linear solve for the magnon amplitudes. Updates are halved once the
/// step size stops shrinking.
pub fn classical_steady_amplitudes(
    inputs: &PhysicalInputs,
    s: &Scenario,
    options: AmplitudeOptions,
) -> Result<ClassicalAmplitudes> {
    let n = s.n_nodes();
    let units = s.units();
    let to_rate = |hz: f64| units.from_cyclic_mhz(hz / 1e6);
    let bare: Vec<f64> = inputs
        .bare_coupling_hz
        .as_ref()
        .ok_or_else(|| Error::MissingKey("physical.bare_coupling_hz".into()))?
        .iter()
        .map(|&g| to_rate(g))
        .collect();
    let rabi: Vec<f64> = inputs
        .rabi
        .as_ref()
        .ok_or_else(|| Error::MissingKey("physical.rabi_hz".into()))?
        .hz()
        .into_iter()
        .map(to_rate)
        .collect();
    for (field, len) in [("bare_coupling_hz", bare.len()), ("rabi_hz", rabi.len())] {
        if len != n {
            return Err(Error::DimensionMismatch {
                field: field.into(),
                expected: n,
                found: len,
            });
        }
    }
    if let Some(j) = s.delta().iter().position(|&d| d == 0.0) {
        return Err(Error::invalid(
            "delta",
            format!("node {} has zero detuning", j + 1),
        ));
    }

    let i = C64::i();
    let phonon_denominator = C64::new(s.kappa_b(), s.omega_b());
    let phonon_of = |m: &[C64]| -> Vec<C64> {
        m.iter()
            .zip(&bare)
            .map(|(mj, g)| -i * g * mj.norm_sqr() / phonon_denominator)
            .collect()
    };
    let coupling = |j: usize, l: usize| -> C64 {
        let k = (s.kappa()[j] * s.kappa()[l]).sqrt();
        i * k * C64::from_polar(1.0, s.pair_phase(j, l))
    };

    let mut m: Vec<C64> = (0..n)
        .map(|j| C64::new(-rabi[j] / s.delta()[j], 0.0))
        .collect();
    let rhs = DVector::from_iterator(n, rabi.iter().map(|&o| -i * o));
    let mut damping = 1.0;
    let mut last_change = f64::INFINITY;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let b = phonon_of(&m);
        let mut sys = DMatrix::<C64>::zeros(n, n);
        for j in 0..n {
            sys[(j, j)] = C64::new(s.kappa_total(j), s.delta()[j]) + i * bare[j] * (2.0 * b[j].re);
            for l in (0..n).filter(|&l| l != j) {
                sys[(j, l)] = coupling(j, l);
            }
        }
        let next = sys
            .lu()
            .solve(&rhs)
            .ok_or(Error::Singular("classical amplitude equations"))?;
        let scale = next.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let change = next
            .iter()
            .zip(&m)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let relative = if scale > 0.0 { change / scale } else { change };
        if relative >= last_change {
            damping = 0.5;
        }
        last_change = relative;
        for (mj, nj) in m.iter_mut().zip(next.iter()) {
            *mj += damping * (nj - *mj);
        }
        if relative < options.tolerance {
            break;
        }
        if iterations >= options.max_iterations {
            return Err(Error::NoConvergence(iterations));
        }
    }

    let b = phonon_of(&m);
    let drive_scale = rabi.iter().fold(0.0_f64, |a, o| a.max(o.abs()));
    let mut residual = 0.0_f64;
    for j in 0..n {
        let mut r = C64::new(s.kappa_total(j), s.delta()[j]) * m[j]
            + i * bare[j] * m[j] * (2.0 * b[j].re)
            + i * rabi[j];
        for l in (0..n).filter(|&l| l != j) {
            r += coupling(j, l) * m[l];
        }
        let rb = phonon_denominator * b[j] + i * bare[j] * m[j].norm_sqr();
        residual = residual.max(r.norm()).max(rb.norm());
    }
    if drive_scale > 0.0 {
        residual /= drive_scale;
    }
    Ok(ClassicalAmplitudes {
        magnon: m,
        phonon: b,
        residual,
        iterations,
    })
}
