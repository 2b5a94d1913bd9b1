//! Gaussian covariance-matrix dynamics and logarithmic negativity for chains
//! of magnomechanical nodes coupled through a shared waveguide.

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod fingerprint;
pub mod model;
pub mod modes;
pub mod sweeps;
pub mod table;

pub use dynamics::{
    evolve, initial_cm, steady_state, CovarianceMatrix, IntegratorSettings, SteadyState, Trajectory,
};
pub use entanglement::{log_negativity, Bipartition, LnResult};
pub use error::{Error, Result};
pub use model::{
    build_diffusion, build_drift, stability, DiffusionMatrix, DriftMatrix, RateUnits, Scenario,
    ScenarioConfig, ScenarioParams, StabilityReport,
};
pub use modes::{ModeKind, ModeLabel};
pub use sweeps::{
    grid_sweep, preset_catalog, run_preset, Axis, Evaluation, ParamPath, Preset, ScenarioTemplate,
    SweepResult, SweepSettings,
};
