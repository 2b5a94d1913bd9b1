//! Named parameter grids and the parallel grid runner.

mod catalog;
mod grid;
mod spec;
mod template;

pub use catalog::{
    find_preset, preset_catalog, preset_catalog_with_resolution, run_preset, Preset,
    DEFAULT_MAP_RESOLUTION,
};
pub use grid::{
    grid_points, grid_sweep, Axis, Evaluation, SweepMetadata, SweepResult, SweepRow, SweepSettings,
};
pub use spec::parse_grid_spec;
pub use template::{Layout, ParamPath, ScenarioTemplate};
