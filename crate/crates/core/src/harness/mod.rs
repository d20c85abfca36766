//! Experiment orchestration and exports.

pub mod config;
pub mod grid;
pub mod render;
pub mod runner;
pub mod snapshot;
pub mod verify;

pub use config::{GraphSource, RunConfig};
pub use grid::{generate_grid, AmenitySpec};
pub use render::render_svg;
pub use runner::{run_matrix, Manifest, RunOutcome};
pub use snapshot::{snapshot, SiteSnapshot};
