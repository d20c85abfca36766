//! No-regret dynamics of residential location choice on road networks.
//!
//! Residents repeatedly pick housing sites with multiplicative weights,
//! pricing each site by affordability, amenity access, community ties, and
//! upkeep. The time-averaged play approaches a coarse correlated
//! equilibrium whose expected population and wealth per site are exported
//! as CSV, GeoJSON, and SVG maps.

pub mod cost;
pub mod distance;
pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod instance;
pub mod metrics;
pub mod population;

pub use cost::{CostModel, ModelParams, Profile};
pub use engine::{Engine, EngineConfig};
pub use error::{Error, Result};
pub use instance::Instance;
