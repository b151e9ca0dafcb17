//! A computational laboratory for proper geodesic Gromov hyperbolic metric
//! spaces.
//!
//! The crate bundles a small family of concrete metric spaces (closed-form
//! models and finite weighted graphs, including conformally weighted grid
//! approximations of planar domains), geodesic construction and diagnostics,
//! hyperbolicity estimators, horofunction/Busemann boundary probes, and the
//! coarse dynamics of isometries and non-expanding maps (divergence rate,
//! minimal displacement, Denjoy-Wolff targets, axes).
//!
//! Everything is finite and sampled: rays are truncated at a horizon,
//! limits become terminal values plus a trend test, and every estimator
//! reports the resolution it was computed at. Results are deterministic
//! for a fixed seed.
//!
//! The `coarselab` binary drives prepackaged scenarios; see `scenario` for
//! the registry and report format.

pub mod boundary;
pub mod dynamics;
pub mod error;
pub mod geodesics;
pub mod hyperbolicity;
pub mod maps;
pub(crate) mod numeric;
pub mod point;
pub mod scenario;
pub mod space;

pub use boundary::HorofunctionSample;
pub use dynamics::{DynamicsConfig, DynamicsReport};
pub use error::{Error, Result};
pub use geodesics::{GeodesicKind, GeodesicPath};
pub use hyperbolicity::DeltaReport;
pub use maps::Map;
pub use point::{BoundaryTarget, Point};
pub use scenario::{list_scenarios, run_scenario, ScenarioConfig, ScenarioReport};
pub use space::{DensitySpec, Space, SpaceKind, Stencil};

/// Default truncation horizon for rays, profiles, and orbit tails.
pub const DEFAULT_T_MAX: f64 = 20.0;

/// Default sample spacing along geodesics and profiles.
pub const DEFAULT_DT: f64 = 0.1;

/// Default tolerance for clustering horofunctions in sup-distance.
pub const DEFAULT_TOL_CLUSTER: f64 = 1e-2;

/// Default tolerance on |tau - c| when deciding whether a map is axial
/// on closed-form spaces. Grid spaces use `5 * distance_tolerance` instead.
pub const DEFAULT_TOL_GAP: f64 = 1e-3;

/// Default orbit length for divergence-rate estimation on closed-form spaces.
pub const DEFAULT_ORBIT_LEN: usize = 1000;

/// Default orbit length for divergence-rate estimation on graph/grid spaces.
pub const DEFAULT_ORBIT_LEN_GRID: usize = 100;

/// Default number of landmarks for horofunction sampling.
pub const DEFAULT_LANDMARKS: usize = 50;

/// Slope threshold for trend tests: a profile counts as decaying when the
/// least-squares slope of its log over the last 30% of the window is below
/// `-TREND_SLOPE_TOL` per unit of time and the terminal value is below the
/// relevant tolerance.
pub const TREND_SLOPE_TOL: f64 = 1e-3;
