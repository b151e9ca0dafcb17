//! Crate-wide error type. Every rejected precondition carries enough context
//! to state what was violated and by how much.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is not connected: node {missing} is unreachable from node {root}")]
    DisconnectedGraph { root: usize, missing: usize },

    #[error("edge ({a}, {b}) has non-positive weight {weight}")]
    NonPositiveWeight { a: usize, b: usize, weight: f64 },

    #[error("edge ({a}, {b}) references a node outside 0..{nodes}")]
    EdgeOutOfRange { a: usize, b: usize, nodes: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("grid mask is empty after excision")]
    EmptyMask,

    #[error("grid mask is not connected under the chosen stencil: {kept} nodes reachable, {total} present")]
    DisconnectedMask { kept: usize, total: usize },

    #[error("density must be positive and finite at every mask node; node {node} at ({x}, {y}) has density {value}")]
    BadDensity { node: usize, x: f64, y: f64, value: f64 },

    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),

    #[error("point {point} is not a valid point of this {kind} space: {reason}")]
    PointOutsideSpace {
        kind: String,
        point: String,
        reason: String,
    },

    #[error("point kind does not match space kind ({kind}): {point}")]
    PointKindMismatch { kind: String, point: String },

    #[error("geodesic endpoints coincide (separation {separation:.3e} below {min:.3e})")]
    DegenerateSegment { separation: f64, min: f64 },

    #[error("boundary target {target} is not valid for a {kind} space")]
    BadBoundaryTarget { kind: String, target: String },

    #[error("target sequence does not diverge: max distance from start is {max_distance:.6} (need >= {required:.6})")]
    NotDiverging { max_distance: f64, required: f64 },

    #[error("paths live on different spaces or sample grids and cannot be compared")]
    IncompatiblePaths,

    #[error("horofunction samples use different landmark sets or base points and cannot be compared")]
    LandmarkMismatch,

    #[error("path fails the geodesic test: worst defect {defect:.6e} at parameters ({t1:.4}, {t2:.4}), tolerance {tol:.6e}")]
    NotAGeodesic {
        defect: f64,
        t1: f64,
        t2: f64,
        tol: f64,
    },

    #[error("map kind {map} cannot act on a {kind} space")]
    MapSpaceMismatch { map: String, kind: String },

    #[error("map is not an isometry at tolerance {tol:.3e}: |d(f x, f y) - d(x, y)| = {defect:.3e} on a sampled pair")]
    NotAnIsometry { defect: f64, tol: f64 },

    #[error("map orbit stays bounded (elliptic); {op} requires an escaping orbit")]
    EllipticMap { op: String },

    #[error("map is not axial at tolerance {tol:.3e}: tau - c = {gap:.6}")]
    NotAxial { gap: f64, tol: f64 },

    #[error("divergence rate {c:.3e} is not positive; axis construction needs c > 0")]
    ZeroDivergenceRate { c: f64 },

    #[error("automorphism permutation is invalid: {reason}")]
    BadPermutation { reason: String },

    #[error("orbit left the space after {steps} steps; need at least {required}")]
    OrbitEscaped { steps: usize, required: usize },

    #[error("unknown scenario '{name}'; registered scenarios: {available}")]
    UnknownScenario { name: String, available: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
