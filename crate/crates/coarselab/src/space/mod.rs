//! Space handles: one immutable value per metric space, answering distance
//! queries and producing deterministic point samples.
//!
//! Closed-form models (disk, strip, cylinder, slab) carry no state beyond
//! a sampling window. Graph and grid spaces validate their structure on
//! construction (positive weights, connectivity, positive density) so that
//! every later query is total. Distance queries are pure and safe to issue
//! from multiple threads.

pub mod analytic;
pub mod config;
pub mod graph;
pub mod grid;

use crate::error::{Error, Result};
use crate::point::Point;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use grid::{DensitySpec, GridModel, GridSpec, MaskSpec, Stencil};

use graph::GraphModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    PoincareDisk,
    HyperbolicStrip,
    FlatCylinder,
    L1Slab,
    Graph,
    ConformalGrid,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::PoincareDisk => "poincare-disk",
            SpaceKind::HyperbolicStrip => "hyperbolic-strip",
            SpaceKind::FlatCylinder => "flat-cylinder",
            SpaceKind::L1Slab => "l1-slab",
            SpaceKind::Graph => "graph",
            SpaceKind::ConformalGrid => "conformal-grid",
        }
    }
}

impl std::fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug)]
enum Model {
    Disk,
    Strip,
    Cylinder,
    Slab,
    Graph(GraphModel),
    Grid(GridModel),
}

/// Inset used when sampling open regions, so sampled points stay strictly
/// interior and distances stay finite.
const OPEN_INSET: f64 = 1e-4;

#[derive(Debug)]
pub struct Space {
    kind: SpaceKind,
    model: Model,
    /// Absolute slack to allow on any distance identity checked against
    /// this space. Tiny for closed forms and exact graphs; the metrication
    /// bound for grids.
    distance_tolerance: f64,
    /// Half-width of the axial sampling window on unbounded closed-form
    /// models.
    window: f64,
}

/// Closed-form spaces resolve distance identities to float round-off; this
/// is the slack granted to them.
const EXACT_TOL: f64 = 1e-9;

const DEFAULT_WINDOW: f64 = 10.0;

impl Space {
    pub fn poincare_disk() -> Space {
        Space {
            kind: SpaceKind::PoincareDisk,
            model: Model::Disk,
            distance_tolerance: EXACT_TOL,
            window: DEFAULT_WINDOW,
        }
    }

    pub fn hyperbolic_strip() -> Space {
        Space {
            kind: SpaceKind::HyperbolicStrip,
            model: Model::Strip,
            distance_tolerance: EXACT_TOL,
            window: DEFAULT_WINDOW,
        }
    }

    pub fn flat_cylinder() -> Space {
        Space {
            kind: SpaceKind::FlatCylinder,
            model: Model::Cylinder,
            distance_tolerance: EXACT_TOL,
            window: DEFAULT_WINDOW,
        }
    }

    pub fn l1_slab() -> Space {
        Space {
            kind: SpaceKind::L1Slab,
            model: Model::Slab,
            distance_tolerance: EXACT_TOL,
            window: DEFAULT_WINDOW,
        }
    }

    pub fn graph(node_count: usize, edges: &[(usize, usize, f64)]) -> Result<Space> {
        let model = GraphModel::from_edges(node_count, edges)?;
        Ok(Space {
            kind: SpaceKind::Graph,
            model: Model::Graph(model),
            distance_tolerance: EXACT_TOL,
            window: DEFAULT_WINDOW,
        })
    }

    pub fn conformal_grid(spec: &GridSpec) -> Result<Space> {
        let model = GridModel::build(spec)?;
        let tol = spec.stencil.metrication_rel() * model.reference_length();
        Ok(Space {
            kind: SpaceKind::ConformalGrid,
            model: Model::Grid(model),
            distance_tolerance: tol,
            window: DEFAULT_WINDOW,
        })
    }

    /// Override the axial sampling window (closed-form unbounded models).
    pub fn with_sampling_window(mut self, half_width: f64) -> Space {
        self.window = half_width;
        self
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn distance_tolerance(&self) -> f64 {
        self.distance_tolerance
    }

    pub fn sampling_window(&self) -> f64 {
        self.window
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.model, Model::Graph(_) | Model::Grid(_))
    }

    pub fn node_count(&self) -> Option<usize> {
        match &self.model {
            Model::Graph(g) => Some(g.node_count()),
            Model::Grid(g) => Some(g.node_count()),
            _ => None,
        }
    }

    pub fn graph_model(&self) -> Option<&GraphModel> {
        match &self.model {
            Model::Graph(g) => Some(g),
            Model::Grid(g) => Some(&g.graph),
            _ => None,
        }
    }

    pub fn grid_model(&self) -> Option<&GridModel> {
        match &self.model {
            Model::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// Validate a point and return its normal form (cylinder angles are
    /// reduced to [0, 2 pi)).
    pub fn check_point(&self, p: Point) -> Result<Point> {
        let reject = |reason: &str| {
            Err(Error::PointOutsideSpace {
                kind: self.kind.name().to_string(),
                point: p.to_string(),
                reason: reason.to_string(),
            })
        };
        if !p.is_finite() {
            return reject("coordinates must be finite");
        }
        match (&self.model, p) {
            (Model::Disk, Point::Xy(x, y)) => {
                if x * x + y * y >= 1.0 {
                    reject("|z| must be < 1")
                } else {
                    Ok(p)
                }
            }
            (Model::Strip, Point::Xy(_, y)) => {
                if y.abs() >= 1.0 {
                    reject("|Im z| must be < 1")
                } else {
                    Ok(p)
                }
            }
            (Model::Cylinder, Point::Xy(x, t)) => Ok(Point::Xy(x, analytic::reduce_angle(t))),
            (Model::Slab, Point::Xy(x, y)) => {
                if x < 0.0 {
                    reject("x must be >= 0")
                } else if y.abs() > 1.0 {
                    reject("|y| must be <= 1")
                } else {
                    Ok(p)
                }
            }
            (Model::Graph(g), Point::Node(i)) => {
                if i < g.node_count() {
                    Ok(p)
                } else {
                    reject("node index out of range")
                }
            }
            (Model::Grid(g), Point::Node(i)) => {
                if i < g.node_count() {
                    Ok(p)
                } else {
                    reject("node index out of range")
                }
            }
            _ => Err(Error::PointKindMismatch {
                kind: self.kind.name().to_string(),
                point: p.to_string(),
            }),
        }
    }

    /// Distance between two validated points.
    pub fn distance(&self, a: Point, b: Point) -> Result<f64> {
        let a = self.check_point(a)?;
        let b = self.check_point(b)?;
        Ok(self.distance_normalized(a, b))
    }

    /// Distance assuming both points already passed `check_point`.
    pub(crate) fn distance_normalized(&self, a: Point, b: Point) -> f64 {
        match (&self.model, a, b) {
            (Model::Disk, Point::Xy(x1, y1), Point::Xy(x2, y2)) => {
                analytic::disk_distance(Complex64::new(x1, y1), Complex64::new(x2, y2))
            }
            (Model::Strip, Point::Xy(x1, y1), Point::Xy(x2, y2)) => {
                analytic::strip_distance(x1, y1, x2, y2)
            }
            (Model::Cylinder, Point::Xy(x1, t1), Point::Xy(x2, t2)) => {
                analytic::cylinder_distance(x1, t1, x2, t2)
            }
            (Model::Slab, Point::Xy(x1, y1), Point::Xy(x2, y2)) => {
                analytic::slab_distance(x1, y1, x2, y2)
            }
            (Model::Graph(g), Point::Node(i), Point::Node(j)) => g.distance(i, j),
            (Model::Grid(g), Point::Node(i), Point::Node(j)) => g.graph.distance(i, j),
            _ => unreachable!("distance_normalized called with unvalidated points"),
        }
    }

    /// Deterministic sample of points. Discrete spaces sample nodes without
    /// replacement while `n` does not exceed the node count; closed-form
    /// models sample their coordinate measure on the window (disk: area
    /// measure on the whole disk, inset slightly from the rim).
    pub fn sample_points(&self, n: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match &self.model {
            Model::Disk => (0..n)
                .map(|_| {
                    let r = (1.0 - OPEN_INSET) * rng.random_range(0.0..1.0f64).sqrt();
                    let a = rng.random_range(0.0..analytic::TAU);
                    Point::Xy(r * a.cos(), r * a.sin())
                })
                .collect(),
            Model::Strip => (0..n)
                .map(|_| {
                    let x = rng.random_range(-self.window..self.window);
                    let y = rng.random_range(-(1.0 - OPEN_INSET)..(1.0 - OPEN_INSET));
                    Point::Xy(x, y)
                })
                .collect(),
            Model::Cylinder => (0..n)
                .map(|_| {
                    let x = rng.random_range(-self.window..self.window);
                    let t = rng.random_range(0.0..analytic::TAU);
                    Point::Xy(x, t)
                })
                .collect(),
            Model::Slab => (0..n)
                .map(|_| {
                    let x = rng.random_range(0.0..2.0 * self.window);
                    let y = rng.random_range(-1.0..1.0);
                    Point::Xy(x, y)
                })
                .collect(),
            Model::Graph(_) | Model::Grid(_) => {
                let count = self.node_count().unwrap();
                sample_nodes(count, n, &mut rng)
            }
        }
    }
}

/// Nodes without replacement while possible (partial Fisher-Yates), then
/// uniform with replacement for any overflow.
fn sample_nodes(count: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let take = n.min(count);
    let mut pool: Vec<usize> = (0..count).collect();
    let mut out = Vec::with_capacity(n);
    for k in 0..take {
        let pick = rng.random_range(k..count);
        pool.swap(k, pick);
        out.push(Point::Node(pool[k]));
    }
    for _ in take..n {
        out.push(Point::Node(rng.random_range(0..count)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_points_normalize_their_angle() {
        let cyl = Space::flat_cylinder();
        let p = cyl.check_point(Point::Xy(1.0, 7.0)).unwrap();
        let (_, t) = p.xy().unwrap();
        assert!((0.0..analytic::TAU).contains(&t), "angle {t} not reduced");
        assert!((t - (7.0 - analytic::TAU)).abs() < 1e-12);
    }

    #[test]
    fn disk_rejects_points_on_or_past_the_rim() {
        let disk = Space::poincare_disk();
        assert!(disk.check_point(Point::Xy(1.0, 0.0)).is_err());
        assert!(disk.check_point(Point::Xy(0.8, 0.8)).is_err());
        assert!(disk.check_point(Point::Xy(0.0, 0.999)).is_ok());
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let disk = Space::poincare_disk();
        let err = disk.distance(Point::Node(0), Point::Xy(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::PointKindMismatch { .. }), "got {err}");
    }

    #[test]
    fn slab_boundary_is_closed() {
        let slab = Space::l1_slab();
        assert!(slab.check_point(Point::Xy(0.0, 1.0)).is_ok());
        assert!(slab.check_point(Point::Xy(-0.1, 0.0)).is_err());
        assert!(slab.check_point(Point::Xy(0.0, 1.1)).is_err());
    }

    #[test]
    fn samples_are_deterministic_and_in_space() {
        for space in [
            Space::poincare_disk(),
            Space::hyperbolic_strip(),
            Space::flat_cylinder(),
            Space::l1_slab(),
        ] {
            let a = space.sample_points(64, 7);
            let b = space.sample_points(64, 7);
            assert_eq!(a, b, "same seed must reproduce samples");
            for p in a {
                space.check_point(p).expect("sampled point outside space");
            }
        }
    }

    #[test]
    fn node_samples_are_distinct_when_they_fit() {
        let space = Space::graph(10, &(0..9).map(|i| (i, i + 1, 1.0)).collect::<Vec<_>>())
            .unwrap();
        let mut nodes: Vec<usize> = space
            .sample_points(10, 3)
            .into_iter()
            .map(|p| p.node().unwrap())
            .collect();
        nodes.sort();
        assert_eq!(nodes, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn metric_axioms_hold_on_closed_form_samples() {
        for space in [
            Space::poincare_disk(),
            Space::hyperbolic_strip(),
            Space::flat_cylinder(),
            Space::l1_slab(),
        ] {
            let pts = space.sample_points(30, 11);
            for (i, &a) in pts.iter().enumerate() {
                for (j, &b) in pts.iter().enumerate() {
                    let dab = space.distance(a, b).unwrap();
                    let dba = space.distance(b, a).unwrap();
                    assert!(
                        (dab - dba).abs() <= 1e-9 * (1.0 + dab.abs()),
                        "symmetry fails on {} at ({i}, {j})",
                        space.kind()
                    );
                    if i == j {
                        assert!(dab == 0.0, "d(x, x) = {dab} on {}", space.kind());
                    } else {
                        for &c in pts.iter() {
                            let dac = space.distance(a, c).unwrap();
                            let dcb = space.distance(c, b).unwrap();
                            assert!(
                                dab <= dac + dcb + 1e-9 * (1.0 + dab),
                                "triangle inequality fails on {}",
                                space.kind()
                            );
                        }
                    }
                }
            }
        }
    }
}
