//! Points and boundary targets.
//!
//! A `Point` is either a node index (graph and grid spaces) or a pair of
//! real coordinates (closed-form planar models). The interpretation of the
//! pair is owned by the space: Cartesian coordinates for the disk, strip,
//! and slab; axial coordinate plus angle for the cylinder.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    /// A node of a graph or grid space.
    Node(usize),
    /// Planar coordinates. Disk: (re, im) with |z| < 1. Strip: (x, y) with
    /// |y| < 1. Slab: (x, y) with x >= 0, |y| <= 1. Cylinder: (x, angle)
    /// with the angle kept in [0, 2*pi).
    Xy(f64, f64),
}

impl Point {
    pub fn node(self) -> Option<usize> {
        match self {
            Point::Node(i) => Some(i),
            Point::Xy(..) => None,
        }
    }

    pub fn xy(self) -> Option<(f64, f64)> {
        match self {
            Point::Node(_) => None,
            Point::Xy(x, y) => Some((x, y)),
        }
    }

    pub fn is_finite(self) -> bool {
        match self {
            Point::Node(_) => true,
            Point::Xy(x, y) => x.is_finite() && y.is_finite(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Node(i) => write!(f, "node {i}"),
            Point::Xy(x, y) => write!(f, "({x:.6}, {y:.6})"),
        }
    }
}

/// Where a geodesic ray should head.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryTarget {
    /// A unimodular boundary point of the disk, given by its angle.
    DiskAngle(f64),
    /// The end of the strip, cylinder, or slab in the direction of
    /// increasing axial coordinate (`true`) or decreasing (`false`).
    /// The slab only has the increasing end.
    AxialEnd(bool),
    /// A diverging node sequence on a graph or grid space. The ray is the
    /// stabilized prefix of shortest paths to successive entries.
    NodeSequence(Vec<usize>),
}

impl fmt::Display for BoundaryTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryTarget::DiskAngle(a) => write!(f, "disk boundary angle {a:.6}"),
            BoundaryTarget::AxialEnd(true) => write!(f, "+infinity end"),
            BoundaryTarget::AxialEnd(false) => write!(f, "-infinity end"),
            BoundaryTarget::NodeSequence(s) => {
                write!(f, "node sequence of length {}", s.len())
            }
        }
    }
}
