//! Geodesic segments, truncated rays, and the diagnostics that run on
//! them: the geodesic test, asymptoticity profiles between rays,
//! almost-geodesic defect curves, and neighborhood membership.
//!
//! Paths are sampled curves. On closed-form spaces they also carry a
//! continuous evaluator, so profile minima can be refined below the
//! sample resolution; on graph spaces the samples sit at node positions
//! and are all there is.

use crate::error::{Error, Result};
use crate::maps::Map;
use crate::numeric;
use crate::point::{BoundaryTarget, Point};
use crate::space::{analytic, Space, SpaceKind};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicKind {
    Segment,
    Ray,
    Line,
}

/// Continuous evaluator for closed-form paths.
#[derive(Debug, Clone)]
enum PathEval {
    /// Disk geodesic through `base` with unimodular direction `dir` seen
    /// from `base` after transport to the origin.
    Disk { base: Complex64, dir: Complex64 },
    /// Same data, conjugated through the strip-to-disk map.
    Strip { base: Complex64, dir: Complex64 },
    /// Straight line on the cylinder, unit speed: (x0 + t vx, th0 + t vt).
    Cylinder { x0: f64, th0: f64, vx: f64, vt: f64 },
    /// Slab staircase from (x0, y0): axial leg first, then the cross leg.
    SlabStair { x0: f64, y0: f64, dx: f64, dy: f64 },
    /// Slab ray toward the open end.
    SlabRay { x0: f64, y0: f64 },
    /// inner(t + offset).
    Shifted { inner: Box<PathEval>, offset: f64 },
    /// Periodic extension by a map: t -> f^k(inner(t - k p)) with
    /// k = floor(t / p); `inner` must cover [0, p].
    Mapped {
        inner: Box<PathEval>,
        map: Map,
        period: f64,
    },
    /// map(inner(t)): the image curve of a path under a pointwise map.
    Composed { inner: Box<PathEval>, map: Map },
}

impl PathEval {
    fn at(&self, t: f64) -> Option<Point> {
        match self {
            PathEval::Disk { base, dir } => {
                let w = analytic::disk_radial(*dir, t);
                let z = analytic::mobius_from_zero(*base, w);
                Some(Point::Xy(z.re, z.im))
            }
            PathEval::Strip { base, dir } => {
                let w = analytic::disk_radial(*dir, t);
                let z = analytic::disk_to_strip(analytic::mobius_from_zero(*base, w));
                Some(Point::Xy(z.re, z.im))
            }
            PathEval::Cylinder { x0, th0, vx, vt } => Some(Point::Xy(
                x0 + t * vx,
                analytic::reduce_angle(th0 + t * vt),
            )),
            PathEval::SlabStair { x0, y0, dx, dy } => {
                let leg = dx.abs();
                if t <= leg {
                    Some(Point::Xy(x0 + t * dx.signum(), *y0))
                } else {
                    Some(Point::Xy(x0 + dx, y0 + (t - leg) * dy.signum()))
                }
            }
            PathEval::SlabRay { x0, y0 } => {
                if x0 + t < 0.0 {
                    None
                } else {
                    Some(Point::Xy(x0 + t, *y0))
                }
            }
            PathEval::Shifted { inner, offset } => inner.at(t + offset),
            PathEval::Mapped { inner, map, period } => {
                let k = (t / period).floor();
                let local = t - k * period;
                let p = inner.at(local)?;
                if k == 0.0 {
                    Some(p)
                } else {
                    map.power_signed(k as i64)?.apply_pointwise(p)
                }
            }
            PathEval::Composed { inner, map } => map.apply_pointwise(inner.at(t)?),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicPath {
    space_kind: SpaceKind,
    kind: GeodesicKind,
    samples: Vec<(f64, Point)>,
    step: f64,
    eval: Option<PathEval>,
    domain: (f64, f64),
}

impl GeodesicPath {
    /// Geodesic segment between two distinct points, sampled at spacing
    /// at most `step`.
    pub fn segment(space: &Space, a: Point, b: Point, step: f64) -> Result<GeodesicPath> {
        let a = space.check_point(a)?;
        let b = space.check_point(b)?;
        let length = space.distance_normalized(a, b);
        let min_sep = 1e-9;
        if length < min_sep {
            return Err(Error::DegenerateSegment {
                separation: length,
                min: min_sep,
            });
        }
        match space.kind() {
            SpaceKind::Graph | SpaceKind::ConformalGrid => {
                let g = space.graph_model().unwrap();
                let (start, goal) = (a.node().unwrap(), b.node().unwrap());
                let sweep = g.sweep_from(start);
                let nodes = sweep.path_to(goal);
                let samples = node_samples(&sweep.dist, &nodes);
                let step = max_spacing(&samples);
                Ok(GeodesicPath {
                    space_kind: space.kind(),
                    kind: GeodesicKind::Segment,
                    domain: (0.0, samples.last().unwrap().0),
                    samples,
                    step,
                    eval: None,
                })
            }
            _ => {
                let eval = closed_form_segment_eval(space, a, b)?;
                Ok(GeodesicPath::from_eval(
                    space.kind(),
                    GeodesicKind::Segment,
                    eval,
                    0.0,
                    length,
                    step,
                ))
            }
        }
    }

    /// Geodesic ray from `from` toward a boundary target, truncated at
    /// `t_max`.
    pub fn ray(
        space: &Space,
        from: Point,
        target: &BoundaryTarget,
        t_max: f64,
        step: f64,
    ) -> Result<GeodesicPath> {
        let from = space.check_point(from)?;
        let bad_target = || Error::BadBoundaryTarget {
            kind: space.kind().name().to_string(),
            target: target.to_string(),
        };
        match (space.kind(), target) {
            (SpaceKind::PoincareDisk, BoundaryTarget::DiskAngle(angle)) => {
                let base = complex_of(from);
                let xi = Complex64::from_polar(1.0, *angle);
                let moved = analytic::mobius_to_zero(base, xi);
                let dir = moved / moved.norm();
                let eval = PathEval::Disk { base, dir };
                Ok(GeodesicPath::from_eval(
                    space.kind(),
                    GeodesicKind::Ray,
                    eval,
                    0.0,
                    t_max,
                    step,
                ))
            }
            (SpaceKind::HyperbolicStrip, BoundaryTarget::AxialEnd(plus)) => {
                let base = analytic::strip_to_disk(complex_of(from));
                let xi = Complex64::new(if *plus { 1.0 } else { -1.0 }, 0.0);
                let moved = analytic::mobius_to_zero(base, xi);
                let dir = moved / moved.norm();
                let eval = PathEval::Strip { base, dir };
                Ok(GeodesicPath::from_eval(
                    space.kind(),
                    GeodesicKind::Ray,
                    eval,
                    0.0,
                    t_max,
                    step,
                ))
            }
            (SpaceKind::FlatCylinder, BoundaryTarget::AxialEnd(plus)) => {
                let (x0, th0) = from.xy().unwrap();
                let eval = PathEval::Cylinder {
                    x0,
                    th0,
                    vx: if *plus { 1.0 } else { -1.0 },
                    vt: 0.0,
                };
                Ok(GeodesicPath::from_eval(
                    space.kind(),
                    GeodesicKind::Ray,
                    eval,
                    0.0,
                    t_max,
                    step,
                ))
            }
            (SpaceKind::L1Slab, BoundaryTarget::AxialEnd(true)) => {
                let (x0, y0) = from.xy().unwrap();
                let eval = PathEval::SlabRay { x0, y0 };
                Ok(GeodesicPath::from_eval(
                    space.kind(),
                    GeodesicKind::Ray,
                    eval,
                    0.0,
                    t_max,
                    step,
                ))
            }
            (SpaceKind::Graph | SpaceKind::ConformalGrid, BoundaryTarget::NodeSequence(seq)) => {
                graph_ray(space, from, seq, t_max, step)
            }
            _ => Err(bad_target()),
        }
    }

    fn from_eval(
        space_kind: SpaceKind,
        kind: GeodesicKind,
        eval: PathEval,
        t0: f64,
        t1: f64,
        step: f64,
    ) -> GeodesicPath {
        let samples = resample(&eval, t0, t1, step);
        GeodesicPath {
            space_kind,
            kind,
            samples,
            step,
            eval: Some(eval),
            domain: (t0, t1),
        }
    }

    pub fn kind(&self) -> GeodesicKind {
        self.kind
    }

    pub fn space_kind(&self) -> SpaceKind {
        self.space_kind
    }

    pub fn samples(&self) -> &[(f64, Point)] {
        &self.samples
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn length(&self) -> f64 {
        self.domain.1 - self.domain.0
    }

    pub fn start(&self) -> Point {
        self.samples.first().unwrap().1
    }

    pub fn end(&self) -> Point {
        self.samples.last().unwrap().1
    }

    /// Whether the path can be evaluated between samples.
    pub fn has_eval(&self) -> bool {
        self.eval.is_some()
    }

    /// Point at parameter t: exact on closed-form paths, nearest sample on
    /// graph paths. Returns the parameter actually used with the point.
    pub fn point_at(&self, t: f64) -> Option<(f64, Point)> {
        let (t0, t1) = self.domain;
        if t < t0 - 1e-12 || t > t1 + 1e-12 {
            return None;
        }
        if let Some(eval) = &self.eval {
            let tc = t.clamp(t0, t1);
            return eval.at(tc).map(|p| (tc, p));
        }
        let idx = match self
            .samples
            .binary_search_by(|(s, _)| s.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(i) => {
                if i == 0 {
                    0
                } else if i >= self.samples.len() {
                    self.samples.len() - 1
                } else {
                    let before = &self.samples[i - 1];
                    let after = &self.samples[i];
                    if (t - before.0) <= (after.0 - t) {
                        i - 1
                    } else {
                        i
                    }
                }
            }
        };
        Some(self.samples[idx])
    }

    /// Reparametrized path t -> path(t + offset), keeping the portion with
    /// nonnegative parameter up to the original end.
    pub fn shifted(&self, offset: f64) -> GeodesicPath {
        let (t0, t1) = self.domain;
        let (n0, n1) = ((t0 - offset).max(0.0), t1 - offset);
        match &self.eval {
            Some(eval) => {
                let shifted = PathEval::Shifted {
                    inner: Box::new(eval.clone()),
                    offset,
                };
                GeodesicPath::from_eval(self.space_kind, self.kind, shifted, n0, n1, self.step)
            }
            None => {
                let samples: Vec<(f64, Point)> = self
                    .samples
                    .iter()
                    .map(|&(t, p)| (t - offset, p))
                    .filter(|&(t, _)| t >= -1e-12)
                    .collect();
                let domain = (
                    samples.first().map(|s| s.0).unwrap_or(n0),
                    samples.last().map(|s| s.0).unwrap_or(n1),
                );
                GeodesicPath {
                    space_kind: self.space_kind,
                    kind: self.kind,
                    samples,
                    step: self.step,
                    eval: None,
                    domain,
                }
            }
        }
    }

    /// The portion of the path on [t0, t1].
    pub fn restricted(&self, t0: f64, t1: f64) -> GeodesicPath {
        let lo = t0.max(self.domain.0);
        let hi = t1.min(self.domain.1);
        match &self.eval {
            Some(eval) => GeodesicPath::from_eval(
                self.space_kind,
                self.kind,
                eval.clone(),
                lo,
                hi,
                self.step,
            ),
            None => {
                let samples: Vec<(f64, Point)> = self
                    .samples
                    .iter()
                    .copied()
                    .filter(|&(t, _)| t >= lo - 1e-12 && t <= hi + 1e-12)
                    .collect();
                GeodesicPath {
                    space_kind: self.space_kind,
                    kind: self.kind,
                    domain: (
                        samples.first().map(|s| s.0).unwrap_or(lo),
                        samples.last().map(|s| s.0).unwrap_or(lo),
                    ),
                    samples,
                    step: self.step,
                    eval: None,
                }
            }
        }
    }

    /// Image curve under a map, same parametrization. Truncated at the
    /// first sample whose image leaves the space. The result is a curve;
    /// nothing guarantees it is still a geodesic.
    pub fn map_through(&self, space: &Space, map: &Map) -> Result<GeodesicPath> {
        let mut samples = Vec::with_capacity(self.samples.len());
        for &(t, p) in &self.samples {
            match map.apply(space, p)? {
                Some(q) => samples.push((t, q)),
                None => break,
            }
        }
        if samples.len() < 2 {
            return Err(Error::OrbitEscaped {
                steps: samples.len(),
                required: 2,
            });
        }
        let domain = (samples.first().unwrap().0, samples.last().unwrap().0);
        let eval = self.eval.as_ref().and_then(|inner| {
            // Only keep a continuous evaluator when the map has a
            // coordinate formula; probe it on the start point.
            map.apply_pointwise(self.samples[0].1).map(|_| PathEval::Composed {
                inner: Box::new(inner.clone()),
                map: map.clone(),
            })
        });
        Ok(GeodesicPath {
            space_kind: self.space_kind,
            kind: self.kind,
            samples,
            step: self.step,
            eval,
            domain,
        })
    }

    /// Periodic extension of a segment by a map: the segment must run from
    /// some x to f(x) in parameter [0, p]; the result covers [t0, t1] via
    /// t -> f^k(segment(t - k p)). Closed-form spaces only.
    pub(crate) fn iterate_segment(
        space: &Space,
        segment: &GeodesicPath,
        map: &Map,
        t0: f64,
        t1: f64,
        step: f64,
    ) -> Result<GeodesicPath> {
        let Some(inner) = segment.eval.clone() else {
            return Err(Error::IncompatiblePaths);
        };
        let period = segment.length();
        let eval = PathEval::Mapped {
            inner: Box::new(inner),
            map: map.clone(),
            period,
        };
        let mut path =
            GeodesicPath::from_eval(space.kind(), GeodesicKind::Line, eval, t0, t1, step);
        // Points may leave the space (for instance backward iterates of a
        // one-sided shift); clip to the evaluable, in-space window.
        path.samples
            .retain(|&(_, p)| space.check_point(p).is_ok());
        if path.samples.len() < 2 {
            return Err(Error::OrbitEscaped {
                steps: path.samples.len(),
                required: 2,
            });
        }
        path.domain = (path.samples.first().unwrap().0, path.samples.last().unwrap().0);
        Ok(path)
    }

    /// Path through a concrete node walk, parametrized by cumulative
    /// distance between consecutive nodes. Used where a path is assembled
    /// node-by-node (for instance by splicing images of a segment) rather
    /// than recovered from a shortest-path sweep.
    pub(crate) fn from_node_walk(space: &Space, nodes: &[usize]) -> Result<GeodesicPath> {
        if nodes.len() < 2 {
            return Err(Error::DegenerateSegment {
                separation: 0.0,
                min: 1e-9,
            });
        }
        let mut samples = Vec::with_capacity(nodes.len());
        let mut t = 0.0;
        samples.push((0.0, Point::Node(nodes[0])));
        for w in nodes.windows(2) {
            t += space.distance(Point::Node(w[0]), Point::Node(w[1]))?;
            samples.push((t, Point::Node(w[1])));
        }
        let step = max_spacing(&samples);
        Ok(GeodesicPath {
            space_kind: space.kind(),
            kind: GeodesicKind::Line,
            domain: (0.0, t),
            samples,
            step,
            eval: None,
        })
    }
}

/// Floor of achievable distance accuracy along a path: coordinates near
/// the rim of a conformal model resolve hyperbolic distances only to
/// about machine-epsilon divided by the conformal gap, so a deep path
/// cannot pass a fixed-tolerance geodesic test and should not have to.
pub(crate) fn rim_noise(space: &Space, path: &GeodesicPath) -> f64 {
    let gap_of = |p: Point| -> f64 {
        let (x, y) = p.xy().unwrap();
        let z = Complex64::new(x, y);
        let w = match space.kind() {
            SpaceKind::PoincareDisk => z,
            SpaceKind::HyperbolicStrip => analytic::strip_to_disk(z),
            _ => return f64::INFINITY,
        };
        (1.0 - w.norm_sqr()).max(f64::MIN_POSITIVE)
    };
    match space.kind() {
        SpaceKind::PoincareDisk | SpaceKind::HyperbolicStrip => {
            let min_gap = path
                .samples()
                .iter()
                .map(|&(_, p)| gap_of(p))
                .fold(f64::INFINITY, f64::min);
            8.0 * f64::EPSILON / min_gap
        }
        _ => 0.0,
    }
}

fn complex_of(p: Point) -> Complex64 {
    let (x, y) = p.xy().unwrap();
    Complex64::new(x, y)
}

fn closed_form_segment_eval(space: &Space, a: Point, b: Point) -> Result<PathEval> {
    Ok(match space.kind() {
        SpaceKind::PoincareDisk => {
            let (za, zb) = (complex_of(a), complex_of(b));
            let moved = analytic::mobius_to_zero(za, zb);
            let dir = moved / moved.norm();
            PathEval::Disk { base: za, dir }
        }
        SpaceKind::HyperbolicStrip => {
            let (za, zb) = (
                analytic::strip_to_disk(complex_of(a)),
                analytic::strip_to_disk(complex_of(b)),
            );
            let moved = analytic::mobius_to_zero(za, zb);
            let dir = moved / moved.norm();
            PathEval::Strip { base: za, dir }
        }
        SpaceKind::FlatCylinder => {
            let (x0, th0) = a.xy().unwrap();
            let (x1, th1) = b.xy().unwrap();
            let dx = x1 - x0;
            let dt = analytic::wrap_angle(th1 - th0);
            let len = dx.hypot(dt);
            PathEval::Cylinder {
                x0,
                th0,
                vx: dx / len,
                vt: dt / len,
            }
        }
        SpaceKind::L1Slab => {
            let (x0, y0) = a.xy().unwrap();
            let (x1, y1) = b.xy().unwrap();
            PathEval::SlabStair {
                x0,
                y0,
                dx: x1 - x0,
                dy: y1 - y0,
            }
        }
        SpaceKind::Graph | SpaceKind::ConformalGrid => unreachable!("handled by caller"),
    })
}

fn resample(eval: &PathEval, t0: f64, t1: f64, step: f64) -> Vec<(f64, Point)> {
    let span = (t1 - t0).max(0.0);
    let n = ((span / step).ceil() as usize).max(1);
    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = t0 + span * i as f64 / n as f64;
        if let Some(p) = eval.at(t) {
            samples.push((t, p));
        }
    }
    samples
}

fn node_samples(dist: &[f64], nodes: &[usize]) -> Vec<(f64, Point)> {
    nodes.iter().map(|&v| (dist[v], Point::Node(v))).collect()
}

fn max_spacing(samples: &[(f64, Point)]) -> f64 {
    samples
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(0.0, f64::max)
}

/// Shortest-path ray on a graph toward a diverging node sequence.
///
/// Only the targets at distance at least `t_max` can pin the ray down to
/// that horizon, so the paths to those are intersected: the part of the
/// approach they all agree on is the ray. If they disagree before `t_max`
/// the sequence is ambiguous at this resolution and the ray follows the
/// path to the last far target beyond the agreed prefix; either way the
/// result is a genuine shortest path from the start, truncated at `t_max`.
fn graph_ray(
    space: &Space,
    from: Point,
    seq: &[usize],
    t_max: f64,
    _step: f64,
) -> Result<GeodesicPath> {
    let g = space.graph_model().unwrap();
    let start = from.node().unwrap();
    for &q in seq {
        if q >= g.node_count() {
            return Err(Error::PointOutsideSpace {
                kind: space.kind().name().to_string(),
                point: Point::Node(q).to_string(),
                reason: "target sequence node out of range".to_string(),
            });
        }
    }
    let sweep = g.sweep_from(start);
    let max_distance = seq.iter().map(|&q| sweep.dist[q]).fold(0.0, f64::max);
    if max_distance < t_max {
        return Err(Error::NotDiverging {
            max_distance,
            required: t_max,
        });
    }

    let far: Vec<usize> = seq
        .iter()
        .copied()
        .filter(|&q| sweep.dist[q] >= t_max)
        .collect();
    let mut prefix = sweep.path_to(far[0]);
    for &q in &far[1..] {
        let path = sweep.path_to(q);
        let common = prefix
            .iter()
            .zip(path.iter())
            .take_while(|(a, b)| a == b)
            .count();
        prefix.truncate(common.max(1));
    }
    let agreed = prefix.last().map(|&v| sweep.dist[v]).unwrap_or(0.0);
    let nodes = if agreed >= t_max {
        prefix
    } else {
        sweep.path_to(*far.last().unwrap())
    };

    let mut samples = node_samples(&sweep.dist, &nodes);
    samples.retain(|&(t, _)| t <= t_max + 1e-12);
    if samples.len() < 2 {
        return Err(Error::NotDiverging {
            max_distance,
            required: t_max,
        });
    }
    let step = max_spacing(&samples);
    Ok(GeodesicPath {
        space_kind: space.kind(),
        kind: GeodesicKind::Ray,
        domain: (0.0, samples.last().unwrap().0),
        samples,
        step,
        eval: None,
    })
}

/// Outcome of the geodesic test on a sampled path.
#[derive(Debug, Clone)]
pub struct GeodesyReport {
    pub passed: bool,
    /// Largest |d(path(t1), path(t2)) - |t1 - t2|| over checked pairs.
    pub worst_defect: f64,
    pub worst_pair: (f64, f64),
    pub tolerance: f64,
    pub pairs_checked: usize,
}

/// Cap on the number of samples entering the all-pairs geodesic test;
/// denser paths are thinned evenly first.
const MAX_PAIR_SAMPLES: usize = 400;

/// Check d(path(t1), path(t2)) = |t1 - t2| over all sampled pairs, with
/// slack `tol` plus the space's own distance tolerance.
pub fn is_geodesic(space: &Space, path: &GeodesicPath, tol: f64) -> Result<GeodesyReport> {
    let thinned = thin_samples(path.samples(), MAX_PAIR_SAMPLES);
    let tolerance = tol + space.distance_tolerance();
    let mut worst = 0.0f64;
    let mut worst_pair = (0.0, 0.0);
    let mut pairs = 0usize;
    for i in 0..thinned.len() {
        for j in (i + 1)..thinned.len() {
            let (t1, p1) = thinned[i];
            let (t2, p2) = thinned[j];
            let d = space.distance(p1, p2)?;
            let defect = (d - (t2 - t1).abs()).abs();
            pairs += 1;
            if defect > worst {
                worst = defect;
                worst_pair = (t1, t2);
            }
        }
    }
    Ok(GeodesyReport {
        passed: worst <= tolerance,
        worst_defect: worst,
        worst_pair,
        tolerance,
        pairs_checked: pairs,
    })
}

fn thin_samples(samples: &[(f64, Point)], cap: usize) -> Vec<(f64, Point)> {
    if samples.len() <= cap {
        return samples.to_vec();
    }
    let stride = samples.len().div_ceil(cap);
    let mut out: Vec<(f64, Point)> = samples.iter().copied().step_by(stride).collect();
    if out.last().map(|s| s.0) != samples.last().map(|s| s.0) {
        out.push(*samples.last().unwrap());
    }
    out
}

/// Controls for asymptoticity profiling.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticityParams {
    /// Window end; profiles run on [0, min(t_max, both domains)].
    pub t_max: f64,
    /// Profile grid spacing.
    pub dt: f64,
    /// Rays count as asymptotic when the pointwise distance stays below
    /// this and shows no growing trend.
    pub sup_threshold: f64,
    /// Strong asymptoticity needs the closest-point profile to end below
    /// this with a decaying trend.
    pub strong_tol: f64,
    /// Trend slopes within +-this count as flat.
    pub slope_tol: f64,
}

impl Default for AsymptoticityParams {
    fn default() -> Self {
        AsymptoticityParams {
            t_max: crate::DEFAULT_T_MAX,
            dt: crate::DEFAULT_DT,
            sup_threshold: 10.0,
            strong_tol: 1e-3,
            slope_tol: crate::TREND_SLOPE_TOL,
        }
    }
}

/// Distance profiles between two rays and the verdicts drawn from them.
#[derive(Debug, Clone)]
pub struct AsymptoticityProfile {
    pub ts: Vec<f64>,
    /// d(gamma(t), sigma(t)): same-parameter distance.
    pub sup_profile: Vec<f64>,
    /// inf_s d(gamma(t), sigma(s)): distance to the other ray as a set.
    pub inf_profile: Vec<f64>,
    pub sup_terminal: f64,
    pub inf_terminal: f64,
    pub sup_tail_slope: f64,
    pub inf_log_tail_slope: f64,
    pub asymptotic: bool,
    pub strongly_asymptotic: bool,
    /// Parameter shift T aligning sigma to gamma: minimizes the tail sup
    /// of d(gamma(t), sigma(t + T)). Only computed for asymptotic pairs.
    pub shift: Option<f64>,
    /// Tail sup at the aligned shift.
    pub aligned_sup: Option<f64>,
}

/// Profile the distance between two rays on a common window.
///
/// The closest-point profile is computed against all of `sigma`, so for a
/// faithful tail `sigma` should extend beyond the window by at least the
/// starting gap d(gamma(0), sigma(0)); on shorter rays the profile end
/// picks up a truncation artifact (the true closest point lies past
/// sigma's end).
pub fn asymptoticity(
    space: &Space,
    gamma: &GeodesicPath,
    sigma: &GeodesicPath,
    params: &AsymptoticityParams,
) -> Result<AsymptoticityProfile> {
    if gamma.space_kind() != space.kind() || sigma.space_kind() != space.kind() {
        return Err(Error::IncompatiblePaths);
    }
    let window = params
        .t_max
        .min(gamma.domain().1)
        .min(sigma.domain().1)
        .max(0.0);
    let n = ((window / params.dt).floor() as usize).max(1);
    let ts: Vec<f64> = (0..=n).map(|k| window * k as f64 / n as f64).collect();

    let mut sup_profile = Vec::with_capacity(ts.len());
    let mut inf_profile = Vec::with_capacity(ts.len());
    for &t in &ts {
        let (_, gp) = gamma.point_at(t).ok_or(Error::IncompatiblePaths)?;
        let (_, sp) = sigma.point_at(t).ok_or(Error::IncompatiblePaths)?;
        sup_profile.push(space.distance(gp, sp)?);
        inf_profile.push(distance_to_path(space, gp, sigma)?);
    }

    let sup_terminal = *sup_profile.last().unwrap();
    let inf_terminal = *inf_profile.last().unwrap();
    let sup_tail_slope = numeric::tail_slope(&ts, &sup_profile);
    let inf_log_tail_slope = numeric::log_tail_slope(&ts, &inf_profile);

    let asymptotic = sup_terminal <= params.sup_threshold && sup_tail_slope <= params.slope_tol;
    let strongly_asymptotic = asymptotic
        && inf_terminal <= params.strong_tol
        && inf_log_tail_slope <= -params.slope_tol;

    let (shift, aligned_sup) = if asymptotic {
        let (t_shift, value) = align_shift(space, gamma, sigma, &ts)?;
        (Some(t_shift), Some(value))
    } else {
        (None, None)
    };

    Ok(AsymptoticityProfile {
        ts,
        sup_profile,
        inf_profile,
        sup_terminal,
        inf_terminal,
        sup_tail_slope,
        inf_log_tail_slope,
        asymptotic,
        strongly_asymptotic,
        shift,
        aligned_sup,
    })
}

/// inf over the other path of the distance from a point: minimum over its
/// samples, refined below sample resolution through the continuous
/// evaluator when the path has one.
pub fn distance_to_path(space: &Space, from: Point, path: &GeodesicPath) -> Result<f64> {
    let mut best = f64::INFINITY;
    let mut best_t = path.domain().0;
    for &(t, p) in path.samples() {
        let d = space.distance(from, p)?;
        if d < best {
            best = d;
            best_t = t;
        }
    }
    if path.has_eval() {
        let (lo, hi) = (
            (best_t - path.step()).max(path.domain().0),
            (best_t + path.step()).min(path.domain().1),
        );
        let f = |s: f64| match path.point_at(s) {
            Some((_, p)) => space.distance(from, p).unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        };
        let (_, refined) = numeric::golden_min(f, lo, hi, 1e-12);
        best = best.min(refined);
    }
    Ok(best)
}

/// Find the parameter shift aligning sigma to gamma on the tail of the
/// window: T minimizing max over tail t of d(gamma(t), sigma(t + T)).
fn align_shift(
    space: &Space,
    gamma: &GeodesicPath,
    sigma: &GeodesicPath,
    ts: &[f64],
) -> Result<(f64, f64)> {
    let tail_from = numeric::tail_start(ts.len());
    let tail: Vec<f64> = ts[tail_from..].to_vec();
    let t_last = *tail.last().unwrap();
    let (sig_lo, sig_hi) = sigma.domain();

    let (_, g0) = gamma.point_at(ts[0]).ok_or(Error::IncompatiblePaths)?;
    let (_, s0) = sigma.point_at(ts[0]).ok_or(Error::IncompatiblePaths)?;
    let reach = space.distance(g0, s0)? + 1.0;
    // T must keep the whole tail inside sigma's domain.
    let lo = (sig_lo - tail[0]).max(-reach);
    let hi = (sig_hi - t_last).min(reach);
    if lo >= hi {
        return Ok((0.0, f64::INFINITY));
    }

    let tail_sup = |shift: f64| -> f64 {
        let mut worst = 0.0f64;
        for &t in &tail {
            let Some((_, gp)) = gamma.point_at(t) else {
                return f64::INFINITY;
            };
            let Some((_, sp)) = sigma.point_at(t + shift) else {
                return f64::INFINITY;
            };
            match space.distance(gp, sp) {
                Ok(d) => worst = worst.max(d),
                Err(_) => return f64::INFINITY,
            }
        }
        worst
    };

    // Coarse scan, then golden refinement around the best cell.
    let cells = (((hi - lo) / 0.05).ceil() as usize).clamp(8, 4000);
    let mut best_shift = lo;
    let mut best_val = f64::INFINITY;
    for k in 0..=cells {
        let shift = lo + (hi - lo) * k as f64 / cells as f64;
        let v = tail_sup(shift);
        if v < best_val {
            best_val = v;
            best_shift = shift;
        }
    }
    let cell = (hi - lo) / cells as f64;
    let (refined_shift, refined_val) = numeric::golden_min(
        tail_sup,
        (best_shift - cell).max(lo),
        (best_shift + cell).min(hi),
        1e-7,
    );
    if refined_val <= best_val {
        Ok((refined_shift, refined_val))
    } else {
        Ok((best_shift, best_val))
    }
}

/// Almost-geodesic defect curves: for each grid time t, the worst
/// violations of the geodesic identity among sample pairs whose
/// parameters are at least t. `upper` collects d - |t1 - t2| overshoots
/// (positive when the curve is too long), `lower` collects |t1 - t2| - d
/// (positive when the curve falls behind its parameter).
#[derive(Debug, Clone)]
pub struct DefectProfile {
    pub ts: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub terminal_upper: f64,
    pub terminal_lower: f64,
    pub lower_log_tail_slope: f64,
    /// Defects shrink toward zero along the curve: the almost-geodesic
    /// verdict at this horizon.
    pub almost_geodesic: bool,
}

pub fn almost_geodesic_defect(
    space: &Space,
    path: &GeodesicPath,
    tol: f64,
) -> Result<DefectProfile> {
    let samples = thin_samples(path.samples(), MAX_PAIR_SAMPLES);
    let n = samples.len();
    if n < 3 {
        return Err(Error::IncompatiblePaths);
    }
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.distance(samples[i].1, samples[j].1)?;
            dist[i * n + j] = d;
        }
    }
    let mut upper_suffix = vec![0.0f64; n];
    let mut lower_suffix = vec![0.0f64; n];
    let mut up = 0.0f64;
    let mut low = 0.0f64;
    for k in (0..n).rev() {
        for j in (k + 1)..n {
            let d = dist[k * n + j];
            let dt = samples[j].0 - samples[k].0;
            up = up.max(d - dt);
            low = low.max(dt - d);
        }
        upper_suffix[k] = up;
        lower_suffix[k] = low;
    }
    let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let terminal_idx = numeric::tail_start(n);
    let terminal_upper = upper_suffix[terminal_idx];
    let terminal_lower = lower_suffix[terminal_idx];
    let lower_log_tail_slope = numeric::log_tail_slope(&ts, &lower_suffix);
    let slack = tol + space.distance_tolerance();
    let almost_geodesic = terminal_upper <= slack
        && (terminal_lower <= slack || lower_log_tail_slope <= -crate::TREND_SLOPE_TOL);
    Ok(DefectProfile {
        ts,
        upper: upper_suffix,
        lower: lower_suffix,
        terminal_upper,
        terminal_lower,
        lower_log_tail_slope,
        almost_geodesic,
    })
}

/// Conservative membership test for the closed R-neighborhood of a path.
#[derive(Debug, Clone, Copy)]
pub struct RegionVerdict {
    pub member: bool,
    /// Smallest sampled distance from the query point to the path.
    pub min_distance: f64,
    /// Margin subtracted from R before comparing; the space's distance
    /// tolerance.
    pub margin: f64,
}

/// Does `x` lie within distance R of the sampled path? Membership is
/// decided against R minus the space's distance tolerance, so a positive
/// answer is robust to metric error; a negative answer within one sample
/// step of the threshold may be a resolution artifact.
pub fn region_contains(
    space: &Space,
    path: &GeodesicPath,
    x: Point,
    radius: f64,
) -> Result<RegionVerdict> {
    let x = space.check_point(x)?;
    let mut best = f64::INFINITY;
    for &(_, p) in path.samples() {
        best = best.min(space.distance(x, p)?);
    }
    let margin = space.distance_tolerance();
    Ok(RegionVerdict {
        member: best <= radius - margin,
        min_distance: best,
        margin,
    })
}
