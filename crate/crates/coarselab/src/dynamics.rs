//! Iteration of self-maps: orbit growth, minimal displacement,
//! classification into elliptic / parabolic / hyperbolic, boundary limit
//! points, dilation coefficients, and invariant axes.
//!
//! Every numerical verdict carries the evidence it was computed from:
//! orbit tables, per-start endpoints, tolerance and truncation flags.
//! Orbits stop early in two honest ways — the image leaves the space, or
//! conformal coordinates come so close to the rim that distances can no
//! longer be resolved — and both are reported rather than papered over.

use crate::boundary;
use crate::error::{Error, Result};
use crate::geodesics::{self, rim_noise, GeodesicPath, GeodesyReport};
use crate::maps::Map;
use crate::numeric;
use crate::point::{BoundaryTarget, Point};
use crate::space::{analytic, Space, SpaceKind};
use crate::{DEFAULT_DT, DEFAULT_ORBIT_LEN, DEFAULT_ORBIT_LEN_GRID, DEFAULT_T_MAX, DEFAULT_TOL_GAP};

/// Orbit growth rate separating parabolic from hyperbolic behaviour.
pub const C_THRESHOLD: f64 = 0.05;

/// Multiples of [`C_THRESHOLD`] bounding the indeterminate band: rates
/// inside `(0.8, 1.25)` times the threshold are too close to call.
const BAND_LO: f64 = 0.8;
const BAND_HI: f64 = 1.25;

/// Conformal coordinates with squared-norm gap below this resolve
/// distances to worse than ~1e-7; orbits stop there and say so.
const RIM_GAP_MIN: f64 = 1e-9;

/// Node spaces up to this size get the exhaustive displacement scan;
/// larger ones are subsampled with a covering-radius certificate.
pub const DISPLACEMENT_EXACT_CUTOFF: usize = 5000;

/// Number of sampled nodes in the subsampled displacement scan.
const DISPLACEMENT_SAMPLE: usize = 256;

/// How many of the best sampled nodes get a local descent pass.
const DISPLACEMENT_DESCENTS: usize = 8;

/// Knobs shared by the dynamics operations.
#[derive(Debug, Clone)]
pub struct DynamicsConfig {
    /// Requested orbit length for rate estimation.
    pub orbit_len: usize,
    /// Seed for sampled starts and probe points.
    pub seed: u64,
    /// Tolerance on `tau - c` for axis construction.
    pub tol_gap: f64,
    /// Sampling step along constructed paths.
    pub dt: f64,
    /// Half-extent, in arclength, of constructed axes.
    pub t_max: f64,
    /// Descent starts for continuous displacement minimization.
    pub search_starts: usize,
    /// Pattern-search step at which a descent stops.
    pub min_step: f64,
}

impl DynamicsConfig {
    /// Defaults scaled to the space: node spaces get shorter orbits and a
    /// gap tolerance tied to their metrication error.
    pub fn for_space(space: &Space) -> Self {
        let discrete = space.is_discrete();
        DynamicsConfig {
            orbit_len: if discrete {
                DEFAULT_ORBIT_LEN_GRID
            } else {
                DEFAULT_ORBIT_LEN
            },
            seed: 7,
            tol_gap: (5.0 * space.distance_tolerance()).max(DEFAULT_TOL_GAP),
            dt: DEFAULT_DT,
            t_max: DEFAULT_T_MAX,
            search_starts: 32,
            min_step: 1e-8,
        }
    }
}

/// Why an orbit stopped before the requested number of steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// The image left the space: off a grid mask or onto a model boundary.
    LeftSpace,
    /// Conformal coordinates came too close to the rim for distances to
    /// mean anything; later iterates would be numerical noise.
    CoordinateLimit,
}

/// A forward orbit `x, f(x), f^2(x), ...` with its distance record.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// Visited points, starting with `x` itself.
    pub points: Vec<Point>,
    /// `d(x, f^n x)` for `n = 1 ..= points.len() - 1`.
    pub distances: Vec<f64>,
    pub truncation: Option<Truncation>,
}

fn near_coordinate_limit(space: &Space, p: Point) -> bool {
    match space.kind() {
        SpaceKind::PoincareDisk => {
            let (x, y) = p.xy().unwrap();
            1.0 - (x * x + y * y) < RIM_GAP_MIN
        }
        SpaceKind::HyperbolicStrip => {
            let (_, y) = p.xy().unwrap();
            1.0 - y.abs() < RIM_GAP_MIN
        }
        _ => false,
    }
}

/// Iterate `f` from `x` for up to `n` steps, recording distances from the
/// start. Stops early (with a flag) on escape or coordinate degeneracy.
pub fn orbit(space: &Space, f: &Map, x: Point, n: usize) -> Result<Orbit> {
    let x = space.check_point(x)?;
    let mut points = Vec::with_capacity(n + 1);
    let mut distances = Vec::with_capacity(n);
    points.push(x);
    let mut truncation = None;
    let mut cur = x;
    for _ in 0..n {
        let next = match f.apply(space, cur)? {
            Some(q) => q,
            None => {
                truncation = Some(Truncation::LeftSpace);
                break;
            }
        };
        if near_coordinate_limit(space, next) {
            truncation = Some(Truncation::CoordinateLimit);
            break;
        }
        distances.push(space.distance(x, next)?);
        points.push(next);
        cur = next;
    }
    Ok(Orbit {
        points,
        distances,
        truncation,
    })
}

/// Orbit growth rate of a nonexpanding map.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    /// Headline estimate: the smallest sampled quotient `d(x, f^n x)/n`.
    /// For nonexpanding maps the distance record is subadditive, so every
    /// quotient bounds the limit rate from above and the smallest sampled
    /// one is the sharpest available estimate.
    pub c: f64,
    /// The final quotient `d(x, f^N x)/N` alone.
    pub endpoint: f64,
    /// Mean one-step distance increment over the tail of the orbit.
    pub tail_increment: f64,
    /// Spread of the three estimates; an honest error bar.
    pub spread: f64,
    /// `(n, d(x, f^n x)/n)` for every recorded step.
    pub table: Vec<(usize, f64)>,
    /// Steps actually taken (equals the request unless truncated).
    pub steps: usize,
    pub truncation: Option<Truncation>,
}

/// Estimate the orbit growth rate from `n` iterates (at least 2).
pub fn divergence_rate(space: &Space, f: &Map, x: Point, n: usize) -> Result<DivergenceReport> {
    if n < 2 {
        return Err(Error::config(format!(
            "rate estimation needs an orbit of at least 2 steps, got {n}"
        )));
    }
    let orb = orbit(space, f, x, n)?;
    if orb.distances.len() < 2 {
        return Err(Error::OrbitEscaped {
            steps: orb.distances.len(),
            required: 2,
        });
    }
    let table: Vec<(usize, f64)> = orb
        .distances
        .iter()
        .enumerate()
        .map(|(i, &d)| (i + 1, d / (i + 1) as f64))
        .collect();
    let endpoint = table.last().unwrap().1;
    let c = table.iter().map(|&(_, q)| q).fold(f64::INFINITY, f64::min);
    let mut increments = Vec::with_capacity(orb.distances.len());
    increments.push(orb.distances[0]);
    increments.extend(orb.distances.windows(2).map(|w| w[1] - w[0]));
    let from = numeric::tail_start(increments.len());
    let tail_increment =
        increments[from..].iter().sum::<f64>() / (increments.len() - from) as f64;
    let hi = c.max(endpoint).max(tail_increment);
    let lo = c.min(endpoint).min(tail_increment);
    Ok(DivergenceReport {
        c,
        endpoint,
        tail_increment,
        spread: hi - lo,
        table,
        steps: orb.distances.len(),
        truncation: orb.truncation,
    })
}

/// Smallest observed displacement `d(x, f x)` and where it was found.
#[derive(Debug, Clone)]
pub struct DisplacementReport {
    pub tau: f64,
    pub argmin: Point,
    /// Whether the reported point is known to attain the minimum: true
    /// for exhaustive node scans and converged continuous descents,
    /// false for subsampled scans (which only give an upper bound).
    pub attained: bool,
    /// True when every node of a discrete space was scanned.
    pub exhaustive: bool,
    /// Certified lower bound on the true minimum, from the displacement
    /// function's 2-Lipschitz property and the sample's covering radius.
    /// Only subsampled scans report one.
    pub lower_bound: Option<f64>,
    /// Displacement evaluations spent.
    pub evaluations: usize,
}

fn displacement_at(space: &Space, f: &Map, p: Point) -> Result<Option<f64>> {
    match f.apply(space, p)? {
        Some(q) => Ok(Some(space.distance(p, q)?)),
        None => Ok(None),
    }
}

/// Compass pattern search over planar coordinates. Probes the four axis
/// directions at the current step, moves to the best strict improvement,
/// halves the step when none improves, and stops below `min_step`.
fn pattern_descend(
    space: &Space,
    f: &Map,
    start: Point,
    start_value: f64,
    init_step: f64,
    min_step: f64,
) -> Result<(Point, f64, usize)> {
    let mut cur = start;
    let mut val = start_value;
    let mut step = init_step;
    let mut evals = 0usize;
    while step >= min_step {
        let (x, y) = cur.xy().unwrap();
        let probes = [
            Point::Xy(x + step, y),
            Point::Xy(x - step, y),
            Point::Xy(x, y + step),
            Point::Xy(x, y - step),
        ];
        let mut best: Option<(f64, Point)> = None;
        for p in probes {
            let Ok(p) = space.check_point(p) else {
                continue;
            };
            evals += 1;
            if let Some(v) = displacement_at(space, f, p)? {
                if v < val - 1e-12 && best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, p));
                }
            }
        }
        match best {
            Some((v, p)) => {
                val = v;
                cur = p;
            }
            None => step *= 0.5,
        }
    }
    Ok((cur, val, evals))
}

/// Greedy neighbor descent of the displacement function on a node space.
fn node_descend(
    space: &Space,
    f: &Map,
    start: usize,
    start_value: f64,
) -> Result<(usize, f64, usize)> {
    let g = space.graph_model().expect("node descent needs a graph");
    let mut cur = start;
    let mut val = start_value;
    let mut evals = 0usize;
    loop {
        let neighbors: Vec<usize> = g.neighbors(cur).map(|(v, _)| v).collect();
        let mut best: Option<(f64, usize)> = None;
        for v in neighbors {
            evals += 1;
            if let Some(d) = displacement_at(space, f, Point::Node(v))? {
                if d < val - 1e-12 && best.is_none_or(|(bv, _)| d < bv) {
                    best = Some((d, v));
                }
            }
        }
        match best {
            Some((v, node)) => {
                val = v;
                cur = node;
            }
            None => return Ok((cur, val, evals)),
        }
    }
}

/// Minimal displacement of `f` over the space.
///
/// Node spaces up to [`DISPLACEMENT_EXACT_CUTOFF`] nodes are scanned
/// exhaustively (exact answer). Larger ones are subsampled, locally
/// descended, and reported as an upper bound together with a certified
/// lower bound `tau - 2 rho` where `rho` is the sample's covering radius.
/// Continuous spaces run a multi-start compass descent to `min_step`.
pub fn minimal_displacement(
    space: &Space,
    f: &Map,
    cfg: &DynamicsConfig,
) -> Result<DisplacementReport> {
    if space.is_discrete() {
        let g = space.graph_model().unwrap();
        let n = g.node_count();
        if n <= DISPLACEMENT_EXACT_CUTOFF {
            let mut best: Option<(f64, usize)> = None;
            let mut evals = 0usize;
            for v in 0..n {
                let Some(img) = f.apply(space, Point::Node(v))? else {
                    continue;
                };
                evals += 1;
                let d = g.distance_early_exit(v, img.node().unwrap());
                if best.is_none_or(|(bv, _)| d < bv) {
                    best = Some((d, v));
                }
            }
            let (tau, argmin) = best.ok_or(Error::OrbitEscaped {
                steps: 0,
                required: 1,
            })?;
            return Ok(DisplacementReport {
                tau,
                argmin: Point::Node(argmin),
                attained: true,
                exhaustive: true,
                lower_bound: Some(tau),
                evaluations: evals,
            });
        }
        // Subsampled scan with local descent and a covering certificate.
        let sample = space.sample_points(DISPLACEMENT_SAMPLE, cfg.seed);
        let mut scored: Vec<(f64, usize)> = Vec::new();
        let mut evals = 0usize;
        for p in sample {
            let v = p.node().unwrap();
            evals += 1;
            if let Some(d) = displacement_at(space, f, p)? {
                scored.push((d, v));
            }
        }
        if scored.is_empty() {
            return Err(Error::OrbitEscaped {
                steps: 0,
                required: 1,
            });
        }
        scored.sort_by(|a, b| a.partial_cmp(b).unwrap());
        scored.dedup_by_key(|e| e.1);
        let mut best = scored[0];
        for &(d, v) in scored.iter().take(DISPLACEMENT_DESCENTS) {
            let (node, val, used) = node_descend(space, f, v, d)?;
            evals += used;
            if val < best.0 {
                best = (val, node);
            }
        }
        let sources: Vec<usize> = scored.iter().map(|&(_, v)| v).collect();
        let cover = g
            .distances_to_set(&sources)
            .into_iter()
            .fold(0.0f64, f64::max);
        let lower = (best.0 - 2.0 * cover).max(0.0);
        return Ok(DisplacementReport {
            tau: best.0,
            argmin: Point::Node(best.1),
            attained: false,
            exhaustive: false,
            lower_bound: Some(lower),
            evaluations: evals,
        });
    }

    // Continuous models: multi-start compass descent.
    let starts = space.sample_points(cfg.search_starts.max(1), cfg.seed);
    let mut best: Option<(f64, Point)> = None;
    let mut evals = 0usize;
    for s in starts {
        evals += 1;
        let Some(v0) = displacement_at(space, f, s)? else {
            continue;
        };
        let (p, v, used) = pattern_descend(space, f, s, v0, 0.5, cfg.min_step)?;
        evals += used;
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, p));
        }
    }
    let (tau, argmin) = best.ok_or(Error::OrbitEscaped {
        steps: 0,
        required: 1,
    })?;
    Ok(DisplacementReport {
        tau,
        argmin,
        attained: true,
        exhaustive: false,
        lower_bound: None,
        evaluations: evals,
    })
}

/// Coarse type of a nonexpanding self-map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapClass {
    /// Bounded, non-trending orbits.
    Elliptic,
    /// Escaping orbits with sublinear growth.
    Parabolic,
    /// Escaping orbits with definite linear growth.
    Hyperbolic,
    /// Growth rate inside the threshold band; too close to call.
    Indeterminate,
}

impl MapClass {
    pub fn name(self) -> &'static str {
        match self {
            MapClass::Elliptic => "elliptic",
            MapClass::Parabolic => "parabolic",
            MapClass::Hyperbolic => "hyperbolic",
            MapClass::Indeterminate => "indeterminate",
        }
    }
}

/// Classification verdict with the evidence behind it.
#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub class: MapClass,
    /// Orbit growth rate estimate used for the verdict.
    pub c: f64,
    /// Largest distance from the start over the first half of the orbit.
    pub head_max: f64,
    /// Largest distance over the second half; bounded orbits do not grow
    /// from head to tail.
    pub tail_max: f64,
    pub threshold: f64,
    /// Indeterminate band `(lo, hi)` around the threshold.
    pub band: (f64, f64),
    pub steps: usize,
    pub truncation: Option<Truncation>,
}

/// Classify a map from an orbit of at least 10 requested steps.
pub fn classify(space: &Space, f: &Map, x: Point, n: usize) -> Result<ClassificationReport> {
    if n < 10 {
        return Err(Error::config(format!(
            "classification needs at least 10 iterates, got {n}"
        )));
    }
    let orb = orbit(space, f, x, n)?;
    let d = &orb.distances;
    if d.len() < 2 {
        return Err(Error::OrbitEscaped {
            steps: d.len(),
            required: 2,
        });
    }
    let half = d.len() / 2;
    let head_max = d[..half].iter().copied().fold(0.0f64, f64::max);
    let tail_max = d[half..].iter().copied().fold(0.0f64, f64::max);
    let c = d
        .iter()
        .enumerate()
        .map(|(i, &dist)| dist / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let bounded = tail_max <= 1.05 * head_max + 0.1;
    let band = (BAND_LO * C_THRESHOLD, BAND_HI * C_THRESHOLD);
    let class = if bounded && orb.truncation.is_none() {
        MapClass::Elliptic
    } else if c > band.1 {
        MapClass::Hyperbolic
    } else if c < band.0 {
        MapClass::Parabolic
    } else {
        MapClass::Indeterminate
    };
    Ok(ClassificationReport {
        class,
        c,
        head_max,
        tail_max,
        threshold: C_THRESHOLD,
        band,
        steps: d.len(),
        truncation: orb.truncation,
    })
}

/// Where escaping orbits accumulate on the boundary, measured from three
/// independent starting points.
#[derive(Debug, Clone)]
pub struct LimitPointReport {
    /// The common limit direction, in the coordinates of the space's
    /// boundary: a rim angle, an axial end, or the orbit's node trail.
    pub target: BoundaryTarget,
    /// Final orbit point of each start.
    pub endpoints: Vec<Point>,
    /// Worst disagreement between per-start limit directions: radians on
    /// the disk rim, 0-or-2 sign mismatch for axial ends, and the ratio
    /// of endpoint separation to distance travelled on node spaces.
    pub spread: f64,
    pub tol: f64,
    pub agree: bool,
}

/// Locate the common boundary limit of forward orbits. Rejects elliptic
/// maps, whose orbits do not escape.
pub fn limit_point(
    space: &Space,
    f: &Map,
    x: Point,
    n: usize,
    seed: u64,
) -> Result<LimitPointReport> {
    let cls = classify(space, f, x, n.max(10))?;
    if cls.class == MapClass::Elliptic {
        return Err(Error::EllipticMap {
            op: "limit point location".to_string(),
        });
    }
    let x = space.check_point(x)?;
    let extra = space.sample_points(2, seed);
    let mut starts = vec![x];
    for e in extra {
        if !starts.contains(&e) {
            starts.push(e);
        }
    }
    let mut orbits = Vec::new();
    for &s in &starts {
        let o = orbit(space, f, s, n)?;
        if o.points.len() >= 2 {
            orbits.push(o);
        }
    }
    if orbits.len() < 2 {
        return Err(Error::OrbitEscaped {
            steps: orbits.len(),
            required: 2,
        });
    }
    let endpoints: Vec<Point> = orbits.iter().map(|o| *o.points.last().unwrap()).collect();
    match space.kind() {
        SpaceKind::PoincareDisk => {
            let angles: Vec<f64> = endpoints
                .iter()
                .map(|p| {
                    let (px, py) = p.xy().unwrap();
                    py.atan2(px)
                })
                .collect();
            let base = angles[0];
            let spread = angles
                .iter()
                .map(|&a| analytic::wrap_angle(a - base).abs())
                .fold(0.0f64, f64::max);
            let mean_offset =
                angles.iter().map(|&a| analytic::wrap_angle(a - base)).sum::<f64>()
                    / angles.len() as f64;
            let tol = 1e-2;
            Ok(LimitPointReport {
                target: BoundaryTarget::DiskAngle(analytic::reduce_angle(base + mean_offset)),
                endpoints,
                spread,
                tol,
                agree: spread <= tol,
            })
        }
        SpaceKind::HyperbolicStrip | SpaceKind::FlatCylinder | SpaceKind::L1Slab => {
            let drifts: Vec<f64> = orbits
                .iter()
                .map(|o| {
                    let (x0, _) = o.points.first().unwrap().xy().unwrap();
                    let (x1, _) = o.points.last().unwrap().xy().unwrap();
                    x1 - x0
                })
                .collect();
            let plus = drifts[0] >= 0.0;
            let spread = if drifts.iter().all(|&d| (d >= 0.0) == plus) {
                0.0
            } else {
                2.0
            };
            let tol = 0.5;
            Ok(LimitPointReport {
                target: BoundaryTarget::AxialEnd(plus),
                endpoints,
                spread,
                tol,
                agree: spread <= tol,
            })
        }
        SpaceKind::Graph | SpaceKind::ConformalGrid => {
            let trail: Vec<usize> = orbits[0]
                .points
                .iter()
                .map(|p| p.node().unwrap())
                .collect();
            let tail = trail[trail.len().saturating_sub(32)..].to_vec();
            let mut travel_min = f64::INFINITY;
            for o in &orbits {
                let d = space.distance(*o.points.first().unwrap(), *o.points.last().unwrap())?;
                travel_min = travel_min.min(d);
            }
            let mut pair_max = 0.0f64;
            for i in 0..endpoints.len() {
                for j in (i + 1)..endpoints.len() {
                    pair_max = pair_max.max(space.distance(endpoints[i], endpoints[j])?);
                }
            }
            let spread = pair_max / travel_min.max(1e-12);
            let tol = 0.5;
            Ok(LimitPointReport {
                target: BoundaryTarget::NodeSequence(tail),
                endpoints,
                spread,
                tol,
                agree: spread <= tol,
            })
        }
    }
}

/// How points approach a boundary direction when measuring a dilation.
pub enum Approach<'a> {
    /// Along a geodesic ray; the limit is read off the terminal value.
    Ray(&'a GeodesicPath),
    /// Along a diverging point sequence; the limit is the smallest value
    /// over the tail half, the conservative reading.
    Sequence(&'a [Point]),
}

/// Limiting value of `d(z, p) - d(f z, p)` along an approach to the
/// boundary: the log of the dilation coefficient of `f` at that
/// direction, seen from `p`.
#[derive(Debug, Clone)]
pub struct DilationReport {
    pub log_lambda: f64,
    /// Spread of the quantity over the tail window; small residuals mean
    /// the limit has settled.
    pub residual: f64,
    /// Least-squares slope over the tail window.
    pub trend: f64,
    /// `(parameter, d(z,p) - d(f z, p))` pairs actually evaluated.
    pub profile: Vec<(f64, f64)>,
    /// True when `f` stopped being evaluable along the approach.
    pub truncated: bool,
}

/// Measure the dilation of `f` at the direction approached by `approach`,
/// from the viewpoint of `p`.
pub fn dilation(space: &Space, f: &Map, approach: Approach<'_>, p: Point) -> Result<DilationReport> {
    let p = space.check_point(p)?;
    let mut profile: Vec<(f64, f64)> = Vec::new();
    let mut truncated = false;
    let sequence_mode = matches!(approach, Approach::Sequence(_));
    match approach {
        Approach::Ray(ray) => {
            for &(t, z) in ray.samples() {
                match f.apply(space, z)? {
                    Some(fz) => {
                        profile.push((t, space.distance(z, p)? - space.distance(fz, p)?))
                    }
                    None => {
                        truncated = true;
                        break;
                    }
                }
            }
        }
        Approach::Sequence(seq) => {
            boundary::check_diverging(space, seq)?;
            for (k, &z) in seq.iter().enumerate() {
                match f.apply(space, z)? {
                    Some(fz) => {
                        profile.push((k as f64, space.distance(z, p)? - space.distance(fz, p)?))
                    }
                    None => {
                        truncated = true;
                        break;
                    }
                }
            }
        }
    }
    if profile.len() < 4 {
        return Err(Error::OrbitEscaped {
            steps: profile.len(),
            required: 4,
        });
    }
    let (log_lambda, tail_from) = if sequence_mode {
        let from = profile.len() / 2;
        let min = profile[from..]
            .iter()
            .map(|&(_, v)| v)
            .fold(f64::INFINITY, f64::min);
        (min, from)
    } else {
        (profile.last().unwrap().1, numeric::tail_start(profile.len()))
    };
    let tail: Vec<f64> = profile[tail_from..].iter().map(|&(_, v)| v).collect();
    let ts: Vec<f64> = profile[tail_from..].iter().map(|&(t, _)| t).collect();
    let residual = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().copied().fold(f64::INFINITY, f64::min);
    let trend = numeric::least_squares_slope(&ts, &tail);
    Ok(DilationReport {
        log_lambda,
        residual,
        trend,
        profile,
        truncated,
    })
}

/// One geodesic-region probe of the boundary fixed-point property.
#[derive(Debug, Clone)]
pub struct RadiusProbe {
    pub radius: f64,
    /// Points confirmed inside the region and pushed through `f`.
    pub checked: usize,
    /// Worst terminal deviation of the images from the target direction
    /// (radians on the disk; axial shortfall on ended models).
    pub terminal_error: f64,
    pub images_converge: bool,
}

/// Verdict on whether a boundary direction is a regular fixed direction
/// of `f`: finite dilation there, and `f`-images of points approaching it
/// inside every probed geodesic region keep approaching it.
#[derive(Debug, Clone)]
pub struct FixedDirectionReport {
    pub target: BoundaryTarget,
    pub dilation: DilationReport,
    /// `exp(log_lambda)`.
    pub lambda: f64,
    pub probes: Vec<RadiusProbe>,
    pub holds: bool,
}

fn disk_angle_error(p: Point, theta: f64) -> f64 {
    let (x, y) = p.xy().unwrap();
    analytic::wrap_angle(y.atan2(x) - theta).abs()
}

/// Check the fixed-direction property of `f` at `target`, probing the
/// geodesic regions of the ray from `p` at each radius in `radii`.
pub fn fixed_direction_check(
    space: &Space,
    f: &Map,
    target: &BoundaryTarget,
    p: Point,
    radii: &[f64],
    cfg: &DynamicsConfig,
) -> Result<FixedDirectionReport> {
    if matches!(target, BoundaryTarget::NodeSequence(_)) {
        return Err(Error::BadBoundaryTarget {
            kind: space.kind().name().to_string(),
            target: format!("{target} (fixed-direction probes need a coordinate target)"),
        });
    }
    let p = space.check_point(p)?;
    let ray = GeodesicPath::ray(space, p, target, cfg.t_max, cfg.dt)?;
    let dil = dilation(space, f, Approach::Ray(&ray), p)?;

    // Companion starts near p give sequences that approach the target
    // inside the region without lying on the central ray itself.
    let mut companions = vec![p];
    for s in space.sample_points(64, cfg.seed) {
        if companions.len() >= 3 {
            break;
        }
        if space.distance(s, p)? <= radii.iter().copied().fold(f64::INFINITY, f64::min) / 2.0
            && !companions.contains(&s)
        {
            companions.push(s);
        }
    }

    let mut probes = Vec::with_capacity(radii.len());
    for &r in radii {
        if r <= 0.0 {
            return Err(Error::config(format!(
                "region radius must be positive, got {r}"
            )));
        }
        let mut checked = 0usize;
        let mut worst = 0.0f64;
        let mut converge = true;
        for &s in &companions {
            let sigma = match GeodesicPath::ray(space, s, target, cfg.t_max, cfg.dt) {
                Ok(path) => path,
                Err(_) => continue,
            };
            // Walk the tail of the companion; keep points certified
            // inside the region and test where f sends them.
            let samples = sigma.samples();
            let tail_from = numeric::tail_start(samples.len());
            let mut errs: Vec<f64> = Vec::new();
            for &(_, z) in &samples[tail_from..] {
                if !geodesics::region_contains(space, &ray, z, r)?.member {
                    continue;
                }
                let Some(fz) = f.apply(space, z)? else {
                    converge = false;
                    break;
                };
                checked += 1;
                match target {
                    BoundaryTarget::DiskAngle(theta) => {
                        errs.push(disk_angle_error(fz, *theta));
                    }
                    BoundaryTarget::AxialEnd(plus) => {
                        let dir = if *plus { 1.0 } else { -1.0 };
                        let (zx, _) = z.xy().unwrap();
                        let (fx, _) = fz.xy().unwrap();
                        // The image should be no farther from the end
                        // than the point it came from.
                        errs.push(((zx - fx) * dir).max(0.0));
                    }
                    BoundaryTarget::NodeSequence(_) => unreachable!("rejected above"),
                }
            }
            if errs.len() >= 2 {
                let terminal = *errs.last().unwrap();
                worst = worst.max(terminal);
                let tol: f64 = match target {
                    BoundaryTarget::DiskAngle(_) => 0.05,
                    _ => 0.5,
                };
                if terminal > tol {
                    converge = false;
                }
            }
        }
        probes.push(RadiusProbe {
            radius: r,
            checked,
            terminal_error: worst,
            images_converge: converge,
        });
    }
    let finite = dil.log_lambda.is_finite() && dil.log_lambda.abs() < 50.0;
    let holds = finite && probes.iter().all(|pr| pr.images_converge);
    let lambda = dil.log_lambda.exp();
    Ok(FixedDirectionReport {
        target: target.clone(),
        dilation: dil,
        lambda,
        probes,
        holds,
    })
}

/// A translation axis: a geodesic line invariant under the map, along
/// which the map acts as a shift by its translation length.
#[derive(Debug, Clone)]
pub struct AxisReport {
    pub axis: GeodesicPath,
    /// Shift length used for the periodic extension: the measured
    /// minimal displacement.
    pub translation: f64,
    /// Orbit growth rate measured from the axis base point.
    pub c: f64,
    /// Largest observed `d(f(axis(t)), axis(t + translation))`.
    pub invariance_defect: f64,
    pub geodesy: GeodesyReport,
}

/// Build the translation axis of an axial map through `x0`.
///
/// Preconditions checked: the displacement gap `tau - c` measured from
/// `x0` must be within `cfg.tol_gap`, the rate must be positive, and
/// `x0` itself must attain the minimal displacement within the same
/// tolerance (descend to a minimizer first if it does not).
pub fn construct_axis(
    space: &Space,
    f: &Map,
    x0: Point,
    cfg: &DynamicsConfig,
) -> Result<AxisReport> {
    let x0 = space.check_point(x0)?;
    let disp = minimal_displacement(space, f, cfg)?;
    let rate = divergence_rate(space, f, x0, cfg.orbit_len)?;
    let tau = disp.tau;
    let c = rate.c;
    if c <= cfg.tol_gap || c.is_nan() {
        return Err(Error::ZeroDivergenceRate { c });
    }
    let gap = tau - c;
    if gap.abs() > cfg.tol_gap {
        return Err(Error::NotAxial {
            gap,
            tol: cfg.tol_gap,
        });
    }
    let d0 = displacement_at(space, f, x0)?.ok_or(Error::OrbitEscaped {
        steps: 0,
        required: 1,
    })?;
    if d0 > tau + cfg.tol_gap {
        return Err(Error::config(format!(
            "axis base displacement {d0:.6} exceeds the minimal displacement {tau:.6} \
             by more than {:.1e}; start from a displacement minimizer",
            cfg.tol_gap
        )));
    }
    let fx0 = f.apply(space, x0)?.ok_or(Error::OrbitEscaped {
        steps: 0,
        required: 1,
    })?;
    let seg = GeodesicPath::segment(space, x0, fx0, cfg.dt)?;
    let periods = (cfg.t_max / tau).ceil().max(1.0);
    let span = periods * seg.length();
    let axis = if seg.has_eval() {
        GeodesicPath::iterate_segment(space, &seg, f, -span, span, cfg.dt)?
    } else {
        // Node spaces: splice images of the base node segment. Forward
        // images always exist; backward ones need an inverse map.
        let base: Vec<usize> = seg
            .samples()
            .iter()
            .map(|&(_, p)| p.node().unwrap())
            .collect();
        let mut nodes = base.clone();
        let k = periods as i64;
        'forward: for step in 1..=k {
            let g = f.power(step as u32);
            for &v in base.iter().skip(1) {
                match g.apply(space, Point::Node(v))? {
                    Some(q) => nodes.push(q.node().unwrap()),
                    None => break 'forward,
                }
            }
        }
        if let Some(_inv) = f.inverse() {
            let mut front: Vec<usize> = Vec::new();
            'backward: for step in 1..=k {
                let g = f.power_signed(-step).unwrap();
                let mut block: Vec<usize> = Vec::new();
                for &v in base.iter().rev().skip(1) {
                    match g.apply(space, Point::Node(v))? {
                        Some(q) => block.push(q.node().unwrap()),
                        None => break 'backward,
                    }
                }
                front.extend(block);
            }
            front.reverse();
            front.extend(nodes);
            nodes = front;
        }
        GeodesicPath::from_node_walk(space, &nodes)?
    };

    let (t0, t1) = axis.domain();
    let mut defect = 0.0f64;
    for &(t, z) in axis.samples() {
        if t + tau > t1 + 1e-9 {
            break;
        }
        let _ = t0;
        if let Some(fz) = f.apply(space, z)? {
            if let Some((_, w)) = axis.point_at(t + tau) {
                defect = defect.max(space.distance(fz, w)?);
            }
        }
    }
    let geodesy = geodesics::is_geodesic(space, &axis, 1e-6 + rim_noise(space, &axis))?;
    Ok(AxisReport {
        axis,
        translation: tau,
        c,
        invariance_defect: defect,
        geodesy,
    })
}

/// Pairwise separation between independently constructed axes.
#[derive(Debug, Clone)]
pub struct AxisSeparation {
    pub i: usize,
    pub j: usize,
    pub separation: f64,
}

/// Outcome of building axes from several starts and comparing them.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub axes: Vec<AxisReport>,
    pub separations: Vec<AxisSeparation>,
    pub max_separation: f64,
    pub tol: f64,
    /// All probed axes coincide within `tol` on their shared window.
    pub unique: bool,
}

/// Symmetric Hausdorff-style separation between two axes, measured on
/// interior samples only: a margin wide enough to cover the base-point
/// offset is trimmed from each end, so finite windows sticking out past
/// each other do not register as separation.
fn axis_separation(space: &Space, a: &GeodesicPath, b: &GeodesicPath) -> Result<f64> {
    let base_gap = space.distance(mid_point(a), mid_point(b))?;
    let one_sided = |from: &GeodesicPath, to: &GeodesicPath| -> Result<f64> {
        let (t0, t1) = from.domain();
        let margin = base_gap + 2.0 * from.step().max(to.step());
        let mut worst = 0.0f64;
        for &(t, z) in from.samples() {
            if t < t0 + margin || t > t1 - margin {
                continue;
            }
            worst = worst.max(geodesics::distance_to_path(space, z, to)?);
        }
        Ok(worst)
    };
    Ok(one_sided(a, b)?.max(one_sided(b, a)?))
}

fn mid_point(path: &GeodesicPath) -> Point {
    let s = path.samples();
    s[s.len() / 2].1
}

/// Build an axis from each start (after descending it to a displacement
/// minimizer) and measure how far the axes are from one another.
pub fn axis_uniqueness_probe(
    space: &Space,
    f: &Map,
    starts: &[Point],
    cfg: &DynamicsConfig,
) -> Result<UniquenessReport> {
    if starts.len() < 2 {
        return Err(Error::config(format!(
            "axis comparison needs at least two starts, got {}",
            starts.len()
        )));
    }
    let mut axes = Vec::with_capacity(starts.len());
    for &s in starts {
        let s = space.check_point(s)?;
        let base = if space.is_discrete() {
            let v = s.node().unwrap();
            let d = displacement_at(space, f, s)?.ok_or(Error::OrbitEscaped {
                steps: 0,
                required: 1,
            })?;
            let (node, _, _) = node_descend(space, f, v, d)?;
            Point::Node(node)
        } else {
            let d = displacement_at(space, f, s)?.ok_or(Error::OrbitEscaped {
                steps: 0,
                required: 1,
            })?;
            let (p, _, _) = pattern_descend(space, f, s, d, 0.25, cfg.min_step)?;
            p
        };
        axes.push(construct_axis(space, f, base, cfg)?);
    }
    let mut separations = Vec::new();
    let mut max_separation = 0.0f64;
    for i in 0..axes.len() {
        for j in (i + 1)..axes.len() {
            let sep = axis_separation(space, &axes[i].axis, &axes[j].axis)?;
            max_separation = max_separation.max(sep);
            separations.push(AxisSeparation {
                i,
                j,
                separation: sep,
            });
        }
    }
    let tol = (5.0 * space.distance_tolerance()).max(1e-6);
    Ok(UniquenessReport {
        axes,
        separations,
        max_separation,
        tol,
        unique: max_separation <= tol,
    })
}

/// Rate and displacement of one power of the map.
#[derive(Debug, Clone)]
pub struct PowerRow {
    pub n: u32,
    pub c: f64,
    pub tau: f64,
    pub tau_over_n: f64,
}

/// Rates and displacements of `f, f^2, ..., f^n_max`, with the two
/// consistency facts a nonexpanding map must satisfy: the rate is linear
/// in the power, and per-power displacement cannot grow.
#[derive(Debug, Clone)]
pub struct PowerConsistencyReport {
    pub rows: Vec<PowerRow>,
    /// Worst relative deviation of `c(f^n)` from `n * c(f)`.
    pub worst_c_deviation: f64,
    pub c_linear: bool,
    /// `tau(f^2)/2 <= tau(f)` within tolerance.
    pub tau_square_consistent: bool,
}

/// Measure rate and displacement for each power up to `n_max` (at least 2).
pub fn power_consistency(
    space: &Space,
    f: &Map,
    n_max: u32,
    x: Point,
    cfg: &DynamicsConfig,
) -> Result<PowerConsistencyReport> {
    if n_max < 2 {
        return Err(Error::config(format!(
            "power comparison needs n_max >= 2, got {n_max}"
        )));
    }
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let g = f.power(n);
        let c = divergence_rate(space, &g, x, cfg.orbit_len)?.c;
        let tau = minimal_displacement(space, &g, cfg)?.tau;
        rows.push(PowerRow {
            n,
            c,
            tau,
            tau_over_n: tau / n as f64,
        });
    }
    let c1 = rows[0].c;
    let worst_c_deviation = rows
        .iter()
        .map(|r| (r.c - r.n as f64 * c1).abs() / (r.n as f64 * c1).max(1.0))
        .fold(0.0f64, f64::max);
    let c_linear = worst_c_deviation <= 1e-2;
    let tau_square_consistent = rows[1].tau / 2.0 <= rows[0].tau + 1e-9;
    Ok(PowerConsistencyReport {
        rows,
        worst_c_deviation,
        c_linear,
        tau_square_consistent,
    })
}

/// Whether an axis was built, and if not, why.
#[derive(Debug, Clone)]
pub enum AxisOutcome {
    Built(Box<AxisReport>),
    /// The displacement gap exceeded its tolerance.
    Rejected { gap: f64, tol: f64 },
    /// The map's class rules an axis out before any gap is measured.
    NotAttempted { reason: String },
}

/// One-stop summary of a map's dynamics on a space.
#[derive(Debug, Clone)]
pub struct DynamicsReport {
    pub map: String,
    pub classification: ClassificationReport,
    pub divergence: DivergenceReport,
    pub displacement: DisplacementReport,
    /// `tau - c`; at most the tolerance for axial maps, and never
    /// meaningfully negative.
    pub gap: f64,
    pub tol_gap: f64,
    pub limit_point: Option<LimitPointReport>,
    pub axis: AxisOutcome,
}

/// Run the full battery: classify, measure rate and displacement, locate
/// the limit point of escaping orbits, and attempt an axis when the gap
/// permits one.
pub fn analyze(space: &Space, f: &Map, x: Point, cfg: &DynamicsConfig) -> Result<DynamicsReport> {
    let x = space.check_point(x)?;
    let classification = classify(space, f, x, cfg.orbit_len.max(10))?;
    let divergence = divergence_rate(space, f, x, cfg.orbit_len)?;
    let displacement = minimal_displacement(space, f, cfg)?;
    let gap = displacement.tau - divergence.c;
    let limit_point = if classification.class == MapClass::Elliptic {
        None
    } else {
        Some(limit_point(space, f, x, cfg.orbit_len, cfg.seed)?)
    };
    let axis = match classification.class {
        MapClass::Hyperbolic => {
            match construct_axis(space, f, displacement.argmin, cfg) {
                Ok(a) => AxisOutcome::Built(Box::new(a)),
                Err(Error::NotAxial { gap, tol }) => AxisOutcome::Rejected { gap, tol },
                Err(e) => return Err(e),
            }
        }
        other => AxisOutcome::NotAttempted {
            reason: format!("map classified {}", other.name()),
        },
    };
    Ok(DynamicsReport {
        map: f.label(),
        classification,
        divergence,
        displacement,
        gap,
        tol_gap: cfg.tol_gap,
        limit_point,
        axis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::MapClaims;
    use std::f64::consts::PI;

    const LN3: f64 = 1.0986122886681098;

    fn cylinder_cfg(space: &Space) -> DynamicsConfig {
        DynamicsConfig::for_space(space)
    }

    #[test]
    fn cylinder_orbit_distances_match_the_closed_form() {
        let space = Space::flat_cylinder();
        let f = Map::cylinder_shift_flip(1.0);
        let orb = orbit(&space, &f, Point::Xy(0.0, 0.3), 12).unwrap();
        assert_eq!(orb.distances.len(), 12);
        assert!(orb.truncation.is_none());
        for (i, &d) in orb.distances.iter().enumerate() {
            let n = (i + 1) as f64;
            let expect = if (i + 1) % 2 == 0 {
                n
            } else {
                (n * n + PI * PI).sqrt()
            };
            assert!(
                (d - expect).abs() < 1e-12,
                "step {}: d = {d}, expected {expect}",
                i + 1
            );
        }
    }

    #[test]
    fn cylinder_rate_is_one_and_displacement_is_the_diagonal() {
        let space = Space::flat_cylinder();
        let f = Map::cylinder_shift_flip(1.0);
        let cfg = cylinder_cfg(&space);
        let rate = divergence_rate(&space, &f, Point::Xy(0.0, 0.3), 1000).unwrap();
        assert!(
            (rate.c - 1.0).abs() < 1e-12,
            "even steps give the exact rate, got {}",
            rate.c
        );
        assert!((rate.endpoint - 1.0).abs() < 1e-12);
        assert!(rate.spread < 0.01, "spread {}", rate.spread);
        assert_eq!(rate.steps, 1000);

        let disp = minimal_displacement(&space, &f, &cfg).unwrap();
        let tau_expect = (1.0 + PI * PI).sqrt();
        assert!(
            (disp.tau - tau_expect).abs() < 1e-9,
            "tau = {}, expected {}",
            disp.tau,
            tau_expect
        );
        assert!(disp.attained);

        // One unit of drift against a tau of sqrt(1 + pi^2): the gap is
        // far outside tolerance, so no axis exists.
        let err = construct_axis(&space, &f, disp.argmin, &cfg).unwrap_err();
        match err {
            Error::NotAxial { gap, .. } => {
                assert!(
                    (gap - (tau_expect - 1.0)).abs() < 1e-6,
                    "gap = {gap}, expected {}",
                    tau_expect - 1.0
                );
            }
            other => panic!("expected the axial rejection, got {other}"),
        }
    }

    #[test]
    fn strip_translate_rate_is_pi_for_a_two_step() {
        let space = Space::hyperbolic_strip();
        let f = Map::strip_translate(2.0);
        let rate = divergence_rate(&space, &f, Point::Xy(0.0, 0.0), 400).unwrap();
        assert!(
            (rate.c - PI).abs() < 1e-9,
            "axis steps have length pi, got {}",
            rate.c
        );
        let cfg = DynamicsConfig::for_space(&space);
        let disp = minimal_displacement(&space, &f, &cfg).unwrap();
        assert!(
            (disp.tau - PI).abs() < 1e-7,
            "tau = {}, expected pi",
            disp.tau
        );
        let (_, y) = disp.argmin.xy().unwrap();
        assert!(y.abs() < 1e-6, "minimizer sits on the centerline, y = {y}");
    }

    #[test]
    fn disk_mobius_rate_displacement_and_axis() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.5).unwrap();
        let cfg = DynamicsConfig::for_space(&space);

        let rate = divergence_rate(&space, &f, Point::Xy(0.0, 0.0), 1000).unwrap();
        assert_eq!(rate.truncation, Some(Truncation::CoordinateLimit));
        assert!(
            rate.steps >= 15 && rate.steps <= 25,
            "rim stop expected near step 20, got {}",
            rate.steps
        );
        assert!(
            (rate.c - LN3).abs() < 1e-6,
            "c = {}, expected ln 3 = {LN3}",
            rate.c
        );

        let disp = minimal_displacement(&space, &f, &cfg).unwrap();
        assert!(
            (disp.tau - LN3).abs() < 1e-7,
            "tau = {}, expected ln 3",
            disp.tau
        );
        let (_, ay) = disp.argmin.xy().unwrap();
        assert!(ay.abs() < 1e-4, "minimizers lie on the real axis, y = {ay}");

        let axis = construct_axis(&space, &f, disp.argmin, &cfg).unwrap();
        assert!(
            (axis.translation - LN3).abs() < 1e-7,
            "translation = {}",
            axis.translation
        );
        assert!((axis.c - LN3).abs() < 1e-6);
        assert!(
            axis.invariance_defect < 1e-6,
            "invariance defect = {:.3e}",
            axis.invariance_defect
        );
        assert!(axis.geodesy.passed, "axis fails geodesy: {:?}", axis.geodesy);
        // The axis is the real diameter, up to the descent resolution of
        // the base-point search.
        for &(_, p) in axis.axis.samples() {
            let (_, y) = p.xy().unwrap();
            assert!(y.abs() < 1e-7, "axis sample off the real line: y = {y}");
        }
        let (t0, t1) = axis.axis.domain();
        assert!(t1 - t0 > 2.0 * DEFAULT_T_MAX - 1.0, "axis window too short");
    }

    #[test]
    fn disk_mobius_classifies_hyperbolic_with_limit_at_plus_one() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.5).unwrap();
        let cls = classify(&space, &f, Point::Xy(0.0, 0.2), 1000).unwrap();
        assert_eq!(cls.class, MapClass::Hyperbolic);

        let lp = limit_point(&space, &f, Point::Xy(0.0, 0.2), 1000, 11).unwrap();
        assert!(lp.agree, "spread {}", lp.spread);
        match lp.target {
            BoundaryTarget::DiskAngle(theta) => {
                assert!(
                    analytic::wrap_angle(theta).abs() < 1e-3,
                    "limit angle {theta} should be 0"
                );
            }
            other => panic!("disk limit should be a rim angle, got {other}"),
        }
    }

    #[test]
    fn rotation_is_elliptic_and_has_no_limit_point() {
        let space = Space::poincare_disk();
        let f = Map::disk_rotation(1.0);
        let cls = classify(&space, &f, Point::Xy(0.4, 0.0), 200).unwrap();
        assert_eq!(cls.class, MapClass::Elliptic);
        let err = limit_point(&space, &f, Point::Xy(0.4, 0.0), 200, 3).unwrap_err();
        assert!(matches!(err, Error::EllipticMap { .. }), "got {err}");
    }

    #[test]
    fn parabolic_disk_map_is_recognized() {
        // Unit-circle automorphism fixing +1 with no interior fixed point:
        // z -> ((1 + i c) z - i c) / (i c z + 1 - i c), c = 1.
        let space = Space::poincare_disk();
        let f = parabolic_toward_one();
        let cls = classify(&space, &f, Point::Xy(0.0, 0.0), 1000).unwrap();
        assert_eq!(
            cls.class,
            MapClass::Parabolic,
            "c = {}, head {}, tail {}",
            cls.c,
            cls.head_max,
            cls.tail_max
        );
        assert!(cls.c < cls.band.0);

        let lp = limit_point(&space, &f, Point::Xy(0.0, 0.0), 1000, 5).unwrap();
        match lp.target {
            BoundaryTarget::DiskAngle(theta) => {
                assert!(
                    analytic::wrap_angle(theta).abs() < 0.05,
                    "parabolic limit angle {theta} should approach 0"
                );
            }
            other => panic!("expected a rim angle, got {other}"),
        }
    }

    fn parabolic_toward_one() -> Map {
        Map::user(
            "horocyclic-step",
            MapClaims {
                exact_isometry: true,
                nonexpanding: true,
            },
            |p| {
                let (x, y) = p.xy()?;
                let z = num_complex::Complex64::new(x, y);
                let ic = num_complex::Complex64::new(0.0, 1.0);
                let one = num_complex::Complex64::new(1.0, 0.0);
                let w = ((one + ic) * z - ic) / (ic * z + one - ic);
                Some(Point::Xy(w.re, w.im))
            },
        )
    }

    #[test]
    fn slab_shift_in_the_threshold_band_is_indeterminate() {
        let space = Space::l1_slab();
        let inside = Map::slab_shift(0.05).unwrap();
        let cls = classify(&space, &inside, Point::Xy(1.0, 0.0), 200).unwrap();
        assert_eq!(cls.class, MapClass::Indeterminate, "c = {}", cls.c);

        let outside = Map::slab_shift(0.2).unwrap();
        let cls = classify(&space, &outside, Point::Xy(1.0, 0.0), 200).unwrap();
        assert_eq!(cls.class, MapClass::Hyperbolic, "c = {}", cls.c);
    }

    #[test]
    fn slab_shift_axis_is_a_horizontal_line() {
        let space = Space::l1_slab();
        let f = Map::slab_shift(1.0).unwrap();
        let cfg = DynamicsConfig::for_space(&space);
        let rate = divergence_rate(&space, &f, Point::Xy(2.0, 0.25), 300).unwrap();
        assert!((rate.c - 1.0).abs() < 1e-12, "c = {}", rate.c);
        let disp = minimal_displacement(&space, &f, &cfg).unwrap();
        assert!((disp.tau - 1.0).abs() < 1e-9, "tau = {}", disp.tau);

        let axis = construct_axis(&space, &f, disp.argmin, &cfg).unwrap();
        assert!(axis.invariance_defect < 1e-9, "defect {}", axis.invariance_defect);
        assert!(axis.geodesy.passed);
        let (_, y0) = axis.axis.start().xy().unwrap();
        for &(_, p) in axis.axis.samples() {
            let (_, y) = p.xy().unwrap();
            assert!((y - y0).abs() < 1e-9, "axis should be horizontal");
        }
    }

    #[test]
    fn identity_like_map_has_no_axis() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.0).unwrap();
        let cfg = DynamicsConfig::for_space(&space);
        let err = construct_axis(&space, &f, Point::Xy(0.2, 0.1), &cfg).unwrap_err();
        assert!(matches!(err, Error::ZeroDivergenceRate { .. }), "got {err}");
    }

    fn path_space(n: usize) -> Space {
        let edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        Space::graph(n, &edges).unwrap()
    }

    fn node_shift(n: usize) -> Map {
        Map::user(
            "path-shift",
            MapClaims {
                exact_isometry: true,
                nonexpanding: true,
            },
            move |p| {
                let i = p.node()?;
                if i + 1 < n {
                    Some(Point::Node(i + 1))
                } else {
                    None
                }
            },
        )
    }

    #[test]
    fn path_shift_axis_is_the_path_itself() {
        let n = 120;
        let space = path_space(n);
        let f = node_shift(n);
        let cfg = DynamicsConfig::for_space(&space);

        let rate = divergence_rate(&space, &f, Point::Node(10), 200).unwrap();
        assert_eq!(rate.truncation, Some(Truncation::LeftSpace));
        assert_eq!(rate.steps, n - 1 - 10);
        assert_eq!(rate.c, 1.0);

        let disp = minimal_displacement(&space, &f, &cfg).unwrap();
        assert_eq!(disp.tau, 1.0);
        assert!(disp.exhaustive && disp.attained);
        assert_eq!(disp.lower_bound, Some(1.0));

        let axis = construct_axis(&space, &f, disp.argmin, &cfg).unwrap();
        assert_eq!(axis.invariance_defect, 0.0, "integer shifts land on nodes");
        assert!(axis.geodesy.passed);
        assert!(axis.axis.length() >= DEFAULT_T_MAX);
    }

    #[test]
    fn conjugation_by_an_automorphism_preserves_rate_and_displacement() {
        let n = 120;
        let space = path_space(n);
        let f = node_shift(n);
        // Conjugate by the path reversal sigma(i) = n-1-i: the result
        // shifts downward instead of upward.
        let sigma = Map::graph_automorphism((0..n).map(|i| n - 1 - i).collect()).unwrap();
        let sigma_inv = sigma.inverse().unwrap();
        let inner = f.clone();
        let g = Map::user(
            "conjugated-shift",
            MapClaims {
                exact_isometry: true,
                nonexpanding: true,
            },
            move |p| {
                let q = sigma_inv.apply_pointwise(p)?;
                let r = inner.apply_pointwise(q)?;
                sigma.apply_pointwise(r)
            },
        );
        let cfg = DynamicsConfig::for_space(&space);
        let rate_f = divergence_rate(&space, &f, Point::Node(10), 200).unwrap();
        let rate_g = divergence_rate(&space, &g, Point::Node(n - 1 - 10), 200).unwrap();
        assert_eq!(rate_f.c, rate_g.c);
        let disp_f = minimal_displacement(&space, &f, &cfg).unwrap();
        let disp_g = minimal_displacement(&space, &g, &cfg).unwrap();
        assert_eq!(disp_f.tau, disp_g.tau);
    }

    #[test]
    fn large_node_space_gets_a_subsampled_bound() {
        let n = 6000;
        let space = path_space(n);
        let f = node_shift(n);
        let cfg = DynamicsConfig::for_space(&space);
        let disp = minimal_displacement(&space, &f, &cfg).unwrap();
        assert_eq!(disp.tau, 1.0, "every node moves by exactly one edge");
        assert!(!disp.exhaustive && !disp.attained);
        let lb = disp.lower_bound.expect("subsampled scans certify a bound");
        assert!((0.0..=1.0).contains(&lb), "lower bound {lb}");
    }

    #[test]
    fn cylinder_powers_are_consistent() {
        let space = Space::flat_cylinder();
        let f = Map::cylinder_shift_flip(1.0);
        let cfg = cylinder_cfg(&space);
        let report = power_consistency(&space, &f, 3, Point::Xy(0.0, 1.0), &cfg).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!((report.rows[0].c - 1.0).abs() < 1e-12);
        assert!((report.rows[0].tau - (1.0 + PI * PI).sqrt()).abs() < 1e-9);
        // The square is a pure two-step translation.
        assert!((report.rows[1].c - 2.0).abs() < 1e-12);
        assert!((report.rows[1].tau - 2.0).abs() < 1e-9);
        assert!((report.rows[1].tau_over_n - 1.0).abs() < 1e-9);
        assert!(report.c_linear, "worst dev {}", report.worst_c_deviation);
        assert!(report.tau_square_consistent);
    }

    #[test]
    fn dilation_along_the_attracting_and_repelling_rays() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.5).unwrap();
        let toward_plus = GeodesicPath::ray(
            &space,
            Point::Xy(0.0, 0.0),
            &BoundaryTarget::DiskAngle(0.0),
            20.0,
            0.1,
        )
        .unwrap();
        let dil = dilation(&space, &f, Approach::Ray(&toward_plus), Point::Xy(0.0, 0.0)).unwrap();
        assert!(
            (dil.log_lambda + LN3).abs() < 1e-3,
            "attracting dilation log = {}, expected {}",
            dil.log_lambda,
            -LN3
        );
        assert!(dil.residual < 1e-3);

        let toward_minus = GeodesicPath::ray(
            &space,
            Point::Xy(0.0, 0.0),
            &BoundaryTarget::DiskAngle(PI),
            20.0,
            0.1,
        )
        .unwrap();
        let dil = dilation(&space, &f, Approach::Ray(&toward_minus), Point::Xy(0.0, 0.0)).unwrap();
        assert!(
            (dil.log_lambda - LN3).abs() < 1e-3,
            "repelling dilation log = {}",
            dil.log_lambda
        );
    }

    #[test]
    fn dilation_along_a_slab_sequence_is_exact() {
        let space = Space::l1_slab();
        let f = Map::slab_shift(1.0).unwrap();
        let seq: Vec<Point> = (0..30).map(|k| Point::Xy(k as f64, 0.0)).collect();
        let dil = dilation(
            &space,
            &f,
            Approach::Sequence(&seq),
            Point::Xy(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(dil.log_lambda, -1.0, "each image is one unit farther");
        assert_eq!(dil.residual, 0.0);
    }

    #[test]
    fn dilation_rejects_a_bounded_sequence() {
        let space = Space::l1_slab();
        let f = Map::slab_shift(1.0).unwrap();
        let seq: Vec<Point> = (0..30).map(|k| Point::Xy((k % 3) as f64, 0.0)).collect();
        let err = dilation(
            &space,
            &f,
            Approach::Sequence(&seq),
            Point::Xy(0.0, 0.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotDiverging { .. }), "got {err}");
    }

    #[test]
    fn attracting_direction_has_the_fixed_direction_property() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.5).unwrap();
        let cfg = DynamicsConfig::for_space(&space);
        let report = fixed_direction_check(
            &space,
            &f,
            &BoundaryTarget::DiskAngle(0.0),
            Point::Xy(0.0, 0.0),
            &[1.0, 2.0],
            &cfg,
        )
        .unwrap();
        assert!(report.holds, "probes: {:?}", report.probes);
        assert!((report.dilation.log_lambda + LN3).abs() < 1e-3);
        assert!(
            (report.lambda - (-LN3).exp()).abs() < 1e-3,
            "lambda = {}, expected 1/3",
            report.lambda
        );
        assert!(report.probes.iter().all(|p| p.checked > 0));
    }

    #[test]
    fn orthogonal_direction_fails_the_fixed_direction_property() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.5).unwrap();
        let cfg = DynamicsConfig::for_space(&space);
        let report = fixed_direction_check(
            &space,
            &f,
            &BoundaryTarget::DiskAngle(PI / 2.0),
            Point::Xy(0.0, 0.0),
            &[1.0, 2.0],
            &cfg,
        )
        .unwrap();
        assert!(
            !report.holds,
            "images near i drift toward +1; the direction is not fixed"
        );
        assert!(report
            .probes
            .iter()
            .any(|p| !p.images_converge && p.terminal_error > 0.5));
    }

    #[test]
    fn axis_uniqueness_probe_on_the_disk() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.5).unwrap();
        let cfg = DynamicsConfig::for_space(&space);
        let report = axis_uniqueness_probe(
            &space,
            &f,
            &[Point::Xy(0.0, 0.0), Point::Xy(0.1, 0.0)],
            &cfg,
        )
        .unwrap();
        assert_eq!(report.axes.len(), 2);
        assert!(
            report.max_separation < 1e-6,
            "separation {}",
            report.max_separation
        );
        assert!(report.unique);
    }

    #[test]
    fn full_analysis_of_the_cylinder_gap() {
        let space = Space::flat_cylinder();
        let f = Map::cylinder_shift_flip(1.0);
        let cfg = cylinder_cfg(&space);
        let report = analyze(&space, &f, Point::Xy(0.0, 0.3), &cfg).unwrap();
        assert_eq!(report.classification.class, MapClass::Hyperbolic);
        let tau_expect = (1.0 + PI * PI).sqrt();
        assert!((report.gap - (tau_expect - 1.0)).abs() < 1e-6);
        assert!(report.gap >= -cfg.tol_gap, "gap must not be meaningfully negative");
        match report.axis {
            AxisOutcome::Rejected { gap, .. } => {
                assert!((gap - (tau_expect - 1.0)).abs() < 1e-6);
            }
            ref other => panic!("gap map must have its axis rejected, got {other:?}"),
        }
        let lp = report.limit_point.expect("escaping orbits have a limit");
        assert_eq!(lp.target, BoundaryTarget::AxialEnd(true));
        assert!(lp.agree);
    }

    #[test]
    fn full_analysis_of_the_disk_translation() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.5).unwrap();
        let cfg = DynamicsConfig::for_space(&space);
        let report = analyze(&space, &f, Point::Xy(0.0, 0.0), &cfg).unwrap();
        assert_eq!(report.classification.class, MapClass::Hyperbolic);
        assert!(report.gap.abs() <= cfg.tol_gap);
        match report.axis {
            AxisOutcome::Built(ref axis) => {
                assert!(axis.invariance_defect < 1e-6);
            }
            ref other => panic!("expected a built axis, got {other:?}"),
        }
    }
}
