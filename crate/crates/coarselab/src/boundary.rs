//! Horofunctions, Busemann functions, horospheres, and the comparison
//! between ray classes and horofunction clusters.
//!
//! A horofunction is represented by its values on a finite landmark set,
//! normalized to vanish at a base point. Limits are replaced by
//! evaluation at the end of a finite sequence or ray, with a convergence
//! residual against the half-way evaluation reported alongside.

use crate::error::{Error, Result};
use crate::geodesics::{self, rim_noise, AsymptoticityParams, GeodesicPath};
use crate::numeric;
use crate::point::Point;
use crate::space::Space;

/// Landmarks are sampled within this distance of the base point.
pub const DEFAULT_LANDMARK_RADIUS: f64 = 5.0;

/// A finite point sequence must move at least this far from its first
/// element (and keep growing in its tail) to count as diverging.
pub const MIN_SEQUENCE_DIVERGENCE: f64 = 10.0;

/// How a horofunction sample was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Evaluated at the last element of a diverging point sequence.
    SequenceTail { length: usize },
    /// Evaluated at the endpoint of a truncated geodesic ray.
    Ray { horizon: f64 },
}

/// A horofunction seen through a landmark set: values of
/// d(x, w) - d(x, base) at the far anchor x, one value per landmark.
/// The base point is always landmark 0, so the normalization value 0
/// is stored explicitly.
#[derive(Debug, Clone)]
pub struct HorofunctionSample {
    landmarks: Vec<Point>,
    base: Point,
    values: Vec<f64>,
    pub provenance: Provenance,
    /// Largest change of any landmark value between the half-way and
    /// final evaluation anchors: how settled the limit looks.
    pub convergence_residual: f64,
}

impl HorofunctionSample {
    pub fn landmarks(&self) -> &[Point] {
        &self.landmarks
    }

    pub fn base(&self) -> Point {
        self.base
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at a landmark, by exact match.
    pub fn value_at(&self, landmark: Point) -> Option<f64> {
        self.landmarks
            .iter()
            .position(|&w| w == landmark)
            .map(|i| self.values[i])
    }
}

/// Evaluate d(anchor, w) - d(anchor, base) across the landmark list,
/// with the base prepended as landmark 0.
fn evaluate_at_anchor(
    space: &Space,
    anchor: Point,
    base: Point,
    landmarks: &[Point],
) -> Result<(Vec<Point>, Vec<f64>)> {
    let mut all = Vec::with_capacity(landmarks.len() + 1);
    all.push(base);
    all.extend(landmarks.iter().copied().filter(|&w| w != base));
    let to_base = space.distance(anchor, base)?;
    let mut values = Vec::with_capacity(all.len());
    for &w in &all {
        values.push(space.distance(anchor, w)? - to_base);
    }
    Ok((all, values))
}

pub(crate) fn check_diverging(space: &Space, seq: &[Point]) -> Result<()> {
    if seq.len() < 4 {
        return Err(Error::NotDiverging {
            max_distance: 0.0,
            required: MIN_SEQUENCE_DIVERGENCE,
        });
    }
    let x0 = seq[0];
    let mut dists = Vec::with_capacity(seq.len());
    for &x in seq {
        dists.push(space.distance(x0, x)?);
    }
    let half = dists.len() / 2;
    let head = dists[..half].iter().copied().fold(0.0f64, f64::max);
    let tail = dists[half..].iter().copied().fold(0.0f64, f64::max);
    if tail < MIN_SEQUENCE_DIVERGENCE || tail <= head {
        return Err(Error::NotDiverging {
            max_distance: tail.max(head),
            required: MIN_SEQUENCE_DIVERGENCE,
        });
    }
    Ok(())
}

/// Horofunction of a diverging point sequence: landmark values at the
/// last element, residual against the half-way element.
pub fn horofunction_from_sequence(
    space: &Space,
    seq: &[Point],
    base: Point,
    landmarks: &[Point],
) -> Result<HorofunctionSample> {
    let base = space.check_point(base)?;
    check_diverging(space, seq)?;
    let last = *seq.last().unwrap();
    let mid = seq[seq.len() / 2];
    let (all, values) = evaluate_at_anchor(space, last, base, landmarks)?;
    let (_, half_values) = evaluate_at_anchor(space, mid, base, landmarks)?;
    let residual = values
        .iter()
        .zip(&half_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(HorofunctionSample {
        landmarks: all,
        base,
        values,
        provenance: Provenance::SequenceTail { length: seq.len() },
        convergence_residual: residual,
    })
}

/// Busemann function of a ray: landmark values at the ray's endpoint,
/// residual against the half-horizon point. The path must pass the
/// geodesic test (up to the depth-dependent coordinate noise floor).
pub fn busemann(
    space: &Space,
    ray: &GeodesicPath,
    base: Point,
    landmarks: &[Point],
) -> Result<HorofunctionSample> {
    let base = space.check_point(base)?;
    let report = geodesics::is_geodesic(space, ray, 1e-6 + rim_noise(space, ray))?;
    if !report.passed {
        return Err(Error::NotAGeodesic {
            defect: report.worst_defect,
            t1: report.worst_pair.0,
            t2: report.worst_pair.1,
            tol: report.tolerance,
        });
    }
    let (t0, t1) = ray.domain();
    let horizon = t1;
    let (_, end) = ray.point_at(t1).ok_or(Error::IncompatiblePaths)?;
    let (_, mid) = ray
        .point_at(t0 + (t1 - t0) / 2.0)
        .ok_or(Error::IncompatiblePaths)?;
    let (all, values) = evaluate_at_anchor(space, end, base, landmarks)?;
    let (_, half_values) = evaluate_at_anchor(space, mid, base, landmarks)?;
    let residual = values
        .iter()
        .zip(&half_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(HorofunctionSample {
        landmarks: all,
        base,
        values,
        provenance: Provenance::Ray { horizon },
        convergence_residual: residual,
    })
}

/// Sup distance between two samples over their (identical) landmarks.
pub fn horofunction_distance(h1: &HorofunctionSample, h2: &HorofunctionSample) -> Result<f64> {
    if h1.base != h2.base || h1.landmarks != h2.landmarks {
        return Err(Error::LandmarkMismatch);
    }
    Ok(h1
        .values
        .iter()
        .zip(&h2.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Default landmark set: points within `DEFAULT_LANDMARK_RADIUS` of the
/// base, drawn from the space's seeded sampler.
pub fn default_landmarks(space: &Space, base: Point, seed: u64) -> Result<Vec<Point>> {
    let base = space.check_point(base)?;
    let want = crate::DEFAULT_LANDMARKS;
    let stream = space.sample_points(20 * want, seed);
    let mut out = Vec::with_capacity(want);
    for w in stream {
        if out.len() == want {
            break;
        }
        if space.distance(base, w)? <= DEFAULT_LANDMARK_RADIUS && !out.contains(&w) {
            out.push(w);
        }
    }
    Ok(out)
}

/// One boundary direction for the compactification comparison: a ray,
/// plus any number of diverging sequences meant to approach the same
/// point at infinity.
#[derive(Debug, Clone)]
pub struct Direction {
    pub ray: GeodesicPath,
    pub sequences: Vec<Vec<Point>>,
}

impl Direction {
    pub fn from_ray(ray: GeodesicPath) -> Direction {
        Direction {
            ray,
            sequences: Vec::new(),
        }
    }
}

/// Verdict for one pair of directions in the comparison.
#[derive(Debug, Clone, Copy)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub same_ray_class: bool,
    /// Sup distance between the two directions' Busemann samples.
    pub horofunction_distance: f64,
    /// Distinct ray classes got distinct horofunctions (separation
    /// above the cluster tolerance). Present only for distinct classes.
    pub injective: Option<bool>,
    /// Same ray class stayed one horofunction (distance within the
    /// cluster tolerance). Present only for equal classes.
    pub well_defined: Option<bool>,
}

/// Cross-tabulation of ray-asymptoticity classes against horofunction
/// clusters for a family of directions.
#[derive(Debug, Clone)]
pub struct CompactificationReport {
    /// Asymptoticity class of each direction, ids in first-seen order.
    pub ray_class: Vec<usize>,
    pub n_ray_classes: usize,
    /// All horofunction samples: each direction's Busemann sample first,
    /// then its sequence samples, in direction order.
    pub samples: Vec<HorofunctionSample>,
    /// Direction index of each sample.
    pub sample_direction: Vec<usize>,
    /// Cluster id of each sample, ids in first-seen order.
    pub cluster: Vec<usize>,
    pub n_clusters: usize,
    pub verdicts: Vec<PairVerdict>,
    pub tol_cluster: f64,
}

/// Compare the ray picture with the horofunction picture: rays are
/// grouped by asymptoticity, samples by sup-distance clustering, and
/// each direction pair gets an injectivity or well-definedness verdict.
pub fn compactification_compare(
    space: &Space,
    directions: &[Direction],
    base: Point,
    landmarks: &[Point],
    tol_cluster: f64,
    params: &AsymptoticityParams,
) -> Result<CompactificationReport> {
    if directions.is_empty() {
        return Err(Error::config("need at least one direction to compare"));
    }
    let n = directions.len();

    // Asymptoticity classes via union-find over ray pairs.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let profile =
                geodesics::asymptoticity(space, &directions[i].ray, &directions[j].ray, params)?;
            if profile.asymptotic {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut class_ids: Vec<usize> = Vec::new();
    let mut ray_class = vec![0usize; n];
    for (i, class) in ray_class.iter_mut().enumerate() {
        let root = find(&mut parent, i);
        *class = match class_ids.iter().position(|&r| r == root) {
            Some(pos) => pos,
            None => {
                class_ids.push(root);
                class_ids.len() - 1
            }
        };
    }

    // Horofunction samples: Busemann of each ray, then the sequences.
    let mut samples = Vec::new();
    let mut sample_direction = Vec::new();
    let mut busemann_idx = vec![0usize; n];
    for (i, dir) in directions.iter().enumerate() {
        busemann_idx[i] = samples.len();
        samples.push(busemann(space, &dir.ray, base, landmarks)?);
        sample_direction.push(i);
        for seq in &dir.sequences {
            samples.push(horofunction_from_sequence(space, seq, base, landmarks)?);
            sample_direction.push(i);
        }
    }

    // Greedy clustering against cluster representatives in sample order.
    let mut reps: Vec<usize> = Vec::new();
    let mut cluster = vec![0usize; samples.len()];
    for s in 0..samples.len() {
        let mut assigned = None;
        for (cid, &rep) in reps.iter().enumerate() {
            if horofunction_distance(&samples[s], &samples[rep])? <= tol_cluster {
                assigned = Some(cid);
                break;
            }
        }
        cluster[s] = match assigned {
            Some(cid) => cid,
            None => {
                reps.push(s);
                reps.len() - 1
            }
        };
    }

    let mut verdicts = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = horofunction_distance(&samples[busemann_idx[i]], &samples[busemann_idx[j]])?;
            let same = ray_class[i] == ray_class[j];
            verdicts.push(PairVerdict {
                i,
                j,
                same_ray_class: same,
                horofunction_distance: d,
                injective: (!same).then_some(d > tol_cluster),
                well_defined: same.then_some(d <= tol_cluster),
            });
        }
    }

    Ok(CompactificationReport {
        ray_class,
        n_ray_classes: class_ids.len(),
        samples,
        sample_direction,
        cluster,
        n_clusters: reps.len(),
        verdicts,
        tol_cluster,
    })
}

/// Which horosphere the membership test targets: the big horosphere uses
/// the lower limit of the anchored distances, the small one the upper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorosphereMode {
    Big,
    Small,
}

/// Outcome of a horosphere membership test.
#[derive(Debug, Clone, Copy)]
pub struct HorosphereVerdict {
    pub member: bool,
    /// Tail statistic of d(z, w_n) - d(w_n, base): min over the last
    /// half in Big mode, max in Small mode.
    pub value: f64,
    /// log R.
    pub threshold: f64,
    /// threshold - value; positive means member, with room to spare.
    pub margin: f64,
    /// Least-squares slope of the anchored distances over the tail; a
    /// value near zero means the finite surrogate has settled.
    pub trend_slope: f64,
    pub mode: HorosphereMode,
}

/// Does z lie inside the horosphere of level R at the boundary point the
/// sequence approaches? Membership is the strict inequality
/// (tail statistic) < log R.
pub fn horosphere_membership(
    space: &Space,
    z: Point,
    seq: &[Point],
    radius: f64,
    base: Point,
    mode: HorosphereMode,
) -> Result<HorosphereVerdict> {
    if radius <= 0.0 || radius.is_nan() {
        return Err(Error::config("horosphere level R must be positive"));
    }
    let z = space.check_point(z)?;
    let base = space.check_point(base)?;
    check_diverging(space, seq)?;
    let mut anchored = Vec::with_capacity(seq.len());
    for &w in seq {
        anchored.push(space.distance(z, w)? - space.distance(w, base)?);
    }
    let half = anchored.len() / 2;
    let tail = &anchored[half..];
    let value = match mode {
        HorosphereMode::Big => tail.iter().copied().fold(f64::INFINITY, f64::min),
        HorosphereMode::Small => tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    let ts: Vec<f64> = (0..anchored.len()).map(|k| k as f64).collect();
    let trend_slope = numeric::least_squares_slope(&ts[half..], tail);
    let threshold = radius.ln();
    Ok(HorosphereVerdict {
        member: value < threshold,
        value,
        threshold,
        margin: threshold - value,
        trend_slope,
        mode,
    })
}
