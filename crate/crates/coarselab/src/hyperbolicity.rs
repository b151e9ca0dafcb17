//! Hyperbolicity-constant estimators: slim triangles and the four-point
//! condition.
//!
//! Both estimators are sampled maxima, so they are lower bounds on the
//! true constant; slim-triangle values additionally live on the sample
//! grid of the sides and carry a half-step resolution slack. Every report
//! stores a witness configuration that reproduces its value when
//! re-evaluated.

use crate::error::{Error, Result};
use crate::geodesics::GeodesicPath;
use crate::point::Point;
use crate::space::Space;
use rayon::prelude::*;

/// Exhaustive four-point enumeration is attempted up to this node count;
/// beyond it quadruples are sampled from a landmark pool.
pub const EXHAUSTIVE_NODE_CUTOFF: usize = 150;

/// Landmark pool size for sampled four-point runs on discrete spaces.
const FOUR_POINT_POOL: usize = 80;

/// Point on one triangle side realizing the slim-triangle maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct SlimWitness {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    /// Which side the witness sample lies on: 0 = [a,b], 1 = [b,c],
    /// 2 = [c,a].
    pub side: usize,
    /// Arc-length parameter of the witness sample along that side.
    pub t: f64,
    pub point: Point,
}

/// Quadruple realizing the four-point maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct FourPointWitness {
    pub points: [Point; 4],
}

/// Result of a hyperbolicity estimate. Each estimator fills its own
/// field; a report produced by one op leaves the other side empty.
#[derive(Debug, Clone)]
pub struct DeltaReport {
    pub delta_slim: Option<f64>,
    pub delta_four_point: Option<f64>,
    pub triangles_sampled: usize,
    pub quadruples_sampled: usize,
    pub slim_witness: Option<SlimWitness>,
    pub four_point_witness: Option<FourPointWitness>,
    /// Half the coarsest sample spacing entering a slim estimate: the
    /// reported maximum may understate the true one by about this much.
    pub resolution_slack: f64,
    /// Whether the four-point run enumerated every node quadruple.
    pub exhaustive: bool,
    pub seed: u64,
}

/// Slim-triangle estimate: over sampled triangles, the largest distance
/// from a sample on one side to the union of the other two sides.
///
/// Sampled maxima only ever grow with more triangles: for a fixed seed
/// the first `n` triangles are a prefix of any longer run.
pub fn slim_triangle_delta(
    space: &Space,
    n_triangles: usize,
    dt: f64,
    seed: u64,
) -> Result<DeltaReport> {
    if n_triangles == 0 {
        return Err(Error::config("n_triangles must be at least 1"));
    }
    if dt <= 0.0 || dt.is_nan() {
        return Err(Error::config("sample spacing must be positive"));
    }
    let triangles = sample_triangles(space, n_triangles, dt, seed)?;
    let evaluated: Result<Vec<(f64, SlimWitness, f64)>> = triangles
        .par_iter()
        .map(|&(a, b, c)| slim_delta_of_triangle(space, a, b, c, dt))
        .collect();
    let evaluated = evaluated?;
    let mut best: Option<(f64, SlimWitness)> = None;
    let mut slack = 0.0f64;
    for (delta, wit, s) in evaluated {
        slack = slack.max(s);
        if best.as_ref().map(|(d, _)| delta > *d).unwrap_or(true) {
            best = Some((delta, wit));
        }
    }
    let (delta, witness) = best.ok_or_else(|| {
        Error::config("no admissible triangles found in the sample stream")
    })?;
    Ok(DeltaReport {
        delta_slim: Some(delta),
        delta_four_point: None,
        triangles_sampled: triangles.len(),
        quadruples_sampled: 0,
        slim_witness: Some(witness),
        four_point_witness: None,
        resolution_slack: slack,
        exhaustive: false,
        seed,
    })
}

/// Slim-triangle value of one explicit triangle, with the witness sample
/// and the half-spacing resolution slack.
pub fn slim_delta_of_triangle(
    space: &Space,
    a: Point,
    b: Point,
    c: Point,
    dt: f64,
) -> Result<(f64, SlimWitness, f64)> {
    let sides = [
        GeodesicPath::segment(space, a, b, dt)?,
        GeodesicPath::segment(space, b, c, dt)?,
        GeodesicPath::segment(space, c, a, dt)?,
    ];
    let slack = sides.iter().map(|s| s.step()).fold(0.0, f64::max) / 2.0;
    let mut best = f64::NEG_INFINITY;
    let mut witness = SlimWitness {
        a,
        b,
        c,
        side: 0,
        t: 0.0,
        point: sides[0].start(),
    };
    // Warm-started argmin per (from-side, to-side) pair: consecutive
    // samples have nearby closest points, and a scan gives up as soon as
    // its running minimum can no longer beat the current maximum.
    let mut warm = [[0usize; 3]; 3];
    for i in 0..3 {
        for &(t, p) in sides[i].samples() {
            let mut m = f64::INFINITY;
            let mut pruned = false;
            for j in [(i + 1) % 3, (i + 2) % 3] {
                let (mj, arg, complete) =
                    outward_min(space, p, sides[j].samples(), warm[i][j], best.max(0.0))?;
                warm[i][j] = arg;
                m = m.min(mj);
                if !complete || m <= best {
                    pruned = true;
                    break;
                }
            }
            if !pruned && m > best {
                best = m;
                witness = SlimWitness {
                    a,
                    b,
                    c,
                    side: i,
                    t,
                    point: p,
                };
            }
        }
    }
    Ok((best.max(0.0), witness, slack))
}

/// Minimum distance from `p` to the sample points, scanning outward from
/// `start` and giving up once the running minimum drops to `floor` (the
/// caller's current maximum, which such a point can no longer raise).
/// Returns (min, argmin, whether the scan covered every sample).
fn outward_min(
    space: &Space,
    p: Point,
    samples: &[(f64, Point)],
    start: usize,
    floor: f64,
) -> Result<(f64, usize, bool)> {
    let n = samples.len();
    let start = start.min(n - 1);
    let mut best = f64::INFINITY;
    let mut arg = start;
    let mut down = start as isize;
    let mut up = start as isize + 1;
    while down >= 0 || (up as usize) < n {
        for idx in [down, up] {
            if idx < 0 || idx as usize >= n || (idx == up && idx == down) {
                continue;
            }
            let d = space.distance(p, samples[idx as usize].1)?;
            if d < best {
                best = d;
                arg = idx as usize;
            }
        }
        if best <= floor {
            return Ok((best, arg, false));
        }
        down -= 1;
        up += 1;
    }
    Ok((best, arg, true))
}

fn sample_triangles(
    space: &Space,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<Vec<(Point, Point, Point)>> {
    let stream = space.sample_points(30 * n, seed);
    let min_sep = dt.clamp(1e-9, 1e-3);
    let mut out = Vec::with_capacity(n);
    for triple in stream.chunks(3) {
        if out.len() == n || triple.len() < 3 {
            break;
        }
        let (a, b, c) = (triple[0], triple[1], triple[2]);
        let ok = space.distance(a, b)? > min_sep
            && space.distance(b, c)? > min_sep
            && space.distance(c, a)? > min_sep;
        if ok {
            out.push((a, b, c));
        }
    }
    if out.is_empty() {
        return Err(Error::config(
            "no admissible triangles found in the sample stream",
        ));
    }
    Ok(out)
}

/// Four-point estimate: over quadruples (w, x, y, z), half the gap
/// between the two largest of the three pair-sums
/// d(w,x)+d(y,z), d(w,y)+d(x,z), d(w,z)+d(x,y).
///
/// Discrete spaces with at most `EXHAUSTIVE_NODE_CUTOFF` nodes are
/// enumerated completely (the requested count is ignored); larger
/// discrete spaces draw quadruples from a seeded landmark pool, and
/// closed-form spaces draw points directly.
pub fn four_point_delta(space: &Space, n_quadruples: usize, seed: u64) -> Result<DeltaReport> {
    if n_quadruples == 0 {
        return Err(Error::config("n_quadruples must be at least 1"));
    }
    let (delta, witness, count, exhaustive) = match space.node_count() {
        Some(n) if n <= EXHAUSTIVE_NODE_CUTOFF => exhaustive_four_point(space, n)?,
        Some(n) => pooled_four_point(space, n, n_quadruples, seed)?,
        None => sampled_four_point(space, n_quadruples, seed)?,
    };
    Ok(DeltaReport {
        delta_slim: None,
        delta_four_point: Some(delta),
        triangles_sampled: 0,
        quadruples_sampled: count,
        slim_witness: None,
        four_point_witness: Some(witness),
        resolution_slack: 0.0,
        exhaustive,
        seed,
    })
}

/// Four-point defect of one explicit quadruple.
pub fn four_point_defect(space: &Space, points: &[Point; 4]) -> Result<f64> {
    let [w, x, y, z] = *points;
    let sums = [
        space.distance(w, x)? + space.distance(y, z)?,
        space.distance(w, y)? + space.distance(x, z)?,
        space.distance(w, z)? + space.distance(x, y)?,
    ];
    Ok(defect_of_sums(sums))
}

fn defect_of_sums(mut sums: [f64; 3]) -> f64 {
    sums.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (sums[0] - sums[1]) / 2.0
}

fn defect_from_matrix(d: &[f64], n: usize, q: [usize; 4]) -> f64 {
    let [i, j, k, l] = q;
    defect_of_sums([
        d[i * n + j] + d[k * n + l],
        d[i * n + k] + d[j * n + l],
        d[i * n + l] + d[j * n + k],
    ])
}

fn distance_matrix(space: &Space, nodes: &[usize]) -> Result<Vec<f64>> {
    let g = space.graph_model().unwrap();
    let m = nodes.len();
    let mut d = vec![0.0f64; m * m];
    for (row, &s) in nodes.iter().enumerate() {
        let sweep = g.sweep_from(s);
        for (col, &t) in nodes.iter().enumerate() {
            d[row * m + col] = sweep.dist[t];
        }
    }
    Ok(d)
}

fn exhaustive_four_point(
    space: &Space,
    n: usize,
) -> Result<(f64, FourPointWitness, usize, bool)> {
    let all: Vec<usize> = (0..n).collect();
    let d = distance_matrix(space, &all)?;
    let per_i: Vec<(f64, [usize; 4])> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = f64::NEG_INFINITY;
            let mut arg = [i, 0, 0, 0];
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in (k + 1)..n {
                        let v = defect_from_matrix(&d, n, [i, j, k, l]);
                        if v > best {
                            best = v;
                            arg = [i, j, k, l];
                        }
                    }
                }
            }
            (best, arg)
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut arg = [0usize; 4];
    for (v, q) in per_i {
        if v > best {
            best = v;
            arg = q;
        }
    }
    let count = n * (n - 1) * (n - 2) * (n - 3) / 24;
    Ok((
        best.max(0.0),
        FourPointWitness {
            points: arg.map(Point::Node),
        },
        count,
        true,
    ))
}

fn pooled_four_point(
    space: &Space,
    node_count: usize,
    n_quadruples: usize,
    seed: u64,
) -> Result<(f64, FourPointWitness, usize, bool)> {
    use rand::Rng;
    use rand::SeedableRng;
    let pool_size = FOUR_POINT_POOL.min(node_count);
    let pool: Vec<usize> = space
        .sample_points(pool_size, seed)
        .into_iter()
        .map(|p| p.node().unwrap())
        .collect();
    let m = pool.len();
    let d = distance_matrix(space, &pool)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x4f50_4f4c);
    let mut best = f64::NEG_INFINITY;
    let mut arg = [0usize; 4];
    for _ in 0..n_quadruples {
        let mut q = [0usize; 4];
        let mut filled = 0;
        while filled < 4 {
            let cand = rng.random_range(0..m);
            if !q[..filled].contains(&cand) {
                q[filled] = cand;
                filled += 1;
            }
        }
        let v = defect_from_matrix(&d, m, q);
        if v > best {
            best = v;
            arg = q;
        }
    }
    Ok((
        best.max(0.0),
        FourPointWitness {
            points: arg.map(|i| Point::Node(pool[i])),
        },
        n_quadruples,
        false,
    ))
}

fn sampled_four_point(
    space: &Space,
    n_quadruples: usize,
    seed: u64,
) -> Result<(f64, FourPointWitness, usize, bool)> {
    let stream = space.sample_points(4 * n_quadruples, seed);
    let mut best = f64::NEG_INFINITY;
    let mut arg = [stream[0]; 4];
    for quad in stream.chunks_exact(4) {
        let q = [quad[0], quad[1], quad[2], quad[3]];
        let v = four_point_defect(space, &q)?;
        if v > best {
            best = v;
            arg = q;
        }
    }
    Ok((
        best.max(0.0),
        FourPointWitness { points: arg },
        n_quadruples,
        false,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    /// Random tree with integer weights: distances are exact integers,
    /// so tree identities hold to the last bit.
    fn random_tree(nodes: usize, seed: u64) -> Space {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<(usize, usize, f64)> = (1..nodes)
            .map(|i| {
                let parent = rng.random_range(0..i);
                let w = rng.random_range(1..=5) as f64;
                (parent, i, w)
            })
            .collect();
        Space::graph(nodes, &edges).unwrap()
    }

    #[test]
    fn trees_are_zero_slim_exactly() {
        let space = random_tree(100, 7);
        let report = slim_triangle_delta(&space, 20, 1.0, 11).unwrap();
        assert_eq!(report.delta_slim, Some(0.0));
        assert_eq!(report.triangles_sampled, 20);
    }

    #[test]
    fn near_ideal_disk_triangle_matches_the_curvature_bound() {
        let space = Space::poincare_disk();
        let r = 0.999;
        let third = std::f64::consts::TAU / 3.0;
        let (delta, _, slack) = slim_delta_of_triangle(
            &space,
            Point::Xy(r, 0.0),
            Point::Xy(r * third.cos(), r * third.sin()),
            Point::Xy(r * third.cos(), -r * third.sin()),
            0.1,
        )
        .unwrap();
        let ideal = (1.0 + 2.0f64.sqrt()).ln();
        assert!(
            delta <= ideal + 0.05 && delta >= 0.5,
            "near-ideal triangle delta {delta}, ideal bound {ideal}"
        );
        assert!((slack - 0.05).abs() < 1e-12);
    }

    #[test]
    fn random_disk_triangles_stay_under_the_ideal_bound() {
        let space = Space::poincare_disk();
        let report = slim_triangle_delta(&space, 50, 0.1, 3).unwrap();
        let delta = report.delta_slim.unwrap();
        let ideal = (1.0 + 2.0f64.sqrt()).ln();
        assert!(
            delta <= ideal + 0.05,
            "disk delta {delta} above ideal bound {ideal}"
        );
        assert!(delta >= 0.3, "50 random triangles should land some mass: {delta}");
    }

    #[test]
    fn more_triangles_never_lower_the_estimate() {
        let space = Space::poincare_disk();
        let small = slim_triangle_delta(&space, 20, 0.1, 3).unwrap();
        let large = slim_triangle_delta(&space, 40, 0.1, 3).unwrap();
        assert!(large.delta_slim.unwrap() >= small.delta_slim.unwrap());
    }

    #[test]
    fn slim_witness_replays_to_the_reported_value() {
        let space = Space::poincare_disk();
        let report = slim_triangle_delta(&space, 30, 0.1, 5).unwrap();
        let w = report.slim_witness.unwrap();
        let (replayed, _, _) = slim_delta_of_triangle(&space, w.a, w.b, w.c, 0.1).unwrap();
        assert_eq!(Some(replayed), report.delta_slim);
    }

    #[test]
    fn slim_reports_are_deterministic() {
        let space = Space::poincare_disk();
        let one = slim_triangle_delta(&space, 25, 0.1, 9).unwrap();
        let two = slim_triangle_delta(&space, 25, 0.1, 9).unwrap();
        assert_eq!(one.delta_slim, two.delta_slim);
        assert_eq!(one.slim_witness, two.slim_witness);
    }

    #[test]
    fn path_graph_four_point_is_zero_exactly() {
        let edges: Vec<(usize, usize, f64)> = (0..11).map(|i| (i, i + 1, 1.0)).collect();
        let space = Space::graph(12, &edges).unwrap();
        let report = four_point_delta(&space, 1, 0).unwrap();
        assert_eq!(report.delta_four_point, Some(0.0));
        assert!(report.exhaustive);
        assert_eq!(report.quadruples_sampled, 495);
    }

    #[test]
    fn slab_quadruple_with_defect_two() {
        let space = Space::l1_slab();
        let defect = four_point_defect(
            &space,
            &[
                Point::Xy(0.0, 1.0),
                Point::Xy(0.0, -1.0),
                Point::Xy(10.0, 1.0),
                Point::Xy(10.0, -1.0),
            ],
        )
        .unwrap();
        assert_eq!(defect, 2.0);
    }

    #[test]
    fn sampled_slab_defects_stay_bounded_by_two() {
        let space = Space::l1_slab();
        let report = four_point_delta(&space, 2000, 42).unwrap();
        let delta = report.delta_four_point.unwrap();
        assert!(delta <= 2.0 + 1e-9, "slab four-point delta {delta}");
        assert!(!report.exhaustive);
    }

    #[test]
    fn exhaustive_tree_four_point_is_zero() {
        let space = random_tree(60, 13);
        let report = four_point_delta(&space, 1, 0).unwrap();
        assert_eq!(report.delta_four_point, Some(0.0));
        assert!(report.exhaustive);
        assert_eq!(report.quadruples_sampled, 60 * 59 * 58 * 57 / 24);
    }

    #[test]
    fn four_point_witness_replays_exactly() {
        let space = Space::poincare_disk();
        let report = four_point_delta(&space, 500, 17).unwrap();
        let w = report.four_point_witness.unwrap();
        let replayed = four_point_defect(&space, &w.points).unwrap();
        assert_eq!(Some(replayed), report.delta_four_point);
    }

    #[test]
    fn doubling_weights_doubles_both_estimates_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let n = 40;
        let mut edges: Vec<(usize, usize, f64)> = (1..n)
            .map(|i| (rng.random_range(0..i), i, rng.random_range(1..=9) as f64))
            .collect();
        edges.push((0, n - 1, 3.0));
        edges.push((5, 20, 2.0));
        let doubled: Vec<(usize, usize, f64)> =
            edges.iter().map(|&(a, b, w)| (a, b, 2.0 * w)).collect();
        let one = Space::graph(n, &edges).unwrap();
        let two = Space::graph(n, &doubled).unwrap();

        let slim1 = slim_triangle_delta(&one, 15, 1.0, 3).unwrap();
        let slim2 = slim_triangle_delta(&two, 15, 1.0, 3).unwrap();
        assert_eq!(
            slim2.delta_slim.unwrap(),
            2.0 * slim1.delta_slim.unwrap(),
            "slim estimate must scale with the metric"
        );

        let four1 = four_point_delta(&one, 1, 0).unwrap();
        let four2 = four_point_delta(&two, 1, 0).unwrap();
        assert_eq!(
            four2.delta_four_point.unwrap(),
            2.0 * four1.delta_four_point.unwrap(),
            "four-point estimate must scale with the metric"
        );
    }

    #[test]
    fn zero_counts_are_rejected() {
        let space = Space::poincare_disk();
        assert!(slim_triangle_delta(&space, 0, 0.1, 0).is_err());
        assert!(four_point_delta(&space, 0, 0).is_err());
    }
}
