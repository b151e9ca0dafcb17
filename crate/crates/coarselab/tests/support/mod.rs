//! Shared fixtures and randomized-property runners for the integration
//! test binaries. Lives in a subdirectory so cargo does not compile it
//! as a test target of its own; each binary pulls it in with a `#[path]`
//! module declaration and uses the parts it needs.
#![allow(dead_code)]

use coarselab::boundary::{busemann, default_landmarks};
use coarselab::geodesics::{is_geodesic, GeodesicPath};
use coarselab::point::{BoundaryTarget, Point};
use coarselab::space::{Space, SpaceKind};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random tree on `n` nodes with unit edge weights: node `i` attaches to
/// a uniformly random earlier node. Unit weights keep every pairwise
/// distance an exact integer, so four-point defects vanish exactly.
pub fn random_tree(n: usize, seed: u64) -> Space {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n - 1);
    for i in 1..n {
        let parent = rng.random_range(0..i);
        edges.push((parent, i, 1.0));
    }
    Space::graph(n, &edges).expect("tree edges are valid")
}

/// Axis-aligned `w x h` lattice graph with unit edge weights: the flat
/// grid whose thick geodesic triangles keep the slimness constant large.
pub fn lattice_graph(w: usize, h: usize) -> Space {
    let node = |i: usize, j: usize| j * w + i;
    let mut edges = Vec::new();
    for j in 0..h {
        for i in 0..w {
            if i + 1 < w {
                edges.push((node(i, j), node(i + 1, j), 1.0));
            }
            if j + 1 < h {
                edges.push((node(i, j), node(i, j + 1), 1.0));
            }
        }
    }
    Space::graph(w * h, &edges).expect("lattice edges are valid")
}

/// The four closed-form model spaces, with short labels for messages.
pub fn closed_form_spaces() -> Vec<(&'static str, Space)> {
    vec![
        ("poincare_disk", Space::poincare_disk()),
        ("hyperbolic_strip", Space::hyperbolic_strip()),
        ("flat_cylinder", Space::flat_cylinder()),
        ("l1_slab", Space::l1_slab()),
    ]
}

/// A point every model space accepts as a base.
pub fn origin() -> Point {
    Point::Xy(0.0, 0.0)
}

/// Worst-case violations of the metric axioms over random triples.
pub struct MetricWorsts {
    pub trials: usize,
    pub identity: f64,
    pub symmetry: f64,
    pub triangle: f64,
}

/// Sample `trials` random triples and record the largest violation of
/// d(a,a)=0, symmetry, and the triangle inequality.
pub fn metric_worsts(space: &Space, trials: usize, seed: u64) -> MetricWorsts {
    let pts = space.sample_points(3 * trials, seed);
    let mut worst = MetricWorsts {
        trials,
        identity: 0.0,
        symmetry: 0.0,
        triangle: 0.0,
    };
    for chunk in pts.chunks_exact(3) {
        let (a, b, c) = (chunk[0], chunk[1], chunk[2]);
        let dab = space.distance(a, b).unwrap();
        let dba = space.distance(b, a).unwrap();
        let dbc = space.distance(b, c).unwrap();
        let dac = space.distance(a, c).unwrap();
        let daa = space.distance(a, a).unwrap();
        assert!(
            dab.is_finite() && dbc.is_finite() && dac.is_finite(),
            "distances must be finite on connected spaces"
        );
        assert!(dab >= 0.0 && dbc >= 0.0 && dac >= 0.0, "negative distance");
        worst.identity = worst.identity.max(daa.abs());
        worst.symmetry = worst.symmetry.max((dab - dba).abs());
        worst.triangle = worst.triangle.max(dac - dab - dbc);
    }
    worst
}

/// Build random segments no longer than `max_len` and verify each passes
/// the geodesic test. The length cap keeps conformal-model endpoints out
/// of the depth regime where coordinate conditioning, not geometry,
/// dominates the defect; pass infinity to disable it. Returns the
/// largest interior defect seen and the number of segments checked.
pub fn segment_worst_defect(
    space: &Space,
    trials: usize,
    max_len: f64,
    step: f64,
    tol: f64,
    seed: u64,
) -> (f64, usize) {
    let pts = space.sample_points(8 * trials, seed);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for chunk in pts.chunks_exact(2) {
        if checked == trials {
            break;
        }
        if space.distance(chunk[0], chunk[1]).unwrap() > max_len {
            continue;
        }
        let path = GeodesicPath::segment(space, chunk[0], chunk[1], step).unwrap();
        let report = is_geodesic(space, &path, tol).unwrap();
        assert!(
            report.passed,
            "segment failed the geodesic test: defect {:.3e} at ({:.3}, {:.3}), tol {:.3e}",
            report.worst_defect, report.worst_pair.0, report.worst_pair.1, report.tolerance
        );
        worst = worst.max(report.worst_defect);
        checked += 1;
    }
    (worst, checked)
}

/// A boundary direction the space supports, drawn at random.
pub fn random_direction(space: &Space, rng: &mut ChaCha8Rng) -> BoundaryTarget {
    match space.kind() {
        SpaceKind::PoincareDisk => {
            BoundaryTarget::DiskAngle(rng.random_range(0.0..std::f64::consts::TAU))
        }
        SpaceKind::L1Slab => BoundaryTarget::AxialEnd(true),
        _ => BoundaryTarget::AxialEnd(rng.random_bool(0.5)),
    }
}

/// Worst-case horofunction diagnostics over random rays.
pub struct HoroWorsts {
    pub samples: usize,
    /// Largest |h(base)| seen; the normalization pins it to 0.
    pub base_offset: f64,
    /// Largest positive part of |h(x) - h(y)| - d(x, y) over landmark pairs.
    pub lipschitz_excess: f64,
}

/// Sample rays toward random boundary directions, take their horofunctions,
/// and measure normalization at the base and the 1-Lipschitz bound over
/// every landmark pair.
pub fn horofunction_worsts(
    space: &Space,
    trials: usize,
    horizon: f64,
    step: f64,
    seed: u64,
) -> HoroWorsts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = origin();
    let landmarks = default_landmarks(space, base, seed).unwrap();
    let starts = space.sample_points(trials, seed ^ 0x5a5a);
    let mut worst = HoroWorsts {
        samples: 0,
        base_offset: 0.0,
        lipschitz_excess: 0.0,
    };
    for start in starts {
        let target = random_direction(space, &mut rng);
        let ray = GeodesicPath::ray(space, start, &target, horizon, step).unwrap();
        let sample = busemann(space, &ray, base, &landmarks).unwrap();
        let at_base = sample
            .value_at(sample.base())
            .expect("base is always a landmark");
        worst.base_offset = worst.base_offset.max(at_base.abs());
        let ls = sample.landmarks();
        let vs = sample.values();
        for i in 0..ls.len() {
            for j in (i + 1)..ls.len() {
                let d = space.distance(ls[i], ls[j]).unwrap();
                worst.lipschitz_excess = worst.lipschitz_excess.max((vs[i] - vs[j]).abs() - d);
            }
        }
        worst.samples += 1;
    }
    worst
}

/// Largest deviation, relative to its allowance, of the base-point
/// independence property: horofunctions of one direction taken from two
/// bases — and anchored at two different depths along the ray — differ
/// by a constant, up to twice the convergence residuals. Returns the
/// worst ratio deviation / allowance over `trials` random rays.
pub fn busemann_base_shift_ratio(
    space: &Space,
    trials: usize,
    horizon: f64,
    step: f64,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_p = origin();
    let landmarks = default_landmarks(space, base_p, seed).unwrap();
    let alt_bases = space.sample_points(trials, seed ^ 0x0ddba11);
    let starts = space.sample_points(trials, seed ^ 0x7e57);
    let mut worst_ratio = 0.0f64;
    for (start, base_q) in starts.into_iter().zip(alt_bases) {
        let target = random_direction(space, &mut rng);
        let ray_deep = GeodesicPath::ray(space, start, &target, horizon, step).unwrap();
        let ray_near = GeodesicPath::ray(space, start, &target, 0.6 * horizon, step).unwrap();
        let sample_p = busemann(space, &ray_deep, base_p, &landmarks).unwrap();
        let sample_q = busemann(space, &ray_near, base_q, &landmarks).unwrap();
        let diffs: Vec<f64> = landmarks
            .iter()
            .map(|&l| sample_p.value_at(l).unwrap() - sample_q.value_at(l).unwrap())
            .collect();
        let shift = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let dev = diffs
            .iter()
            .map(|d| (d - shift).abs())
            .fold(0.0f64, f64::max);
        let allowance =
            2.0 * (sample_p.convergence_residual + sample_q.convergence_residual) + 1e-9;
        worst_ratio = worst_ratio.max(dev / allowance);
    }
    worst_ratio
}
