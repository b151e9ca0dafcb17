//! Self-maps of the model spaces: the isometries used throughout the lab,
//! plus arbitrary user-supplied pointwise maps.
//!
//! Built-in kinds are closed under powers (and inverses where the map is
//! invertible on its space), which keeps iterated application exact: the
//! n-th power of a Mobius translation is evaluated as a single Mobius
//! transformation, not as n chained applications.
//!
//! `apply` returns `Ok(None)` when the image leaves the space. That is how
//! grid maps report stepping off the mask and how closed-form maps report
//! a point rounding onto the boundary; orbit routines treat it as a
//! truncation event, not an error.

use crate::error::{Error, Result};
use crate::point::Point;
use crate::space::{analytic, Space, SpaceKind};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// What a user-supplied map promises about itself. Built-in isometries get
/// both flags implicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MapClaims {
    pub exact_isometry: bool,
    pub nonexpanding: bool,
}

#[derive(Clone)]
pub enum Map {
    /// Disk automorphism z -> (z + a) / (1 + a z) with a real, |a| < 1.
    /// Hyperbolic for a != 0, with axis (-1, 1) and attracting fixed
    /// point +1 when a > 0.
    DiskMobius { a: f64 },
    /// Euclidean rotation of the disk about 0.
    DiskRotation { angle: f64 },
    /// Cylinder isometry (x, theta) -> (x + dx, theta + rot). The
    /// shift-flip has rot = pi: it advances one unit while rotating the
    /// circle halfway around.
    CylinderShiftRot { dx: f64, rot: f64 },
    /// Slab shift (x, y) -> (x + dx, y) with dx >= 0; an isometric
    /// embedding of the slab into itself.
    SlabShift { dx: f64 },
    /// Strip translation z -> z + dx.
    StripTranslate { dx: f64 },
    /// z -> conj(z) + shift when `conjugate` is set, else z -> z + shift.
    /// Acts on the strip and on strip-shaped grids whose mask and density
    /// are invariant under the reflection y -> -y and under unit
    /// horizontal translation.
    ConjTranslate { shift: f64, conjugate: bool },
    /// Node permutation of a graph space.
    GraphAutomorphism { perm: Arc<Vec<usize>> },
    /// Arbitrary pointwise map with caller-declared properties.
    UserPointwise {
        label: String,
        f: Arc<dyn Fn(Point) -> Option<Point> + Send + Sync>,
        claims: MapClaims,
    },
}

impl fmt::Debug for Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Map {
    pub fn disk_mobius(a: f64) -> Result<Map> {
        if a.abs() >= 1.0 || a.is_nan() {
            return Err(Error::config(format!(
                "disk-mobius parameter must satisfy |a| < 1, got {a}"
            )));
        }
        Ok(Map::DiskMobius { a })
    }

    pub fn disk_rotation(angle: f64) -> Map {
        Map::DiskRotation { angle }
    }

    pub fn cylinder_shift_flip(dx: f64) -> Map {
        Map::CylinderShiftRot { dx, rot: PI }
    }

    pub fn slab_shift(dx: f64) -> Result<Map> {
        if dx < 0.0 {
            return Err(Error::config(format!(
                "slab-shift must move toward +infinity, got dx = {dx}"
            )));
        }
        Ok(Map::SlabShift { dx })
    }

    pub fn strip_translate(dx: f64) -> Map {
        Map::StripTranslate { dx }
    }

    /// The reflect-and-step map z -> conj(z) + 1.
    pub fn conj_translate() -> Map {
        Map::ConjTranslate {
            shift: 1.0,
            conjugate: true,
        }
    }

    pub fn graph_automorphism(perm: Vec<usize>) -> Result<Map> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &img in &perm {
            if img >= n {
                return Err(Error::BadPermutation {
                    reason: format!("image {img} out of range 0..{n}"),
                });
            }
            if seen[img] {
                return Err(Error::BadPermutation {
                    reason: format!("image {img} repeated"),
                });
            }
            seen[img] = true;
        }
        Ok(Map::GraphAutomorphism {
            perm: Arc::new(perm),
        })
    }

    pub fn user(
        label: impl Into<String>,
        claims: MapClaims,
        f: impl Fn(Point) -> Option<Point> + Send + Sync + 'static,
    ) -> Map {
        Map::UserPointwise {
            label: label.into(),
            f: Arc::new(f),
            claims,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Map::DiskMobius { a } => format!("disk-mobius(a={a})"),
            Map::DiskRotation { angle } => format!("disk-rotation(angle={angle})"),
            Map::CylinderShiftRot { dx, rot } => {
                if (rot - PI).abs() < 1e-12 {
                    format!("cylinder-shift-flip(dx={dx})")
                } else {
                    format!("cylinder-shift-rot(dx={dx}, rot={rot})")
                }
            }
            Map::SlabShift { dx } => format!("slab-shift(dx={dx})"),
            Map::StripTranslate { dx } => format!("strip-translate(dx={dx})"),
            Map::ConjTranslate { shift, conjugate } => {
                if *conjugate {
                    format!("conj-translate(shift={shift})")
                } else {
                    format!("translate(shift={shift})")
                }
            }
            Map::GraphAutomorphism { perm } => {
                format!("graph-automorphism({} nodes)", perm.len())
            }
            Map::UserPointwise { label, .. } => format!("user-pointwise({label})"),
        }
    }

    /// Whether distances are preserved exactly (up to rounding) under this
    /// map on a compatible space.
    pub fn is_exact_isometry(&self) -> bool {
        match self {
            Map::UserPointwise { claims, .. } => claims.exact_isometry,
            _ => true,
        }
    }

    pub fn is_nonexpanding_claimed(&self) -> bool {
        match self {
            Map::UserPointwise { claims, .. } => claims.nonexpanding || claims.exact_isometry,
            _ => true,
        }
    }

    fn compatible(&self, kind: SpaceKind) -> bool {
        match self {
            Map::DiskMobius { .. } | Map::DiskRotation { .. } => kind == SpaceKind::PoincareDisk,
            Map::CylinderShiftRot { .. } => kind == SpaceKind::FlatCylinder,
            Map::SlabShift { .. } => kind == SpaceKind::L1Slab,
            Map::StripTranslate { .. } => kind == SpaceKind::HyperbolicStrip,
            Map::ConjTranslate { .. } => {
                kind == SpaceKind::HyperbolicStrip || kind == SpaceKind::ConformalGrid
            }
            Map::GraphAutomorphism { .. } => {
                kind == SpaceKind::Graph || kind == SpaceKind::ConformalGrid
            }
            Map::UserPointwise { .. } => true,
        }
    }

    /// Image of a point. `Ok(None)` means the image left the space (off
    /// the mask, past a grid window, or numerically on the boundary).
    pub fn apply(&self, space: &Space, p: Point) -> Result<Option<Point>> {
        if !self.compatible(space.kind()) {
            return Err(Error::MapSpaceMismatch {
                map: self.label(),
                kind: space.kind().name().to_string(),
            });
        }
        let p = space.check_point(p)?;
        let raw = match self {
            Map::DiskMobius { a } => {
                let (x, y) = p.xy().unwrap();
                let z = Complex64::new(x, y);
                let w = (z + a) / (Complex64::new(1.0, 0.0) + a * z);
                Some(Point::Xy(w.re, w.im))
            }
            Map::DiskRotation { angle } => {
                let (x, y) = p.xy().unwrap();
                let z = Complex64::new(x, y) * Complex64::from_polar(1.0, *angle);
                Some(Point::Xy(z.re, z.im))
            }
            Map::CylinderShiftRot { dx, rot } => {
                let (x, t) = p.xy().unwrap();
                Some(Point::Xy(x + dx, analytic::reduce_angle(t + rot)))
            }
            Map::SlabShift { dx } => {
                let (x, y) = p.xy().unwrap();
                Some(Point::Xy(x + dx, y))
            }
            Map::StripTranslate { dx } => {
                let (x, y) = p.xy().unwrap();
                Some(Point::Xy(x + dx, y))
            }
            Map::ConjTranslate { shift, conjugate } => match space.kind() {
                SpaceKind::HyperbolicStrip => {
                    let (x, y) = p.xy().unwrap();
                    Some(Point::Xy(x + shift, if *conjugate { -y } else { y }))
                }
                _ => {
                    let grid = space.grid_model().expect("compatible() admitted a grid");
                    let node = p.node().unwrap();
                    let (i, j) = grid.lattice_of(node);
                    let steps_f = shift / grid.spacing();
                    let steps = steps_f.round();
                    if (steps_f - steps).abs() > 1e-6 {
                        return Err(Error::MapSpaceMismatch {
                            map: self.label(),
                            kind: format!(
                                "grid with spacing {} (shift {} is not a whole number of cells)",
                                grid.spacing(),
                                shift
                            ),
                        });
                    }
                    let j2 = if *conjugate { -j } else { j };
                    grid.node_at(i + steps as i64, j2).map(Point::Node)
                }
            },
            Map::GraphAutomorphism { perm } => {
                let node = p.node().unwrap();
                if perm.len() != space.node_count().unwrap_or(0) {
                    return Err(Error::BadPermutation {
                        reason: format!(
                            "permutation acts on {} nodes but the space has {}",
                            perm.len(),
                            space.node_count().unwrap_or(0)
                        ),
                    });
                }
                Some(Point::Node(perm[node]))
            }
            Map::UserPointwise { f, .. } => f(p),
        };
        match raw {
            None => Ok(None),
            Some(q) => match space.check_point(q) {
                Ok(valid) => Ok(Some(valid)),
                Err(Error::PointOutsideSpace { .. }) => Ok(None),
                Err(other) => Err(other),
            },
        }
    }

    /// n-th forward power as a single map, exact for the built-in kinds.
    /// `n` must be at least 1.
    pub fn power(&self, n: u32) -> Map {
        assert!(n >= 1, "map power needs n >= 1");
        self.power_signed(n as i64)
            .expect("positive powers always exist")
    }

    /// Signed power; `None` when the map has no inverse (user maps).
    pub fn power_signed(&self, n: i64) -> Option<Map> {
        if n == 1 {
            return Some(self.clone());
        }
        match self {
            Map::DiskMobius { a } => {
                // a = tanh(s) composes additively in s.
                let s = a.atanh();
                Some(Map::DiskMobius {
                    a: (n as f64 * s).tanh(),
                })
            }
            Map::DiskRotation { angle } => Some(Map::DiskRotation {
                angle: analytic::reduce_angle(n as f64 * angle),
            }),
            Map::CylinderShiftRot { dx, rot } => Some(Map::CylinderShiftRot {
                dx: n as f64 * dx,
                rot: analytic::reduce_angle(n as f64 * rot),
            }),
            Map::SlabShift { dx } => {
                if n < 0 {
                    None
                } else {
                    Some(Map::SlabShift { dx: n as f64 * dx })
                }
            }
            Map::StripTranslate { dx } => Some(Map::StripTranslate { dx: n as f64 * dx }),
            Map::ConjTranslate { shift, conjugate } => {
                let odd = *conjugate && n.rem_euclid(2) == 1;
                Some(Map::ConjTranslate {
                    shift: n as f64 * shift,
                    conjugate: odd,
                })
            }
            Map::GraphAutomorphism { perm } => {
                let size = perm.len();
                let mut result: Vec<usize> = (0..size).collect();
                let forward = n >= 0;
                let steps = n.unsigned_abs();
                let base: Vec<usize> = if forward {
                    perm.as_ref().clone()
                } else {
                    let mut inv = vec![0usize; size];
                    for (i, &img) in perm.iter().enumerate() {
                        inv[img] = i;
                    }
                    inv
                };
                for _ in 0..steps {
                    result = result.iter().map(|&i| base[i]).collect();
                }
                Some(Map::GraphAutomorphism {
                    perm: Arc::new(result),
                })
            }
            Map::UserPointwise { label, f, claims } => {
                if n < 1 {
                    return None;
                }
                let n = n as usize;
                let f = Arc::clone(f);
                let claims = *claims;
                Some(Map::UserPointwise {
                    label: format!("{label}^{n}"),
                    f: Arc::new(move |p| {
                        let mut cur = p;
                        for _ in 0..n {
                            cur = f(cur)?;
                        }
                        Some(cur)
                    }),
                    claims,
                })
            }
        }
    }

    /// Inverse map where one exists on the same space.
    pub fn inverse(&self) -> Option<Map> {
        self.power_signed(-1)
    }

    /// Coordinate-level application without a space handle: the formula
    /// alone, for continuous path evaluators. Node-world maps that need
    /// model data (grid reflect-and-step) are not evaluable this way and
    /// return None, as does any point the map cannot move.
    pub(crate) fn apply_pointwise(&self, p: Point) -> Option<Point> {
        match (self, p) {
            (Map::DiskMobius { a }, Point::Xy(x, y)) => {
                let z = Complex64::new(x, y);
                let w = (z + a) / (Complex64::new(1.0, 0.0) + *a * z);
                Some(Point::Xy(w.re, w.im))
            }
            (Map::DiskRotation { angle }, Point::Xy(x, y)) => {
                let z = Complex64::new(x, y) * Complex64::from_polar(1.0, *angle);
                Some(Point::Xy(z.re, z.im))
            }
            (Map::CylinderShiftRot { dx, rot }, Point::Xy(x, t)) => {
                Some(Point::Xy(x + dx, analytic::reduce_angle(t + rot)))
            }
            (Map::SlabShift { dx }, Point::Xy(x, y)) => {
                let nx = x + dx;
                if nx < 0.0 {
                    None
                } else {
                    Some(Point::Xy(nx, y))
                }
            }
            (Map::StripTranslate { dx }, Point::Xy(x, y)) => Some(Point::Xy(x + dx, y)),
            (Map::ConjTranslate { shift, conjugate }, Point::Xy(x, y)) => {
                Some(Point::Xy(x + shift, if *conjugate { -y } else { y }))
            }
            (Map::GraphAutomorphism { perm }, Point::Node(i)) => {
                perm.get(i).map(|&img| Point::Node(img))
            }
            (Map::UserPointwise { f, .. }, _) => f(p),
            _ => None,
        }
    }
}

/// Largest violation of |d(f x, f y) - d(x, y)| over sampled pairs whose
/// images stay in the space. Pairs are drawn source-pooled so that graph
/// spaces reuse shortest-path sweeps. Returns the worst defect and the
/// number of pairs actually checked.
pub fn isometry_defect(
    space: &Space,
    map: &Map,
    n_pairs: usize,
    seed: u64,
) -> Result<(f64, usize)> {
    let sources = ((n_pairs as f64).sqrt().ceil() as usize).max(1);
    let per_source = n_pairs.div_ceil(sources);
    let pts = space.sample_points(sources * (1 + per_source), seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x517c_c1b7_2722_0a95);
    let mut shuffled = pts;
    shuffled.shuffle(&mut rng);

    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for s in 0..sources {
        let x = shuffled[s];
        let Some(fx) = map.apply(space, x)? else {
            continue;
        };
        // Node spaces: two full relaxation sweeps serve every pair of
        // this source; per-pair queries would re-explore the same region
        // once per partner.
        let sweeps = space
            .graph_model()
            .map(|g| (g.sweep_from(x.node().unwrap()), g.sweep_from(fx.node().unwrap())));
        for k in 0..per_source {
            let y = shuffled[sources + (s * per_source + k) % (shuffled.len() - sources)];
            let Some(fy) = map.apply(space, y)? else {
                continue;
            };
            let (d, di) = match &sweeps {
                Some((sx, sfx)) => (sx.dist[y.node().unwrap()], sfx.dist[fy.node().unwrap()]),
                None => (space.distance(x, y)?, space.distance(fx, fy)?),
            };
            if !(d.is_finite() && di.is_finite()) {
                continue;
            }
            worst = worst.max((d - di).abs());
            checked += 1;
        }
    }
    Ok((worst, checked))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_power_matches_iteration() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.5).unwrap();
        let mut p = Point::Xy(0.1, 0.2);
        for _ in 0..5 {
            p = f.apply(&space, p).unwrap().unwrap();
        }
        let q = f.power(5).apply(&space, Point::Xy(0.1, 0.2)).unwrap().unwrap();
        let (px, py) = p.xy().unwrap();
        let (qx, qy) = q.xy().unwrap();
        assert!(
            (px - qx).abs() < 1e-12 && (py - qy).abs() < 1e-12,
            "power(5) disagrees with five applications: ({px}, {py}) vs ({qx}, {qy})"
        );
    }

    #[test]
    fn shift_flip_squares_to_a_pure_translation() {
        let space = Space::flat_cylinder();
        let f = Map::cylinder_shift_flip(1.0);
        let f2 = f.power(2);
        let p = Point::Xy(0.0, 1.0);
        let q = f2.apply(&space, p).unwrap().unwrap();
        let (x, t) = q.xy().unwrap();
        assert!((x - 2.0).abs() < 1e-12);
        assert!((t - 1.0).abs() < 1e-12, "angle should be unchanged, got {t}");
    }

    #[test]
    fn conj_translate_squares_to_plain_translation() {
        let f = Map::conj_translate();
        match f.power(2) {
            Map::ConjTranslate { shift, conjugate } => {
                assert_eq!(shift, 2.0);
                assert!(!conjugate, "even power should not conjugate");
            }
            other => panic!("unexpected power: {other:?}"),
        }
        let space = Space::hyperbolic_strip();
        let q = f.apply(&space, Point::Xy(0.25, 0.5)).unwrap().unwrap();
        assert_eq!(q, Point::Xy(1.25, -0.5));
    }

    #[test]
    fn inverse_undoes_the_map() {
        let space = Space::poincare_disk();
        let f = Map::disk_mobius(0.4).unwrap();
        let g = f.inverse().unwrap();
        let p = Point::Xy(-0.3, 0.6);
        let round = g
            .apply(&space, f.apply(&space, p).unwrap().unwrap())
            .unwrap()
            .unwrap();
        let (x, y) = round.xy().unwrap();
        assert!((x + 0.3).abs() < 1e-12 && (y - 0.6).abs() < 1e-12);
    }

    #[test]
    fn invalid_permutations_are_rejected() {
        assert!(matches!(
            Map::graph_automorphism(vec![0, 0, 1]),
            Err(Error::BadPermutation { .. })
        ));
        assert!(matches!(
            Map::graph_automorphism(vec![0, 3]),
            Err(Error::BadPermutation { .. })
        ));
    }

    #[test]
    fn map_on_wrong_space_is_rejected() {
        let slab = Space::l1_slab();
        let f = Map::disk_mobius(0.5).unwrap();
        let err = f.apply(&slab, Point::Xy(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::MapSpaceMismatch { .. }), "got {err}");
    }

    #[test]
    fn isometries_preserve_sampled_distances() {
        let cases: Vec<(Space, Map)> = vec![
            (Space::poincare_disk(), Map::disk_mobius(0.5).unwrap()),
            (Space::poincare_disk(), Map::disk_rotation(1.1)),
            (Space::flat_cylinder(), Map::cylinder_shift_flip(1.0)),
            (Space::l1_slab(), Map::slab_shift(0.7).unwrap()),
            (Space::hyperbolic_strip(), Map::strip_translate(2.0)),
            (Space::hyperbolic_strip(), Map::conj_translate()),
        ];
        for (space, map) in cases {
            let (defect, checked) = isometry_defect(&space, &map, 200, 42).unwrap();
            assert!(checked >= 150, "{}: only {checked} pairs", map.label());
            assert!(
                defect < 1e-6,
                "{} on {}: defect {defect}",
                map.label(),
                space.kind()
            );
        }
    }
}
