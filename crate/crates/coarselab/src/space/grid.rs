//! Conformally weighted grid approximations of planar domains.
//!
//! A grid space is a lattice of spacing `h` restricted to a mask, with
//! edges drawn from a fixed stencil. An edge (u, v) is weighted by the
//! trapezoid rule: the mean of the conformal density at the endpoints
//! times the Euclidean step length. The shortest-path metric on this
//! graph approximates the length metric of the continuous domain; the
//! relative metrication error of the stencil (worst-case directional
//! overshoot) is tracked and folded into the space's distance tolerance.

use crate::error::{Error, Result};
use crate::space::graph::GraphModel;
use std::collections::HashMap;

/// Neighborhood used when connecting lattice nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// Axis and diagonal steps.
    Eight,
    /// Axis, diagonal, and knight steps (default).
    Sixteen,
}

impl Stencil {
    /// Half-set of offsets; each undirected edge is emitted once.
    pub fn half_offsets(self) -> &'static [(i64, i64)] {
        const EIGHT: &[(i64, i64)] = &[(1, 0), (0, 1), (1, 1), (1, -1)];
        const SIXTEEN: &[(i64, i64)] = &[
            (1, 0),
            (0, 1),
            (1, 1),
            (1, -1),
            (1, 2),
            (2, 1),
            (2, -1),
            (1, -2),
        ];
        match self {
            Stencil::Eight => EIGHT,
            Stencil::Sixteen => SIXTEEN,
        }
    }

    /// Worst-case relative overshoot of lattice paths against straight
    /// lines: 1/cos(half the largest angular gap between stencil
    /// directions). About 8.3% for the 8-neighborhood, 2.8% with knight
    /// moves included.
    pub fn metrication_rel(self) -> f64 {
        let max_half_gap = match self {
            Stencil::Eight => std::f64::consts::FRAC_PI_8,
            Stencil::Sixteen => 0.5 * (0.5f64).atan(),
        };
        1.0 / max_half_gap.cos() - 1.0
    }
}

/// Conformal density evaluated on lattice nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    /// 2 / (1 - |z|^2) on the unit disk.
    PoincareDisk,
    /// (pi/2) / cos(pi y / 2) on the strip {|y| < 1}.
    HyperbolicStrip,
    /// 1 / dist(z, boundary) for the strip {|y| < 1} with the points
    /// (k * puncture_step, 0), k integer, removed.
    QuasihyperbolicPuncturedStrip { puncture_step: f64 },
}

impl DensitySpec {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            DensitySpec::PoincareDisk => 2.0 / (1.0 - (x * x + y * y)),
            DensitySpec::HyperbolicStrip => super::analytic::strip_density(y),
            DensitySpec::QuasihyperbolicPuncturedStrip { puncture_step } => {
                let edge = 1.0 - y.abs();
                1.0 / edge.min(puncture_distance(x, y, *puncture_step))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DensitySpec::PoincareDisk => "poincare-disk",
            DensitySpec::HyperbolicStrip => "hyperbolic-strip",
            DensitySpec::QuasihyperbolicPuncturedStrip { .. } => {
                "quasihyperbolic-punctured-strip"
            }
        }
    }
}

/// Euclidean distance from (x, y) to the nearest puncture (k * step, 0).
pub fn puncture_distance(x: f64, y: f64, step: f64) -> f64 {
    let k = (x / step).round();
    let mut best = f64::INFINITY;
    for dk in [-1.0, 0.0, 1.0] {
        let px = (k + dk) * step;
        best = best.min((x - px).hypot(y));
    }
    best
}

/// Which lattice points belong to the domain.
#[derive(Debug, Clone, PartialEq)]
pub enum MaskSpec {
    /// |z| <= radius, lattice centered at the origin.
    Disk { radius: f64 },
    /// x in [x_min, x_max], |y| <= 1 - h/2, lattice anchored at 0.
    Strip { x_min: f64, x_max: f64 },
    /// Strip mask with nodes within `puncture_radius` of a puncture
    /// removed. `puncture_radius = None` means one lattice spacing.
    PuncturedStrip {
        x_min: f64,
        x_max: f64,
        puncture_step: f64,
        puncture_radius: Option<f64>,
    },
    /// Explicit rows of booleans; row j covers y = y0 + j h, entry i
    /// covers x = x0 + i h.
    Rows {
        x0: f64,
        y0: f64,
        rows: Vec<Vec<bool>>,
    },
}

/// Everything needed to build a grid space.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub spacing: f64,
    pub stencil: Stencil,
    pub density: DensitySpec,
    pub mask: MaskSpec,
}

#[derive(Debug)]
pub struct GridModel {
    pub graph: GraphModel,
    spacing: f64,
    stencil: Stencil,
    density: DensitySpec,
    /// Real coordinates per node.
    coords: Vec<(f64, f64)>,
    /// Lattice coordinates per node.
    lattice: Vec<(i64, i64)>,
    /// Lattice -> node lookup.
    index: HashMap<(i64, i64), usize>,
    /// Inclusive lattice bounds (i_min, i_max, j_min, j_max).
    bounds: (i64, i64, i64, i64),
    mean_density: f64,
}

impl GridModel {
    pub fn build(spec: &GridSpec) -> Result<Self> {
        let h = spec.spacing;
        if h <= 0.0 || !h.is_finite() {
            return Err(Error::BadSpacing(h));
        }
        let cells = mask_cells(&spec.mask, h);
        if cells.is_empty() {
            return Err(Error::EmptyMask);
        }

        let mut lattice: Vec<(i64, i64)> = cells;
        // Row-major scan order: y ascending, then x ascending. Node
        // indices, and with them every tie-break downstream, follow it.
        lattice.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        let index: HashMap<(i64, i64), usize> =
            lattice.iter().enumerate().map(|(n, &c)| (c, n)).collect();

        let (x0, y0) = mask_origin(&spec.mask);
        let coords: Vec<(f64, f64)> = lattice
            .iter()
            .map(|&(i, j)| (x0 + i as f64 * h, y0 + j as f64 * h))
            .collect();

        let mut density_sum = 0.0;
        let mut dens = Vec::with_capacity(coords.len());
        for (node, &(x, y)) in coords.iter().enumerate() {
            let v = spec.density.eval(x, y);
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::BadDensity { node, x, y, value: v });
            }
            density_sum += v;
            dens.push(v);
        }
        let mean_density = density_sum / dens.len() as f64;

        let mut edges = Vec::new();
        for (u, &(i, j)) in lattice.iter().enumerate() {
            for &(di, dj) in spec.stencil.half_offsets() {
                let target = (i + di, j + dj);
                let Some(&v) = index.get(&target) else {
                    continue;
                };
                if di.abs().max(dj.abs()) == 2 && !knight_clear(&index, i, j, di, dj) {
                    // A knight step must not jump over excised cells;
                    // otherwise paths tunnel through the removed region.
                    continue;
                }
                let len = h * ((di * di + dj * dj) as f64).sqrt();
                let w = 0.5 * (dens[u] + dens[v]) * len;
                edges.push((u, v, w));
            }
        }

        let total = lattice.len();
        let graph = GraphModel::from_edges(total, &edges).map_err(|e| match e {
            Error::DisconnectedGraph { .. } => {
                let kept = reachable_count(total, &edges);
                Error::DisconnectedMask { kept, total }
            }
            other => other,
        })?;

        let bounds = lattice.iter().fold(
            (i64::MAX, i64::MIN, i64::MAX, i64::MIN),
            |(i0, i1, j0, j1), &(i, j)| (i0.min(i), i1.max(i), j0.min(j), j1.max(j)),
        );

        Ok(GridModel {
            graph,
            spacing: h,
            stencil: spec.stencil,
            density: spec.density.clone(),
            coords,
            lattice,
            index,
            bounds,
            mean_density,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    pub fn density(&self) -> &DensitySpec {
        &self.density
    }

    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_of(&self, node: usize) -> (f64, f64) {
        self.coords[node]
    }

    pub fn lattice_of(&self, node: usize) -> (i64, i64) {
        self.lattice[node]
    }

    pub fn node_at(&self, i: i64, j: i64) -> Option<usize> {
        self.index.get(&(i, j)).copied()
    }

    pub fn mean_density(&self) -> f64 {
        self.mean_density
    }

    /// Euclidean diagonal of the mask bounding box times the mean density:
    /// a crude but deterministic length scale for tolerance bookkeeping.
    pub fn reference_length(&self) -> f64 {
        let (i0, i1, j0, j1) = self.bounds;
        let w = (i1 - i0) as f64 * self.spacing;
        let hgt = (j1 - j0) as f64 * self.spacing;
        w.hypot(hgt) * self.mean_density
    }

    /// Mask as CSV rows of 0/1, top row = largest y, columns left to right
    /// by increasing x.
    pub fn mask_csv(&self) -> String {
        let (i0, i1, j0, j1) = self.bounds;
        let mut out = String::new();
        for j in (j0..=j1).rev() {
            let mut first = true;
            for i in i0..=i1 {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push(if self.index.contains_key(&(i, j)) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

fn knight_clear(index: &HashMap<(i64, i64), usize>, i: i64, j: i64, di: i64, dj: i64) -> bool {
    let mids = [
        (i + di.div_euclid(2), j + dj.div_euclid(2)),
        (i + (di + 1).div_euclid(2), j + (dj + 1).div_euclid(2)),
    ];
    mids.iter().all(|c| index.contains_key(c))
}

fn reachable_count(total: usize, edges: &[(usize, usize, f64)]) -> usize {
    let mut adj = vec![Vec::new(); total];
    for &(a, b, _) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; total];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count
}

fn mask_origin(mask: &MaskSpec) -> (f64, f64) {
    match mask {
        MaskSpec::Disk { .. } | MaskSpec::Strip { .. } | MaskSpec::PuncturedStrip { .. } => {
            (0.0, 0.0)
        }
        MaskSpec::Rows { x0, y0, .. } => (*x0, *y0),
    }
}

fn mask_cells(mask: &MaskSpec, h: f64) -> Vec<(i64, i64)> {
    let mut cells = Vec::new();
    match mask {
        MaskSpec::Disk { radius } => {
            let n = (radius / h).floor() as i64;
            for j in -n..=n {
                for i in -n..=n {
                    let x = i as f64 * h;
                    let y = j as f64 * h;
                    if x.hypot(y) <= *radius {
                        cells.push((i, j));
                    }
                }
            }
        }
        MaskSpec::Strip { x_min, x_max } => {
            strip_cells(&mut cells, *x_min, *x_max, h, |_, _| true);
        }
        MaskSpec::PuncturedStrip {
            x_min,
            x_max,
            puncture_step,
            puncture_radius,
        } => {
            let r = puncture_radius.unwrap_or(h);
            strip_cells(&mut cells, *x_min, *x_max, h, |x, y| {
                puncture_distance(x, y, *puncture_step) >= r
            });
        }
        MaskSpec::Rows { rows, .. } => {
            for (j, row) in rows.iter().enumerate() {
                for (i, &on) in row.iter().enumerate() {
                    if on {
                        cells.push((i as i64, j as i64));
                    }
                }
            }
        }
    }
    cells
}

fn strip_cells(
    cells: &mut Vec<(i64, i64)>,
    x_min: f64,
    x_max: f64,
    h: f64,
    keep: impl Fn(f64, f64) -> bool,
) {
    let i_lo = (x_min / h).ceil() as i64;
    let i_hi = (x_max / h).floor() as i64;
    let j_max = ((1.0 - h / 2.0) / h).floor() as i64;
    for j in -j_max..=j_max {
        for i in i_lo..=i_hi {
            let x = i as f64 * h;
            let y = j as f64 * h;
            if keep(x, y) {
                cells.push((i, j));
            }
        }
    }
}
