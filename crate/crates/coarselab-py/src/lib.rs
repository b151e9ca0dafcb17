//! Python bindings for the coarselab toolkit.
//!
//! Exposes the model spaces, their isometries, geodesic construction,
//! rate and displacement estimators, hyperbolicity probes, horofunction
//! evaluation, and the scenario runner. Points cross the boundary as
//! plain Python values: an `(x, y)` pair on a continuous space, an `int`
//! node id on a discrete one. Structured results come back as dicts so
//! they compose directly with the scientific Python stack.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use coarselab::boundary::{busemann, default_landmarks};
use coarselab::dynamics::{
    analyze, construct_axis, divergence_rate, minimal_displacement, AxisOutcome, DynamicsConfig,
};
use coarselab::geodesics::{asymptoticity, AsymptoticityParams};
use coarselab::hyperbolicity::{four_point_delta, slim_triangle_delta};
use coarselab::{BoundaryTarget, GeodesicPath, Point, ScenarioConfig};

fn err(e: coarselab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point_in(obj: &Bound<'_, PyAny>) -> PyResult<Point> {
    if let Ok(node) = obj.extract::<usize>() {
        return Ok(Point::Node(node));
    }
    if let Ok((x, y)) = obj.extract::<(f64, f64)>() {
        return Ok(Point::Xy(x, y));
    }
    Err(PyValueError::new_err(
        "a point is an (x, y) pair on a continuous space or an int node id on a discrete one",
    ))
}

fn point_out<'py>(py: Python<'py>, p: Point) -> Bound<'py, PyAny> {
    match p {
        Point::Node(n) => n.into_pyobject(py).unwrap().into_any(),
        Point::Xy(x, y) => (x, y).into_pyobject(py).unwrap().into_any(),
    }
}

fn points_out<'py>(py: Python<'py>, pts: &[Point]) -> PyResult<Bound<'py, PyList>> {
    let list = PyList::empty(py);
    for &p in pts {
        list.append(point_out(py, p))?;
    }
    Ok(list)
}

/// A proper geodesic metric space: a closed-form model or a weighted graph.
#[pyclass(name = "Space", module = "coarselab_py")]
struct PySpace {
    inner: coarselab::Space,
}

#[pymethods]
impl PySpace {
    /// Unit disk with the conformal hyperbolic metric.
    #[staticmethod]
    fn poincare_disk() -> PySpace {
        PySpace {
            inner: coarselab::Space::poincare_disk(),
        }
    }

    /// Horizontal strip {|y| < 1} with the conformal hyperbolic metric.
    #[staticmethod]
    fn hyperbolic_strip() -> PySpace {
        PySpace {
            inner: coarselab::Space::hyperbolic_strip(),
        }
    }

    /// Flat cylinder of circumference 2 pi, unbounded along x.
    #[staticmethod]
    fn flat_cylinder() -> PySpace {
        PySpace {
            inner: coarselab::Space::flat_cylinder(),
        }
    }

    /// Closed slab [0, inf) x [-1, 1] with the taxicab metric.
    #[staticmethod]
    fn l1_slab() -> PySpace {
        PySpace {
            inner: coarselab::Space::l1_slab(),
        }
    }

    /// Connected weighted graph with the shortest-path metric.
    #[staticmethod]
    fn graph(node_count: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<PySpace> {
        Ok(PySpace {
            inner: coarselab::Space::graph(node_count, &edges).map_err(err)?,
        })
    }

    fn distance(&self, a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>) -> PyResult<f64> {
        self.inner
            .distance(point_in(a)?, point_in(b)?)
            .map_err(err)
    }

    /// Resolution of the metric: 0 for closed forms, the discretization
    /// error scale for grid approximations.
    fn distance_tolerance(&self) -> f64 {
        self.inner.distance_tolerance()
    }

    fn is_discrete(&self) -> bool {
        self.inner.is_discrete()
    }

    fn node_count(&self) -> Option<usize> {
        self.inner.node_count()
    }

    fn kind(&self) -> String {
        self.inner.kind().name().to_string()
    }

    fn sample_points<'py>(&self, py: Python<'py>, n: usize, seed: u64) -> PyResult<Bound<'py, PyList>> {
        points_out(py, &self.inner.sample_points(n, seed))
    }

    fn __repr__(&self) -> String {
        match self.inner.node_count() {
            Some(n) => format!("Space({}, {} nodes)", self.inner.kind().name(), n),
            None => format!("Space({})", self.inner.kind().name()),
        }
    }
}

/// A nonexpanding self-map of a space; the built-ins are isometries.
#[pyclass(name = "Map", module = "coarselab_py")]
struct PyMap {
    inner: coarselab::Map,
}

#[pymethods]
impl PyMap {
    /// Disk translation along the real diameter with fixed rim points +/-1.
    #[staticmethod]
    fn disk_mobius(a: f64) -> PyResult<PyMap> {
        Ok(PyMap {
            inner: coarselab::Map::disk_mobius(a).map_err(err)?,
        })
    }

    /// Rotation of the disk about its center.
    #[staticmethod]
    fn disk_rotation(angle: f64) -> PyMap {
        PyMap {
            inner: coarselab::Map::disk_rotation(angle),
        }
    }

    /// Cylinder shift by dx composed with the half-turn flip.
    #[staticmethod]
    fn cylinder_shift_flip(dx: f64) -> PyMap {
        PyMap {
            inner: coarselab::Map::cylinder_shift_flip(dx),
        }
    }

    /// Slab shift toward the open end.
    #[staticmethod]
    fn slab_shift(dx: f64) -> PyResult<PyMap> {
        Ok(PyMap {
            inner: coarselab::Map::slab_shift(dx).map_err(err)?,
        })
    }

    /// Strip translation along the axis.
    #[staticmethod]
    fn strip_translate(dx: f64) -> PyMap {
        PyMap {
            inner: coarselab::Map::strip_translate(dx),
        }
    }

    /// Unit translation composed with the reflection y -> -y; the
    /// coarse model map for the punctured-strip grids.
    #[staticmethod]
    fn conj_translate() -> PyMap {
        PyMap {
            inner: coarselab::Map::conj_translate(),
        }
    }

    /// Distance-preserving node permutation of a graph.
    #[staticmethod]
    fn graph_automorphism(perm: Vec<usize>) -> PyResult<PyMap> {
        Ok(PyMap {
            inner: coarselab::Map::graph_automorphism(perm).map_err(err)?,
        })
    }

    fn apply<'py>(
        &self,
        py: Python<'py>,
        space: &PySpace,
        p: &Bound<'_, PyAny>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let image = self
            .inner
            .apply(&space.inner, point_in(p)?)
            .map_err(err)?
            .ok_or_else(|| PyValueError::new_err("the map sends this point outside the space"))?;
        Ok(point_out(py, image))
    }

    fn power(&self, n: u32) -> PyResult<PyMap> {
        if n == 0 {
            return Err(PyValueError::new_err("power needs n >= 1"));
        }
        Ok(PyMap {
            inner: self.inner.power(n),
        })
    }

    fn __repr__(&self) -> String {
        format!("Map({})", self.inner.label())
    }
}

fn target_in(
    disk_angle: Option<f64>,
    axial_end: Option<bool>,
    node_sequence: Option<Vec<usize>>,
) -> PyResult<BoundaryTarget> {
    match (disk_angle, axial_end, node_sequence) {
        (Some(a), None, None) => Ok(BoundaryTarget::DiskAngle(a)),
        (None, Some(plus), None) => Ok(BoundaryTarget::AxialEnd(plus)),
        (None, None, Some(seq)) => Ok(BoundaryTarget::NodeSequence(seq)),
        _ => Err(PyValueError::new_err(
            "give exactly one of disk_angle, axial_end, node_sequence",
        )),
    }
}

/// A parametrized geodesic: a segment between two points or a ray toward
/// a boundary direction, sampled at a fixed step.
#[pyclass(name = "Geodesic", module = "coarselab_py")]
struct PyGeodesic {
    inner: GeodesicPath,
}

#[pymethods]
impl PyGeodesic {
    /// Geodesic segment from a to b.
    #[staticmethod]
    #[pyo3(signature = (space, a, b, step = 0.1))]
    fn segment(
        space: &PySpace,
        a: &Bound<'_, PyAny>,
        b: &Bound<'_, PyAny>,
        step: f64,
    ) -> PyResult<PyGeodesic> {
        Ok(PyGeodesic {
            inner: GeodesicPath::segment(&space.inner, point_in(a)?, point_in(b)?, step)
                .map_err(err)?,
        })
    }

    /// Geodesic ray from `start` toward a boundary direction, truncated
    /// at parameter `t_max`.
    #[staticmethod]
    #[pyo3(signature = (space, start, *, disk_angle = None, axial_end = None, node_sequence = None, t_max = 20.0, step = 0.1))]
    fn ray(
        space: &PySpace,
        start: &Bound<'_, PyAny>,
        disk_angle: Option<f64>,
        axial_end: Option<bool>,
        node_sequence: Option<Vec<usize>>,
        t_max: f64,
        step: f64,
    ) -> PyResult<PyGeodesic> {
        let target = target_in(disk_angle, axial_end, node_sequence)?;
        Ok(PyGeodesic {
            inner: GeodesicPath::ray(&space.inner, point_in(start)?, &target, t_max, step)
                .map_err(err)?,
        })
    }

    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn length(&self) -> f64 {
        self.inner.length()
    }

    fn samples<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let list = PyList::empty(py);
        for &(t, p) in self.inner.samples() {
            list.append((t, point_out(py, p)))?;
        }
        Ok(list)
    }

    fn point_at<'py>(&self, py: Python<'py>, t: f64) -> Option<(f64, Bound<'py, PyAny>)> {
        self.inner.point_at(t).map(|(s, p)| (s, point_out(py, p)))
    }

    fn __repr__(&self) -> String {
        let (t0, t1) = self.inner.domain();
        format!("Geodesic([{t0:.3}, {t1:.3}])")
    }
}

/// Orbit growth rate lim d(x, f^n x)/n, reported with its convergence table.
#[pyfunction]
#[pyo3(signature = (space, f, start, steps = 1000))]
fn rate<'py>(
    py: Python<'py>,
    space: &PySpace,
    f: &PyMap,
    start: &Bound<'_, PyAny>,
    steps: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let r = divergence_rate(&space.inner, &f.inner, point_in(start)?, steps).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("c", r.c)?;
    d.set_item("endpoint", r.endpoint)?;
    d.set_item("tail_increment", r.tail_increment)?;
    d.set_item("spread", r.spread)?;
    d.set_item("steps", r.steps)?;
    d.set_item("table", r.table.clone())?;
    Ok(d)
}

/// Minimal displacement inf_x d(x, f x).
#[pyfunction]
#[pyo3(signature = (space, f, seed = 7))]
fn displacement<'py>(
    py: Python<'py>,
    space: &PySpace,
    f: &PyMap,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = DynamicsConfig::for_space(&space.inner);
    cfg.seed = seed;
    let r = minimal_displacement(&space.inner, &f.inner, &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("tau", r.tau)?;
    d.set_item("argmin", point_out(py, r.argmin))?;
    d.set_item("attained", r.attained)?;
    d.set_item("exhaustive", r.exhaustive)?;
    d.set_item("lower_bound", r.lower_bound)?;
    d.set_item("evaluations", r.evaluations)?;
    Ok(d)
}

/// Full dynamical profile of a map: class, rate, displacement, limit
/// behavior, and the axis when one exists.
#[pyfunction]
#[pyo3(signature = (space, f, start, seed = 7))]
fn dynamics<'py>(
    py: Python<'py>,
    space: &PySpace,
    f: &PyMap,
    start: &Bound<'_, PyAny>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = DynamicsConfig::for_space(&space.inner);
    cfg.seed = seed;
    let r = analyze(&space.inner, &f.inner, point_in(start)?, &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("map", r.map.clone())?;
    d.set_item("class", r.classification.class.name())?;
    d.set_item("c", r.divergence.c)?;
    d.set_item("tau", r.displacement.tau)?;
    d.set_item("gap", r.gap)?;
    d.set_item("tol_gap", r.tol_gap)?;
    match &r.limit_point {
        Some(lp) => {
            let lpd = PyDict::new(py);
            lpd.set_item("target", lp.target.to_string())?;
            lpd.set_item("spread", lp.spread)?;
            lpd.set_item("agree", lp.agree)?;
            d.set_item("limit_point", lpd)?;
        }
        None => d.set_item("limit_point", py.None())?,
    }
    let axis = PyDict::new(py);
    match &r.axis {
        AxisOutcome::Built(rep) => {
            axis.set_item("status", "built")?;
            axis.set_item("translation", rep.translation)?;
            axis.set_item("invariance_defect", rep.invariance_defect)?;
            axis.set_item("geodesic", rep.geodesy.passed)?;
        }
        AxisOutcome::Rejected { gap, tol } => {
            axis.set_item("status", "rejected")?;
            axis.set_item("gap", *gap)?;
            axis.set_item("tol", *tol)?;
        }
        AxisOutcome::NotAttempted { reason } => {
            axis.set_item("status", "not_attempted")?;
            axis.set_item("reason", reason.clone())?;
        }
    }
    d.set_item("axis", axis)?;
    Ok(d)
}

/// Invariant geodesic of an axial map, as a Geodesic plus its diagnostics.
#[pyfunction]
#[pyo3(signature = (space, f, start, seed = 7))]
fn axis<'py>(
    py: Python<'py>,
    space: &PySpace,
    f: &PyMap,
    start: &Bound<'_, PyAny>,
    seed: u64,
) -> PyResult<(Py<PyGeodesic>, Bound<'py, PyDict>)> {
    let mut cfg = DynamicsConfig::for_space(&space.inner);
    cfg.seed = seed;
    let rep = construct_axis(&space.inner, &f.inner, point_in(start)?, &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("translation", rep.translation)?;
    d.set_item("c", rep.c)?;
    d.set_item("invariance_defect", rep.invariance_defect)?;
    d.set_item("geodesic", rep.geodesy.passed)?;
    let path = Py::new(py, PyGeodesic { inner: rep.axis })?;
    Ok((path, d))
}

/// Four-point hyperbolicity estimate; exhaustive on small node spaces.
#[pyfunction]
#[pyo3(signature = (space, n_quadruples = 10_000, seed = 7))]
fn four_point<'py>(
    py: Python<'py>,
    space: &PySpace,
    n_quadruples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = four_point_delta(&space.inner, n_quadruples, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("delta", r.delta_four_point)?;
    d.set_item("quadruples", r.quadruples_sampled)?;
    d.set_item("exhaustive", r.exhaustive)?;
    Ok(d)
}

/// Slim-triangle hyperbolicity estimate over sampled triangles.
#[pyfunction]
#[pyo3(signature = (space, n_triangles = 200, dt = 0.1, seed = 7))]
fn slim_delta<'py>(
    py: Python<'py>,
    space: &PySpace,
    n_triangles: usize,
    dt: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = slim_triangle_delta(&space.inner, n_triangles, dt, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("delta", r.delta_slim)?;
    d.set_item("triangles", r.triangles_sampled)?;
    d.set_item("resolution_slack", r.resolution_slack)?;
    match &r.slim_witness {
        Some(w) => {
            let witness = PyDict::new(py);
            witness.set_item("a", point_out(py, w.a))?;
            witness.set_item("b", point_out(py, w.b))?;
            witness.set_item("c", point_out(py, w.c))?;
            d.set_item("witness", witness)?;
        }
        None => d.set_item("witness", py.None())?,
    }
    Ok(d)
}

/// Sup/inf distance profiles between two geodesics, with the verdicts on
/// asymptoticity and the aligned parameter shift.
#[pyfunction]
#[pyo3(signature = (space, gamma, sigma, t_max = 20.0, dt = 0.1))]
fn approach<'py>(
    py: Python<'py>,
    space: &PySpace,
    gamma: &PyGeodesic,
    sigma: &PyGeodesic,
    t_max: f64,
    dt: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let params = AsymptoticityParams {
        t_max,
        dt,
        ..Default::default()
    };
    let r = asymptoticity(&space.inner, &gamma.inner, &sigma.inner, &params).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("sup_terminal", r.sup_terminal)?;
    d.set_item("inf_terminal", r.inf_terminal)?;
    d.set_item("asymptotic", r.asymptotic)?;
    d.set_item("strongly_asymptotic", r.strongly_asymptotic)?;
    d.set_item("inf_log_tail_slope", r.inf_log_tail_slope)?;
    d.set_item("shift", r.shift)?;
    d.set_item("aligned_sup", r.aligned_sup)?;
    Ok(d)
}

/// Horofunction of a ray: landmark values normalized to vanish at `base`.
#[pyfunction]
#[pyo3(signature = (space, ray, base, landmarks = None, seed = 7))]
fn horofunction<'py>(
    py: Python<'py>,
    space: &PySpace,
    ray: &PyGeodesic,
    base: &Bound<'_, PyAny>,
    landmarks: Option<Vec<Bound<'_, PyAny>>>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let base = point_in(base)?;
    let landmarks = match landmarks {
        Some(objs) => objs
            .iter()
            .map(point_in)
            .collect::<PyResult<Vec<Point>>>()?,
        None => default_landmarks(&space.inner, base, seed).map_err(err)?,
    };
    let sample = busemann(&space.inner, &ray.inner, base, &landmarks).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("landmarks", points_out(py, sample.landmarks())?)?;
    d.set_item("values", sample.values().to_vec())?;
    d.set_item("residual", sample.convergence_residual)?;
    Ok(d)
}

/// Names and descriptions of the registered scenarios.
#[pyfunction]
fn scenarios() -> Vec<(String, String)> {
    coarselab::list_scenarios()
        .iter()
        .map(|s| (s.name.to_string(), s.description.to_string()))
        .collect()
}

/// Run a registered scenario; writes report.json (and CSVs) under
/// `out_dir/<name>/` and returns the checks with their verdicts.
#[pyfunction]
#[pyo3(signature = (name, out_dir, seed = None, spacing = None, horizon = None, csv = true))]
fn run_scenario<'py>(
    py: Python<'py>,
    name: &str,
    out_dir: std::path::PathBuf,
    seed: Option<u64>,
    spacing: Option<f64>,
    horizon: Option<f64>,
    csv: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = ScenarioConfig::new(name).map_err(err)?;
    cfg.out_dir = out_dir;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(h) = spacing {
        cfg.spacing = h;
    }
    if let Some(t) = horizon {
        cfg.horizon = t;
    }
    cfg.write_csv = csv;
    let report = coarselab::run_scenario(&cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("scenario", report.scenario.clone())?;
    d.set_item("passed", report.passed)?;
    d.set_item("report_path", report.report_path.clone())?;
    let checks = PyList::empty(py);
    for c in &report.checks {
        let cd = PyDict::new(py);
        cd.set_item("name", c.name)?;
        cd.set_item("verdict", c.verdict.name())?;
        cd.set_item("target", c.target.clone())?;
        let measured = PyDict::new(py);
        for (k, v) in &c.measured {
            measured.set_item(*k, *v)?;
        }
        cd.set_item("measured", measured)?;
        checks.append(cd)?;
    }
    d.set_item("checks", checks)?;
    Ok(d)
}

#[pymodule]
fn coarselab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyGeodesic>()?;
    m.add_function(wrap_pyfunction!(rate, m)?)?;
    m.add_function(wrap_pyfunction!(displacement, m)?)?;
    m.add_function(wrap_pyfunction!(dynamics, m)?)?;
    m.add_function(wrap_pyfunction!(axis, m)?)?;
    m.add_function(wrap_pyfunction!(four_point, m)?)?;
    m.add_function(wrap_pyfunction!(slim_delta, m)?)?;
    m.add_function(wrap_pyfunction!(approach, m)?)?;
    m.add_function(wrap_pyfunction!(horofunction, m)?)?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
