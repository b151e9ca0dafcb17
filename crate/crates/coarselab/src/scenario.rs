//! Prepackaged experiment scenarios and their machine-readable reports.
//!
//! A scenario builds a space and a map or family of rays, runs a fixed
//! battery of named checks against pinned targets, and writes everything
//! into its own subdirectory of the output directory: a `report.json`
//! with the verdicts plus plot-ready CSV artifacts. Checks carry one of
//! three verdicts: `pass` and `fail` compare a measurement against a
//! target; `exploratory` records a measurement that has no trusted
//! target and never counts against the run.
//!
//! Reports are deterministic: for a fixed configuration (seed included)
//! two runs produce byte-identical JSON apart from the `timestamp_unix`
//! field. Floats are rounded to [`REPORT_SIG_DIGITS`] significant digits
//! before serialization, and keys keep a fixed order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Deserialize;
use serde_json::{Map as JsonMap, Value};

use crate::boundary::{
    busemann, compactification_compare, default_landmarks, horosphere_membership, Direction,
    HorosphereMode,
};
use crate::dynamics::{
    self, analyze, axis_uniqueness_probe, construct_axis, dilation, divergence_rate,
    fixed_direction_check, minimal_displacement, power_consistency, Approach, AxisOutcome,
    DynamicsConfig, MapClass,
};
use crate::error::{Error, Result};
use crate::geodesics::{asymptoticity, AsymptoticityParams, GeodesicPath};
use crate::hyperbolicity::four_point_delta;
use crate::maps::{isometry_defect, Map};
use crate::point::{BoundaryTarget, Point};
use crate::space::{DensitySpec, GridSpec, MaskSpec, Space, Stencil};

/// Embedded in every report so downstream readers can detect layout
/// changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits kept when serializing floats into reports.
pub const REPORT_SIG_DIGITS: usize = 12;

/// One registry entry: a runnable scenario and what it measures.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
}

/// All registered scenarios, lexicographically ordered by name.
pub const SCENARIOS: [ScenarioInfo; 5] = [
    ScenarioInfo {
        name: "cylinder_gap",
        description: "Shift-flip of a flat cylinder: divergence rate 1 vs displacement \
                      sqrt(1+pi^2), power consistency, axis rejection.",
    },
    ScenarioInfo {
        name: "disk_approaching",
        description: "Two disk rays into one rim point: strong asymptoticity profile and the \
                      Busemann shift between their parameters.",
    },
    ScenarioInfo {
        name: "disk_dynamics",
        description: "Hyperbolic Mobius map of the disk: rate and displacement ln 3, axis on \
                      the real diameter, limit point, dilation, horosphere steps.",
    },
    ScenarioInfo {
        name: "slab_boundaries",
        description: "Five parallel rays in an L1 slab: one asymptoticity class against five \
                      distinct horofunctions.",
    },
    ScenarioInfo {
        name: "strip_minus_Z",
        description: "Quasihyperbolic grid on a punctured strip: conjugate-translation \
                      isometry check, rate vs displacement across two resolutions.",
    },
];

/// Registry listing, in stable (lexicographic) order.
pub fn list_scenarios() -> &'static [ScenarioInfo] {
    &SCENARIOS
}

/// The check names a scenario's report must contain, in report order.
pub fn registered_checks(scenario: &str) -> &'static [&'static str] {
    match scenario {
        "cylinder_gap" => &[
            "divergence_rate",
            "minimal_displacement",
            "power_consistency",
            "axis_rejection",
        ],
        "disk_approaching" => &["strong_asymptoticity", "busemann_shift"],
        "disk_dynamics" => &[
            "divergence_rate",
            "minimal_displacement",
            "classification",
            "limit_point",
            "axis",
            "axis_uniqueness",
            "dilation",
            "fixed_direction",
            "horosphere_shift",
        ],
        "slab_boundaries" => &["ray_classes", "horofunction_clusters", "cluster_separation"],
        "strip_minus_Z" => &[
            "isometry_defect",
            "rate_below_displacement",
            "resolution_stability",
            "displacement_gap",
            "four_point_probe",
        ],
        _ => &[],
    }
}

fn unknown_scenario(name: &str) -> Error {
    Error::UnknownScenario {
        name: name.to_string(),
        available: SCENARIOS
            .iter()
            .map(|s| s.name)
            .collect::<Vec<_>>()
            .join(", "),
    }
}

/// Everything a scenario run depends on. Defaults come from
/// [`ScenarioConfig::new`]; a TOML config file and command-line flags
/// override them field by field.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: String,
    /// Lattice spacing for grid-backed scenarios.
    pub spacing: f64,
    /// Horizon for rays, profiles, and constructed axes.
    pub horizon: f64,
    /// Sample step along rays and profiles.
    pub dt: f64,
    /// Seed for every sampled quantity in the run.
    pub seed: u64,
    /// Sup-distance radius for horofunction clustering.
    pub tol_cluster: f64,
    /// Tolerance on `tau - c` when an axis is attempted.
    pub tol_gap: f64,
    /// Reports land in `out_dir/<scenario>/`.
    pub out_dir: PathBuf,
    /// Write CSV artifacts next to the JSON report.
    pub write_csv: bool,
}

/// TOML shape of a scenario config file. Every field is optional; the
/// file only overrides what it names.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFileConfig {
    #[serde(default)]
    spacing: Option<f64>,
    #[serde(default)]
    horizon: Option<f64>,
    #[serde(default)]
    dt: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tol_cluster: Option<f64>,
    #[serde(default)]
    tol_gap: Option<f64>,
    #[serde(default)]
    out: Option<String>,
    #[serde(default)]
    csv: Option<bool>,
}

impl ScenarioConfig {
    /// Defaults for a registered scenario; unknown names are rejected
    /// with the full registry listing.
    pub fn new(scenario: &str) -> Result<ScenarioConfig> {
        if !SCENARIOS.iter().any(|s| s.name == scenario) {
            return Err(unknown_scenario(scenario));
        }
        Ok(ScenarioConfig {
            scenario: scenario.to_string(),
            spacing: 0.05,
            horizon: crate::DEFAULT_T_MAX,
            dt: crate::DEFAULT_DT,
            seed: 7,
            tol_cluster: crate::DEFAULT_TOL_CLUSTER,
            tol_gap: crate::DEFAULT_TOL_GAP,
            out_dir: PathBuf::from("out"),
            write_csv: true,
        })
    }

    /// Overlay options from a TOML file (`key = value` per line; every
    /// key optional, unknown keys rejected).
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        self.apply_toml(&text)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    /// Overlay options from TOML text.
    pub fn apply_toml(&mut self, text: &str) -> Result<()> {
        let file: ScenarioFileConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("bad scenario config: {e}")))?;
        if let Some(v) = file.spacing {
            self.spacing = v;
        }
        if let Some(v) = file.horizon {
            self.horizon = v;
        }
        if let Some(v) = file.dt {
            self.dt = v;
        }
        if let Some(v) = file.seed {
            self.seed = v;
        }
        if let Some(v) = file.tol_cluster {
            self.tol_cluster = v;
        }
        if let Some(v) = file.tol_gap {
            self.tol_gap = v;
        }
        if let Some(v) = file.out {
            self.out_dir = PathBuf::from(v);
        }
        if let Some(v) = file.csv {
            self.write_csv = v;
        }
        Ok(())
    }

    /// Reject non-positive or non-finite parameters and unregistered
    /// scenario names.
    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.iter().any(|s| s.name == self.scenario) {
            return Err(unknown_scenario(&self.scenario));
        }
        for (name, v) in [
            ("spacing", self.spacing),
            ("horizon", self.horizon),
            ("dt", self.dt),
            ("tol_cluster", self.tol_cluster),
            ("tol_gap", self.tol_gap),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.dt > self.horizon {
            return Err(Error::config(format!(
                "dt = {} exceeds the horizon {}",
                self.dt, self.horizon
            )));
        }
        Ok(())
    }
}

/// Verdict of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Measured and recorded, but outside the judged set: no trusted
    /// target exists for it.
    Exploratory,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Exploratory => "exploratory",
        }
    }
}

/// One named check: what was measured, what it was held against, and
/// the outcome.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub verdict: Verdict,
    /// Measured quantities in display order.
    pub measured: Vec<(&'static str, f64)>,
    /// The target, in words, with its tolerance.
    pub target: String,
    /// Free-form context: class names, rejection messages.
    pub note: Option<String>,
}

fn check(
    name: &'static str,
    pass: bool,
    target: impl Into<String>,
    measured: Vec<(&'static str, f64)>,
) -> Check {
    Check {
        name,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        measured,
        target: target.into(),
        note: None,
    }
}

fn exploratory(
    name: &'static str,
    target: impl Into<String>,
    measured: Vec<(&'static str, f64)>,
) -> Check {
    Check {
        name,
        verdict: Verdict::Exploratory,
        measured,
        target: target.into(),
        note: None,
    }
}

/// Result of a scenario run, mirrored into `report.json`.
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub scenario: String,
    /// Input echo.
    pub config: ScenarioConfig,
    pub checks: Vec<Check>,
    /// Files written, relative to the scenario directory; `report.json`
    /// first.
    pub manifest: Vec<String>,
    pub report_path: PathBuf,
    /// True when no check failed (exploratory checks never count).
    pub passed: bool,
}

type Artifacts = Vec<(String, String)>;

/// Run one registered scenario end to end and write its report.
///
/// The scenario's subdirectory of `out_dir` is replaced wholesale, so
/// the manifest in the report always matches the directory contents
/// exactly.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let (checks, artifacts) = match cfg.scenario.as_str() {
        "cylinder_gap" => cylinder_gap(cfg)?,
        "disk_approaching" => disk_approaching(cfg)?,
        "disk_dynamics" => disk_dynamics(cfg)?,
        "slab_boundaries" => slab_boundaries(cfg)?,
        "strip_minus_Z" => strip_minus_z(cfg)?,
        other => return Err(unknown_scenario(other)),
    };

    let expected = registered_checks(&cfg.scenario);
    let produced: Vec<&str> = checks.iter().map(|c| c.name).collect();
    assert_eq!(
        produced, expected,
        "scenario '{}' produced a different check list than it registers",
        cfg.scenario
    );

    let dir = cfg.out_dir.join(&cfg.scenario);
    if dir.exists() {
        fs::remove_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }
    fs::create_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;

    let mut manifest = vec!["report.json".to_string()];
    if cfg.write_csv {
        for (name, contents) in &artifacts {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| Error::io(path.display().to_string(), e))?;
            manifest.push(name.clone());
        }
    }

    let json = render_report(cfg, &checks, &manifest, unix_now());
    let report_path = dir.join("report.json");
    fs::write(&report_path, json).map_err(|e| Error::io(report_path.display().to_string(), e))?;

    let passed = checks.iter().all(|c| c.verdict != Verdict::Fail);
    Ok(ScenarioReport {
        scenario: cfg.scenario.clone(),
        config: cfg.clone(),
        checks,
        manifest,
        report_path,
        passed,
    })
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Round a float to [`REPORT_SIG_DIGITS`] significant digits so report
/// bytes do not wobble below measurement precision.
fn sig(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    let repr = format!("{:.*e}", REPORT_SIG_DIGITS - 1, x);
    Value::from(repr.parse::<f64>().expect("rounded float reparses"))
}

fn render_report(cfg: &ScenarioConfig, checks: &[Check], manifest: &[String], stamp: u64) -> String {
    let mut root = JsonMap::new();
    root.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    root.insert("scenario".into(), Value::from(cfg.scenario.as_str()));
    root.insert("timestamp_unix".into(), Value::from(stamp));

    let mut conf = JsonMap::new();
    conf.insert("spacing".into(), sig(cfg.spacing));
    conf.insert("horizon".into(), sig(cfg.horizon));
    conf.insert("dt".into(), sig(cfg.dt));
    conf.insert("seed".into(), Value::from(cfg.seed));
    conf.insert("tol_cluster".into(), sig(cfg.tol_cluster));
    conf.insert("tol_gap".into(), sig(cfg.tol_gap));
    conf.insert(
        "out_dir".into(),
        Value::from(cfg.out_dir.display().to_string()),
    );
    conf.insert("csv".into(), Value::from(cfg.write_csv));
    root.insert("config".into(), Value::Object(conf));

    let mut rows = Vec::with_capacity(checks.len());
    for c in checks {
        let mut row = JsonMap::new();
        row.insert("name".into(), Value::from(c.name));
        row.insert("verdict".into(), Value::from(c.verdict.name()));
        row.insert("target".into(), Value::from(c.target.as_str()));
        let mut measured = JsonMap::new();
        for (key, value) in &c.measured {
            measured.insert((*key).into(), sig(*value));
        }
        row.insert("measured".into(), Value::Object(measured));
        if let Some(note) = &c.note {
            row.insert("note".into(), Value::from(note.as_str()));
        }
        rows.push(Value::Object(row));
    }
    root.insert("checks".into(), Value::Array(rows));

    let n_pass = checks.iter().filter(|c| c.verdict == Verdict::Pass).count();
    let n_fail = checks.iter().filter(|c| c.verdict == Verdict::Fail).count();
    let n_expl = checks
        .iter()
        .filter(|c| c.verdict == Verdict::Exploratory)
        .count();
    let mut summary = JsonMap::new();
    summary.insert("pass".into(), Value::from(n_pass));
    summary.insert("fail".into(), Value::from(n_fail));
    summary.insert("exploratory".into(), Value::from(n_expl));
    summary.insert("all_pass".into(), Value::from(n_fail == 0));
    root.insert("summary".into(), Value::Object(summary));

    root.insert(
        "manifest".into(),
        Value::Array(manifest.iter().map(|m| Value::from(m.as_str())).collect()),
    );

    let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes");
    text.push('\n');
    text
}

/// Dynamics defaults for this space, with the run's seed, step, horizon,
/// and gap tolerance overlaid. Node spaces keep their coarser
/// metrication-scaled gap floor.
fn dynamics_config(space: &Space, cfg: &ScenarioConfig) -> DynamicsConfig {
    let mut d = DynamicsConfig::for_space(space);
    d.seed = cfg.seed;
    d.dt = cfg.dt;
    d.t_max = cfg.horizon;
    d.tol_gap = (5.0 * space.distance_tolerance()).max(cfg.tol_gap);
    d
}

// --- cylinder_gap ---------------------------------------------------------

fn cylinder_gap(cfg: &ScenarioConfig) -> Result<(Vec<Check>, Artifacts)> {
    let space = Space::flat_cylinder();
    let f = Map::cylinder_shift_flip(1.0);
    let dcfg = dynamics_config(&space, cfg);
    let x0 = Point::Xy(0.0, 0.0);

    let rate = divergence_rate(&space, &f, x0, dcfg.orbit_len)?;
    let disp = minimal_displacement(&space, &f, &dcfg)?;
    let powers = power_consistency(&space, &f, 3, x0, &dcfg)?;

    let tau_target = (1.0 + std::f64::consts::PI.powi(2)).sqrt();
    let gap_target = tau_target - 1.0;

    let mut checks = Vec::new();
    checks.push(check(
        "divergence_rate",
        (rate.c - 1.0).abs() <= 1e-3,
        format!("c = 1 within 1e-3 from a {}-step orbit", rate.steps),
        vec![
            ("c", rate.c),
            ("endpoint", rate.endpoint),
            ("spread", rate.spread),
        ],
    ));
    let (ax, ay) = disp.argmin.xy().unwrap_or((f64::NAN, f64::NAN));
    checks.push(check(
        "minimal_displacement",
        (disp.tau - tau_target).abs() <= 1e-5,
        format!("tau = sqrt(1 + pi^2) = {tau_target:.9} within 1e-5"),
        vec![("tau", disp.tau), ("argmin_x", ax), ("argmin_y", ay)],
    ));
    checks.push(check(
        "power_consistency",
        powers.c_linear && powers.tau_square_consistent,
        "c(f^n) = n c(f) within 1e-2 relative for n <= 3; tau(f^2)/2 <= tau(f)",
        vec![("worst_c_deviation", powers.worst_c_deviation)],
    ));

    let mut axis_check = match construct_axis(&space, &f, x0, &dcfg) {
        Err(Error::NotAxial { gap, tol }) => {
            let mut c = check(
                "axis_rejection",
                (gap - gap_target).abs() <= 1e-3,
                format!("rejected with gap = sqrt(1 + pi^2) - 1 = {gap_target:.4} within 1e-3"),
                vec![("gap", gap), ("tol", tol)],
            );
            c.note = Some(format!("rejected: gap {gap:.4}"));
            c
        }
        Ok(_) => {
            let mut c = check(
                "axis_rejection",
                false,
                format!("rejected with gap = sqrt(1 + pi^2) - 1 = {gap_target:.4} within 1e-3"),
                vec![],
            );
            c.note = Some("an axis was built although tau exceeds c".to_string());
            c
        }
        Err(e) => return Err(e),
    };
    if axis_check.note.is_none() {
        axis_check.note = Some("axis construction failed for an unexpected reason".to_string());
    }
    checks.push(axis_check);

    let mut convergence = String::from("n,distance,distance_over_n\n");
    for &(n, quotient) in &rate.table {
        let _ = writeln!(convergence, "{n},{},{quotient}", quotient * n as f64);
    }
    let mut power_table = String::from("n,c,tau,tau_over_n\n");
    for row in &powers.rows {
        let _ = writeln!(
            power_table,
            "{},{},{},{}",
            row.n, row.c, row.tau, row.tau_over_n
        );
    }
    Ok((
        checks,
        vec![
            ("convergence.csv".to_string(), convergence),
            ("powers.csv".to_string(), power_table),
        ],
    ))
}

// --- disk_approaching -----------------------------------------------------

fn disk_approaching(cfg: &ScenarioConfig) -> Result<(Vec<Check>, Artifacts)> {
    let space = Space::poincare_disk();
    let origin = Point::Xy(0.0, 0.0);
    let sigma0 = Point::Xy(0.0, 0.5);
    let target = BoundaryTarget::DiskAngle(0.0);

    let gamma = GeodesicPath::ray(&space, origin, &target, cfg.horizon, cfg.dt)?;
    // The closest-point profile reads sigma as a set, so sigma extends
    // past the window: the alignment shift is at most the starting gap,
    // and doubling (gap + margin) keeps the search away from the end.
    let start_gap = space.distance(origin, sigma0)?;
    let sigma_horizon = cfg.horizon + 2.0 * (start_gap + 2.0);
    let sigma = GeodesicPath::ray(&space, sigma0, &target, sigma_horizon, cfg.dt)?;

    let params = AsymptoticityParams {
        t_max: cfg.horizon,
        dt: cfg.dt,
        ..Default::default()
    };
    let prof = asymptoticity(&space, &gamma, &sigma, &params)?;

    let mut checks = Vec::new();
    checks.push(check(
        "strong_asymptoticity",
        prof.strongly_asymptotic && prof.inf_terminal < 1e-3 && prof.inf_log_tail_slope < 0.0,
        format!(
            "closest-point profile ends below 1e-3 at horizon {} with a decaying log trend",
            cfg.horizon
        ),
        vec![
            ("inf_terminal", prof.inf_terminal),
            ("inf_log_tail_slope", prof.inf_log_tail_slope),
            ("sup_terminal", prof.sup_terminal),
        ],
    ));

    // The ray's horofunction evaluated where the second ray starts: its
    // value equals the parameter shift aligning the two rays, here
    // log(5/3) in closed form.
    let mut landmarks = vec![sigma0];
    landmarks.extend(default_landmarks(&space, origin, cfg.seed)?);
    let sample = busemann(&space, &gamma, origin, &landmarks)?;
    let value_at_sigma0 = sample
        .value_at(sigma0)
        .ok_or_else(|| Error::config("sigma(0) missing from the landmark set"))?;
    let closed_form = (5.0f64 / 3.0).ln();
    let (shift, have_shift) = match prof.shift {
        Some(t) => (t, true),
        None => (f64::NAN, false),
    };
    let mut shift_check = check(
        "busemann_shift",
        have_shift && (value_at_sigma0 - shift).abs() < 1e-3,
        "ray horofunction at sigma(0) equals the aligned parameter shift within 1e-3",
        vec![
            ("busemann_at_sigma0", value_at_sigma0),
            ("aligned_shift", shift),
            ("closed_form", closed_form),
            ("residual", sample.convergence_residual),
        ],
    );
    if !have_shift {
        shift_check.note = Some("no aligned shift: the rays did not test as asymptotic".into());
    }
    checks.push(shift_check);

    let mut profiles = String::from("t,same_parameter_distance,closest_point_distance\n");
    for ((t, sup), inf) in prof
        .ts
        .iter()
        .zip(&prof.sup_profile)
        .zip(&prof.inf_profile)
    {
        let _ = writeln!(profiles, "{t},{sup},{inf}");
    }
    Ok((checks, vec![("profiles.csv".to_string(), profiles)]))
}

// --- disk_dynamics --------------------------------------------------------

fn disk_dynamics(cfg: &ScenarioConfig) -> Result<(Vec<Check>, Artifacts)> {
    let space = Space::poincare_disk();
    let f = Map::disk_mobius(0.5)?;
    let dcfg = dynamics_config(&space, cfg);
    let origin = Point::Xy(0.0, 0.0);
    let ln3 = 3.0f64.ln();

    let report = analyze(&space, &f, origin, &dcfg)?;

    let mut checks = Vec::new();
    checks.push(check(
        "divergence_rate",
        (report.divergence.c - ln3).abs() <= 1e-3,
        format!("c = ln 3 = {ln3:.6} within 1e-3"),
        vec![
            ("c", report.divergence.c),
            ("steps", report.divergence.steps as f64),
        ],
    ));
    checks.push(check(
        "minimal_displacement",
        (report.displacement.tau - ln3).abs() <= 1e-3,
        format!("tau = ln 3 = {ln3:.6} within 1e-3"),
        vec![("tau", report.displacement.tau)],
    ));
    let mut class_check = check(
        "classification",
        report.classification.class == MapClass::Hyperbolic,
        "hyperbolic: escaping orbit with positive rate",
        vec![
            ("c", report.classification.c),
            ("threshold", report.classification.threshold),
        ],
    );
    class_check.note = Some(report.classification.class.name().to_string());
    checks.push(class_check);

    let limit_check = match &report.limit_point {
        Some(lp) => match lp.target {
            BoundaryTarget::DiskAngle(theta) => {
                // Rim angles live in [0, 2 pi), so distance from angle 0
                // is circular: a hair below the rim seam reads as 2 pi.
                let wrapped = theta.rem_euclid(std::f64::consts::TAU);
                let angle_error = wrapped.min(std::f64::consts::TAU - wrapped);
                let mut c = check(
                    "limit_point",
                    lp.agree && angle_error <= 1e-2,
                    "all orbits leave toward rim angle 0 within 1e-2 (circular)",
                    vec![
                        ("angle", theta),
                        ("circular_error", angle_error),
                        ("spread", lp.spread),
                    ],
                );
                c.note = Some(format!("{}", lp.target));
                c
            }
            ref other => {
                let mut c = check(
                    "limit_point",
                    false,
                    "all orbits leave toward rim angle 0 within 1e-2",
                    vec![("spread", lp.spread)],
                );
                c.note = Some(format!("unexpected target {other}"));
                c
            }
        },
        None => check(
            "limit_point",
            false,
            "all orbits leave toward rim angle 0 within 1e-2",
            vec![],
        ),
    };
    checks.push(limit_check);

    let mut axis_csv = None;
    let axis_check = match &report.axis {
        AxisOutcome::Built(ax) => {
            let off_axis = ax
                .axis
                .samples()
                .iter()
                .filter_map(|(_, p)| p.xy())
                .map(|(_, y)| y.abs())
                .fold(0.0f64, f64::max);
            let mut table = String::from("t,x,y\n");
            for (t, p) in ax.axis.samples() {
                let (x, y) = p.xy().unwrap_or((f64::NAN, f64::NAN));
                let _ = writeln!(table, "{t},{x},{y}");
            }
            axis_csv = Some(table);
            check(
                "axis",
                ax.invariance_defect < 1e-6 && off_axis <= 1e-6 && ax.geodesy.passed,
                "invariant geodesic line on the real diameter: defect < 1e-6, |y| <= 1e-6",
                vec![
                    ("invariance_defect", ax.invariance_defect),
                    ("max_distance_from_real_axis", off_axis),
                    ("translation", ax.translation),
                ],
            )
        }
        AxisOutcome::Rejected { gap, tol } => {
            let mut c = check(
                "axis",
                false,
                "invariant geodesic line on the real diameter: defect < 1e-6, |y| <= 1e-6",
                vec![("gap", *gap), ("tol", *tol)],
            );
            c.note = Some("axis rejected although c = tau here".to_string());
            c
        }
        AxisOutcome::NotAttempted { reason } => {
            let mut c = check(
                "axis",
                false,
                "invariant geodesic line on the real diameter: defect < 1e-6, |y| <= 1e-6",
                vec![],
            );
            c.note = Some(reason.clone());
            c
        }
    };
    checks.push(axis_check);

    let probe = axis_uniqueness_probe(
        &space,
        &f,
        &[origin, Point::Xy(0.1, 0.0)],
        &dcfg,
    )?;
    checks.push(check(
        "axis_uniqueness",
        probe.unique && probe.max_separation < 1e-6,
        "axes from two starts coincide within 1e-6",
        vec![
            ("max_separation", probe.max_separation),
            ("starts", probe.axes.len() as f64),
        ],
    ));

    let ray = GeodesicPath::ray(
        &space,
        origin,
        &BoundaryTarget::DiskAngle(0.0),
        cfg.horizon,
        cfg.dt,
    )?;
    let dil = dilation(&space, &f, Approach::Ray(&ray), origin)?;
    checks.push(check(
        "dilation",
        (dil.log_lambda + ln3).abs() <= 1e-3,
        format!("log-dilation toward the attracting direction = -ln 3 = {:.6} within 1e-3", -ln3),
        vec![
            ("log_lambda", dil.log_lambda),
            ("lambda", dil.log_lambda.exp()),
            ("residual", dil.residual),
        ],
    ));

    let fixed = fixed_direction_check(
        &space,
        &f,
        &BoundaryTarget::DiskAngle(0.0),
        origin,
        &[1.0, 2.0],
        &dcfg,
    )?;
    checks.push(check(
        "fixed_direction",
        fixed.holds && (fixed.dilation.log_lambda + ln3).abs() <= 1e-3,
        "finite dilation lambda = 1/3 and images keep converging to the direction",
        vec![
            ("lambda", fixed.lambda),
            ("log_lambda", fixed.dilation.log_lambda),
        ],
    ));

    // Horoballs at the attracting direction, carved from the orbit of
    // the origin: each application moves a point ln 3 deeper, so f(0)
    // sits strictly inside the level-1 horoball while 0 itself sits
    // outside level 1/2.
    let orbit = dynamics::orbit(&space, &f, origin, dcfg.orbit_len)?;
    let f_origin = f
        .apply(&space, origin)?
        .ok_or_else(|| Error::config("the map left the disk at the origin"))?;
    let inner = horosphere_membership(
        &space,
        f_origin,
        &orbit.points,
        1.0,
        origin,
        HorosphereMode::Small,
    )?;
    let outer = horosphere_membership(
        &space,
        origin,
        &orbit.points,
        0.5,
        origin,
        HorosphereMode::Small,
    )?;
    checks.push(check(
        "horosphere_shift",
        inner.member && !outer.member && (inner.value + ln3).abs() <= 1e-3,
        "one application steps ln 3 deeper: f(0) inside level 1, 0 outside level 1/2",
        vec![
            ("step_change", inner.value),
            ("inner_margin", inner.margin),
            ("outer_margin", outer.margin),
        ],
    ));

    let mut orbit_csv = String::from("n,x,y,distance_from_start\n");
    for (n, p) in orbit.points.iter().enumerate() {
        let (x, y) = p.xy().unwrap_or((f64::NAN, f64::NAN));
        let d = if n == 0 { 0.0 } else { orbit.distances[n - 1] };
        let _ = writeln!(orbit_csv, "{n},{x},{y},{d}");
    }
    let mut dilation_csv = String::from("t,step_difference\n");
    for (t, v) in &dil.profile {
        let _ = writeln!(dilation_csv, "{t},{v}");
    }

    let mut artifacts = vec![("orbit.csv".to_string(), orbit_csv)];
    if let Some(table) = axis_csv {
        artifacts.push(("axis.csv".to_string(), table));
    }
    artifacts.push(("dilation.csv".to_string(), dilation_csv));
    Ok((checks, artifacts))
}

// --- slab_boundaries ------------------------------------------------------

fn slab_boundaries(cfg: &ScenarioConfig) -> Result<(Vec<Check>, Artifacts)> {
    let space = Space::l1_slab();
    let base = Point::Xy(0.0, 0.0);
    let heights = [-1.0, -0.5, 0.0, 0.5, 1.0];

    let mut directions = Vec::new();
    for &y in &heights {
        let ray = GeodesicPath::ray(
            &space,
            Point::Xy(0.0, y),
            &BoundaryTarget::AxialEnd(true),
            cfg.horizon,
            cfg.dt,
        )?;
        directions.push(Direction::from_ray(ray));
    }

    // Parallel rays stay exactly |y_i - y_j| <= 2 apart, so an
    // asymptoticity threshold just above 2 makes the class computation
    // itself certify the sup bound.
    let params = AsymptoticityParams {
        t_max: cfg.horizon,
        dt: cfg.dt,
        sup_threshold: 2.0 + 1e-9,
        ..Default::default()
    };

    let mut max_sup = 0.0f64;
    let mut profiles = Vec::new();
    for i in 0..directions.len() {
        for j in (i + 1)..directions.len() {
            let p = asymptoticity(&space, &directions[i].ray, &directions[j].ray, &params)?;
            max_sup = max_sup.max(p.sup_terminal);
            profiles.push((i, j, p));
        }
    }

    let landmarks = default_landmarks(&space, base, cfg.seed)?;
    let rep = compactification_compare(
        &space,
        &directions,
        base,
        &landmarks,
        cfg.tol_cluster,
        &params,
    )?;
    let min_separation = rep
        .verdicts
        .iter()
        .map(|v| v.horofunction_distance)
        .fold(f64::INFINITY, f64::min);

    let checks = vec![
        check(
            "ray_classes",
            rep.n_ray_classes == 1 && max_sup <= 2.0 + 1e-9,
            "exactly 1 asymptoticity class; pairwise sup profiles <= 2",
            vec![
                ("n_ray_classes", rep.n_ray_classes as f64),
                ("max_pairwise_sup", max_sup),
            ],
        ),
        check(
            "horofunction_clusters",
            rep.n_clusters == 5,
            "exactly 5 horofunction clusters from 5 rays",
            vec![("n_clusters", rep.n_clusters as f64)],
        ),
        check(
            "cluster_separation",
            min_separation >= 0.5 - 1e-9,
            "pairwise horofunction sup-distance >= 0.5 - 1e-9",
            vec![("min_pairwise_distance", min_separation)],
        ),
    ];

    let mut horofunctions = String::from("direction,start_y,landmark_x,landmark_y,value\n");
    for (i, sample) in rep.samples.iter().enumerate() {
        let d = rep.sample_direction[i];
        for (lm, v) in sample.landmarks().iter().zip(sample.values()) {
            let (lx, ly) = lm.xy().unwrap_or((f64::NAN, f64::NAN));
            let _ = writeln!(horofunctions, "{d},{},{lx},{ly},{v}", heights[d]);
        }
    }
    let mut profile_csv = String::from("i,j,t,same_parameter_distance,closest_point_distance\n");
    for (i, j, p) in &profiles {
        for ((t, sup), inf) in p.ts.iter().zip(&p.sup_profile).zip(&p.inf_profile) {
            let _ = writeln!(profile_csv, "{i},{j},{t},{sup},{inf}");
        }
    }
    Ok((
        checks,
        vec![
            ("horofunctions.csv".to_string(), horofunctions),
            ("profiles.csv".to_string(), profile_csv),
        ],
    ))
}

// --- strip_minus_Z --------------------------------------------------------

fn strip_space(h: f64) -> Result<Space> {
    let steps = 1.0 / h;
    if (steps - steps.round()).abs() > 1e-9 {
        return Err(Error::config(format!(
            "spacing {h} must divide the unit translation exactly"
        )));
    }
    Space::conformal_grid(&GridSpec {
        spacing: h,
        stencil: Stencil::Sixteen,
        density: DensitySpec::QuasihyperbolicPuncturedStrip { puncture_step: 1.0 },
        mask: MaskSpec::PuncturedStrip {
            x_min: -10.0,
            x_max: 10.0,
            puncture_step: 1.0,
            puncture_radius: None,
        },
    })
}

/// Node nearest the given plane coordinates, by Euclidean snap.
fn nearest_node(space: &Space, x: f64, y: f64) -> Point {
    let grid = space.grid_model().expect("grid space");
    let mut best = (f64::INFINITY, 0usize);
    for v in 0..grid.node_count() {
        let (px, py) = grid.coord_of(v);
        let score = (px - x).powi(2) + (py - y).powi(2);
        if score < best.0 {
            best = (score, v);
        }
    }
    Point::Node(best.1)
}

struct GridEstimates {
    spacing: f64,
    nodes: usize,
    c: f64,
    tau: f64,
    orbit_steps: usize,
    table: Vec<(usize, f64)>,
}

fn strip_estimates(space: &Space, f: &Map, cfg: &ScenarioConfig, h: f64) -> Result<GridEstimates> {
    let dcfg = dynamics_config(space, cfg);
    let disp = minimal_displacement(space, f, &dcfg)?;
    // Rate from a left-corridor node, so the orbit crosses the whole
    // window before the translation pushes it off the mask.
    let x0 = nearest_node(space, -9.5, 0.5);
    let rate = divergence_rate(space, f, x0, dcfg.orbit_len)?;
    Ok(GridEstimates {
        spacing: h,
        nodes: space.node_count().unwrap_or(0),
        c: rate.c,
        tau: disp.tau,
        orbit_steps: rate.steps,
        table: rate.table,
    })
}

fn strip_minus_z(cfg: &ScenarioConfig) -> Result<(Vec<Check>, Artifacts)> {
    let f = Map::conj_translate();
    let coarse = strip_space(cfg.spacing)?;
    let fine = strip_space(cfg.spacing / 2.0)?;
    let eps = coarse.distance_tolerance();

    let (defect, pairs) = isometry_defect(&coarse, &f, 1000, cfg.seed)?;
    let est_c = strip_estimates(&coarse, &f, cfg, cfg.spacing)?;
    let est_f = strip_estimates(&fine, &f, cfg, cfg.spacing / 2.0)?;

    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-12);
    let c_rel = rel(est_c.c, est_f.c);
    let tau_rel = rel(est_c.tau, est_f.tau);

    let probe = four_point_delta(&coarse, 20_000, cfg.seed)?;
    let delta = probe.delta_four_point.unwrap_or(f64::NAN);

    let checks = vec![
        check(
            "isometry_defect",
            defect <= 2.0 * eps,
            "reflect-and-shift distance defect <= 2 eps_d over 1000 node pairs",
            vec![
                ("defect", defect),
                ("pairs", pairs as f64),
                ("eps_d", eps),
            ],
        ),
        check(
            "rate_below_displacement",
            est_c.c <= est_c.tau + 5.0 * eps,
            "c <= tau + 5 eps_d on the working grid",
            vec![("c", est_c.c), ("tau", est_c.tau), ("eps_d", eps)],
        ),
        check(
            "resolution_stability",
            c_rel <= 0.10 && tau_rel <= 0.10,
            "c and tau move less than 10% from spacing h to h/2",
            vec![
                ("c_coarse", est_c.c),
                ("c_fine", est_f.c),
                ("c_relative_change", c_rel),
                ("tau_coarse", est_c.tau),
                ("tau_fine", est_f.tau),
                ("tau_relative_change", tau_rel),
            ],
        ),
        exploratory(
            "displacement_gap",
            "measured tau - c on the proxy grid; recorded, not judged",
            vec![
                ("gap", est_c.tau - est_c.c),
                ("gap_fine", est_f.tau - est_f.c),
            ],
        ),
        exploratory(
            "four_point_probe",
            "four-point defect over a pooled node sample; boundedness indicator only",
            vec![
                ("delta", delta),
                ("quadruples", probe.quadruples_sampled as f64),
            ],
        ),
    ];

    let mut estimates = String::from("spacing,nodes,c,tau,gap,orbit_steps\n");
    for est in [&est_c, &est_f] {
        let _ = writeln!(
            estimates,
            "{},{},{},{},{},{}",
            est.spacing,
            est.nodes,
            est.c,
            est.tau,
            est.tau - est.c,
            est.orbit_steps
        );
    }
    let mut convergence = String::from("n,distance,distance_over_n\n");
    for &(n, quotient) in &est_c.table {
        let _ = writeln!(convergence, "{n},{},{quotient}", quotient * n as f64);
    }
    let mask = coarse
        .grid_model()
        .map(|g| g.mask_csv())
        .unwrap_or_default();
    Ok((
        checks,
        vec![
            ("estimates.csv".to_string(), estimates),
            ("convergence.csv".to_string(), convergence),
            ("mask.csv".to_string(), mask),
        ],
    ))
}
