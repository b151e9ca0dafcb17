//! Acceptance gate: seven end-to-end criteria, each printing a single
//! verdict line with its measured values. Tolerances and runtime budgets
//! are pinned here and are not derived from library defaults, so a
//! regression in either accuracy or speed turns the line red.

#[path = "support/mod.rs"]
mod support;

use std::f64::consts::PI;
use std::time::Instant;

use coarselab::boundary::{busemann, compactification_compare, default_landmarks, Direction};
use coarselab::dynamics::{
    axis_uniqueness_probe, construct_axis, dilation, divergence_rate, minimal_displacement,
    Approach, DynamicsConfig,
};
use coarselab::geodesics::{asymptoticity, AsymptoticityParams, GeodesicPath};
use coarselab::hyperbolicity::{four_point_delta, slim_delta_of_triangle, slim_triangle_delta};
use coarselab::scenario::Verdict;
use coarselab::{BoundaryTarget, Error, Map, Point, ScenarioConfig, Space};

/// Print the one-line verdict for a criterion, then enforce it.
fn criterion(name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[{verdict}] {name}: {detail}");
    assert!(pass, "{name}: {detail}");
}

#[test]
fn criterion_1_cylinder_rate_displacement_gap() {
    let space = Space::flat_cylinder();
    let f = Map::cylinder_shift_flip(1.0);
    let x0 = Point::Xy(0.0, 0.0);

    let clock = Instant::now();
    let rate = divergence_rate(&space, &f, x0, 1000).unwrap();
    let rate_secs = clock.elapsed().as_secs_f64();

    let dcfg = DynamicsConfig::for_space(&space);
    let disp = minimal_displacement(&space, &f, &dcfg).unwrap();
    let tau_exact = (1.0 + PI * PI).sqrt();

    let rejection = construct_axis(&space, &f, x0, &dcfg);
    let gap = match rejection {
        Err(Error::NotAxial { gap, .. }) => gap,
        other => panic!("axis construction must refuse this map, got {other:?}"),
    };

    let pass = (rate.c - 1.0).abs() <= 1e-3
        && rate_secs < 1.0
        && (disp.tau - tau_exact).abs() <= 1e-5
        && (gap - (tau_exact - 1.0)).abs() <= 1e-3;
    criterion(
        "criterion-1 cylinder rate vs displacement",
        pass,
        &format!(
            "c={:.6} (want 1.0+/-1e-3, {:.0} ms), tau={:.9} (want {:.9}+/-1e-5), \
             axis rejected with gap={:.6} (want {:.6}+/-1e-3)",
            rate.c,
            rate_secs * 1e3,
            disp.tau,
            tau_exact,
            gap,
            tau_exact - 1.0
        ),
    );
}

#[test]
fn criterion_2_disk_mobius_dynamics() {
    let clock = Instant::now();
    let space = Space::poincare_disk();
    let f = Map::disk_mobius(0.5).unwrap();
    let origin = Point::Xy(0.0, 0.0);
    let ln3 = 3.0f64.ln();
    let dcfg = DynamicsConfig::for_space(&space);

    let rate = divergence_rate(&space, &f, origin, 1000).unwrap();
    let disp = minimal_displacement(&space, &f, &dcfg).unwrap();

    let ray = GeodesicPath::ray(&space, origin, &BoundaryTarget::DiskAngle(0.0), 20.0, 0.1)
        .unwrap();
    let dil = dilation(&space, &f, Approach::Ray(&ray), origin).unwrap();

    let axis = construct_axis(&space, &f, origin, &dcfg).unwrap();
    let max_off_diameter = axis
        .axis
        .samples()
        .iter()
        .map(|&(_, p)| p.xy().unwrap().1.abs())
        .fold(0.0f64, f64::max);

    let probe = axis_uniqueness_probe(
        &space,
        &f,
        &[origin, Point::Xy(0.1, 0.0)],
        &dcfg,
    )
    .unwrap();

    let secs = clock.elapsed().as_secs_f64();
    let pass = (rate.c - ln3).abs() <= 1e-3
        && (disp.tau - ln3).abs() <= 1e-3
        && (dil.log_lambda + ln3).abs() <= 1e-3
        && axis.invariance_defect <= 1e-6
        && axis.geodesy.passed
        && max_off_diameter <= 1e-6
        && probe.max_separation <= 1e-6
        && secs < 5.0;
    criterion(
        "criterion-2 disk hyperbolic isometry",
        pass,
        &format!(
            "c={:.6}, tau={:.6} (want ln3={:.6}+/-1e-3), log-dilation={:.6} (want {:.6}), \
             axis defect={:.2e} off-diameter={:.2e} (want <=1e-6), \
             axis separation across starts={:.2e} (want <=1e-6), {:.1} s (budget 5)",
            rate.c, disp.tau, ln3, dil.log_lambda, -ln3,
            axis.invariance_defect, max_off_diameter, probe.max_separation, secs
        ),
    );
}

#[test]
fn criterion_3_slab_ray_classes_vs_horofunctions() {
    let clock = Instant::now();
    let space = Space::l1_slab();
    let base = Point::Xy(0.0, 0.0);
    let starts = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let directions: Vec<Direction> = starts
        .iter()
        .map(|&y| {
            let ray = GeodesicPath::ray(
                &space,
                Point::Xy(0.0, y),
                &BoundaryTarget::AxialEnd(true),
                20.0,
                0.1,
            )
            .unwrap();
            Direction::from_ray(ray)
        })
        .collect();
    let landmarks = default_landmarks(&space, base, 7).unwrap();
    let params = AsymptoticityParams {
        t_max: 20.0,
        dt: 0.1,
        sup_threshold: 2.0 + 1e-9,
        ..Default::default()
    };
    let rep = compactification_compare(&space, &directions, base, &landmarks, 1e-2, &params)
        .unwrap();
    let min_hd = rep
        .verdicts
        .iter()
        .map(|v| v.horofunction_distance)
        .fold(f64::INFINITY, f64::min);
    let secs = clock.elapsed().as_secs_f64();

    let pass =
        rep.n_ray_classes == 1 && rep.n_clusters == 5 && min_hd >= 0.5 - 1e-9 && secs < 1.0;
    criterion(
        "criterion-3 slab boundary mismatch",
        pass,
        &format!(
            "ray classes={} (want 1, pairwise sup within 2), horofunction clusters={} (want 5), \
             min pairwise horofunction distance={:.6} (want >=0.5), {:.2} s (budget 1)",
            rep.n_ray_classes, rep.n_clusters, min_hd, secs
        ),
    );
}

#[test]
fn criterion_4_disk_approaching_rays() {
    let space = Space::poincare_disk();
    let origin = Point::Xy(0.0, 0.0);
    let sigma0 = Point::Xy(0.0, 0.5);
    let target = BoundaryTarget::DiskAngle(0.0);
    let horizon = 20.0;

    let gamma = GeodesicPath::ray(&space, origin, &target, horizon, 0.1).unwrap();
    let start_gap = space.distance(origin, sigma0).unwrap();
    let sigma_horizon = horizon + 2.0 * (start_gap + 2.0);
    let sigma = GeodesicPath::ray(&space, sigma0, &target, sigma_horizon, 0.1).unwrap();

    let params = AsymptoticityParams {
        t_max: horizon,
        dt: 0.1,
        ..Default::default()
    };
    let prof = asymptoticity(&space, &gamma, &sigma, &params).unwrap();
    let shift = prof.shift.expect("aligned shift exists for asymptotic rays");

    let mut landmarks = vec![sigma0];
    landmarks.extend(default_landmarks(&space, origin, 7).unwrap());
    let sample = busemann(&space, &gamma, origin, &landmarks).unwrap();
    let busemann_at_sigma0 = sample.value_at(sigma0).unwrap();

    let pass = prof.strongly_asymptotic
        && prof.inf_terminal < 1e-3
        && prof.inf_log_tail_slope < 0.0
        && (busemann_at_sigma0 - shift).abs() <= 1e-3;
    criterion(
        "criterion-4 approaching rays and their shift",
        pass,
        &format!(
            "inf distance at horizon={:.2e} (want <1e-3), log-slope={:.4} (want <0), \
             busemann value at the second start={:.6} vs aligned shift={:.6} (want within 1e-3; \
             closed form ln(5/3)={:.6})",
            prof.inf_terminal,
            prof.inf_log_tail_slope,
            busemann_at_sigma0,
            shift,
            (5.0f64 / 3.0).ln()
        ),
    );
}

#[test]
fn criterion_5_delta_across_spaces() {
    let tree = support::random_tree(150, 5);
    let tree_rep = four_point_delta(&tree, 10_000, 7).unwrap();

    let slab = Space::l1_slab();
    let slab_rep = four_point_delta(&slab, 10_000, 7).unwrap();

    let lattice = support::lattice_graph(20, 20);
    let slim = slim_triangle_delta(&lattice, 300, 0.5, 7).unwrap();
    let slim_delta = slim.delta_slim.unwrap();
    let w = slim.slim_witness.as_ref().unwrap();
    let (replayed, _, _) = slim_delta_of_triangle(&lattice, w.a, w.b, w.c, 0.5).unwrap();

    let tree_delta = tree_rep.delta_four_point.unwrap();
    let slab_delta = slab_rep.delta_four_point.unwrap();
    let pass = tree_rep.exhaustive
        && tree_delta == 0.0
        && slab_delta <= 2.0 + 1e-9
        && slim_delta >= 4.0
        && (replayed - slim_delta).abs() <= 1e-9;
    criterion(
        "criterion-5 hyperbolicity constants across spaces",
        pass,
        &format!(
            "tree delta4={tree_delta} over {} quadruples exhaustively (want exactly 0), \
             slab delta4={slab_delta:.6} (want <=2), flat-lattice slim delta={slim_delta:.3} \
             (want >=4, witness replays to {replayed:.3})",
            tree_rep.quadruples_sampled,
        ),
    );
}

#[test]
fn criterion_6_quasihyperbolic_grid_proxy() {
    let clock = Instant::now();
    let out = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::new("strip_minus_Z").unwrap();
    cfg.spacing = 0.02;
    cfg.out_dir = out.path().to_path_buf();
    cfg.write_csv = false;
    let report = coarselab::run_scenario(&cfg).unwrap();
    let secs = clock.elapsed().as_secs_f64();

    let verdict_of = |name: &str| {
        report
            .checks
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("check {name} missing"))
    };
    let measured = |name: &str, key: &str| -> f64 {
        verdict_of(name)
            .measured
            .iter()
            .find(|(k, _)| *k == key)
            .unwrap_or_else(|| panic!("{name} lacks {key}"))
            .1
    };

    let judged_pass = ["isometry_defect", "rate_below_displacement", "resolution_stability"]
        .iter()
        .all(|n| matches!(verdict_of(n).verdict, Verdict::Pass));
    let gap = measured("displacement_gap", "gap");
    let exploratory_present = matches!(verdict_of("displacement_gap").verdict, Verdict::Exploratory)
        && matches!(verdict_of("four_point_probe").verdict, Verdict::Exploratory);

    let pass = report.passed && judged_pass && exploratory_present && gap.is_finite() && secs < 120.0;
    criterion(
        "criterion-6 quasihyperbolic grid proxy at h=0.02",
        pass,
        &format!(
            "isometry defect={:.6} (eps_d {:.3}), c={:.4} <= tau={:.4}, \
             stability drift c={:.4} tau={:.4} (want <=0.10), exploratory gap={:.4}, \
             delta4 probe={:.4}, {:.0} s (budget 120)",
            measured("isometry_defect", "defect"),
            measured("isometry_defect", "eps_d"),
            measured("rate_below_displacement", "c"),
            measured("rate_below_displacement", "tau"),
            measured("resolution_stability", "c_relative_change"),
            measured("resolution_stability", "tau_relative_change"),
            gap,
            measured("four_point_probe", "delta"),
            secs
        ),
    );
}

#[test]
fn criterion_7_randomized_invariants() {
    let trials = 1000usize;
    let mut worst_identity = 0.0f64;
    let mut worst_symmetry = 0.0f64;
    let mut worst_triangle = 0.0f64;
    let mut spaces_swept = 0usize;

    let mut sweep = |name: &str, space: &Space| {
        let w = support::metric_worsts(space, trials, 97);
        assert!(w.identity <= 1e-12, "{name}: d(a,a) = {:.3e}", w.identity);
        assert!(w.symmetry <= 1e-9, "{name}: asymmetry {:.3e}", w.symmetry);
        assert!(w.triangle <= 1e-9, "{name}: triangle {:.3e}", w.triangle);
        worst_identity = worst_identity.max(w.identity);
        worst_symmetry = worst_symmetry.max(w.symmetry);
        worst_triangle = worst_triangle.max(w.triangle);
        spaces_swept += 1;
    };
    for (name, space) in support::closed_form_spaces() {
        sweep(name, &space);
    }
    sweep("random_tree", &support::random_tree(300, 11));
    sweep("lattice_12x12", &support::lattice_graph(12, 12));

    let mut worst_segment = 0.0f64;
    for (_, space) in support::closed_form_spaces() {
        let (worst, _) = support::segment_worst_defect(&space, 100, 16.0, 0.1, 1e-6, 131);
        worst_segment = worst_segment.max(worst);
    }

    let mut worst_base = 0.0f64;
    let mut worst_lipschitz = 0.0f64;
    let mut worst_shift_ratio = 0.0f64;
    for (_, space) in support::closed_form_spaces() {
        let h = support::horofunction_worsts(&space, 20, 20.0, 0.1, 151);
        worst_base = worst_base.max(h.base_offset);
        worst_lipschitz = worst_lipschitz.max(h.lipschitz_excess);
        worst_shift_ratio =
            worst_shift_ratio.max(support::busemann_base_shift_ratio(&space, 10, 20.0, 0.1, 163));
    }

    let power_cases: Vec<(Space, Map)> = vec![
        (Space::flat_cylinder(), Map::cylinder_shift_flip(1.0)),
        (Space::poincare_disk(), Map::disk_mobius(0.5).unwrap()),
        (Space::l1_slab(), Map::slab_shift(0.7).unwrap()),
        (Space::hyperbolic_strip(), Map::strip_translate(0.5)),
    ];
    let mut worst_power_dev = 0.0f64;
    for (space, f) in &power_cases {
        let dcfg = DynamicsConfig::for_space(space);
        let rep =
            coarselab::dynamics::power_consistency(space, f, 3, Point::Xy(0.0, 0.0), &dcfg)
                .unwrap();
        assert!(rep.c_linear && rep.tau_square_consistent);
        worst_power_dev = worst_power_dev.max(rep.worst_c_deviation);
    }

    let pass = worst_base <= 1e-9
        && worst_lipschitz <= 1e-9
        && worst_shift_ratio <= 1.0
        && worst_segment <= 1e-6
        && worst_power_dev <= 1e-2;
    criterion(
        "criterion-7 randomized invariant sweep",
        pass,
        &format!(
            "{} spaces x {} metric trials (worst identity={:.1e}, asymmetry={:.1e}, \
             triangle={:.1e}), segment defect<= {:.1e}, horofunction base offset<= {:.1e}, \
             Lipschitz excess<= {:.1e}, base-shift ratio<= {:.2}, power-rate deviation<= {:.1e}",
            spaces_swept,
            trials,
            worst_identity,
            worst_symmetry,
            worst_triangle,
            worst_segment,
            worst_base,
            worst_lipschitz,
            worst_shift_ratio,
            worst_power_dev
        ),
    );
}
