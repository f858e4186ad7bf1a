//! End-to-end acceptance gates. Each test prints one line naming the
//! criterion it guards, with its tolerances and runtime budget pinned here
//! rather than inherited from experiment defaults.

use std::f64::consts::PI;
use std::time::Instant;

use gmtlab::experiments::{self, Check, ExperimentConfig, ExperimentKind, Report};
use gmtlab::heisenberg::{
    alpha_beta, cc_axis_distance_shooting, cc_distance, koranyi_distance, unit_ball_profile,
    HMetric, HPoint, DEFAULT_CC_TOL,
};
use gmtlab::metric::MetricSpace;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SUITE_SEED: u64 = 42;

fn run_seeded(kind: ExperimentKind) -> Report {
    let cfg = ExperimentConfig::with_seed(kind, SUITE_SEED);
    let report = experiments::run(&cfg);
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    assert!(
        report.passed,
        "{} report failed these checks: {failed:?}",
        report.experiment
    );
    report
}

fn check<'a>(report: &'a Report, name: &str) -> &'a Check {
    report
        .checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("{} report has no check named {name}", report.experiment))
}

fn quantity(report: &Report, name: &str) -> f64 {
    report
        .quantities
        .iter()
        .find(|q| q.name == name)
        .unwrap_or_else(|| panic!("{} report has no quantity named {name}", report.experiment))
        .value
}

fn uncertainty(report: &Report, name: &str) -> f64 {
    report
        .quantities
        .iter()
        .find(|q| q.name == name)
        .and_then(|q| q.uncertainty)
        .unwrap_or_else(|| panic!("{} quantity {name} carries no uncertainty", report.experiment))
}

fn conclude(label: &str, t0: Instant, budget_s: f64) {
    let dt = t0.elapsed().as_secs_f64();
    assert!(dt < budget_s, "{label} took {dt:.1} s, budget {budget_s} s");
    println!("criterion {label}: PASS ({dt:.1} s)");
}

fn sample_hpoint(rng: &mut ChaCha8Rng) -> HPoint {
    HPoint::new(
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-2.0..2.0),
    )
}

/// Axiom battery for one distance function on Heisenberg coordinates. The
/// slack is per comparison and scaled by the largest distance involved, so
/// exact formulas must hold at close to machine precision while the solver
/// backed distance gets room for its stated residual.
fn group_metric_axioms(d: impl Fn(&HPoint, &HPoint) -> f64, configs: usize, tol: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..configs {
        let p = sample_hpoint(&mut rng);
        let q = sample_hpoint(&mut rng);
        let w = sample_hpoint(&mut rng);
        let g = sample_hpoint(&mut rng);
        let lambda = rng.gen_range(0.3..3.0);

        let dpq = d(&p, &q);
        let dqp = d(&q, &p);
        let dpw = d(&p, &w);
        let dqw = d(&q, &w);
        let scale = dpq.max(dpw).max(dqw).max(1.0);
        let slack = tol * scale;

        assert!(dpq >= 0.0 && d(&p, &p) <= slack, "identity failed at {p:?}");
        assert!((dpq - dqp).abs() <= slack, "symmetry: {dpq} vs {dqp}");
        assert!(
            dpw <= dpq + dqw + slack,
            "triangle: d(p,w)={dpw} > {dpq}+{dqw}"
        );

        let left = d(&g.mul(&p), &g.mul(&q));
        assert!(
            (left - dpq).abs() <= slack,
            "left invariance: {left} vs {dpq}"
        );

        let dilated = d(&p.dilate(lambda), &q.dilate(lambda));
        assert!(
            (dilated - lambda * dpq).abs() <= tol * scale.max(lambda * scale),
            "homogeneity: {dilated} vs {}",
            lambda * dpq
        );
    }
}

fn euclidean_metric_axioms(configs: usize, tol: f64, seed: u64) {
    let sp = MetricSpace::euclidean(3).unwrap();
    let d = |a: &[f64], b: &[f64]| sp.distance_coords(a, b).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect()
    };
    for _ in 0..configs {
        let p = sample(&mut rng);
        let q = sample(&mut rng);
        let w = sample(&mut rng);
        let g = sample(&mut rng);
        let lambda: f64 = rng.gen_range(0.3..3.0);

        let dpq = d(&p, &q);
        assert!((dpq - d(&q, &p)).abs() <= tol);
        assert!(d(&p, &w) <= dpq + d(&q, &w) + tol);
        assert!(d(&p, &p) <= tol);

        let shift = |a: &[f64]| -> Vec<f64> { a.iter().zip(&g).map(|(x, o)| x + o).collect() };
        assert!((d(&shift(&p), &shift(&q)) - dpq).abs() <= tol);

        let scale = |a: &[f64]| -> Vec<f64> { a.iter().map(|x| lambda * x).collect() };
        assert!((d(&scale(&p), &scale(&q)) - lambda * dpq).abs() <= tol * lambda.max(1.0));
    }
}

#[test]
fn criterion_1_metric_axioms_and_homogeneity() {
    let t0 = Instant::now();
    euclidean_metric_axioms(1000, 1e-9, 11);
    group_metric_axioms(koranyi_distance, 1000, 1e-9, 12);
    group_metric_axioms(cc_distance, 1000, 10.0 * DEFAULT_CC_TOL, 13);
    conclude("1 (metric axioms and homogeneity, 1000 configs per metric)", t0, 30.0);
}

#[test]
fn criterion_2_cc_axis_constant() {
    let t0 = Instant::now();
    let origin = HPoint::new(0.0, 0.0, 0.0);
    for tau in [0.01, 0.1, 1.0] {
        let d = cc_distance(&origin, &HPoint::new(0.0, 0.0, tau));
        let reference = (4.0 * PI * tau).sqrt();
        assert!(
            (d - reference).abs() <= 1e-4 * reference,
            "axis distance at tau={tau}: {d} vs {reference}"
        );
        let shot = cc_axis_distance_shooting(tau, 2000);
        assert!(
            (d - shot).abs() <= 1e-4 * reference,
            "solver and shooting oracle disagree at tau={tau}: {d} vs {shot}"
        );
    }
    let consts = alpha_beta(&unit_ball_profile(HMetric::Cc, 96, 384).unwrap()).unwrap();
    let beta_ref = 1.0 / (2.0 * PI);
    assert!(
        (consts.beta - beta_ref).abs() <= 1e-3,
        "central chord constant {} vs {beta_ref}",
        consts.beta
    );
    conclude("2 (cc axis distance and central chord constant)", t0, 60.0);
}

#[test]
fn criterion_3_chord_ratio_bound() {
    let t0 = Instant::now();
    let report = run_seeded(ExperimentKind::RatioBound);
    let ratio = quantity(&report, "ratio");
    assert!(ratio > 1.0 && ratio <= 4.0, "ratio {ratio} outside (1, 4]");
    let doubled = quantity(&report, "ratio_doubled_resolution");
    assert!(
        (doubled - ratio).abs() <= 0.005 * ratio,
        "ratio moved {ratio} -> {doubled} under resolution doubling"
    );
    let control = quantity(&report, "convex_control_ratio");
    assert!(
        (control - 1.0).abs() <= 1e-3,
        "convex control ratio {control} should be 1"
    );
    conclude("3 (chord ratio strictly in (1,4], stable, convex control 1)", t0, 120.0);
}

#[test]
fn criterion_4_density_gap() {
    let t0 = Instant::now();
    let report = run_seeded(ExperimentKind::DensityGap);

    let beta_ref = quantity(&report, "beta_reference");
    let centered = quantity(&report, "centered_density");
    assert!(
        (centered - beta_ref).abs() <= 0.03 * beta_ref,
        "centered density {centered} vs central chord {beta_ref}"
    );

    let alpha_ref = quantity(&report, "alpha_reference");
    let covering = quantity(&report, "covering_density");
    assert!(
        (covering - alpha_ref).abs() <= 0.03 * alpha_ref,
        "covering density {covering} vs best chord {alpha_ref}"
    );

    let gap = quantity(&report, "density_gap");
    let combined = uncertainty(&report, "density_gap");
    assert!(
        gap > 5.0 * combined,
        "gap {gap} not significant against combined uncertainty {combined}"
    );
    assert!(check(&report, "covering_dominates_centered").passed);
    assert!(check(&report, "midpoint_strictly_between").passed);
    assert!(check(&report, "mass_exceeds_scaled_size").passed);
    conclude("4 (centered vs covering density gap at a nonhorizontal point)", t0, 300.0);
}

fn spherical_area_case(kind: ExperimentKind, label: &str) {
    let t0 = Instant::now();
    let report = run_seeded(kind);
    let mass = quantity(&report, "intrinsic_mass");
    let scaled = quantity(&report, "alpha_times_size");
    assert!(
        (scaled - mass).abs() <= 0.05 * mass,
        "{}: alpha times size {scaled} vs intrinsic mass {mass}",
        report.experiment
    );
    assert!(check(&report, "ladder_monotone").passed);
    assert!(check(&report, "zero_length_control").passed);
    conclude(label, t0, 300.0);
}

#[test]
fn criterion_5_spherical_area_koranyi() {
    spherical_area_case(
        ExperimentKind::SphericalAreaKoranyi,
        "5 (spherical area within 5%, koranyi metric)",
    );
}

#[test]
fn criterion_5_spherical_area_cc() {
    spherical_area_case(
        ExperimentKind::SphericalAreaCc,
        "5 (spherical area within 5%, cc metric)",
    );
}

#[test]
fn criterion_6_euclidean_sanity() {
    let t0 = Instant::now();
    let report = run_seeded(ExperimentKind::EuclideanArea);
    let length = quantity(&report, "segment_length_estimate");
    assert!(
        (length - 1.0).abs() <= 0.02,
        "unit segment length estimate {length}"
    );
    for i in 0..5 {
        let c = check(&report, &format!("area_identity_sub_{i}"));
        assert!(
            (c.observed - c.reference).abs() <= 0.02 * c.reference.abs(),
            "sub-segment {i}: density integral {} vs mass {}",
            c.observed,
            c.reference
        );
    }
    conclude("6 (euclidean unit segment and 5 sub-segment area identities)", t0, 60.0);
}

#[test]
fn criterion_7_sigma2_chain() {
    let t0 = Instant::now();
    let report = run_seeded(ExperimentKind::Sigma2Chain);
    let interior = check(&report, "interior_ratio_unit_limit");
    assert!(
        (interior.observed - 1.0).abs() <= 0.05,
        "interior ball-trace ratio {} should approach 1",
        interior.observed
    );
    assert!(check(&report, "endpoint_ratio_halves").passed);
    assert!(check(&report, "lower_bound_arithmetic").passed);
    assert_eq!(quantity(&report, "size_ratio_lower_bound"), 0.5);
    conclude("7 (ball-trace ratio tends to 1, giving the 1/2 threshold)", t0, 180.0);
}

#[test]
fn criterion_8_finite_cover_oracle_suite() {
    let t0 = Instant::now();
    let report = run_seeded(ExperimentKind::FedererInequalities);
    assert_eq!(quantity(&report, "instances"), 200.0);
    assert!(
        quantity(&report, "max_candidates") <= 24.0,
        "instance generator exceeded the candidate budget"
    );
    for name in [
        "greedy_never_below_exact",
        "premeasure_monotone_in_delta",
        "upper_bound_from_small_densities",
        "lower_bound_from_large_densities",
        "hypothesis_coverage",
    ] {
        assert!(check(&report, name).passed, "{name} failed");
    }
    conclude("8 (200 randomized finite instances, exact cover invariants)", t0, 120.0);
}
