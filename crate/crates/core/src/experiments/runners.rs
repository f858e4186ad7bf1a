//! The individual experiment bodies. Each one writes quantities and checks
//! into the shared report and returns early on estimator errors, which the
//! dispatcher converts into failed checks.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caratheodory::{
    approx_measure_ladder, geometric_ladder, psi_exact, resolve_sample_count, set_identifier,
    zeta_delta_exact, zeta_delta_greedy, zeta_delta_upper, CoverConfig, CoverTarget,
    DomainRestriction, ExtReal, SizeFunction,
};
use crate::density::{centered_density, federer_density, set_mass, DensityEstimate, MeasureRep};
use crate::error::Result;
use crate::experiments::{ExperimentConfig, Report};
use crate::heisenberg::{alpha_beta, unit_ball_profile, ChordConstants, HCurve, HMetric};
use crate::metric::{FiniteSpace, MetricSpace, Point, SampledCurve, SetRep};

const MAX_CURVE_SAMPLES: usize = 1 << 20;

fn metric_space(metric: HMetric) -> MetricSpace {
    match metric {
        HMetric::Koranyi => MetricSpace::koranyi(),
        HMetric::Cc => MetricSpace::cc_heisenberg(),
    }
}

/// Empirical uncertainty of a density ladder: worst rung deviation from the
/// finest value.
fn rung_spread(est: &DensityEstimate) -> f64 {
    est.rungs
        .iter()
        .map(|r| (r.sup_value - est.extrapolated).abs())
        .fold(0.0, f64::max)
}

fn chord_constants(metric: HMetric, radial: usize, vertical: usize) -> Result<ChordConstants> {
    let profile = unit_ball_profile(metric, radial, vertical)?;
    alpha_beta(&profile)
}

/// Curve segment target with enough samples to certify covers at `delta`.
fn resolved_segment(
    space: &MetricSpace,
    curve: &Arc<SampledCurve>,
    interval: [f64; 2],
    delta: f64,
) -> Result<SetRep> {
    let samples = resolve_sample_count(space, curve, interval, delta, MAX_CURVE_SAMPLES)?;
    SetRep::curve_segment(curve.clone(), interval, samples)
}

pub(super) fn euclidean_area(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let space = MetricSpace::euclidean(2)?;
    let curve = Arc::new(SampledCurve::line(&[0.0, 0.0], &[1.0, 0.0], 65)?);
    let z = SizeFunction::hausdorff(1.0, 1.0)?;
    let tol = cfg.tolerances.euclidean_rel;

    let deltas = geometric_ladder(0.25, 0.5, 6)?;
    let seg = resolved_segment(&space, &curve, [0.0, 1.0], deltas[deltas.len() - 1])?;
    let ladder = approx_measure_ladder(&space, &seg.into(), &z, &deltas, &cfg.budgets.cover)?;
    report.quantity(
        "segment_length_estimate",
        ladder.extrapolated,
        None,
        "arc-advance ball cover at the finest delta",
    );
    report.check_rel(
        "unit_segment_length",
        ladder.extrapolated,
        1.0,
        tol,
        "cover estimate of the unit segment against its arclength",
    );
    report.check_that(
        "ladder_monotone",
        ladder.monotone_ok,
        if ladder.monotone_ok { 1.0 } else { 0.0 },
        1.0,
        cfg.budgets.cover.monotone_slack,
        "rung values nondecreasing as delta shrinks, within the configured slack",
    );

    let empty = zeta_delta_upper(&space, &CoverTarget::Empty, &z, deltas[0], &cfg.budgets.cover)?;
    report.check_abs("empty_target_zero", empty.value.0, 0.0, 0.0, "an empty target costs nothing");

    // mass from quadrature vs density-times-measure on sub-segments; the
    // density is constant, so a modest grid already integrates it exactly
    let mu = MeasureRep::curve_measure(curve.clone(), cfg.budgets.quad_samples.min(16_385), |_| 1.0)?;
    let zb = SizeFunction::spherical(1.0, 1.0)?;
    let subs = [[0.0, 0.5], [0.25, 0.75], [0.5, 1.0], [0.1, 0.3], [0.6, 0.9]];
    for (i, &[a, b]) in subs.iter().enumerate() {
        let sub_deltas = geometric_ladder(0.25 * (b - a), 0.5, 5)?;
        let target = resolved_segment(&space, &curve, [a, b], sub_deltas[sub_deltas.len() - 1])?;
        let mass = set_mass(&space, &mu, &target)?;
        let psi = approx_measure_ladder(&space, &target.into(), &z, &sub_deltas, &cfg.budgets.cover)?
            .extrapolated;
        let probes = 3;
        let mut density_sum = 0.0;
        for j in 0..probes {
            let s = a + (b - a) * (j as f64 + 0.5) / probes as f64;
            let est = federer_density(
                &space,
                &mu,
                &zb,
                &Point::xy(s, 0.0),
                &[0.08, 0.04],
                &cfg.budgets.search,
            )?;
            density_sum += est.extrapolated;
        }
        let integral = density_sum / probes as f64 * psi;
        report.quantity(
            &format!("sub_{i}_mass"),
            mass,
            None,
            "piecewise-linear quadrature of the length density",
        );
        report.quantity(
            &format!("sub_{i}_density_times_measure"),
            integral,
            None,
            "mean covering density times cover estimate",
        );
        report.check_rel(
            &format!("area_identity_sub_{i}"),
            integral,
            mass,
            tol,
            "density integral against the direct mass of the sub-segment",
        );
    }
    Ok(())
}

pub(super) fn spherical_area(cfg: &ExperimentConfig, report: &mut Report, metric: HMetric) -> Result<()> {
    let space = metric_space(metric);
    let hcurve = HCurve::vertical_segment(0.0, 1.0, 129)?;
    let mu_sr = hcurve.total_measure();
    report.quantity(
        "intrinsic_mass",
        mu_sr,
        None,
        "trapezoid quadrature of the vertical frame density",
    );

    let z = SizeFunction::spherical(2.0, 0.25)?;
    let deltas = match metric {
        HMetric::Koranyi => vec![0.4, 0.283, 0.2, 0.141, 0.1],
        HMetric::Cc => vec![0.8, 0.566, 0.4, 0.283, 0.2],
    };
    let seg = resolved_segment(&space, hcurve.curve(), [0.0, 1.0], deltas[deltas.len() - 1])?;
    let ladder = approx_measure_ladder(&space, &seg.into(), &z, &deltas, &cfg.budgets.cover)?;
    for rung in &ladder.entries {
        report.quantity(
            &format!("size_estimate_delta_{}", rung.delta),
            rung.estimate.value.0,
            None,
            "arc-advance ball cover",
        );
    }
    report.check_that(
        "ladder_monotone",
        ladder.monotone_ok,
        if ladder.monotone_ok { 1.0 } else { 0.0 },
        1.0,
        cfg.budgets.cover.monotone_slack,
        "rung values nondecreasing as delta shrinks, within the configured slack",
    );

    let constants = chord_constants(metric, cfg.budgets.profile_radial, cfg.budgets.profile_t)?;
    report.quantity(
        "alpha",
        constants.alpha,
        None,
        "unit-ball chord profile (longest vertical chord)",
    );
    let predicted = constants.alpha * ladder.extrapolated;
    report.quantity(
        "alpha_times_size",
        predicted,
        None,
        "chord constant times the finest cover estimate",
    );
    report.check_rel(
        "area_identity",
        predicted,
        mu_sr,
        cfg.tolerances.cover_rel,
        "chord constant times spherical estimate against the intrinsic mass",
    );

    let empty = zeta_delta_upper(&space, &CoverTarget::Empty, &z, deltas[0], &cfg.budgets.cover)?;
    report.check_abs(
        "zero_length_control",
        empty.value.0,
        0.0,
        0.0,
        "a zero-length target has zero mass and zero cover cost",
    );
    Ok(())
}

pub(super) fn density_gap(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let space = metric_space(HMetric::Cc);
    let hcurve = HCurve::vertical_segment(0.0, 1.0, 129)?;
    let mu = MeasureRep::intrinsic(&hcurve, cfg.budgets.quad_samples)?;
    let x = Point::xyt(0.0, 0.0, 0.5);
    let tol = cfg.tolerances.density_rel;

    let constants = chord_constants(HMetric::Cc, cfg.budgets.profile_radial, cfg.budgets.profile_t)?;
    report.quantity(
        "alpha_reference",
        constants.alpha,
        None,
        "unit-ball chord profile (off-axis maximum)",
    );
    report.quantity(
        "beta_reference",
        constants.beta,
        None,
        "unit-ball chord profile (through the center)",
    );

    let centered = centered_density(
        &space,
        &mu,
        &x,
        2.0,
        &[0.2, 0.1, 0.05],
        cfg.budgets.search.trend_tol,
    )?;
    let centered_unc = rung_spread(&centered).max(tol * centered.extrapolated);
    report.quantity(
        "centered_density",
        centered.extrapolated,
        Some(centered_unc),
        "ball mass over radius squared at the finest rung",
    );
    report.check_rel(
        "centered_matches_central_chord",
        centered.extrapolated,
        constants.beta,
        tol,
        "centered density against the central chord constant",
    );

    let z = SizeFunction::spherical(2.0, 0.25)?;
    let federer = federer_density(&space, &mu, &z, &x, &[0.4, 0.2, 0.1], &cfg.budgets.search)?;
    let federer_unc = rung_spread(&federer).max(tol * federer.extrapolated);
    report.quantity(
        "covering_density",
        federer.extrapolated,
        Some(federer_unc),
        "supremum of ball quotients over off-center balls at the finest rung",
    );
    report.check_rel(
        "covering_matches_best_chord",
        federer.extrapolated,
        constants.alpha,
        tol,
        "covering density against the longest-chord constant",
    );

    let combined = centered_unc + federer_unc;
    let gap = federer.extrapolated - centered.extrapolated;
    report.quantity("density_gap", gap, Some(combined), "covering minus centered estimate");
    report.check_that(
        "gap_significant",
        gap > 5.0 * combined,
        gap,
        5.0 * combined,
        0.0,
        "the gap must exceed five times the combined uncertainty",
    );
    report.check_that(
        "covering_dominates_centered",
        federer.extrapolated >= centered.extrapolated - combined,
        federer.extrapolated,
        centered.extrapolated,
        combined,
        "centered balls are a subfamily of the covering search family",
    );

    let t_mid = 0.5 * (federer.extrapolated + centered.extrapolated);
    report.quantity("midpoint_constant", t_mid, None, "mean of the two density estimates");
    let sandwich = (t_mid - centered.extrapolated).min(federer.extrapolated - t_mid);
    report.check_that(
        "midpoint_strictly_between",
        sandwich > 0.0,
        sandwich,
        0.0,
        0.0,
        "smaller side of the strict sandwich around the midpoint constant",
    );

    // consequence: the intrinsic mass strictly exceeds the midpoint constant
    // times a one-rung spherical estimate of the whole segment
    let seg = resolved_segment(&space, hcurve.curve(), [0.0, 1.0], 0.2)?;
    let s2 = zeta_delta_upper(&space, &seg.into(), &z, 0.2, &cfg.budgets.cover)?.value.0;
    report.quantity("segment_size_estimate", s2, None, "arc-advance ball cover at delta 0.2");
    report.check_that(
        "mass_exceeds_scaled_size",
        mu.total_mass() > t_mid * s2,
        mu.total_mass(),
        t_mid * s2,
        0.0,
        "intrinsic mass against the midpoint constant times the cover estimate",
    );
    report.note(
        "the centered density underestimates the covering density by the measured gap, so centered \
         comparisons alone cannot reproduce ball-cover measures without a multiplicative constant",
    );
    Ok(())
}

pub(super) fn ratio_bound(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let radial = cfg.budgets.profile_radial;
    let vertical = cfg.budgets.profile_t;
    let base = chord_constants(HMetric::Cc, radial, vertical)?;
    let ratio = base.alpha / base.beta;
    report.quantity("alpha", base.alpha, None, "unit-ball chord profile");
    report.quantity("beta", base.beta, None, "unit-ball chord profile");
    report.quantity("argmax_radius", base.argmax_radius, None, "unit-ball chord profile");
    report.quantity("ratio", ratio, None, "alpha over beta");

    report.check_that(
        "ratio_strictly_above_one",
        ratio >= 1.01,
        ratio,
        1.01,
        0.0,
        "the longest chord must beat the central chord by at least one percent",
    );
    report.check_that("ratio_at_most_four", ratio <= 4.0, ratio, 4.0, 0.0, "upper bound on the chord ratio");

    let doubled = chord_constants(HMetric::Cc, 2 * radial, 2 * vertical)?;
    let ratio_doubled = doubled.alpha / doubled.beta;
    report.quantity("ratio_doubled_resolution", ratio_doubled, None, "alpha over beta at twice the grid");
    report.check_rel(
        "resolution_stability",
        ratio_doubled,
        ratio,
        0.005,
        "ratio change under profile-resolution doubling",
    );

    let control = chord_constants(HMetric::Koranyi, radial, vertical)?;
    report.quantity("convex_control_ratio", control.alpha / control.beta, None, "unit-ball chord profile");
    report.check_abs(
        "convex_control_ratio_is_one",
        control.alpha / control.beta,
        1.0,
        cfg.tolerances.constant_abs,
        "a convex ball attains its longest vertical chord through the center",
    );
    report.check_abs(
        "central_chord_constant",
        base.beta,
        1.0 / (2.0 * PI),
        cfg.tolerances.constant_abs,
        "central chord against the closed-form axis distance",
    );
    Ok(())
}

/// Parameter interval of the curve inside the closed ball around the point at
/// `center_param`, found by bisection along the (axis-monotone) trace.
fn ball_trace_interval(
    space: &MetricSpace,
    curve: &Arc<SampledCurve>,
    center_param: f64,
    radius: f64,
) -> Result<[f64; 2]> {
    let [a, b] = curve.domain();
    let dim = curve.dim();
    let x = curve.position(center_param);
    let dist = |s: f64| -> Result<f64> {
        space.distance_coords(&x[..dim], &curve.position(s)[..dim])
    };
    let solve = |mut inside: f64, mut outside: f64| -> Result<f64> {
        for _ in 0..100 {
            let mid = 0.5 * (inside + outside);
            if dist(mid)? <= radius {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(inside)
    };
    let lo = if dist(a)? <= radius { a } else { solve(center_param, a)? };
    let hi = if dist(b)? <= radius { b } else { solve(center_param, b)? };
    Ok([lo, hi])
}

fn ball_trace_ratio(
    space: &MetricSpace,
    curve: &Arc<SampledCurve>,
    center_param: f64,
    radius: f64,
    z: &SizeFunction,
    cover_cfg: &CoverConfig,
) -> Result<f64> {
    let [lo, hi] = ball_trace_interval(space, curve, center_param, radius)?;
    let dim = curve.dim();
    let trace_diam =
        space.distance_coords(&curve.position(lo)[..dim], &curve.position(hi)[..dim])?;
    let deltas = geometric_ladder(0.75 * trace_diam, 0.5, 4)?;
    let target = resolved_segment(space, curve, [lo, hi], deltas[deltas.len() - 1])?;
    let ladder = approx_measure_ladder(space, &target.into(), z, &deltas, cover_cfg)?;
    Ok(ladder.extrapolated / (radius * radius))
}

pub(super) fn sigma2_chain(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let space = metric_space(HMetric::Koranyi);
    let hcurve = HCurve::vertical_segment(0.0, 1.0, 129)?;
    let z = SizeFunction::spherical(2.0, 0.25)?;
    let radii = [0.2, 0.1, 0.05];
    let mut interior_finest = f64::NAN;
    for &r in &radii {
        let ratio = ball_trace_ratio(&space, hcurve.curve(), 0.5, r, &z, &cfg.budgets.cover)?;
        report.quantity(
            &format!("interior_ratio_r_{r}"),
            ratio,
            None,
            "cover estimate of the ball trace over radius squared",
        );
        interior_finest = ratio;
    }
    report.check_rel(
        "interior_ratio_unit_limit",
        interior_finest,
        1.0,
        cfg.tolerances.cover_rel,
        "ball-trace estimate over r^2 at the finest radius, interior point",
    );

    let endpoint = ball_trace_ratio(&space, hcurve.curve(), 0.0, radii[2], &z, &cfg.budgets.cover)?;
    report.quantity(
        "endpoint_ratio",
        endpoint,
        None,
        "cover estimate of the one-sided ball trace over radius squared",
    );
    report.check_rel(
        "endpoint_ratio_halves",
        endpoint,
        0.5 * interior_finest,
        cfg.tolerances.cover_rel,
        "an endpoint sees half the mass of an interior point",
    );

    report.quantity(
        "size_ratio_lower_bound",
        0.5,
        None,
        "half of the verified unit limit, exact arithmetic",
    );
    report.check_abs(
        "lower_bound_arithmetic",
        0.5 * 1.0,
        0.5,
        0.0,
        "the derived bound is half of the unit limit",
    );
    report.note(
        "the comparison constant between the two ball constructions is taken as given, not re-derived; \
         the derived lower bound halves the measured limit",
    );
    Ok(())
}

struct FiniteInstance {
    space: FiniteSpace,
    weights: Vec<f64>,
    candidates: Vec<Vec<usize>>,
    zeta_values: Vec<f64>,
    zeta_singleton: Vec<Option<f64>>,
    z: SizeFunction,
}

fn dyadic(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo..=hi) as f64 / 16.0
}

/// Random finite instance: shortest-path metric closure of random edge
/// weights, atomic weights, and a table size function on at most 24 candidate
/// sets (all singletons unless one is deliberately dropped, the full set,
/// plus random extras).
fn random_instance(rng: &mut ChaCha8Rng) -> Result<FiniteInstance> {
    let n = rng.gen_range(3..=8usize);
    let mut d = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(2..=16) as f64 / 8.0;
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let space = FiniteSpace::new(labels, d)?;

    let weights: Vec<f64> = if rng.gen_bool(0.05) {
        vec![0.0; n]
    } else {
        (0..n).map(|_| dyadic(rng, 0, 32)).collect()
    };

    let dropped = if rng.gen_bool(0.1) { Some(rng.gen_range(0..n)) } else { None };
    let mut sets: BTreeSet<Vec<usize>> =
        (0..n).filter(|i| Some(*i) != dropped).map(|i| vec![i]).collect();
    sets.insert((0..n).collect());
    for _ in 0..rng.gen_range(0..=10usize) {
        let k = rng.gen_range(2..=n);
        let mut s = BTreeSet::new();
        while s.len() < k {
            s.insert(rng.gen_range(0..n));
        }
        sets.insert(s.into_iter().collect());
    }
    let candidates: Vec<Vec<usize>> = sets.into_iter().collect();

    let mut entries = BTreeMap::new();
    let mut zeta_values = Vec::with_capacity(candidates.len());
    let mut zeta_singleton = vec![None; n];
    for c in &candidates {
        let zero_chance = if c.len() == 1 { 0.1 } else { 0.05 };
        let value = if rng.gen_bool(zero_chance) { 0.0 } else { dyadic(rng, 1, 32) };
        if c.len() == 1 {
            zeta_singleton[c[0]] = Some(value);
        }
        zeta_values.push(value);
        entries.insert(set_identifier(&space, c)?, ExtReal(value));
    }
    let z = SizeFunction::table(entries, DomainRestriction::AllClosedSets)?;
    Ok(FiniteInstance { space, weights, candidates, zeta_values, zeta_singleton, z })
}

/// Density at a point of a finite instance: as scales shrink, only the
/// singleton remains admissible, and the family excludes sets where both the
/// size and the mass vanish.
enum PointDensity {
    NotFine,
    Value(f64),
}

fn density_at(inst: &FiniteInstance, x: usize) -> PointDensity {
    match inst.zeta_singleton[x] {
        None => PointDensity::NotFine,
        Some(zeta) => {
            let mass = inst.weights[x];
            if zeta == 0.0 && mass == 0.0 {
                PointDensity::NotFine
            } else if zeta == 0.0 {
                PointDensity::Value(f64::INFINITY)
            } else {
                PointDensity::Value(mass / zeta)
            }
        }
    }
}

pub(super) fn federer_inequalities(cfg: &ExperimentConfig, report: &mut Report) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let instances = cfg.budgets.instances;

    let mut greedy_violations = 0usize;
    let mut monotone_violations = 0usize;
    let mut upper_checked = 0usize;
    let mut lower_checked = 0usize;
    let mut fineness_skipped = 0usize;
    let mut infinite_density_skipped = 0usize;
    let mut zero_size_skipped = 0usize;
    let mut trivial_zero_mass = 0usize;
    let mut max_upper_violation = 0.0f64;
    let mut min_lower_margin = f64::INFINITY;
    let mut max_eta = 1.0f64;
    let mut max_candidates = 0usize;

    for _ in 0..instances {
        let inst = random_instance(&mut rng)?;
        let n = inst.space.len();
        max_candidates = max_candidates.max(inst.candidates.len());

        // solver invariants on a random target at three scales
        let mut target: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if target.is_empty() {
            target.push(rng.gen_range(0..n));
        }
        let d_max = inst.space.subset_diameter(&(0..n).collect::<Vec<_>>())?;
        let mut prev = f64::NEG_INFINITY;
        for delta in [d_max, 0.5 * d_max, 0.0] {
            let exact = zeta_delta_exact(&inst.space, &target, &inst.candidates, &inst.z, delta)?;
            let greedy = zeta_delta_greedy(&inst.space, &target, &inst.candidates, &inst.z, delta)?;
            if !(greedy.value.0 >= exact.value.0) {
                greedy_violations += 1;
            }
            if !(exact.value.0 >= prev) {
                monotone_violations += 1;
            }
            prev = exact.value.0;
        }

        // hypothesis gates for the two density inequalities
        let densities: Vec<PointDensity> = (0..n).map(|x| density_at(&inst, x)).collect();
        if densities.iter().any(|d| matches!(d, PointDensity::NotFine)) {
            fineness_skipped += 1;
            continue;
        }
        let values: Vec<f64> = densities
            .iter()
            .map(|d| match d {
                PointDensity::Value(v) => *v,
                PointDensity::NotFine => unreachable!(),
            })
            .collect();

        // small densities bound the mass of every subset by the scaled size
        let max_f = values.iter().fold(0.0f64, |a, &b| a.max(b));
        if max_f.is_infinite() {
            infinite_density_skipped += 1;
        } else {
            if max_f == 0.0 {
                trivial_zero_mass += 1;
            }
            let t = if max_f == 0.0 { 0.05 } else { 1.05 * max_f };
            for mask in 0u32..(1 << n) {
                let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                let mass: f64 = members.iter().map(|&i| inst.weights[i]).sum();
                let psi = psi_exact(&inst.space, &members, &inst.candidates, &inst.z)?.value.0;
                max_upper_violation = max_upper_violation.max(mass - t * psi);
            }
            upper_checked += 1;
        }

        // large densities force the total mass above the scaled size of the
        // dense part; needs every candidate size positive so the enlargement
        // constant is finite (the full set contains every enlarged candidate)
        if inst.zeta_values.contains(&0.0) {
            zero_size_skipped += 1;
            continue;
        }
        let full_idx = inst.candidates.iter().position(|c| c.len() == n).expect("full set");
        let zeta_full = inst.zeta_values[full_idx];
        for &v in &inst.zeta_values {
            max_eta = max_eta.max(zeta_full / v);
        }
        let dense: Vec<usize> =
            (0..n).filter(|&x| values[x] > 0.0 && values[x].is_finite()).collect();
        let margin = if dense.is_empty() {
            inst.weights.iter().sum::<f64>()
        } else {
            let t = 0.95 * dense.iter().map(|&x| values[x]).fold(f64::INFINITY, f64::min);
            let psi_dense = psi_exact(&inst.space, &dense, &inst.candidates, &inst.z)?.value.0;
            inst.weights.iter().sum::<f64>() - t * psi_dense
        };
        min_lower_margin = min_lower_margin.min(margin);
        lower_checked += 1;
    }

    for (name, value) in [
        ("instances", instances as f64),
        ("upper_checked", upper_checked as f64),
        ("lower_checked", lower_checked as f64),
        ("fineness_skipped", fineness_skipped as f64),
        ("infinite_density_skipped", infinite_density_skipped as f64),
        ("zero_size_skipped", zero_size_skipped as f64),
        ("trivial_zero_mass", trivial_zero_mass as f64),
        ("enlargement_factor_max", max_eta),
        ("max_candidates", max_candidates as f64),
    ] {
        report.quantity(name, value, None, "instance generator bookkeeping");
    }

    report.check_abs(
        "greedy_never_below_exact",
        greedy_violations as f64,
        0.0,
        0.0,
        "greedy cover values dominate the exact infimum on every instance and scale",
    );
    report.check_abs(
        "premeasure_monotone_in_delta",
        monotone_violations as f64,
        0.0,
        0.0,
        "exact premeasure values never decrease as delta shrinks",
    );
    report.check_abs(
        "upper_bound_from_small_densities",
        max_upper_violation,
        0.0,
        1e-12,
        "max over checked instances and all subsets of mass minus scaled size",
    );
    report.check_that(
        "lower_bound_from_large_densities",
        min_lower_margin >= -1e-12,
        min_lower_margin,
        0.0,
        1e-12,
        "min over checked instances of total mass minus scaled size of the dense part",
    );
    let enough = upper_checked >= instances / 4 && lower_checked >= instances / 4;
    report.check_that(
        "hypothesis_coverage",
        enough,
        upper_checked.min(lower_checked) as f64,
        (instances / 4) as f64,
        0.0,
        "both inequalities must actually run on a sizable fraction of the instances",
    );
    report.note(
        "skipped instances fail a stated hypothesis: a dropped singleton breaks fineness, a \
         zero-size singleton with positive mass gives an infinite density, and a zero-size \
         candidate makes the enlargement factor unbounded",
    );
    Ok(())
}
