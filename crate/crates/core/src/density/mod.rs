//! Upper densities of measures against size functions.
//!
//! The quotient of a set is the measure over the size (with the extended-real
//! conventions), the covering density at x is the limsup of quotients over
//! shrinking balls containing x (not necessarily centered there), and the
//! centered density divides ball mass by a power of the radius.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caratheodory::{SizeFunction, SizeKind};
use crate::error::{GmtError, Result};
use crate::heisenberg::{cc_lower_bound_coords, cc_upper_bound_coords, HCurve, HPoint};
use crate::metric::{Ball, MetricSpace, Point, SampledCurve, SetRep};

/// A concrete measure the density estimators can integrate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum MeasureRep {
    /// Atoms with nonnegative weights.
    WeightedCloud { points: Vec<Point>, weights: Vec<f64> },
    /// Absolutely continuous measure on a curve: a density sampled on an even
    /// parameter grid, integrated piecewise-linearly.
    CurveMeasure {
        curve: Arc<SampledCurve>,
        params: Vec<f64>,
        density: Vec<f64>,
        cumulative: Vec<f64>,
        total: f64,
    },
}

impl MeasureRep {
    pub fn weighted_cloud(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(GmtError::Invalid("need matching nonempty points and weights".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(GmtError::Invalid("weights must be finite and nonnegative".into()));
        }
        Ok(MeasureRep::WeightedCloud { points, weights })
    }

    pub fn curve_measure(
        curve: Arc<SampledCurve>,
        quad_samples: usize,
        density_fn: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if quad_samples < 16 {
            return Err(GmtError::Invalid("need at least 16 quadrature samples".into()));
        }
        let [a, b] = curve.domain();
        let params: Vec<f64> = (0..quad_samples)
            .map(|i| a + (b - a) * i as f64 / (quad_samples - 1) as f64)
            .collect();
        let density: Vec<f64> = params.iter().map(|&s| density_fn(s)).collect();
        if density.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(GmtError::Invalid("density must be finite and nonnegative".into()));
        }
        let mut cumulative = Vec::with_capacity(quad_samples);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in params.windows(2).zip(density.windows(2)) {
            let (p, d) = w;
            acc += 0.5 * (d[0] + d[1]) * (p[1] - p[0]);
            cumulative.push(acc);
        }
        Ok(MeasureRep::CurveMeasure { curve, params, density, cumulative, total: acc })
    }

    /// The intrinsic measure of a group curve: density |v| along the parameter.
    pub fn intrinsic(curve: &HCurve, quad_samples: usize) -> Result<Self> {
        let c = curve.clone();
        MeasureRep::curve_measure(curve.curve().clone(), quad_samples, move |s| {
            c.vertical_density(s)
        })
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            MeasureRep::WeightedCloud { weights, .. } => weights.iter().sum(),
            MeasureRep::CurveMeasure { total, .. } => *total,
        }
    }

    /// Mass of a parameter interval of the curve (piecewise-linear density
    /// integrated exactly, partial cells included).
    pub fn interval_mass(&self, lo: f64, hi: f64) -> Result<f64> {
        match self {
            MeasureRep::WeightedCloud { .. } => {
                Err(GmtError::Unsupported("interval mass needs a curve measure".into()))
            }
            MeasureRep::CurveMeasure { params, cumulative, .. } => {
                if hi <= lo {
                    return Ok(0.0);
                }
                Ok(self.cumulative_at(hi, params, cumulative) - self.cumulative_at(lo, params, cumulative))
            }
        }
    }

    fn cumulative_at(&self, s: f64, params: &[f64], cumulative: &[f64]) -> f64 {
        let density = match self {
            MeasureRep::CurveMeasure { density, .. } => density,
            _ => unreachable!(),
        };
        let n = params.len();
        if s <= params[0] {
            return 0.0;
        }
        if s >= params[n - 1] {
            return cumulative[n - 1];
        }
        let i = params.partition_point(|&p| p <= s) - 1;
        let h = params[i + 1] - params[i];
        let u = (s - params[i]) / h;
        let d0 = density[i];
        let d1 = density[i + 1];
        // integral of the linear density over the partial cell
        cumulative[i] + h * (d0 * u + 0.5 * (d1 - d0) * u * u)
    }
}

/// Cheap inclusion test against a ball, with an exact fallback. The carnot
/// bounds skip most of the expensive geodesic solves.
fn in_ball_coords(space: &MetricSpace, center: &[f64], p: &[f64], radius: f64) -> Result<bool> {
    if let MetricSpace::CcHeisenberg { .. } = space {
        if cc_lower_bound_coords(center, p) > radius {
            return Ok(false);
        }
        if cc_upper_bound_coords(center, p) <= radius {
            return Ok(true);
        }
    }
    Ok(space.distance_coords(center, p)? <= radius)
}

/// Mass of a metric ball.
pub fn ball_mass(space: &MetricSpace, mu: &MeasureRep, ball: &Ball) -> Result<f64> {
    ball_mass_windowed(space, mu, ball, None)
}

/// Like [ball_mass], restricted to a contiguous parameter index range of a
/// curve measure (callers must guarantee the ball cannot touch the curve
/// outside the window).
pub fn ball_mass_windowed(
    space: &MetricSpace,
    mu: &MeasureRep,
    ball: &Ball,
    window: Option<(usize, usize)>,
) -> Result<f64> {
    match mu {
        MeasureRep::WeightedCloud { points, weights } => {
            let mut acc = 0.0;
            for (p, w) in points.iter().zip(weights) {
                if space.ball_contains(ball, p)? {
                    acc += w;
                }
            }
            Ok(acc)
        }
        MeasureRep::CurveMeasure { curve, params, .. } => {
            let center = ball.center.as_coords()?;
            let dim = curve.dim();
            if center.len() != dim {
                return Err(GmtError::DimensionMismatch { expected: dim, got: center.len() });
            }
            let (lo_i, hi_i) = match window {
                Some((a, b)) => (a.min(params.len() - 1), b.min(params.len() - 1)),
                None => (0, params.len() - 1),
            };
            let r = ball.radius;
            let dist_at = |s: f64| -> Result<f64> {
                let p = curve.position(s);
                space.distance_coords(center, &p[..dim])
            };
            let refine = |mut inside: f64, mut outside: f64| -> Result<f64> {
                // boundary crossing between an inside and an outside parameter
                for _ in 0..60 {
                    let mid = 0.5 * (inside + outside);
                    if dist_at(mid)? <= r {
                        inside = mid;
                    } else {
                        outside = mid;
                    }
                }
                Ok(0.5 * (inside + outside))
            };
            let mut mass = 0.0;
            let mut open: Option<f64> = None;
            let mut prev_in = false;
            for i in lo_i..=hi_i {
                let p = curve.position(params[i]);
                let inside = in_ball_coords(space, center, &p[..dim], r)?;
                match (prev_in, inside) {
                    (false, true) => {
                        let start = if i == lo_i {
                            params[i]
                        } else {
                            refine(params[i], params[i - 1])?
                        };
                        open = Some(start);
                    }
                    (true, false) => {
                        let end = refine(params[i - 1], params[i])?;
                        mass += self_interval(mu, open.take().expect("open interval"), end)?;
                    }
                    _ => {}
                }
                prev_in = inside;
            }
            if let Some(start) = open {
                mass += self_interval(mu, start, params[hi_i])?;
            }
            Ok(mass)
        }
    }
}

fn self_interval(mu: &MeasureRep, lo: f64, hi: f64) -> Result<f64> {
    mu.interval_mass(lo, hi)
}

/// Measure of a represented set.
pub fn set_mass(space: &MetricSpace, mu: &MeasureRep, set: &SetRep) -> Result<f64> {
    set.validate(space)?;
    match (mu, set) {
        (_, SetRep::Ball(ball)) => ball_mass(space, mu, ball),
        (MeasureRep::WeightedCloud { points, weights }, SetRep::Cloud(targets)) => {
            let mut acc = 0.0;
            for (p, w) in points.iter().zip(weights) {
                if targets.iter().any(|t| t == p) {
                    acc += w;
                }
            }
            Ok(acc)
        }
        (MeasureRep::CurveMeasure { .. }, SetRep::Cloud(_)) => Ok(0.0),
        (MeasureRep::CurveMeasure { curve, .. }, SetRep::CurveSegment { curve: seg, interval, .. }) => {
            if Arc::ptr_eq(curve, seg) {
                mu.interval_mass(interval[0], interval[1])
            } else {
                Err(GmtError::Unsupported(
                    "curve segment mass needs the measure's own curve".into(),
                ))
            }
        }
        (MeasureRep::WeightedCloud { .. }, SetRep::CurveSegment { .. }) => Err(GmtError::Unsupported(
            "atom masses on curve segments are not decidable here".into(),
        )),
    }
}

/// The three-case quotient of a set: +infinity when the size vanishes, zero
/// when the size is infinite, the ratio otherwise.
pub fn quotient(space: &MetricSpace, mu: &MeasureRep, z: &SizeFunction, set: &SetRep) -> Result<f64> {
    let zeta = z.size_value(space, set)?;
    if zeta == 0.0 {
        return Ok(f64::INFINITY);
    }
    if zeta.is_infinite() {
        return Ok(0.0);
    }
    Ok(set_mass(space, mu, set)? / zeta)
}

/// Search effort knobs for the density estimators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    /// Radii tried per rung (largest just under half the rung scale).
    pub radius_grid: usize,
    /// Planar offset directions for ball centers.
    pub planar_dirs: usize,
    /// Offset magnitudes per direction.
    pub planar_mags: usize,
    /// Vertical offset steps (group spaces scale them with radius squared).
    pub vertical_steps: usize,
    /// Coordinate-descent iterations refining the best ball.
    pub refine_steps: usize,
    /// Relative tolerance classifying the rung trend.
    pub trend_tol: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            radius_grid: 16,
            planar_dirs: 16,
            planar_mags: 16,
            vertical_steps: 16,
            refine_steps: 40,
            trend_tol: 0.05,
        }
    }
}

/// One rung of a density ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityRung {
    pub scale: f64,
    pub sup_value: f64,
    pub argmax: Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Stable,
    Increasing,
    Decreasing,
    Noisy,
}

/// Density estimates along a shrinking ladder of scales.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub rungs: Vec<DensityRung>,
    /// Value at the finest scale; no fitted limits.
    pub extrapolated: f64,
    pub trend: Trend,
}

fn classify_trend(rungs: &[DensityRung], tol: f64) -> Trend {
    if rungs.len() < 2 {
        return Trend::Stable;
    }
    let scale = rungs
        .iter()
        .map(|r| r.sup_value.abs())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let mut up = false;
    let mut down = false;
    for w in rungs.windows(2) {
        let diff = w[1].sup_value - w[0].sup_value;
        if diff > tol * scale {
            up = true;
        } else if diff < -tol * scale {
            down = true;
        }
    }
    match (up, down) {
        (false, false) => Trend::Stable,
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        (true, true) => Trend::Noisy,
    }
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(GmtError::Invalid("ladder needs at least one scale".into()));
    }
    if scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(GmtError::Invalid("scales must be positive and finite".into()));
    }
    if scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GmtError::Invalid("scales must be strictly decreasing".into()));
    }
    Ok(())
}

/// Offset candidates around x for center search: planar directions times
/// magnitudes, vertical steps (scaled quadratically in group spaces), and
/// always the zero offset.
fn center_candidates(space: &MetricSpace, x: &[f64], r: f64, budget: &SearchBudget) -> Vec<Vec<f64>> {
    let dim = x.len();
    let group = matches!(space, MetricSpace::Koranyi | MetricSpace::CcHeisenberg { .. });
    let vertical_scale = if group { 0.26 * r * r } else { 0.95 * r };
    let compose = |off: [f64; 3]| -> Vec<f64> {
        if group {
            let p = HPoint::new(x[0], x[1], x[2]);
            p.mul(&HPoint::new(off[0], off[1], off[2])).coords()[..dim].to_vec()
        } else {
            (0..dim).map(|k| x[k] + off[k]).collect()
        }
    };
    let mut out = vec![x.to_vec()];
    let planar_span = if dim == 1 { 1 } else { budget.planar_dirs.max(1) };
    for d in 0..planar_span {
        let angle = std::f64::consts::TAU * d as f64 / planar_span as f64;
        let (ux, uy) = if dim == 1 {
            (1.0, 0.0)
        } else {
            (angle.cos(), angle.sin())
        };
        for k in 1..=budget.planar_mags.max(1) {
            let m = 0.95 * r * k as f64 / budget.planar_mags.max(1) as f64;
            let base = [ux * m, uy * m, 0.0];
            out.push(compose(base));
            if dim == 1 {
                out.push(compose([-base[0], 0.0, 0.0]));
            }
        }
    }
    if dim >= 3 {
        let steps = budget.vertical_steps.max(2);
        for k in 0..steps {
            let f = -1.0 + 2.0 * k as f64 / (steps - 1) as f64;
            if f == 0.0 {
                continue;
            }
            out.push(compose([0.0, 0.0, f * vertical_scale]));
            // vertical offsets combined with a mid-magnitude planar shift
            for d in 0..planar_span {
                let angle = std::f64::consts::TAU * d as f64 / planar_span as f64;
                let m = 0.6 * r;
                out.push(compose([angle.cos() * m, angle.sin() * m, f * vertical_scale]));
            }
        }
    }
    out
}

struct RungSearch<'a> {
    space: &'a MetricSpace,
    mu: &'a MeasureRep,
    alpha: f64,
    c: f64,
    x: Vec<f64>,
    window: Option<(usize, usize)>,
}

impl RungSearch<'_> {
    /// Quotient of a candidate ball, or None when it misses x.
    fn eval(&self, center: &[f64], radius: f64) -> Result<Option<f64>> {
        if self.space.distance_coords(center, &self.x)? > radius {
            return Ok(None);
        }
        let ball = Ball::closed(Point::Coords(center.to_vec()), radius);
        let mass = ball_mass_windowed(self.space, self.mu, &ball, self.window)?;
        let zeta = self.c * (2.0 * radius).powf(self.alpha);
        Ok(Some(mass / zeta))
    }
}

/// Estimates the covering density of mu at x: per rung, the supremum of ball
/// quotients over closed balls of diameter below the rung scale that contain
/// x (centers may be offset from x).
pub fn federer_density(
    space: &MetricSpace,
    mu: &MeasureRep,
    z: &SizeFunction,
    x: &Point,
    scales: &[f64],
    budget: &SearchBudget,
) -> Result<DensityEstimate> {
    check_scales(scales)?;
    let (alpha, c) = match z.kind {
        SizeKind::Spherical { alpha, c } => (alpha, c),
        _ => {
            return Err(GmtError::Domain(
                "covering density search needs a spherical size function".into(),
            ))
        }
    };
    let x_coords = x.as_coords()?.to_vec();
    if space.coord_dim() != Some(x_coords.len()) {
        return Err(GmtError::DimensionMismatch {
            expected: space.coord_dim().unwrap_or(0),
            got: x_coords.len(),
        });
    }

    let mut rungs = Vec::with_capacity(scales.len());
    for &eps in scales {
        let r_max = 0.4999 * eps;
        let window = curve_window(space, mu, &x_coords, 2.0 * r_max)?;
        let search = RungSearch {
            space,
            mu,
            alpha,
            c,
            x: x_coords.clone(),
            window,
        };

        // coarse pass: parallel over the radius grid, deterministic pick
        let per_radius: Vec<(f64, Vec<f64>, f64)> = (0..budget.radius_grid.max(1))
            .into_par_iter()
            .map(|j| {
                let radius = r_max * (j + 1) as f64 / budget.radius_grid.max(1) as f64;
                let mut best_q = -1.0;
                let mut best_center = x_coords.clone();
                for cand in center_candidates(space, &x_coords, radius, budget) {
                    if let Some(q) = search.eval(&cand, radius)? {
                        if q > best_q {
                            best_q = q;
                            best_center = cand;
                        }
                    }
                }
                Ok((best_q, best_center, radius))
            })
            .collect::<Result<_>>()?;
        let (mut best_q, mut best_center, mut best_radius) = per_radius
            .into_iter()
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.2.total_cmp(&a.2)))
            .expect("radius grid is nonempty");

        // coordinate descent on center coordinates and radius
        let dim = x_coords.len();
        let mut steps: Vec<f64> = (0..dim)
            .map(|k| {
                if k == 2 && matches!(space, MetricSpace::Koranyi | MetricSpace::CcHeisenberg { .. }) {
                    0.05 * best_radius * best_radius
                } else {
                    0.1 * best_radius
                }
            })
            .collect();
        let mut r_step = 0.1 * r_max;
        for _ in 0..budget.refine_steps {
            let mut moved = false;
            for k in 0..dim {
                for sgn in [1.0, -1.0] {
                    let mut cand = best_center.clone();
                    cand[k] += sgn * steps[k];
                    if let Some(q) = search.eval(&cand, best_radius)? {
                        if q > best_q {
                            best_q = q;
                            best_center = cand;
                            moved = true;
                        }
                    }
                }
            }
            for sgn in [1.0, -1.0] {
                let r = (best_radius + sgn * r_step).clamp(1e-3 * r_max, r_max);
                if r != best_radius {
                    if let Some(q) = search.eval(&best_center, r)? {
                        if q > best_q {
                            best_q = q;
                            best_radius = r;
                            moved = true;
                        }
                    }
                }
            }
            if !moved {
                for s in steps.iter_mut() {
                    *s *= 0.5;
                }
                r_step *= 0.5;
            }
        }

        // feasibility re-check of the recorded ball
        let ball = Ball::closed(Point::Coords(best_center.clone()), best_radius);
        if space.distance_coords(&best_center, &x_coords)? > best_radius || 2.0 * best_radius >= eps {
            return Err(GmtError::Solver("density argmax ball infeasible".into()));
        }
        let recheck = ball_mass(space, mu, &ball)? / (c * (2.0 * best_radius).powf(alpha));
        let sup_value = if best_q < 0.0 { 0.0 } else { recheck };
        rungs.push(DensityRung { scale: eps, sup_value, argmax: ball });
    }

    let extrapolated = rungs.last().map(|r| r.sup_value).unwrap_or(0.0);
    let trend = classify_trend(&rungs, budget.trend_tol);
    Ok(DensityEstimate { rungs, extrapolated, trend })
}

/// Centered upper density: ball mass at x divided by radius to the alpha,
/// along a shrinking radius ladder.
pub fn centered_density(
    space: &MetricSpace,
    mu: &MeasureRep,
    x: &Point,
    alpha: f64,
    radii: &[f64],
    trend_tol: f64,
) -> Result<DensityEstimate> {
    check_scales(radii)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(GmtError::Invalid("exponent must be positive and finite".into()));
    }
    let mut rungs = Vec::with_capacity(radii.len());
    for &r in radii {
        let ball = Ball::closed(x.clone(), r);
        let mass = ball_mass(space, mu, &ball)?;
        rungs.push(DensityRung {
            scale: r,
            sup_value: mass / r.powf(alpha),
            argmax: ball,
        });
    }
    let extrapolated = rungs.last().map(|r| r.sup_value).unwrap_or(0.0);
    let trend = classify_trend(&rungs, trend_tol);
    Ok(DensityEstimate { rungs, extrapolated, trend })
}

/// Contiguous quadrature index range within `reach` of x (padded), or None
/// when the measure is not a curve measure.
fn curve_window(
    space: &MetricSpace,
    mu: &MeasureRep,
    x: &[f64],
    reach: f64,
) -> Result<Option<(usize, usize)>> {
    let (curve, params) = match mu {
        MeasureRep::CurveMeasure { curve, params, .. } => (curve, params),
        _ => return Ok(None),
    };
    let dim = curve.dim();
    let mut lo = usize::MAX;
    let mut hi = 0usize;
    for (i, &s) in params.iter().enumerate() {
        let p = curve.position(s);
        let near = match space {
            MetricSpace::CcHeisenberg { .. } => cc_lower_bound_coords(x, &p[..dim]) <= reach,
            _ => space.distance_coords(x, &p[..dim])? <= reach,
        };
        if near {
            lo = lo.min(i);
            hi = hi.max(i);
        }
    }
    if lo == usize::MAX {
        // nothing nearby: empty window collapses every mass to zero
        return Ok(Some((0, 0)));
    }
    Ok(Some((lo.saturating_sub(2), (hi + 2).min(params.len() - 1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_segment_measure() -> (MetricSpace, MeasureRep) {
        let sp = MetricSpace::euclidean(2).unwrap();
        let curve = Arc::new(SampledCurve::line(&[0.0, 0.0], &[1.0, 0.0], 65).unwrap());
        // length measure: density = |gamma'| = 1
        let mu = MeasureRep::curve_measure(curve, 4097, |_| 1.0).unwrap();
        (sp, mu)
    }

    #[test]
    fn quotient_three_cases() {
        let (sp, mu) = unit_segment_measure();
        let z = SizeFunction::hausdorff(1.0, 1.0).unwrap();
        // zero size: a singleton cloud
        let single = SetRep::cloud(vec![Point::xy(0.5, 0.0)]).unwrap();
        assert!(quotient(&sp, &mu, &z, &single).unwrap().is_infinite());
        // finite size: a ball
        let ball = SetRep::Ball(Ball::closed(Point::xy(0.5, 0.0), 0.1));
        assert_relative_eq!(quotient(&sp, &mu, &z, &ball).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn quotient_infinite_size_gives_zero() {
        use crate::caratheodory::{DomainRestriction, ExtReal};
        use crate::metric::FiniteSpace;
        use std::collections::BTreeMap;
        let f = FiniteSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap();
        let sp = MetricSpace::finite(f);
        let mu = MeasureRep::weighted_cloud(vec![Point::label(0)], vec![0.3]).unwrap();
        let mut entries = BTreeMap::new();
        entries.insert("{a}".to_string(), ExtReal(f64::INFINITY));
        let z = SizeFunction::table(entries, DomainRestriction::AllClosedSets).unwrap();
        let set = SetRep::cloud(vec![Point::label(0)]).unwrap();
        assert_eq!(quotient(&sp, &mu, &z, &set).unwrap(), 0.0);
    }

    #[test]
    fn cloud_ball_mass_counts_atoms() {
        let sp = MetricSpace::euclidean(2).unwrap();
        let mu = MeasureRep::weighted_cloud(
            vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.0, 2.0)],
            vec![1.0, 2.0, 4.0],
        )
        .unwrap();
        let ball = Ball::closed(Point::xy(0.0, 0.0), 1.0);
        assert_relative_eq!(ball_mass(&sp, &mu, &ball).unwrap(), 3.0);
        assert_relative_eq!(mu.total_mass(), 7.0);
    }

    #[test]
    fn curve_ball_mass_matches_chord() {
        let (sp, mu) = unit_segment_measure();
        // interior ball: chord length 2r
        let ball = Ball::closed(Point::xy(0.4, 0.0), 0.13);
        assert_relative_eq!(ball_mass(&sp, &mu, &ball).unwrap(), 0.26, epsilon = 1e-9);
        // ball off the line cuts a shorter chord
        let off = Ball::closed(Point::xy(0.4, 0.05), 0.13);
        let expect = 2.0 * (0.13f64 * 0.13 - 0.05 * 0.05).sqrt();
        assert_relative_eq!(ball_mass(&sp, &mu, &off).unwrap(), expect, epsilon = 1e-9);
        // ball past the endpoint clips
        let clip = Ball::closed(Point::xy(0.0, 0.0), 0.2);
        assert_relative_eq!(ball_mass(&sp, &mu, &clip).unwrap(), 0.2, epsilon = 1e-9);
    }

    #[test]
    fn interval_mass_is_exact_for_linear_density() {
        let curve = Arc::new(SampledCurve::line(&[0.0, 0.0], &[1.0, 0.0], 17).unwrap());
        let mu = MeasureRep::curve_measure(curve, 33, |s| s).unwrap();
        // integral of s over [a, b] = (b^2 - a^2)/2, exact for piecewise-linear
        assert_relative_eq!(mu.interval_mass(0.25, 0.75).unwrap(), (0.5625 - 0.0625) / 2.0, epsilon = 1e-13);
        assert_relative_eq!(mu.total_mass(), 0.5, epsilon = 1e-13);
        assert_eq!(mu.interval_mass(0.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn segment_federer_density_is_one() {
        let (sp, mu) = unit_segment_measure();
        let z = SizeFunction::spherical(1.0, 1.0).unwrap();
        let est = federer_density(
            &sp,
            &mu,
            &z,
            &Point::xy(0.5, 0.0),
            &[0.2, 0.1, 0.05],
            &SearchBudget::default(),
        )
        .unwrap();
        for rung in &est.rungs {
            assert_relative_eq!(rung.sup_value, 1.0, epsilon = 1e-6);
        }
        assert_eq!(est.trend, Trend::Stable);
    }

    #[test]
    fn segment_centered_density_is_two() {
        let (sp, mu) = unit_segment_measure();
        let est = centered_density(&sp, &mu, &Point::xy(0.5, 0.0), 1.0, &[0.2, 0.1, 0.05], 0.05).unwrap();
        for rung in &est.rungs {
            assert_relative_eq!(rung.sup_value, 2.0, epsilon = 1e-9);
        }
        assert_eq!(est.trend, Trend::Stable);
    }

    #[test]
    fn atom_density_increases_as_scales_shrink() {
        let sp = MetricSpace::euclidean(2).unwrap();
        let mu = MeasureRep::weighted_cloud(vec![Point::xy(0.0, 0.0)], vec![1.0]).unwrap();
        let z = SizeFunction::spherical(1.0, 1.0).unwrap();
        let est = federer_density(
            &sp,
            &mu,
            &z,
            &Point::xy(0.0, 0.0),
            &[0.4, 0.2, 0.1],
            &SearchBudget::default(),
        )
        .unwrap();
        assert_eq!(est.trend, Trend::Increasing);
        assert!(est.rungs[2].sup_value > est.rungs[0].sup_value);
    }

    #[test]
    fn density_off_support_is_zero() {
        let (sp, mu) = unit_segment_measure();
        let z = SizeFunction::spherical(1.0, 1.0).unwrap();
        let est = federer_density(
            &sp,
            &mu,
            &z,
            &Point::xy(0.5, 3.0),
            &[0.2, 0.1],
            &SearchBudget::default(),
        )
        .unwrap();
        assert_eq!(est.extrapolated, 0.0);
    }

    #[test]
    fn segment_density_is_scale_invariant() {
        let sp = MetricSpace::euclidean(2).unwrap();
        let z = SizeFunction::spherical(1.0, 1.0).unwrap();
        for lambda in [0.5, 2.0] {
            let curve = Arc::new(SampledCurve::line(&[0.0, 0.0], &[lambda, 0.0], 65).unwrap());
            // length measure of the rescaled segment: |gamma'| = lambda
            let mu = MeasureRep::curve_measure(curve, 4097, move |_| lambda).unwrap();
            let scales = [0.2 * lambda, 0.1 * lambda];
            let est = federer_density(
                &sp,
                &mu,
                &z,
                &Point::xy(0.5 * lambda, 0.0),
                &scales,
                &SearchBudget::default(),
            )
            .unwrap();
            assert_relative_eq!(est.extrapolated, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn scale_ladders_are_validated() {
        let (sp, mu) = unit_segment_measure();
        let z = SizeFunction::spherical(1.0, 1.0).unwrap();
        let bad = federer_density(&sp, &mu, &z, &Point::xy(0.5, 0.0), &[0.1, 0.2], &SearchBudget::default());
        assert!(bad.is_err());
        let hausdorff = SizeFunction::hausdorff(1.0, 1.0).unwrap();
        let wrong_kind =
            federer_density(&sp, &mu, &hausdorff, &Point::xy(0.5, 0.0), &[0.2, 0.1], &SearchBudget::default());
        assert!(wrong_kind.is_err());
    }
}
