//! Ball-cover strategies behind the upper delta-premeasure estimates.
//!
//! Greedy net: walk the target points in order, covering the first uncovered
//! one with the tightest admissible ball. Arc advance: push a front along a
//! curve, choosing each ball's center (anchor along the curve plus a
//! transverse offset) to maximize the certified parameter reach.

use std::sync::Arc;

use crate::caratheodory::{CoverConfig, CoverEstimate, ExtReal, SizeFunction, K_RES};
use crate::error::{GmtError, Result};
use crate::heisenberg::HPoint;
use crate::metric::{Ball, MetricSpace, Point, SampledCurve, SetRep};

pub(crate) fn greedy_net_cover(
    space: &MetricSpace,
    points: &[Point],
    z: &SizeFunction,
    delta: f64,
) -> Result<CoverEstimate> {
    let n = points.len();
    let mut covered = vec![false; n];
    let mut cover = Vec::new();
    let mut total = 0.0;
    let half = delta / 2.0;
    while let Some(i) = covered.iter().position(|&c| !c) {
        let mut claimed = Vec::new();
        let mut radius = 0.0_f64;
        for j in i..n {
            if covered[j] {
                continue;
            }
            let d = space.distance(&points[i], &points[j])?;
            if d <= half {
                claimed.push(j);
                radius = radius.max(d);
            }
        }
        for &j in &claimed {
            covered[j] = true;
        }
        let ball = Ball::closed(points[i].clone(), radius);
        for &j in &claimed {
            if !space.ball_contains(&ball, &points[j])? {
                return Err(GmtError::Solver("net cover lost a claimed point".into()));
            }
        }
        total += z.size_value(space, &SetRep::Ball(ball.clone()))?;
        cover.push(SetRep::Ball(ball));
    }
    Ok(CoverEstimate {
        value: ExtReal(total),
        delta,
        cover,
        exact: false,
        gap_bound: None,
        infeasible_witness: None,
    })
}

/// Doubles the sample count until consecutive samples are within delta/K_RES
/// of each other in the metric, so covers at scale delta can be certified.
pub fn resolve_sample_count(
    space: &MetricSpace,
    curve: &SampledCurve,
    interval: [f64; 2],
    delta: f64,
    max_samples: usize,
) -> Result<usize> {
    let mut count = 33usize.min(max_samples.max(2));
    loop {
        let params = curve.sample_params(interval, count)?;
        let dim = curve.dim();
        let mut maxd = 0.0_f64;
        for w in params.windows(2) {
            let a = curve.position(w[0]);
            let b = curve.position(w[1]);
            maxd = maxd.max(space.distance_coords(&a[..dim], &b[..dim])?);
        }
        if maxd <= delta / K_RES as f64 {
            return Ok(count);
        }
        if count >= max_samples {
            return Err(GmtError::Unsupported(format!(
                "cannot resolve delta {delta} within {max_samples} samples"
            )));
        }
        count = (count * 2 - 1).min(max_samples);
    }
}

/// How transverse offsets move ball centers off the curve.
#[derive(Clone, Copy)]
enum OffsetMode {
    Vector,
    Group,
}

fn offset_mode(space: &MetricSpace) -> OffsetMode {
    match space {
        MetricSpace::Koranyi | MetricSpace::CcHeisenberg { .. } => OffsetMode::Group,
        _ => OffsetMode::Vector,
    }
}

fn combine(mode: OffsetMode, anchor: [f64; 3], off: [f64; 3]) -> [f64; 3] {
    match mode {
        OffsetMode::Vector => [anchor[0] + off[0], anchor[1] + off[1], anchor[2] + off[2]],
        OffsetMode::Group => HPoint::from_coords(&anchor)
            .mul(&HPoint::new(off[0], off[1], off[2]))
            .coords(),
    }
}

/// Offset directions with their magnitude caps. Planar directions scale with
/// the radius; the vertical direction in the group scales with radius squared
/// (dilations scale heights quadratically).
fn offset_dirs(space: &MetricSpace, dim: usize, radius: f64) -> Vec<([f64; 3], f64)> {
    let planar_cap = 0.95 * radius;
    match (space, dim) {
        (MetricSpace::Koranyi | MetricSpace::CcHeisenberg { .. }, _) => vec![
            ([1.0, 0.0, 0.0], planar_cap),
            ([-1.0, 0.0, 0.0], planar_cap),
            ([0.0, 1.0, 0.0], planar_cap),
            ([0.0, -1.0, 0.0], planar_cap),
            ([0.0, 0.0, 1.0], 0.26 * radius * radius),
            ([0.0, 0.0, -1.0], 0.26 * radius * radius),
        ],
        (_, 1) => vec![],
        (_, 2) => vec![
            ([1.0, 0.0, 0.0], planar_cap),
            ([-1.0, 0.0, 0.0], planar_cap),
            ([0.0, 1.0, 0.0], planar_cap),
            ([0.0, -1.0, 0.0], planar_cap),
        ],
        _ => vec![
            ([1.0, 0.0, 0.0], planar_cap),
            ([-1.0, 0.0, 0.0], planar_cap),
            ([0.0, 1.0, 0.0], planar_cap),
            ([0.0, -1.0, 0.0], planar_cap),
            ([0.0, 0.0, 1.0], planar_cap),
            ([0.0, 0.0, -1.0], planar_cap),
        ],
    }
}

struct ArcContext<'a> {
    space: &'a MetricSpace,
    curve: &'a SampledCurve,
    params: Vec<f64>,
    dim: usize,
    span: f64,
    end: f64,
}

impl ArcContext<'_> {
    fn dist(&self, center: &[f64; 3], s: f64) -> Result<f64> {
        let p = self.curve.position(s);
        self.space.distance_coords(&center[..self.dim], &p[..self.dim])
    }

    fn contains_with_margin(&self, center: &[f64; 3], radius: f64, s: f64) -> Result<bool> {
        Ok(self.dist(center, s)? <= radius * (1.0 - 1e-9))
    }

    /// Largest w such that the samples in [front, w] lie in the ball and w is
    /// a certified in-ball parameter (crossing refined on the smooth curve).
    /// Assumes the front itself is inside.
    fn reach(&self, center: &[f64; 3], radius: f64, front: f64) -> Result<f64> {
        let mut last_inside = front;
        let start = self.params.partition_point(|&p| p <= front);
        for i in start..self.params.len() {
            if self.dist(center, self.params[i])? <= radius {
                last_inside = self.params[i];
            } else {
                let mut lo = last_inside;
                let mut hi = self.params[i];
                while hi - lo > 1e-13 * self.span {
                    let mid = 0.5 * (lo + hi);
                    if self.dist(center, mid)? <= radius {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(lo);
            }
        }
        Ok(self.end)
    }
}

pub(crate) fn arc_advance_cover(
    space: &MetricSpace,
    curve: &Arc<SampledCurve>,
    interval: [f64; 2],
    samples: usize,
    z: &SizeFunction,
    delta: f64,
    config: &CoverConfig,
) -> Result<CoverEstimate> {
    let params = curve.sample_params(interval, samples)?;
    let dim = curve.dim();
    let mut maxd = 0.0_f64;
    for w in params.windows(2) {
        let a = curve.position(w[0]);
        let b = curve.position(w[1]);
        maxd = maxd.max(space.distance_coords(&a[..dim], &b[..dim])?);
    }
    if maxd > delta / K_RES as f64 {
        return Err(GmtError::DeltaBelowResolution {
            delta,
            resolution: K_RES as f64 * maxd,
        });
    }

    let ctx = ArcContext {
        space,
        curve,
        params,
        dim,
        span: interval[1] - interval[0],
        end: interval[1],
    };
    let mode = offset_mode(space);
    let radius = delta / 2.0;
    let dirs = offset_dirs(space, dim, radius);
    let tiny = 1e-12 * ctx.span;

    let mut front = interval[0];
    let mut cover: Vec<SetRep> = Vec::new();
    let mut windows: Vec<(f64, f64, [f64; 3], f64)> = Vec::new();
    let mut total = 0.0;

    while front < ctx.end - tiny {
        if cover.len() >= config.max_balls {
            return Err(GmtError::Solver(format!(
                "cover exceeded {} balls at delta {delta}",
                config.max_balls
            )));
        }
        let front_pos = ctx.curve.position(front);

        // baseline: ball centered on the curve at the front
        let baseline_reach = ctx.reach(&front_pos, radius, front)?;
        let baseline_adv = (baseline_reach - front).max(tiny);

        // coarse search over anchors along the curve and transverse offsets
        let fracs = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0];
        let mut offsets: Vec<(Option<usize>, f64)> = vec![(None, 0.0)];
        for (i, &(_, cap)) in dirs.iter().enumerate() {
            for k in 1..=config.offset_mags {
                offsets.push((Some(i), cap * k as f64 / config.offset_mags as f64));
            }
        }
        let mut best_center = front_pos;
        let mut best_reach = baseline_reach;
        let mut best_anchor = front;
        let mut best_dir: Option<usize> = None;
        let mut best_mag = 0.0_f64;
        for frac in fracs.iter().take(config.anchor_steps.max(1)) {
            let a = (front + frac * baseline_adv).min(ctx.end);
            let anchor_pos = ctx.curve.position(a);
            for &(di, m) in &offsets {
                let dir = di.map(|i| dirs[i].0).unwrap_or([0.0; 3]);
                let center = combine(mode, anchor_pos, [dir[0] * m, dir[1] * m, dir[2] * m]);
                if !ctx.contains_with_margin(&center, radius, front)? {
                    continue;
                }
                let w = ctx.reach(&center, radius, front)?;
                if w > best_reach {
                    best_reach = w;
                    best_center = center;
                    best_anchor = a;
                    best_dir = di;
                    best_mag = m;
                }
            }
        }

        // pattern-search refinement on (anchor, offset magnitude)
        let (dir, cap) = match best_dir {
            Some(i) => (dirs[i].0, dirs[i].1),
            None => dirs.first().map(|&(d, c)| (d, c)).unwrap_or(([0.0; 3], 0.0)),
        };
        let mut step_a = baseline_adv * 0.5;
        let mut step_m = cap / config.offset_mags.max(1) as f64;
        for _ in 0..config.refine_steps {
            let mut moved = false;
            let trials = [
                (best_anchor + step_a, best_mag),
                (best_anchor - step_a, best_mag),
                (best_anchor, (best_mag + step_m).min(cap)),
                (best_anchor, (best_mag - step_m).max(0.0)),
            ];
            for (a, m) in trials {
                if a < interval[0] || a > ctx.end {
                    continue;
                }
                let anchor_pos = ctx.curve.position(a);
                let off = [dir[0] * m, dir[1] * m, dir[2] * m];
                let center = combine(mode, anchor_pos, off);
                if !ctx.contains_with_margin(&center, radius, front)? {
                    continue;
                }
                let w = ctx.reach(&center, radius, front)?;
                if w > best_reach {
                    best_reach = w;
                    best_center = center;
                    best_anchor = a;
                    best_mag = m;
                    moved = true;
                }
            }
            if !moved {
                step_a *= 0.5;
                step_m *= 0.5;
                if step_a < tiny && step_m < 1e-15 {
                    break;
                }
            }
        }

        // shrink the final ball so it does not overshoot the interval end
        let mut ball_radius = radius;
        if best_reach >= ctx.end - tiny {
            let (mut lo, mut hi) = (0.0_f64, radius);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                let ok = ctx.contains_with_margin(&best_center, mid, front)?
                    && ctx.reach(&best_center, mid, front)? >= ctx.end - tiny;
                if ok {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            ball_radius = hi;
            best_reach = ctx.reach(&best_center, ball_radius, front)?;
        }

        if best_reach <= front + tiny {
            return Err(GmtError::Solver(format!(
                "cover front stalled at parameter {front} (delta {delta})"
            )));
        }

        let ball = Ball::closed(Point::Coords(best_center[..dim].to_vec()), ball_radius);
        total += z.size_value(space, &SetRep::Ball(ball.clone()))?;
        cover.push(SetRep::Ball(ball));
        windows.push((front, best_reach, best_center, ball_radius));
        front = best_reach;
    }

    // certify: every sample parameter lies in the ball that claimed it
    for &(w0, w1, center, r) in &windows {
        let lo = ctx.params.partition_point(|&p| p < w0);
        let hi = ctx.params.partition_point(|&p| p <= w1);
        for &s in &ctx.params[lo..hi] {
            if ctx.dist(&center, s)? > r * (1.0 + 1e-12) + 1e-15 {
                return Err(GmtError::Solver("cover verification failed at a sample".into()));
            }
        }
    }
    if let (Some(first), Some(last)) = (windows.first(), windows.last()) {
        if first.0 > interval[0] + tiny || last.1 < ctx.end - tiny {
            return Err(GmtError::Solver("cover windows do not span the interval".into()));
        }
    }

    Ok(CoverEstimate {
        value: ExtReal(total),
        delta,
        cover,
        exact: false,
        gap_bound: None,
        infeasible_witness: None,
    })
}
