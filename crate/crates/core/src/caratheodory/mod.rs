//! Measure construction by coverings: size functions on sets, the
//! delta-premeasure obtained from covers of bounded diameter, and its
//! supremum over shrinking delta approximated by ladders.
//!
//! Continuous targets get upper estimates from ball-cover heuristics; small
//! finite instances get the true infimum from a branch-and-bound oracle.

mod cover;
mod exact;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GmtError, Result};
use crate::metric::{FiniteSpace, MetricSpace, Point, SetRep};

pub use cover::resolve_sample_count;
pub use exact::{psi_exact, zeta_delta_exact, zeta_delta_greedy};

/// Covers must resolve the target this many times finer than delta.
pub const K_RES: usize = 5;

/// Extended real stored as f64; serialized as a nullable number where null
/// means +infinity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "Option<f64>", into = "Option<f64>")]
pub struct ExtReal(pub f64);

impl From<Option<f64>> for ExtReal {
    fn from(v: Option<f64>) -> Self {
        ExtReal(v.unwrap_or(f64::INFINITY))
    }
}

impl From<ExtReal> for Option<f64> {
    fn from(v: ExtReal) -> Self {
        v.0.is_finite().then_some(v.0)
    }
}

/// Which sets a size function may be evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainRestriction {
    AllClosedSets,
    ClosedBallsOnly,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeKind {
    /// c * diam^alpha on any set.
    Hausdorff { alpha: f64, c: f64 },
    /// c * (2r)^alpha on closed balls (nominal diameter, not the realized one).
    Spherical { alpha: f64, c: f64 },
    /// Explicit sizes per finite subset, keyed by [set_identifier].
    Table { entries: BTreeMap<String, ExtReal> },
}

/// A size function: what a single cover element costs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizeFunction {
    pub kind: SizeKind,
    pub restriction: DomainRestriction,
}

impl SizeFunction {
    pub fn hausdorff(alpha: f64, c: f64) -> Result<Self> {
        check_exponent(alpha, c)?;
        Ok(SizeFunction {
            kind: SizeKind::Hausdorff { alpha, c },
            restriction: DomainRestriction::AllClosedSets,
        })
    }

    pub fn hausdorff_on_balls(alpha: f64, c: f64) -> Result<Self> {
        check_exponent(alpha, c)?;
        Ok(SizeFunction {
            kind: SizeKind::Hausdorff { alpha, c },
            restriction: DomainRestriction::ClosedBallsOnly,
        })
    }

    pub fn spherical(alpha: f64, c: f64) -> Result<Self> {
        check_exponent(alpha, c)?;
        Ok(SizeFunction {
            kind: SizeKind::Spherical { alpha, c },
            restriction: DomainRestriction::ClosedBallsOnly,
        })
    }

    pub fn table(entries: BTreeMap<String, ExtReal>, restriction: DomainRestriction) -> Result<Self> {
        for (key, v) in &entries {
            if v.0.is_nan() || v.0 < 0.0 {
                return Err(GmtError::Invalid(format!("size of {key} must be nonnegative")));
            }
        }
        Ok(SizeFunction { kind: SizeKind::Table { entries }, restriction })
    }

    /// Cost of a single set under this size function.
    pub fn size_value(&self, space: &MetricSpace, set: &SetRep) -> Result<f64> {
        set.validate(space)?;
        if self.restriction == DomainRestriction::ClosedBallsOnly {
            match set {
                SetRep::Ball(b) if b.closed => {}
                _ => {
                    return Err(GmtError::Domain(
                        "size function is restricted to closed balls".into(),
                    ))
                }
            }
        }
        match &self.kind {
            SizeKind::Hausdorff { alpha, c } => {
                let diam = space.set_diameter(set)?.value;
                Ok(c * diam.powf(*alpha))
            }
            SizeKind::Spherical { alpha, c } => match set {
                SetRep::Ball(b) if b.closed => Ok(c * (2.0 * b.radius).powf(*alpha)),
                _ => Err(GmtError::Domain("spherical size needs a closed ball".into())),
            },
            SizeKind::Table { entries } => {
                let f = space
                    .as_finite()
                    .ok_or_else(|| GmtError::Domain("table sizes need a finite space".into()))?;
                let members = finite_members(f, set)?;
                let id = set_identifier(f, &members)?;
                entries
                    .get(&id)
                    .map(|v| v.0)
                    .ok_or_else(|| GmtError::Invalid(format!("size table has no entry for {id}")))
            }
        }
    }
}

fn check_exponent(alpha: f64, c: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(GmtError::Invalid("exponent must be positive and finite".into()));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(GmtError::Invalid("normalization must be positive and finite".into()));
    }
    Ok(())
}

/// Label indices of a set in a finite space, sorted and deduplicated.
pub fn finite_members(space: &FiniteSpace, set: &SetRep) -> Result<Vec<usize>> {
    let mut members = match set {
        SetRep::Cloud(points) => points
            .iter()
            .map(|p| p.as_label())
            .collect::<Result<Vec<usize>>>()?,
        SetRep::Ball(b) => space.ball_members(b.center.as_label()?, b.radius, b.closed)?,
        SetRep::CurveSegment { .. } => {
            return Err(GmtError::PointKind("curves do not live in finite spaces".into()))
        }
    };
    if let Some(&bad) = members.iter().find(|&&i| i >= space.len()) {
        return Err(GmtError::UnknownLabel(bad));
    }
    members.sort_unstable();
    members.dedup();
    Ok(members)
}

/// Canonical identifier of a finite subset: its label names sorted, e.g.
/// "{a,b}". Keys of table size functions use this form.
pub fn set_identifier(space: &FiniteSpace, members: &[usize]) -> Result<String> {
    if members.is_empty() {
        return Err(GmtError::EmptySet);
    }
    let mut names = Vec::with_capacity(members.len());
    for &i in members {
        if i >= space.len() {
            return Err(GmtError::UnknownLabel(i));
        }
        names.push(space.labels()[i].as_str());
    }
    names.sort_unstable();
    names.dedup();
    Ok(format!("{{{}}}", names.join(",")))
}

/// What a cover estimate must cover. The empty target is allowed and costs
/// nothing; nonempty targets are ordinary set representations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CoverTarget {
    Empty,
    Set(SetRep),
}

impl From<SetRep> for CoverTarget {
    fn from(set: SetRep) -> Self {
        CoverTarget::Set(set)
    }
}

/// Result of one delta-premeasure evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverEstimate {
    /// Total cost of the cover; +infinity when no feasible cover exists.
    pub value: ExtReal,
    pub delta: f64,
    /// The cover elements actually used (each of diameter at most delta).
    pub cover: Vec<SetRep>,
    /// True when the value is the exact infimum rather than an upper bound.
    pub exact: bool,
    /// Proven optimality gap for exact solves.
    pub gap_bound: Option<f64>,
    /// A target element no candidate covers, when infeasible.
    pub infeasible_witness: Option<String>,
}

impl CoverEstimate {
    pub(crate) fn empty(delta: f64) -> Self {
        CoverEstimate {
            value: ExtReal(0.0),
            delta,
            cover: Vec::new(),
            exact: true,
            gap_bound: Some(0.0),
            infeasible_witness: None,
        }
    }
}

/// How upper cover estimates pick their balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverStrategy {
    /// Curve targets advance along the arc, everything else uses the net.
    Auto,
    /// Greedy net: repeatedly cover the first uncovered sample.
    GreedyNet,
    /// Front advance along a curve with per-ball center optimization.
    ArcAdvance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CoverConfig {
    pub strategy: CoverStrategy,
    /// Relative slack allowed before a ladder is flagged non-monotone.
    pub monotone_slack: f64,
    pub max_balls: usize,
    /// Anchor positions tried along the curve per ball.
    pub anchor_steps: usize,
    /// Transverse offset magnitudes tried per direction (zero always added).
    pub offset_mags: usize,
    /// Pattern-search iterations refining the winning center.
    pub refine_steps: usize,
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig {
            strategy: CoverStrategy::Auto,
            monotone_slack: 0.02,
            max_balls: 200_000,
            anchor_steps: 8,
            offset_mags: 8,
            refine_steps: 30,
        }
    }
}

/// Upper estimate of the delta-premeasure of a target: the cost of one
/// feasible cover by sets of diameter at most delta.
pub fn zeta_delta_upper(
    space: &MetricSpace,
    target: &CoverTarget,
    z: &SizeFunction,
    delta: f64,
    config: &CoverConfig,
) -> Result<CoverEstimate> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(GmtError::Invalid("delta must be positive and finite".into()));
    }
    let set = match target {
        CoverTarget::Empty => return Ok(CoverEstimate::empty(delta)),
        CoverTarget::Set(set) => set,
    };
    set.validate(space)?;
    match set {
        SetRep::Cloud(points) => {
            if config.strategy == CoverStrategy::ArcAdvance {
                return Err(GmtError::Invalid("arc advance needs a curve target".into()));
            }
            cover::greedy_net_cover(space, points, z, delta)
        }
        SetRep::Ball(ball) => {
            let f = space.as_finite().ok_or_else(|| {
                GmtError::Unsupported("solid ball targets are not coverable; sample them first".into())
            })?;
            let members = f.ball_members(ball.center.as_label()?, ball.radius, ball.closed)?;
            let points: Vec<Point> = members.into_iter().map(Point::Label).collect();
            if points.is_empty() {
                return Ok(CoverEstimate::empty(delta));
            }
            cover::greedy_net_cover(space, &points, z, delta)
        }
        SetRep::CurveSegment { curve, interval, samples } => match config.strategy {
            CoverStrategy::GreedyNet => {
                let params = curve.sample_params(*interval, *samples)?;
                let dim = curve.dim();
                let points: Vec<Point> = params
                    .iter()
                    .map(|&s| Point::Coords(curve.position(s)[..dim].to_vec()))
                    .collect();
                cover::greedy_net_cover(space, &points, z, delta)
            }
            CoverStrategy::Auto | CoverStrategy::ArcAdvance => {
                cover::arc_advance_cover(space, curve, *interval, *samples, z, delta, config)
            }
        },
    }
}

/// One rung of a measure ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LadderRung {
    pub delta: f64,
    pub estimate: CoverEstimate,
}

/// Estimates of the delta-premeasure along a decreasing ladder of deltas,
/// approximating the supremum over delta from below in delta.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureLadder {
    pub entries: Vec<LadderRung>,
    /// Value at the finest delta; no fitted limits.
    pub extrapolated: f64,
    /// Whether rung values were nondecreasing (up to the configured slack)
    /// as delta decreased.
    pub monotone_ok: bool,
}

fn ladder_from_entries(entries: Vec<LadderRung>, slack: f64) -> MeasureLadder {
    let extrapolated = entries.last().map(|r| r.estimate.value.0).unwrap_or(0.0);
    let monotone_ok = entries.windows(2).all(|w| {
        let (a, b) = (w[0].estimate.value.0, w[1].estimate.value.0);
        b >= a - slack * a.abs().max(1e-300)
    });
    MeasureLadder { entries, extrapolated, monotone_ok }
}

fn check_ladder_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(GmtError::Invalid("ladder needs at least one delta".into()));
    }
    if deltas.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(GmtError::Invalid("ladder deltas must be positive and finite".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GmtError::Invalid("ladder deltas must be strictly decreasing".into()));
    }
    Ok(())
}

/// Runs the upper estimator along a decreasing delta ladder. Rungs run in
/// parallel; each rung is deterministic.
pub fn approx_measure_ladder(
    space: &MetricSpace,
    target: &CoverTarget,
    z: &SizeFunction,
    deltas: &[f64],
    config: &CoverConfig,
) -> Result<MeasureLadder> {
    check_ladder_deltas(deltas)?;
    let entries: Vec<LadderRung> = deltas
        .par_iter()
        .map(|&delta| {
            zeta_delta_upper(space, target, z, delta, config)
                .map(|estimate| LadderRung { delta, estimate })
        })
        .collect::<Result<_>>()?;
    Ok(ladder_from_entries(entries, config.monotone_slack))
}

/// Exact ladder over a finite instance: every rung is the true infimum, so
/// monotonicity is checked with zero slack.
pub fn exact_measure_ladder(
    space: &FiniteSpace,
    target: &[usize],
    candidates: &[Vec<usize>],
    z: &SizeFunction,
    deltas: &[f64],
) -> Result<MeasureLadder> {
    check_ladder_deltas(deltas)?;
    let entries: Vec<LadderRung> = deltas
        .iter()
        .map(|&delta| {
            zeta_delta_exact(space, target, candidates, z, delta)
                .map(|estimate| LadderRung { delta, estimate })
        })
        .collect::<Result<_>>()?;
    Ok(ladder_from_entries(entries, 0.0))
}

/// Strictly decreasing geometric ladder starting at `delta0`.
pub fn geometric_ladder(delta0: f64, ratio: f64, rungs: usize) -> Result<Vec<f64>> {
    if !(delta0 > 0.0) || !delta0.is_finite() {
        return Err(GmtError::Invalid("ladder start must be positive".into()));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(GmtError::Invalid("ladder ratio must lie in (0, 1)".into()));
    }
    if rungs == 0 {
        return Err(GmtError::Invalid("ladder needs at least one rung".into()));
    }
    Ok((0..rungs).map(|k| delta0 * ratio.powi(k as i32)).collect())
}

/// Default ladder shape: ratio 1/2, six rungs.
pub fn default_ladder(delta0: f64) -> Result<Vec<f64>> {
    geometric_ladder(delta0, 0.5, 6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Ball;
    use approx::assert_relative_eq;

    fn three_space() -> FiniteSpace {
        FiniteSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 1.0, 3.0],
                vec![1.0, 0.0, 2.5],
                vec![3.0, 2.5, 0.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn hausdorff_size_is_diameter_power() {
        let sp = MetricSpace::euclidean(2).unwrap();
        let z = SizeFunction::hausdorff(1.0, 1.0).unwrap();
        let two = SetRep::cloud(vec![Point::xy(0.0, 0.0), Point::xy(3.0, 4.0)]).unwrap();
        assert_relative_eq!(z.size_value(&sp, &two).unwrap(), 5.0);
        let single = SetRep::cloud(vec![Point::xy(1.0, 1.0)]).unwrap();
        assert_eq!(z.size_value(&sp, &single).unwrap(), 0.0);
        let z2 = SizeFunction::hausdorff(1.5, 2.0).unwrap();
        assert_relative_eq!(z2.size_value(&sp, &two).unwrap(), 2.0 * 5.0_f64.powf(1.5));
    }

    #[test]
    fn spherical_size_uses_nominal_diameter() {
        let sp = MetricSpace::koranyi();
        let z = SizeFunction::spherical(2.0, 0.25).unwrap();
        for &r in &[0.1, 0.5, 1.3] {
            let ball = SetRep::Ball(Ball::closed(Point::xyt(0.0, 0.0, 0.0), r));
            assert_relative_eq!(z.size_value(&sp, &ball).unwrap(), r * r, epsilon = 1e-15);
        }
        let cloud = SetRep::cloud(vec![Point::xyt(0.0, 0.0, 0.0)]).unwrap();
        assert!(z.size_value(&sp, &cloud).is_err());
        let open = SetRep::Ball(Ball::open(Point::xyt(0.0, 0.0, 0.0), 1.0));
        assert!(z.size_value(&sp, &open).is_err());
    }

    #[test]
    fn table_size_looks_up_identifiers() {
        let f = three_space();
        let sp = MetricSpace::finite(f.clone());
        let mut entries = BTreeMap::new();
        entries.insert("{a,b}".to_string(), ExtReal(1.5));
        entries.insert("{c}".to_string(), ExtReal(f64::INFINITY));
        let z = SizeFunction::table(entries, DomainRestriction::AllClosedSets).unwrap();
        let ab = SetRep::cloud(vec![Point::label(1), Point::label(0)]).unwrap();
        assert_relative_eq!(z.size_value(&sp, &ab).unwrap(), 1.5);
        let c = SetRep::cloud(vec![Point::label(2)]).unwrap();
        assert!(z.size_value(&sp, &c).unwrap().is_infinite());
        let missing = SetRep::cloud(vec![Point::label(0)]).unwrap();
        assert!(z.size_value(&sp, &missing).is_err());
    }

    #[test]
    fn identifiers_sort_and_dedup() {
        let f = three_space();
        assert_eq!(set_identifier(&f, &[2, 0, 2]).unwrap(), "{a,c}");
        assert!(set_identifier(&f, &[]).is_err());
        assert!(set_identifier(&f, &[9]).is_err());
    }

    #[test]
    fn empty_target_costs_nothing() {
        let sp = MetricSpace::euclidean(2).unwrap();
        let z = SizeFunction::hausdorff(1.0, 1.0).unwrap();
        let est = zeta_delta_upper(&sp, &CoverTarget::Empty, &z, 0.5, &CoverConfig::default()).unwrap();
        assert_eq!(est.value.0, 0.0);
        assert!(est.exact);
        let ladder = approx_measure_ladder(
            &sp,
            &CoverTarget::Empty,
            &z,
            &[0.5, 0.25, 0.125],
            &CoverConfig::default(),
        )
        .unwrap();
        assert_eq!(ladder.extrapolated, 0.0);
        assert!(ladder.monotone_ok);
    }

    #[test]
    fn geometric_ladder_shape() {
        let l = default_ladder(0.8).unwrap();
        assert_eq!(l.len(), 6);
        assert_relative_eq!(l[0], 0.8);
        assert_relative_eq!(l[5], 0.8 / 32.0);
        assert!(geometric_ladder(0.8, 1.5, 3).is_err());
        assert!(check_ladder_deltas(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn ext_real_serializes_infinity_as_null() {
        let v = serde_json::to_string(&ExtReal(f64::INFINITY)).unwrap();
        assert_eq!(v, "null");
        let back: ExtReal = serde_json::from_str("null").unwrap();
        assert!(back.0.is_infinite());
        let finite: ExtReal = serde_json::from_str("2.5").unwrap();
        assert_eq!(finite.0, 2.5);
    }
}
