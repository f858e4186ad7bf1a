//! Metric spaces the rest of the toolkit measures in: Euclidean coordinates,
//! the two Heisenberg distances, and finite spaces backed by distance tables.

pub mod curve;
pub mod finite;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GmtError, Result};
use crate::heisenberg;

pub use curve::SampledCurve;
pub use finite::FiniteSpace;

/// Inter-sample parameter gap above which curve diameters are flagged as
/// wanting refinement.
pub const CURVE_GAP_FLOOR: f64 = 1e-2;

/// A metric space. Distances for the Heisenberg kinds delegate to the
/// `heisenberg` module; finite spaces look up a validated table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum MetricSpace {
    Euclidean { dim: usize },
    Koranyi,
    CcHeisenberg { solver_tol: f64 },
    Finite(FiniteSpace),
}

impl MetricSpace {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GmtError::Invalid("euclidean dimension must be positive".into()));
        }
        Ok(MetricSpace::Euclidean { dim })
    }

    pub fn koranyi() -> Self {
        MetricSpace::Koranyi
    }

    pub fn cc_heisenberg() -> Self {
        MetricSpace::CcHeisenberg { solver_tol: heisenberg::DEFAULT_CC_TOL }
    }

    pub fn cc_heisenberg_with_tol(solver_tol: f64) -> Result<Self> {
        if !(solver_tol > 0.0) || !solver_tol.is_finite() {
            return Err(GmtError::Invalid("solver tolerance must be positive and finite".into()));
        }
        Ok(MetricSpace::CcHeisenberg { solver_tol })
    }

    pub fn finite(space: FiniteSpace) -> Self {
        MetricSpace::Finite(space)
    }

    /// Coordinate dimension for coordinate-based spaces, None for finite ones.
    pub fn coord_dim(&self) -> Option<usize> {
        match self {
            MetricSpace::Euclidean { dim } => Some(*dim),
            MetricSpace::Koranyi | MetricSpace::CcHeisenberg { .. } => Some(3),
            MetricSpace::Finite(_) => None,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteSpace> {
        match self {
            MetricSpace::Finite(f) => Some(f),
            _ => None,
        }
    }

    /// Distance between raw coordinate slices; fails on finite spaces.
    pub fn distance_coords(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        let dim = self
            .coord_dim()
            .ok_or_else(|| GmtError::PointKind("finite spaces need labelled points".into()))?;
        if a.len() != dim {
            return Err(GmtError::DimensionMismatch { expected: dim, got: a.len() });
        }
        if b.len() != dim {
            return Err(GmtError::DimensionMismatch { expected: dim, got: b.len() });
        }
        Ok(match self {
            MetricSpace::Euclidean { .. } => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            MetricSpace::Koranyi => heisenberg::koranyi_distance_coords(a, b),
            MetricSpace::CcHeisenberg { solver_tol } => {
                heisenberg::cc_distance_coords(a, b, *solver_tol)
            }
            MetricSpace::Finite(_) => unreachable!(),
        })
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        match (self, p, q) {
            (MetricSpace::Finite(f), Point::Label(i), Point::Label(j)) => f.distance(*i, *j),
            (MetricSpace::Finite(_), _, _) => {
                Err(GmtError::PointKind("finite spaces need labelled points".into()))
            }
            (_, Point::Coords(a), Point::Coords(b)) => self.distance_coords(a, b),
            _ => Err(GmtError::PointKind("coordinate spaces need coordinate points".into())),
        }
    }

    pub fn ball_contains(&self, ball: &Ball, p: &Point) -> Result<bool> {
        let d = self.distance(&ball.center, p)?;
        Ok(if ball.closed { d <= ball.radius } else { d < ball.radius })
    }

    pub fn set_diameter(&self, set: &SetRep) -> Result<Diameter> {
        self.set_diameter_with_floor(set, CURVE_GAP_FLOOR)
    }

    /// Diameter of a set representation.
    ///
    /// Clouds are exact (largest pairwise distance). Balls use the geodesic
    /// identity diam = 2r in the three coordinate spaces and enumerate members
    /// in finite spaces. Curve segments report the largest pairwise distance
    /// over their samples, a lower bound flagged for refinement when the
    /// parameter gap exceeds `gap_floor`.
    pub fn set_diameter_with_floor(&self, set: &SetRep, gap_floor: f64) -> Result<Diameter> {
        set.validate(self)?;
        match set {
            SetRep::Cloud(points) => {
                let mut best = 0.0_f64;
                for (i, p) in points.iter().enumerate() {
                    for q in &points[i + 1..] {
                        best = best.max(self.distance(p, q)?);
                    }
                }
                Ok(Diameter { value: best, needs_refinement: false })
            }
            SetRep::Ball(ball) => match self {
                MetricSpace::Finite(f) => {
                    let center = match &ball.center {
                        Point::Label(i) => *i,
                        _ => unreachable!("validated above"),
                    };
                    let members = f.ball_members(center, ball.radius, ball.closed)?;
                    Ok(Diameter {
                        value: f.subset_diameter(&members)?,
                        needs_refinement: false,
                    })
                }
                _ => Ok(Diameter { value: 2.0 * ball.radius, needs_refinement: false }),
            },
            SetRep::CurveSegment { curve, interval, samples } => {
                let params = curve.sample_params(*interval, *samples)?;
                let pts: Vec<[f64; 3]> = params.iter().map(|&s| curve.position(s)).collect();
                let dim = curve.dim();
                let mut best = 0.0_f64;
                for (i, p) in pts.iter().enumerate() {
                    for q in &pts[i + 1..] {
                        best = best.max(self.distance_coords(&p[..dim], &q[..dim])?);
                    }
                }
                let gap = (interval[1] - interval[0]) / (*samples as f64 - 1.0);
                Ok(Diameter { value: best, needs_refinement: gap > gap_floor })
            }
        }
    }
}

/// A point: coordinates in a coordinate space or a label index in a finite one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Coords(Vec<f64>),
    Label(usize),
}

impl Point {
    pub fn xy(x: f64, y: f64) -> Self {
        Point::Coords(vec![x, y])
    }

    pub fn xyt(x: f64, y: f64, t: f64) -> Self {
        Point::Coords(vec![x, y, t])
    }

    pub fn label(i: usize) -> Self {
        Point::Label(i)
    }

    pub fn as_coords(&self) -> Result<&[f64]> {
        match self {
            Point::Coords(c) => Ok(c),
            Point::Label(_) => Err(GmtError::PointKind("expected coordinates".into())),
        }
    }

    pub fn as_label(&self) -> Result<usize> {
        match self {
            Point::Label(i) => Ok(*i),
            Point::Coords(_) => Err(GmtError::PointKind("expected a label".into())),
        }
    }
}

/// A metric ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    pub closed: bool,
}

impl Ball {
    pub fn closed(center: Point, radius: f64) -> Self {
        Ball { center, radius, closed: true }
    }

    pub fn open(center: Point, radius: f64) -> Self {
        Ball { center, radius, closed: false }
    }
}

/// Finite description of a subset to be measured or covered.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SetRep {
    /// A finite point set (nonempty).
    Cloud(Vec<Point>),
    Ball(Ball),
    /// A curve restricted to a parameter interval, represented by evenly
    /// spaced samples (at least 2).
    CurveSegment {
        curve: Arc<SampledCurve>,
        interval: [f64; 2],
        samples: usize,
    },
}

impl SetRep {
    pub fn cloud(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(GmtError::Invalid("cloud must be nonempty".into()));
        }
        Ok(SetRep::Cloud(points))
    }

    pub fn curve_segment(curve: Arc<SampledCurve>, interval: [f64; 2], samples: usize) -> Result<Self> {
        if !(interval[1] > interval[0]) {
            return Err(GmtError::Invalid("curve interval must be nondegenerate".into()));
        }
        if samples < 2 {
            return Err(GmtError::Invalid("curve segment needs at least 2 samples".into()));
        }
        let [a, b] = curve.domain();
        if interval[0] < a - 1e-12 || interval[1] > b + 1e-12 {
            return Err(GmtError::Invalid("interval outside the curve domain".into()));
        }
        Ok(SetRep::CurveSegment { curve, interval, samples })
    }

    /// Checks the structural invariants and that the points fit the space.
    pub fn validate(&self, space: &MetricSpace) -> Result<()> {
        match self {
            SetRep::Cloud(points) => {
                if points.is_empty() {
                    return Err(GmtError::Invalid("cloud must be nonempty".into()));
                }
                for p in points {
                    validate_point(space, p)?;
                }
            }
            SetRep::Ball(ball) => {
                validate_point(space, &ball.center)?;
                if !(ball.radius >= 0.0) || !ball.radius.is_finite() {
                    return Err(GmtError::Invalid("ball radius must be finite and nonnegative".into()));
                }
            }
            SetRep::CurveSegment { curve, interval, samples } => {
                if space.coord_dim() != Some(curve.dim()) {
                    return Err(GmtError::DimensionMismatch {
                        expected: space.coord_dim().unwrap_or(0),
                        got: curve.dim(),
                    });
                }
                if !(interval[1] > interval[0]) || *samples < 2 {
                    return Err(GmtError::Invalid("degenerate curve segment".into()));
                }
                let [a, b] = curve.domain();
                if interval[0] < a - 1e-12 || interval[1] > b + 1e-12 {
                    return Err(GmtError::Invalid("interval outside the curve domain".into()));
                }
            }
        }
        Ok(())
    }
}

fn validate_point(space: &MetricSpace, p: &Point) -> Result<()> {
    match (space.coord_dim(), p) {
        (Some(dim), Point::Coords(c)) => {
            if c.len() != dim {
                Err(GmtError::DimensionMismatch { expected: dim, got: c.len() })
            } else {
                Ok(())
            }
        }
        (None, Point::Label(i)) => {
            let n = space.as_finite().map(|f| f.len()).unwrap_or(0);
            if *i < n {
                Ok(())
            } else {
                Err(GmtError::UnknownLabel(*i))
            }
        }
        (Some(_), Point::Label(_)) => {
            Err(GmtError::PointKind("coordinate space, got a label".into()))
        }
        (None, Point::Coords(_)) => {
            Err(GmtError::PointKind("finite space, got coordinates".into()))
        }
    }
}

/// Diameter value plus a hint that the sampling was too coarse to trust it as
/// more than a lower bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Diameter {
    pub value: f64,
    pub needs_refinement: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_distance() {
        let sp = MetricSpace::euclidean(2).unwrap();
        let d = sp.distance(&Point::xy(0.0, 0.0), &Point::xy(3.0, 4.0)).unwrap();
        assert_relative_eq!(d, 5.0);
        let d0 = sp.distance(&Point::xy(1.0, -2.0), &Point::xy(1.0, -2.0)).unwrap();
        assert_eq!(d0, 0.0);
    }

    #[test]
    fn dimension_and_kind_errors() {
        let sp = MetricSpace::euclidean(2).unwrap();
        assert!(sp.distance(&Point::xy(0.0, 0.0), &Point::xyt(0.0, 0.0, 0.0)).is_err());
        assert!(sp.distance(&Point::xy(0.0, 0.0), &Point::label(0)).is_err());
        let fsp = MetricSpace::finite(
            FiniteSpace::new(
                vec!["a".into(), "b".into()],
                vec![vec![0.0, 2.5], vec![2.5, 0.0]],
            )
            .unwrap(),
        );
        assert_relative_eq!(fsp.distance(&Point::label(0), &Point::label(1)).unwrap(), 2.5);
        assert!(fsp.distance(&Point::label(0), &Point::label(7)).is_err());
        assert!(fsp.distance(&Point::label(0), &Point::xy(0.0, 0.0)).is_err());
    }

    #[test]
    fn ball_membership_boundary() {
        let sp = MetricSpace::euclidean(2).unwrap();
        let closed = Ball::closed(Point::xy(0.0, 0.0), 1.0);
        let open = Ball::open(Point::xy(0.0, 0.0), 1.0);
        let boundary = Point::xy(1.0, 0.0);
        assert!(sp.ball_contains(&closed, &boundary).unwrap());
        assert!(!sp.ball_contains(&open, &boundary).unwrap());
        assert!(!sp.ball_contains(&closed, &Point::xy(1.0, 0.5)).unwrap());
    }

    #[test]
    fn cloud_diameter_exact() {
        let sp = MetricSpace::euclidean(2).unwrap();
        let set = SetRep::cloud(vec![Point::xy(0.0, 0.0), Point::xy(3.0, 4.0), Point::xy(1.0, 1.0)]).unwrap();
        let d = sp.set_diameter(&set).unwrap();
        assert_relative_eq!(d.value, 5.0);
        assert!(!d.needs_refinement);
        let single = SetRep::cloud(vec![Point::xy(2.0, 2.0)]).unwrap();
        assert_eq!(sp.set_diameter(&single).unwrap().value, 0.0);
        assert!(SetRep::cloud(vec![]).is_err());
    }

    #[test]
    fn ball_diameter_is_twice_radius_in_coordinate_spaces() {
        for sp in [
            MetricSpace::euclidean(3).unwrap(),
            MetricSpace::koranyi(),
            MetricSpace::cc_heisenberg(),
        ] {
            let set = SetRep::Ball(Ball::closed(Point::xyt(0.1, -0.2, 0.3), 0.7));
            assert_relative_eq!(sp.set_diameter(&set).unwrap().value, 1.4);
        }
    }

    #[test]
    fn finite_ball_diameter_enumerates_members() {
        let sp = MetricSpace::finite(
            FiniteSpace::new(
                vec!["a".into(), "b".into(), "c".into()],
                vec![
                    vec![0.0, 1.0, 3.0],
                    vec![1.0, 0.0, 2.5],
                    vec![3.0, 2.5, 0.0],
                ],
            )
            .unwrap(),
        );
        // closed ball of radius 1 around a contains {a, b}
        let set = SetRep::Ball(Ball::closed(Point::label(0), 1.0));
        assert_relative_eq!(sp.set_diameter(&set).unwrap().value, 1.0);
        let open = SetRep::Ball(Ball::open(Point::label(0), 1.0));
        assert_relative_eq!(sp.set_diameter(&open).unwrap().value, 0.0);
    }

    #[test]
    fn curve_diameter_flags_coarse_sampling() {
        let sp = MetricSpace::euclidean(2).unwrap();
        let curve = Arc::new(SampledCurve::line(&[0.0, 0.0], &[1.0, 0.0], 33).unwrap());
        let fine = SetRep::curve_segment(curve.clone(), [0.0, 1.0], 201).unwrap();
        let d = sp.set_diameter(&fine).unwrap();
        assert_relative_eq!(d.value, 1.0, epsilon = 1e-12);
        assert!(!d.needs_refinement);
        let coarse = SetRep::curve_segment(curve, [0.0, 1.0], 5).unwrap();
        assert!(sp.set_diameter(&coarse).unwrap().needs_refinement);
    }

    #[test]
    fn koranyi_ball_diameter_attained_by_boundary_pair() {
        // Antipodal horizontal boundary points realize diam = 2r.
        let sp = MetricSpace::koranyi();
        let r = 0.8;
        let d = sp
            .distance(&Point::xyt(r, 0.0, 0.0), &Point::xyt(-r, 0.0, 0.0))
            .unwrap();
        assert_relative_eq!(d, 2.0 * r, epsilon = 1e-12);
    }
}
