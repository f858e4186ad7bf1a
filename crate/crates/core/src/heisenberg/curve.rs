//! Curves in the Heisenberg group decomposed against the left-invariant frame.
//!
//! A curve (x, y, t) has velocity h1 X + h2 Y + v T with h1 = x', h2 = y' and
//! v = t' - (x y' - y x')/2. The vertical coefficient v drives everything
//! here: |v| is the density of the intrinsic measure and the curve is
//! horizontal exactly where v vanishes.

use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GmtError, Result};
use crate::metric::SampledCurve;

const FRAME_CHECK_TOL: f64 = 1e-10;
const QUAD_PER_UNIT: usize = 4096;
const CROSSING_TOL: f64 = 1e-12;

/// A sampled curve in the group together with its frame coefficients at the
/// nodes.
#[derive(Debug, Clone)]
pub struct HCurve {
    curve: Arc<SampledCurve>,
    frame: Vec<[f64; 3]>,
}

fn frame_at(pos: &[f64], vel: &[f64]) -> [f64; 3] {
    let v = vel[2] - 0.5 * (pos[0] * vel[1] - pos[1] * vel[0]);
    [vel[0], vel[1], v]
}

impl HCurve {
    /// Wraps a 3-dimensional curve, computing the frame at its nodes.
    pub fn from_curve(curve: Arc<SampledCurve>) -> Result<Self> {
        if curve.dim() != 3 {
            return Err(GmtError::DimensionMismatch { expected: 3, got: curve.dim() });
        }
        let frame = (0..curve.node_count())
            .map(|i| frame_at(curve.position_at_node(i), curve.derivative_at_node(i)))
            .collect();
        Ok(HCurve { curve, frame })
    }

    /// Wraps a curve with an externally supplied frame, checking that it
    /// reproduces the node velocities.
    pub fn with_frame(curve: Arc<SampledCurve>, frame: Vec<[f64; 3]>) -> Result<Self> {
        if curve.dim() != 3 {
            return Err(GmtError::DimensionMismatch { expected: 3, got: curve.dim() });
        }
        if frame.len() != curve.node_count() {
            return Err(GmtError::Invalid("one frame triple per node required".into()));
        }
        for (i, f) in frame.iter().enumerate() {
            let p = curve.position_at_node(i);
            let m = curve.derivative_at_node(i);
            // invert the frame: x' = h1, y' = h2, t' = v + (x h2 - y h1)/2
            let tp = f[2] + 0.5 * (p[0] * f[1] - p[1] * f[0]);
            let err = (f[0] - m[0]).abs().max((f[1] - m[1]).abs()).max((tp - m[2]).abs());
            if err > FRAME_CHECK_TOL {
                return Err(GmtError::Invalid(format!(
                    "frame at node {i} disagrees with the curve velocity by {err:.3e}"
                )));
            }
        }
        Ok(HCurve { curve, frame })
    }

    pub fn from_fn(
        a: f64,
        b: f64,
        nodes: usize,
        f: impl Fn(f64) -> ([f64; 3], [f64; 3]),
    ) -> Result<Self> {
        let curve = SampledCurve::from_fn(a, b, nodes, |s| {
            let (p, m) = f(s);
            (p.to_vec(), m.to_vec())
        })?;
        HCurve::from_curve(Arc::new(curve))
    }

    /// The segment of the t-axis from t0 to t1, parameterized over [0, 1].
    pub fn vertical_segment(t0: f64, t1: f64, nodes: usize) -> Result<Self> {
        if !(t1 > t0) {
            return Err(GmtError::Invalid("segment needs t1 > t0".into()));
        }
        HCurve::from_fn(0.0, 1.0, nodes, |s| {
            ([0.0, 0.0, t0 + s * (t1 - t0)], [0.0, 0.0, t1 - t0])
        })
    }

    pub fn curve(&self) -> &Arc<SampledCurve> {
        &self.curve
    }

    pub fn node_frame(&self) -> &[[f64; 3]] {
        &self.frame
    }

    pub fn domain(&self) -> [f64; 2] {
        self.curve.domain()
    }

    /// Frame coefficients (h1, h2, v) at an arbitrary parameter.
    pub fn frame_coefficients(&self, s: f64) -> [f64; 3] {
        frame_at(&self.curve.position(s), &self.curve.velocity(s))
    }

    /// Signed vertical coefficient v(s).
    pub fn vertical_component(&self, s: f64) -> f64 {
        self.frame_coefficients(s)[2]
    }

    /// |v(s)|, the density of the intrinsic measure.
    pub fn vertical_density(&self, s: f64) -> f64 {
        self.vertical_component(s).abs()
    }

    /// Integral of |v| over a parameter interval (trapezoid rule on a dense
    /// grid, at least QUAD_PER_UNIT points per unit of parameter).
    pub fn intrinsic_measure(&self, interval: [f64; 2]) -> Result<f64> {
        let [a, b] = self.domain();
        let [lo, hi] = interval;
        if lo < a - 1e-12 || hi > b + 1e-12 || !(hi >= lo) {
            return Err(GmtError::Domain(format!(
                "interval [{lo}, {hi}] outside the curve domain [{a}, {b}]"
            )));
        }
        if hi <= lo {
            return Ok(0.0);
        }
        let n = (((hi - lo) * QUAD_PER_UNIT as f64).ceil() as usize).max(16);
        let h = (hi - lo) / n as f64;
        let mut acc = 0.5 * (self.vertical_density(lo) + self.vertical_density(hi));
        for i in 1..n {
            acc += self.vertical_density(lo + i as f64 * h);
        }
        Ok(acc * h)
    }

    pub fn total_measure(&self) -> f64 {
        self.intrinsic_measure(self.domain())
            .expect("full domain is valid")
    }

    /// Closure of the parameter set where |v| exceeds the threshold, as a
    /// merged list of intervals with bisection-refined endpoints.
    pub fn nonhorizontal_set(&self, threshold: f64, scan_samples: usize) -> Result<Vec<[f64; 2]>> {
        if !(threshold >= 0.0) || !threshold.is_finite() {
            return Err(GmtError::Invalid("threshold must be finite and nonnegative".into()));
        }
        if scan_samples < 2 {
            return Err(GmtError::Invalid("need at least two scan samples".into()));
        }
        let [a, b] = self.domain();
        let params: Vec<f64> = (0..scan_samples)
            .map(|i| a + (b - a) * i as f64 / (scan_samples - 1) as f64)
            .collect();
        let above: Vec<bool> = params.iter().map(|&s| self.vertical_density(s) > threshold).collect();
        let refine = |mut lo: f64, mut hi: f64| {
            // |v| - threshold changes sign on [lo, hi]
            let f_lo = self.vertical_density(lo) - threshold;
            while hi - lo > CROSSING_TOL {
                let mid = 0.5 * (lo + hi);
                let f_mid = self.vertical_density(mid) - threshold;
                if (f_mid > 0.0) == (f_lo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let mut intervals: Vec<[f64; 2]> = Vec::new();
        let mut open: Option<f64> = if above[0] { Some(a) } else { None };
        for i in 1..scan_samples {
            match (above[i - 1], above[i]) {
                (false, true) => open = Some(refine(params[i - 1], params[i])),
                (true, false) => {
                    let end = refine(params[i - 1], params[i]);
                    intervals.push([open.take().expect("matched opening"), end]);
                }
                _ => {}
            }
        }
        if let Some(start) = open {
            intervals.push([start, b]);
        }
        Ok(intervals)
    }
}

impl Serialize for HCurve {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.curve.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HCurve {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let curve = SampledCurve::deserialize(deserializer)?;
        HCurve::from_curve(Arc::new(curve)).map_err(D::Error::custom)
    }
}
