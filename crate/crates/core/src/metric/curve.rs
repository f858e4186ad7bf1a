use serde::{Deserialize, Serialize};

use crate::error::{GmtError, Result};

/// A C1 path sampled at parameter nodes, with positions and derivatives in
/// ambient coordinates. Between nodes the path is evaluated by cubic Hermite
/// interpolation, so estimators can refine crossings well below the node
/// spacing. Coordinate dimension is limited to 3.
#[derive(Debug, Clone, Serialize)]
pub struct SampledCurve {
    dim: usize,
    nodes: Vec<f64>,
    positions: Vec<f64>,
    derivatives: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct SampledCurveRaw {
    nodes: Vec<f64>,
    positions: Vec<Vec<f64>>,
    derivatives: Vec<Vec<f64>>,
}

impl<'de> Deserialize<'de> for SampledCurve {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SampledCurveRaw::deserialize(d)?;
        SampledCurve::new(raw.nodes, raw.positions, raw.derivatives).map_err(serde::de::Error::custom)
    }
}

impl SampledCurve {
    pub fn new(nodes: Vec<f64>, positions: Vec<Vec<f64>>, derivatives: Vec<Vec<f64>>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(GmtError::Invalid("curve needs at least two nodes".into()));
        }
        if positions.len() != nodes.len() || derivatives.len() != nodes.len() {
            return Err(GmtError::Invalid(
                "positions and derivatives must match the node count".into(),
            ));
        }
        let dim = positions[0].len();
        if dim == 0 || dim > 3 {
            return Err(GmtError::Invalid(format!("curve dimension must be 1..=3, got {dim}")));
        }
        if positions.iter().any(|p| p.len() != dim) || derivatives.iter().any(|v| v.len() != dim) {
            return Err(GmtError::Invalid("inconsistent coordinate dimension along the curve".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GmtError::Invalid("parameter nodes must be strictly increasing".into()));
        }
        if nodes.iter().any(|s| !s.is_finite())
            || positions.iter().flatten().any(|v| !v.is_finite())
            || derivatives.iter().flatten().any(|v| !v.is_finite())
        {
            return Err(GmtError::Invalid("curve data must be finite".into()));
        }
        Ok(SampledCurve {
            dim,
            nodes,
            positions: positions.into_iter().flatten().collect(),
            derivatives: derivatives.into_iter().flatten().collect(),
        })
    }

    /// Builds a curve by sampling `f`, which returns (position, derivative).
    pub fn from_fn(a: f64, b: f64, nodes: usize, f: impl Fn(f64) -> (Vec<f64>, Vec<f64>)) -> Result<Self> {
        if !(b > a) {
            return Err(GmtError::Invalid("curve interval must be nondegenerate".into()));
        }
        if nodes < 2 {
            return Err(GmtError::Invalid("need at least two nodes".into()));
        }
        let params: Vec<f64> = (0..nodes)
            .map(|i| a + (b - a) * i as f64 / (nodes - 1) as f64)
            .collect();
        let mut positions = Vec::with_capacity(nodes);
        let mut derivatives = Vec::with_capacity(nodes);
        for &s in &params {
            let (p, v) = f(s);
            positions.push(p);
            derivatives.push(v);
        }
        SampledCurve::new(params, positions, derivatives)
    }

    /// Straight segment between two coordinate points. The parameter runs over
    /// [0, 1] and the derivative is the constant chord vector.
    pub fn line(from: &[f64], to: &[f64], nodes: usize) -> Result<Self> {
        if from.len() != to.len() {
            return Err(GmtError::DimensionMismatch { expected: from.len(), got: to.len() });
        }
        let chord: Vec<f64> = from.iter().zip(to).map(|(a, b)| b - a).collect();
        let f = |s: f64| {
            let p: Vec<f64> = from.iter().zip(&chord).map(|(a, c)| a + c * s).collect();
            (p, chord.clone())
        };
        SampledCurve::from_fn(0.0, 1.0, nodes, f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn domain(&self) -> [f64; 2] {
        [self.nodes[0], *self.nodes.last().unwrap()]
    }

    pub fn max_param_gap(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn position_at_node(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn derivative_at_node(&self, i: usize) -> &[f64] {
        &self.derivatives[i * self.dim..(i + 1) * self.dim]
    }

    /// Index of the segment containing s, clamped to the domain.
    fn segment_of(&self, s: f64) -> usize {
        match self.nodes.binary_search_by(|n| n.total_cmp(&s)) {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.nodes.len() - 2),
        }
    }

    /// Cubic Hermite evaluation. The result is padded with zeros past `dim`.
    pub fn position(&self, s: f64) -> [f64; 3] {
        let i = self.segment_of(s);
        let (s0, s1) = (self.nodes[i], self.nodes[i + 1]);
        let h = s1 - s0;
        let u = ((s - s0) / h).clamp(0.0, 1.0);
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let p0 = self.position_at_node(i);
        let p1 = self.position_at_node(i + 1);
        let m0 = self.derivative_at_node(i);
        let m1 = self.derivative_at_node(i + 1);
        let mut out = [0.0; 3];
        for d in 0..self.dim {
            out[d] = h00 * p0[d] + h10 * h * m0[d] + h01 * p1[d] + h11 * h * m1[d];
        }
        out
    }

    pub fn velocity(&self, s: f64) -> [f64; 3] {
        let i = self.segment_of(s);
        let (s0, s1) = (self.nodes[i], self.nodes[i + 1]);
        let h = s1 - s0;
        let u = ((s - s0) / h).clamp(0.0, 1.0);
        let u2 = u * u;
        let d00 = (6.0 * u2 - 6.0 * u) / h;
        let d10 = 3.0 * u2 - 4.0 * u + 1.0;
        let d01 = (-6.0 * u2 + 6.0 * u) / h;
        let d11 = 3.0 * u2 - 2.0 * u;
        let p0 = self.position_at_node(i);
        let p1 = self.position_at_node(i + 1);
        let m0 = self.derivative_at_node(i);
        let m1 = self.derivative_at_node(i + 1);
        let mut out = [0.0; 3];
        for d in 0..self.dim {
            out[d] = d00 * p0[d] + d10 * m0[d] + d01 * p1[d] + d11 * m1[d];
        }
        out
    }

    /// Evenly spaced parameters over a subinterval of the domain.
    pub fn sample_params(&self, interval: [f64; 2], count: usize) -> Result<Vec<f64>> {
        let [a, b] = self.domain();
        let [lo, hi] = interval;
        if !(hi > lo) || lo < a - 1e-12 || hi > b + 1e-12 {
            return Err(GmtError::Invalid(format!(
                "interval [{lo}, {hi}] is not a nondegenerate subinterval of [{a}, {b}]"
            )));
        }
        if count < 2 {
            return Err(GmtError::Invalid("need at least two samples".into()));
        }
        Ok((0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect())
    }
}
