//! First Heisenberg group geometry: group operations, the Koranyi gauge
//! distance, the Carnot-Caratheodory distance, vertical ball profiles, and
//! sub-Riemannian curve measures.
//!
//! Conventions fixed here and used everywhere else:
//! group law (x,y,t)*(x',y',t') = (x+x', y+y', t+t'+(xy'-yx')/2),
//! dilations delta_l(x,y,t) = (lx, ly, l^2 t), and the left-invariant frame
//! X = d/dx - (y/2) d/dt, Y = d/dy + (x/2) d/dt, T = d/dt declared orthonormal.

pub mod cc;
pub mod curve;
pub mod profile;

use serde::{Deserialize, Serialize};

pub use cc::{
    cc_axis_distance_shooting, cc_distance, cc_distance_coords, cc_lower_bound_coords,
    cc_origin_distance, cc_upper_bound_coords, CcSolve, DEFAULT_CC_TOL,
};
pub use curve::HCurve;
pub use profile::{alpha_beta, chord_len, koranyi_half_chord, unit_ball_profile, BallProfile, ChordConstants, HMetric};

/// Coefficient of t^2 in the Koranyi gauge. With the group law above, the
/// gauge ((x^2+y^2)^2 + 16 t^2)^(1/4) is sub-additive, so the induced
/// left-invariant distance is a true metric. The gauge-unit point on the
/// vertical axis is (0,0,1/4).
pub const KORANYI_T2_COEFF: f64 = 16.0;

/// A point of the first Heisenberg group in exponential coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl HPoint {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        HPoint { x, y, t }
    }

    pub const fn origin() -> Self {
        HPoint::new(0.0, 0.0, 0.0)
    }

    /// Group product self * rhs.
    pub fn mul(&self, rhs: &HPoint) -> HPoint {
        HPoint {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
            t: self.t + rhs.t + 0.5 * (self.x * rhs.y - self.y * rhs.x),
        }
    }

    pub fn inverse(&self) -> HPoint {
        HPoint { x: -self.x, y: -self.y, t: -self.t }
    }

    /// Anisotropic dilation; `lambda` must be positive.
    pub fn dilate(&self, lambda: f64) -> HPoint {
        debug_assert!(lambda > 0.0, "dilations are defined for positive factors");
        HPoint { x: lambda * self.x, y: lambda * self.y, t: lambda * lambda * self.t }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    pub fn from_coords(c: &[f64]) -> HPoint {
        HPoint::new(c[0], c[1], c[2])
    }

    pub fn planar_radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Koranyi gauge of a point.
pub fn koranyi_norm(p: &HPoint) -> f64 {
    let r2 = p.x * p.x + p.y * p.y;
    (r2 * r2 + KORANYI_T2_COEFF * p.t * p.t).powf(0.25)
}

/// Left-invariant Koranyi distance.
pub fn koranyi_distance(p: &HPoint, q: &HPoint) -> f64 {
    koranyi_norm(&p.inverse().mul(q))
}

/// Coordinate-slice version used on hot paths; both slices must have length 3.
pub fn koranyi_distance_coords(a: &[f64], b: &[f64]) -> f64 {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    let dt = b[2] - a[2] + 0.5 * (a[1] * b[0] - a[0] * b[1]);
    let r2 = dx * dx + dy * dy;
    (r2 * r2 + KORANYI_T2_COEFF * dt * dt).powf(0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn group_law_example() {
        let p = HPoint::new(1.0, 0.0, 0.0);
        let q = HPoint::new(0.0, 1.0, 0.0);
        let r = p.mul(&q);
        assert_eq!((r.x, r.y, r.t), (1.0, 1.0, 0.5));
        let qp = q.mul(&p);
        assert_eq!(qp.t, -0.5);
    }

    #[test]
    fn inverse_cancels() {
        let p = HPoint::new(0.3, -1.2, 0.7);
        let e = p.mul(&p.inverse());
        assert_eq!((e.x, e.y, e.t), (0.0, 0.0, 0.0));
    }

    #[test]
    fn dilation_scales_t_quadratically() {
        let p = HPoint::new(1.0, 2.0, 3.0).dilate(2.0);
        assert_eq!((p.x, p.y, p.t), (2.0, 4.0, 12.0));
    }

    #[test]
    fn koranyi_reference_values() {
        assert_relative_eq!(koranyi_norm(&HPoint::new(1.0, 0.0, 0.0)), 1.0);
        // Gauge-unit point on the vertical axis: (16 * (1/4)^2)^(1/4) = 1.
        assert_relative_eq!(koranyi_norm(&HPoint::new(0.0, 0.0, 0.25)), 1.0);
        assert_relative_eq!(koranyi_norm(&HPoint::new(0.0, 0.0, 1.0)), 2.0);
    }

    #[test]
    fn koranyi_coords_matches_points() {
        let p = HPoint::new(0.2, -0.4, 0.1);
        let q = HPoint::new(-1.0, 0.5, -0.3);
        let d1 = koranyi_distance(&p, &q);
        let d2 = koranyi_distance_coords(&p.coords(), &q.coords());
        assert_relative_eq!(d1, d2, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn group_axioms(
            a in -2.0..2.0_f64, b in -2.0..2.0_f64, c in -2.0..2.0_f64,
            d in -2.0..2.0_f64, e in -2.0..2.0_f64, f in -2.0..2.0_f64,
            g in -2.0..2.0_f64, h in -2.0..2.0_f64, i in -2.0..2.0_f64,
        ) {
            let p = HPoint::new(a, b, c);
            let q = HPoint::new(d, e, f);
            let r = HPoint::new(g, h, i);
            let lhs = p.mul(&q).mul(&r);
            let rhs = p.mul(&q.mul(&r));
            prop_assert!((lhs.x - rhs.x).abs() < 1e-12);
            prop_assert!((lhs.y - rhs.y).abs() < 1e-12);
            prop_assert!((lhs.t - rhs.t).abs() < 1e-12);
            let ev = p.inverse().mul(&p);
            prop_assert!(ev.x == 0.0 && ev.y == 0.0 && ev.t.abs() < 1e-15);
        }

        #[test]
        fn koranyi_homogeneity_and_invariance(
            a in -2.0..2.0_f64, b in -2.0..2.0_f64, c in -2.0..2.0_f64,
            d in -2.0..2.0_f64, e in -2.0..2.0_f64, f in -2.0..2.0_f64,
            lam in 0.1..3.0_f64,
        ) {
            let p = HPoint::new(a, b, c);
            let q = HPoint::new(d, e, f);
            let dl = koranyi_distance(&p.dilate(lam), &q.dilate(lam));
            prop_assert!((dl - lam * koranyi_distance(&p, &q)).abs() < 1e-9 * (1.0 + dl));
            let z = HPoint::new(0.7, -0.3, 0.2);
            let dt = koranyi_distance(&z.mul(&p), &z.mul(&q));
            prop_assert!((dt - koranyi_distance(&p, &q)).abs() < 1e-9 * (1.0 + dt));
        }
    }
}
