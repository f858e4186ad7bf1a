//! Vertical chord profiles of Heisenberg unit balls.
//!
//! For a homogeneous distance d, the vertical line through (r, 0, 0) meets the
//! closed unit ball in a symmetric chord whose length drives the vertical
//! densities: the chord through the center gives the centered constant, the
//! longest chord over all radii gives the tilted-ball constant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GmtError, Result};
use crate::heisenberg::cc::cc_origin_distance;
use crate::heisenberg::KORANYI_T2_COEFF;

/// Which homogeneous distance the profile is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HMetric {
    Koranyi,
    Cc,
}

/// Heights above the unit ball for both metrics (max heights are 1/4 and
/// 1/(2pi)), so bisections bracketing the chord end can start here.
const CHORD_T_CAP: f64 = 0.26;
const CHORD_T_TOL: f64 = 1e-14;
const MEMBERSHIP_TOL: f64 = 1e-12;

fn in_unit_ball(metric: HMetric, planar_radius: f64, t: f64) -> bool {
    match metric {
        HMetric::Koranyi => {
            let r2 = planar_radius * planar_radius;
            r2 * r2 + KORANYI_T2_COEFF * t * t <= 1.0 + MEMBERSHIP_TOL
        }
        HMetric::Cc => {
            cc_origin_distance(planar_radius, t.abs(), 1e-10).distance <= 1.0 + MEMBERSHIP_TOL
        }
    }
}

/// Closed-form half chord of the Koranyi unit ball at a planar radius.
pub fn koranyi_half_chord(planar_radius: f64) -> f64 {
    let r2 = planar_radius * planar_radius;
    ((1.0 - r2 * r2).max(0.0)).sqrt() / KORANYI_T2_COEFF.sqrt()
}

/// Full vertical chord length of the closed unit ball through (r, 0, 0).
///
/// Zero when the line misses the ball. Both unit balls meet vertical lines in
/// a single interval symmetric in t (the distance grows with |t| at fixed
/// planar radius), so a bisection on the half chord suffices.
pub fn chord_len(metric: HMetric, planar_radius: f64) -> Result<f64> {
    if !(planar_radius >= 0.0) || !planar_radius.is_finite() {
        return Err(GmtError::Domain("planar radius must be finite and nonnegative".into()));
    }
    if let HMetric::Koranyi = metric {
        return Ok(2.0 * koranyi_half_chord(planar_radius));
    }
    if !in_unit_ball(metric, planar_radius, 0.0) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, CHORD_T_CAP);
    debug_assert!(!in_unit_ball(metric, 0.0, CHORD_T_CAP));
    while hi - lo > CHORD_T_TOL {
        let mid = 0.5 * (lo + hi);
        if in_unit_ball(metric, planar_radius, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + hi)
}

/// Sampled chord profile of a unit ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallProfile {
    pub metric: HMetric,
    /// Evenly spaced planar radii over [0, 1].
    pub radii: Vec<f64>,
    /// Full vertical chord length at each radius.
    pub chords: Vec<f64>,
    /// Set when some vertical scan saw the ball as more than one interval,
    /// which would invalidate the chord picture.
    pub topology_warning: bool,
}

/// Samples vertical chords of the unit ball on an even radial grid.
///
/// `t_samples` controls the membership scan per radius used to confirm the
/// single-interval chord topology. Minimum resolutions keep the argmax
/// bracket tight enough for the refinement step downstream.
pub fn unit_ball_profile(metric: HMetric, radial_samples: usize, t_samples: usize) -> Result<BallProfile> {
    if radial_samples < 64 {
        return Err(GmtError::Invalid("need at least 64 radial samples".into()));
    }
    if t_samples < 256 {
        return Err(GmtError::Invalid("need at least 256 vertical samples".into()));
    }
    let radii: Vec<f64> = (0..radial_samples)
        .map(|i| i as f64 / (radial_samples - 1) as f64)
        .collect();
    let rows: Vec<(f64, bool)> = radii
        .par_iter()
        .map(|&r| {
            let chord = chord_len(metric, r).expect("radius in range");
            let mut inside_runs = 0usize;
            let mut prev_inside = false;
            for j in 0..t_samples {
                let t = CHORD_T_CAP * j as f64 / (t_samples - 1) as f64;
                let inside = in_unit_ball(metric, r, t);
                if inside && !prev_inside {
                    inside_runs += 1;
                }
                prev_inside = inside;
            }
            (chord, inside_runs > 1)
        })
        .collect();
    let chords = rows.iter().map(|&(c, _)| c).collect();
    let topology_warning = rows.iter().any(|&(_, w)| w);
    Ok(BallProfile { metric, radii, chords, topology_warning })
}

/// The two vertical chord constants of a unit ball.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChordConstants {
    /// Longest vertical chord over all planar radii.
    pub alpha: f64,
    /// Vertical chord through the center.
    pub beta: f64,
    /// Planar radius attaining the longest chord.
    pub argmax_radius: f64,
}

/// Extracts the chord constants from a profile, refining the argmax by a
/// golden-section search between the neighbouring grid radii.
pub fn alpha_beta(profile: &BallProfile) -> Result<ChordConstants> {
    if profile.radii.len() != profile.chords.len() || profile.radii.len() < 3 {
        return Err(GmtError::Invalid("profile needs matching radii and chords".into()));
    }
    if profile.topology_warning {
        return Err(GmtError::Domain("chord topology check failed; constants unreliable".into()));
    }
    let beta = chord_len(profile.metric, 0.0)?;
    let k = profile
        .chords
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite chords"))
        .map(|(i, _)| i)
        .expect("nonempty profile");
    let mut a = profile.radii[k.saturating_sub(1)];
    let mut b = profile.radii[(k + 1).min(profile.radii.len() - 1)];
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = chord_len(profile.metric, x1)?;
    let mut f2 = chord_len(profile.metric, x2)?;
    for _ in 0..80 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = chord_len(profile.metric, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = chord_len(profile.metric, x2)?;
        }
    }
    let argmax_radius = 0.5 * (a + b);
    let alpha = chord_len(profile.metric, argmax_radius)?.max(beta);
    Ok(ChordConstants { alpha, beta, argmax_radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn koranyi_chords_match_closed_form() {
        for &r in &[0.0, 0.3, 0.7, 0.99, 1.0, 1.5] {
            let expect = 2.0 * koranyi_half_chord(r);
            assert_relative_eq!(chord_len(HMetric::Koranyi, r).unwrap(), expect, epsilon = 1e-15);
        }
        assert_relative_eq!(koranyi_half_chord(0.0), 0.25);
        assert_eq!(koranyi_half_chord(1.2), 0.0);
    }

    #[test]
    fn cc_axis_chord_is_one_over_two_pi() {
        // Axis height solves sqrt(4 pi t) = 1, so the full chord is 1/(2 pi).
        let c = chord_len(HMetric::Cc, 0.0).unwrap();
        assert_relative_eq!(c, 1.0 / (2.0 * PI), epsilon = 1e-12);
    }

    #[test]
    fn cc_chord_peaks_at_two_over_pi() {
        let bulge = chord_len(HMetric::Cc, 2.0 / PI).unwrap();
        assert_relative_eq!(bulge, 1.0 / PI, epsilon = 1e-8);
        assert!(bulge > chord_len(HMetric::Cc, 0.3).unwrap());
        assert!(bulge > chord_len(HMetric::Cc, 0.9).unwrap());
        assert_eq!(chord_len(HMetric::Cc, 1.0 + 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn koranyi_constants_coincide() {
        let profile = unit_ball_profile(HMetric::Koranyi, 64, 256).unwrap();
        assert!(!profile.topology_warning);
        let c = alpha_beta(&profile).unwrap();
        assert_relative_eq!(c.alpha, 0.5, epsilon = 1e-9);
        assert_relative_eq!(c.beta, 0.5, epsilon = 1e-12);
        assert!(c.argmax_radius < 0.02);
    }

    #[test]
    fn cc_constants_match_circle_geometry() {
        let profile = unit_ball_profile(HMetric::Cc, 96, 256).unwrap();
        assert!(!profile.topology_warning);
        let c = alpha_beta(&profile).unwrap();
        assert_relative_eq!(c.beta, 1.0 / (2.0 * PI), epsilon = 1e-10);
        assert_relative_eq!(c.alpha, 1.0 / PI, epsilon = 1e-7);
        assert_relative_eq!(c.argmax_radius, 2.0 / PI, epsilon = 1e-3);
        assert_relative_eq!(c.alpha / c.beta, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn profile_rejects_coarse_grids() {
        assert!(unit_ball_profile(HMetric::Koranyi, 32, 256).is_err());
        assert!(unit_ball_profile(HMetric::Koranyi, 64, 100).is_err());
    }
}
