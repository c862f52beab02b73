//! Euclidean grim reaper translating along an arbitrary planar direction.

use super::{Family, ProfileCurve};
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 5] = ["x", "px", "py", "k", "residual"];

/// Samples the curve `y = −log(cos(v x))/v`, `v = |a|`, rotated so it translates
/// along `a = (a1, a2)` with speed `v`. The parameter `x` runs over the open
/// interval `(−π/(2v), π/(2v))` shrunk by `margin/v` at both ends.
pub fn planar_grim_reaper(a1: f64, a2: f64, samples: usize, margin: f64) -> Result<ProfileCurve> {
    let v = a1.hypot(a2);
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter("translation direction must be non-zero".into()));
    }
    if !(margin > 0.0 && margin < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!("margin must lie in (0, π/2), got {margin}")));
    }
    let n = samples.max(2);
    // columns of the rotation taking e2 to a/|a|
    let (e1, e2) = ((a2 / v, -a1 / v), (a1 / v, a2 / v));
    let rot = |p: (f64, f64)| (e1.0 * p.0 + e2.0 * p.1, e1.1 * p.0 + e2.1 * p.1);
    let half = (std::f64::consts::FRAC_PI_2 - margin) / v;
    let mut profile = ProfileCurve::new(Family::PlanarGrimReaper { a1, a2 }, &COLUMNS);
    for i in 0..n {
        let x = -half + 2.0 * half * i as f64 / (n - 1) as f64;
        let (s, c) = (v * x).sin_cos();
        let p = rot((x, -c.ln() / v));
        let d1 = rot((1.0, s / c));
        let d2 = rot((0.0, v / (c * c)));
        let speed = d1.0.hypot(d1.1);
        let k = (d1.0 * d2.1 - d1.1 * d2.0) / speed.powi(3);
        // left normal of the tangent
        let nrm = (-d1.1 / speed, d1.0 / speed);
        let residual = k - (nrm.0 * a1 + nrm.1 * a2);
        profile.rows.push(vec![x, p.0, p.1, k, residual]);
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_speed_vertical() {
        let p = planar_grim_reaper(0.0, 1.0, 1001, 0.01).unwrap();
        let mid = &p.rows[500];
        assert_eq!(mid[0], 0.0);
        assert!((mid[3] - 1.0).abs() < 1e-15);
        assert!(p.sup_abs("residual").unwrap() < 1e-10);
    }

    #[test]
    fn oblique_direction_and_scaling() {
        let p = planar_grim_reaper(1.0, -2.0, 501, 0.01).unwrap();
        assert!(p.sup_abs("residual").unwrap() < 1e-10);
        let w1 = planar_grim_reaper(0.0, 1.0, 11, 0.01).unwrap();
        let w2 = planar_grim_reaper(0.0, 2.0, 11, 0.01).unwrap();
        let width = |p: &ProfileCurve| p.rows[p.len() - 1][0] - p.rows[0][0];
        assert!((width(&w2) - 0.5 * width(&w1)).abs() < 1e-14);
    }

    #[test]
    fn rejects_zero_direction() {
        assert!(planar_grim_reaper(0.0, 0.0, 10, 0.01).is_err());
    }
}
