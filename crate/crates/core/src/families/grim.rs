//! Tilted grim reapers: vertical translators `z = xy/2 + cx + γ(y)` invariant
//! under the left translations `L_(u, 0, cu)`.

use serde::Serialize;

use super::{Family, ProfileCurve};
use crate::error::{Error, Result};
use crate::geometry::{MetricParam, Point};
use crate::ode::{integrate, OdeOptions, OdeProblem, Termination, Trajectory};
use crate::surface::{gaussian_curvature, graph_shape, intrinsic_curvature, vertical_residual, GraphJet};

pub const COLUMNS: [&str; 7] = ["y", "gamma", "gamma_prime", "H", "residual", "K_gauss", "K_intrinsic"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrimReaperParams {
    pub lambda: MetricParam,
    pub c: f64,
}

impl GrimReaperParams {
    pub fn new(lambda: f64, c: f64) -> Result<Self> {
        let lambda = MetricParam::new(lambda)?;
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidParameter(format!("slope c must be finite and non-negative, got {c}")));
        }
        Ok(GrimReaperParams { lambda, c })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlabData {
    pub a: f64,
    pub b: f64,
    pub width: f64,
}

/// `(γ', γ'')` with `γ'' = 1/√λ + (√λ γ'² + λ(y+c)γ') / (1 + λ(y+c)²)`.
pub fn grim_reaper_rhs(lambda: f64, c: f64, y: f64, _gamma: f64, gp: f64) -> (f64, f64) {
    let sl = lambda.sqrt();
    let s = y + c;
    (gp, 1.0 / sl + (sl * gp * gp + lambda * s * gp) / (1.0 + lambda * s * s))
}

/// Endpoints and width of the slab on which `γ'` is defined.
pub fn slab(lambda: f64, c: f64) -> SlabData {
    let sl = lambda.sqrt();
    let base = (sl * c).asinh();
    let shift = 0.5 * std::f64::consts::PI * sl;
    SlabData {
        a: (base - shift).sinh() / sl - c,
        b: (base + shift).sinh() / sl - c,
        width: 2.0 / sl * (1.0 + lambda * c * c).sqrt() * shift.sinh(),
    }
}

/// `γ'(y) = √((y+c)² + 1/λ) tan((asinh(√λ(y+c)) − asinh(√λ c))/√λ)`.
pub fn grim_reaper_closed_form(lambda: f64, c: f64, y: f64) -> Result<f64> {
    let s = slab(lambda, c);
    if !(y > s.a && y < s.b) {
        return Err(Error::OutsideSlab { y, a: s.a, b: s.b });
    }
    let sl = lambda.sqrt();
    let t = y + c;
    let angle = ((sl * t).asinh() - (sl * c).asinh()) / sl;
    Ok((t * t + 1.0 / lambda).sqrt() * angle.tan())
}

/// Predicted coefficient of `−log(b − y)` in `γ` at an endpoint `e`.
pub fn endpoint_coefficient(lambda: f64, c: f64, e: f64) -> f64 {
    (1.0 + lambda * (c + e).powi(2)) / lambda.sqrt()
}

#[derive(Clone, Debug)]
pub struct GrimOptions {
    pub ode: OdeOptions,
    /// Samples per arm in the exported rows, uniform in `y`; `None` exports accepted steps.
    pub uniform_samples: Option<usize>,
}

impl Default for GrimOptions {
    fn default() -> Self {
        GrimOptions { ode: OdeOptions::with_tolerances(1e-13, 1e-13), uniform_samples: None }
    }
}

fn arm(params: &GrimReaperParams, y_end: f64, opts: &OdeOptions) -> Result<Trajectory> {
    let (l, c) = (params.lambda.value(), params.c);
    let rhs = move |y: f64, s: &[f64], ds: &mut [f64]| {
        let (a, b) = grim_reaper_rhs(l, c, y, s[0], s[1]);
        ds[0] = a;
        ds[1] = b;
    };
    integrate(&OdeProblem::new(rhs, vec![0.0, 0.0], 0.0, y_end).with_options(opts.clone()), &[])
}

/// Graph jet of the grim reaper at `(x, y)` from the state `(γ, γ', γ'')`.
pub fn grim_jet(c: f64, x: f64, y: f64, gamma: f64, gp: f64, gpp: f64) -> GraphJet {
    GraphJet {
        x,
        y,
        u: 0.5 * x * y + c * x + gamma,
        u_x: 0.5 * y + c,
        u_y: 0.5 * x + gp,
        u_xx: 0.0,
        u_xy: 0.5,
        u_yy: gpp,
    }
}

fn derived_row(params: &GrimReaperParams, y: f64, gamma: f64, gp: f64) -> Vec<f64> {
    let l = params.lambda;
    let (_, gpp) = grim_reaper_rhs(l.value(), params.c, y, gamma, gp);
    let jet = grim_jet(params.c, 0.0, y, gamma, gp, gpp);
    let shape = graph_shape(l, &jet);
    let kg = gaussian_curvature(&shape).unwrap_or(f64::NAN);
    let ki = intrinsic_curvature(l, &jet, &shape).unwrap_or(f64::NAN);
    vec![y, gamma, gp, shape.h, vertical_residual(l, &shape), kg, ki]
}

/// Integrates from `(γ, γ') = (0, 0)` at `y = 0` in both directions until blow-up.
pub fn solve_grim_reaper(params: &GrimReaperParams, opts: &GrimOptions) -> Result<ProfileCurve> {
    // the span only has to contain the slab; blow-up ends each arm inside it
    let s = slab(params.lambda.value(), params.c);
    let right = arm(params, 2.0 * s.b + 1.0, &opts.ode)?;
    let left = arm(params, 2.0 * s.a - 1.0, &opts.ode)?;
    let mut profile = ProfileCurve::new(Family::GrimReaper { lambda: params.lambda.value(), c: params.c }, &COLUMNS);

    let mut states: Vec<(f64, f64, f64)> = Vec::new();
    match opts.uniform_samples {
        None => {
            for s in left.samples.iter().rev() {
                states.push((s.t, s.y[0], s.y[1]));
            }
            for s in right.samples.iter().skip(1) {
                states.push((s.t, s.y[0], s.y[1]));
            }
        }
        Some(n) => {
            let n = n.max(2);
            let (a, b) = (left.t_end(), right.t_end());
            for i in 0..n {
                let y = (a * (n - 1 - i) as f64 / (n - 1) as f64).clamp(a, 0.0);
                let s = left.interpolate(y).expect("inside left arm");
                states.push((y, s[0], s[1]));
            }
            for i in 1..n {
                let y = (b * i as f64 / (n - 1) as f64).clamp(0.0, b);
                let s = right.interpolate(y).expect("inside right arm");
                states.push((y, s[0], s[1]));
            }
        }
    }
    profile.rows = states.into_iter().map(|(y, g, gp)| derived_row(params, y, g, gp)).collect();
    profile.arms = vec![right, left];
    Ok(profile)
}

/// Numerical slab endpoints `(a, b)`: the blow-up abscissae of the two arms.
pub fn numerical_endpoints(profile: &ProfileCurve) -> Option<(f64, f64)> {
    let [right, left] = profile.arms.as_slice() else { return None };
    if right.termination != Termination::BlowUp || left.termination != Termination::BlowUp {
        return None;
    }
    Some((left.t_end(), right.t_end()))
}

/// `(γ(y), γ'(y))` from the dense output of the arm containing `y`.
pub fn grim_state(profile: &ProfileCurve, y: f64) -> Option<[f64; 2]> {
    let arm = if y >= 0.0 { profile.arms.first()? } else { profile.arms.get(1)? };
    let s = arm.interpolate(y)?;
    Some([s[0], s[1]])
}

/// The surface point over `(x, y)`: `(x, y, xy/2 + cx + γ(y))`.
pub fn grim_surface_point(profile: &ProfileCurve, x: f64, y: f64) -> Option<Point> {
    let Family::GrimReaper { c, .. } = profile.family else { return None };
    let [g, _] = grim_state(profile, y)?;
    Some(Point::new(x, y, 0.5 * x * y + c * x + g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        assert_eq!(grim_reaper_rhs(4.0, 0.0, 0.0, 0.0, 0.0).1, 0.5);
        assert_eq!(grim_reaper_rhs(1.0, 0.0, 1.0, 0.0, 1.0).1, 2.0);
        assert_eq!(grim_reaper_rhs(4.0, 1.0, 0.0, 0.0, 0.0).1, 0.5);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(grim_reaper_closed_form(2.0, 1.0, 0.0).unwrap(), 0.0);
        let v = grim_reaper_closed_form(1.0, 0.0, 1.0).unwrap();
        let expected = 2f64.sqrt() * (1.0 + 2f64.sqrt()).ln().tan();
        assert!((v - expected).abs() < 1e-14);
        assert!((v - 1.7155).abs() < 1e-4);
        let b = (std::f64::consts::FRAC_PI_2).sinh();
        assert!(grim_reaper_closed_form(1.0, 0.0, b - 1e-9).unwrap() > 1e8);
        assert!(grim_reaper_closed_form(1.0, 0.0, -b + 1e-9).unwrap() < -1e8);
        assert!(matches!(grim_reaper_closed_form(1.0, 0.0, 3.0), Err(Error::OutsideSlab { .. })));
    }

    #[test]
    fn closed_form_solves_the_ode() {
        for (l, c) in [(0.5, 0.0), (1.0, 1.0), (4.0, 2.0)] {
            let s = slab(l, c);
            for i in 1..20 {
                let y = s.a + (s.b - s.a) * i as f64 / 20.0;
                let h = 1e-5;
                let d = (grim_reaper_closed_form(l, c, y + h).unwrap()
                    - grim_reaper_closed_form(l, c, y - h).unwrap())
                    / (2.0 * h);
                let gp = grim_reaper_closed_form(l, c, y).unwrap();
                let (_, rhs) = grim_reaper_rhs(l, c, y, 0.0, gp);
                assert!((d - rhs).abs() < 1e-5 * (1.0 + rhs.abs()), "λ={l} c={c} y={y}");
            }
        }
    }

    #[test]
    fn slab_examples() {
        let s = slab(1.0, 0.0);
        let b = std::f64::consts::FRAC_PI_2.sinh();
        assert!((s.a + b).abs() < 1e-15 && (s.b - b).abs() < 1e-15);
        assert!((s.width - 4.60260).abs() < 1e-5);
        for l in [0.5, 1.0, 4.0] {
            let s = slab(l, 0.0);
            assert_eq!(s.a, -s.b);
            for c in [1.0, 2.0] {
                let r = slab(l, c).width / slab(l, 0.0).width;
                assert!((r - (1.0 + l * c * c).sqrt()).abs() < 1e-12);
                let sc = slab(l, c);
                assert!((sc.b - sc.a - sc.width).abs() < 1e-12 * sc.width);
            }
        }
    }

    #[test]
    fn solution_tracks_closed_form_and_residual() {
        let p = GrimReaperParams::new(1.0, 1.0).unwrap();
        let prof = solve_grim_reaper(&p, &GrimOptions::default()).unwrap();
        let (a, b) = numerical_endpoints(&prof).unwrap();
        let s = slab(1.0, 1.0);
        assert!((a - s.a).abs() < 1e-5 && (b - s.b).abs() < 1e-5);
        for i in 0..=200 {
            let y = s.a + 0.05 * s.width + 0.9 * s.width * i as f64 / 200.0;
            let gp = grim_state(&prof, y).unwrap()[1];
            assert!((gp - grim_reaper_closed_form(1.0, 1.0, y).unwrap()).abs() < 1e-8);
        }
        assert!(prof.sup_abs("residual").unwrap() < 1e-7);
        // y γ'(y) > 0 away from the origin, minimum of γ at y = 0
        let ys = prof.column("y").unwrap();
        let g = prof.column("gamma").unwrap();
        let gps = prof.column("gamma_prime").unwrap();
        for i in 0..ys.len() {
            if ys[i] != 0.0 {
                assert!(ys[i] * gps[i] > 0.0);
                assert!(g[i] > 0.0);
            }
        }
    }

    #[test]
    fn rejects_negative_slope() {
        assert!(GrimReaperParams::new(1.0, -0.5).is_err());
        assert!(GrimReaperParams::new(0.0, 0.5).is_err());
    }
}
