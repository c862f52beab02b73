//! Helicoidal vertical translators `(e^{iv} γ(s), c v)` generated by a planar
//! curve `γ` parametrized by arc length.

use serde::Serialize;

use super::{Family, ProfileCurve};
use crate::error::{Error, Result};
use crate::geometry::{MetricParam, Point};
use crate::ode::{integrate, Action, Direction, Event, OdeOptions, OdeProblem, Trajectory};
use crate::surface::{patch_shape, vertical_residual, CoordJet};

pub const COLUMNS: [&str; 11] =
    ["s", "gamma1", "gamma2", "theta_T", "tau", "nu", "r2", "k", "H", "residual", "winding"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HelicoidParams {
    pub lambda: MetricParam,
    pub pitch: f64,
    pub r0: f64,
}

impl HelicoidParams {
    pub fn new(lambda: f64, pitch: f64, r0: f64) -> Result<Self> {
        let lambda = MetricParam::new(lambda)?;
        if pitch == 0.0 || !pitch.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pitch must be non-zero and finite, got {pitch}; zero pitch is the rotational case"
            )));
        }
        if !(r0 >= 0.0 && r0.is_finite()) {
            return Err(Error::InvalidParameter(format!("seed distance r0 must be non-negative, got {r0}")));
        }
        Ok(HelicoidParams { lambda, pitch, r0 })
    }
}

/// `(τ, ν) = (⟨γ, T⟩, ⟨γ, N⟩)` with `T = (cos θ, sin θ)` and `N = iT`.
pub fn tau_nu(g1: f64, g2: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (g1 * c + g2 * s, -g1 * s + g2 * c)
}

/// Denominator `√λ c (4r² + λ(2c − r²)²)` shared by `k` and `k'`.
fn denominator(lambda: f64, c: f64, r2: f64) -> f64 {
    lambda.sqrt() * c * (4.0 * r2 + lambda * (2.0 * c - r2).powi(2))
}

/// Curvature of the generating curve in terms of `(τ, ν)`.
pub fn helicoid_curvature(lambda: f64, c: f64, tau: f64, nu: f64) -> f64 {
    let sl = lambda.sqrt();
    let (t2, n2) = (tau * tau, nu * nu);
    let num = lambda * sl * c * nu * (4.0 * c - 2.0 * t2 - n2)
        - 4.0 * sl * c * nu
        - tau * (4.0 * t2 + lambda * (4.0 * c * c - 4.0 * c * t2 + t2 * t2 + t2 * n2));
    num / denominator(lambda, c, t2 + n2)
}

/// `k'` at a zero of `k`: the numerator `P1` over the common denominator.
pub fn curvature_derivative_at_zero(lambda: f64, c: f64, tau: f64, nu: f64) -> f64 {
    let (t2, n2) = (tau * tau, nu * nu);
    let p1 = -3.0 * lambda * t2 * n2 - 4.0 * lambda.powf(1.5) * c * tau * nu - 5.0 * lambda * t2 * t2
        + 12.0 * (lambda * c - 1.0) * t2
        - 4.0 * lambda * c * c;
    p1 / denominator(lambda, c, t2 + n2)
}

/// Derivative of the state `(γ1, γ2, θ_T)` with respect to arc length.
pub fn helicoid_rhs(lambda: f64, c: f64, state: [f64; 3]) -> Result<[f64; 3]> {
    if c == 0.0 {
        return Err(Error::InvalidParameter("pitch must be non-zero".into()));
    }
    Ok(rhs_unchecked(lambda, c, state))
}

fn rhs_unchecked(lambda: f64, c: f64, s: [f64; 3]) -> [f64; 3] {
    let (tau, nu) = tau_nu(s[0], s[1], s[2]);
    [s[2].cos(), s[2].sin(), helicoid_curvature(lambda, c, tau, nu)]
}

/// Coordinate jet of `(v1, v2) ↦ (e^{iv2} γ(v1), c v2)` at `v2 = 0`.
pub fn helicoid_jet(c: f64, g1: f64, g2: f64, theta: f64, k: f64) -> CoordJet {
    let (s, co) = theta.sin_cos();
    CoordJet {
        point: Point::new(g1, g2, 0.0),
        d: [[co, s, 0.0], [-g2, g1, c]],
        dd: [[[-k * s, k * co, 0.0], [-s, co, 0.0]], [[-s, co, 0.0], [-g1, -g2, 0.0]]],
    }
}

#[derive(Clone, Debug)]
pub struct HelicoidOptions {
    pub ode: OdeOptions,
    /// Spacing of exported rows in arc length.
    pub ds: f64,
}

impl Default for HelicoidOptions {
    fn default() -> Self {
        let mut ode = OdeOptions::with_tolerances(1e-11, 1e-12);
        ode.h_max = Some(0.1);
        HelicoidOptions { ode, ds: 0.01 }
    }
}

fn arm(params: &HelicoidParams, s_end: f64, opts: &OdeOptions) -> Result<Trajectory> {
    let (l, c) = (params.lambda.value(), params.pitch);
    let rhs = move |_s: f64, y: &[f64], dy: &mut [f64]| {
        let d = rhs_unchecked(l, c, [y[0], y[1], y[2]]);
        dy.copy_from_slice(&d);
    };
    let events = [
        Event::new("tau", |_s, y: &[f64]| tau_nu(y[0], y[1], y[2]).0, Direction::Any, Action::Record),
        Event::new("nu", |_s, y: &[f64]| tau_nu(y[0], y[1], y[2]).1, Direction::Any, Action::Record),
        Event::new(
            "k",
            move |_s, y: &[f64]| {
                let (t, n) = tau_nu(y[0], y[1], y[2]);
                helicoid_curvature(l, c, t, n)
            },
            Direction::Any,
            Action::Record,
        ),
    ];
    let y0 = vec![params.r0, 0.0, std::f64::consts::FRAC_PI_2];
    integrate(&OdeProblem::new(rhs, y0, 0.0, s_end).with_options(opts.clone()), &events)
}

/// Seeds at `γ(0) = (r0, 0)` with `θ_T = π/2` and integrates both arc-length directions.
///
/// `arms` holds `[forward, backward]`.
pub fn solve_helicoid(params: &HelicoidParams, s_span: f64, opts: &HelicoidOptions) -> Result<ProfileCurve> {
    if !(s_span > 0.0) {
        return Err(Error::InvalidParameter(format!("arc-length span must be positive, got {s_span}")));
    }
    let fwd = arm(params, s_span, &opts.ode)?;
    let bwd = arm(params, -s_span, &opts.ode)?;
    let (l, c) = (params.lambda, params.pitch);
    let mut profile = ProfileCurve::new(
        Family::Helicoid { lambda: l.value(), pitch: c, r0: params.r0 },
        &COLUMNS,
    );
    let n = (s_span / opts.ds).round().max(1.0) as i64;
    let mut winding = 0.0;
    let mut prev_angle: Option<f64> = None;
    for i in -n..=n {
        let s = s_span * i as f64 / n as f64;
        let y = if s >= 0.0 { fwd.interpolate(s) } else { bwd.interpolate(s) }.expect("inside arm");
        let (tau, nu) = tau_nu(y[0], y[1], y[2]);
        let k = helicoid_curvature(l.value(), c, tau, nu);
        let shape = patch_shape(l, &helicoid_jet(c, y[0], y[1], y[2], k).to_patch())?;
        let angle = y[1].atan2(y[0]);
        winding = match prev_angle {
            None => angle,
            Some(p) => {
                let mut d = angle - p;
                while d > std::f64::consts::PI {
                    d -= 2.0 * std::f64::consts::PI;
                }
                while d < -std::f64::consts::PI {
                    d += 2.0 * std::f64::consts::PI;
                }
                winding + d
            }
        };
        prev_angle = Some(angle);
        profile.rows.push(vec![
            s,
            y[0],
            y[1],
            y[2],
            tau,
            nu,
            tau * tau + nu * nu,
            k,
            shape.h,
            vertical_residual(l, &shape),
            winding,
        ]);
    }
    // winding is measured from the seed
    let w0 = profile.rows[n as usize][10];
    for row in &mut profile.rows {
        row[10] -= w0;
    }
    profile.arms = vec![fwd, bwd];
    Ok(profile)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HelicoidDiagnostics {
    pub r2_local_minima: usize,
    pub tau_zeros: usize,
    /// `(s, ν')` at each zero of `ν`, with `ν' = −kτ`.
    pub nu_zeros: Vec<(f64, f64)>,
    /// `(s, k')` at each zero of `k`, `k'` from the closed-form numerator.
    pub k_zeros: Vec<(f64, f64)>,
    pub winding_monotone_forward_tail: bool,
    pub winding_monotone_backward_tail: bool,
    pub k_sup_tail: f64,
    pub k_sup_center: f64,
    pub min_r2: f64,
}

fn sign_changes(values: impl Iterator<Item = f64>) -> usize {
    let mut last = 0.0_f64;
    let mut count = 0;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

fn strictly_monotone(values: &[f64]) -> bool {
    let inc = values.windows(2).all(|w| w[1] > w[0]);
    let dec = values.windows(2).all(|w| w[1] < w[0]);
    inc || dec
}

/// Qualitative diagnostics over the sampled rows.
///
/// Tails are `|s| ∈ [tail_from, S]`, the curvature tail is `|s| ∈ [k_tail_from, S]`
/// and the central window is `|s| ≤ center`.
pub fn helicoid_diagnostics(profile: &ProfileCurve, tail_from: f64, k_tail_from: f64, center: f64) -> Result<HelicoidDiagnostics> {
    let Family::Helicoid { lambda, pitch, .. } = profile.family else {
        return Err(Error::FamilyMismatch { found: profile.family.name().into(), group: "helicoid diagnostics".into() });
    };
    let col = |name| profile.column(name).expect("helicoid column");
    let (s, r2, tau, k, w) = (col("s"), col("r2"), col("tau"), col("k"), col("winding"));
    let minima = (1..r2.len() - 1).filter(|&i| r2[i] < r2[i - 1] && r2[i] < r2[i + 1]).count();
    let pick = |pred: &dyn Fn(f64) -> bool, v: &[f64]| -> Vec<f64> {
        s.iter().zip(v).filter(|(ss, _)| pred(**ss)).map(|(_, x)| *x).collect()
    };
    let fwd_tail = pick(&|x| x >= tail_from, &w);
    let bwd_tail = pick(&|x| x <= -tail_from, &w);
    let sup = |v: Vec<f64>| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));

    let mut nu_zeros = Vec::new();
    let mut k_zeros = Vec::new();
    for arm in &profile.arms {
        for e in &arm.events {
            let (t, n) = tau_nu(e.y[0], e.y[1], e.y[2]);
            match e.id.as_str() {
                "nu" => nu_zeros.push((e.t, -helicoid_curvature(lambda, pitch, t, n) * t)),
                "k" => k_zeros.push((e.t, curvature_derivative_at_zero(lambda, pitch, t, n))),
                _ => {}
            }
        }
    }
    nu_zeros.sort_by(|a, b| a.0.total_cmp(&b.0));
    k_zeros.sort_by(|a, b| a.0.total_cmp(&b.0));

    Ok(HelicoidDiagnostics {
        r2_local_minima: minima,
        tau_zeros: sign_changes(tau.iter().copied()),
        nu_zeros,
        k_zeros,
        winding_monotone_forward_tail: fwd_tail.len() > 1 && strictly_monotone(&fwd_tail),
        winding_monotone_backward_tail: bwd_tail.len() > 1 && strictly_monotone(&bwd_tail),
        k_sup_tail: sup(pick(&|x| x.abs() >= k_tail_from, &k)),
        k_sup_center: sup(pick(&|x| x.abs() <= center, &k)),
        min_r2: r2.iter().cloned().fold(f64::INFINITY, f64::min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_derivative_at_tau_zero() {
        // τ' = 1 + kν reduces to 4λc²/(4ν² + λ(2c − ν²)²) when τ = 0
        for (l, c, nu) in [(1.0, 1.0, 0.7), (4.0, -0.5, 2.0), (2.0, 2.0, -1.3)] {
            let k = helicoid_curvature(l, c, 0.0, nu);
            let expected = 4.0 * l * c * c / (4.0 * nu * nu + l * (2.0 * c - nu * nu).powi(2));
            assert!((1.0 + k * nu - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn nu_derivative_at_nu_zero() {
        for (l, c, tau) in [(1.0, 1.0, 0.7), (4.0, -0.5, 2.0)] {
            let k = helicoid_curvature(l, c, tau, 0.0);
            assert!((-k * tau - tau * tau / (l.sqrt() * c)).abs() < 1e-13);
        }
    }

    #[test]
    fn r2_derivative_is_twice_tau() {
        let p = HelicoidParams::new(1.0, 1.0, 1.0).unwrap();
        let prof = solve_helicoid(&p, 5.0, &HelicoidOptions::default()).unwrap();
        let arm = &prof.arms[0];
        for s in [0.5, 1.7, 3.2] {
            let h = 1e-3;
            let r2 = |t: f64| {
                let y = arm.interpolate(t).unwrap();
                y[0] * y[0] + y[1] * y[1]
            };
            let d = (r2(s - 2.0 * h) - 8.0 * r2(s - h) + 8.0 * r2(s + h) - r2(s + 2.0 * h)) / (12.0 * h);
            let y = arm.interpolate(s).unwrap();
            let (tau, _) = tau_nu(y[0], y[1], y[2]);
            assert!((d - 2.0 * tau).abs() < 1e-8, "{}", d - 2.0 * tau);
        }
    }

    #[test]
    fn curvature_derivative_formula() {
        // compare P1/G with a finite difference of k along a trajectory at a k-zero
        let p = HelicoidParams::new(1.0, 1.0, 1.0).unwrap();
        let prof = solve_helicoid(&p, 50.0, &HelicoidOptions::default()).unwrap();
        let d = helicoid_diagnostics(&prof, 25.0, 40.0, 10.0).unwrap();
        assert!(!d.k_zeros.is_empty());
        for (s, kp) in &d.k_zeros {
            let arm = if *s >= 0.0 { &prof.arms[0] } else { &prof.arms[1] };
            let kk = |t: f64| {
                let y = arm.interpolate(t).unwrap();
                let (a, b) = tau_nu(y[0], y[1], y[2]);
                helicoid_curvature(1.0, 1.0, a, b)
            };
            let h = 1e-4;
            let fd = (kk(s + h) - kk(s - h)) / (2.0 * h);
            assert!((fd - kp).abs() < 1e-5 * (1.0 + kp.abs()), "s={s}: {fd} vs {kp}");
        }
    }

    #[test]
    fn residual_vanishes() {
        let p = HelicoidParams::new(4.0, 0.5, 2.0).unwrap();
        let prof = solve_helicoid(&p, 10.0, &HelicoidOptions::default()).unwrap();
        assert!(prof.sup_abs("residual").unwrap() < 1e-7);
    }

    #[test]
    fn rejects_zero_pitch() {
        assert!(HelicoidParams::new(1.0, 0.0, 1.0).is_err());
        assert!(helicoid_rhs(1.0, 0.0, [1.0, 0.0, 0.0]).is_err());
    }
}
