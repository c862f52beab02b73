//! Rotationally invariant vertical translators: the bowl and the translating
//! catenoids.

use super::{Family, ProfileCurve};
use crate::error::{Error, Result};
use crate::geometry::{MetricParam, Point};
use crate::ode::{
    catenoid_apex_curvature, integrate, series_start, Action, Direction, Event, OdeOptions, OdeProblem,
    SeriesKind, Termination, Trajectory, DEFAULT_SERIES_OFFSET,
};
use crate::surface::{gaussian_curvature, graph_shape, patch_shape, vertical_residual, CoordJet, GraphJet, ShapeData};

pub const BOWL_COLUMNS: [&str; 6] = ["r", "phi", "psi", "H", "residual", "K_gauss"];
pub const CATENOID_COLUMNS: [&str; 6] = ["r", "z", "H", "residual", "K_gauss", "branch"];

fn rhs_unchecked(lambda: f64, r: f64, p: f64) -> f64 {
    let sl = lambda.sqrt();
    1.0 / sl + 4.0 * p / (r * (4.0 + lambda * r * r)) * (sl * r * p - 1.0 - lambda * p * p)
}

/// `φ'' = 1/√λ + 4φ'/(r(4+λr²)) (√λ r φ' − 1 − λφ'²)` for the rotational graph `z = φ(r)`.
pub fn rotational_rhs(lambda: f64, r: f64, p: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radial coordinate must be positive, got {r}")));
    }
    Ok(rhs_unchecked(lambda, r, p))
}

/// `f''` for the profile `r = f(z)` of a rotational vertical translator.
pub fn catenoid_rhs(lambda: f64, f: f64, fp: f64) -> f64 {
    let sl = lambda.sqrt();
    let p3 = fp * fp * fp;
    4.0 / (sl * f * (4.0 + lambda * f * f))
        * (lambda * sl + sl * fp * fp - f * p3 - lambda * f * fp - 0.25 * lambda * f * f * f * p3)
}

/// Left side of the barrier curve `r(λr²+4) + 4√λψ(√λrψ − 1 − λψ²)`; it carries the sign of `ψ'`.
pub fn bowl_barrier(lambda: f64, r: f64, psi: f64) -> f64 {
    let sl = lambda.sqrt();
    r * (lambda * r * r + 4.0) + 4.0 * sl * psi * (sl * r * psi - 1.0 - lambda * psi * psi)
}

/// Real root of `x³ + 4x = 4√λ`.
pub fn barrier_root(lambda: f64) -> f64 {
    let target = 4.0 * lambda.sqrt();
    let (mut lo, mut hi) = (0.0, target.max(1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid * mid + 4.0 * mid < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Graph jet of `z = φ(r)` at the point `(r, 0, φ)`.
pub fn rotational_graph_jet(r: f64, phi: f64, psi: f64, psi_prime: f64) -> GraphJet {
    GraphJet { x: r, y: 0.0, u: phi, u_x: psi, u_y: 0.0, u_xx: psi_prime, u_xy: 0.0, u_yy: psi / r }
}

/// Coordinate jet of `(f(z) cos v, f(z) sin v, z)` at `v = 0`.
pub fn rotational_profile_jet(z: f64, f: f64, fp: f64, fpp: f64) -> CoordJet {
    CoordJet {
        point: Point::new(f, 0.0, z),
        d: [[fp, 0.0, 1.0], [0.0, f, 0.0]],
        dd: [[[fpp, 0.0, 0.0], [0.0, fp, 0.0]], [[0.0, fp, 0.0], [-f, 0.0, 0.0]]],
    }
}

fn graph_arm(lambda: f64, r0: f64, phi0: f64, psi0: f64, r_max: f64, opts: &OdeOptions) -> Result<Trajectory> {
    let rhs = move |r: f64, s: &[f64], ds: &mut [f64]| {
        ds[0] = s[1];
        ds[1] = rhs_unchecked(lambda, r, s[1]);
    };
    integrate(&OdeProblem::new(rhs, vec![phi0, psi0], r0, r_max).with_options(opts.clone()), &[])
}

fn graph_row(lambda: MetricParam, r: f64, phi: f64, psi: f64) -> (ShapeData, [f64; 3]) {
    let pp = rhs_unchecked(lambda.value(), r, psi);
    let shape = graph_shape(lambda, &rotational_graph_jet(r, phi, psi, pp));
    let k = gaussian_curvature(&shape).unwrap_or(f64::NAN);
    (shape, [shape.h, vertical_residual(lambda, &shape), k])
}

#[derive(Clone, Debug)]
pub struct BowlOptions {
    pub ode: OdeOptions,
    pub delta: f64,
}

impl Default for BowlOptions {
    fn default() -> Self {
        BowlOptions { ode: OdeOptions::with_tolerances(1e-12, 1e-14), delta: DEFAULT_SERIES_OFFSET }
    }
}

/// The entire rotational graph with `φ(0) = 0`, from a series start at `r = δ` out to `r_max`.
pub fn solve_bowl(lambda: f64, r_max: f64, opts: &BowlOptions) -> Result<ProfileCurve> {
    let lm = MetricParam::new(lambda)?;
    if !(r_max > opts.delta) {
        return Err(Error::InvalidParameter(format!("r_max must exceed the series offset, got {r_max}")));
    }
    let (r0, s0) = series_start(SeriesKind::BowlOrigin { lambda }, opts.delta)?;
    let traj = graph_arm(lambda, r0, s0[0], s0[1], r_max, &opts.ode)?;
    let mut profile = ProfileCurve::new(Family::Bowl { lambda }, &BOWL_COLUMNS);
    profile.rows = traj
        .samples
        .iter()
        .map(|s| {
            let (_, d) = graph_row(lm, s.t, s.y[0], s.y[1]);
            vec![s.t, s.y[0], s.y[1], d[0], d[1], d[2]]
        })
        .collect();
    profile.arms = vec![traj];
    Ok(profile)
}

/// Apex solution `f` of the profile equation from `(f0, 0)` at `z = 0` to `z_end`.
///
/// The equation is regular at the neck, so no series start is needed. Ends with
/// [`Termination::BlowUp`] when `f'` diverges before `z_end`.
pub fn catenoid_apex(lambda: f64, f0: f64, z_end: f64, opts: &OdeOptions) -> Result<Trajectory> {
    MetricParam::new(lambda)?;
    if !(f0 > 0.0 && f0.is_finite()) {
        return Err(Error::InvalidParameter(format!("neck radius f0 must be positive, got {f0}")));
    }
    let rhs = move |_z: f64, s: &[f64], ds: &mut [f64]| {
        ds[0] = s[1];
        ds[1] = catenoid_rhs(lambda, s[0], s[1]);
    };
    let axis = Event::new("axis", move |_z, s: &[f64]| s[0] - 1e-9 * f0, Direction::Falling, Action::Terminate);
    let traj = integrate(&OdeProblem::new(rhs, vec![f0, 0.0], 0.0, z_end).with_options(opts.clone()), &[axis])?;
    if traj.termination == Termination::Event("axis".into()) {
        let s = traj.last();
        return Err(Error::ReachedAxis { f: s.y[0], z: s.t });
    }
    Ok(traj)
}

#[derive(Clone, Debug)]
pub struct CatenoidOptions {
    pub ode: OdeOptions,
    /// Gluing height; picked automatically when `None`.
    pub eps: Option<f64>,
    /// Radius at which both graph arms stop.
    pub r_max: f64,
    /// Samples on the apex piece `[−ε, ε]`.
    pub apex_samples: usize,
}

impl Default for CatenoidOptions {
    fn default() -> Self {
        CatenoidOptions {
            ode: OdeOptions::with_tolerances(1e-12, 1e-14),
            eps: None,
            r_max: 200.0,
            apex_samples: 201,
        }
    }
}

const EPS_MAX: f64 = 0.1;

/// `f'' > 0` and `z f' > 0` on `[−2ε, 2ε] \ {0}`, sampled on the dense output.
fn gluing_window_ok(lambda: f64, up: &Trajectory, down: &Trajectory, eps: f64) -> bool {
    let n = 100;
    for i in 1..=n {
        let z = 2.0 * eps * i as f64 / n as f64;
        for (arm, zz) in [(up, z), (down, -z)] {
            let Some(s) = arm.interpolate(zz) else { return false };
            if !(catenoid_rhs(lambda, s[0], s[1]) > 0.0 && zz * s[1] > 0.0) {
                return false;
            }
        }
    }
    true
}

/// Translating catenoid with neck radius `f0`: apex solution glued at `z = ±ε` to
/// two graph arms `z = φ±(r)`.
///
/// `arms` holds `[apex up, apex down, graph up, graph down]`.
pub fn solve_catenoid(lambda: f64, f0: f64, opts: &CatenoidOptions) -> Result<ProfileCurve> {
    let lm = MetricParam::new(lambda)?;
    let reach = 2.0 * opts.eps.unwrap_or(EPS_MAX).max(EPS_MAX);
    let up = catenoid_apex(lambda, f0, reach, &opts.ode)?;
    let down = catenoid_apex(lambda, f0, -reach, &opts.ode)?;
    let eps = match opts.eps {
        Some(e) => {
            if !(e > 0.0) || !gluing_window_ok(lambda, &up, &down, e) {
                return Err(Error::InvalidParameter(format!("gluing height {e} is not admissible")));
            }
            e
        }
        None => {
            let mut e = EPS_MAX;
            while !gluing_window_ok(lambda, &up, &down, e) {
                e *= 0.5;
                if e < 1e-8 {
                    return Err(Error::InvalidParameter("no admissible gluing height".into()));
                }
            }
            e
        }
    };

    let top = up.interpolate(eps).expect("apex covers the gluing height");
    let bottom = down.interpolate(-eps).expect("apex covers the gluing height");
    if top[1] == 0.0 || bottom[1] == 0.0 {
        return Err(Error::InvalidParameter("vertical gluing slope".into()));
    }
    let arm_up = graph_arm(lambda, top[0], eps, 1.0 / top[1], opts.r_max, &opts.ode)?;
    let arm_down = graph_arm(lambda, bottom[0], -eps, 1.0 / bottom[1], opts.r_max, &opts.ode)?;

    let mut profile = ProfileCurve::new(Family::Catenoid { lambda, f0, eps }, &CATENOID_COLUMNS);
    for s in arm_down.samples.iter().rev() {
        let (_, d) = graph_row(lm, s.t, s.y[0], s.y[1]);
        profile.rows.push(vec![s.t, s.y[0], d[0], d[1], d[2], -1.0]);
    }
    let n = opts.apex_samples.max(3) | 1;
    for i in 0..n {
        let z = -eps + 2.0 * eps * i as f64 / (n - 1) as f64;
        let z = if i == n / 2 { 0.0 } else { z };
        let s = if z >= 0.0 { up.interpolate(z) } else { down.interpolate(z) }.expect("inside apex");
        let fpp = catenoid_rhs(lambda, s[0], s[1]);
        let shape = patch_shape(lm, &rotational_profile_jet(z, s[0], s[1], fpp).to_patch())?;
        let k = gaussian_curvature(&shape).unwrap_or(f64::NAN);
        profile.rows.push(vec![s[0], z, shape.h, vertical_residual(lm, &shape), k, 0.0]);
    }
    for s in &arm_up.samples {
        let (_, d) = graph_row(lm, s.t, s.y[0], s.y[1]);
        profile.rows.push(vec![s.t, s.y[0], d[0], d[1], d[2], 1.0]);
    }
    profile.arms = vec![up, down, arm_up, arm_down];
    Ok(profile)
}

/// `f''(0)` of the apex solution.
pub fn apex_curvature(lambda: f64, f0: f64) -> f64 {
    catenoid_apex_curvature(lambda, f0)
}

/// Whether the polyline `(r, z)` of a catenoid profile has no self-intersections.
pub fn profile_is_embedded(profile: &ProfileCurve) -> bool {
    let (Some(r), Some(z)) = (profile.column("r"), profile.column("z")) else { return false };
    let pts: Vec<(f64, f64)> = r.into_iter().zip(z).collect();
    polyline_is_simple(&pts)
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_cross(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Sort-and-sweep test for proper crossings between non-adjacent segments.
pub fn polyline_is_simple(pts: &[(f64, f64)]) -> bool {
    if pts.len() < 4 {
        return true;
    }
    let mut segs: Vec<(usize, f64, f64)> = (0..pts.len() - 1)
        .map(|i| (i, pts[i].0.min(pts[i + 1].0), pts[i].0.max(pts[i + 1].0)))
        .collect();
    segs.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut active: Vec<(usize, f64, f64)> = Vec::new();
    for s in segs {
        active.retain(|a| a.2 >= s.1);
        for a in &active {
            if a.0.abs_diff(s.0) <= 1 {
                continue;
            }
            let (i, j) = (a.0, s.0);
            let (ylo_i, yhi_i) = (pts[i].1.min(pts[i + 1].1), pts[i].1.max(pts[i + 1].1));
            let (ylo_j, yhi_j) = (pts[j].1.min(pts[j + 1].1), pts[j].1.max(pts[j + 1].1));
            if yhi_i < ylo_j || yhi_j < ylo_i {
                continue;
            }
            if segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                return false;
            }
        }
        active.push(s);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        assert_eq!(rotational_rhs(2.0, 1.0, 0.0).unwrap(), 1.0 / 2f64.sqrt());
        assert_eq!(rotational_rhs(1.0, 2.0, 1.0).unwrap(), 1.0);
        assert_eq!(rotational_rhs(4.0, 1.0, 0.5).unwrap(), 0.25);
        assert!(rotational_rhs(1.0, 0.0, 1.0).is_err());
        assert!((catenoid_rhs(1.0, 1.0, 0.0) - apex_curvature(1.0, 1.0)).abs() < 1e-15);
        assert!((apex_curvature(1.0, 1.0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn barrier_root_solves_cubic() {
        for l in [1.0, 4.0, 9.0] {
            let x = barrier_root(l);
            assert!((x * x * x + 4.0 * x - 4.0 * f64::sqrt(l)).abs() < 1e-12);
        }
    }

    #[test]
    fn bowl_series_and_residual() {
        let p = solve_bowl(1.0, 20.0, &BowlOptions::default()).unwrap();
        let s = p.arms[0].interpolate(1e-3).unwrap();
        assert!((s[1] / 1e-3 - 0.5).abs() < 1e-6);
        assert!(p.sup_abs("residual").unwrap() < 1e-7);
        assert!(p.column("psi").unwrap().iter().all(|v| *v > 0.0));
    }

    #[test]
    fn bowl_offset_robustness() {
        let at_one = |delta: f64| {
            let opts = BowlOptions { delta, ..Default::default() };
            solve_bowl(2.0, 1.0, &opts).unwrap().arms[0].last().y.clone()
        };
        let (a, b) = (at_one(1e-4), at_one(1e-3));
        assert!((a[0] - b[0]).abs() < 1e-7 && (a[1] - b[1]).abs() < 1e-7);
    }

    #[test]
    fn catenoid_profile() {
        let opts = CatenoidOptions { r_max: 20.0, ..Default::default() };
        let p = solve_catenoid(1.0, 1.0, &opts).unwrap();
        assert!(p.sup_abs("residual").unwrap() < 1e-7);
        let r = p.column("r").unwrap();
        let rmin = r.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((rmin - 1.0).abs() < 1e-9);
        assert!(profile_is_embedded(&p));
        // C¹ gluing: apex slope dz/dr = 1/f' equals the arm slope φ'
        let Family::Catenoid { eps, .. } = p.family else { unreachable!() };
        let apex = p.arms[0].interpolate(eps).unwrap();
        let arm = &p.arms[2].samples[0];
        assert!((1.0 / apex[1] - arm.y[1]).abs() < 1e-9);
        assert_eq!(arm.y[0], eps);
    }

    #[test]
    fn crossing_polyline_detected() {
        let pts = [(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0)];
        assert!(!polyline_is_simple(&pts));
        let pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 1.0)];
        assert!(polyline_is_simple(&pts));
    }
}
