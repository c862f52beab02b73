//! Tail fits of rotational arms, endpoint fits of grim reapers, the radial
//! linear oracle and the comparisons with the `λ → ∞` limit surfaces.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::grim::{endpoint_coefficient, grim_reaper_rhs, slab};
use crate::families::rotational::{catenoid_apex, solve_bowl, BowlOptions};
use crate::families::{Family, ProfileCurve};
use crate::geometry::MetricParam;
use crate::ode::{integrate, OdeOptions, OdeProblem, Termination, Trajectory};
use crate::surface::{graph_is_characteristic, graph_shape, GraphJet};

/// Solution of `y' + (b/x)(y − a) = c/x²` with `y(x0) = y0`, evaluated at `x`.
pub fn radial_linear_closed_form(a: f64, b: f64, c: f64, x0: f64, y0: f64, x: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("b must be positive, got {b}")));
    }
    if !(x0 > 0.0) {
        return Err(Error::InvalidParameter(format!("x0 must be positive, got {x0}")));
    }
    if b == 1.0 {
        let d = (y0 - a - c * x0.ln() / x0) * x0;
        Ok(a + d / x + c * x.ln() / x)
    } else {
        let d = (y0 - a - c / ((b - 1.0) * x0)) * x0.powf(b);
        Ok(a + d / x.powf(b) + c / ((b - 1.0) * x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    SubCritical,
    Critical,
    SuperCritical,
}

impl Regime {
    pub fn of(lambda: f64) -> Regime {
        if lambda < 4.0 {
            Regime::SubCritical
        } else if lambda == 4.0 {
            Regime::Critical
        } else {
            Regime::SuperCritical
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub lambda: f64,
    pub regime: Regime,
    /// What `fitted` measures: `log_coefficient`, `eta_log_slope` or `exponent`.
    pub quantity: &'static str,
    pub fitted: f64,
    pub expected: f64,
    pub window: (f64, f64),
    /// Root mean square of the fit residual relative to that of the data.
    pub residual: f64,
    /// Coefficient of `log² r` in `ρ`, reported for `λ = 4` only.
    pub log2_coefficient: Option<f64>,
}

impl AsymptoticFit {
    pub fn relative_error(&self) -> f64 {
        ((self.fitted - self.expected) / self.expected).abs()
    }
}

/// Least squares `y ≈ Σ β_j cols[j]` by modified Gram–Schmidt. Returns the
/// coefficients and the residual sum of squares.
pub fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = cols.len();
    let n = y.len();
    if n < m || cols.iter().any(|c| c.len() != n) {
        return Err(Error::Fit(format!("{n} samples cannot determine {m} coefficients")));
    }
    let mut q: Vec<Vec<f64>> = cols.to_vec();
    let mut r = vec![vec![0.0; m]; m];
    for j in 0..m {
        for i in 0..j {
            let d: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = d;
            let qi = q[i].clone();
            for (v, u) in q[j].iter_mut().zip(&qi) {
                *v -= d * u;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Fit("regression columns are linearly dependent".into()));
        }
        r[j][j] = norm;
        for v in &mut q[j] {
            *v /= norm;
        }
    }
    let qty: Vec<f64> = q.iter().map(|qc| qc.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut beta = vec![0.0; m];
    for j in (0..m).rev() {
        let s: f64 = (j + 1..m).map(|k| r[j][k] * beta[k]).sum();
        beta[j] = (qty[j] - s) / r[j][j];
    }
    let sse = (0..n)
        .map(|i| {
            let fit: f64 = (0..m).map(|j| beta[j] * cols[j][i]).sum();
            (y[i] - fit).powi(2)
        })
        .sum();
    Ok((beta, sse))
}

fn relative_rms(sse: f64, y: &[f64]) -> f64 {
    let ss: f64 = y.iter().map(|v| v * v).sum();
    (sse / ss).sqrt()
}

pub const MIN_TAIL_RADIUS: f64 = 100.0;
pub const TAIL_SAMPLES: usize = 400;

/// Tail fit of a rotational graph arm `t = r`, `y = (φ, ψ)`, over
/// `r ∈ [max(20, r_max/2), r_max]`.
///
/// Works on `ρ = φ − r²/(2√λ)` and `q = ρ' = ψ − r/√λ`:
/// below 4 the slope of `ρ` against `log r` (with `1` and `1/r` as nuisance terms),
/// at 4 the slope of `η = q r` against `log r`, above 4 the exponent `p` of
/// `q ≈ C r^(p−1) + D/r`.
pub fn fit_rotational_asymptotics(lambda: f64, arm: &Trajectory) -> Result<AsymptoticFit> {
    let lm = MetricParam::new(lambda)?;
    let r_max = arm.t_start().max(arm.t_end());
    if r_max < MIN_TAIL_RADIUS {
        return Err(Error::InsufficientTail { needed: MIN_TAIL_RADIUS, available: r_max });
    }
    let lo = (0.5 * r_max).max(20.0);
    let sl = lm.sqrt();
    let mut r = Vec::with_capacity(TAIL_SAMPLES);
    let mut rho = Vec::with_capacity(TAIL_SAMPLES);
    let mut q = Vec::with_capacity(TAIL_SAMPLES);
    for i in 0..TAIL_SAMPLES {
        let x = lo + (r_max - lo) * i as f64 / (TAIL_SAMPLES - 1) as f64;
        let s = arm.interpolate(x).ok_or(Error::InsufficientTail { needed: x, available: r_max })?;
        r.push(x);
        rho.push(s[0] - x * x / (2.0 * sl));
        q.push(s[1] - x / sl);
    }
    let log: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let ones = vec![1.0; r.len()];
    let inv: Vec<f64> = r.iter().map(|x| 1.0 / x).collect();
    let regime = Regime::of(lambda);
    let fit = |quantity, fitted, expected, residual, log2| AsymptoticFit {
        lambda,
        regime,
        quantity,
        fitted,
        expected,
        window: (lo, r_max),
        residual,
        log2_coefficient: log2,
    };
    match regime {
        Regime::SubCritical => {
            let (beta, sse) = least_squares(&[log.clone(), ones, inv], &rho)?;
            let expected = -4.0 / (sl * (4.0 - lambda));
            Ok(fit("log_coefficient", beta[0], expected, relative_rms(sse, &rho), None))
        }
        Regime::Critical => {
            let eta: Vec<f64> = q.iter().zip(&r).map(|(q, r)| q * r).collect();
            let (beta, sse) = least_squares(&[log.clone(), ones.clone()], &eta)?;
            let log2: Vec<f64> = log.iter().map(|l| l * l).collect();
            let (quad, _) = least_squares(&[log2, log, ones], &rho)?;
            Ok(fit("eta_log_slope", beta[0], -0.5, relative_rms(sse, &eta), Some(quad[0])))
        }
        Regime::SuperCritical => {
            let sse_at = |p: f64| -> Result<f64> {
                let pw: Vec<f64> = r.iter().map(|x| x.powf(p - 1.0)).collect();
                Ok(least_squares(&[pw, inv.clone()], &q)?.1)
            };
            let (p, sse) = golden_section(0.01, 0.99, 1e-10, sse_at)?;
            Ok(fit("exponent", p, 1.0 - 4.0 / lambda, relative_rms(sse, &q), None))
        }
    }
}

/// Minimizer of a unimodal `f` on `[a, b]`, with the minimum value.
fn golden_section<F>(mut a: f64, mut b: f64, tol: f64, f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Tail fits of every graph arm of a bowl (one) or catenoid (two) profile.
pub fn fit_profile_asymptotics(profile: &ProfileCurve) -> Result<Vec<AsymptoticFit>> {
    match profile.family {
        Family::Bowl { lambda } => profile.arms.iter().map(|a| fit_rotational_asymptotics(lambda, a)).collect(),
        Family::Catenoid { lambda, .. } => {
            profile.arms.iter().skip(2).map(|a| fit_rotational_asymptotics(lambda, a)).collect()
        }
        other => Err(Error::FamilyMismatch { found: other.name().into(), group: "rotation".into() }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EndpointCoefficient {
    pub endpoint: f64,
    pub fitted: f64,
    pub predicted: f64,
    /// Distance window `[d_lo, d_hi]` to the endpoint used in the fit.
    pub window: (f64, f64),
}

impl EndpointCoefficient {
    pub fn relative_error(&self) -> f64 {
        ((self.fitted - self.predicted) / self.predicted).abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EndpointFit {
    pub left: EndpointCoefficient,
    pub right: EndpointCoefficient,
}

const ENDPOINT_SAMPLES: usize = 200;

fn fit_endpoint(arm: &Trajectory, endpoint: f64, predicted: f64, width: f64) -> Result<EndpointCoefficient> {
    let end = arm.t_end();
    let gap = (endpoint - end).abs();
    let d_lo = (100.0 * gap).max(1e-8 * width);
    let d_hi = 10.0 * d_lo;
    if d_hi > 0.1 * width {
        return Err(Error::Fit(format!("arm stops {gap:e} before the endpoint {endpoint}; too coarse for a fit")));
    }
    let side = (endpoint - arm.t_start()).signum();
    let mut x = Vec::with_capacity(ENDPOINT_SAMPLES);
    let mut g = Vec::with_capacity(ENDPOINT_SAMPLES);
    for i in 0..ENDPOINT_SAMPLES {
        let d = d_lo * (d_hi / d_lo).powf(i as f64 / (ENDPOINT_SAMPLES - 1) as f64);
        let y = endpoint - side * d;
        let s = arm.interpolate(y).ok_or_else(|| Error::Fit(format!("no dense output at y = {y}")))?;
        x.push(-d.ln());
        g.push(s[0]);
    }
    let (beta, _) = least_squares(&[x, vec![1.0; ENDPOINT_SAMPLES]], &g)?;
    Ok(EndpointCoefficient { endpoint, fitted: beta[0], predicted, window: (d_lo, d_hi) })
}

/// Slope of `γ` against `−log` of the distance to each slab endpoint over one
/// decade close to where the arm blows up.
pub fn grim_endpoint_fit(lambda: f64, c: f64, profile: &ProfileCurve) -> Result<EndpointFit> {
    let [right, left] = profile.arms.as_slice() else {
        return Err(Error::Fit("grim reaper profile needs two arms".into()));
    };
    if right.termination != Termination::BlowUp || left.termination != Termination::BlowUp {
        return Err(Error::Fit("both arms must end in blow-up".into()));
    }
    let s = slab(lambda, c);
    Ok(EndpointFit {
        left: fit_endpoint(left, s.a, endpoint_coefficient(lambda, c, s.a), s.width)?,
        right: fit_endpoint(right, s.b, endpoint_coefficient(lambda, c, s.b), s.width)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub family: &'static str,
    pub limit_surface: String,
    pub window: (f64, f64),
    pub lambdas: Vec<f64>,
    /// Sup-norm distance to the limit on the window; `None` where the solution
    /// does not cover the window.
    pub errors: Vec<Option<f64>>,
    /// Same for the first derivative.
    pub derivative_errors: Vec<Option<f64>>,
    /// The expected decay profile evaluated on the grid.
    pub reference_rate: Vec<f64>,
    /// Slope of `log error` against `log λ` over the defined entries.
    pub decay_exponent: Option<f64>,
}

impl LimitReport {
    fn new(family: &'static str, limit_surface: String, window: (f64, f64), lambdas: &[f64], rate: fn(f64) -> f64) -> Self {
        LimitReport {
            family,
            limit_surface,
            window,
            lambdas: lambdas.to_vec(),
            errors: Vec::new(),
            derivative_errors: Vec::new(),
            reference_rate: lambdas.iter().map(|&l| rate(l)).collect(),
            decay_exponent: None,
        }
    }

    fn finish(mut self, results: Vec<Option<(f64, f64)>>) -> Self {
        self.errors = results.iter().map(|r| r.map(|v| v.0)).collect();
        self.derivative_errors = results.iter().map(|r| r.map(|v| v.1)).collect();
        let pts = self.defined();
        if pts.len() >= 2 {
            let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
            self.decay_exponent = least_squares(&[x, vec![1.0; pts.len()]], &y).ok().map(|(b, _)| b[0]);
        }
        self
    }

    /// `(λ, error)` for every grid entry where the error is defined.
    pub fn defined(&self) -> Vec<(f64, f64)> {
        self.lambdas.iter().zip(&self.errors).filter_map(|(l, e)| e.map(|e| (*l, e))).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        let d = self.defined();
        d.len() == self.lambdas.len() && d.windows(2).all(|w| w[1].1 < w[0].1)
    }

    /// Error divided by the reference rate, per defined entry.
    pub fn rate_ratios(&self) -> Vec<f64> {
        self.errors.iter().zip(&self.reference_rate).filter_map(|(e, r)| e.map(|e| e / r)).collect()
    }

    /// `error(λ_i) / error(λ_{i+1})` for consecutive defined entries.
    pub fn successive_ratios(&self) -> Vec<f64> {
        self.defined().windows(2).map(|w| w[0].1 / w[1].1).collect()
    }
}

const WINDOW_SAMPLES: usize = 401;

fn window_grid(window: (f64, f64)) -> impl Iterator<Item = f64> {
    (0..WINDOW_SAMPLES).map(move |i| window.0 + (window.1 - window.0) * i as f64 / (WINDOW_SAMPLES - 1) as f64)
}

fn check_grid(lambdas: &[f64], window: (f64, f64)) -> Result<()> {
    if lambdas.is_empty() || lambdas.windows(2).any(|w| !(w[1] > w[0])) || !(lambdas[0] > 0.0) {
        return Err(Error::InvalidParameter("λ grid must be positive and increasing".into()));
    }
    if !(window.1 > window.0) || !window.0.is_finite() || !window.1.is_finite() {
        return Err(Error::InvalidParameter("window must be a non-empty compact interval".into()));
    }
    Ok(())
}

fn limit_ode() -> OdeOptions {
    OdeOptions::with_tolerances(1e-12, 1e-14)
}

fn grim_sup_on(lambda: f64, c: f64, window: (f64, f64)) -> Result<Option<(f64, f64)>> {
    let s = slab(lambda, c);
    if !(window.0 > s.a && window.1 < s.b) {
        return Ok(None);
    }
    let rhs = move |y: f64, st: &[f64], ds: &mut [f64]| {
        let (a, b) = grim_reaper_rhs(lambda, c, y, st[0], st[1]);
        ds[0] = a;
        ds[1] = b;
    };
    let mut arms = Vec::new();
    for end in [window.1.max(0.0), window.0.min(0.0)] {
        if end == 0.0 {
            continue;
        }
        arms.push(integrate(&OdeProblem::new(rhs, vec![0.0, 0.0], 0.0, end).with_options(limit_ode()), &[])?);
    }
    let (mut sup0, mut sup1) = (0.0_f64, 0.0_f64);
    for y in window_grid(window) {
        let Some(st) = arms.iter().find(|a| a.covers(y)).and_then(|a| a.interpolate(y)) else {
            return Ok(None);
        };
        sup0 = sup0.max(st[0].abs());
        sup1 = sup1.max(st[1].abs());
    }
    Ok(Some((sup0, sup1)))
}

/// Distance of the tilted grim reapers to the plane `z = xy/2 + cx` on a strip
/// `y ∈ K`, where `γ_λ → 0` at the rate `log(√λ)/√λ`.
pub fn limit_grim_reaper(c: f64, lambdas: &[f64], window: (f64, f64)) -> Result<LimitReport> {
    check_grid(lambdas, window)?;
    let results = lambdas.par_iter().map(|&l| grim_sup_on(l, c, window)).collect::<Result<Vec<_>>>()?;
    let rep = LimitReport::new("grim", format!("z = xy/2 + {c}x"), window, lambdas, |l| l.sqrt().ln() / l.sqrt());
    Ok(rep.finish(results))
}

/// `f̃(z) = √(4z² + f0⁴)/f0`.
pub fn catenoid_limit_profile(f0: f64, z: f64) -> (f64, f64) {
    let root = (4.0 * z * z + f0.powi(4)).sqrt();
    (root / f0, 4.0 * z / (f0 * root))
}

fn catenoid_sup_on(lambda: f64, f0: f64, window: (f64, f64)) -> Result<Option<(f64, f64)>> {
    let mut arms = Vec::new();
    for end in [window.1.max(0.0), window.0.min(0.0)] {
        if end == 0.0 {
            continue;
        }
        let arm = match catenoid_apex(lambda, f0, end, &limit_ode()) {
            Ok(a) => a,
            Err(Error::ReachedAxis { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if arm.termination != Termination::SpanEnd {
            return Ok(None);
        }
        arms.push(arm);
    }
    let (mut sup0, mut sup1) = (0.0_f64, 0.0_f64);
    for z in window_grid(window) {
        let Some(st) = arms.iter().find(|a| a.covers(z)).and_then(|a| a.interpolate(z)) else {
            return Ok(None);
        };
        let (f, fp) = catenoid_limit_profile(f0, z);
        sup0 = sup0.max((st[0] - f).abs());
        sup1 = sup1.max((st[1] - fp).abs());
    }
    Ok(Some((sup0, sup1)))
}

/// Distance of the apex solutions to `f̃` on `z ∈ K`, expected to decay like `λ^{-1/2}`.
pub fn limit_catenoid(f0: f64, lambdas: &[f64], window: (f64, f64)) -> Result<LimitReport> {
    check_grid(lambdas, window)?;
    if !(f0 > 0.0) {
        return Err(Error::InvalidParameter(format!("neck radius f0 must be positive, got {f0}")));
    }
    let results = lambdas.par_iter().map(|&l| catenoid_sup_on(l, f0, window)).collect::<Result<Vec<_>>>()?;
    let rep = LimitReport::new("catenoid", format!("r = sqrt(4z^2 + {f0}^4)/{f0}"), window, lambdas, |l| 1.0 / l.sqrt());
    Ok(rep.finish(results))
}

/// Distance of the bowls (`φ(0) = 0`) to the horizontal plane on `r ≤ r_max`.
/// The derivative column is compared with the bound profile `λ^{-1/6}`.
pub fn limit_bowl(lambdas: &[f64], r_max: f64) -> Result<LimitReport> {
    check_grid(lambdas, (0.0, r_max))?;
    let results = lambdas
        .par_iter()
        .map(|&l| {
            let prof = solve_bowl(l, r_max, &BowlOptions::default())?;
            let arm = &prof.arms[0];
            let (mut sup0, mut sup1) = (0.0_f64, 0.0_f64);
            for r in window_grid((arm.t_start(), r_max)) {
                let st = arm.interpolate(r).expect("bowl covers its span");
                sup0 = sup0.max(st[0].abs());
                sup1 = sup1.max(st[1].abs());
            }
            Ok(Some((sup0, sup1)))
        })
        .collect::<Result<Vec<_>>>()?;
    let rep = LimitReport::new("bowl", "z = 0".into(), (0.0, r_max), lambdas, |l| l.powf(-1.0 / 6.0));
    Ok(rep.finish(results))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorizontalCurvature {
    pub characteristic: bool,
    pub samples: Vec<(f64, f64)>,
    /// Extrapolated `lim H(λ)`; `None` at characteristic points.
    pub limit: Option<f64>,
    /// Root mean square misfit of the `H∞ + A/λ` model.
    pub residual: f64,
}

pub const HORIZONTAL_GRID: [f64; 3] = [1e2, 1e3, 1e4];

/// Evaluates `H(λ)` of a graph jet on a grid and extrapolates with `H∞ + A/λ`.
pub fn horizontal_mean_curvature(jet: &GraphJet, lambdas: &[f64]) -> Result<HorizontalCurvature> {
    check_grid(lambdas, (0.0, 1.0))?;
    let samples = lambdas
        .iter()
        .map(|&l| Ok((l, graph_shape(MetricParam::new(l)?, jet).h)))
        .collect::<Result<Vec<_>>>()?;
    if graph_is_characteristic(jet) {
        return Ok(HorizontalCurvature { characteristic: true, samples, limit: None, residual: f64::NAN });
    }
    let h: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let inv: Vec<f64> = samples.iter().map(|s| 1.0 / s.0).collect();
    let (beta, sse) = least_squares(&[vec![1.0; h.len()], inv], &h)?;
    Ok(HorizontalCurvature {
        characteristic: false,
        samples,
        limit: Some(beta[0]),
        residual: (sse / h.len() as f64).sqrt(),
    })
}

/// Graph jet of `z = (f0/2)√(r² − f0²)`, the upper half of the catenoid limit, at `(r, 0)`.
pub fn catenoid_limit_jet(f0: f64, r: f64) -> GraphJet {
    let s = (r * r - f0 * f0).sqrt();
    let phi = 0.5 * f0 * s;
    let psi = 0.5 * f0 * r / s;
    let psi_p = -0.5 * f0 * f0 * f0 / (s * s * s);
    GraphJet { x: r, y: 0.0, u: phi, u_x: psi, u_y: 0.0, u_xx: psi_p, u_xy: 0.0, u_yy: psi / r }
}

/// Graph jet of the plane `z = xy/2 + cx`.
pub fn grim_limit_jet(c: f64, x: f64, y: f64) -> GraphJet {
    GraphJet { x, y, u: 0.5 * x * y + c * x, u_x: 0.5 * y + c, u_y: 0.5 * x, u_xx: 0.0, u_xy: 0.5, u_yy: 0.0 }
}
