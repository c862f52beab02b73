//! The verification suites behind `nil3 verify`.

use std::str::FromStr;

use rayon::prelude::*;

use crate::asymptotics::{
    catenoid_limit_jet, catenoid_limit_profile, fit_rotational_asymptotics, grim_endpoint_fit, grim_limit_jet,
    horizontal_mean_curvature, limit_bowl, limit_catenoid, limit_grim_reaper, Regime, HORIZONTAL_GRID,
};
use crate::error::{Error, Result};
use crate::families::grim::{grim_jet, grim_state, numerical_endpoints, GrimOptions};
use crate::families::helicoid::{helicoid_diagnostics, HelicoidOptions};
use crate::families::rotational::{profile_is_embedded, rotational_profile_jet, BowlOptions};
use crate::families::{
    grim_reaper_closed_form, slab, solve_bowl, solve_catenoid, solve_grim_reaper, solve_helicoid, CatenoidOptions,
    GrimReaperParams, HelicoidParams, ProfileCurve,
};
use crate::geometry::{
    connection_table, covariant_derivative_fd, group_inv, group_mul, metric, sectional_curvature, FrameIndex,
    FrameVector, Isometry, KillingField, MetricParam, Point,
};
use crate::report::{Check, Comparison, VerificationReport};
use crate::surface::{gaussian_curvature, graph_shape, intrinsic_curvature, patch_shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Core,
    Asymptotics,
    Limits,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Asymptotics => "asymptotics",
            Suite::Limits => "limits",
            Suite::All => "all",
        }
    }

    /// Acceptance criteria covered by the suite, in report order.
    pub fn criteria(self) -> &'static [u32] {
        match self {
            Suite::Core => &[1, 2, 3, 4, 7, 9],
            Suite::Asymptotics => &[5, 6],
            Suite::Limits => &[8],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Suite::Core),
            "asymptotics" => Ok(Suite::Asymptotics),
            "limits" => Ok(Suite::Limits),
            "all" => Ok(Suite::All),
            _ => Err(Error::InvalidParameter(format!("unknown suite {s:?}"))),
        }
    }
}

pub const GRIM_GRID: [(f64, f64); 9] =
    [(0.5, 0.0), (0.5, 1.0), (0.5, 2.0), (1.0, 0.0), (1.0, 1.0), (1.0, 2.0), (4.0, 0.0), (4.0, 1.0), (4.0, 2.0)];

/// Threads for the work pool: `NIL3_THREADS` when set to a positive integer.
pub fn thread_count() -> Option<usize> {
    std::env::var("NIL3_THREADS").ok()?.parse().ok().filter(|n| *n > 0)
}

/// Runs a suite on a pool capped by `NIL3_THREADS`. Criteria run in parallel,
/// checks come back in criterion order.
pub fn run_suite(suite: Suite) -> Result<VerificationReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let mut extra: Vec<fn() -> Vec<Check>> = Vec::new();
    if matches!(suite, Suite::Asymptotics | Suite::All) {
        extra.push(endpoint_fits);
        extra.push(catenoid_structure);
    }
    let checks = pool.install(|| {
        let mut jobs: Vec<fn() -> Vec<Check>> = suite.criteria().iter().map(|&c| criterion_fn(c)).collect();
        jobs.extend(extra);
        jobs.par_iter().map(|f| f()).collect::<Vec<_>>()
    });
    Ok(VerificationReport::new(suite.name(), checks.into_iter().flatten().collect()))
}

pub fn criterion_fn(n: u32) -> fn() -> Vec<Check> {
    match n {
        1 => criterion_closed_form,
        2 => criterion_slab,
        3 => criterion_residual,
        4 => criterion_curvature,
        5 => criterion_rotational_asymptotics,
        6 => criterion_bowl,
        7 => criterion_helicoid,
        8 => criterion_limits,
        9 => criterion_geometry,
        _ => || Vec::new(),
    }
}

/// Checks for a single criterion.
pub fn run_criterion(n: u32) -> Vec<Check> {
    criterion_fn(n)()
}

fn grim(lambda: f64, c: f64) -> Result<ProfileCurve> {
    solve_grim_reaper(&GrimReaperParams::new(lambda, c)?, &GrimOptions::default())
}

fn sup<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0_f64, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// Points `frac(i·φ)` of the golden-ratio sequence, mapped to `[lo, hi]`.
fn quasi_random(n: usize, lo: f64, hi: f64, shift: f64) -> Vec<f64> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    (1..=n).map(|i| lo + (hi - lo) * (shift + i as f64 * phi).fract()).collect()
}

fn criterion_closed_form() -> Vec<Check> {
    const C: Option<u32> = Some(1);
    let reference = "closed-form first derivative of the tilted grim reaper";
    GRIM_GRID
        .par_iter()
        .map(|&(l, c)| {
            let name = format!("grim gamma' vs closed form, lambda={l}, c={c}");
            let prof = match grim(l, c) {
                Ok(p) => p,
                Err(e) => return Check::failed(C, name, reference, &e.to_string()),
            };
            let s = slab(l, c);
            let (lo, hi) = (s.a + 0.05 * s.width, s.b - 0.05 * s.width);
            let err = sup((0..=2000).map(|i| {
                let y = lo + (hi - lo) * i as f64 / 2000.0;
                let num = grim_state(&prof, y).map_or(f64::NAN, |st| st[1]);
                num - grim_reaper_closed_form(l, c, y).unwrap_or(f64::NAN)
            }));
            Check::new(C, name, reference, 0.0, err, 1e-8, Comparison::Absolute)
        })
        .collect()
}

fn criterion_slab() -> Vec<Check> {
    const C: Option<u32> = Some(2);
    let mut out: Vec<Check> = GRIM_GRID
        .par_iter()
        .flat_map_iter(|&(l, c)| {
            let s = slab(l, c);
            let mut v = Vec::new();
            match grim(l, c).ok().as_ref().and_then(numerical_endpoints) {
                Some((a, b)) => {
                    let r = "slab endpoints of the tilted grim reaper";
                    v.push(Check::new(C, format!("left endpoint, lambda={l}, c={c}"), r, s.a, a, 1e-5, Comparison::Absolute));
                    v.push(Check::new(C, format!("right endpoint, lambda={l}, c={c}"), r, s.b, b, 1e-5, Comparison::Absolute));
                }
                None => v.push(Check::failed(C, format!("endpoints, lambda={l}, c={c}"), "slab endpoints", "no blow-up")),
            }
            let closed = 2.0 / l.sqrt() * (1.0 + l * c * c).sqrt() * (0.5 * std::f64::consts::PI * l.sqrt()).sinh();
            v.push(Check::new(
                C,
                format!("slab width b-a, lambda={l}, c={c}"),
                "slab width closed form",
                closed,
                s.b - s.a,
                1e-10,
                Comparison::Absolute,
            ));
            v
        })
        .collect();
    out.push(Check::new(
        C,
        "slab width at lambda=1, c=0",
        "slab width closed form",
        4.60260,
        slab(1.0, 0.0).width,
        1e-5,
        Comparison::Absolute,
    ));
    out
}

fn residual_check(name: String, prof: Result<ProfileCurve>) -> Check {
    let reference = "vertical translator equation H = g(nu, Z/sqrt(lambda))";
    match prof {
        Ok(p) => {
            let r = p.sup_abs("residual").unwrap_or(f64::NAN);
            Check::new(Some(3), format!("{name} ({} samples)", p.len()), reference, 0.0, r, 1e-7, Comparison::Absolute)
        }
        Err(e) => Check::failed(Some(3), name, reference, &e.to_string()),
    }
}

fn criterion_residual() -> Vec<Check> {
    let mut jobs: Vec<(String, Box<dyn Fn() -> Result<ProfileCurve> + Send + Sync>)> = Vec::new();
    for (l, c) in GRIM_GRID {
        jobs.push((format!("grim residual, lambda={l}, c={c}"), Box::new(move || grim(l, c))));
    }
    for l in [1.0, 4.0, 9.0] {
        jobs.push((format!("bowl residual, lambda={l}"), Box::new(move || solve_bowl(l, 200.0, &BowlOptions::default()))));
    }
    for (l, f0) in [(1.0, 1.0), (4.0, 0.5), (9.0, 2.0)] {
        jobs.push((
            format!("catenoid residual, lambda={l}, f0={f0}"),
            Box::new(move || solve_catenoid(l, f0, &CatenoidOptions::default())),
        ));
    }
    for (l, p, r0) in [(1.0, 1.0, 1.0), (4.0, 0.5, 2.0), (1.0, 2.0, 0.5)] {
        jobs.push((
            format!("helicoid residual, lambda={l}, pitch={p}, r0={r0}"),
            Box::new(move || solve_helicoid(&HelicoidParams::new(l, p, r0)?, 50.0, &HelicoidOptions::default())),
        ));
    }
    jobs.par_iter().map(|(name, f)| residual_check(name.clone(), f())).collect()
}

/// `λ(√λ αβ − 1)/((1 + λα²)(1 + λα² + λβ²))`.
pub fn grim_intrinsic_closed_form(lambda: f64, alpha: f64, beta: f64) -> f64 {
    let l = lambda;
    l * (l.sqrt() * alpha * beta - 1.0) / ((1.0 + l * alpha * alpha) * (1.0 + l * alpha * alpha + l * beta * beta))
}

/// `−λ(1 − λc²)²/(4(1 + λc²)²)`.
pub fn grim_gaussian_at_axis(lambda: f64, c: f64) -> f64 {
    let q = lambda * c * c;
    -lambda * (1.0 - q).powi(2) / (4.0 * (1.0 + q).powi(2))
}

fn criterion_curvature() -> Vec<Check> {
    const C: Option<u32> = Some(4);
    let mut out: Vec<Check> = GRIM_GRID
        .iter()
        .map(|&(l, c)| {
            let lm = MetricParam::new(l).expect("grid λ is positive");
            let gpp = crate::families::grim_reaper_rhs(l, c, 0.0, 0.0, 0.0).1;
            let shape = graph_shape(lm, &grim_jet(c, 0.0, 0.0, 0.0, 0.0, gpp));
            let k = gaussian_curvature(&shape).unwrap_or(f64::NAN);
            Check::new(
                C,
                format!("Gaussian curvature at y=0, lambda={l}, c={c}"),
                "Gaussian curvature of the tilted grim reaper on its axis",
                grim_gaussian_at_axis(l, c),
                k,
                1e-9,
                Comparison::Absolute,
            )
        })
        .collect();

    let reference = "intrinsic curvature of the tilted grim reaper via the Gauss equation";
    for (l, c) in [(1.0, 0.0), (1.0, 1.0), (4.0, 2.0)] {
        let name = format!("intrinsic curvature at 100 points, lambda={l}, c={c}");
        let Ok(prof) = grim(l, c) else {
            out.push(Check::failed(C, name, reference, "solve failed"));
            continue;
        };
        let s = slab(l, c);
        let lm = MetricParam::new(l).expect("grid λ is positive");
        let ys = quasi_random(100, s.a + 0.02 * s.width, s.b - 0.02 * s.width, 0.0);
        let xs = quasi_random(100, -3.0, 3.0, 0.5);
        let err = sup(ys.iter().zip(&xs).map(|(&y, &x)| {
            let Some([g, gp]) = grim_state(&prof, y) else { return f64::NAN };
            let gpp = crate::families::grim_reaper_rhs(l, c, y, g, gp).1;
            let jet = grim_jet(c, x, y, g, gp, gpp);
            let k = intrinsic_curvature(lm, &jet, &graph_shape(lm, &jet)).unwrap_or(f64::NAN);
            (k - grim_intrinsic_closed_form(l, jet.alpha(), jet.beta())) / (1.0 + k.abs())
        }));
        out.push(Check::new(C, name, reference, 0.0, err, 1e-9, Comparison::Absolute));
    }

    let name = "intrinsic curvature takes both signs, lambda=1, c=0";
    match grim(1.0, 0.0).map(|p| p.column("K_intrinsic").unwrap_or_default()) {
        Ok(k) => {
            let neg = k.iter().any(|v| *v < 0.0);
            let pos = k.iter().any(|v| *v > 0.0);
            out.push(Check::flag(C, name, "intrinsic curvature of the grim reaper has both signs", neg && pos));
        }
        Err(e) => out.push(Check::failed(C, name, "intrinsic curvature sign change", &e.to_string())),
    }
    out
}

fn criterion_rotational_asymptotics() -> Vec<Check> {
    const C: Option<u32> = Some(5);
    [1.0_f64, 2.0, 4.0, 9.0, 16.0]
        .par_iter()
        .flat_map_iter(|&l| {
            let reference = match Regime::of(l) {
                Regime::SubCritical => "rotational graph: log coefficient -4/(sqrt(lambda)(4-lambda))",
                Regime::Critical => "rotational graph at lambda=4: zeta = q r / log r tends to -1/2",
                Regime::SuperCritical => "rotational graph: exponent 1-4/lambda of the correction",
            };
            let tol = if Regime::of(l) == Regime::Critical { 0.05 } else { 0.03 };
            let fit = solve_bowl(l, 200.0, &BowlOptions::default())
                .and_then(|p| fit_rotational_asymptotics(l, &p.arms[0]));
            let mut v = Vec::new();
            match fit {
                Ok(f) => {
                    v.push(Check::new(C, format!("bowl tail {} at lambda={l}", f.quantity), reference, f.expected, f.fitted, tol, Comparison::Relative));
                    v.push(Check::new(C, format!("bowl tail fit residual at lambda={l}"), "accepted fits have relative residual below 0.05", 0.05, f.residual, 0.0, Comparison::Below));
                    if let Some(q) = f.log2_coefficient {
                        v.push(Check::new(
                            None,
                            "bowl log^2 coefficient at lambda=4 (informational)",
                            "log^2 coefficient implied by zeta -> -1/2",
                            -0.25,
                            q,
                            0.05,
                            Comparison::Relative,
                        ));
                    }
                }
                Err(e) => v.push(Check::failed(C, format!("bowl tail fit at lambda={l}"), reference, &e.to_string())),
            }
            v
        })
        .collect()
}

fn criterion_bowl() -> Vec<Check> {
    const C: Option<u32> = Some(6);
    [1.0_f64, 2.0, 4.0, 9.0, 16.0]
        .par_iter()
        .flat_map_iter(|&l| {
            let sl = l.sqrt();
            let prof = match solve_bowl(l, 200.0, &BowlOptions::default()) {
                Ok(p) => p,
                Err(e) => return vec![Check::failed(C, format!("bowl at lambda={l}"), "bowl", &e.to_string())],
            };
            let r = prof.column("r").unwrap_or_default();
            let psi = prof.column("psi").unwrap_or_default();
            let (r0, p0) = (r[0], psi[0]);
            let (r1, p1) = (r[r.len() - 1], psi[psi.len() - 1]);
            vec![
                Check::new(C, format!("psi/r near the axis, lambda={l}"), "bowl regularity at the axis psi/r -> 1/(2 sqrt(lambda))", 0.5 / sl, p0 / r0, 1e-6, Comparison::Absolute),
                Check::new(C, format!("psi/r at r=200, lambda={l}"), "bowl growth psi/r -> 1/sqrt(lambda)", 1.0 / sl, p1 / r1, 0.02, Comparison::Relative),
                Check::new(C, format!("min psi on (0, 200], lambda={l}"), "bowl is increasing in r", 0.0, psi.iter().cloned().fold(f64::INFINITY, f64::min), 0.0, Comparison::AtLeast),
                Check::flag(C, format!("psi > 0 on (0, 200], lambda={l}"), "bowl is increasing in r", psi.iter().all(|p| *p > 0.0)),
            ]
        })
        .collect()
}

fn criterion_helicoid() -> Vec<Check> {
    const C: Option<u32> = Some(7);
    let mut grid = Vec::new();
    for l in [1.0, 4.0] {
        for p in [0.5, 1.0, 2.0] {
            for r0 in [0.5, 1.0, 2.0] {
                grid.push((l, p, r0));
            }
        }
    }
    grid.par_iter()
        .flat_map_iter(|&(l, p, r0)| {
            let tag = format!("lambda={l}, pitch={p}, r0={r0}");
            let d = HelicoidParams::new(l, p, r0)
                .and_then(|hp| solve_helicoid(&hp, 50.0, &HelicoidOptions::default()))
                .and_then(|prof| helicoid_diagnostics(&prof, 25.0, 40.0, 10.0));
            let d = match d {
                Ok(d) => d,
                Err(e) => return vec![Check::failed(C, format!("helicoid {tag}"), "helicoid diagnostics", &e.to_string())],
            };
            let min_nu_prime = d.nu_zeros.iter().map(|z| z.1).fold(f64::INFINITY, f64::min);
            vec![
                Check::new(C, format!("helicoid r^2 local minima, {tag}"), "r^2 has exactly one critical point, a minimum", 1.0, d.r2_local_minima as f64, 0.0, Comparison::Exact),
                Check::new(C, format!("helicoid tau zeros, {tag}"), "tau vanishes exactly once", 1.0, d.tau_zeros as f64, 0.0, Comparison::Exact),
                Check::new(C, format!("helicoid min nu' at zeros of nu, {tag}"), "nu has finitely many zeros with nu' >= 0", 0.0, if d.nu_zeros.is_empty() { 0.0 } else { min_nu_prime }, 0.0, Comparison::AtLeast),
                Check::flag(C, format!("helicoid winding monotone on both tails, {tag}"), "winding angle strictly monotone at both ends", d.winding_monotone_forward_tail && d.winding_monotone_backward_tail),
                Check::new(C, format!("helicoid sup|k| on |s| in [40,50] below |s| <= 10, {tag}"), "curvature tends to zero", d.k_sup_center, d.k_sup_tail, 0.0, Comparison::Below),
            ]
        })
        .collect()
}

fn criterion_limits() -> Vec<Check> {
    const C: Option<u32> = Some(8);
    let mut out = Vec::new();

    match limit_grim_reaper(0.0, &[10.0, 1e2, 1e3, 1e4], (-1.0, 1.0)) {
        Ok(rep) => {
            out.push(Check::flag(C, "grim sup|gamma| on [-1,1] strictly decreasing", "grim reapers converge to z = xy/2 + cx on strips", rep.strictly_decreasing()));
            let ratios = rep.rate_ratios();
            let first = ratios.first().copied().unwrap_or(f64::NAN);
            let max = ratios.iter().cloned().fold(f64::NAN, f64::max);
            out.push(Check::new(C, "grim sup|gamma| / (log(sqrt(lambda))/sqrt(lambda)) stays bounded", "decay bound C log(sqrt(lambda))/sqrt(lambda)", first, max, 0.0, Comparison::AtMost));
        }
        Err(e) => out.push(Check::failed(C, "grim limit", "grim limit", &e.to_string())),
    }

    match limit_catenoid(1.0, &[1e3, 4e3, 1.6e4, 6.4e4], (-2.0, 2.0)) {
        Ok(rep) => {
            out.push(Check::flag(C, "catenoid sup|f - f~| on [-2,2] strictly decreasing", "catenoids converge to the profile sqrt(4z^2+f0^4)/f0", rep.strictly_decreasing()));
            for (i, r) in rep.successive_ratios().iter().enumerate() {
                let name = format!("catenoid error ratio lambda={} / lambda={}", rep.lambdas[i], rep.lambdas[i + 1]);
                out.push(Check::new(C, name, "decay like lambda^(-1/2): quadrupling lambda halves the error", 2.0, *r, 0.4, Comparison::Absolute));
            }
        }
        Err(e) => out.push(Check::failed(C, "catenoid limit", "catenoid limit", &e.to_string())),
    }

    match limit_bowl(&[10.0, 1e2, 1e3], 2.0) {
        Ok(rep) => out.push(Check::flag(C, "bowl sup|phi| on r <= 2 strictly decreasing", "bowls converge to a horizontal plane", rep.strictly_decreasing())),
        Err(e) => out.push(Check::failed(C, "bowl limit", "bowl limit", &e.to_string())),
    }

    let mut plane_h = 0.0_f64;
    let mut flat_h = 0.0_f64;
    for l in [1.0, 10.0, 1e2, 1e4] {
        let lm = MetricParam::new(l).expect("positive");
        for c in [0.0, 1.0, 2.0] {
            for &x in &[-2.0, -0.5, 0.0, 1.0, 3.0] {
                for &y in &[-1.5, 0.0, 0.7, 2.0] {
                    plane_h = plane_h.max(graph_shape(lm, &grim_limit_jet(c, x, y)).h.abs());
                    let flat = crate::surface::GraphJet { x, y, ..Default::default() };
                    flat_h = flat_h.max(graph_shape(lm, &flat).h.abs());
                }
            }
        }
    }
    out.push(Check::new(C, "H of z = xy/2 + cx", "limit of the grim reapers is minimal", 0.0, plane_h, 1e-12, Comparison::Absolute));
    out.push(Check::new(C, "H of the horizontal plane", "limit of the bowls is minimal", 0.0, flat_h, 1e-12, Comparison::Absolute));

    let lm = MetricParam::new(1.0).expect("positive");
    let (z, f0) = (0.1, 1.0);
    let (f, fp) = catenoid_limit_profile(f0, z);
    let fpp = 4.0 * f0.powi(3) / (4.0 * z * z + f0.powi(4)).powf(1.5);
    let h = patch_shape(lm, &rotational_profile_jet(z, f, fp, fpp).to_patch()).map(|s| s.h.abs()).unwrap_or(f64::NAN);
    out.push(Check::new(C, "|H| of the f~ sweep at z=0.1, lambda=1", "limit catenoid is not minimal for finite lambda", 1e-3, h, 0.0, Comparison::AtLeast));
    let hz = horizontal_mean_curvature(&catenoid_limit_jet(f0, 2.0), &HORIZONTAL_GRID)
        .ok()
        .and_then(|r| r.limit)
        .unwrap_or(f64::NAN);
    out.push(Check::new(C, "horizontal mean curvature of the f~ sweep at r=2", "limit catenoid is horizontal-minimal", 0.0, hz, 1e-3, Comparison::Absolute));
    out
}

fn criterion_geometry() -> Vec<Check> {
    const C: Option<u32> = Some(9);
    let pts: Vec<Point> = (0..40)
        .map(|i| {
            let q = quasi_random(3, -5.0, 5.0, 0.1 * i as f64 + 0.013);
            Point::new(q[0], q[1], q[2])
        })
        .collect();
    let mut assoc = 0.0_f64;
    let mut inv = 0.0_f64;
    for w in pts.windows(3) {
        let (p, q, r) = (w[0], w[1], w[2]);
        assoc = assoc.max(group_mul(group_mul(p, q), r).max_abs_diff(&group_mul(p, group_mul(q, r))));
        inv = inv.max(group_mul(p, group_inv(p)).max_abs_diff(&Point::ORIGIN));
        inv = inv.max(group_mul(group_inv(p), p).max_abs_diff(&Point::ORIGIN));
    }
    let mut out = vec![
        Check::new(C, "group associativity", "Heisenberg group law", 0.0, assoc, 1e-12, Comparison::Absolute),
        Check::new(C, "group inverse", "Heisenberg group law", 0.0, inv, 1e-12, Comparison::Absolute),
    ];

    let mut ortho = 0.0_f64;
    let mut torsion = 0.0_f64;
    let mut compat = 0.0_f64;
    let mut sec = 0.0_f64;
    let mut killing = 0.0_f64;
    for l in [0.5, 1.0, 4.0, 100.0] {
        let lm = MetricParam::new(l).expect("positive");
        for &p in &pts[..8] {
            let frame = [FrameVector::x(p), FrameVector::y(p), FrameVector::unit_vertical(lm, p)];
            for (i, a) in frame.iter().enumerate() {
                for (j, b) in frame.iter().enumerate() {
                    let e = if i == j { 1.0 } else { 0.0 };
                    ortho = ortho.max((metric(lm, a, b).unwrap_or(f64::NAN) - e).abs());
                }
            }
            sec = sec.max((sectional_curvature(lm, &frame[0], &frame[1]).unwrap_or(f64::NAN) + 0.75 * l).abs());
            sec = sec.max((sectional_curvature(lm, &frame[0], &frame[2]).unwrap_or(f64::NAN) - 0.25 * l).abs());
            sec = sec.max((sectional_curvature(lm, &frame[1], &frame[2]).unwrap_or(f64::NAN) - 0.25 * l).abs());

            let field = KillingField::new(0.7, -1.3, 0.4, 1.1);
            let dirs = [FrameVector::new(p, 1.0, 0.0, 0.0), FrameVector::new(p, 0.0, 1.0, 0.0), FrameVector::new(p, 0.3, -0.2, 0.9)];
            for v in &dirs {
                for w in &dirs {
                    let dv = covariant_derivative_fd(lm, |q| field.coeffs_at(q), v, 1e-4);
                    let dw = covariant_derivative_fd(lm, |q| field.coeffs_at(q), w, 1e-4);
                    let s = metric(lm, &dv, w).unwrap_or(f64::NAN) + metric(lm, v, &dw).unwrap_or(f64::NAN);
                    killing = killing.max(s.abs() / (1.0 + l));
                }
            }
        }
        // the frame [X, Y] = Z, the other brackets vanish; orthonormal-frame table
        use FrameIndex::*;
        let sl = lm.sqrt();
        let bracket = |i, j| {
            let a = connection_table(lm, i, j);
            let b = connection_table(lm, j, i);
            [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
        };
        let e = |v: [f64; 3], w: [f64; 3]| (0..3).fold(0.0_f64, |m, k| m.max((v[k] - w[k]).abs()));
        torsion = torsion.max(e(bracket(X, Y), [0.0, 0.0, sl]));
        torsion = torsion.max(e(bracket(X, UnitZ), [0.0; 3]));
        torsion = torsion.max(e(bracket(Y, UnitZ), [0.0; 3]));
        for i in FrameIndex::ALL {
            for j in FrameIndex::ALL {
                for k in FrameIndex::ALL {
                    let s = connection_table(lm, i, j)[k.idx()] + connection_table(lm, i, k)[j.idx()];
                    compat = compat.max(s.abs());
                }
            }
        }
    }
    out.push(Check::new(C, "frame (X, Y, Z/sqrt(lambda)) orthonormality", "orthonormal left-invariant frame", 0.0, ortho, 4.0 * f64::EPSILON, Comparison::Absolute));
    out.push(Check::new(C, "torsion of the connection", "Levi-Civita connection is torsion-free", 0.0, torsion, 0.0, Comparison::Exact));
    out.push(Check::new(C, "metric compatibility of the connection", "Levi-Civita connection is metric", 0.0, compat, 0.0, Comparison::Exact));
    out.push(Check::new(C, "sectional curvatures -3lambda/4 and lambda/4", "sectional curvature of coordinate planes", 0.0, sec, 0.0, Comparison::Exact));
    out.push(Check::new(C, "Killing identity by finite differences", "F1..F4 are Killing fields", 0.0, killing, 1e-6, Comparison::Absolute));

    let mut iso_err = 0.0_f64;
    for w in pts.windows(2) {
        let iso = Isometry::Composite(vec![Isometry::HorizontalRotation(w[1].x), Isometry::LeftTranslation(w[1])]);
        iso_err = iso_err.max(iso.inverse().apply(iso.apply(w[0])).max_abs_diff(&w[0]));
    }
    out.push(Check::new(C, "isometry inverse round trip", "left translations and rotations are invertible", 0.0, iso_err, 1e-12, Comparison::Absolute));
    out
}

fn endpoint_fits() -> Vec<Check> {
    let reference = "gamma ~ -(1+lambda(c+e)^2)/sqrt(lambda) log|e-y| at a slab endpoint e";
    let mut out = Vec::new();
    for (l, c) in [(1.0, 0.0), (1.0, 1.0)] {
        match grim(l, c).and_then(|p| grim_endpoint_fit(l, c, &p)) {
            Ok(f) => {
                for (side, e) in [("left", f.left), ("right", f.right)] {
                    out.push(Check::new(None, format!("grim {side} endpoint coefficient, lambda={l}, c={c}"), reference, e.predicted, e.fitted, 0.03, Comparison::Relative));
                }
                if c > 0.0 {
                    let rel = (f.right.fitted - f.left.fitted).abs() / f.right.fitted.abs();
                    out.push(Check::new(None, format!("grim endpoint asymmetry, lambda={l}, c={c}"), "endpoint coefficients differ for c > 0", 1e-3, rel, 0.0, Comparison::AtLeast));
                }
            }
            Err(e) => out.push(Check::failed(None, format!("grim endpoint fit, lambda={l}, c={c}"), reference, &e.to_string())),
        }
    }
    out
}

fn catenoid_structure() -> Vec<Check> {
    let mut out = Vec::new();
    for (l, f0) in [(1.0, 1.0), (4.0, 0.5), (9.0, 2.0)] {
        match solve_catenoid(l, f0, &CatenoidOptions::default()) {
            Ok(p) => {
                out.push(Check::flag(None, format!("catenoid profile embedded, lambda={l}, f0={f0}"), "translating catenoids are embedded", profile_is_embedded(&p)));
                let k0 = crate::families::rotational::apex_curvature(l, f0);
                out.push(Check::new(None, format!("catenoid neck is convex, lambda={l}, f0={f0}"), "f''(0) > 0 at the neck", 0.0, k0, 0.0, Comparison::Above));
            }
            Err(e) => out.push(Check::failed(None, format!("catenoid, lambda={l}, f0={f0}"), "catenoid", &e.to_string())),
        }
    }
    out
}
