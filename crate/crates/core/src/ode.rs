//! Dormand–Prince 5(4) integrator with dense output, event location and
//! blow-up detection.

use serde::Serialize;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FACC1: f64 = 5.0;
const FACC2: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step size; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: Option<f64>,
    pub max_steps: usize,
    /// Sup-norm threshold that ends the integration with [`Termination::BlowUp`].
    pub blowup: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: None,
            max_steps: 500_000,
            blowup: 1e10,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        OdeOptions { rtol, atol, ..Default::default() }
    }
}

pub struct OdeProblem<F> {
    pub rhs: F,
    pub y0: Vec<f64>,
    pub t0: f64,
    pub t1: f64,
    pub options: OdeOptions,
}

impl<F> OdeProblem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(rhs: F, y0: Vec<f64>, t0: f64, t1: f64) -> Self {
        OdeProblem { rhs, y0, t0, t1, options: OdeOptions::default() }
    }

    pub fn with_options(mut self, options: OdeOptions) -> Self {
        self.options = options;
        self
    }

    pub fn dimension(&self) -> usize {
        self.y0.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Rising,
    Falling,
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Action {
    Record,
    Terminate,
}

type EventFn<'a> = Box<dyn Fn(f64, &[f64]) -> f64 + 'a>;

pub struct Event<'a> {
    pub id: String,
    pub func: EventFn<'a>,
    pub direction: Direction,
    pub action: Action,
}

impl<'a> Event<'a> {
    pub fn new(
        id: impl Into<String>,
        func: impl Fn(f64, &[f64]) -> f64 + 'a,
        direction: Direction,
        action: Action,
    ) -> Self {
        Event { id: id.into(), func: Box::new(func), direction, action }
    }

    fn triggers(&self, g0: f64, g1: f64) -> bool {
        if g0 == 0.0 {
            return false;
        }
        match self.direction {
            Direction::Rising => g0 < 0.0 && g1 >= 0.0,
            Direction::Falling => g0 > 0.0 && g1 <= 0.0,
            Direction::Any => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventHit {
    pub id: String,
    pub t: f64,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Termination {
    SpanEnd,
    Event(String),
    BlowUp,
    StepUnderflow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

/// Continuous extension of one accepted step.
#[derive(Clone, Debug, PartialEq)]
struct DenseStep {
    t: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseStep {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.t) / self.h;
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<EventHit>,
    pub termination: Termination,
    dense: Vec<DenseStep>,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    pub fn covers(&self, t: f64) -> bool {
        let (a, b) = (self.t_start(), self.t_end());
        t >= a.min(b) && t <= a.max(b)
    }

    /// Dense-output value at `t`, or `None` outside the integrated range.
    pub fn interpolate(&self, t: f64) -> Option<Vec<f64>> {
        if !self.covers(t) {
            return None;
        }
        let n = self.samples[0].y.len();
        if self.dense.is_empty() {
            return Some(self.samples[0].y.clone());
        }
        let forward = self.t_end() >= self.t_start();
        // index of the first step whose end lies beyond t
        let idx = self.dense.partition_point(|d| {
            let end = d.t + d.h;
            if forward {
                end < t
            } else {
                end > t
            }
        });
        let step = &self.dense[idx.min(self.dense.len() - 1)];
        let mut out = vec![0.0; n];
        step.eval(t, &mut out);
        Some(out)
    }

    pub fn events_with_id<'s>(&'s self, id: &'s str) -> impl Iterator<Item = &'s EventHit> + 's {
        self.events.iter().filter(move |e| e.id == id)
    }

    pub fn accepted_steps(&self) -> usize {
        self.dense.len()
    }
}

fn sup_norm(y: &[f64]) -> f64 {
    y.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

fn all_finite(y: &[f64]) -> bool {
    y.iter().all(|v| v.is_finite())
}

fn initial_step<F>(rhs: &F, t0: f64, y0: &[f64], f0: &[f64], dir: f64, opts: &OdeOptions, h_max: f64) -> f64
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..n {
        let sk = opts.atol + opts.rtol * y0[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y0[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
    h = h.min(h_max);
    let y1: Vec<f64> = (0..n).map(|i| y0[i] + dir * h * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    rhs(t0 + dir * h, &y1, &mut f1);
    let mut der2 = 0.0;
    for i in 0..n {
        let sk = opts.atol + opts.rtol * y0[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.abs().max(dnf.sqrt());
    let h1 = if !der12.is_finite() {
        h * 1e-3
    } else if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(h_max)
}

/// Root of an event function inside one dense step, by the Illinois variant of
/// regula falsi with a bisection fallback, to `1e-12` in `t`.
fn locate_root(step: &DenseStep, func: &dyn Fn(f64, &[f64]) -> f64, mut ta: f64, mut ga: f64, mut tb: f64, mut gb: f64, buf: &mut [f64]) -> f64 {
    if gb == 0.0 {
        return tb;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if (tb - ta).abs() <= 1e-12 {
            break;
        }
        let mut tm = (ta * gb - tb * ga) / (gb - ga);
        let lo = ta.min(tb);
        let hi = ta.max(tb);
        if !(tm > lo && tm < hi) {
            tm = 0.5 * (ta + tb);
        }
        step.eval(tm, buf);
        let gm = func(tm, buf);
        if gm == 0.0 {
            return tm;
        }
        if (gm > 0.0) == (gb > 0.0) {
            tb = tm;
            gb = gm;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        } else {
            ta = tm;
            ga = gm;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        }
    }
    // last bracket endpoint on the far side of the root
    if ga.abs() < gb.abs() {
        ta
    } else {
        tb
    }
}

/// Integrates `problem` with the given events.
pub fn integrate<F>(problem: &OdeProblem<F>, events: &[Event<'_>]) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let opts = &problem.options;
    let rhs = &problem.rhs;
    let (t0, t1) = (problem.t0, problem.t1);
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    if t0 == t1 || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidParameter(format!("empty or non-finite span [{t0}, {t1}]")));
    }
    let n = problem.dimension();
    let span = (t1 - t0).abs();
    let dir = (t1 - t0).signum();
    let h_max = opts.h_max.unwrap_or(span).min(span);
    let h_min = 1e-14 * span;

    let mut y = problem.y0.clone();
    let mut k1 = vec![0.0; n];
    rhs(t0, &y, &mut k1);
    if !all_finite(&k1) || !all_finite(&y) {
        return Err(Error::NonFiniteRhs(t0));
    }

    let mut h = match opts.h_init {
        Some(h) => h.abs().min(h_max),
        None => initial_step(rhs, t0, &y, &k1, dir, opts, h_max),
    };

    let mut samples = vec![Sample { t: t0, y: y.clone(), dy: k1.clone() }];
    let mut dense: Vec<DenseStep> = Vec::new();
    let mut hits = Vec::new();
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.func)(t0, &y)).collect();

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ys = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut buf = vec![0.0; n];

    let mut t = t0;
    let mut facold = 1e-4_f64;
    let mut reject = false;
    let mut steps = 0usize;

    loop {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        if h < h_min {
            return Ok(Trajectory { samples, events: hits, termination: Termination::StepUnderflow, dense });
        }
        let mut last = false;
        if (t + dir * h - t1) * dir >= 0.0 {
            h = (t1 - t).abs();
            last = true;
        }
        let hs = dir * h;
        steps += 1;

        for i in 0..n {
            ys[i] = y[i] + hs * A21 * k1[i];
        }
        rhs(t + C2 * hs, &ys, &mut k2);
        for i in 0..n {
            ys[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * hs, &ys, &mut k3);
        for i in 0..n {
            ys[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * hs, &ys, &mut k4);
        for i in 0..n {
            ys[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * hs, &ys, &mut k5);
        for i in 0..n {
            ys[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + hs, &ys, &mut k6);
        for i in 0..n {
            ynew[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let tnew = if last { t1 } else { t + hs };
        rhs(tnew, &ynew, &mut k7);

        let mut err = 0.0;
        for i in 0..n {
            let sk = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err += (e / sk).powi(2);
        }
        let err = (err / n as f64).sqrt();

        if !err.is_finite() || !all_finite(&ynew) || !all_finite(&k7) {
            h *= 0.1;
            reject = true;
            continue;
        }

        let fac11 = err.powf(EXPO1);
        let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(FACC2, FACC1);
        let mut hnew = h / fac;

        if err > 1.0 {
            h /= (fac11 / SAFE).min(FACC1);
            reject = true;
            continue;
        }

        facold = err.max(1e-4);
        let mut rcont5 = vec![0.0; n];
        let mut rcont3 = vec![0.0; n];
        let mut rcont4 = vec![0.0; n];
        let mut ydiff = vec![0.0; n];
        for i in 0..n {
            ydiff[i] = ynew[i] - y[i];
            let bspl = hs * k1[i] - ydiff[i];
            rcont3[i] = bspl;
            rcont4[i] = ydiff[i] - hs * k7[i] - bspl;
            rcont5[i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let step = DenseStep { t, h: hs, rcont: [y.clone(), ydiff, rcont3, rcont4, rcont5] };

        // events, earliest terminating one wins
        let mut stop: Option<(f64, String)> = None;
        let mut g_new = Vec::with_capacity(events.len());
        let mut step_hits = Vec::new();
        for (e, gp) in events.iter().zip(g_prev.iter()) {
            let gn = (e.func)(tnew, &ynew);
            g_new.push(gn);
            if e.triggers(*gp, gn) {
                let te = locate_root(&step, e.func.as_ref(), t, *gp, tnew, gn, &mut buf);
                let mut ye = vec![0.0; n];
                step.eval(te, &mut ye);
                step_hits.push(EventHit { id: e.id.clone(), t: te, y: ye });
                if e.action == Action::Terminate {
                    let earlier = match &stop {
                        Some((ts, _)) => (te - ts) * dir < 0.0,
                        None => true,
                    };
                    if earlier {
                        stop = Some((te, e.id.clone()));
                    }
                }
            }
        }
        step_hits.sort_by(|a, b| ((a.t - b.t) * dir).partial_cmp(&0.0).unwrap());

        // blow-up: locate the threshold crossing on the dense output
        let blow = sup_norm(&ynew) > opts.blowup;
        let t_blow = if blow {
            let g = |_t: f64, yy: &[f64]| sup_norm(yy) - opts.blowup;
            let ga = sup_norm(&y) - opts.blowup;
            let gb = sup_norm(&ynew) - opts.blowup;
            if ga < 0.0 {
                Some(locate_root(&step, &g, t, ga, tnew, gb, &mut buf))
            } else {
                Some(t)
            }
        } else {
            None
        };

        let cut = match (&stop, t_blow) {
            (Some((te, _)), Some(tb)) if (tb - te) * dir < 0.0 => Some((tb, Termination::BlowUp)),
            (Some((te, id)), _) => Some((*te, Termination::Event(id.clone()))),
            (None, Some(tb)) => Some((tb, Termination::BlowUp)),
            (None, None) => None,
        };

        if let Some((tc, term)) = cut {
            for hit in step_hits {
                if (hit.t - tc) * dir <= 0.0 {
                    hits.push(hit);
                }
            }
            if (tc - t) * dir > 0.0 {
                let mut yc = vec![0.0; n];
                step.eval(tc, &mut yc);
                let mut dyc = vec![0.0; n];
                rhs(tc, &yc, &mut dyc);
                let mut trimmed = step;
                trimmed.h = tnew - t;
                dense.push(trimmed);
                samples.push(Sample { t: tc, y: yc, dy: dyc });
            }
            return Ok(Trajectory { samples, events: hits, termination: term, dense });
        }

        hits.extend(step_hits);
        dense.push(step);
        g_prev = g_new;
        y.copy_from_slice(&ynew);
        k1.copy_from_slice(&k7);
        t = tnew;
        samples.push(Sample { t, y: y.clone(), dy: k1.clone() });

        if last {
            return Ok(Trajectory { samples, events: hits, termination: Termination::SpanEnd, dense });
        }
        if hnew.abs() > h_max {
            hnew = h_max;
        }
        if reject {
            hnew = hnew.min(h);
            reject = false;
        }
        h = hnew;
    }
}

/// Singular initial points handled by a Taylor start.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SeriesKind {
    /// Rotational graph regular at the axis: `φ'/r → 1/(2√λ)`.
    BowlOrigin { lambda: f64 },
    /// Catenoid profile `f` at its neck `f(0) = f0`, `f'(0) = 0`.
    CatenoidApex { lambda: f64, f0: f64 },
}

pub const DEFAULT_SERIES_OFFSET: f64 = 1e-4;

/// Second-order Taylor data at offset `delta` from the singular point.
pub fn series_start(kind: SeriesKind, delta: f64) -> Result<(f64, Vec<f64>)> {
    if !(delta > 0.0 && delta <= 1e-3) {
        return Err(Error::InvalidParameter(format!("series offset must lie in (0, 1e-3], got {delta}")));
    }
    match kind {
        SeriesKind::BowlOrigin { lambda } => {
            if !(lambda > 0.0) {
                return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
            }
            let sl = lambda.sqrt();
            Ok((delta, vec![delta * delta / (4.0 * sl), delta / (2.0 * sl)]))
        }
        SeriesKind::CatenoidApex { lambda, f0 } => {
            if !(f0 > 0.0) {
                return Err(Error::InvalidParameter(format!("neck radius f0 must be positive, got {f0}")));
            }
            if !(lambda > 0.0) {
                return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
            }
            let f2 = catenoid_apex_curvature(lambda, f0);
            Ok((delta, vec![f0 + 0.5 * f2 * delta * delta, f2 * delta]))
        }
    }
}

/// `f''(0) = 4λ / (f0 (4 + λ f0²))`.
pub fn catenoid_apex_curvature(lambda: f64, f0: f64) -> f64 {
    4.0 * lambda / (f0 * (4.0 + lambda * f0 * f0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_problem(rtol: f64, atol: f64) -> OdeProblem<impl Fn(f64, &[f64], &mut [f64])> {
        OdeProblem::new(|_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0], vec![1.0], 0.0, 1.0)
            .with_options(OdeOptions::with_tolerances(rtol, atol))
    }

    #[test]
    fn exponential() {
        let traj = integrate(&exp_problem(1e-10, 1e-12), &[]).unwrap();
        assert_eq!(traj.termination, Termination::SpanEnd);
        assert_eq!(traj.t_end(), 1.0);
        assert!((traj.last().y[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn tighter_tolerance_reduces_error() {
        let err = |tol: f64| {
            let traj = integrate(&exp_problem(tol, tol), &[]).unwrap();
            (traj.last().y[0] - std::f64::consts::E).abs()
        };
        for tol in [1e-8, 1e-9, 1e-10, 1e-11] {
            let (e1, e2, e4) = (err(tol), err(tol / 2.0), err(tol / 4.0));
            // global error is proportional to the tolerance, so halving gives a ratio close to 2
            assert!(e1 >= 1.9 * e2, "tol {tol}: {e1:e} vs {e2:e}");
            assert!(e1 >= 2.0 * e4, "tol {tol}: {e1:e} vs {e4:e}");
        }
    }

    #[test]
    fn backward_integration() {
        let p = OdeProblem::new(|_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0], vec![1.0], 0.0, -2.0);
        let traj = integrate(&p, &[]).unwrap();
        assert!((traj.last().y[0] - (-2.0f64).exp()).abs() < 1e-10);
        let mid = traj.interpolate(-1.3).unwrap();
        assert!((mid[0] - (-1.3f64).exp()).abs() < 1e-9);
        assert!(traj.interpolate(0.5).is_none());
    }

    #[test]
    fn radial_linear_oracle() {
        // y' = −(b/x)(y − a) + c/x², solution a + d/x^b + c/((b−1)x)
        let (a, b, c) = (2.0, 3.0, 1.0);
        let p = OdeProblem::new(
            move |x: f64, y: &[f64], dy: &mut [f64]| dy[0] = -b / x * (y[0] - a) + c / (x * x),
            vec![5.0],
            1.0,
            10.0,
        );
        let traj = integrate(&p, &[]).unwrap();
        let d = 5.0 - a - c / (b - 1.0);
        let exact = a + d / 10f64.powf(b) + c / ((b - 1.0) * 10.0);
        assert!((traj.last().y[0] - exact).abs() < 1e-8);
    }

    #[test]
    fn dense_output_accuracy() {
        // harmonic oscillator, check interpolation at step midpoints
        let p = OdeProblem::new(
            |_t: f64, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            vec![0.0, 1.0],
            0.0,
            10.0,
        )
        .with_options(OdeOptions::with_tolerances(1e-8, 1e-10));
        let traj = integrate(&p, &[]).unwrap();
        let mut worst: f64 = 0.0;
        for w in traj.samples.windows(2) {
            let tm = 0.5 * (w[0].t + w[1].t);
            let y = traj.interpolate(tm).unwrap();
            worst = worst.max((y[0] - tm.sin()).abs()).max((y[1] - tm.cos()).abs());
        }
        assert!(worst < 10.0 * 1e-8 * 10.0, "{worst:e}");
    }

    #[test]
    fn events_record_and_terminate() {
        let p = OdeProblem::new(
            |_t: f64, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            vec![0.0, 1.0],
            0.0,
            20.0,
        );
        let zeros = Event::new("zero", |_t, y: &[f64]| y[0], Direction::Any, Action::Record);
        let down = Event::new("down", |_t, y: &[f64]| y[0], Direction::Falling, Action::Record);
        let stop = Event::new("stop", |t, _y: &[f64]| t - 10.0, Direction::Rising, Action::Terminate);
        let traj = integrate(&p, &[zeros, down, stop]).unwrap();
        assert_eq!(traj.termination, Termination::Event("stop".into()));
        assert!((traj.t_end() - 10.0).abs() < 1e-12);
        let z: Vec<f64> = traj.events_with_id("zero").map(|e| e.t).collect();
        assert_eq!(z.len(), 3);
        for (k, t) in z.iter().enumerate() {
            assert!((t - (k + 1) as f64 * std::f64::consts::PI).abs() < 1e-9);
        }
        for e in &traj.events {
            if e.id != "stop" {
                assert!(e.y[0].abs() < 1e-10);
            }
        }
        assert_eq!(traj.events_with_id("down").count(), 2);
    }

    #[test]
    fn event_location_independent_of_initial_step() {
        let run = |h0: f64| {
            let mut opts = OdeOptions::default();
            opts.h_init = Some(h0);
            let p = OdeProblem::new(
                |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = t.cos() * y[0] + 1.0,
                vec![-1.0],
                0.0,
                5.0,
            )
            .with_options(opts);
            let ev = Event::new("cross", |_t, y: &[f64]| y[0], Direction::Any, Action::Record);
            integrate(&p, &[ev]).unwrap().events[0].t
        };
        assert!((run(1e-3) - run(0.2)).abs() < 1e-10);
    }

    #[test]
    fn blow_up_detection() {
        // y' = y², y(0) = 1 blows up at t = 1
        let p = OdeProblem::new(|_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0], vec![1.0], 0.0, 2.0);
        let traj = integrate(&p, &[]).unwrap();
        assert_eq!(traj.termination, Termination::BlowUp);
        assert!((traj.t_end() - 1.0).abs() < 1e-8);
        assert!(traj.t_end() < 1.0);
    }

    #[test]
    fn non_finite_start() {
        let p = OdeProblem::new(|t: f64, _y: &[f64], dy: &mut [f64]| dy[0] = 1.0 / t, vec![1.0], 0.0, 1.0);
        assert!(matches!(integrate(&p, &[]), Err(Error::NonFiniteRhs(_))));
    }

    #[test]
    fn series_starts() {
        let (_, s) = series_start(SeriesKind::BowlOrigin { lambda: 1.0 }, 1e-4).unwrap();
        assert!((s[1] / 1e-4 - 0.5).abs() < 1e-15);
        assert!((catenoid_apex_curvature(1.0, 1.0) - 0.8).abs() < 1e-15);
        let (_, s) = series_start(SeriesKind::CatenoidApex { lambda: 1.0, f0: 1.0 }, 1e-3).unwrap();
        assert!((s[1] - 0.8e-3).abs() < 1e-15);
        assert!(series_start(SeriesKind::CatenoidApex { lambda: 1.0, f0: 0.0 }, 1e-4).is_err());
        assert!(series_start(SeriesKind::BowlOrigin { lambda: 1.0 }, 0.1).is_err());
    }
}
