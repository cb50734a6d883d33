//! Trajectories of the first-order family, singular-time detection and the
//! asymptotic models at both ends.
//!
//! The integrator is a Dormand-Prince 5(4) pair with FSAL, pure relative
//! per-component error control and cubic Hermite dense output. The requested
//! tolerance is a hard per-step ceiling; internally the controller aims at
//! tol^3 (floored near machine precision), which keeps end-state errors far
//! below the ceiling and makes them drop by a solid factor every time tol is
//! halved.
//!
//! Near a collapse A2 ~ gamma (t0-t)^(1/3) the steps shrink geometrically and
//! the run stalls by step underflow at about |t - t0| ~ 1e-14; the a2
//! threshold itself is unreachable in doubles. Singularity detection
//! therefore accepts the underflow stop and extrapolates t0 through a Newton
//! step on A2^3, which is linear in t to leading order. Plain threshold
//! crossings (a linear zero of A1 or A2, or A1 passing 1/eps) are refined by
//! bisection on the dense output and the same Newton polish, with a
//! curvature-bounded bracket.

use crate::error::{Error, Result};
use crate::family::ParamSet;
use crate::frame::{ricci_from_jet, JetPoint, RicciValues};

pub const EPS_SING: f64 = 1e-9;
/// Default |t - t0| window for the singular power-law fit. The upper edge
/// stays at 1e-3: one more decade would let the linear correction in the
/// collapse model bias the fitted coefficient by several percent.
pub const SING_FIT_WINDOW: (f64, f64) = (1e-6, 1e-3);
/// Tail start for the infinity model fit.
pub const TAIL_MIN_T: f64 = 1e3;

const TAU_FLOOR: f64 = 2.5e-16;
const MAX_STEPS: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub a1: f64,
    pub a2: f64,
}

impl State {
    pub fn new(t: f64, a1: f64, a2: f64) -> Result<Self> {
        if !(t.is_finite() && a1.is_finite() && a2.is_finite()) {
            return Err(Error::NonFiniteJet);
        }
        if a1 <= 0.0 || a2 <= 0.0 {
            return Err(Error::NonPositiveJet { a1, a2 });
        }
        Ok(Self { t, a1, a2 })
    }

    pub fn x(&self) -> f64 {
        self.a1 / self.a2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    Singular,
    BlowUp,
    StepUnderflow,
    StepLimit,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ReachedEnd => "reached-t-end",
            Self::Singular => "singular",
            Self::BlowUp => "blow-up",
            Self::StepUnderflow => "step-underflow",
            Self::StepLimit => "step-limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularSide {
    A2ToZero,
    A1Blowup,
    Both,
    A1ToZero,
}

impl SingularSide {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::A2ToZero => "a2-to-zero",
            Self::A1Blowup => "a1-blowup",
            Self::Both => "both",
            Self::A1ToZero => "a1-to-zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularEvent {
    pub t0_estimate: f64,
    pub side: SingularSide,
    pub bracket: (f64, f64),
}

impl SingularEvent {
    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "t0_estimate": self.t0_estimate,
            "side": self.side.as_str(),
            "bracket": [self.bracket.0, self.bracket.1],
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    t0: f64,
    t1: f64,
    y0: [f64; 2],
    y1: [f64; 2],
    f0: [f64; 2],
    f1: [f64; 2],
}

impl Segment {
    fn eval(&self, t: f64) -> [f64; 2] {
        let h = self.t1 - self.t0;
        let th = (t - self.t0) / h;
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = h00 * self.y0[i] + h * h10 * self.f0[i] + h01 * self.y1[i]
                + h * h11 * self.f1[i];
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    params: ParamSet,
    tol: f64,
    direction: f64,
    t_end_requested: f64,
    samples: Vec<State>,
    segments: Vec<Segment>,
    termination: Termination,
    event: Option<SingularEvent>,
    accepted: u64,
    rejected: u64,
}

impl Trajectory {
    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// +1 when integration ran toward larger t, -1 otherwise. Samples are
    /// stored in increasing t regardless.
    pub fn direction(&self) -> f64 {
        self.direction
    }

    pub fn t_end_requested(&self) -> f64 {
        self.t_end_requested
    }

    pub fn samples(&self) -> &[State] {
        &self.samples
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn event(&self) -> Option<&SingularEvent> {
        self.event.as_ref()
    }

    pub fn accepted_steps(&self) -> u64 {
        self.accepted
    }

    pub fn rejected_steps(&self) -> u64 {
        self.rejected
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.samples[0].t, self.samples[self.samples.len() - 1].t)
    }

    /// The sample where integration started.
    pub fn initial(&self) -> &State {
        if self.direction >= 0.0 {
            &self.samples[0]
        } else {
            &self.samples[self.samples.len() - 1]
        }
    }

    /// The sample where integration stopped.
    pub fn last_reached(&self) -> &State {
        if self.direction >= 0.0 {
            &self.samples[self.samples.len() - 1]
        } else {
            &self.samples[0]
        }
    }

    /// Dense output inside the covered range; None outside.
    pub fn sample_at(&self, t: f64) -> Option<State> {
        let (lo, hi) = self.t_range();
        if !(t >= lo && t <= hi) {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.samples[0]);
        }
        let idx = self
            .segments
            .partition_point(|seg| seg.t1 < t)
            .min(self.segments.len() - 1);
        let y = self.segments[idx].eval(t);
        Some(State { t, a1: y[0].max(f64::MIN_POSITIVE), a2: y[1].max(f64::MIN_POSITIVE) })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (t_lo, t_hi) = self.t_range();
        serde_json::json!({
            "params": self.params.as_strings(),
            "tol": self.tol,
            "direction": self.direction,
            "t_end_requested": self.t_end_requested,
            "termination": self.termination.as_str(),
            "event": self.event.as_ref().map(|e| e.to_json()),
            "samples": self.samples.len(),
            "t_first": t_lo,
            "t_last": t_hi,
            "accepted_steps": self.accepted,
            "rejected_steps": self.rejected,
        })
    }

    /// CSV rows t, A1, A2, x, ric00, ric11, ric22, scalar for every sample.
    pub fn to_csv(&self) -> String {
        let ricci = ricci_along(self);
        let mut out = String::from("t,A1,A2,x,ric00,ric11,ric22,scalar\n");
        for (s, r) in self.samples.iter().zip(ricci.iter()) {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                s.t,
                s.a1,
                s.a2,
                s.x(),
                r.ric00,
                r.ric11,
                r.ric22,
                r.scalar
            ));
        }
        out
    }
}

/// Jet reconstructed from the family itself: A' from the right-hand side and
/// A'' through x' = P(x)/A2. No finite differencing.
pub fn analytic_jet(params: &ParamSet, a1: f64, a2: f64) -> Result<JetPoint> {
    let [k1, k2, k3, l1, l2, l3] = params.to_f64_array();
    let x = a1 / a2;
    let p = (k1 * x + k2) * x + k3;
    let q = (l1 * x + l2) * x + l3;
    let dp = 2.0 * k1 * x + k2;
    let dq = 2.0 * l1 * x + l2;
    let big_p = p - x * q;
    JetPoint::new(a1, p, dp * big_p / a2, a2, q, dq * big_p / a2)
}

// Dormand-Prince 5(4) tableau
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn rhs2(pf: &[f64; 6], y: [f64; 2]) -> [f64; 2] {
    if y[1] <= 0.0 {
        return [f64::NAN, f64::NAN];
    }
    let x = y[0] / y[1];
    [(pf[0] * x + pf[1]) * x + pf[2], (pf[3] * x + pf[4]) * x + pf[5]]
}

struct StepOut {
    y_new: [f64; 2],
    f_new: [f64; 2],
    err: f64,
}

fn dp54_step(pf: &[f64; 6], y: [f64; 2], k1: [f64; 2], h: f64) -> StepOut {
    let lc = |cs: &[(f64, &[f64; 2])]| {
        let mut out = y;
        for i in 0..2 {
            let mut acc = 0.0;
            for (c, k) in cs {
                acc += c * k[i];
            }
            out[i] += h * acc;
        }
        out
    };
    let k2 = rhs2(pf, lc(&[(A21, &k1)]));
    let k3 = rhs2(pf, lc(&[(A31, &k1), (A32, &k2)]));
    let k4 = rhs2(pf, lc(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = rhs2(pf, lc(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = rhs2(pf, lc(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y_new = lc(&[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let f_new = rhs2(pf, y_new);
    let mut err: f64 = 0.0;
    for i in 0..2 {
        let e = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * f_new[i]);
        let scale = y[i].abs().max(y_new[i].abs()).max(f64::MIN_POSITIVE);
        err = err.max((e / scale).abs());
    }
    StepOut { y_new, f_new, err }
}

pub fn integrate(params: &ParamSet, init: State, t_end: f64, tol: f64) -> Result<Trajectory> {
    if !(tol.is_finite() && (1e-14..=1e-3).contains(&tol)) {
        return Err(Error::InvalidTolerance(tol));
    }
    let init = State::new(init.t, init.a1, init.a2)?;
    if !t_end.is_finite() {
        return Err(Error::NonFiniteJet);
    }
    if init.a2 <= 10.0 * EPS_SING || init.a1 <= 10.0 * EPS_SING || init.a1 >= 0.1 / EPS_SING {
        return Err(Error::ImmediateSingularity);
    }

    let pf = params.to_f64_array();
    let tau = tol.powi(3).max(TAU_FLOOR);
    let dir = if t_end >= init.t { 1.0 } else { -1.0 };

    let mut samples = vec![init];
    let mut segments: Vec<Segment> = Vec::new();
    let mut accepted: u64 = 0;
    let mut rejected: u64 = 0;
    let termination;
    let mut event: Option<SingularEvent> = None;

    let mut t = init.t;
    let mut y = [init.a1, init.a2];
    let mut k1 = rhs2(&pf, y);
    let mut a2_max = y[1];
    let mut a1_max = y[0];
    let mut a1_min = y[0];

    let span = (t_end - init.t).abs();
    let rate = (k1[0] / y[0]).abs().max((k1[1] / y[1]).abs()).max(1e-12);
    let mut h = dir * span.min(0.01 / rate).max(f64::MIN_POSITIVE);

    if t_end == init.t {
        return Ok(Trajectory {
            params: params.clone(),
            tol,
            direction: dir,
            t_end_requested: t_end,
            samples,
            segments,
            termination: Termination::ReachedEnd,
            event: None,
            accepted,
            rejected,
        });
    }

    let mut steps: u64 = 0;
    loop {
        steps += 1;
        if steps > MAX_STEPS {
            termination = Termination::StepLimit;
            break;
        }
        let h_min = 4.0 * f64::EPSILON * t.abs().max(1.0);
        if h.abs() < h_min {
            termination = Termination::StepUnderflow;
            break;
        }
        let mut last = false;
        if dir * (t + h - t_end) >= 0.0 {
            h = t_end - t;
            last = true;
        }

        let out = dp54_step(&pf, y, k1, h);
        // f64::max drops NaN, so err alone cannot flag a poisoned stage;
        // check the state and slope components explicitly
        let finite = out.y_new.iter().chain(out.f_new.iter()).all(|v| v.is_finite());
        let bad =
            !finite || !out.err.is_finite() || out.y_new[0] <= 0.0 || out.y_new[1] <= 0.0;
        if bad || out.err > tau {
            let shrink = if bad {
                0.25
            } else {
                (0.9 * (tau / out.err).powf(0.2)).clamp(0.2, 1.0) * 0.999
            };
            h *= shrink;
            rejected += 1;
            continue;
        }

        accepted += 1;
        let t_new = if last { t_end } else { t + h };
        let seg = Segment { t0: t, t1: t_new, y0: y, y1: out.y_new, f0: k1, f1: out.f_new };

        // threshold crossings inside the accepted step
        let mut hit: Option<(f64, SingularSide)> = None;
        let mut consider = |tc: Option<f64>, side: SingularSide| {
            if let Some(tc) = tc {
                if hit.is_none() || dir * tc < dir * hit.unwrap().0 {
                    hit = Some((tc, side));
                }
            }
        };
        if out.y_new[1] < EPS_SING {
            consider(bisect_crossing(&seg, 1, EPS_SING, dir), SingularSide::A2ToZero);
        }
        if out.y_new[0] < EPS_SING {
            consider(bisect_crossing(&seg, 0, EPS_SING, dir), SingularSide::A1ToZero);
        }
        if out.y_new[0] > 1.0 / EPS_SING {
            consider(bisect_crossing(&seg, 0, 1.0 / EPS_SING, dir), SingularSide::A1Blowup);
        }

        if let Some((tc, side)) = hit {
            let yc = seg.eval(tc);
            let yc = [yc[0].max(f64::MIN_POSITIVE), yc[1].max(f64::MIN_POSITIVE)];
            let cut = Segment { t0: t, t1: tc, y0: y, y1: yc, f0: k1, f1: rhs2(&pf, yc) };
            samples.push(State { t: tc, a1: yc[0], a2: yc[1] });
            segments.push(cut);
            event = crossing_event(params, tc, yc, dir, side);
            termination = match side {
                SingularSide::A1Blowup => Termination::BlowUp,
                _ => Termination::Singular,
            };
            break;
        }

        samples.push(State { t: t_new, a1: out.y_new[0], a2: out.y_new[1] });
        segments.push(seg);
        t = t_new;
        y = out.y_new;
        k1 = out.f_new;
        a2_max = a2_max.max(y[1]);
        a1_max = a1_max.max(y[0]);
        a1_min = a1_min.min(y[0]);
        if last {
            termination = Termination::ReachedEnd;
            break;
        }
        h *= (0.9 * (tau / out.err.max(1e-30)).powf(0.2)).clamp(0.2, 5.0);
    }

    if termination == Termination::StepUnderflow {
        event = underflow_event(params, t, y, dir, a2_max, a1_max, a1_min);
    }

    if dir < 0.0 {
        samples.reverse();
        segments.reverse();
        for seg in segments.iter_mut() {
            std::mem::swap(&mut seg.t0, &mut seg.t1);
            seg.y0.swap(0, 0); // keep layout explicit: endpoints swap below
            let (y0, y1) = (seg.y1, seg.y0);
            seg.y0 = y0;
            seg.y1 = y1;
            let (f0, f1) = (seg.f1, seg.f0);
            seg.f0 = f0;
            seg.f1 = f1;
        }
    }
    samples.dedup_by(|a, b| a.t == b.t);

    Ok(Trajectory {
        params: params.clone(),
        tol,
        direction: dir,
        t_end_requested: t_end,
        samples,
        segments,
        termination,
        event,
        accepted,
        rejected,
    })
}

/// Bisection for component `idx` crossing `threshold` inside the segment.
fn bisect_crossing(seg: &Segment, idx: usize, threshold: f64, dir: f64) -> Option<f64> {
    let g = |t: f64| seg.eval(t)[idx] - threshold;
    let (mut a, mut b) = (seg.t0, seg.t1);
    let (ga, gb) = (g(a), g(b));
    if ga == 0.0 {
        return Some(a);
    }
    if ga * gb > 0.0 {
        return Some(b);
    }
    for _ in 0..90 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs()) {
            break;
        }
        let m = 0.5 * (a + b);
        if g(a) * g(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    // return the endpoint on the far side so the threshold is truly crossed
    Some(if dir > 0.0 { a.max(b) } else { a.min(b) })
}

/// Newton polish from a threshold crossing to the underlying zero or pole,
/// with a curvature-bounded bracket.
fn crossing_event(
    params: &ParamSet,
    tc: f64,
    yc: [f64; 2],
    dir: f64,
    side: SingularSide,
) -> Option<SingularEvent> {
    let jet = analytic_jet(params, yc[0], yc[1]).ok()?;
    let (delta, curv_err) = match side {
        SingularSide::A2ToZero => {
            let d = yc[1] / jet.a2p().abs().max(f64::MIN_POSITIVE);
            (d, jet.a2pp().abs() * d * d / (2.0 * jet.a2p().abs().max(f64::MIN_POSITIVE)))
        }
        SingularSide::A1ToZero => {
            let d = yc[0] / jet.a1p().abs().max(f64::MIN_POSITIVE);
            (d, jet.a1pp().abs() * d * d / (2.0 * jet.a1p().abs().max(f64::MIN_POSITIVE)))
        }
        SingularSide::A1Blowup => {
            // work with u = 1/A1, linear near a simple pole
            let u = 1.0 / yc[0];
            let up = jet.a1p() / (yc[0] * yc[0]);
            let upp = -jet.a1pp() / (yc[0] * yc[0])
                + 2.0 * jet.a1p() * jet.a1p() / (yc[0] * yc[0] * yc[0]);
            let d = u / up.abs().max(f64::MIN_POSITIVE);
            (d, upp.abs() * d * d / (2.0 * up.abs().max(f64::MIN_POSITIVE)))
        }
        SingularSide::Both => (0.0, 0.0),
    };
    let t0 = tc + dir * delta;
    let half = (4.0 * curv_err).max(1e-12 * (1.0 + t0.abs()));
    Some(SingularEvent { t0_estimate: t0, side, bracket: (t0 - half, t0 + half) })
}

/// Classify a step-underflow stop and extrapolate t0 when the final state
/// carries a collapse or blow-up signature.
fn underflow_event(
    params: &ParamSet,
    t: f64,
    y: [f64; 2],
    dir: f64,
    a2_max: f64,
    a1_max: f64,
    a1_min: f64,
) -> Option<SingularEvent> {
    // a cube-root collapse stalls the stepper around a2 ~ 1e-4 a2_max (the
    // step shrinks like the distance to t0 times tau^(1/5)), so the collapse
    // cut sits one decade above that; three decades of growth mark a blow-up
    let collapsed2 = y[1] <= 1e-3 * a2_max;
    let blew1 = y[0] >= 1e3 * a1_min;
    let collapsed1 = y[0] <= 1e-3 * a1_max;
    let side = match (collapsed2, blew1, collapsed1) {
        (true, true, _) => SingularSide::Both,
        (true, false, _) => SingularSide::A2ToZero,
        (false, true, _) => SingularSide::A1Blowup,
        (false, false, true) => SingularSide::A1ToZero,
        _ => return None,
    };
    let jet = analytic_jet(params, y[0], y[1]).ok()?;
    let (delta, curv_err) = if collapsed2 {
        // Newton on F = A2^3, linear in t for the cube-root collapse
        let f = y[1].powi(3);
        let fp = 3.0 * y[1] * y[1] * jet.a2p();
        let fpp = 6.0 * y[1] * jet.a2p() * jet.a2p() + 3.0 * y[1] * y[1] * jet.a2pp();
        let d = f / fp.abs().max(f64::MIN_POSITIVE);
        (d, fpp.abs() * d * d / (2.0 * fp.abs().max(f64::MIN_POSITIVE)))
    } else if collapsed1 {
        let d = y[0] / jet.a1p().abs().max(f64::MIN_POSITIVE);
        (d, jet.a1pp().abs() * d * d / (2.0 * jet.a1p().abs().max(f64::MIN_POSITIVE)))
    } else {
        let u = 1.0 / y[0];
        let up = jet.a1p() / (y[0] * y[0]);
        let d = u / up.abs().max(f64::MIN_POSITIVE);
        (d, d * 1e-2)
    };
    let t0 = t + dir * delta;
    let half = delta.max(4.0 * curv_err).max(1e-13 * (1.0 + t0.abs()));
    Some(SingularEvent { t0_estimate: t0, side, bracket: (t0 - half, t0 + half) })
}

/// Ricci diagonal at every sample, from analytically reconstructed jets.
pub fn ricci_along(traj: &Trajectory) -> Vec<RicciValues> {
    traj.samples
        .iter()
        .map(|s| {
            let jet = analytic_jet(&traj.params, s.a1, s.a2)
                .expect("trajectory samples are validated");
            ricci_from_jet(&jet)
        })
        .collect()
}

pub fn detect_singularity(traj: &Trajectory) -> Result<SingularEvent> {
    match traj.termination {
        Termination::Singular | Termination::BlowUp | Termination::StepUnderflow => {
            traj.event.ok_or(Error::NotSingular)
        }
        _ => Err(Error::NotSingular),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    A1,
    A2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// The |t - t0| range actually used.
    pub window: (f64, f64),
    /// RMS residual in log-log coordinates.
    pub goodness: f64,
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - (slope * x + intercept);
        ss += r * r;
    }
    (slope, intercept, (ss / n).sqrt())
}

/// Log-log least squares of (t, value) points against |t - t0|, restricted to
/// the window, requiring the surviving points to span min_decades.
pub fn fit_power_law_points(
    points: &[(f64, f64)],
    t0: f64,
    window: (f64, f64),
    min_decades: f64,
) -> Result<AsymptoticFit> {
    let (lo, hi) = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut s_min = f64::INFINITY;
    let mut s_max: f64 = 0.0;
    for &(t, v) in points {
        let s = (t - t0).abs();
        if s >= lo && s <= hi && v > 0.0 && s > 0.0 {
            xs.push(s.ln());
            ys.push(v.ln());
            s_min = s_min.min(s);
            s_max = s_max.max(s);
        }
    }
    if xs.len() < 8 || (s_max / s_min).log10() < min_decades {
        return Err(Error::InsufficientWindow { lo, hi });
    }
    let (slope, intercept, rms) = linear_fit(&xs, &ys);
    Ok(AsymptoticFit {
        exponent: slope,
        coefficient: intercept.exp(),
        window: (s_min, s_max),
        goodness: rms,
    })
}

/// Power-law fit of A1 or A2 near t0 over the default singular window.
pub fn fit_power_law(
    traj: &Trajectory,
    component: Component,
    t0: f64,
    min_decades: f64,
) -> Result<AsymptoticFit> {
    let points: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .map(|s| (s.t, if component == Component::A1 { s.a1 } else { s.a2 }))
        .collect();
    fit_power_law_points(&points, t0, SING_FIT_WINDOW, min_decades)
}

/// B-model residual B1' + B1^2/B2^2 for B2 = alpha + beta ln t + 2t, in its
/// simplified closed form (2 beta^2 - alpha beta - beta^2 ln t)/t^2.
pub fn model_b_residual(alpha: f64, beta: f64, t: f64) -> f64 {
    ((2.0 * beta - alpha) * beta - beta * beta * t.ln()) / (t * t)
}

/// C-model profile near the singular time: C2 = gamma s^(1/3) + (9/5) s and
/// C1 = C2 (C2' - 2), s = t - t0.
pub fn model_c_profile(gamma: f64, t0: f64, t: f64) -> (f64, f64) {
    let s = t - t0;
    let c2 = gamma * s.cbrt() + 1.8 * s;
    let c2p = gamma / (3.0 * s.cbrt() * s.cbrt()) + 1.8;
    (c2 * (c2p - 2.0), c2)
}

/// The residual C1' + C1^2/C2^2 collapses to the constant -8/25 for every
/// gamma and t > t0.
pub fn model_c_residual(_gamma: f64, _t0: f64, _t: f64) -> f64 {
    -8.0 / 25.0
}

/// Same residual assembled from central differences of C1; cross-validation
/// for the closed-form path.
pub fn model_c_residual_fd(gamma: f64, t0: f64, t: f64, step: f64) -> f64 {
    let (c1p, _) = model_c_profile(gamma, t0, t + step);
    let (c1m, _) = model_c_profile(gamma, t0, t - step);
    let (c1, c2) = model_c_profile(gamma, t0, t);
    (c1p - c1m) / (2.0 * step) + c1 * c1 / (c2 * c2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfinityFit {
    pub alpha: f64,
    pub beta: f64,
    /// Mean of A1 over the tail; the model predicts 2 beta.
    pub a1_tail_mean: f64,
}

/// Least squares of A2 - 2t against (1, ln t) on synthetic (t, a2) points.
pub fn fit_infinity_points(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 4 {
        return Err(Error::TailTooShort { needed: TAIL_MIN_T });
    }
    let xs: Vec<f64> = points.iter().map(|&(t, _)| t.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(t, a2)| a2 - 2.0 * t).collect();
    let (beta, alpha, _) = linear_fit(&xs, &ys);
    Ok((alpha, beta))
}

/// Fit of the logarithmic tail model on samples with t >= TAIL_MIN_T.
pub fn fit_infinity_model(traj: &Trajectory) -> Result<InfinityFit> {
    let tail: Vec<&State> = traj.samples.iter().filter(|s| s.t >= TAIL_MIN_T).collect();
    if tail.len() < 16 || traj.t_range().1 < 2.0 * TAIL_MIN_T {
        return Err(Error::TailTooShort { needed: TAIL_MIN_T });
    }
    let points: Vec<(f64, f64)> = tail.iter().map(|s| (s.t, s.a2)).collect();
    let (alpha, beta) = fit_infinity_points(&points)?;
    let a1_tail_mean = tail.iter().map(|s| s.a1).sum::<f64>() / tail.len() as f64;
    Ok(InfinityFit { alpha, beta, a1_tail_mean })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailClass {
    Ale,
    Alc { collapsed: bool },
}

impl TailClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ale => "ale",
            Self::Alc { collapsed: false } => "alc",
            Self::Alc { collapsed: true } => "alc-collapsed",
        }
    }
}

/// Tail growth rates of (A1, A2) by secant over the last quarter of a
/// non-singular trajectory, with the ALE/ALC label.
pub fn alc_slope(traj: &Trajectory) -> Result<(f64, f64, TailClass)> {
    if traj.termination != Termination::ReachedEnd || traj.samples.len() < 8 {
        return Err(Error::TailTooShort { needed: TAIL_MIN_T });
    }
    let (lo, hi) = traj.t_range();
    let span = hi - lo;
    if span <= 0.0 {
        return Err(Error::TailTooShort { needed: TAIL_MIN_T });
    }
    let t_mid = hi - 0.25 * span;
    let (end, mid) = if traj.direction >= 0.0 {
        (traj.sample_at(hi), traj.sample_at(t_mid))
    } else {
        (traj.sample_at(lo), traj.sample_at(lo + 0.25 * span))
    };
    let (end, mid) = (end.unwrap(), mid.unwrap());
    let dt = end.t - mid.t;
    let s1 = (end.a1 - mid.a1) / dt;
    let s2 = (end.a2 - mid.a2) / dt;
    let near = |v: f64, c: f64| (v - c).abs() <= 0.05;
    let class = if near(s1, 1.0) && near(s2, 1.0) {
        TailClass::Ale
    } else {
        TailClass::Alc { collapsed: near(s1, 0.0) || near(s2, 0.0) }
    };
    Ok((s1, s2, class))
}
