//! One orbit of the shooting family: launch near the origin, integrate, and
//! classify where it goes.
//!
//! The orbit is followed first in the chart `(y, z)` with time `s = ln xi`
//! (the coordinate `w` is a function of `s` and `z` there), then, once
//! `X <= 1`, in `(X, Y, Z, s)` with the time `sigma`, `d/dsigma =
//! (d/deta) / (1 + X)`.
//!
//! Classification uses two regions that orbits cannot leave:
//!
//! * `Y > -1/4`, `XZ < 1/16`: `Y` stays in `(-1/4, 0)` and `X, Z -> 0`, so
//!   the profile stays positive (the orbit enters `P0`);
//! * `Y < -1/2`, `N X < |Y| - 1/2`: `Y` decreases to `-inf` in finite time,
//!   so the profile vanishes with `(f^m)' < 0` (the orbit enters `Q3`).

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::ode::{integrate, Controls, End, Flow, OdeSystem, Step};
use crate::params::Params;
use crate::profile::{SelfSimilarProfile, SupportEdge};

use super::launch::{chart_w, refined_launch, Launch, LaunchSeries};

/// Values of `f` treated as zero by [`ssode_rhs`].
pub const F_FLOOR: f64 = 1e-12;

/// First-order form of the profile equation in `(f, g = (f^m)')`:
///
/// ```text
///     f' = g / (m f^{m-1}),
///     g' = -(N-1)/xi g - xi f'/2 - xi^{-2} f^p.
/// ```
pub fn ssode_rhs(params: &Params, xi: f64, state: &[f64; 2]) -> Result<[f64; 2]> {
    let (m, p, n) = (params.m(), params.p(), params.nf());
    let [f, g] = *state;
    if !(f > F_FLOOR) {
        return Err(Error::Degenerate { f });
    }
    if !(xi > 0.0) {
        return Err(Error::Domain("xi must be positive"));
    }
    let fp = g / (m * f.powf(m - 1.0));
    let gp = -(n - 1.0) / xi * g - 0.5 * xi * fp - params.k_hardy() * f.powf(p) / (xi * xi);
    Ok([fp, gp])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotControls {
    /// Nominal launch point; the launch moves closer to the origin when the
    /// origin series is not accurate enough there.
    pub xi_start: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Budget in the time `sigma` of the second stage.
    pub sigma_max: f64,
    pub max_steps: usize,
    /// Closest approach to `P1`, measured in `(X, Y)`, below which an orbit
    /// counts as having an interface.
    pub interface_tol: f64,
    /// Orbits bound for `Q3` are followed until `X <= crossing_resolution
    /// |Y|`, which fixes the relative accuracy of the crossing point.
    pub crossing_resolution: f64,
}

impl Default for ShotControls {
    fn default() -> Self {
        Self {
            xi_start: 1e-6,
            rtol: 1e-11,
            atol: 1e-14,
            sigma_max: 1e4,
            max_steps: 1_000_000,
            interface_tol: 1e-2,
            crossing_resolution: 1e-6,
        }
    }
}

impl ShotControls {
    fn ode(&self) -> Controls {
        Controls { max_steps: self.max_steps, ..Controls::with_tolerances(self.rtol, self.atol) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    /// The profile stays positive (orbit enters `P0`).
    PositiveLimit,
    /// The profile vanishes with nonzero slope of `f^m` (orbit enters `Q3`).
    ZeroCrossing,
    /// The orbit passes within `interface_tol` of `P1`.
    Interface,
    Inconclusive,
}

/// Which invariant region the orbit ended in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Zero,
    Undecided,
}

/// Point of the orbit closest to `P1` in the `(X, Y)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approach {
    pub distance: f64,
    pub sigma: f64,
    pub xi: f64,
    /// Interface position predicted from the local behavior at `P1`,
    /// `xi0^2 = xi^2 (1 + 4X/(m-1))`.
    pub xi0: f64,
    pub state: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotOutcome {
    pub kind: OutcomeKind,
    pub side: Side,
    pub xi_end: f64,
    pub f_end: f64,
    /// `(f^m)'` at `xi_end`.
    pub slope_fm_end: f64,
    pub approach: Option<Approach>,
    pub launch: Launch,
}

struct ChartFlow<'a> {
    params: &'a Params,
}

impl OdeSystem<2> for ChartFlow<'_> {
    fn rhs(&self, s: f64, u: &[f64; 2]) -> [f64; 2] {
        let (m, p, n) = (self.params.m(), self.params.p(), self.params.nf());
        let [y, z] = *u;
        let w = chart_w(m, p, s, z);
        [-(n - 2.0) * y - z - m * y * y - 0.5 * y * w, -(m - p) * y * z]
    }

    fn project(&self, u: &mut [f64; 2]) -> bool {
        if u[1] < f64::MIN_POSITIVE {
            u[1] = f64::MIN_POSITIVE;
            return true;
        }
        false
    }
}

struct PhaseFlow<'a> {
    params: &'a Params,
}

impl OdeSystem<4> for PhaseFlow<'_> {
    fn rhs(&self, _t: f64, u: &[f64; 4]) -> [f64; 4] {
        let (m, p, n) = (self.params.m(), self.params.p(), self.params.nf());
        let [x, y, z, _] = *u;
        let r = 1.0 / (1.0 + x);
        [
            r * x * ((m - 1.0) * y - 2.0 * x),
            r * (-y * y - 0.5 * y - n * x * y - x * z),
            r * z * ((p - 1.0) * y - 2.0 * x),
            r * x,
        ]
    }

    fn project(&self, u: &mut [f64; 4]) -> bool {
        let mut changed = false;
        for i in [0, 2] {
            if u[i] < 0.0 {
                u[i] = 0.0;
                changed = true;
            }
        }
        changed
    }
}

fn positive_region(u: &[f64; 4]) -> bool {
    u[1] > -0.25 && u[0] * u[2] < 1.0 / 16.0
}

fn zero_region(n: f64, u: &[f64; 4]) -> bool {
    u[1] < -0.5 && n * u[0] < -u[1] - 0.5
}

fn p1_distance(u: &[f64; 4]) -> f64 {
    (u[0] * u[0] + (u[1] + 0.5) * (u[1] + 0.5)).sqrt()
}

/// `ln f` from the phase state, using `f^{m-1} = X xi^2 / m`.
fn ln_f_phase(m: f64, u: &[f64; 4]) -> f64 {
    (u[0].ln() + 2.0 * u[3] - m.ln()) / (m - 1.0)
}

/// Dense record of an orbit, evaluable at any `xi` it covers.
#[derive(Debug, Clone)]
pub struct ProfileTrace {
    pub params: Params,
    /// Steps in `s = ln xi` of the state `(y, z)`.
    pub chart: Vec<Step<2>>,
    /// Steps in `sigma` of the state `(X, Y, Z, s)`.
    pub phase: Vec<Step<4>>,
    pub edge: SupportEdge,
    pub k: f64,
}

impl ProfileTrace {
    /// Range of `ln xi` covered by steps.
    pub fn s_range(&self) -> (f64, f64) {
        let lo = self.chart.first().map(|s| s.t0).unwrap_or(f64::NAN);
        let hi = match self.phase.last() {
            Some(st) => st.y1[3],
            None => self.chart.last().map(|s| s.t1).unwrap_or(f64::NAN),
        };
        (lo, hi)
    }

    /// `f` at `s = ln xi`; `None` outside the traced range unless beyond a
    /// finite edge, where the value is 0.
    pub fn eval_ln(&self, s: f64) -> Option<f64> {
        let (m, p) = (self.params.m(), self.params.p());
        if let SupportEdge::Finite(x0) = self.edge {
            if s >= x0.ln() {
                return Some(0.0);
            }
        }
        let (lo, hi) = self.s_range();
        if !(s >= lo) {
            return None;
        }
        if let Some(first) = self.phase.first() {
            if s >= first.y0[3] {
                if s > hi {
                    return self.edge_tail(s);
                }
                let j = self.phase.partition_point(|st| st.y1[3] < s).min(self.phase.len() - 1);
                let st = &self.phase[j];
                let (mut a, mut b) = (st.t0, st.t1);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if st.interpolate(mid)[3] < s {
                        a = mid;
                    } else {
                        b = mid;
                    }
                    if b - a <= 1e-15 * (1.0 + a.abs()) {
                        break;
                    }
                }
                let u = st.interpolate(0.5 * (a + b));
                return Some(ln_f_phase(m, &u).exp());
            }
        }
        if s > hi {
            return self.edge_tail(s);
        }
        let j = self.chart.partition_point(|st| st.t1 < s).min(self.chart.len() - 1);
        let u = self.chart[j].interpolate(s);
        Some((m * u[1]).powf(-1.0 / (m - p)))
    }

    /// Between the last traced point and a finite edge the pressure
    /// `f^{m-1}` follows `xi0^2 - xi^2`.
    fn edge_tail(&self, s: f64) -> Option<f64> {
        let x0 = self.edge.finite()?;
        let m = self.params.m();
        let last = self.phase.last()?;
        let xl = last.y1[3].exp();
        let vl = (ln_f_phase(m, &last.y1) * (m - 1.0)).exp();
        let xi = s.exp();
        let v = vl * (x0 * x0 - xi * xi) / (x0 * x0 - xl * xl);
        Some(v.max(0.0).powf(1.0 / (m - 1.0)))
    }

    pub fn eval(&self, xi: f64) -> Option<f64> {
        if !(xi > 0.0) {
            return None;
        }
        self.eval_ln(xi.ln())
    }

    /// Samples the trace every `ds` in `ln xi` plus at every step end,
    /// skipping points where `xi` underflows.
    pub fn to_profile(&self, ds: f64) -> Result<SelfSimilarProfile> {
        let m = self.params.m();
        let p = self.params.p();
        let mut pts: Vec<(f64, f64)> = Vec::new();
        let mut push = |s: f64, f: f64| {
            let xi = s.exp();
            if xi > 0.0 && f.is_finite() && pts.last().map_or(true, |l| xi > l.0) {
                pts.push((xi, f));
            }
        };
        for st in &self.chart {
            let k = ((st.t1 - st.t0) / ds).ceil().max(1.0) as usize;
            for i in 0..k {
                let s = st.t0 + (st.t1 - st.t0) * i as f64 / k as f64;
                let u = st.interpolate(s);
                push(s, (m * u[1]).powf(-1.0 / (m - p)));
            }
        }
        for st in &self.phase {
            let ds_step = st.y1[3] - st.y0[3];
            let k = (ds_step / ds).ceil().max(1.0) as usize;
            for i in 0..k {
                let u = st.interpolate(st.t0 + st.h() * i as f64 / k as f64);
                push(u[3], ln_f_phase(m, &u).exp());
            }
        }
        match (self.phase.last(), self.chart.last()) {
            (Some(st), _) => push(st.y1[3], ln_f_phase(m, &st.y1).exp()),
            (None, Some(st)) => push(st.t1, (m * st.y1[1]).powf(-1.0 / (m - p))),
            _ => {}
        }
        if let SupportEdge::Finite(x0) = self.edge {
            pts.retain(|q| q.0 < x0);
            pts.push((x0, 0.0));
        }
        let (xi, f) = pts.into_iter().unzip();
        SelfSimilarProfile::new(self.params, xi, f, self.edge, self.k)
    }
}

fn require_unit(params: &Params) -> Result<()> {
    if params.k_hardy() != 1.0 {
        return Err(Error::InvalidInput(
            "shooting works with unit Hardy constant; rescale the profile afterwards",
        ));
    }
    Ok(())
}

/// Integrates the orbit labelled `k`. With `record` the dense trace is kept.
pub(crate) fn run_shot(
    params: &Params,
    series: &LaunchSeries,
    k: f64,
    controls: &ShotControls,
    record: bool,
) -> Result<(ShotOutcome, Option<ProfileTrace>)> {
    require_unit(params)?;
    let (m, p, n) = (params.m(), params.p(), params.nf());
    let launch = refined_launch(series, k, controls.xi_start)?;
    let ode = controls.ode();

    let mut chart_steps = Vec::new();
    let chart = ChartFlow { params };
    let stage1 = integrate(&chart, launch.s, [launch.state.y, launch.state.z], f64::INFINITY, &ode, |st| {
        if record {
            chart_steps.push(*st);
        }
        let [y, z] = st.y1;
        let w = chart_w(m, p, st.t1, z);
        if w >= 1.0 || y < -n - 0.5 * w {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    if stage1.end == End::MaxSteps {
        return Ok((inconclusive(launch, &stage1.y, stage1.t, m, p), None));
    }
    let s1 = stage1.t;
    let [y1, z1] = stage1.y;
    let w1 = chart_w(m, p, s1, z1);
    let start = [1.0 / w1, y1 / w1, z1 / w1, s1];

    let flow = PhaseFlow { params };
    let mut phase_steps: Vec<Step<4>> = Vec::new();
    let mut approach = Approach {
        distance: p1_distance(&start),
        sigma: 0.0,
        xi: s1.exp(),
        xi0: f64::NAN,
        state: [start[0], start[1], start[2]],
    };
    let mut side = if positive_region(&start) {
        Side::Positive
    } else if zero_region(n, &start) {
        Side::Zero
    } else {
        Side::Undecided
    };
    let done = |side: Side, u: &[f64; 4]| match side {
        Side::Positive => true,
        Side::Zero => u[0] <= controls.crossing_resolution * u[1].abs(),
        Side::Undecided => false,
    };
    let mut end_state = start;
    let mut end_sigma = 0.0;
    let mut ended = done(side, &start);
    if !ended {
        let out = integrate(&flow, 0.0, start, controls.sigma_max, &ode, |st| {
            if record {
                phase_steps.push(*st);
            }
            let u = st.y1;
            let d = p1_distance(&u);
            if d < approach.distance && side == Side::Undecided {
                approach.distance = d;
                approach.sigma = st.t1;
                approach.xi = u[3].exp();
                approach.state = [u[0], u[1], u[2]];
            }
            if side == Side::Undecided {
                if positive_region(&u) {
                    side = Side::Positive;
                } else if zero_region(n, &u) {
                    side = Side::Zero;
                }
            }
            if done(side, &u) {
                Flow::Stop
            } else {
                Flow::Continue
            }
        })?;
        end_state = out.y;
        end_sigma = out.t;
        ended = out.end == End::Stopped;
    }
    let _ = end_sigma;
    approach.xi0 = approach.xi * (1.0 + 4.0 * approach.state[0] / (m - 1.0)).sqrt();

    let xi = end_state[3].exp();
    let f = ln_f_phase(m, &end_state).exp();
    let slope = xi * f * end_state[1];
    let (kind, xi_end, f_end) = match side {
        _ if !ended => (OutcomeKind::Inconclusive, xi, f),
        Side::Positive => (OutcomeKind::PositiveLimit, xi, f),
        Side::Zero => {
            (OutcomeKind::ZeroCrossing, xi * (1.0 + end_state[0] / ((m - 1.0) * end_state[1])), 0.0)
        }
        Side::Undecided => (OutcomeKind::Inconclusive, xi, f),
    };
    let near_p1 = approach.distance < controls.interface_tol;
    let kind = if near_p1 && kind != OutcomeKind::Inconclusive { OutcomeKind::Interface } else { kind };
    let outcome = ShotOutcome {
        kind,
        side: if ended { side } else { Side::Undecided },
        xi_end,
        f_end,
        slope_fm_end: slope,
        approach: Some(approach),
        launch,
    };

    let trace = if record {
        let (phase, edge) = match kind {
            OutcomeKind::Interface => {
                let cut = approach.sigma;
                let steps: Vec<_> = phase_steps.into_iter().filter(|st| st.t1 <= cut).collect();
                (steps, SupportEdge::Finite(approach.xi0))
            }
            OutcomeKind::ZeroCrossing => (phase_steps, SupportEdge::Finite(xi_end)),
            _ => (phase_steps, SupportEdge::Unbounded),
        };
        Some(ProfileTrace { params: *params, chart: chart_steps, phase, edge, k })
    } else {
        None
    };
    Ok((outcome, trace))
}

fn inconclusive(launch: Launch, u: &[f64; 2], s: f64, m: f64, p: f64) -> ShotOutcome {
    ShotOutcome {
        kind: OutcomeKind::Inconclusive,
        side: Side::Undecided,
        xi_end: s.exp(),
        f_end: (m * u[1]).powf(-1.0 / (m - p)),
        slope_fm_end: f64::NAN,
        approach: None,
        launch,
    }
}

/// Result of one shot with the sampled profile and its dense trace.
#[derive(Debug, Clone)]
pub struct Shot {
    pub profile: SelfSimilarProfile,
    pub outcome: ShotOutcome,
    pub trace: ProfileTrace,
}

/// Sampling step in `ln xi` of recorded profiles.
pub const PROFILE_DS: f64 = 0.01;

/// Integrates the orbit with origin constant `k` and classifies it.
pub fn integrate_shot(params: &Params, k: f64, controls: &ShotControls) -> Result<Shot> {
    let series = LaunchSeries::new(params);
    let (outcome, trace) = run_shot(params, &series, k, controls, true)?;
    let trace = trace.ok_or(Error::InvalidInput("trace not recorded"))?;
    let profile = trace.to_profile(PROFILE_DS)?;
    Ok(Shot { profile, outcome, trace })
}

/// Only the classification of the orbit labelled `k`.
pub fn classify(params: &Params, series: &LaunchSeries, k: f64, controls: &ShotControls) -> Result<ShotOutcome> {
    Ok(run_shot(params, series, k, controls, false)?.0)
}

/// Prepends to `trace` the part of the orbit between `xi_deep` and the
/// launch point, integrated from the origin series at `xi_deep`. Returns the
/// relative mismatch of `(y, z)` against the launch data.
pub fn extend_to_origin(
    trace: &mut ProfileTrace,
    series: &LaunchSeries,
    launch: &Launch,
    ln_xi_deep: f64,
    controls: &ShotControls,
) -> Result<f64> {
    let params = trace.params;
    let Some(phi) = series.phi_at(trace.k, ln_xi_deep) else {
        return Ok(0.0);
    };
    if ln_xi_deep >= launch.s {
        return Ok(0.0);
    }
    let st = series.chart_state(phi, ln_xi_deep);
    let mut steps = Vec::new();
    let out = integrate(&ChartFlow { params: &params }, ln_xi_deep, [st.y, st.z], launch.s, &controls.ode(), |s| {
        steps.push(*s);
        Flow::Continue
    })?;
    let dy = (out.y[0] - launch.state.y).abs() / launch.state.y.abs();
    let dz = (out.y[1] - launch.state.z).abs() / launch.state.z;
    steps.extend(trace.chart.drain(..));
    trace.chart = steps;
    Ok(dy.max(dz))
}
