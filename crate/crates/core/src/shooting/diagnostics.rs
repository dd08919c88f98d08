//! Checks run on computed profiles: endpoint fits, residuals and the
//! qualitative properties every admissible profile has.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::ode::{integrate, Controls, Flow};
use crate::params::Params;
use crate::profile::{SelfSimilarProfile, SupportEdge};
use crate::stats::{fit_line, LineFit};
use crate::transform::PhaseState;

use super::launch::{chart_w, LaunchSeries};
use super::shot::ProfileTrace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginFit {
    /// Slope of `f^{m-p}` against `ln xi`.
    pub slope: f64,
    pub slope_se: f64,
    /// Intercept of the same regression.
    pub intercept: f64,
    /// Intercept after removing the `A ln f^{m-p}` correction; this is the
    /// orbit label used by the shooting.
    pub k_est: f64,
    pub k_est_se: f64,
    pub decades: f64,
    pub n: usize,
}

/// Decades of small `xi` used by [`fit_origin_behavior`].
pub const ORIGIN_FIT_DECADES: f64 = 10.0;

/// Regression of `f^{m-p}` against `ln xi` over the lowest decades of the
/// profile.
pub fn fit_origin_behavior(profile: &SelfSimilarProfile, params: &Params) -> Result<OriginFit> {
    let lo = profile.xi.iter().copied().find(|x| *x > 0.0).ok_or(Error::InsufficientRange("no positive xi"))?;
    fit_origin_window(profile, params, lo, lo * 10f64.powf(ORIGIN_FIT_DECADES))
}

/// Same as [`fit_origin_behavior`] on `[xi_lo, xi_hi]`.
pub fn fit_origin_window(
    profile: &SelfSimilarProfile,
    params: &Params,
    xi_lo: f64,
    xi_hi: f64,
) -> Result<OriginFit> {
    let mp = params.m() - params.p();
    let series = LaunchSeries::new(params);
    let mut s = Vec::new();
    let mut phi = Vec::new();
    let mut psi = Vec::new();
    for (x, f) in profile.xi.iter().zip(&profile.f) {
        if *x >= xi_lo && *x <= xi_hi && *x > 0.0 && *f > 0.0 {
            let ph = f.powf(mp);
            s.push(x.ln());
            phi.push(ph);
            psi.push(series.label(ph, 0.0));
        }
    }
    if s.len() < 3 {
        return Err(Error::InsufficientRange("fewer than three samples in the window"));
    }
    let decades = (s[s.len() - 1] - s[0]) / 10f64.ln();
    if decades < 1.0 {
        return Err(Error::InsufficientRange("origin window spans less than one decade"));
    }
    let raw = fit_line(&s, &phi)?;
    let corrected = fit_line(&s, &psi)?;
    Ok(OriginFit {
        slope: raw.slope,
        slope_se: raw.slope_se,
        intercept: raw.intercept,
        k_est: corrected.intercept,
        k_est_se: corrected.intercept_se,
        decades,
        n: s.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub fit: LineFit,
    /// Range of `(xi0 - xi)/xi0` used.
    pub window: (f64, f64),
}

/// Largest `(xi0 - xi)/xi0` used by [`fit_interface_exponent`].
pub const INTERFACE_WINDOW: f64 = 1e-2;

/// Log-log regression of `f` against `xi0^2 - xi^2` next to the edge.
pub fn fit_interface_exponent(profile: &SelfSimilarProfile, params: &Params) -> Result<InterfaceFit> {
    fit_interface_window(profile, params, INTERFACE_WINDOW)
}

pub fn fit_interface_window(
    profile: &SelfSimilarProfile,
    _params: &Params,
    rel_width: f64,
) -> Result<InterfaceFit> {
    let x0 = profile.edge.finite().ok_or(Error::InsufficientRange("profile has no finite edge"))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut window = (f64::INFINITY, 0.0f64);
    for (x, f) in profile.xi.iter().zip(&profile.f) {
        let rel = (x0 - x) / x0;
        if rel > 0.0 && rel <= rel_width && *f > 0.0 {
            xs.push((x0 * x0 - x * x).ln());
            ys.push(f.ln());
            window = (window.0.min(rel), window.1.max(rel));
        }
    }
    if xs.len() < 5 || window.1 / window.0 < 10.0 {
        return Err(Error::InsufficientRange("too few samples next to the interface"));
    }
    let fit = fit_line(&xs, &ys)?;
    Ok(InterfaceFit { exponent: fit.slope, amplitude: fit.intercept.exp(), fit, window })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimaReport {
    /// `(index, xi, f)` of every strict interior local minimum with `f > 0`.
    pub violations: Vec<(usize, f64, f64)>,
}

pub fn verify_no_positive_minima(profile: &SelfSimilarProfile) -> MinimaReport {
    let f = &profile.f;
    let violations = (1..f.len().saturating_sub(1))
        .filter(|&i| f[i] > 0.0 && f[i] < f[i - 1] && f[i] < f[i + 1])
        .map(|i| (i, profile.xi[i], f[i]))
        .collect();
    MinimaReport { violations }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTraceReport {
    /// `(xi, state)` at the interior positive samples.
    pub states: Vec<(f64, PhaseState)>,
    /// Largest relative increase of `X` between consecutive samples.
    pub max_x_increase: f64,
    pub max_z_increase: f64,
    pub max_y: f64,
    /// `Z/X = f^{p-m}/m` at the first sample of the profile.
    pub z_over_x_first: f64,
    pub tol: f64,
}

impl PhaseTraceReport {
    pub fn x_monotone(&self) -> bool {
        self.max_x_increase <= self.tol
    }

    pub fn z_monotone(&self) -> bool {
        self.max_z_increase <= self.tol
    }

    pub fn y_negative(&self) -> bool {
        self.max_y < 0.0
    }
}

/// Monotonicity tolerance of [`phase_trace`], relative.
pub const PHASE_TRACE_TOL: f64 = 1e-9;

/// Maps the positive part of a sampled profile to `(X, Y, Z)`, with `Y`
/// from three-point differences of `f^{m-1}`. Samples where `X` or `Z` are
/// not representable are skipped.
pub fn phase_trace(profile: &SelfSimilarProfile, params: &Params) -> PhaseTraceReport {
    let (m, p) = (params.m(), params.p());
    let n = profile.positive_len();
    let xi = &profile.xi[..n];
    let v: Vec<f64> = profile.f[..n].iter().map(|f| f.powf(m - 1.0)).collect();
    let mut states = Vec::new();
    let z_over_x_first = if n > 0 { profile.f[0].powf(p - m) / m } else { f64::NAN };
    for i in 1..n.saturating_sub(1) {
        // X and Z overflow for xi below about 1e-154
        if !(xi[i] * xi[i] > 0.0) {
            continue;
        }
        let (h0, h1) = (xi[i] - xi[i - 1], xi[i + 1] - xi[i]);
        let dv = (h0 * h0 * (v[i + 1] - v[i]) + h1 * h1 * (v[i] - v[i - 1])) / (h0 * h1 * (h0 + h1));
        let x2 = xi[i] * xi[i];
        let f = profile.f[i];
        let state = PhaseState::new(
            m * v[i] / x2,
            m / ((m - 1.0) * xi[i]) * dv,
            f.powf(p - 1.0) / x2,
        );
        states.push((xi[i], state));
    }
    let mut max_x_increase = f64::NEG_INFINITY;
    let mut max_z_increase = f64::NEG_INFINITY;
    for w in states.windows(2) {
        let (a, b) = (w[0].1, w[1].1);
        max_x_increase = max_x_increase.max((b.x - a.x) / a.x);
        max_z_increase = max_z_increase.max((b.z - a.z) / a.z);
    }
    let max_y = states.iter().map(|s| s.1.y).fold(f64::NEG_INFINITY, f64::max);
    PhaseTraceReport { states, max_x_increase, max_z_increase, max_y, z_over_x_first, tol: PHASE_TRACE_TOL }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// Largest residual relative to the largest of its four terms.
    pub max: f64,
    pub at_xi: f64,
    pub points: usize,
}

/// Largest difference step in `ln xi` of [`ssode_residual`].
pub const RESIDUAL_STEP: f64 = 5e-3;

/// Residual of the profile equation on `n` log-spaced points of
/// `[xi_lo, xi_hi]`, with derivatives from five-point differences in
/// `ln xi` of the dense trace.
pub fn ssode_residual(trace: &ProfileTrace, xi_lo: f64, xi_hi: f64, n: usize) -> Result<ResidualReport> {
    let (m, p, nn) = (trace.params.m(), trace.params.p(), trace.params.nf());
    if !(xi_hi > xi_lo && xi_lo > 0.0) || n < 2 {
        return Err(Error::InvalidInput("need 0 < xi_lo < xi_hi and n >= 2"));
    }
    let edge_ln = trace.edge.finite().map(|x| x.ln());
    let mut report = ResidualReport { max: 0.0, at_xi: xi_lo, points: 0 };
    for j in 0..n {
        let s = xi_lo.ln() + (xi_hi / xi_lo).ln() * j as f64 / (n - 1) as f64;
        // the stencil must stay clear of the singular interface
        let h = edge_ln.map_or(RESIDUAL_STEP, |e| RESIDUAL_STEP.min(0.02 * (e - s)));
        let mut f = [0.0; 5];
        for (k, fk) in f.iter_mut().enumerate() {
            *fk = trace
                .eval_ln(s + (k as f64 - 2.0) * h)
                .filter(|v| *v > 0.0)
                .ok_or(Error::InsufficientRange("residual point outside the positive trace"))?;
        }
        let u: Vec<f64> = f.iter().map(|v| v.powf(m)).collect();
        let d1 = |a: &[f64]| (a[0] - 8.0 * a[1] + 8.0 * a[3] - a[4]) / (12.0 * h);
        let d2 = |a: &[f64]| (-a[0] + 16.0 * a[1] - 30.0 * a[2] + 16.0 * a[3] - a[4]) / (12.0 * h * h);
        let xi = s.exp();
        let g1 = d1(&u) / xi;
        let g2 = (d2(&u) - d1(&u)) / (xi * xi);
        let f1 = d1(&f) / xi;
        let terms = [g2, (nn - 1.0) / xi * g1, 0.5 * xi * f1, f[2].powf(p) / (xi * xi)];
        let scale = terms.iter().fold(0.0f64, |a, t| a.max(t.abs()));
        let r = terms.iter().sum::<f64>().abs() / scale;
        if r > report.max {
            report.max = r;
            report.at_xi = xi;
        }
        report.points += 1;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingReport {
    pub points: usize,
    pub violations: usize,
    /// Smallest `(f_upper - f_lower)/f_upper` over the points.
    pub min_rel_gap: f64,
    pub range: (f64, f64),
}

/// Compares two orbits on `n` log-spaced points of their common positivity
/// set, expecting `lower < upper` everywhere.
pub fn profile_ordering(lower: &ProfileTrace, upper: &ProfileTrace, n: usize) -> Result<OrderingReport> {
    let (a0, a1) = lower.s_range();
    let (b0, b1) = upper.s_range();
    let edge_ln = |t: &ProfileTrace, hi: f64| match t.edge {
        SupportEdge::Finite(x0) => hi.min(x0.ln()),
        SupportEdge::Unbounded => hi,
    };
    let lo = a0.max(b0);
    let hi = edge_ln(lower, a1).min(edge_ln(upper, b1));
    if !(hi > lo) || n < 2 {
        return Err(Error::InsufficientRange("profiles share no positivity interval"));
    }
    let mut rep = OrderingReport { points: 0, violations: 0, min_rel_gap: f64::INFINITY, range: (lo.exp(), hi.exp()) };
    for j in 0..n {
        let s = lo + (hi - lo) * j as f64 / (n - 1) as f64;
        let (Some(fl), Some(fu)) = (lower.eval_ln(s), upper.eval_ln(s)) else { continue };
        if !(fl > 0.0 && fu > 0.0) {
            continue;
        }
        rep.points += 1;
        if !(fl < fu) {
            rep.violations += 1;
        }
        rep.min_rel_gap = rep.min_rel_gap.min((fu - fl) / fu);
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q5Report {
    pub xi_end: f64,
    /// `y = xi f'/f` at the end; tends to `-(N-2)/m` on this branch.
    pub y_end: f64,
    /// `f xi^{(N-2)/m}` at the end.
    pub d_end: f64,
    /// `ln Z = ln(xi^{-2} f^{p-1})` at the end.
    pub ln_z_end: f64,
    /// `f^{m-p} / (-ln xi)` at the end; bounded on the logarithmic branch,
    /// unbounded here.
    pub log_ratio_end: f64,
    pub log_ratio_start: f64,
}

/// Follows towards the origin the orbit with `f = D xi^{-(N-2)/m}` at
/// `xi_a`, integrating the chart system backwards in `ln xi`.
pub fn q5_branch_check(params: &Params, d: f64, xi_a: f64, xi_min: f64) -> Result<Q5Report> {
    let (m, p, n) = (params.m(), params.p(), params.nf());
    if !(d > 0.0 && xi_a > xi_min && xi_min > 0.0 && xi_a < 1.0) {
        return Err(Error::InvalidInput("need D > 0 and 0 < xi_min < xi_a < 1"));
    }
    let ln_f = d.ln() - (n - 2.0) / m * xi_a.ln();
    let y0 = -(n - 2.0) / m;
    let z0 = ((p - m) * ln_f).exp() / m;
    // time tau = -ln xi
    let rhs = |tau: f64, u: &[f64; 2]| {
        let s = -tau;
        let [y, z] = *u;
        let w = chart_w(m, p, s, z);
        [(n - 2.0) * y + z + m * y * y + 0.5 * y * w, (m - p) * y * z]
    };
    let out = integrate(&rhs, -xi_a.ln(), [y0, z0], -xi_min.ln(), &Controls::default(), |_| Flow::Continue)?;
    let s = -out.t;
    let [y, z] = out.y;
    let ln_f_end = -(m * z).ln() / (m - p);
    let ratio = |lnf: f64, s: f64| ((m - p) * lnf).exp() / (-s);
    Ok(Q5Report {
        xi_end: s.exp(),
        y_end: y,
        d_end: (ln_f_end + (n - 2.0) / m * s).exp(),
        ln_z_end: -2.0 * s + (p - 1.0) * ln_f_end,
        log_ratio_end: ratio(ln_f_end, s),
        log_ratio_start: ratio(ln_f, xi_a.ln()),
    })
}
