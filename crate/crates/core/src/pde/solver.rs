//! Explicit conservative finite-volume stepping for
//! `u_t = r^{1-N} (r^{N-1} (u^m)_r)_r + K (r + eps)^{-2} u^p`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::giant::FriendlyGiant;
use super::grid::{RadialField, RadialGrid};
use crate::error::{Error, Result};
use crate::params::Params;

/// `x^a` with fast paths for small integer exponents.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Power {
    One,
    Int(i32),
    Real(f64),
}

impl Power {
    pub(crate) fn new(a: f64) -> Self {
        if a == 1.0 {
            Power::One
        } else if a == a.round() && a.abs() <= 16.0 {
            Power::Int(a as i32)
        } else {
            Power::Real(a)
        }
    }

    #[inline]
    pub(crate) fn eval(self, x: f64) -> f64 {
        match self {
            Power::One => x,
            Power::Int(k) => x.powi(k),
            Power::Real(a) => {
                if x > 0.0 {
                    x.powf(a)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Condition at the inner face `r = r_min`.
#[derive(Debug, Clone)]
pub enum InnerBoundary {
    /// No flux; the natural symmetry condition when `r_min = 0`.
    ZeroFlux,
    /// Dirichlet value `U(r_min, t)` from a self-similar solution.
    Giant(FriendlyGiant),
}

#[derive(Debug, Clone)]
pub struct StepControls {
    /// Fraction of the diffusion stability bound, at most 1.
    pub theta: f64,
    /// `dt <= reaction_factor (r + eps)^2 / (K u^{p-1})` cellwise.
    pub reaction_factor: f64,
    pub dt_max: f64,
    pub max_steps: usize,
    /// Switches the potential term off (pure diffusion).
    pub reaction: bool,
    /// Interior snapshot times; the initial and final times are always kept.
    pub snapshots: Vec<f64>,
    pub inner: InnerBoundary,
}

impl Default for StepControls {
    fn default() -> Self {
        Self {
            theta: 0.4,
            reaction_factor: 0.1,
            dt_max: f64::INFINITY,
            max_steps: 100_000_000,
            reaction: true,
            snapshots: Vec::new(),
            inner: InnerBoundary::ZeroFlux,
        }
    }
}

impl StepControls {
    /// `count` equally spaced snapshots on `(t0, t_end]`.
    pub fn with_uniform_snapshots(mut self, t0: f64, t_end: f64, count: usize) -> Self {
        self.snapshots = (1..=count).map(|k| t0 + (t_end - t0) * k as f64 / count as f64).collect();
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidInput("theta must lie in (0, 1]"));
        }
        if !(self.reaction_factor > 0.0) || !(self.dt_max > 0.0) {
            return Err(Error::InvalidInput("step bounds must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

/// Result of [`evolve`]: the snapshots plus the accepted step sequence.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub grid: RadialGrid,
    pub params: Params,
    pub eps: f64,
    pub snapshots: Vec<Snapshot>,
    pub dts: Vec<f64>,
    /// Step count at which each snapshot was taken.
    pub snapshot_steps: Vec<usize>,
    /// Smallest ratio `dt / bound` slack seen, `1 - max(dt / bound)`.
    pub min_cfl_slack: f64,
}

impl Evolution {
    pub fn steps(&self) -> usize {
        self.dts.len()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn field(&self, k: usize) -> RadialField {
        let s = &self.snapshots[k];
        RadialField {
            grid: self.grid.clone(),
            u: s.u.clone(),
            t: s.t,
            params: self.params,
            eps: self.eps,
        }
    }

    pub fn last(&self) -> RadialField {
        self.field(self.snapshots.len() - 1)
    }

    /// Masses `∫ u r^{N-1} dr` at the snapshots.
    pub fn masses(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| self.grid.integrate(&s.u)).collect()
    }

    /// Index of the snapshot at time `t` (within a relative `1e-12`).
    pub fn snapshot_at(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * t.abs().max(1.0);
        self.snapshots.iter().position(|s| (s.t - t).abs() <= tol)
    }
}

struct Stepper<'a> {
    grid: &'a RadialGrid,
    pm: Power,
    pp: Power,
    m: f64,
    p: f64,
    /// `A / distance` at each face.
    cond: Vec<f64>,
    inv_vol: Vec<f64>,
    weight: Vec<f64>,
    um: Vec<f64>,
    flux: Vec<f64>,
    rate: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(field: &'a RadialField, controls: &StepControls) -> Self {
        let grid = &field.grid;
        let n = grid.n;
        let (m, p) = (field.params.m(), field.params.p());
        let mut cond: Vec<f64> = grid.areas.iter().map(|a| a / grid.dr).collect();
        cond[0] = match controls.inner {
            InnerBoundary::ZeroFlux => 0.0,
            InnerBoundary::Giant(_) => 2.0 * grid.areas[0] / grid.dr,
        };
        cond[n] *= 2.0;
        let k = if controls.reaction { field.params.k_hardy() } else { 0.0 };
        let weight = grid.r.iter().map(|r| k / (r + field.eps).powi(2)).collect();
        Self {
            grid,
            pm: Power::new(m),
            pp: Power::new(p),
            m,
            p,
            cond,
            inv_vol: grid.volumes.iter().map(|v| 1.0 / v).collect(),
            weight,
            um: vec![0.0; n],
            flux: vec![0.0; n + 1],
            rate: vec![0.0; n],
        }
    }

    /// Fills the rates for state `u` at time `t`; returns the stable step.
    fn rates(&mut self, u: &[f64], t: f64, controls: &StepControls) -> f64 {
        let n = self.grid.n;
        for i in 0..n {
            self.um[i] = self.pm.eval(u[i]);
        }
        self.flux[0] = match &controls.inner {
            InnerBoundary::ZeroFlux => 0.0,
            InnerBoundary::Giant(g) => {
                let b = self.pm.eval(g.eval(self.grid.r_min, t));
                self.cond[0] * (self.um[0] - b)
            }
        };
        for j in 1..n {
            self.flux[j] = self.cond[j] * (self.um[j] - self.um[j - 1]);
        }
        self.flux[n] = -self.cond[n] * self.um[n - 1];
        let mut dt = f64::INFINITY;
        for i in 0..n {
            let ui = u[i];
            let mut r = (self.flux[i + 1] - self.flux[i]) * self.inv_vol[i];
            if ui > 0.0 {
                let diff = (self.cond[i] + self.cond[i + 1]) * self.m * self.um[i] / ui;
                dt = dt.min(controls.theta / (diff * self.inv_vol[i]));
                let w = self.weight[i];
                if w > 0.0 {
                    let up = self.pp.eval(ui);
                    r += w * up;
                    let grow = if self.p == 1.0 { w } else { w * up / ui };
                    dt = dt.min(controls.reaction_factor / grow);
                }
            }
            self.rate[i] = r;
        }
        dt
    }
}

/// Evolves `field` to `t_end`, keeping snapshots at the control times.
///
/// Each step uses the largest `dt` allowed by the diffusion bound
/// `theta V_i / ((c_- + c_+) m u_i^{m-1})` (`c = r^{N-1}/dr` at the faces),
/// the reaction bound and `dt_max`. Under the diffusion bound the update is
/// monotone in every cell value, so positivity and discrete comparison hold.
pub fn evolve(field: &RadialField, t_end: f64, controls: &StepControls) -> Result<Evolution> {
    run(field, t_end, controls, None)
}

/// Repeats the step sequence and snapshot steps of `template` from `field`.
///
/// Fails with [`Error::CflViolation`] if a replayed step exceeds the
/// stability bound of the new run.
pub fn replay(field: &RadialField, template: &Evolution, controls: &StepControls) -> Result<Evolution> {
    if field.grid != template.grid {
        return Err(Error::InvalidInput("replay needs the template's grid"));
    }
    let t_end = template.snapshots.last().map_or(field.t, |s| s.t);
    run(field, t_end, controls, Some(template))
}

fn run(
    field: &RadialField,
    t_end: f64,
    controls: &StepControls,
    template: Option<&Evolution>,
) -> Result<Evolution> {
    controls.check()?;
    if !(t_end >= field.t) {
        return Err(Error::InvalidInput("t_end precedes the field time"));
    }
    if let InnerBoundary::Giant(_) = controls.inner {
        if field.grid.r_min == 0.0 {
            return Err(Error::InvalidInput("a Dirichlet inner boundary needs r_min > 0"));
        }
    }
    let n = field.grid.n;
    if field.u[n - 1] > 0.0 {
        return Err(Error::SupportReachedBoundary { t: field.t });
    }
    let mut stops: Vec<f64> = controls
        .snapshots
        .iter()
        .copied()
        .filter(|s| *s > field.t && *s < t_end)
        .collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.dedup();
    if t_end > field.t {
        stops.push(t_end);
    }

    let mut st = Stepper::new(field, controls);
    let mut u = field.u.clone();
    let mut t = field.t;
    let mut out = Evolution {
        grid: field.grid.clone(),
        params: field.params,
        eps: field.eps,
        snapshots: vec![Snapshot { t, u: u.clone() }],
        dts: Vec::new(),
        snapshot_steps: vec![0],
        min_cfl_slack: 1.0,
    };
    let mut next_stop = 0;
    let mut next_template = 1;
    loop {
        let done = match template {
            None => next_stop >= stops.len(),
            Some(tpl) => out.dts.len() >= tpl.dts.len(),
        };
        if done {
            break;
        }
        if out.dts.len() >= controls.max_steps {
            return Err(Error::StepFailure { t });
        }
        let bound = st.rates(&u, t, controls).min(controls.dt_max);
        let (dt, snap) = match template {
            None => {
                let target = stops[next_stop];
                let rest = target - t;
                if bound >= rest {
                    (rest, true)
                } else if bound > 1.5 * rest / 2.0 {
                    // avoid a sliver step before the snapshot
                    (rest / 2.0, false)
                } else {
                    (bound, false)
                }
            }
            Some(tpl) => {
                let k = out.dts.len();
                let dt = tpl.dts[k];
                if dt > bound * (1.0 + 1e-9) {
                    return Err(Error::CflViolation { dt, limit: bound });
                }
                let snap = tpl.snapshot_steps.get(next_template) == Some(&(k + 1));
                (dt, snap)
            }
        };
        if !(dt > 1e-300) {
            return Err(Error::StepFailure { t });
        }
        out.min_cfl_slack = out.min_cfl_slack.min(1.0 - dt / bound);
        for i in 0..n {
            u[i] = (u[i] + dt * st.rate[i]).max(0.0);
        }
        out.dts.push(dt);
        t = if snap && template.is_none() { stops[next_stop] } else { t + dt };
        if !u[n - 1].is_finite() || u.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowupDetected { t, norm: f64::INFINITY });
        }
        if u[n - 1] > 0.0 {
            return Err(Error::SupportReachedBoundary { t });
        }
        if snap {
            if let Some(tpl) = template {
                t = tpl.snapshots[next_template].t;
                next_template += 1;
            } else {
                next_stop += 1;
            }
            out.snapshots.push(Snapshot { t, u: u.clone() });
            out.snapshot_steps.push(out.dts.len());
        }
    }
    Ok(out)
}
