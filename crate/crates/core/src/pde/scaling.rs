//! Reduction of a general Hardy constant to `K = 1`,
//! `u(x, t) = lambda^{1/(m-1)} v(x, lambda t)`, `lambda = K^{(m-1)/(m-p)}`.

use num_traits::Float;

use super::grid::RadialField;
use super::solver::{Evolution, Snapshot};
use crate::error::Result;
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyScaling {
    pub lambda: f64,
    /// `lambda^{1/(m-1)} = K^{1/(m-p)}`.
    pub amplitude: f64,
    pub original: Params,
    pub unit: Params,
}

impl HardyScaling {
    pub fn new(params: &Params) -> Result<Self> {
        let (m, p, k) = (params.m(), params.p(), params.k_hardy());
        let lambda = k.powf((m - 1.0) / (m - p));
        let amplitude = if k == 1.0 { 1.0 } else { k.powf(1.0 / (m - p)) };
        Ok(Self { lambda, amplitude, original: *params, unit: params.with_k_hardy(1.0)? })
    }

    /// `u` at time `t` to `v` at time `lambda t`.
    pub fn apply(&self, u: &RadialField) -> Result<RadialField> {
        RadialField::new(
            u.grid.clone(),
            u.u.iter().map(|x| x / self.amplitude).collect(),
            u.t * self.lambda,
            self.unit,
            u.eps,
        )
    }

    /// `v` at time `s` to `u` at time `s / lambda`.
    pub fn undo(&self, v: &RadialField) -> Result<RadialField> {
        RadialField::new(
            v.grid.clone(),
            v.u.iter().map(|x| x * self.amplitude).collect(),
            v.t / self.lambda,
            self.original,
            v.eps,
        )
    }

    /// Maps a whole evolution of `v` back to `u`.
    pub fn undo_evolution(&self, ev: &Evolution) -> Evolution {
        Evolution {
            grid: ev.grid.clone(),
            params: self.original,
            eps: ev.eps,
            snapshots: ev
                .snapshots
                .iter()
                .map(|s| Snapshot {
                    t: s.t / self.lambda,
                    u: s.u.iter().map(|x| x * self.amplitude).collect(),
                })
                .collect(),
            dts: ev.dts.iter().map(|d| d / self.lambda).collect(),
            snapshot_steps: ev.snapshot_steps.clone(),
            min_cfl_slack: ev.min_cfl_slack,
        }
    }
}

/// The scaling for `u0.params` and the unit-constant data `v0 = K^{-1/(m-p)} u0`.
pub fn rescale_hardy(u0: &RadialField) -> Result<(HardyScaling, RadialField)> {
    let s = HardyScaling::new(&u0.params)?;
    let v0 = s.apply(u0)?;
    Ok((s, v0))
}
