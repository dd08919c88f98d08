//! The self-similar solution as a time-shifted supersolution.

use alloc::vec::Vec;

use num_traits::Float;

use super::grid::RadialField;
use super::solver::Evolution;
use crate::error::{Error, Result};
use crate::profile::SelfSimilarProfile;

/// `U(r, t + tau) = f(r (t + tau)^{-1/2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct FriendlyGiant {
    pub profile: SelfSimilarProfile,
    pub tau: f64,
}

impl FriendlyGiant {
    pub fn new(profile: SelfSimilarProfile, tau: f64) -> Result<Self> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::InvalidInput("tau must be finite and nonnegative"));
        }
        Ok(Self { profile, tau })
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.profile.clone(), tau)
    }

    /// Value at radius `r > 0` and time `t` (shifted by `tau`).
    pub fn eval(&self, r: f64, t: f64) -> f64 {
        let s = t + self.tau;
        if !(s > 0.0) {
            return if r > 0.0 { 0.0 } else { f64::INFINITY };
        }
        self.profile.eval(r / s.sqrt())
    }

    /// Radius of the support at time `t`, if finite.
    pub fn support_radius(&self, t: f64) -> Option<f64> {
        self.profile.edge.finite().map(|x0| x0 * (t + self.tau).max(0.0).sqrt())
    }

    /// Cell-center samples at time `t` on the grid of `field`.
    pub fn sample(&self, field: &RadialField, t: f64) -> Vec<f64> {
        field.grid.r.iter().map(|r| self.eval(*r, t)).collect()
    }
}

/// `U(r, t + tau)` for a giant.
pub fn giant_eval(giant: &FriendlyGiant, r: f64, t: f64) -> f64 {
    giant.eval(r, t)
}

/// Relative safety margin applied by [`find_tau`].
pub const TAU_MARGIN: f64 = 0.05;

/// A shift `tau` with `u0 <= U(., tau)` on the grid.
///
/// `R0` is the largest profile sample with `f(R0) > max u0` and
/// `tau = (R / R0)^2 (1 + margin)`, `R` the support radius of `u0`. The
/// domination is then checked cell by cell; if the check fails `tau` is
/// doubled until it passes.
pub fn find_tau(profile: &SelfSimilarProfile, u0: &RadialField) -> Result<f64> {
    find_tau_with_margin(profile, u0, TAU_MARGIN)
}

pub fn find_tau_with_margin(profile: &SelfSimilarProfile, u0: &RadialField, margin: f64) -> Result<f64> {
    let max_u0 = u0.max();
    if max_u0 == 0.0 {
        return Ok(margin);
    }
    let f_max = profile.f_max();
    let Some(j) = profile.f.iter().rposition(|v| *v > max_u0) else {
        return Err(Error::NoDominatingRadius { max_u0, f_max });
    };
    let r0 = profile.xi[j];
    let big = u0.support_radius();
    let mut tau = (big / r0).powi(2) * (1.0 + margin);
    let giant = FriendlyGiant::new(profile.clone(), tau)?;
    let mut giant = giant;
    for _ in 0..60 {
        if dominates(&giant, u0) {
            return Ok(tau);
        }
        tau *= 2.0;
        giant.tau = tau;
    }
    Err(Error::NoDominatingRadius { max_u0, f_max })
}

fn dominates(giant: &FriendlyGiant, field: &RadialField) -> bool {
    field.grid.r.iter().zip(&field.u).all(|(r, v)| *v <= giant.eval(*r, field.t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundViolation {
    pub t: f64,
    pub r: f64,
    pub u: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupersolutionReport {
    pub tau: f64,
    pub tol_ord: f64,
    pub snapshots: usize,
    pub violations: Vec<BoundViolation>,
    /// Smallest `U - u` over the positivity set of `u`.
    pub min_margin: f64,
    /// Largest `u / U` over the positivity set of `u`.
    pub max_ratio: f64,
}

impl SupersolutionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `u(r, t) <= U(r, t + tau) (1 + tol_ord)` at every cell and snapshot.
pub fn check_supersolution_bound(
    evolution: &Evolution,
    giant: &FriendlyGiant,
    tol_ord: f64,
) -> SupersolutionReport {
    let mut report = SupersolutionReport {
        tau: giant.tau,
        tol_ord,
        snapshots: evolution.snapshots.len(),
        violations: Vec::new(),
        min_margin: f64::INFINITY,
        max_ratio: 0.0,
    };
    for s in &evolution.snapshots {
        for (r, u) in evolution.grid.r.iter().zip(&s.u) {
            if *u <= 0.0 {
                continue;
            }
            let bound = giant.eval(*r, s.t);
            report.min_margin = report.min_margin.min(bound - u);
            report.max_ratio = report.max_ratio.max(u / bound);
            if *u > bound * (1.0 + tol_ord) {
                report.violations.push(BoundViolation { t: s.t, r: *r, u: *u, bound });
            }
        }
    }
    report
}
