//! Changes of variables between profile space, the phase space `(X, Y, Z)`
//! and the chart at infinity `(y, z, w)` in which `Q1` and `Q5` are finite.
//!
//! ```text
//!     X = m xi^{-2} f^{m-1},   Y = (m / xi) f^{m-2} f',   Z = xi^{-2} f^{p-1}
//!     y = Y / X,               z = Z / X,                 w = 1 / X
//! ```
//!
//! The independent variable of the phase system is `eta` with
//! `d eta / d xi = xi f^{1-m} / m`; in the chart the time is `ln xi`.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::Params;

/// Point of the phase space together with its autonomous time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub eta: f64,
}

impl PhaseState {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z, eta: 0.0 }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Point of the chart at infinity around `Q1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChartState {
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl ChartState {
    pub fn new(y: f64, z: f64, w: f64) -> Self {
        Self { y, z, w }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.y, self.z, self.w]
    }
}

/// Maps `(xi, f, f')` to the phase space.
pub fn profile_to_phase(params: &Params, xi: f64, f: f64, fprime: f64) -> Result<PhaseState> {
    if !(xi > 0.0) {
        return Err(Error::Domain("profile_to_phase needs xi > 0"));
    }
    if !(f > 0.0) {
        return Err(Error::Domain("profile_to_phase needs f > 0"));
    }
    let m = params.m();
    let x = m * f.powf(m - 1.0) / (xi * xi);
    let y = m * f.powf(m - 2.0) * fprime / xi;
    let z = f.powf(params.p() - 1.0) / (xi * xi);
    Ok(PhaseState::new(x, y, z))
}

/// Recovers `(f, f')` at a known `xi` from a phase point with `X > 0`.
pub fn phase_to_profile(params: &Params, xi: f64, state: &PhaseState) -> Result<(f64, f64)> {
    if !(xi > 0.0) {
        return Err(Error::Domain("phase_to_profile needs xi > 0"));
    }
    if !(state.x > 0.0) {
        return Err(Error::Domain("phase_to_profile needs X > 0"));
    }
    let m = params.m();
    let f = (state.x * xi * xi / m).powf(1.0 / (m - 1.0));
    let fprime = state.y * xi * f.powf(2.0 - m) / m;
    Ok((f, fprime))
}

/// `(X, Y, Z) -> (Y/X, Z/X, 1/X)`.
pub fn phase_to_chart(state: &PhaseState) -> Result<ChartState> {
    if !(state.x > 0.0) {
        return Err(Error::Domain("phase_to_chart needs X > 0"));
    }
    let w = 1.0 / state.x;
    Ok(ChartState::new(state.y * w, state.z * w, w))
}

/// Inverse of [`phase_to_chart`]; needs `w > 0`.
pub fn chart_to_phase(chart: &ChartState) -> Result<PhaseState> {
    if !(chart.w > 0.0) {
        return Err(Error::Domain("chart_to_phase needs w > 0"));
    }
    let x = 1.0 / chart.w;
    Ok(PhaseState::new(x, chart.y * x, chart.z * x))
}

/// Chart coordinates of the profile point `(xi, f, f')`, computed without
/// forming `X` so that they stay finite for arbitrarily small `xi`:
/// `y = xi f'/f`, `z = f^{p-m}/m`, `w = xi^2 f^{1-m}/m`.
pub fn profile_to_chart(params: &Params, ln_xi: f64, f: f64, fprime_xi: f64) -> Result<ChartState> {
    if !(f > 0.0) {
        return Err(Error::Domain("profile_to_chart needs f > 0"));
    }
    let m = params.m();
    let y = fprime_xi / f;
    let z = f.powf(params.p() - m) / m;
    let w = (2.0 * ln_xi + (1.0 - m) * f.ln()).exp() / m;
    Ok(ChartState::new(y, z, w))
}
