use alloc::vec::Vec;

use num_traits::Float;

use crate::params::Params;

use super::{chart_rhs_q1_coords, chart_rhs_q23, phase_rhs_coords};

/// Names of the critical points, finite and at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Label {
    P0,
    P1,
    /// `(0, 0, γ)`.
    PGamma(f64),
    /// `(0, -1/2, γ)`, a critical line when `p = 1`.
    P1Gamma(f64),
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
}

impl core::fmt::Display for Label {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Label::P0 => write!(f, "P0"),
            Label::P1 => write!(f, "P1"),
            Label::PGamma(g) => write!(f, "P^gamma({g})"),
            Label::P1Gamma(g) => write!(f, "P1^gamma({g})"),
            Label::Q1 => write!(f, "Q1"),
            Label::Q2 => write!(f, "Q2"),
            Label::Q3 => write!(f, "Q3"),
            Label::Q4 => write!(f, "Q4"),
            Label::Q5 => write!(f, "Q5"),
        }
    }
}

/// Coordinate system in which a critical point is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    /// `(X, Y, Z)`.
    Finite,
    /// `(y, z, w)` around `Q1` and `Q5`.
    ChartQ1,
    /// `(x, z, w)` with the given flow sign (`-1` for `Q2`, `+1` for `Q3`).
    ChartQ23(f64),
    /// Only on the equator of the Poincaré hypersphere.
    Equator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub label: Label,
    pub location: Location,
    pub coords: [f64; 3],
    /// `(X̄, Ȳ, Z̄)` on the equator for points at infinity.
    pub equator: Option<[f64; 3]>,
    pub gamma: Option<f64>,
}

impl CriticalPoint {
    /// Norm of the vector field at the point in its own coordinates; for
    /// equator-only points the residual of the equator system.
    pub fn residual(&self, params: &Params) -> f64 {
        let v = match self.location {
            Location::Finite => phase_rhs_coords(params, &self.coords),
            Location::ChartQ1 => chart_rhs_q1_coords(params, &self.coords),
            Location::ChartQ23(sign) => chart_rhs_q23(params, &self.coords, sign),
            Location::Equator => return equator_residual(params, &self.equator.unwrap_or(self.coords)),
        };
        v.iter().fold(0.0, |a, x| a.max(x.abs()))
    }
}

/// Residual of the system whose solutions on the unit sphere are the
/// critical points at infinity.
pub fn equator_residual(params: &Params, e: &[f64; 3]) -> f64 {
    let (m, p, n) = (params.m(), params.p(), params.nf());
    let [x, y, z] = *e;
    let r = [
        x * (x * z + (n - 2.0) * x * y + m * y * y),
        (p - m) * x * y * z,
        z * (p * y * y + (n - 2.0) * x * y + x * z),
    ];
    let sphere = (x * x + y * y + z * z - 1.0).abs();
    r.iter().fold(sphere, |a, v| a.max(v.abs()))
}

/// Enumerates the critical points. `gammas` samples the half-lines `P^γ`
/// and, for `p = 1`, `P1^γ`.
pub fn critical_points(params: &Params, gammas: &[f64]) -> Vec<CriticalPoint> {
    let mut out = Vec::new();
    let finite = |label, coords, gamma| CriticalPoint {
        label,
        location: Location::Finite,
        coords,
        equator: None,
        gamma,
    };
    out.push(finite(Label::P0, [0.0, 0.0, 0.0], None));
    out.push(finite(Label::P1, [0.0, -0.5, 0.0], None));
    for &g in gammas.iter().filter(|g| **g > 0.0) {
        out.push(finite(Label::PGamma(g), [0.0, 0.0, g], Some(g)));
    }
    if params.is_linear_reaction() {
        for &g in gammas.iter().filter(|g| **g > 0.0) {
            out.push(finite(Label::P1Gamma(g), [0.0, -0.5, g], Some(g)));
        }
    }
    let (m, n) = (params.m(), params.nf());
    let rho = ((n - 2.0) * (n - 2.0) + m * m).sqrt();
    out.push(CriticalPoint {
        label: Label::Q1,
        location: Location::ChartQ1,
        coords: [0.0, 0.0, 0.0],
        equator: Some([1.0, 0.0, 0.0]),
        gamma: None,
    });
    out.push(CriticalPoint {
        label: Label::Q2,
        location: Location::ChartQ23(-1.0),
        coords: [0.0, 0.0, 0.0],
        equator: Some([0.0, 1.0, 0.0]),
        gamma: None,
    });
    out.push(CriticalPoint {
        label: Label::Q3,
        location: Location::ChartQ23(1.0),
        coords: [0.0, 0.0, 0.0],
        equator: Some([0.0, -1.0, 0.0]),
        gamma: None,
    });
    out.push(CriticalPoint {
        label: Label::Q4,
        location: Location::Equator,
        coords: [0.0, 0.0, 1.0],
        equator: Some([0.0, 0.0, 1.0]),
        gamma: None,
    });
    out.push(CriticalPoint {
        label: Label::Q5,
        location: Location::ChartQ1,
        coords: [-(n - 2.0) / m, 0.0, 0.0],
        equator: Some([m / rho, -(n - 2.0) / rho, 0.0]),
        gamma: None,
    });
    out
}
