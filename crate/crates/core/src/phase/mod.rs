//! The quadratic autonomous system satisfied by profiles in the variables
//! `(X, Y, Z)`, together with the two charts at infinity.

mod critical;
mod integrate;
mod linearize;
mod manifold;

pub use critical::{critical_points, equator_residual, CriticalPoint, Label, Location};
pub use integrate::{integrate_phase, PhaseRun, PhaseSystem, Termination, PROXIMITY_RADIUS, PROXIMITY_STEPS};
pub use linearize::{linearize, numeric_jacobian, Linearization};
pub use manifold::{
    center_manifold_p0, center_manifold_q1, p0_tangency_residual, q1_tangency_residual, trajec_w,
    P0Manifold, Q1Manifold, TrajecW,
};

use crate::params::Params;
use crate::transform::{ChartState, PhaseState};

/// Right-hand side in the finite phase space:
///
/// ```text
///     X' = X [(m-1) Y - 2X]
///     Y' = -Y^2 - Y/2 - N X Y - X Z
///     Z' = Z [(p-1) Y - 2X]
/// ```
pub fn phase_rhs(params: &Params, state: &PhaseState) -> [f64; 3] {
    phase_rhs_coords(params, &state.coords())
}

pub(crate) fn phase_rhs_coords(params: &Params, s: &[f64; 3]) -> [f64; 3] {
    let (m, p, n) = (params.m(), params.p(), params.nf());
    let [x, y, z] = *s;
    [
        x * ((m - 1.0) * y - 2.0 * x),
        -y * y - 0.5 * y - n * x * y - x * z,
        z * ((p - 1.0) * y - 2.0 * x),
    ]
}

/// Right-hand side in the chart `y = Y/X, z = Z/X, w = 1/X`; its time
/// variable is `ln xi`.
pub fn chart_rhs_q1(params: &Params, state: &ChartState) -> [f64; 3] {
    chart_rhs_q1_coords(params, &state.coords())
}

pub(crate) fn chart_rhs_q1_coords(params: &Params, s: &[f64; 3]) -> [f64; 3] {
    let (m, p, n) = (params.m(), params.p(), params.nf());
    let [y, z, w] = *s;
    [
        -(n - 2.0) * y - z - m * y * y - 0.5 * y * w,
        -(m - p) * y * z,
        2.0 * w - (m - 1.0) * y * w,
    ]
}

/// Right-hand side in the chart `x = X/Y, z = Z/Y, w = 1/Y` around `Q2`
/// (`sign = -1`) or `Q3` (`sign = +1`).
pub fn chart_rhs_q23(params: &Params, state: &[f64; 3], sign: f64) -> [f64; 3] {
    let (m, p, n) = (params.m(), params.p(), params.nf());
    let [x, z, w] = *state;
    [
        sign * (-m * x - (n - 2.0) * x * x - 0.5 * x * w - x * x * z),
        sign * (-p * z - 0.5 * z * w - (n - 2.0) * x * z - x * z * z),
        sign * (-w - 0.5 * w * w - n * x * w - x * z * w),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{phase_to_chart, profile_to_phase};

    fn p213() -> Params {
        Params::unit(2.0, 1.0, 3).unwrap()
    }

    #[test]
    fn phase_rhs_examples() {
        let par = p213();
        assert_eq!(phase_rhs(&par, &PhaseState::new(0.0, 0.0, 0.0)), [0.0, 0.0, 0.0]);
        assert_eq!(phase_rhs(&par, &PhaseState::new(0.0, -0.5, 0.0)), [0.0, 0.0, 0.0]);
        assert_eq!(phase_rhs(&par, &PhaseState::new(1.0, 0.0, 1.0)), [-2.0, -1.0, -2.0]);
    }

    #[test]
    fn chart_q1_examples() {
        let par = p213();
        assert_eq!(chart_rhs_q1(&par, &ChartState::new(0.0, 0.0, 0.0)), [0.0, 0.0, 0.0]);
        let q5 = chart_rhs_q1(&par, &ChartState::new(-0.5, 0.0, 0.0));
        assert!(q5.iter().all(|v| v.abs() < 1e-15));
        assert_eq!(chart_rhs_q1(&par, &ChartState::new(0.0, 1.0, 0.0)), [-1.0, 0.0, 0.0]);
    }

    #[test]
    fn chart_q23_examples() {
        let par = p213();
        assert_eq!(chart_rhs_q23(&par, &[0.0; 3], 1.0), [0.0; 3]);
        assert_eq!(chart_rhs_q23(&par, &[0.0; 3], -1.0), [0.0; 3]);
        assert_eq!(chart_rhs_q23(&par, &[1.0, 0.0, 0.0], 1.0), [-3.0, 0.0, 0.0]);
        let s = [0.3, 0.7, 1.1];
        let a = chart_rhs_q23(&par, &s, 1.0);
        let b = chart_rhs_q23(&par, &s, -1.0);
        for i in 0..3 {
            assert_eq!(a[i], -b[i]);
        }
    }

    #[test]
    fn flow_on_y_zero_plane_points_down() {
        let par = Params::unit(2.5, 1.3, 4).unwrap();
        for &(x, z) in &[(0.1, 0.2), (3.0, 0.01), (1e-3, 5.0)] {
            assert!(phase_rhs(&par, &PhaseState::new(x, 0.0, z))[1] < 0.0);
        }
    }

    /// The chart system is the phase system seen through `(Y/X, Z/X, 1/X)`
    /// with time rescaled by `X`.
    #[test]
    fn chart_q1_is_conjugate_to_phase_system() {
        let par = Params::unit(3.0, 2.0, 4).unwrap();
        let s = profile_to_phase(&par, 0.4, 1.3, -0.7).unwrap();
        let c = phase_to_chart(&s).unwrap();
        let v = phase_rhs(&par, &s);
        let (x, y, z) = (s.x, s.y, s.z);
        let dy = (v[1] * x - y * v[0]) / (x * x) / x;
        let dz = (v[2] * x - z * v[0]) / (x * x) / x;
        let dw = -v[0] / (x * x) / x;
        let cv = chart_rhs_q1(&par, &c);
        for (a, b) in [dy, dz, dw].iter().zip(cv) {
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }
}
