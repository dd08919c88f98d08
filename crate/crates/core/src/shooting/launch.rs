//! Starting data near the origin.
//!
//! With `phi = f^{m-p}` and `s = ln xi` the profile equation becomes, up to
//! terms of size `xi^2 f^{1-m}`,
//!
//! ```text
//!     phi'' = -(N-2) phi' - (m-p)/m - B phi'^2 / phi,    B = p/(m-p),
//! ```
//!
//! whose admissible solutions lie on the invariant curve
//! `phi' = G(phi) = sum a_n phi^{-n}`, `a_0 = -(m-p)/(m(N-2))`. Integrating
//! `ds = dphi / G(phi)` gives
//!
//! ```text
//!     K = phi - A ln phi + c s + c sum_{n>=2} d_n / ((n-1) phi^{n-1})
//! ```
//!
//! with `c = -a_0`, `A = p/(m(N-2)^2)` and `1/G = sum d_n phi^{-n}`. This `K`
//! is constant along each orbit leaving `Q1` and labels the one-parameter
//! family of profiles; at leading order it is the constant in
//! `f^{m-p} ~ K - c ln xi`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::transform::ChartState;

/// Number of series terms kept.
const TERMS: usize = 24;
/// Size of the last kept terms at the smallest admissible `phi`.
const SERIES_TOL: f64 = 1e-17;

/// Leading-order origin behavior `f = [K - c ln xi]^{1/(m-p)}` and its
/// derivative.
pub fn q1_launch(params: &Params, k: f64, xi_start: f64) -> Result<(f64, f64)> {
    if !(xi_start > 0.0) {
        return Err(Error::Domain("xi_start must be positive"));
    }
    let (m, p, n) = (params.m(), params.p(), params.nf());
    let bracket = k - params.log_slope() * xi_start.ln();
    if !(bracket > 0.0) {
        return Err(Error::BracketNotPositive { xi: xi_start, value: bracket });
    }
    let f = bracket.powf(1.0 / (m - p));
    let fp = -f.powf(1.0 + p - m) / (m * (n - 2.0) * xi_start);
    Ok((f, fp))
}

/// Coefficients of the invariant curve and of the orbit label.
#[derive(Debug, Clone, PartialEq)]
pub struct LaunchSeries {
    m: f64,
    p: f64,
    c: f64,
    big_a: f64,
    a: Vec<f64>,
    d: Vec<f64>,
    phi_min: f64,
}

impl LaunchSeries {
    pub fn new(params: &Params) -> Self {
        let (m, p, n) = (params.m(), params.p(), params.nf());
        let c = params.log_slope();
        let b = p / (m - p);
        let k = n - 2.0;
        let mut a = Vec::with_capacity(TERMS + 1);
        a.push(-c);
        for j in 1..=TERMS {
            let s1: f64 = (1..j).map(|i| i as f64 * a[i] * a[j - 1 - i]).sum();
            let s2: f64 = (0..j).map(|i| a[i] * a[j - 1 - i]).sum();
            a.push((s1 - b * s2) / k);
        }
        let mut d = Vec::with_capacity(TERMS + 1);
        d.push(1.0 / a[0]);
        for j in 1..=TERMS {
            let s: f64 = (1..=j).map(|i| a[i] * d[j - i]).sum();
            d.push(-s / a[0]);
        }
        let mut series = Self { m, p, c, big_a: p / (m * k * k), a, d, phi_min: 1.0 };
        series.phi_min = series.find_phi_min();
        series
    }

    /// Smallest `phi` at which the truncated series are accurate to
    /// roughly machine precision.
    fn find_phi_min(&self) -> f64 {
        let tail = |phi: f64| {
            (TERMS - 4..=TERMS)
                .map(|j| (self.a[j].abs() + self.c * self.d[j].abs()) / phi.powi(j as i32 - 1))
                .fold(0.0, f64::max)
        };
        let mut phi = 1.0;
        while tail(phi) > SERIES_TOL || self.big_a / phi > 0.5 {
            phi *= 1.05;
        }
        phi
    }

    pub fn phi_min(&self) -> f64 {
        self.phi_min
    }

    pub fn log_slope(&self) -> f64 {
        self.c
    }

    /// `A = p/(m(N-2)^2)`, the coefficient of `ln phi` in the label.
    pub fn log_correction(&self) -> f64 {
        self.big_a
    }

    /// `dphi/ds` on the invariant curve.
    pub fn slope(&self, phi: f64) -> f64 {
        let inv = 1.0 / phi;
        self.a.iter().rev().fold(0.0, |acc, a| acc * inv + a)
    }

    /// Sum of the `d_n` tail in the label, without the factor `c`.
    fn tail(&self, phi: f64) -> (f64, f64) {
        let mut sum = 0.0;
        let mut dsum = 0.0;
        for j in 2..=TERMS {
            let pw = phi.powi(j as i32 - 1);
            sum += self.d[j] / ((j as f64 - 1.0) * pw);
            dsum -= self.d[j] / (pw * phi);
        }
        (sum, dsum)
    }

    /// Orbit label of the point `phi` at `s = ln xi` on the invariant curve.
    pub fn label(&self, phi: f64, s: f64) -> f64 {
        phi - self.big_a * phi.ln() + self.c * s + self.c * self.tail(phi).0
    }

    /// Part of the label that depends on `phi`.
    fn label_phi(&self, phi: f64) -> (f64, f64) {
        let (t, dt) = self.tail(phi);
        (phi - self.big_a * phi.ln() + self.c * t, 1.0 - self.big_a / phi + self.c * dt)
    }

    /// `s = ln xi` at which the orbit labelled `k` has the value `phi`.
    pub fn s_at(&self, k: f64, phi: f64) -> f64 {
        (k - self.label_phi(phi).0) / self.c
    }

    /// Solves `label(phi, s) = k` for `phi >= phi_min`; `None` if the orbit
    /// is below `phi_min` at `s`.
    pub fn phi_at(&self, k: f64, s: f64) -> Option<f64> {
        let target = k - self.c * s;
        if self.label_phi(self.phi_min).0 > target {
            return None;
        }
        let mut phi = (target + self.big_a * target.max(1.0).ln()).max(self.phi_min);
        for _ in 0..100 {
            let (g, dg) = self.label_phi(phi);
            let step = (g - target) / dg;
            phi = (phi - step).max(self.phi_min);
            if step.abs() <= 4.0 * f64::EPSILON * phi {
                break;
            }
        }
        Some(phi)
    }

    /// Chart coordinates `(y, z, w)` of the point `phi` at `s`.
    pub fn chart_state(&self, phi: f64, s: f64) -> ChartState {
        let (m, p) = (self.m, self.p);
        let y = self.slope(phi) / ((m - p) * phi);
        let z = 1.0 / (m * phi);
        ChartState::new(y, z, chart_w(m, p, s, z))
    }
}

/// `w = xi^2 f^{1-m} / m` expressed through `s = ln xi` and `z = f^{p-m}/m`.
pub(crate) fn chart_w(m: f64, p: f64, s: f64, z: f64) -> f64 {
    (2.0 * s + (m - 1.0) / (m - p) * (m * z).ln() - m.ln()).exp()
}

/// Where and how the orbit labelled `k` is started.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Launch {
    pub k: f64,
    /// `ln xi` of the starting point.
    pub s: f64,
    pub phi: f64,
    pub state: ChartState,
}

/// Starts the orbit labelled `k` at `xi_start`, or further in if the series
/// is not yet accurate there.
pub fn refined_launch(series: &LaunchSeries, k: f64, xi_start: f64) -> Result<Launch> {
    if !(xi_start > 0.0) {
        return Err(Error::Domain("xi_start must be positive"));
    }
    let s0 = xi_start.ln();
    let (s, phi) = match series.phi_at(k, s0) {
        Some(phi) => (s0, phi),
        None => (series.s_at(k, series.phi_min), series.phi_min),
    };
    // Below this the profile grid itself would underflow.
    if s < f64::MIN_POSITIVE.ln() + 10.0 {
        return Err(Error::BracketNotPositive {
            xi: xi_start,
            value: k - series.c * s0,
        });
    }
    Ok(Launch { k, s, phi, state: series.chart_state(phi, s) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::chart_rhs_q1;
    use proptest::prelude::*;

    #[test]
    fn leading_order_examples() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        let (f, fp) = q1_launch(&par, 0.0, 1e-6).unwrap();
        assert!((f - 6.907755278982137).abs() < 1e-12);
        assert!(fp < 0.0);
        let (f2, _) = q1_launch(&par, 0.1, 1e-6).unwrap();
        assert!(f2 > f);
        assert!(matches!(q1_launch(&par, -10.0, 1e-6), Err(Error::BracketNotPositive { .. })));
    }

    #[test]
    fn leading_order_derivative_matches_finite_difference() {
        let par = Params::unit(3.0, 1.7, 4).unwrap();
        let xi = 1e-4;
        let h = xi * 1e-5;
        let (_, fp) = q1_launch(&par, 0.3, xi).unwrap();
        let fd = (q1_launch(&par, 0.3, xi + h).unwrap().0 - q1_launch(&par, 0.3, xi - h).unwrap().0) / (2.0 * h);
        assert!((fp - fd).abs() < 1e-7 * fd.abs());
    }

    #[test]
    fn first_coefficients() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        let s = LaunchSeries::new(&par);
        assert_eq!(&s.a[..4], &[-0.5, -0.25, -0.125, 0.0]);
        assert_eq!(&s.d[..3], &[-2.0, 1.0, 0.0]);
        assert_eq!(s.log_correction(), 0.5);
    }

    /// The invariant curve satisfies `G G' = -(N-2) G - (m-p)/m - B G^2/phi`.
    #[test]
    fn invariant_curve_residual() {
        for (m, p, n) in [(2.0, 1.0, 3), (3.0, 2.0, 4), (2.0, 1.5, 3), (2.0, 1.0, 5)] {
            let par = Params::unit(m, p, n).unwrap();
            let s = LaunchSeries::new(&par);
            let phi = s.phi_min() * 1.5;
            let h = 1e-5 * phi;
            let g = s.slope(phi);
            let dg = (s.slope(phi + h) - s.slope(phi - h)) / (2.0 * h);
            let b = p / (m - p);
            let r = g * dg + (n as f64 - 2.0) * g + (m - p) / m + b * g * g / phi;
            assert!(r.abs() < 1e-9, "{m} {p} {n}: {r}");
        }
    }

    /// Along the invariant curve `dK/ds = 0`.
    #[test]
    fn label_is_conserved() {
        let par = Params::unit(2.0, 1.5, 3).unwrap();
        let s = LaunchSeries::new(&par);
        let phi = 2.0 * s.phi_min();
        let g = s.slope(phi);
        let h = 1e-4;
        let k1 = s.label(phi + g * h, h);
        let k0 = s.label(phi - g * h, -h);
        assert!(((k1 - k0) / (2.0 * h)).abs() < 1e-7);
    }

    #[test]
    fn phi_at_inverts_label() {
        let par = Params::unit(3.0, 2.0, 4).unwrap();
        let s = LaunchSeries::new(&par);
        let phi = s.phi_at(0.4, (1e-6f64).ln()).unwrap();
        assert!((s.label(phi, (1e-6f64).ln()) - 0.4).abs() < 1e-13);
        assert!(s.phi_at(-50.0, (1e-6f64).ln()).is_none());
    }

    #[test]
    fn launch_goes_deeper_when_needed() {
        let par = Params::unit(1.5, 1.4, 3).unwrap();
        let s = LaunchSeries::new(&par);
        let l = refined_launch(&s, 0.0, 1e-6).unwrap();
        assert!(l.s < (1e-6f64).ln());
        assert_eq!(l.phi, s.phi_min());
        assert!((s.label(l.phi, l.s)).abs() < 1e-12);
    }

    /// The launch point sits on a slow invariant curve of the chart system:
    /// the `y` equation is balanced to the size of the neglected `w` term.
    #[test]
    fn launch_is_slow() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        let s = LaunchSeries::new(&par);
        let l = refined_launch(&s, 0.8, 1e-6).unwrap();
        let v = chart_rhs_q1(&par, &l.state);
        let dphi = s.slope(l.phi);
        // y = phi'/((m-p) phi) so y' follows from phi'' = G'(phi) G(phi).
        let h = 1e-6 * l.phi;
        let gp = (s.slope(l.phi + h) - s.slope(l.phi - h)) / (2.0 * h);
        let dy = (gp * dphi * l.phi - dphi * dphi) / (l.phi * l.phi);
        assert!((v[0] - dy).abs() < 1e-9, "{} {}", v[0], dy);
        assert!(l.state.w < 1e-12);
    }

    proptest! {
        #[test]
        fn label_increasing_in_phi(m in 1.5f64..4.0, pf in 0.0f64..0.9, n in 3u32..7, t in 0.0f64..5.0) {
            let p = 1.0 + pf * (m - 1.0);
            let par = Params::unit(m, p, n).unwrap();
            let s = LaunchSeries::new(&par);
            let phi = s.phi_min() * (1.0 + t);
            prop_assert!(s.label(phi * 1.001, 0.0) > s.label(phi, 0.0));
        }
    }
}
