//! Quadratic center-manifold approximations at `P0` and `Q1` and the
//! family of curves along which orbits leave `Q1`.

use num_traits::Float;

use crate::params::Params;

use super::{chart_rhs_q1_coords, phase_rhs_coords};

/// `Y = a X² + b XZ + c Z²` near `P0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P0Manifold {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl P0Manifold {
    pub fn eval(&self, x: f64, z: f64) -> f64 {
        self.a * x * x + self.b * x * z + self.c * z * z
    }
}

/// `(N-2) y + z = a z² + w_coeff · w` near `Q1` and the reduced flow
/// `z' = reduced_coeff · z²` on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q1Manifold {
    pub a: f64,
    pub w_coeff: f64,
    pub reduced_coeff: f64,
}

impl Q1Manifold {
    /// `y` on the manifold inside `{w = 0}`.
    pub fn y_of(&self, params: &Params, z: f64) -> f64 {
        (self.a * z * z - z) / (params.nf() - 2.0)
    }
}

/// The stable eigenvalue at `P0` is `-1/2` and the only quadratic term of
/// `Y'` that survives on `Y = 0` is `-XZ`, so `h = -XZ / (1/2)`.
pub fn center_manifold_p0(params: &Params) -> P0Manifold {
    let lambda = -0.5;
    // Quadratic part of Y' restricted to Y = 0, by polarization.
    let q = |x: f64, z: f64| phase_rhs_coords(params, &[x, 0.0, z])[1];
    let a = q(1.0, 0.0);
    let c = q(0.0, 1.0);
    let b = q(1.0, 1.0) - a - c;
    P0Manifold { a: -a / lambda, b: -b / lambda, c: -c / lambda }
}

pub fn center_manifold_q1(params: &Params) -> Q1Manifold {
    let (m, p, n) = (params.m(), params.p(), params.nf());
    let k = n - 2.0;
    // Along the center direction y = -z/(N-2); the quadratic part of
    // d/dt[(N-2) y + z] there, divided by the stable rate N-2.
    let y0 = -1.0 / k;
    let q2 = -k * m * y0 * y0 - (m - p) * y0;
    Q1Manifold { a: q2 / k, w_coeff: 0.0, reduced_coeff: -(m - p) * y0 }
}

/// Component of the vector field normal to the approximate manifold at
/// `(X, h(X, Z), Z)`.
pub fn p0_tangency_residual(params: &Params, x: f64, z: f64) -> f64 {
    let h = center_manifold_p0(params);
    let y = h.eval(x, z);
    let v = phase_rhs_coords(params, &[x, y, z]);
    let hx = 2.0 * h.a * x + h.b * z;
    let hz = h.b * x + 2.0 * h.c * z;
    v[1] - hx * v[0] - hz * v[2]
}

/// Same for the manifold at `Q1` inside `{w = 0}`.
pub fn q1_tangency_residual(params: &Params, z: f64) -> f64 {
    let man = center_manifold_q1(params);
    let k = params.nf() - 2.0;
    let y = man.y_of(params, z);
    let v = chart_rhs_q1_coords(params, &[y, z, 0.0]);
    k * v[0] + v[1] - 2.0 * man.a * z * v[1]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajecW {
    pub w: f64,
    /// The exact value is positive but below the smallest positive double.
    pub underflow: bool,
}

/// `w = C z^{(m-1)/(m-p)} exp(-2(N-2)/((m-p) z))`, evaluated in logarithms.
pub fn trajec_w(params: &Params, c: f64, z: f64) -> TrajecW {
    let (m, p, n) = (params.m(), params.p(), params.nf());
    let ln_w = c.ln() + (m - 1.0) / (m - p) * z.ln() - 2.0 * (n - 2.0) / ((m - p) * z);
    let w = ln_w.exp();
    TrajecW { w, underflow: w == 0.0 && c > 0.0 && z > 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn p0_coefficients() {
        for (m, p, n) in [(2.0, 1.0, 3), (3.0, 2.0, 4), (2.5, 1.7, 7)] {
            let par = Params::unit(m, p, n).unwrap();
            let h = center_manifold_p0(&par);
            assert_eq!((h.a, h.b, h.c), (0.0, -2.0, 0.0));
        }
    }

    #[test]
    fn q1_coefficients() {
        let a = |p, n| center_manifold_q1(&Params::unit(2.5, p, n).unwrap()).a;
        assert!((a(1.0, 3) + 1.0).abs() < 1e-15);
        assert!((a(2.0, 4) + 0.5).abs() < 1e-15);
        let par = Params::unit(3.0, 1.5, 5).unwrap();
        let man = center_manifold_q1(&par);
        assert!((man.reduced_coeff - 0.5).abs() < 1e-15);
        assert_eq!(man.w_coeff, 0.0);
    }

    /// Fitted order of the tangency residual along a ray.
    fn order(r: impl Fn(f64) -> f64) -> f64 {
        let (h1, h2) = (1e-2, 1e-4);
        (r(h1).abs().ln() - r(h2).abs().ln()) / (h1.ln() - h2.ln())
    }

    #[test]
    fn p0_residual_is_cubic() {
        let par = Params::unit(2.0, 1.5, 3).unwrap();
        let o = order(|h| p0_tangency_residual(&par, h, h));
        assert!(o > 2.9, "order {o}");
        let r = p0_tangency_residual(&par, 1e-3, 1e-3).abs();
        let cst = p0_tangency_residual(&par, 1e-2, 1e-2).abs() / 1e-6;
        assert!(r <= 1.1 * cst * 1e-9);
    }

    #[test]
    fn q1_residual_is_cubic() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        assert!(order(|h| q1_tangency_residual(&par, h)) > 2.9);
    }

    #[test]
    fn trajec_examples() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        let t = trajec_w(&par, 1.0, 1.0);
        assert!((t.w - (-2.0f64).exp()).abs() < 1e-15);
        assert!(!t.underflow);
        assert!(trajec_w(&par, 1.0, 1e-3).underflow);
        assert!(trajec_w(&par, 1.0, 1e-2).w < 1e-80);
    }

    proptest! {
        #[test]
        fn trajec_linear_in_c(c in 1e-3f64..1e3, z in 0.05f64..5.0) {
            let par = Params::unit(2.0, 1.0, 3).unwrap();
            let a = trajec_w(&par, c, z).w;
            let b = trajec_w(&par, 2.0 * c, z).w;
            prop_assert!((b - 2.0 * a).abs() <= 1e-14 * b);
        }

        #[test]
        fn trajec_increasing(c in 1e-3f64..1e3, z in 0.02f64..1.0, m in 1.2f64..4.0, pf in 0.0f64..0.95, n in 3u32..8) {
            let p = 1.0 + pf * (m - 1.0);
            let par = Params::unit(m, p, n).unwrap();
            let w = trajec_w(&par, c, z).w;
            prop_assume!(w > 0.0);
            prop_assert!(trajec_w(&par, c * 1.01, z).w > w);
            prop_assert!(trajec_w(&par, c, z * (1.0 + 1e-6)).w > w);
        }
    }
}
