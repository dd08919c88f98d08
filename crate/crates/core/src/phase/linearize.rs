use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, eigenvectors, CVec3, Mat3};
use crate::params::Params;

use super::critical::{CriticalPoint, Label, Location};
use super::{chart_rhs_q1_coords, chart_rhs_q23, phase_rhs_coords};

const FIXED_POINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    pub matrix: Mat3,
    pub eigenvalues: [Complex64; 3],
    pub eigenvectors: [CVec3; 3],
    pub stable_dim: usize,
    pub unstable_dim: usize,
    pub center_dim: usize,
    /// Whether `matrix` is one of the closed forms rather than a numerical
    /// Jacobian.
    pub analytic: bool,
}

impl Linearization {
    fn from_matrix(matrix: Mat3, analytic: bool) -> Self {
        let ev = eigenvalues(&matrix);
        let evec = eigenvectors(&matrix, &ev);
        let scale = matrix.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()));
        let tol = 1e-9 * scale;
        let stable_dim = ev.iter().filter(|l| l.re < -tol).count();
        let unstable_dim = ev.iter().filter(|l| l.re > tol).count();
        Self {
            matrix,
            eigenvalues: ev,
            eigenvectors: evec,
            stable_dim,
            unstable_dim,
            center_dim: 3 - stable_dim - unstable_dim,
            analytic,
        }
    }

    /// Real parts of the eigenvalues sorted ascending.
    pub fn sorted_real_eigenvalues(&self) -> [f64; 3] {
        let mut r = [self.eigenvalues[0].re, self.eigenvalues[1].re, self.eigenvalues[2].re];
        r.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        r
    }
}

/// Central-difference Jacobian with step `1e-6 max(1, |point|)`.
pub fn numeric_jacobian<F>(rhs: F, point: &[f64; 3]) -> Mat3
where
    F: Fn(&[f64; 3]) -> [f64; 3],
{
    let norm = point.iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = 1e-6 * norm.max(1.0);
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut plus = *point;
        let mut minus = *point;
        plus[j] += h;
        minus[j] -= h;
        let fp = rhs(&plus);
        let fm = rhs(&minus);
        for i in 0..3 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

fn analytic_matrix(params: &Params, label: &Label) -> Option<Mat3> {
    let (m, p, n) = (params.m(), params.p(), params.nf());
    match label {
        Label::P0 => Some([[0.0, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, 0.0]]),
        Label::P1 => Some([
            [-(m - 1.0) / 2.0, 0.0, 0.0],
            [n / 2.0, 0.5, 0.0],
            [0.0, 0.0, -(p - 1.0) / 2.0],
        ]),
        Label::Q1 => Some([[-(n - 2.0), -1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 2.0]]),
        Label::Q5 => Some([
            [n - 2.0, -1.0, (n - 2.0) / (2.0 * m)],
            [0.0, (m - p) * (n - 2.0) / m, 0.0],
            [0.0, 0.0, 2.0 + (m - 1.0) * (n - 2.0) / m],
        ]),
        _ => None,
    }
}

/// Linearization at a critical point: the closed-form matrix for `P0`,
/// `P1`, `Q1`, `Q5`, a numerical Jacobian in the point's own chart
/// otherwise.
pub fn linearize(params: &Params, point: &CriticalPoint) -> Result<Linearization> {
    let residual = point.residual(params);
    if !(residual <= FIXED_POINT_TOL) {
        return Err(Error::NotAFixedPoint { residual });
    }
    if let Some(mat) = analytic_matrix(params, &point.label) {
        return Ok(Linearization::from_matrix(mat, true));
    }
    let jac = match point.location {
        Location::Finite => numeric_jacobian(|s| phase_rhs_coords(params, s), &point.coords),
        Location::ChartQ1 => numeric_jacobian(|s| chart_rhs_q1_coords(params, s), &point.coords),
        Location::ChartQ23(sign) => numeric_jacobian(|s| chart_rhs_q23(params, s, sign), &point.coords),
        Location::Equator => {
            return Err(Error::InvalidInput("no chart available for this point at infinity"))
        }
    };
    Ok(Linearization::from_matrix(jac, false))
}
