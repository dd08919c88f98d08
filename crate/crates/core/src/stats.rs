//! Least-squares line fits used by the asymptotic checks.

use num_traits::Float;

use crate::error::{Error, Result};

/// `y ≈ intercept + slope x` with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub max_abs_residual: f64,
    pub n: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() || n < 3 {
        return Err(Error::InsufficientRange("line fit needs at least three points"));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::InsufficientRange("abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    let mut worst: f64 = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - intercept - slope * x;
        ss += r * r;
        worst = worst.max(r.abs());
    }
    let s2 = ss / (nf - 2.0);
    let slope_se = (s2 / sxx).sqrt();
    let intercept_se = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    Ok(LineFit { slope, intercept, slope_se, intercept_se, max_abs_residual: worst, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!((f.intercept - 2.0).abs() < 1e-13);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_line(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }
}
