//! Ordering in `eps`, the very weak formulation and self-similar tracking.

use alloc::vec::Vec;

use num_traits::Float;

use super::giant::FriendlyGiant;
use super::grid::{relative_l1, RadialField, RadialGrid};
use super::solver::{evolve, replay, Evolution, Power, StepControls};
use crate::error::{Error, Result};

/// Ordering tolerance `tol_ord = 3 C dr`, with the first-order error
/// constant `C` estimated from one coarsening.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// `max |restrict(u_dr) - u_2dr| / dr` over cells and snapshots.
    pub constant: f64,
    pub dr: f64,
    pub tol_ord: f64,
    /// Largest relative L¹ difference between the two grids.
    pub rel_l1: f64,
}

/// Safety factor in `tol_ord = ORDER_SAFETY · C · dr`.
pub const ORDER_SAFETY: f64 = 3.0;

/// Runs `u0` on the grid with half the cells (same snapshot times as `fine`)
/// and compares.
pub fn calibrate_tol_ord(u0: &RadialField, fine: &Evolution, controls: &StepControls) -> Result<Calibration> {
    let grid = u0.grid.coarsened()?;
    let coarse0 = RadialField::new(grid, u0.grid.restrict(&u0.u), u0.t, u0.params, u0.eps)?;
    let times = fine.times();
    let t_end = *times.last().unwrap_or(&u0.t);
    let c = StepControls { snapshots: times.clone(), ..controls.clone() };
    let coarse = evolve(&coarse0, t_end, &c)?;
    let mut max_diff: f64 = 0.0;
    let mut rel: f64 = 0.0;
    for (k, s) in fine.snapshots.iter().enumerate() {
        let Some(j) = coarse.snapshot_at(s.t) else {
            return Err(Error::InvalidInput("coarse run misses a snapshot time"));
        };
        let avg = u0.grid.restrict(&s.u);
        let cu = &coarse.snapshots[j].u;
        for (a, b) in avg.iter().zip(cu) {
            max_diff = max_diff.max((a - b).abs());
        }
        if k > 0 {
            rel = rel.max(relative_l1(&coarse.grid, cu, &avg, coarse.grid.r_min));
        }
    }
    let dr = u0.grid.dr;
    let constant = max_diff / dr;
    Ok(Calibration { constant, dr, tol_ord: ORDER_SAFETY * constant * dr, rel_l1: rel })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderViolation {
    pub t: f64,
    pub r: f64,
    pub eps_small: f64,
    pub eps_large: f64,
    /// `u_{eps_small} - u_{eps_large}`, below `-tol_ord`.
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub eps: Vec<f64>,
    pub calibration: Calibration,
    pub tol_ord: f64,
    pub replayed: bool,
    /// One evolution per `eps`, in the order given.
    pub evolutions: Vec<Evolution>,
    pub violations: Vec<OrderViolation>,
    /// Smallest `u_{eps_i} - u_{eps_{i+1}}` over all cells and snapshots.
    pub min_gap: f64,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evolves `u0` once per `eps` and checks `u_{eps_1} >= u_{eps_2} - tol_ord`
/// for consecutive `eps_1 <= eps_2` at every snapshot.
///
/// With `replay` the smallest `eps` sets the step sequence and the others
/// repeat it, so the discrete comparison principle applies exactly; without
/// it each run picks its own steps.
pub fn check_eps_monotonicity(
    u0: &RadialField,
    eps_list: &[f64],
    t_end: f64,
    controls: &StepControls,
    replayed: bool,
) -> Result<MonotonicityReport> {
    if eps_list.is_empty() {
        return Err(Error::InvalidInput("empty eps list"));
    }
    if eps_list.windows(2).any(|w| !(w[1] >= w[0])) || !(eps_list[0] > 0.0) {
        return Err(Error::InvalidInput("eps list must be positive and increasing"));
    }
    let first = evolve(&u0.with_eps(eps_list[0])?, t_end, controls)?;
    let calibration = calibrate_tol_ord(&u0.with_eps(eps_list[0])?, &first, controls)?;
    let tol_ord = calibration.tol_ord;
    let snap = StepControls { snapshots: first.times(), ..controls.clone() };
    let mut evolutions = alloc::vec![first];
    for eps in &eps_list[1..] {
        let f = u0.with_eps(*eps)?;
        let ev = if replayed { replay(&f, &evolutions[0], &snap)? } else { evolve(&f, t_end, &snap)? };
        evolutions.push(ev);
    }
    let mut violations = Vec::new();
    let mut min_gap = f64::INFINITY;
    for (k, pair) in evolutions.windows(2).enumerate() {
        let (lo, hi) = (&pair[0], &pair[1]);
        for s in &lo.snapshots {
            let Some(j) = hi.snapshot_at(s.t) else {
                return Err(Error::InvalidInput("runs do not share snapshot times"));
            };
            for (i, (a, b)) in s.u.iter().zip(&hi.snapshots[j].u).enumerate() {
                let gap = a - b;
                min_gap = min_gap.min(gap);
                if gap < -tol_ord {
                    violations.push(OrderViolation {
                        t: s.t,
                        r: lo.grid.r[i],
                        eps_small: eps_list[k],
                        eps_large: eps_list[k + 1],
                        gap,
                    });
                }
            }
        }
    }
    Ok(MonotonicityReport {
        eps: eps_list.to_vec(),
        calibration,
        tol_ord,
        replayed,
        evolutions,
        violations,
        min_gap,
    })
}

/// Space-time test function for the very weak formulation.
pub trait TestFunction {
    fn value(&self, r: f64, t: f64) -> f64;
    fn time_derivative(&self, r: f64, t: f64) -> f64;
    /// Radial Laplacian `phi_rr + (N-1) phi_r / r` in dimension `dim`.
    fn laplacian(&self, r: f64, t: f64, dim: u32) -> f64;
    /// Closed radial interval outside which the function vanishes.
    fn support(&self) -> (f64, f64);
}

/// `phi(r, t) = (1 - r^2/rho^2)_+^4 exp(growth · t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTest {
    pub rho: f64,
    pub growth: f64,
}

impl TestFunction for BumpTest {
    fn value(&self, r: f64, t: f64) -> f64 {
        let s = 1.0 - (r / self.rho).powi(2);
        if s <= 0.0 {
            0.0
        } else {
            s.powi(4) * (self.growth * t).exp()
        }
    }

    fn time_derivative(&self, r: f64, t: f64) -> f64 {
        self.growth * self.value(r, t)
    }

    fn laplacian(&self, r: f64, t: f64, dim: u32) -> f64 {
        let q = (r / self.rho).powi(2);
        let s = 1.0 - q;
        if s <= 0.0 {
            return 0.0;
        }
        let rho2 = self.rho * self.rho;
        let lap = (-8.0 * dim as f64 * s.powi(3) + 48.0 * q * s * s) / rho2;
        lap * (self.growth * t).exp()
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.rho)
    }
}

/// The five integrals of the very weak formulation and their balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakResidual {
    /// `∫u(t2)φ(t2)`, `∫u(t1)φ(t1)`, `∬uφ_t`, `∬u^mΔφ`, `∬K(r+eps)^{-2}u^pφ`.
    pub terms: [f64; 5],
    /// `|I1 - I2 - I3 - I4 - I5| / max |I_k|`.
    pub residual: f64,
    pub absolute: f64,
}

/// Evaluates the very weak formulation on the snapshots of `evolution`
/// between `t1` and `t2` (both must be snapshot times).
///
/// Space integrals use the cell measure at the centers, time integrals the
/// trapezoid rule over the snapshots. `eps = 0` gives the singular
/// potential `|x|^{-2}`.
pub fn weak_residual(
    evolution: &Evolution,
    test: &impl TestFunction,
    t1: f64,
    t2: f64,
    eps: f64,
) -> Result<WeakResidual> {
    let grid = &evolution.grid;
    let (lo, hi) = test.support();
    if hi > grid.r_max - grid.dr || (grid.r_min > 0.0 && lo < grid.r_min + grid.dr) {
        return Err(Error::SupportViolation);
    }
    if !(t2 > t1) {
        return Err(Error::InvalidInput("need t1 < t2"));
    }
    let (Some(k1), Some(k2)) = (evolution.snapshot_at(t1), evolution.snapshot_at(t2)) else {
        return Err(Error::InvalidInput("t1 and t2 must be snapshot times"));
    };
    let params = &evolution.params;
    let pm = Power::new(params.m());
    let pp = Power::new(params.p());
    let k = params.k_hardy();
    let dim = grid.dim;
    let weight: Vec<f64> = grid.r.iter().map(|r| k / (r + eps).powi(2)).collect();

    let pair = |s: &super::solver::Snapshot| -> (f64, f64, f64, f64) {
        let mut a = (0.0, 0.0, 0.0, 0.0);
        for i in 0..grid.n {
            let r = grid.r[i];
            if r > hi {
                break;
            }
            let v = grid.volumes[i];
            let u = s.u[i];
            a.0 += v * u * test.value(r, s.t);
            a.1 += v * u * test.time_derivative(r, s.t);
            a.2 += v * pm.eval(u) * test.laplacian(r, s.t, dim);
            a.3 += v * weight[i] * pp.eval(u) * test.value(r, s.t);
        }
        a
    };

    let mut terms = [0.0; 5];
    terms[0] = pair(&evolution.snapshots[k2]).0;
    terms[1] = pair(&evolution.snapshots[k1]).0;
    let mut prev: Option<(f64, (f64, f64, f64, f64))> = None;
    for s in &evolution.snapshots[k1..=k2] {
        let cur = pair(s);
        if let Some((tp, p)) = prev {
            let h = 0.5 * (s.t - tp);
            terms[2] += h * (p.1 + cur.1);
            terms[3] += h * (p.2 + cur.2);
            terms[4] += h * (p.3 + cur.3);
        }
        prev = Some((s.t, cur));
    }
    let absolute = (terms[0] - terms[1] - terms[2] - terms[3] - terms[4]).abs();
    let scale = terms.iter().fold(0.0, |a: f64, b| a.max(b.abs()));
    let residual = if scale > 0.0 { absolute / scale } else { 0.0 };
    Ok(WeakResidual { terms, residual, absolute })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingReport {
    pub eps: f64,
    pub delta: f64,
    pub n: usize,
    pub times: Vec<f64>,
    /// Relative L¹ distance to `U(., t)` on `r >= delta` per snapshot.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

/// Evolves the giant's own data, capped below `r = delta`, and measures the
/// distance to the exact self-similar solution.
///
/// The initial data is `U(max(r, delta), 0)` (with the giant's shift), the
/// evolution runs for `t_span` with regularization `eps`, and every
/// snapshot is compared with `U(r, t)` on `[delta, r_max]`.
pub fn self_similarity_track(
    giant: &FriendlyGiant,
    eps: f64,
    t_span: f64,
    grid: RadialGrid,
    delta: f64,
    controls: &StepControls,
) -> Result<TrackingReport> {
    if !(giant.tau > 0.0) {
        return Err(Error::InvalidInput("the giant needs a positive time shift"));
    }
    if !(delta > grid.r_min) {
        return Err(Error::InvalidInput("delta must exceed r_min"));
    }
    let n = grid.n;
    let params = giant.profile.params;
    let u0 = RadialField::from_fn(grid, params, eps, |r| giant.eval(r.max(delta), 0.0))?;
    let mut c = controls.clone();
    if c.snapshots.is_empty() {
        c = c.with_uniform_snapshots(0.0, t_span, 10);
    }
    let ev = evolve(&u0, t_span, &c)?;
    let mut times = Vec::new();
    let mut deviations = Vec::new();
    for s in &ev.snapshots {
        let exact: Vec<f64> = ev.grid.r.iter().map(|r| giant.eval(*r, s.t)).collect();
        times.push(s.t);
        deviations.push(relative_l1(&ev.grid, &s.u, &exact, delta));
    }
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(TrackingReport { eps, delta, n, times, deviations, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;
    use alloc::vec;

    fn params() -> Params {
        Params::unit(2.0, 1.0, 3).unwrap()
    }

    fn bump(n: usize) -> RadialField {
        let g = RadialGrid::origin(4.0, n, 3).unwrap();
        RadialField::bump(g, params(), 0.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn bump_test_laplacian_matches_differences() {
        let phi = BumpTest { rho: 1.5, growth: 0.3 };
        for r in [0.1, 0.5, 1.0, 1.4] {
            let h = 1e-4;
            let d2 = (phi.value(r + h, 0.7) - 2.0 * phi.value(r, 0.7) + phi.value(r - h, 0.7)) / (h * h);
            let d1 = (phi.value(r + h, 0.7) - phi.value(r - h, 0.7)) / (2.0 * h);
            let want = d2 + 2.0 * d1 / r;
            assert!((phi.laplacian(r, 0.7, 3) - want).abs() < 1e-5, "r {r}");
        }
        assert_eq!(phi.value(1.6, 0.0), 0.0);
        let dt = (phi.value(0.3, 1.0 + 1e-6) - phi.value(0.3, 1.0 - 1e-6)) / 2e-6;
        assert!((phi.time_derivative(0.3, 1.0) - dt).abs() < 1e-7);
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let g = RadialGrid::origin(4.0, 32, 3).unwrap();
        let f = RadialField::new(g, vec![0.0; 32], 0.0, params(), 0.1).unwrap();
        let ev = evolve(&f, 1.0, &StepControls::default().with_uniform_snapshots(0.0, 1.0, 4)).unwrap();
        let w = weak_residual(&ev, &BumpTest { rho: 2.0, growth: 1.0 }, 0.25, 1.0, 0.1).unwrap();
        assert_eq!(w.residual, 0.0);
        assert!(w.terms.iter().all(|t| *t == 0.0));
    }

    #[test]
    fn time_independent_test_kills_time_term() {
        let f = bump(64);
        let ev = evolve(&f, 0.2, &StepControls::default().with_uniform_snapshots(0.0, 0.2, 8)).unwrap();
        let w = weak_residual(&ev, &BumpTest { rho: 2.0, growth: 0.0 }, 0.05, 0.2, 0.2).unwrap();
        assert_eq!(w.terms[2], 0.0);
        assert!(w.terms[0] > w.terms[1]);
    }

    #[test]
    fn support_touching_boundary_is_rejected() {
        let f = bump(32);
        let ev = evolve(&f, 0.1, &StepControls::default()).unwrap();
        let r = weak_residual(&ev, &BumpTest { rho: 4.0, growth: 0.0 }, 0.0, 0.1, 0.2);
        assert!(matches!(r, Err(Error::SupportViolation)));
        let r = weak_residual(&ev, &BumpTest { rho: 2.0, growth: 0.0 }, 0.0, 0.05, 0.2);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn weak_residual_converges() {
        let res = |n: usize| {
            let f = bump(n);
            let c = StepControls::default().with_uniform_snapshots(0.0, 0.5, n / 4);
            let ev = evolve(&f, 0.5, &c).unwrap();
            weak_residual(&ev, &BumpTest { rho: 2.5, growth: 1.0 }, 0.125, 0.5, 0.2).unwrap().residual
        };
        let (a, b) = (res(32), res(64));
        assert!(b < a, "{a} {b}");
        assert!((a / b).log2() >= 1.0, "{a} {b}");
    }

    #[test]
    fn identical_eps_give_identical_fields() {
        let f = bump(32);
        let c = StepControls::default().with_uniform_snapshots(0.0, 0.1, 4);
        for replayed in [true, false] {
            let rep = check_eps_monotonicity(&f, &[0.2, 0.2], 0.1, &c, replayed).unwrap();
            assert_eq!(rep.evolutions[0].snapshots, rep.evolutions[1].snapshots);
            assert_eq!(rep.min_gap, 0.0);
        }
    }

    #[test]
    fn eps_ordering_small_grid() {
        let f = bump(64);
        let c = StepControls::default().with_uniform_snapshots(0.0, 0.3, 6);
        let rep = check_eps_monotonicity(&f, &[0.1, 0.2, 0.4], 0.3, &c, true).unwrap();
        assert!(rep.passed());
        assert!(rep.min_gap >= 0.0, "replayed runs are exactly ordered: {}", rep.min_gap);
        assert!(rep.tol_ord > 0.0);
        let free = check_eps_monotonicity(&f, &[0.1, 0.2, 0.4], 0.3, &c, false).unwrap();
        assert!(free.passed());
        assert!(check_eps_monotonicity(&f, &[0.2, 0.1], 0.3, &c, true).is_err());
    }
}
