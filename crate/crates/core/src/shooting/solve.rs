use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::profile::SelfSimilarProfile;

use super::diagnostics::{
    fit_interface_exponent, fit_origin_behavior, ssode_residual, InterfaceFit, OriginFit,
    ResidualReport,
};
use super::launch::LaunchSeries;
use super::shot::{
    classify, extend_to_origin, run_shot, OutcomeKind, ProfileTrace, ShotControls, ShotOutcome,
    Side, PROFILE_DS,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootConfig {
    /// Initial guess `(low, high)` for the origin constant; expanded until
    /// `low` crosses zero and `high` stays positive.
    pub bracket: (f64, f64),
    pub tol_k: f64,
    pub shot: ShotControls,
    /// Equispaced classification samples over the expanded bracket.
    pub samples: usize,
    pub max_expansions: usize,
    /// `ln xi` down to which the final profile is continued towards the
    /// origin.
    pub ln_xi_deep: f64,
    /// Range `[lo, hi * xi0]` of the profile equation residual check.
    pub residual_range: (f64, f64),
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self {
            bracket: (-1.0, 3.0),
            tol_k: 1e-8,
            shot: ShotControls::default(),
            samples: 32,
            max_expansions: 40,
            ln_xi_deep: -690.0,
            residual_range: (1e-4, 0.99),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    pub expansions: usize,
    /// Bracket after expansion, before bisection.
    pub initial_bracket: (f64, f64),
    pub samples: Vec<(f64, Side)>,
    /// Number of classification changes along `samples`.
    pub flips: usize,
    /// Relative disagreement at the launch point between the launch data and
    /// the orbit integrated from much closer to the origin.
    pub launch_mismatch: f64,
    pub launch_xi: f64,
    pub residual: Option<ResidualReport>,
    pub origin_fit: Option<OriginFit>,
    pub interface_fit: Option<InterfaceFit>,
}

#[derive(Debug, Clone)]
pub struct ShootingResult {
    pub k_star: f64,
    pub bracket: (f64, f64),
    pub bracket_width: f64,
    pub xi0: f64,
    pub profile: SelfSimilarProfile,
    pub trace: ProfileTrace,
    pub outcome: ShotOutcome,
    pub diagnostics: Diagnostics,
}

fn side_of(params: &Params, series: &LaunchSeries, k: f64, c: &ShotControls) -> Result<Side> {
    Ok(classify(params, series, k, c)?.side)
}

/// Number of changes in a sequence of classifications; an undecided sample
/// counts as a change on both sides.
pub fn count_flips(sides: &[Side]) -> usize {
    sides.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Bisection on the origin constant between orbits that cross zero and
/// orbits that stay positive.
pub fn shoot(params: &Params, config: &ShootConfig) -> Result<ShootingResult> {
    let series = LaunchSeries::new(params);
    let c = &config.shot;
    let (mut lo, mut hi) = config.bracket;
    if !(hi > lo) || !(config.tol_k > 0.0) {
        return Err(Error::InvalidInput("need low < high and tol_k > 0"));
    }
    let mut side_lo = side_of(params, &series, lo, c)?;
    let mut side_hi = side_of(params, &series, hi, c)?;
    let mut expansions = 0;
    while side_lo != Side::Zero || side_hi != Side::Positive {
        if expansions >= config.max_expansions {
            return Err(Error::BracketFailure { low: lo, high: hi });
        }
        expansions += 1;
        let width = hi - lo;
        if side_lo == Side::Positive && side_hi == Side::Positive {
            hi = lo;
            side_hi = side_lo;
            lo -= 2.0 * width;
            side_lo = side_of(params, &series, lo, c)?;
        } else if side_hi == Side::Zero && side_lo == Side::Zero {
            lo = hi;
            side_lo = side_hi;
            hi += 2.0 * width;
            side_hi = side_of(params, &series, hi, c)?;
        } else if side_lo != Side::Zero {
            lo -= 2.0 * width;
            side_lo = side_of(params, &series, lo, c)?;
        } else {
            hi += 2.0 * width;
            side_hi = side_of(params, &series, hi, c)?;
        }
    }
    let initial = (lo, hi);

    let n = config.samples.max(2);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let k = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        samples.push((k, side_of(params, &series, k, c)?));
    }
    let sides: Vec<Side> = samples.iter().map(|s| s.1).collect();
    let flips = count_flips(&sides);
    if flips != 1 {
        return Err(Error::NonMonotoneClassification { flips });
    }

    let mut iterations = 0;
    while hi - lo > config.tol_k {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match side_of(params, &series, mid, c)? {
            Side::Zero => lo = mid,
            Side::Positive => hi = mid,
            Side::Undecided => return Err(Error::BracketFailure { low: lo, high: hi }),
        }
        iterations += 1;
    }
    let k_star = 0.5 * (lo + hi);
    let (outcome, trace) = run_shot(params, &series, k_star, c, true)?;
    let mut trace = trace.ok_or(Error::InvalidInput("trace not recorded"))?;
    if outcome.kind != OutcomeKind::Interface {
        return Err(Error::BracketFailure { low: lo, high: hi });
    }
    let xi0 = outcome.approach.map(|a| a.xi0).unwrap_or(f64::NAN);
    let launch_mismatch = extend_to_origin(&mut trace, &series, &outcome.launch, config.ln_xi_deep, c)?;
    let profile = trace.to_profile(PROFILE_DS)?;

    let (r_lo, r_hi) = config.residual_range;
    let residual = ssode_residual(&trace, r_lo, r_hi * xi0, 400).ok();
    let origin_fit = fit_origin_behavior(&profile, params).ok();
    let interface_fit = fit_interface_exponent(&profile, params).ok();

    Ok(ShootingResult {
        k_star,
        bracket: (lo, hi),
        bracket_width: hi - lo,
        xi0,
        profile,
        trace,
        outcome,
        diagnostics: Diagnostics {
            iterations,
            expansions,
            initial_bracket: initial,
            samples,
            flips,
            launch_mismatch,
            launch_xi: outcome.launch.s.exp(),
            residual,
            origin_fit,
            interface_fit,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flips_are_counted() {
        use Side::*;
        assert_eq!(count_flips(&[Zero, Zero, Positive, Positive]), 1);
        assert_eq!(count_flips(&[Zero, Positive, Zero, Positive]), 3);
        assert_eq!(count_flips(&[Zero, Undecided, Positive]), 2);
    }

    #[test]
    fn solves_2_1_3() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        let res = shoot(&par, &ShootConfig::default()).unwrap();
        assert!(res.bracket_width <= 1e-8);
        assert_eq!(res.diagnostics.flips, 1);
        assert!(res.xi0 > 0.0 && res.xi0.is_finite());
        assert!(res.profile.edge.finite().is_some());
    }

    #[test]
    fn bad_bracket_rejected() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        let cfg = ShootConfig { bracket: (1.0, 0.0), ..ShootConfig::default() };
        assert!(shoot(&par, &cfg).is_err());
    }
}
