use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::ode::{integrate, Controls, End, Flow, OdeSystem};
use crate::params::Params;

use super::critical::Label;
use super::{chart_rhs_q1_coords, chart_rhs_q23, phase_rhs_coords};

/// Distance below which a trajectory counts as being at a critical point.
pub const PROXIMITY_RADIUS: f64 = 1e-6;
/// Consecutive accepted steps inside [`PROXIMITY_RADIUS`] needed to
/// declare that a point was entered.
pub const PROXIMITY_STEPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseSystem {
    /// `(X, Y, Z)`.
    Finite,
    /// `(y, z, w)` around `Q1`.
    ChartQ1,
    /// `(x, z, w)` with flow sign `-1` (around `Q2`) or `+1` (around `Q3`).
    ChartQ23(f64),
}

struct Field<'a> {
    params: &'a Params,
    system: PhaseSystem,
}

impl OdeSystem<3> for Field<'_> {
    fn rhs(&self, _t: f64, y: &[f64; 3]) -> [f64; 3] {
        match self.system {
            PhaseSystem::Finite => phase_rhs_coords(self.params, y),
            PhaseSystem::ChartQ1 => chart_rhs_q1_coords(self.params, y),
            PhaseSystem::ChartQ23(sign) => chart_rhs_q23(self.params, y, sign),
        }
    }

    fn project(&self, y: &mut [f64; 3]) -> bool {
        let idx: &[usize] = match self.system {
            PhaseSystem::Finite => &[0, 2],
            PhaseSystem::ChartQ1 => &[1, 2],
            PhaseSystem::ChartQ23(_) => &[],
        };
        let mut changed = false;
        for &i in idx {
            if y[i] < 0.0 {
                y[i] = 0.0;
                changed = true;
            }
        }
        changed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Reached the end of the time span.
    SpanEnd,
    /// Stayed within [`PROXIMITY_RADIUS`] of the point for
    /// [`PROXIMITY_STEPS`] steps.
    Entered(Label),
    MaxSteps,
    /// The sup-norm exceeded `Controls::blowup_norm` (an approach to a
    /// point at infinity).
    Escaped,
}

#[derive(Debug, Clone)]
pub struct PhaseRun {
    pub system: PhaseSystem,
    /// `(eta, state)` at the start and after every accepted step.
    pub samples: Vec<(f64, [f64; 3])>,
    pub termination: Termination,
    /// Closest critical point of this chart at the final state, with its
    /// distance.
    pub nearest: Option<(Label, f64)>,
}

impl PhaseRun {
    pub fn last(&self) -> [f64; 3] {
        self.samples.last().map(|s| s.1).unwrap_or([f64::NAN; 3])
    }
}

/// Critical points visible in a chart, with distance from `s`. The lines
/// `P^γ` and, for `p = 1`, `P1^γ` are represented by their closest point.
fn distances(params: &Params, system: PhaseSystem, s: &[f64; 3]) -> Vec<(Label, f64)> {
    let d = |a: &[f64; 3]| {
        let v = [s[0] - a[0], s[1] - a[1], s[2] - a[2]];
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    };
    let mut out = Vec::new();
    match system {
        PhaseSystem::Finite => {
            out.push((Label::P0, d(&[0.0, 0.0, 0.0])));
            if params.is_linear_reaction() {
                let g = s[2].max(0.0);
                let lab = if g > 0.0 { Label::P1Gamma(g) } else { Label::P1 };
                out.push((lab, d(&[0.0, -0.5, g])));
            } else {
                out.push((Label::P1, d(&[0.0, -0.5, 0.0])));
            }
            if s[2] > 0.0 {
                out.push((Label::PGamma(s[2]), d(&[0.0, 0.0, s[2]])));
            }
        }
        PhaseSystem::ChartQ1 => {
            out.push((Label::Q1, d(&[0.0, 0.0, 0.0])));
            let y5 = -(params.nf() - 2.0) / params.m();
            out.push((Label::Q5, d(&[y5, 0.0, 0.0])));
        }
        PhaseSystem::ChartQ23(sign) => {
            let lab = if sign < 0.0 { Label::Q2 } else { Label::Q3 };
            out.push((lab, d(&[0.0, 0.0, 0.0])));
        }
    }
    out
}

/// Points of a line within [`PROXIMITY_RADIUS`] of its endpoint are
/// reported as the endpoint.
fn nearest(params: &Params, system: PhaseSystem, s: &[f64; 3]) -> Option<(Label, f64)> {
    let (lab, d) = distances(params, system, s)
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal))?;
    let ends = |g: f64, end: Label, at: [f64; 3]| {
        if g < PROXIMITY_RADIUS {
            let v = [s[0] - at[0], s[1] - at[1], s[2] - at[2]];
            (end, (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
        } else {
            (lab, d)
        }
    };
    Some(match lab {
        Label::PGamma(g) => ends(g, Label::P0, [0.0, 0.0, 0.0]),
        Label::P1Gamma(g) => ends(g, Label::P1, [0.0, -0.5, 0.0]),
        _ => (lab, d),
    })
}

/// Integrates one of the three systems over `eta_span`, stopping early once
/// a critical point has been entered.
pub fn integrate_phase(
    params: &Params,
    system: PhaseSystem,
    initial: [f64; 3],
    eta_span: (f64, f64),
    controls: &Controls,
) -> Result<PhaseRun> {
    let field = Field { params, system };
    let mut start = initial;
    field.project(&mut start);
    let mut samples = Vec::new();
    samples.push((eta_span.0, start));
    let mut streak = 0usize;
    let mut streak_label = None;
    let mut entered = None;

    let out = integrate(&field, eta_span.0, start, eta_span.1, controls, |step| {
        samples.push((step.t1, step.y1));
        match nearest(params, system, &step.y1) {
            Some((lab, dist)) if dist < PROXIMITY_RADIUS => {
                let same = matches!(
                    (streak_label, lab),
                    (Some(Label::PGamma(_)), Label::PGamma(_)) | (Some(Label::P1Gamma(_)), Label::P1Gamma(_))
                ) || streak_label == Some(lab);
                streak = if same { streak + 1 } else { 1 };
                streak_label = Some(lab);
                if streak >= PROXIMITY_STEPS {
                    entered = Some(lab);
                    return Flow::Stop;
                }
            }
            _ => {
                streak = 0;
                streak_label = None;
            }
        }
        Flow::Continue
    });

    let (end, termination) = match out {
        Ok(out) => {
            let t = match (entered, out.end) {
                (Some(lab), _) => Termination::Entered(lab),
                (None, End::MaxSteps) => Termination::MaxSteps,
                _ => Termination::SpanEnd,
            };
            (out.y, t)
        }
        Err(Error::BlowupDetected { .. }) => (samples.last().map_or(start, |s| s.1), Termination::Escaped),
        Err(e) => return Err(e),
    };
    Ok(PhaseRun { system, nearest: nearest(params, system, &end), samples, termination })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::phase_rhs;
    use crate::transform::PhaseState;
    use proptest::prelude::*;

    fn ctl() -> Controls {
        Controls::default()
    }

    #[test]
    fn fixed_point_is_constant() {
        let par = Params::unit(2.0, 1.5, 3).unwrap();
        let run = integrate_phase(&par, PhaseSystem::Finite, [0.0, -0.5, 0.0], (0.0, 5.0), &ctl()).unwrap();
        assert!(run.samples.iter().all(|s| s.1 == [0.0, -0.5, 0.0]));
        assert_eq!(run.termination, Termination::Entered(Label::P1));
    }

    #[test]
    fn positive_y_seed_escapes_with_samples() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        let ctl = Controls { blowup_norm: 1e6, ..Controls::default() };
        let run = integrate_phase(&par, PhaseSystem::Finite, [0.5, 0.5, 0.5], (0.0, 50.0), &ctl).unwrap();
        assert!(run.samples.len() > 2);
        let first_negative = run.samples.iter().position(|s| s.1[1] < 0.0).unwrap();
        assert!(run.samples[first_negative..].iter().all(|s| s.1[1] < 0.0));
        assert!(matches!(run.termination, Termination::Escaped | Termination::Entered(_) | Termination::SpanEnd));
    }

    #[test]
    fn y_axis_is_invariant() {
        let par = Params::unit(2.0, 1.5, 3).unwrap();
        let run = integrate_phase(&par, PhaseSystem::Finite, [0.0, -0.3, 0.0], (0.0, 8.0), &ctl()).unwrap();
        assert!(run.samples.iter().all(|s| s.1[0] == 0.0 && s.1[2] == 0.0));
        // 1/Y solves u' = 1 + u/2 on the axis.
        let (t, s) = *run.samples.last().unwrap();
        let exact = 1.0 / (-2.0 - (4.0 / 3.0) * (0.5 * t).exp());
        assert!((s[1] - exact).abs() < 1e-8, "{} vs {exact}", s[1]);
    }

    #[test]
    fn leaves_y_zero_plane_downwards() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        let run = integrate_phase(&par, PhaseSystem::Finite, [0.3, 0.0, 0.4], (0.0, 1e-3), &ctl()).unwrap();
        assert!(run.samples[1..].iter().all(|s| s.1[1] < 0.0));
    }

    #[test]
    fn q3_chart_origin_attracts() {
        let par = Params::unit(2.0, 1.0, 3).unwrap();
        let run = integrate_phase(&par, PhaseSystem::ChartQ23(1.0), [0.05, 0.05, 0.05], (0.0, 200.0), &ctl()).unwrap();
        assert_eq!(run.termination, Termination::Entered(Label::Q3));
    }

    #[test]
    fn entering_p0_from_center_manifold_side() {
        // A point with small X > Z on Y = -2XZ drifts to P0 with X/Z
        // roughly frozen.
        let par = Params::unit(2.0, 1.5, 3).unwrap();
        let s = [1e-3, -2e-7, 1e-4];
        let run = integrate_phase(&par, PhaseSystem::Finite, s, (0.0, 1e9), &ctl()).unwrap();
        let last = run.last();
        assert!(last[0] < s[0] && last[2] <= s[2]);
        assert_eq!(run.nearest.unwrap().0, Label::P0);
        assert_eq!(run.termination, Termination::Entered(Label::P0));
    }

    proptest! {
        /// X and Z never increase in the octant X > 0, Y < 0, Z > 0.
        #[test]
        fn x_and_z_decrease(x in 0.01f64..3.0, y in -3.0f64..-0.01, z in 0.01f64..3.0) {
            // Orbits below Y = -1/2 escape to infinity in finite time, so
            // the run is cut once the state leaves a large ball.
            let par = Params::unit(2.5, 1.5, 4).unwrap();
            let field = Field { params: &par, system: PhaseSystem::Finite };
            let mut path = Vec::new();
            path.push([x, y, z]);
            integrate(&field, 0.0, [x, y, z], 20.0, &ctl(), |st| {
                path.push(st.y1);
                if st.y1[1].abs() > 1e4 { Flow::Stop } else { Flow::Continue }
            }).unwrap();
            for w in path.windows(2) {
                let (a, b) = (w[0], w[1]);
                if a[1] < 0.0 {
                    prop_assert!(b[0] <= a[0] + 1e-9);
                    prop_assert!(b[2] <= a[2] + 1e-9);
                }
                // No crossing of Y = 0 from below while X Z > 0.
                prop_assert!(!(a[1] < 0.0 && b[1] > 0.0 && a[0] * a[2] > 0.0));
            }
        }
    }

    #[test]
    fn rhs_matches_public_function() {
        let par = Params::unit(2.0, 1.5, 3).unwrap();
        let f = Field { params: &par, system: PhaseSystem::Finite };
        let s = [0.2, -0.3, 0.4];
        assert_eq!(f.rhs(0.0, &s), phase_rhs(&par, &PhaseState::new(0.2, -0.3, 0.4)));
    }
}
