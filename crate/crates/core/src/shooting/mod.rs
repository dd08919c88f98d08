//! Shooting computation of the compactly supported self-similar profile.
//!
//! Orbits are labelled by the constant `K` of the origin behavior
//! `f^{m-p} ~ K - (m-p)/(m(N-2)) ln xi`. Small `K` gives profiles that
//! cross zero transversally, large `K` profiles that stay positive; the
//! profile with an interface sits at the single switch between the two.

mod diagnostics;
mod launch;
mod shot;
mod solve;

pub use diagnostics::{
    fit_interface_exponent, fit_interface_window, fit_origin_behavior, fit_origin_window,
    phase_trace, profile_ordering, q5_branch_check, ssode_residual, verify_no_positive_minima,
    InterfaceFit, MinimaReport, OrderingReport, OriginFit, PhaseTraceReport, Q5Report,
    ResidualReport, INTERFACE_WINDOW, ORIGIN_FIT_DECADES, PHASE_TRACE_TOL,
};
pub use launch::{q1_launch, refined_launch, Launch, LaunchSeries};
pub use shot::{
    classify, extend_to_origin, integrate_shot, ssode_rhs, Approach, OutcomeKind, ProfileTrace,
    Shot, ShotControls, ShotOutcome, Side, F_FLOOR, PROFILE_DS,
};
pub use solve::{count_flips, shoot, Diagnostics, ShootConfig, ShootingResult};
