//! Radial evolution of the regularized problem
//! `u_t = Δ(u^m) + K (|x| + eps)^{-2} u^p` and the checks of the existence
//! construction: ordering in `eps`, domination by the shifted self-similar
//! solution, the very weak formulation and the scaling in `K`.

mod checks;
mod giant;
mod grid;
mod scaling;
mod solver;

pub use checks::{
    calibrate_tol_ord, check_eps_monotonicity, self_similarity_track, weak_residual, BumpTest,
    Calibration, MonotonicityReport, OrderViolation, TestFunction, TrackingReport, WeakResidual,
    ORDER_SAFETY,
};
pub use giant::{
    check_supersolution_bound, find_tau, find_tau_with_margin, giant_eval, BoundViolation,
    FriendlyGiant, SupersolutionReport, TAU_MARGIN,
};
pub use grid::{relative_l1, RadialField, RadialGrid};
pub use scaling::{rescale_hardy, HardyScaling};
pub use solver::{evolve, replay, Evolution, InnerBoundary, Snapshot, StepControls};
