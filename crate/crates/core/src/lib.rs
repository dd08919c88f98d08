//! Self-similar profiles and regularized evolution for the porous-medium
//! equation with a Hardy reaction potential,
//!
//! ```text
//!     u_t = Δ(u^m) + |x|^{-2} u^p,    x ∈ R^N,  1 <= p < m,  N >= 3.
//! ```
//!
//! The crate is `no_std` (it needs `alloc`). It contains
//!
//! * [`params`], [`transform`], [`profile`]: exponents, the changes of
//!   variables between profile space, phase space and the chart at infinity,
//!   and the sampled profile type;
//! * [`phase`]: the autonomous quadratic system, its critical points,
//!   linearizations, center-manifold coefficients and an orbit integrator;
//! * [`shooting`]: the shooting computation of the unique compactly supported
//!   profile together with fits of its endpoint asymptotics;
//! * [`pde`]: a radial finite-volume solver for the ε-regularized Cauchy
//!   problem plus the comparison, weak-formulation and scaling checks built on
//!   top of it.
#![no_std]
// `Float` methods are inherent when a dev-dependency enables num-traits/std.
#![allow(unused_imports)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod linalg;
pub mod ode;
pub mod params;
pub mod pde;
pub mod phase;
pub mod profile;
pub mod shooting;
pub mod stats;
pub mod transform;

pub use error::{Error, Result};
pub use params::Params;
pub use profile::{SelfSimilarProfile, SupportEdge};
pub use transform::{ChartState, PhaseState};
