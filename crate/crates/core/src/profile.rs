//! Sampled self-similar profile `f(xi)`, `u(x, t) = f(|x| t^{-1/2})`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::params::Params;

/// Right end of the support of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportEdge {
    Finite(f64),
    /// The profile stays positive for all `xi` (orbits entering `P0`).
    Unbounded,
}

impl SupportEdge {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            SupportEdge::Finite(x) => Some(x),
            SupportEdge::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarProfile {
    pub params: Params,
    pub xi: Vec<f64>,
    pub f: Vec<f64>,
    pub edge: SupportEdge,
    /// Constant `K` of the logarithmic behavior at the origin.
    pub k_const: f64,
}

impl SelfSimilarProfile {
    /// Builds a profile after checking the grid and sign invariants.
    pub fn new(
        params: Params,
        xi: Vec<f64>,
        f: Vec<f64>,
        edge: SupportEdge,
        k_const: f64,
    ) -> Result<Self> {
        let prof = Self { params, xi, f, edge, k_const };
        prof.check()?;
        Ok(prof)
    }

    /// Grid strictly increasing and nonnegative, `f >= 0`, `f = 0` beyond a
    /// finite edge.
    pub fn check(&self) -> Result<()> {
        if self.xi.len() != self.f.len() {
            return Err(Error::InvalidInput("xi and f lengths differ"));
        }
        if self.xi.len() < 2 {
            return Err(Error::InvalidInput("profile needs at least two samples"));
        }
        if self.xi.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput("xi must be finite and nonnegative"));
        }
        if self.xi.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("xi must be strictly increasing"));
        }
        if self.f.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("f must be finite and nonnegative"));
        }
        if let SupportEdge::Finite(x0) = self.edge {
            if !(x0 > 0.0) {
                return Err(Error::InvalidInput("support edge must be positive"));
            }
            let outside = self.xi.iter().zip(&self.f).any(|(x, v)| *x >= x0 && *v != 0.0);
            if outside {
                return Err(Error::InvalidInput("f must vanish beyond the support edge"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Indices `i` with `f[i] > 0`.
    pub fn positive_len(&self) -> usize {
        self.f.iter().take_while(|v| **v > 0.0).count()
    }

    /// Largest `f` on the grid (attained at the first sample).
    pub fn f_max(&self) -> f64 {
        self.f.iter().copied().fold(0.0, f64::max)
    }

    /// Whether `f` strictly decreases over its positivity set, ignoring the
    /// last `skip_tail` positive samples.
    pub fn is_strictly_decreasing(&self, skip_tail: usize) -> bool {
        let n = self.positive_len().saturating_sub(skip_tail);
        self.f[..n].windows(2).all(|w| w[1] < w[0])
    }

    /// Evaluates the profile at `xi > 0`.
    ///
    /// Inside the grid the pressure `f^{m-1}` is interpolated linearly in
    /// `xi`, which keeps the result monotone and resolves the interface.
    /// Below the first sample the leading logarithmic behavior is continued
    /// from that sample, so the value diverges as `xi -> 0`.
    pub fn eval(&self, xi: f64) -> f64 {
        if !(xi > 0.0) {
            return f64::INFINITY;
        }
        if let SupportEdge::Finite(x0) = self.edge {
            if xi >= x0 {
                return 0.0;
            }
        }
        let m = self.params.m();
        let x_first = self.xi[0];
        if xi <= x_first {
            let f0 = self.f[0];
            if x_first <= 0.0 || f0 <= 0.0 {
                return f0;
            }
            let mp = m - self.params.p();
            let slope = self.params.log_slope() * self.params.k_hardy();
            let phi = f0.powf(mp) - slope * (xi / x_first).ln();
            return phi.powf(1.0 / mp);
        }
        let last = self.xi.len() - 1;
        if xi >= self.xi[last] {
            return match self.edge {
                SupportEdge::Unbounded => self.f[last],
                SupportEdge::Finite(x0) => {
                    // between the last sample and the edge
                    let v = self.f[last].powf(m - 1.0) * (x0 - xi) / (x0 - self.xi[last]);
                    v.max(0.0).powf(1.0 / (m - 1.0))
                }
            };
        }
        let j = self.xi.partition_point(|x| *x <= xi) - 1;
        let (xa, xb) = (self.xi[j], self.xi[j + 1]);
        let (va, vb) = (self.f[j].powf(m - 1.0), self.f[j + 1].powf(m - 1.0));
        let t = (xi - xa) / (xb - xa);
        let v = va + t * (vb - va);
        v.max(0.0).powf(1.0 / (m - 1.0))
    }

    /// The profile of the same exponents with Hardy constant `k_hardy`,
    /// `f_K(xi) = lambda^{1/(m-1)} f(xi / sqrt(lambda))` with
    /// `lambda = (K/K_0)^{(m-1)/(m-p)}`.
    pub fn hardy_rescaled(&self, k_hardy: f64) -> Result<Self> {
        let params = self.params.with_k_hardy(k_hardy)?;
        let (m, p) = (params.m(), params.p());
        let ratio = k_hardy / self.params.k_hardy();
        let lambda = ratio.powf((m - 1.0) / (m - p));
        let (sx, sf) = (lambda.sqrt(), lambda.powf(1.0 / (m - 1.0)));
        let edge = match self.edge {
            SupportEdge::Finite(x0) => SupportEdge::Finite(x0 * sx),
            SupportEdge::Unbounded => SupportEdge::Unbounded,
        };
        let c = self.params.log_slope() * self.params.k_hardy();
        Self::new(
            params,
            self.xi.iter().map(|x| x * sx).collect(),
            self.f.iter().map(|f| f * sf).collect(),
            edge,
            ratio * (self.k_const + c * sx.ln()),
        )
    }

    /// Smallest sample `xi` with `f(xi) <= level`, if any.
    pub fn first_below(&self, level: f64) -> Option<f64> {
        self.xi.iter().zip(&self.f).find(|(_, v)| **v <= level).map(|(x, _)| *x)
    }
}
