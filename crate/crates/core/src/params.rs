//! Exponents and dimension of the equation.

use crate::error::{Error, Result};

/// Validated exponent triple `(m, p, N)` with the Hardy constant.
///
/// The self-similar exponents of the equation are `alpha = 0` and
/// `beta = 1/2` for every admissible triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    m: f64,
    p: f64,
    n: u32,
    k_hardy: f64,
}

impl Params {
    pub const ALPHA: f64 = 0.0;
    pub const BETA: f64 = 0.5;

    /// Checks `m > 1`, `1 <= p < m`, `N >= 3`, `K > 0`.
    pub fn new(m: f64, p: f64, n: u32, k_hardy: f64) -> Result<Self> {
        if !(m > 1.0) || !m.is_finite() {
            return Err(Error::OutOfRange { name: "m", value: m, reason: "need m > 1" });
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::OutOfRange { name: "p", value: p, reason: "need p >= 1" });
        }
        if p >= m {
            return Err(Error::OutOfRange { name: "p", value: p, reason: "need p < m" });
        }
        if n < 3 {
            return Err(Error::OutOfRange { name: "N", value: n as f64, reason: "need N >= 3" });
        }
        if !(k_hardy > 0.0) || !k_hardy.is_finite() {
            return Err(Error::OutOfRange {
                name: "K_hardy",
                value: k_hardy,
                reason: "need K_hardy > 0",
            });
        }
        Ok(Self { m, p, n, k_hardy })
    }

    /// Unit Hardy constant.
    pub fn unit(m: f64, p: f64, n: u32) -> Result<Self> {
        Self::new(m, p, n, 1.0)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Dimension as a float.
    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn k_hardy(&self) -> f64 {
        self.k_hardy
    }

    /// Same exponents with the Hardy constant replaced.
    pub fn with_k_hardy(&self, k_hardy: f64) -> Result<Self> {
        Self::new(self.m, self.p, self.n, k_hardy)
    }

    /// `L = 2(p - m) < 0`.
    pub fn l(&self) -> f64 {
        2.0 * (self.p - self.m)
    }

    /// Coefficient `(m - p) / (m (N - 2))` of `-ln xi` in the origin behavior.
    pub fn log_slope(&self) -> f64 {
        (self.m - self.p) / (self.m * (self.nf() - 2.0))
    }

    /// Exponent `1/(m-1)` of the interface behavior.
    pub fn interface_exponent(&self) -> f64 {
        1.0 / (self.m - 1.0)
    }

    /// Amplitude `((m-1)/(4m))^{1/(m-1)}` of the interface behavior.
    pub fn interface_amplitude(&self) -> f64 {
        use num_traits::Float;
        ((self.m - 1.0) / (4.0 * self.m)).powf(self.interface_exponent())
    }

    /// Whether `p == 1`, where the point `P1` becomes a critical line.
    pub fn is_linear_reaction(&self) -> bool {
        self.p == 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_admissible_triple() {
        let p = Params::new(2.0, 1.0, 3, 1.0).unwrap();
        assert_eq!(p.l(), -2.0);
        assert_eq!(Params::ALPHA, 0.0);
        assert_eq!(Params::BETA, 0.5);
    }

    #[test]
    fn rejects_p_equal_m() {
        assert!(matches!(
            Params::new(2.0, 2.0, 3, 1.0),
            Err(Error::OutOfRange { name: "p", .. })
        ));
    }

    #[test]
    fn rejects_low_dimension() {
        assert!(matches!(
            Params::new(1.5, 1.2, 2, 1.0),
            Err(Error::OutOfRange { name: "N", .. })
        ));
    }

    #[test]
    fn rejects_remaining_violations() {
        assert!(Params::new(1.0, 1.0, 3, 1.0).is_err());
        assert!(Params::new(2.0, 0.5, 3, 1.0).is_err());
        assert!(Params::new(2.0, 1.0, 3, 0.0).is_err());
        assert!(Params::new(2.0, 1.0, 3, -1.0).is_err());
        assert!(Params::new(f64::NAN, 1.0, 3, 1.0).is_err());
    }

    #[test]
    fn derived_constants() {
        let p = Params::unit(2.0, 1.0, 3).unwrap();
        assert_eq!(p.log_slope(), 0.5);
        assert_eq!(p.interface_amplitude(), 0.125);
        assert!(p.is_linear_reaction());
    }
}
