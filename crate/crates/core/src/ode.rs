//! Adaptive Dormand–Prince 5(4) integrator with dense output.
//!
//! Used for every ODE in the crate: the phase-space systems, the chart at
//! infinity and the profile equation. The caller observes each accepted step
//! and decides whether to continue, which is how event detection is done.

use num_traits::Float;

use crate::error::{Error, Result};

/// `dy/dt = rhs(t, y)` on `R^D`.
pub trait OdeSystem<const D: usize> {
    fn rhs(&self, t: f64, y: &[f64; D]) -> [f64; D];

    /// Called after each accepted step; may clamp round-off that violates an
    /// invariant of the system. Returns whether `y` was modified.
    fn project(&self, _y: &mut [f64; D]) -> bool {
        false
    }
}

impl<const D: usize, F> OdeSystem<D> for F
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    fn rhs(&self, t: f64, y: &[f64; D]) -> [f64; D] {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    /// Sup-norm beyond which integration fails with `BlowupDetected`.
    pub blowup_norm: f64,
}

impl Default for Controls {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
            blowup_norm: f64::INFINITY,
        }
    }
}

impl Controls {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct Step<const D: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
    rcont: [[f64; D]; 4],
}

impl<const D: usize> Step<D> {
    /// Fourth-order dense output for `t` in `[t0, t1]`.
    pub fn interpolate(&self, t: f64) -> [f64; D] {
        let h = self.t1 - self.t0;
        let th = if h != 0.0 { (t - self.t0) / h } else { 0.0 };
        let th1 = 1.0 - th;
        let [r2, r3, r4, r5] = &self.rcont;
        let mut out = [0.0; D];
        for i in 0..D {
            out[i] = self.y0[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
        out
    }

    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }
}

/// Returned by the step observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    /// Reached `t_end`.
    Reached,
    /// The observer asked to stop.
    Stopped,
    /// Ran out of the step budget.
    MaxSteps,
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
    pub steps: usize,
    pub rejected: usize,
    pub end: End,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..D {
            out[i] += hc * k[i];
        }
    }
    out
}

fn sup_norm<const D: usize>(y: &[f64; D]) -> f64 {
    y.iter().fold(0.0, |a, v| a.max(v.abs()))
}

fn wrms<const D: usize>(v: &[f64; D], y: &[f64; D], c: &Controls) -> f64 {
    let mut s = 0.0;
    for i in 0..D {
        let sc = c.atol + c.rtol * y[i].abs();
        s += (v[i] / sc) * (v[i] / sc);
    }
    (s / D as f64).sqrt()
}

fn initial_step<const D: usize, S: OdeSystem<D> + ?Sized>(
    sys: &S,
    t0: f64,
    y0: &[f64; D],
    f0: &[f64; D],
    c: &Controls,
) -> f64 {
    let d0 = wrms(y0, y0, c);
    let d1 = wrms(f0, y0, c);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = sys.rhs(t0 + h0, &y1);
    let mut diff = [0.0; D];
    for i in 0..D {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = wrms(&diff, y0, c) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(c.h_max)
}

/// Integrates forward from `t0` towards `t_end` (which may be infinite),
/// handing every accepted step to `observer`.
pub fn integrate<const D: usize, S, F>(
    sys: &S,
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    controls: &Controls,
    mut observer: F,
) -> Result<Outcome<D>>
where
    S: OdeSystem<D> + ?Sized,
    F: FnMut(&Step<D>) -> Flow,
{
    if !(t_end >= t0) {
        return Err(Error::InvalidInput("integration runs forward only"));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = sys.rhs(t, &y);
    let mut h = controls
        .h_init
        .unwrap_or_else(|| initial_step(sys, t, &y, &k1, controls))
        .min(controls.h_max);
    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut last_rejected = false;

    while t < t_end {
        if steps >= controls.max_steps {
            return Ok(Outcome { t, y, steps, rejected, end: End::MaxSteps });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        if h <= f64::EPSILON * t.abs().max(1e-300) * 4.0 || h <= 1e-300 {
            return Err(Error::StepFailure { t });
        }

        let k2 = sys.rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = sys.rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = sys.rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = sys.rhs(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = sys.rhs(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = sys.rhs(t + h, &y1);

        let mut err = [0.0; D];
        for i in 0..D {
            err[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let mut scale = [0.0; D];
        for i in 0..D {
            scale[i] = y[i].abs().max(y1[i].abs());
        }
        let e = wrms(&err, &scale, controls);

        if !e.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            h *= 0.2;
            rejected += 1;
            last_rejected = true;
            continue;
        }

        if e <= 1.0 {
            let mut rcont = [[0.0; D]; 4];
            for i in 0..D {
                let ydiff = y1[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[0][i] = ydiff;
                rcont[1][i] = bspl;
                rcont[2][i] = ydiff - h * k7[i] - bspl;
                rcont[3][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]);
            }
            let mut y_new = y1;
            let projected = sys.project(&mut y_new);
            let step = Step { t0: t, t1: t + h, y0: y, y1: y_new, rcont };
            t += h;
            y = y_new;
            k1 = if projected { sys.rhs(t, &y) } else { k7 };
            steps += 1;

            let norm = sup_norm(&y);
            if norm > controls.blowup_norm {
                return Err(Error::BlowupDetected { t, norm });
            }
            if observer(&step) == Flow::Stop {
                return Ok(Outcome { t, y, steps, rejected, end: End::Stopped });
            }
            let mut fac = 0.9 * e.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(controls.h_max);
            last_rejected = false;
        } else {
            let fac = (0.9 * e.powf(-0.2)).max(0.2);
            h *= fac;
            rejected += 1;
            last_rejected = true;
        }
    }
    Ok(Outcome { t, y, steps, rejected, end: End::Reached })
}

/// Locates `t` in `[step.t0, step.t1]` where `g(interpolate(t))` changes
/// sign, by bisection on the dense output. `g` must have opposite signs at
/// the two ends.
pub fn locate_event<const D: usize, G>(step: &Step<D>, g: G, tol: f64) -> f64
where
    G: Fn(&[f64; D]) -> f64,
{
    let (mut a, mut b) = (step.t0, step.t1);
    let ga = g(&step.y0);
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + a.abs()) {
            break;
        }
        let mid = 0.5 * (a + b);
        let gm = g(&step.interpolate(mid));
        if (gm > 0.0) == (ga > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
