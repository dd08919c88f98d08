//! Small dense 3×3 linear algebra: characteristic polynomial, eigenvalues
//! and eigenvectors.

use num_complex::Complex64;
use num_traits::Float;

pub type Mat3 = [[f64; 3]; 3];
pub type CVec3 = [Complex64; 3];

/// Coefficients `(a, b, c)` of the monic characteristic polynomial
/// `λ³ + a λ² + b λ + c`.
pub fn char_poly(m: &Mat3) -> (f64, f64, f64) {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    (-tr, minors, -det(m))
}

pub fn det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Evaluates the characteristic polynomial at a complex point.
pub fn char_poly_eval(m: &Mat3, lambda: Complex64) -> Complex64 {
    let (a, b, c) = char_poly(m);
    ((lambda + a) * lambda + b) * lambda + c
}

fn is_upper(m: &Mat3) -> bool {
    m[1][0] == 0.0 && m[2][0] == 0.0 && m[2][1] == 0.0
}

fn is_lower(m: &Mat3) -> bool {
    m[0][1] == 0.0 && m[0][2] == 0.0 && m[1][2] == 0.0
}

/// Real root of a monic cubic by bisection followed by Newton polishing.
fn cubic_real_root(a: f64, b: f64, c: f64) -> f64 {
    let p = |x: f64| ((x + a) * x + b) * x + c;
    let dp = |x: f64| (3.0 * x + 2.0 * a) * x + b;
    let bound = 1.0 + a.abs().max(b.abs()).max(c.abs());
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * bound {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d = dp(x);
        if d == 0.0 {
            break;
        }
        let nx = x - p(x) / d;
        if (p(nx)).abs() < p(x).abs() {
            x = nx;
        } else {
            break;
        }
    }
    x
}

/// Roots of `x² + b x + c` avoiding cancellation.
fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + if b >= 0.0 { s } else { -s });
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        }
        [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// Roots of the characteristic polynomial.
pub fn char_poly_roots(m: &Mat3) -> [Complex64; 3] {
    let (a, b, c) = char_poly(m);
    let r = cubic_real_root(a, b, c);
    // deflate: x² + (a + r) x + (b + r (a + r))
    let b2 = a + r;
    let c2 = b + r * b2;
    let [q1, q2] = quadratic_roots(b2, c2);
    let mut roots = [Complex64::new(r, 0.0), q1, q2];
    for z in roots.iter_mut() {
        // Newton polish on the full cubic
        for _ in 0..3 {
            let pv = ((*z + a) * *z + b) * *z + c;
            let dv = (*z * 3.0 + 2.0 * a) * *z + b;
            if dv.norm() == 0.0 {
                break;
            }
            let nz = *z - pv / dv;
            let npv = ((nz + a) * nz + b) * nz + c;
            if npv.norm() < pv.norm() {
                *z = nz;
            } else {
                break;
            }
        }
    }
    roots
}

/// Eigenvalues of `m`. Triangular matrices return their diagonal exactly;
/// otherwise the characteristic polynomial is solved.
pub fn eigenvalues(m: &Mat3) -> [Complex64; 3] {
    if is_upper(m) || is_lower(m) {
        return [
            Complex64::new(m[0][0], 0.0),
            Complex64::new(m[1][1], 0.0),
            Complex64::new(m[2][2], 0.0),
        ];
    }
    char_poly_roots(m)
}

fn cross(a: &CVec3, b: &CVec3) -> CVec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(v: &CVec3) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

fn normalized(v: CVec3) -> CVec3 {
    let n = norm(&v);
    if n == 0.0 {
        return v;
    }
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Basis of the null space of `m - λ I`, at most three vectors.
fn null_space(m: &Mat3, lambda: Complex64) -> alloc::vec::Vec<CVec3> {
    let scale = m.iter().flatten().fold(lambda.norm(), |a, v| a.max(v.abs())).max(1.0);
    let rows: [CVec3; 3] = core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            let d = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
            Complex64::new(m[i][j], 0.0) - d
        })
    });
    let tol = 1e-10 * scale;
    let crosses = [cross(&rows[0], &rows[1]), cross(&rows[0], &rows[2]), cross(&rows[1], &rows[2])];
    let best = crosses
        .iter()
        .copied()
        .max_by(|a, b| norm(a).partial_cmp(&norm(b)).unwrap_or(core::cmp::Ordering::Equal))
        .unwrap();
    if norm(&best) > tol * tol {
        return alloc::vec![normalized(best)];
    }
    let row = rows
        .iter()
        .copied()
        .max_by(|a, b| norm(a).partial_cmp(&norm(b)).unwrap_or(core::cmp::Ordering::Equal))
        .unwrap();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if norm(&row) <= tol {
        return alloc::vec![[one, zero, zero], [zero, one, zero], [zero, zero, one]];
    }
    // two independent vectors v with row · v = 0
    let cands = [
        [row[1], -row[0], zero],
        [row[2], zero, -row[0]],
        [zero, row[2], -row[1]],
    ];
    let mut picked: alloc::vec::Vec<CVec3> = alloc::vec::Vec::new();
    let mut order = [0usize, 1, 2];
    order.sort_by(|a, b| norm(&cands[*b]).partial_cmp(&norm(&cands[*a])).unwrap_or(core::cmp::Ordering::Equal));
    for i in order {
        let v = normalized(cands[i]);
        if norm(&cands[i]) <= tol {
            continue;
        }
        if picked.iter().all(|p| norm(&cross(p, &v)) > 1e-8) {
            picked.push(v);
        }
        if picked.len() == 2 {
            break;
        }
    }
    picked
}

/// Unit eigenvectors paired with the given eigenvalues. Repeated
/// eigenvalues with a multi-dimensional eigenspace receive distinct
/// vectors; defective ones repeat the single available direction.
pub fn eigenvectors(m: &Mat3, eigenvalues: &[Complex64; 3]) -> [CVec3; 3] {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        let lambda = eigenvalues[i];
        let rank_before = (0..i)
            .filter(|&j| (eigenvalues[j] - lambda).norm() <= 1e-12 * lambda.norm().max(1.0))
            .count();
        let basis = null_space(m, lambda);
        out[i] = basis[rank_before.min(basis.len() - 1)];
    }
    out
}

/// `m v`.
pub fn mat_vec(m: &Mat3, v: &CVec3) -> CVec3 {
    core::array::from_fn(|i| (0..3).map(|j| v[j] * m[i][j]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(m: &Mat3, lambda: Complex64, v: &CVec3) -> f64 {
        let mv = mat_vec(m, v);
        (0..3).map(|i| (mv[i] - v[i] * lambda).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn general_matrix_roots_satisfy_polynomial() {
        let m = [[1.0, 2.0, 0.5], [-3.0, 0.2, 1.0], [0.7, -1.1, 2.5]];
        let ev = eigenvalues(&m);
        let evec = eigenvectors(&m, &ev);
        for i in 0..3 {
            assert!(char_poly_eval(&m, ev[i]).norm() < 1e-10);
            assert!(residual(&m, ev[i], &evec[i]) < 1e-9);
        }
        let tr: Complex64 = ev.iter().sum();
        assert!((tr.re - 3.7).abs() < 1e-12 && tr.im.abs() < 1e-12);
    }

    #[test]
    fn diagonal_with_repeated_eigenvalue_gets_two_vectors() {
        let m = [[0.0, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, 0.0]];
        let ev = eigenvalues(&m);
        let evec = eigenvectors(&m, &ev);
        for i in 0..3 {
            assert!(residual(&m, ev[i], &evec[i]) < 1e-14);
        }
        assert!(norm(&cross(&evec[0], &evec[2])) > 0.5);
    }

    #[test]
    fn triangular_route_agrees_with_polynomial_route() {
        let m = [[1.0, -1.0, 0.25], [0.0, 0.5, 0.0], [0.0, 0.0, 2.5]];
        let tri = eigenvalues(&m);
        let poly = char_poly_roots(&m);
        for t in tri {
            assert!(poly.iter().any(|p| (*p - t).norm() < 1e-10));
        }
    }
}
