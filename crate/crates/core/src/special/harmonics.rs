//! Orthonormal complex spherical harmonics with the Condon–Shortley phase.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `P̄_n^m(cos θ)` for `n = m..=n_max`, normalized so that
/// `Y_n^m = P̄_n^m e^{imφ}` is orthonormal on the unit sphere.
pub fn normalized_legendre(m: u32, n_max: u32, theta: f64) -> Vec<f64> {
    if n_max < m {
        return Vec::new();
    }
    let (s, c) = theta.sin_cos();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for i in 1..=m {
        let i = i as f64;
        pmm *= -((2.0 * i + 1.0) / (2.0 * i)).sqrt() * s;
    }
    let mut out = vec![pmm];
    if n_max == m {
        return out;
    }
    let mf = m as f64;
    out.push((2.0 * mf + 3.0).sqrt() * c * pmm);
    for n in (m + 2)..=n_max {
        let nf = n as f64;
        let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
        let b = (((nf - 1.0) * (nf - 1.0) - mf * mf) / (4.0 * (nf - 1.0) * (nf - 1.0) - 1.0)).sqrt();
        let k = out.len();
        out.push(a * (c * out[k - 1] - b * out[k - 2]));
    }
    out
}

/// `θ`-derivatives of [`normalized_legendre`] values `p` (same indexing).
pub fn normalized_legendre_dtheta(m: u32, p: &[f64], theta: f64) -> Vec<f64> {
    let th = theta.clamp(1e-9, PI - 1e-9);
    let (s, c) = th.sin_cos();
    let mf = m as f64;
    (0..p.len())
        .map(|i| {
            let n = m as f64 + i as f64;
            let prev = if i == 0 { 0.0 } else { p[i - 1] };
            let coef = if i == 0 { 0.0 } else { ((2.0 * n + 1.0) / (2.0 * n - 1.0) * (n * n - mf * mf)).sqrt() };
            (n * c * p[i] - coef * prev) / s
        })
        .collect()
}

/// `Y_n^m(θ, φ)` and `∂_θ Y_n^m`.
pub fn spherical_harmonic(n: u32, m: i32, theta: f64, phi: f64) -> (Complex64, Complex64) {
    let am = m.unsigned_abs();
    if am > n {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let p = normalized_legendre(am, n, theta);
    let dp = normalized_legendre_dtheta(am, &p, theta);
    let i = (n - am) as usize;
    let e = Complex64::from_polar(1.0, am as f64 * phi);
    let (y, dy) = (p[i] * e, dp[i] * e);
    if m >= 0 {
        (y, dy)
    } else {
        let sgn = if am.is_multiple_of(2) { 1.0 } else { -1.0 };
        (sgn * y.conj(), sgn * dy.conj())
    }
}

/// `(r, θ, φ)` of a Cartesian point.
pub fn to_spherical(x: [f64; 3]) -> (f64, f64, f64) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let theta = if r == 0.0 { 0.0 } else { (x[2] / r).clamp(-1.0, 1.0).acos() };
    (r, theta, x[1].atan2(x[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    #[test]
    fn low_order_closed_forms() {
        let (th, ph) = (0.7, 1.1);
        let y10 = spherical_harmonic(1, 0, th, ph).0;
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * th.cos()).abs() < 1e-15);
        let y11 = spherical_harmonic(1, 1, th, ph).0;
        let expect = -(3.0 / (8.0 * PI)).sqrt() * th.sin() * Complex64::from_polar(1.0, ph);
        assert!((y11 - expect).norm() < 1e-15);
        let y1m1 = spherical_harmonic(1, -1, th, ph).0;
        assert!((y1m1 + y11.conj()).norm() < 1e-15);
    }

    #[test]
    fn orthonormal_on_the_sphere() {
        let (x, w) = gauss_legendre(24);
        let nphi = 32;
        let modes = [(0u32, 0i32), (2, 1), (3, -2), (5, 5), (4, 0)];
        for &(n1, m1) in &modes {
            for &(n2, m2) in &modes {
                let mut s = Complex64::new(0.0, 0.0);
                for (xi, wi) in x.iter().zip(&w) {
                    let th = xi.acos();
                    for j in 0..nphi {
                        let ph = 2.0 * PI * j as f64 / nphi as f64;
                        let a = spherical_harmonic(n1, m1, th, ph).0;
                        let b = spherical_harmonic(n2, m2, th, ph).0;
                        s += a * b.conj() * wi * (2.0 * PI / nphi as f64);
                    }
                }
                let expect = if (n1, m1) == (n2, m2) { 1.0 } else { 0.0 };
                assert!((s - expect).norm() < 1e-12, "{n1},{m1} vs {n2},{m2}: {s}");
            }
        }
    }

    #[test]
    fn theta_derivative_matches_finite_differences() {
        let h = 1e-6;
        for &(n, m) in &[(1u32, 0i32), (3, 2), (7, -3), (20, 11)] {
            let th = 0.9;
            let (_, d) = spherical_harmonic(n, m, th, 0.3);
            let fd = (spherical_harmonic(n, m, th + h, 0.3).0 - spherical_harmonic(n, m, th - h, 0.3).0) / (2.0 * h);
            assert!((d - fd).norm() < 1e-7, "{n},{m}");
        }
    }
}
