//! Spherical `j_n`, `y_n`: ascending series for `|z|²/4 ≤ n + 1`; otherwise
//! Miller's recurrence for `j_n` normalized against closed-form `j_0`, `j_1`,
//! and `y_n` from the forward-recurred spherical Hankel function.

use num_complex::Complex64;

use super::scaled::Scaled;
use super::ln_factorial;

const BIG: f64 = 1e200;
const MAX_TERMS: usize = 2000;

/// `[j_n, j_{n+1}, y_n, y_{n+1}]`; the `y` entries are zero unless `want_y`.
pub(super) fn evaluate(n: u32, z: Complex64, want_y: bool) -> [Scaled; 4] {
    if z.im < 0.0 {
        return evaluate(n, z.conj(), want_y).map(|s| s.conj());
    }
    let x = (z * z * 0.25).norm();
    let series = x <= n as f64 + 1.0;
    let (j, j1) = if series { (j_series(n, z), j_series(n + 1, z)) } else { miller(n, z) };
    if !want_y {
        return [j, j1, Scaled::ZERO, Scaled::ZERO];
    }
    let (y, y1) = if series { (y_series(n, z), y_series(n + 1, z)) } else { y_forward(n, z, j, j1) };
    [j, j1, y, y1]
}

/// `ln (2n+1)!!`
fn ln_double_factorial_odd(n: u32) -> f64 {
    let n = n as usize;
    ln_factorial(2 * n + 1) - n as f64 * std::f64::consts::LN_2 - ln_factorial(n)
}

fn j_series(n: u32, z: Complex64) -> Scaled {
    let mx = -(z * z) * 0.5;
    let mut t = Complex64::new(1.0, 0.0);
    let mut sum = t;
    for k in 1..MAX_TERMS {
        t = t * mx / (k as f64 * (2 * n as usize + 2 * k + 1) as f64);
        sum += t;
        if t.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    (Scaled::powi(z, n as i64) * sum).scale_ln(-ln_double_factorial_odd(n))
}

fn y_series(n: u32, z: Complex64) -> Scaled {
    let mx = -(z * z) * 0.5;
    let mut t = Complex64::new(1.0, 0.0);
    let mut sum = t;
    for k in 1..MAX_TERMS {
        t = t * mx / (k as f64 * (2.0 * k as f64 - 1.0 - 2.0 * n as f64));
        sum += t;
        if k > n as usize && t.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    // y_n = −(2n−1)!! z^{−n−1} Σ
    let ln_dfact = if n == 0 { 0.0 } else { ln_double_factorial_odd(n - 1) };
    -(Scaled::powi(z, -(n as i64) - 1) * sum).scale_ln(ln_dfact)
}

/// `(sin z, cos z) · e^{−|Im z|}`.
fn trig_scaled(z: Complex64) -> (Complex64, Complex64) {
    let (x, y) = (z.re, z.im);
    let e = (-2.0 * y.abs()).exp();
    let ch = 0.5 * (1.0 + e);
    let sh = 0.5 * (1.0 - e) * y.signum();
    let s = Complex64::new(x.sin() * ch, x.cos() * sh);
    let c = Complex64::new(x.cos() * ch, -x.sin() * sh);
    (s, c)
}

fn closed_j01(z: Complex64) -> (Complex64, Complex64, f64) {
    let (s, c) = trig_scaled(z);
    let zi = z.inv();
    (s * zi, s * zi * zi - c * zi, z.im.abs())
}

fn miller(n: u32, z: Complex64) -> (Scaled, Scaled) {
    let zi = z.inv();
    let step = |k: usize| (2 * k + 1) as f64 * zi;
    let m0 = (n as usize + 1).max(z.norm() as usize + 1);
    let (mut p0, mut p1) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut k = m0;
    while p1.norm() < 1e20 && k < m0 + 10_000 {
        let p2 = step(k) * p1 - p0;
        p0 = p1;
        p1 = p2;
        k += 1;
    }
    let top = k + 10;

    let mut f_next = Complex64::new(0.0, 0.0);
    let mut f = Complex64::new(1.0, 0.0);
    let mut rescales = 0i32;
    let mut rec_n = (Complex64::new(0.0, 0.0), 0i32);
    let mut rec_n1 = (Complex64::new(0.0, 0.0), 0i32);
    let mut k = top;
    loop {
        if k == n as usize {
            rec_n = (f, rescales);
        } else if k == n as usize + 1 {
            rec_n1 = (f, rescales);
        }
        if k == 0 {
            break;
        }
        let f_prev = step(k) * f - f_next;
        f_next = f;
        f = f_prev;
        k -= 1;
        if f.norm() > BIG {
            f /= BIG;
            f_next /= BIG;
            rescales += 1;
        }
    }
    // least-squares fit of (f_0, f_1) to the closed forms
    let (j0, j1, ln_e) = closed_j01(z);
    let lambda = (j0 * f.conj() + j1 * f_next.conj()) / (f.norm_sqr() + f_next.norm_sqr());
    let unit = |(v, c): (Complex64, i32)| Scaled::new(v * lambda, ln_e - ((rescales - c) as f64) * BIG.ln());
    (unit(rec_n), unit(rec_n1))
}

/// `y_n = −i (h_n^{(1)} − j_n)` with `h^{(1)}` recurred forward from its
/// closed forms; `h^{(1)}` dominates in the forward direction for `Im z ≥ 0`.
fn y_forward(n: u32, z: Complex64, j: Scaled, j1: Scaled) -> (Scaled, Scaled) {
    let zi = z.inv();
    let i = Complex64::new(0.0, 1.0);
    // e^{iz} = e^{−Im z} e^{i Re z}
    let e = Complex64::from_polar(1.0, z.re);
    let mut a = -i * e * zi;
    let mut b = -e * (z + i) * zi * zi;
    let mut ln_s = -z.im;
    for k in 1..=n as usize {
        let next = (2 * k + 1) as f64 * zi * b - a;
        a = b;
        b = next;
        if b.norm() > BIG {
            a /= BIG;
            b /= BIG;
            ln_s += BIG.ln();
        }
    }
    let mi = -i;
    (Scaled::new(a, ln_s).sub(j) * mi, Scaled::new(b, ln_s).sub(j1) * mi)
}

/// Largest relative gap between the power series and the recurrence path
/// for `j_n(z)`, `y_n(z)` (upper half-plane `z`).
pub(crate) fn series_recurrence_gap(n: u32, z: Complex64) -> f64 {
    let z = if z.im < 0.0 { z.conj() } else { z };
    let (jn, jn1) = miller(n, z);
    let (y, _) = y_forward(n, z, jn, jn1);
    let j = (jn.ratio(j_series(n, z)) - 1.0).norm();
    let y = (y.ratio(y_series(n, z)) - 1.0).norm();
    j.max(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_zero_closed_forms() {
        for z in [Complex64::new(0.3, 0.0), Complex64::new(5.0, 2.0), Complex64::new(40.0, 0.1)] {
            let [j, _, y, _] = evaluate(0, z, true);
            let jz = z.sin() / z;
            let yz = -z.cos() / z;
            assert!((j.value() - jz).norm() / jz.norm() < 1e-13);
            assert!((y.value() - yz).norm() / yz.norm() < 1e-13);
        }
    }

    #[test]
    fn series_and_recurrence_agree_near_the_switch() {
        for n in [0u32, 2, 9, 30] {
            for arg in [0.0, 0.5, 1.2] {
                let z = Complex64::from_polar(2.0 * ((n + 1) as f64).sqrt(), arg);
                let (a, _) = miller(n, z);
                let b = j_series(n, z);
                assert!((a.ratio(b) - 1.0).norm() < 1e-12, "j n={n} z={z}");
                let (jn, jn1) = miller(n, z);
                let (a, _) = y_forward(n, z, jn, jn1);
                let b = y_series(n, z);
                assert!((a.ratio(b) - 1.0).norm() < 1e-11, "y n={n} z={z}");
            }
        }
    }
}
