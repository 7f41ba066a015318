//! `J_n`, `Y_n` by ascending series for `|z|²/4 ≤ n + 1` and by Miller's
//! backward recurrence with Neumann-series normalization otherwise.
//! Off the real axis `Y_n` is recovered from `H_n^{(1)}`.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use super::scaled::Scaled;
use super::{ln_factorial, EULER_GAMMA};

const BIG: f64 = 1e200;
const MAX_TERMS: usize = 2000;

/// `[J_n, J_{n+1}, Y_n, Y_{n+1}]`; the `Y` entries are zero unless `want_y`.
pub(super) fn evaluate(n: u32, z: Complex64, want_y: bool) -> [Scaled; 4] {
    if z.im < 0.0 {
        return evaluate(n, z.conj(), want_y).map(|s| s.conj());
    }
    let x = (z * z * 0.25).norm();
    if x <= n as f64 + 1.0 {
        let j = j_series(n, z);
        let j1 = j_series(n + 1, z);
        if !want_y {
            return [j, j1, Scaled::ZERO, Scaled::ZERO];
        }
        return [j, j1, y_series(n, z), y_series(n + 1, z)];
    }
    miller(n, z, want_y)
}

/// Terms `(−z²/4)^k / (k! (n+1)_k)` of the normalized series.
fn series_terms(n: u32, z: Complex64) -> Vec<Complex64> {
    let mx = -(z * z) * 0.25;
    let mut terms = vec![Complex64::new(1.0, 0.0)];
    let mut t = Complex64::new(1.0, 0.0);
    let mut sum = t;
    for k in 1..MAX_TERMS {
        t = t * mx / (k as f64 * (n as f64 + k as f64));
        sum += t;
        terms.push(t);
        if t.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    terms
}

fn j_series(n: u32, z: Complex64) -> Scaled {
    let s: Complex64 = series_terms(n, z).iter().sum();
    (Scaled::powi(z * 0.5, n as i64) * s).scale_ln(-ln_factorial(n as usize))
}

fn y_series(n: u32, z: Complex64) -> Scaled {
    let half = z * 0.5;
    let log2 = 2.0 * half.ln();
    let x = z * z * 0.25;
    // ψ(m) = −γ + H_{m−1}; track H_k and H_{n+k}
    let mut h_k = 0.0;
    let mut h_nk: f64 = (1..=n).map(|j| 1.0 / j as f64).sum();
    let mut bc = Complex64::new(0.0, 0.0);
    for (k, c) in series_terms(n, z).iter().enumerate() {
        if k > 0 {
            h_k += 1.0 / k as f64;
            h_nk += 1.0 / (n as usize + k) as f64;
        }
        bc += c * (log2 + 2.0 * EULER_GAMMA - h_k - h_nk);
    }
    let bc = (Scaled::powi(half, n as i64) * bc).scale_ln(-ln_factorial(n as usize)) * (1.0 / PI);
    if n == 0 {
        return bc;
    }
    let mut e = Complex64::new(1.0, 0.0);
    let mut a = e;
    for k in 0..(n as usize - 1) {
        e = e * x / ((k + 1) as f64 * (n as usize - k - 1) as f64);
        a += e;
    }
    let a = (Scaled::powi(half, -(n as i64)) * a).scale_ln(ln_factorial(n as usize - 1)) * (-1.0 / PI);
    a.add(bc)
}

/// Starting index for the backward recurrence: first order past
/// `max(n, |z|)` where the forward-recurred trial solution exceeds 1e20.
fn start_index(n: u32, z: Complex64, step: impl Fn(usize) -> Complex64) -> usize {
    let m0 = (n as usize + 1).max(z.norm() as usize + 1);
    let (mut p0, mut p1) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut k = m0;
    while p1.norm() < 1e20 && k < m0 + 10_000 {
        let p2 = step(k) * p1 - p0;
        p0 = p1;
        p1 = p2;
        k += 1;
    }
    k + 10
}

fn miller(n: u32, z: Complex64, want_y: bool) -> [Scaled; 4] {
    let lnbig = BIG.ln();
    let zi = z.inv();
    let top = start_index(n, z, |k| 2.0 * k as f64 * zi);
    let mi = Complex64::new(0.0, -1.0);

    let mut f_next = Complex64::new(0.0, 0.0);
    let mut f = Complex64::new(1.0, 0.0);
    let mut rescales = 0i32;
    let mut rec_n = (Complex64::new(0.0, 0.0), 0i32);
    let mut rec_n1 = (Complex64::new(0.0, 0.0), 0i32);
    let (mut e_sum, mut y0s, mut y1s) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));

    let mut k = top;
    loop {
        // f holds f_k
        if k == n as usize {
            rec_n = (f, rescales);
        } else if k == n as usize + 1 {
            rec_n1 = (f, rescales);
        }
        let w = if k == 0 { 1.0 } else { 2.0 };
        e_sum += w * mi.powu(k as u32 % 4) * f;
        if k >= 2 && k % 2 == 0 {
            let h = (k / 2) as f64;
            let sgn = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            y0s += sgn * f / h;
        } else if k >= 3 {
            let j = ((k - 1) / 2) as f64;
            let sgn = if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            y1s += sgn * (2.0 * j + 1.0) * f / (j * (j + 1.0));
        }
        if k == 0 {
            break;
        }
        let f_prev = 2.0 * k as f64 * zi * f - f_next;
        f_next = f;
        f = f_prev;
        k -= 1;
        if f.norm() > BIG {
            f /= BIG;
            f_next /= BIG;
            e_sum /= BIG;
            y0s /= BIG;
            y1s /= BIG;
            rescales += 1;
        }
    }
    // f = f_0, f_next = f_1 in final units
    let norm = Scaled::exp(mi * z) * e_sum.inv();
    let unit = |(v, c): (Complex64, i32)| Scaled::new(v, -((rescales - c) as f64) * lnbig) * norm;
    let j = unit(rec_n);
    let j1 = unit(rec_n1);
    if !want_y {
        return [j, j1, Scaled::ZERO, Scaled::ZERO];
    }
    let (y, y1) = if z.im <= 1.0 {
        let l = (z * 0.5).ln() + EULER_GAMMA;
        let y0 = norm * ((l * f - 2.0 * y0s) * FRAC_2_PI);
        let y1 = norm * ((-f * zi + (l - 1.0) * f_next - y1s) * FRAC_2_PI);
        forward(n, z, y0, y1)
    } else {
        // Y_0 from the Neumann sum carries an absolute error of order
        // eps |J_0| ~ eps e^{Im z}, which the forward recurrence amplifies by
        // e^{2 Im z}; go through H^{(1)}, the forward-dominant solution
        // W(J_0, H_0) = 2i/(πz) with H_0' = g H_0 and J_0' = −J_1
        let g = hankel_log_derivative(z);
        let h0 = ((norm * f) * g).add(norm * f_next).recip() * (Complex64::new(0.0, 2.0 / PI) * zi);
        let (hn, hn1) = forward(n, z, h0, h0 * (-g));
        (hn.sub(j) * mi, hn1.sub(j1) * mi)
    };
    [j, j1, y, y1]
}

/// `H_0^{(1)}'(z) / H_0^{(1)}(z)` by Steed's continued fraction, for
/// `Im z ≥ 0` and `|z|` not small.
fn hankel_log_derivative(z: Complex64) -> Complex64 {
    // complex division squares magnitudes, so `tiny` must stay above 1e-154
    let tiny = Complex64::new(1e-150, 0.0);
    let mut f = tiny;
    let mut c = tiny;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..10_000 {
        let a = ((2 * k - 1) as f64 * 0.5).powi(2);
        let b = 2.0 * (z + Complex64::new(0.0, k as f64));
        d = b + a * d;
        d = if d.norm() == 0.0 { tiny.inv() } else { d.inv() };
        c = b + a / c;
        if c.norm() == 0.0 {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    -0.5 * z.inv() + Complex64::new(0.0, 1.0) + Complex64::new(0.0, 1.0) * z.inv() * f
}

/// Forward recurrence `Z_{k+1} = (2k/z) Z_k − Z_{k−1}` from orders 0 and 1
/// up to `(Z_n, Z_{n+1})`, with rescaling.
fn forward(n: u32, z: Complex64, y0: Scaled, y1: Scaled) -> (Scaled, Scaled) {
    let zi = z.inv();
    let s = y0.ln_scale.max(y1.ln_scale);
    let mut a = y0.scale_ln(-s).value();
    let mut b = y1.scale_ln(-s).value();
    let mut ln_s = s;
    for k in 1..=n as usize {
        let c = 2.0 * k as f64 * zi * b - a;
        a = b;
        b = c;
        if b.norm() > BIG {
            a /= BIG;
            b /= BIG;
            ln_s += BIG.ln();
        }
    }
    (Scaled::new(a, ln_s), Scaled::new(b, ln_s))
}

/// Largest relative gap between the power series and the recurrence path
/// for `J_n(z)`, `Y_n(z)` (upper half-plane `z`).
pub(crate) fn series_recurrence_gap(n: u32, z: Complex64) -> f64 {
    let z = if z.im < 0.0 { z.conj() } else { z };
    let m = miller(n, z, true);
    let j = (m[0].ratio(j_series(n, z)) - 1.0).norm();
    let y = (m[2].ratio(y_series(n, z)) - 1.0).norm();
    j.max(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_recurrence_agree_near_the_switch() {
        // both paths are valid near |z|²/4 = n + 1
        for n in [0u32, 1, 4, 15] {
            for arg in [0.0, 0.4, -1.0] {
                let r = 2.0 * ((n + 1) as f64).sqrt();
                let z = Complex64::from_polar(r, arg);
                let zz = if z.im < 0.0 { z.conj() } else { z };
                let s = [j_series(n, zz), y_series(n, zz)];
                let m = miller(n, zz, true);
                assert!((m[0].ratio(s[0]) - 1.0).norm() < 1e-12, "J n={n} z={z}");
                assert!((m[2].ratio(s[1]) - 1.0).norm() < 1e-11, "Y n={n} z={z}");
            }
        }
    }

    #[test]
    fn imaginary_axis_matches_modified_functions() {
        // J_n(iy) = i^n I_n(y); I_0(30) = 7.816722978239774e11
        let v = evaluate(0, Complex64::new(0.0, 30.0), false)[0].value();
        assert!((v.re / 7.816_722_978_239_774e11 - 1.0).abs() < 1e-12);
        assert!(v.im.abs() < 1e-3);
    }
}
