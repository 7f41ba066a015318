//! Slow reference evaluations that share no code with the production
//! routines: double-double ascending series for the regular functions where
//! the series is well conditioned, and Schläfli's integrals otherwise.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use num_traits::Zero;

use super::{Kind, Scaled};
use crate::dd::Dd;
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;

type Cdd = Complex<Dd>;

fn cdd(z: Complex64) -> Cdd {
    Complex::new(Dd::from_f64(z.re), Dd::from_f64(z.im))
}

fn to_c64(z: Cdd) -> Complex64 {
    Complex64::new(z.re.to_f64(), z.im.to_f64())
}

fn dd_norm(z: Cdd) -> f64 {
    to_c64(z).norm()
}

/// Sum of `Π_{j≤k} (w / (j (b + 2j)))`-type series in double-double:
/// `ratio(k)` gives the real denominator of term `k`.
fn dd_series(w: Cdd, denom: impl Fn(usize) -> f64) -> (Complex64, f64) {
    let mut t = Cdd::new(Dd::from_f64(1.0), Dd::zero());
    let mut sum = t;
    let mut abs_sum = 1.0;
    for k in 1..4000 {
        t = t * w / Cdd::new(Dd::from_f64(denom(k)), Dd::zero());
        sum = sum + t;
        let a = dd_norm(t);
        abs_sum += a;
        if a <= 1e-34 * dd_norm(sum) {
            break;
        }
    }
    let s = to_c64(sum);
    (s, abs_sum / s.norm())
}

/// Schläfli integrals for `(J_ν(z), Y_ν(z))`, valid for `Re z > 0`.
pub fn schlafli(nu: f64, z: Complex64) -> (Complex64, Complex64) {
    let (j, y, _) = schlafli_with_magnitude(nu, z);
    (j, y)
}

/// [`schlafli`] plus the largest integrand modulus seen, to judge
/// cancellation.
fn schlafli_with_magnitude(nu: f64, z: Complex64) -> (Complex64, Complex64, f64) {
    let mut big: f64 = 0.0;
    let (gx, gw) = gauss_legendre(32);
    let mut first_j = Complex64::new(0.0, 0.0);
    let mut first_y = Complex64::new(0.0, 0.0);
    let panels = (((nu + z.norm()) * PI / 6.0).ceil() as usize).max(2);
    let h = PI / panels as f64;
    for p in 0..panels {
        for (x, w) in gx.iter().zip(&gw) {
            let th = h * (p as f64 + 0.5 * (x + 1.0));
            let phase = z * th.sin() - nu * th;
            let (pc, ps) = (phase.cos(), phase.sin());
            big = big.max(pc.norm()).max(ps.norm());
            first_j += pc * (0.5 * h * w);
            first_y += ps * (0.5 * h * w);
        }
    }
    let (s, c) = (nu * PI).sin_cos();
    // second integrals over [0, ∞): integrands decay like exp(−Re z sinh t)
    let zr = z.re;
    let t_peak = if nu > zr { (nu / zr).acosh() } else { 0.0 };
    let expo = |t: f64| nu * t - zr * t.sinh();
    let peak = expo(t_peak);
    let mut t_end = t_peak + 0.5;
    while expo(t_end) > peak - 80.0 || zr * t_end.sinh() < 80.0 {
        t_end += 0.5;
    }
    let mut second_j = Complex64::new(0.0, 0.0);
    let mut second_y = Complex64::new(0.0, 0.0);
    let mut a = 0.0;
    while a < t_end {
        let width = (3.0 / (z.norm() * (a + 0.5).cosh() + nu + 1.0)).min(0.5);
        let b = (a + width).min(t_end);
        let hh = 0.5 * (b - a);
        for (x, w) in gx.iter().zip(&gw) {
            let t = a + hh * (x + 1.0);
            let base = -z * t.sinh();
            let gj = (base - nu * t).exp();
            let gy = (base + nu * t).exp() + c * gj;
            big = big.max(gy.norm());
            second_j += gj * (hh * w);
            second_y += gy * (hh * w);
        }
        a = b;
    }
    let j = (first_j - s * second_j) / PI;
    let y = (first_y - second_y) / PI;
    (j, y, big / PI)
}

/// `H_ν^{(1)}(z) = e^{−iνπ/2}/(πi) ∫ exp(iz cosh t − νt) dt` over the real
/// line, for `Im z > 0`.
pub fn hankel1_integral(nu: f64, z: Complex64) -> Complex64 {
    hankel1_with_magnitude(nu, z).0
}

fn hankel1_with_magnitude(nu: f64, z: Complex64) -> (Complex64, f64) {
    let (gx, gw) = gauss_legendre(32);
    let zi = z.im;
    let expo = |t: f64| -zi * t.cosh() - nu * t;
    let t_peak = (-nu / zi).asinh();
    let peak = expo(t_peak);
    let mut lo = t_peak - 0.5;
    while expo(lo) > peak - 80.0 {
        lo -= 0.5;
    }
    let mut hi = t_peak + 0.5;
    while expo(hi) > peak - 80.0 {
        hi += 0.5;
    }
    let i = Complex64::new(0.0, 1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut a = lo;
    while a < hi {
        let rate = z.norm() * (a.abs() + 0.5).cosh() + nu + 1.0;
        let b = (a + (3.0 / rate).min(0.5)).min(hi);
        let hh = 0.5 * (b - a);
        for (x, w) in gx.iter().zip(&gw) {
            let t = a + hh * (x + 1.0);
            sum += (i * z * t.cosh() - nu * t).exp() * (hh * w);
        }
        a = b;
    }
    (Complex64::from_polar(1.0, -nu * PI / 2.0) / (PI * i) * sum, peak.exp() / PI)
}

/// Estimated relative error attached to a candidate value.
type Candidate = (Complex64, f64);

fn best(cands: impl IntoIterator<Item = Candidate>) -> Option<Complex64> {
    cands
        .into_iter()
        .filter(|(v, e)| v.norm().is_finite() && e.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(v, _)| v)
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|j| (j as f64).ln()).sum()
}

fn dd_real(x: f64) -> Cdd {
    Cdd::new(Dd::from_f64(x), Dd::zero())
}

/// `J_n` / `j_n` by the double-double series.
fn regular_series(kind: Kind, n: u32, z: Complex64) -> Candidate {
    let zz = cdd(z) * cdd(z);
    let (sum, cond, pre) = match kind {
        Kind::Cylindrical => {
            let (s, cond) = dd_series(-zz * dd_real(0.25), |k| (k * (n as usize + k)) as f64);
            (s, cond, Scaled::powi(z * 0.5, n as i64).scale_ln(-ln_factorial(n)))
        }
        Kind::Spherical => {
            let (s, cond) = dd_series(-zz * dd_real(0.5), |k| (k * (2 * n as usize + 2 * k + 1)) as f64);
            let ln_f: f64 = (0..=n).map(|j| ((2 * j + 1) as f64).ln()).sum();
            (s, cond, Scaled::powi(z, n as i64).scale_ln(-ln_f))
        }
    };
    ((pre * sum).value(), 1e-15 + cond * 1e-31)
}

/// `Y_n` by the double-double series; the logarithm is only good to `f64`.
fn cylindrical_singular_series(n: u32, z: Complex64) -> Candidate {
    let euler = Dd { hi: 0.577_215_664_901_532_9, lo: -4.942_915_152_430_645e-18 };
    let one = Cdd::new(Dd::from_f64(1.0), Dd::zero());
    let x = cdd(z) * cdd(z) * dd_real(0.25);
    let l = (z * 0.5).ln();
    let two_l = cdd(l * 2.0);
    let mut h_k = Dd::zero();
    let mut h_nk = Dd::zero();
    for j in 1..=n {
        h_nk = h_nk + Dd::from_f64(1.0) / Dd::from_f64(j as f64);
    }
    let mut c = one;
    let mut bc = Cdd::new(Dd::zero(), Dd::zero());
    let mut c_sum = Cdd::new(Dd::zero(), Dd::zero());
    let mut abs_bc = 0.0;
    for k in 0..4000usize {
        if k > 0 {
            c = c * (-x) / dd_real((k * (n as usize + k)) as f64);
            h_k = h_k + Dd::from_f64(1.0) / Dd::from_f64(k as f64);
            h_nk = h_nk + Dd::from_f64(1.0) / Dd::from_f64((n as usize + k) as f64);
        }
        let psi = Cdd::new(euler + euler - h_k - h_nk, Dd::zero());
        let term = c * (two_l + psi);
        bc = bc + term;
        c_sum = c_sum + c;
        abs_bc += dd_norm(term);
        if dd_norm(term) <= 1e-34 * dd_norm(bc) && k > 2 {
            break;
        }
    }
    let bc_pre = Scaled::powi(z * 0.5, n as i64).scale_ln(-ln_factorial(n)) * (1.0 / PI);
    let bc_val = bc_pre * to_c64(bc);
    let mut total = bc_val;
    // the rounding of ln(z/2) is one shared error multiplying Σ c_k
    let mut err = (bc_pre * to_c64(c_sum)).value().norm() * (l * 2.0).norm() * 2e-16
        + (bc_pre * abs_bc).value().norm() * 1e-31
        + bc_val.value().norm() * 1e-15;
    if n > 0 {
        let mut e = one;
        let mut a = one;
        for k in 0..(n as usize - 1) {
            e = e * x / dd_real(((k + 1) * (n as usize - k - 1)) as f64);
            a = a + e;
        }
        let a_pre = Scaled::powi(z * 0.5, -(n as i64)).scale_ln(ln_factorial(n - 1)) * (-1.0 / PI);
        let a_val = a_pre * to_c64(a);
        err += a_val.value().norm() * 1e-15;
        total = total.add(a_val);
    }
    let v = total.value();
    (v, err / v.norm())
}

/// `y_n` by the double-double series of `ŷ_n`.
fn spherical_singular_series(n: u32, z: Complex64) -> Candidate {
    let w = -(cdd(z) * cdd(z)) * dd_real(0.5);
    let one = Cdd::new(Dd::from_f64(1.0), Dd::zero());
    let mut t = one;
    let mut sum = one;
    let mut abs_sum = 1.0;
    for k in 1..4000usize {
        t = t * w / dd_real(k as f64 * (2.0 * k as f64 - 1.0 - 2.0 * n as f64));
        sum = sum + t;
        abs_sum += dd_norm(t);
        if k > n as usize && dd_norm(t) <= 1e-34 * dd_norm(sum) {
            break;
        }
    }
    let s = to_c64(sum);
    let ln_df: f64 = (1..n).map(|j| ((2 * j - 1) as f64).ln()).sum::<f64>() + if n > 0 { ((2 * n - 1) as f64).ln() } else { 0.0 };
    let v = -(Scaled::powi(z, -(n as i64) - 1) * s).scale_ln(ln_df).value();
    (v, 1e-15 + abs_sum / s.norm() * 1e-31)
}

/// Reference `J_n(z)` or `j_n(z)`; `None` if no path applies.
pub fn reference_regular(kind: Kind, n: u32, z: Complex64) -> Option<Complex64> {
    let mut cands = vec![regular_series(kind, n, z)];
    if z.re > 0.0 {
        let (nu, pre) = order_and_prefactor(kind, n, z);
        let (j, _, big) = schlafli_with_magnitude(nu, z);
        cands.push((pre * j, 1e-16 * big * (nu + z.norm() + 1.0) / j.norm()));
    }
    best(cands)
}

fn order_and_prefactor(kind: Kind, n: u32, z: Complex64) -> (f64, Complex64) {
    match kind {
        Kind::Cylindrical => (n as f64, Complex64::new(1.0, 0.0)),
        Kind::Spherical => (n as f64 + 0.5, (PI / (2.0 * z)).sqrt()),
    }
}

/// Reference `Y_n(z)` or `y_n(z)`. Candidates are the double-double series,
/// Schläfli's integral (`Re z > 0`) and `Y = −i (H^{(1)} − J)` with the
/// Hankel integral (`Im z > 0`); the one with the smallest estimated
/// cancellation wins.
pub fn reference_singular(kind: Kind, n: u32, z: Complex64) -> Option<Complex64> {
    if z.im < 0.0 {
        return reference_singular(kind, n, z.conj()).map(|v| v.conj());
    }
    let mut cands = vec![match kind {
        Kind::Cylindrical => cylindrical_singular_series(n, z),
        Kind::Spherical => spherical_singular_series(n, z),
    }];
    let (nu, pre) = order_and_prefactor(kind, n, z);
    if z.re > 0.0 {
        let (_, y, big) = schlafli_with_magnitude(nu, z);
        cands.push((pre * y, 1e-16 * big * (nu + z.norm() + 1.0) / y.norm()));
    }
    if z.im > 0.0 {
        if let Some(j) = reference_regular(kind, n, z) {
            let (h, peak) = hankel1_with_magnitude(nu, z);
            let y = (h - j / pre) * Complex64::new(0.0, -1.0);
            cands.push((pre * y, 1e-16 * (peak * (nu + z.norm() + 1.0) + (j / pre).norm()) / y.norm()));
        }
    }
    best(cands)
}
