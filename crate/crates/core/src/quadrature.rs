//! Gauss–Legendre rules and log-spaced radial panels.

use std::sync::OnceLock;

/// Nodes per radial panel used throughout the energy and norm integrals.
pub const NODES_PER_PANEL: usize = 64;

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn default_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES_PER_PANEL))
}

/// Quadrature nodes `r` and weights for `∫_{lo}^{hi} g(r) dr`, built from
/// equal panels in `ln r` (or in `r` when `lo == 0`). `rate` bounds the
/// exponential growth of the integrand in `ln r`, e.g. `2n + d` for `r^{2n}`
/// type integrands; the panel count keeps `rate * width` below 40.
pub fn radial_rule(lo: f64, hi: f64, rate: f64) -> Vec<(f64, f64)> {
    let (gx, gw) = default_rule();
    let mut out = Vec::new();
    if lo <= 0.0 {
        // integrands vanish like r^{d-1} at the origin; split geometrically
        // so high powers are still resolved near the outer radius
        let mut panels = vec![];
        let mut b = hi;
        let mut a = hi * 0.5;
        let stop = hi * 1e-6;
        while a > stop {
            panels.push((a, b));
            b = a;
            a *= 0.5;
        }
        panels.push((0.0, b));
        for (a, b) in panels.into_iter().rev() {
            if a == 0.0 {
                let h = 0.5 * (b - a);
                for (x, w) in gx.iter().zip(gw) {
                    out.push((a + h * (x + 1.0), h * w));
                }
            } else {
                push_log_panels(&mut out, a, b, rate, gx, gw);
            }
        }
        return out;
    }
    push_log_panels(&mut out, lo, hi, rate, gx, gw);
    out
}

fn push_log_panels(out: &mut Vec<(f64, f64)>, lo: f64, hi: f64, rate: f64, gx: &[f64], gw: &[f64]) {
    let span = (hi / lo).ln();
    let panels = ((rate.abs().max(1.0) * span / 40.0).ceil() as usize).max(1);
    let h = span / panels as f64;
    let l0 = lo.ln();
    for p in 0..panels {
        let a = l0 + p as f64 * h;
        for (x, w) in gx.iter().zip(gw) {
            let s = a + 0.5 * h * (x + 1.0);
            let r = s.exp();
            out.push((r, 0.5 * h * w * r));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rule_has_zero_node() {
        let (x, _) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
    }

    #[test]
    fn high_power_on_radial_rule() {
        // ∫_1^4 r^{401} dr
        let n = 401.0;
        let rule = radial_rule(1.0, 4.0, n + 1.0);
        let s: f64 = rule.iter().map(|(r, w)| w * r.powf(n)).sum();
        let exact = (4f64.powf(n + 1.0) - 1.0) / (n + 1.0);
        assert!((s / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rule_from_origin() {
        let rule = radial_rule(0.0, 2.0, 20.0);
        let s: f64 = rule.iter().map(|(r, w)| w * r.powi(19)).sum();
        let exact = 2f64.powi(20) / 20.0;
        assert!((s / exact - 1.0).abs() < 1e-12);
    }
}
