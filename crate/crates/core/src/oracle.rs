//! Finite-volume reference solver for one radial mode, independent of the
//! special-function bases: `(p u')' − s a L r^{d−3} u + k² s₀ σ r^{d−1} u =
//! ρ^{d−1} δ(r − ρ)`, `p = s a r^{d−1}`, closed by the exact
//! Dirichlet-to-Neumann map at the outer radius.

use num_complex::Complex64;

use crate::error::{AlrError, Result};
use crate::media::RadialLayeredMedium;
use crate::special::outgoing_radial_scaled;

type C = Complex64;

/// Nodal values of the oracle solution.
#[derive(Clone, Debug)]
pub struct RadialOracle {
    pub r: Vec<f64>,
    pub u: Vec<C>,
}

impl RadialOracle {
    /// Piecewise-linear interpolation of `u`.
    pub fn value_at(&self, r: f64) -> Result<C> {
        let last = *self.r.last().unwrap();
        if !(r >= 0.0 && r <= last) {
            return Err(AlrError::Domain(format!("r = {r} outside the oracle grid [0, {last}]")));
        }
        let i = self.r.partition_point(|&x| x <= r).clamp(1, self.r.len() - 1);
        let (r0, r1) = (self.r[i - 1], self.r[i]);
        let t = (r - r0) / (r1 - r0);
        Ok(self.u[i - 1] * (1.0 - t) + self.u[i] * t)
    }
}

/// Solves one mode on `[0, 3 max(outer, ρ)]` with about `nodes` nodes, every
/// interface and `ρ` on a node.
pub fn radial_oracle(
    medium: &RadialLayeredMedium,
    delta: f64,
    k: f64,
    n: u32,
    rho: f64,
    nodes: usize,
) -> Result<RadialOracle> {
    let d = medium.dimension();
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(AlrError::Geometry(format!("source radius must be positive, got {rho}")));
    }
    if k == 0.0 && d == 2 && n == 0 {
        return Err(AlrError::Geometry("mode 0 has no decaying exterior solution at k = 0 in d = 2".into()));
    }
    let outer = 3.0 * medium.outer_radius().max(rho);
    let mut breaks = vec![0.0, rho, outer];
    for l in medium.layers() {
        breaks.push(l.r_lo);
        breaks.push(l.r_hi);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * outer);
    let mut r = vec![0.0];
    for w in breaks.windows(2) {
        let m = ((nodes as f64 * (w[1] - w[0]) / outer).ceil() as usize).max(64);
        let h = (w[1] - w[0]) / m as f64;
        r.extend((1..=m).map(|j| if j == m { w[1] } else { w[0] + h * j as f64 }));
    }
    let src = r.iter().position(|&x| x == rho).ok_or_else(|| AlrError::Geometry("source off the grid".into()))?;

    let dm1 = d as f64 - 1.0;
    let ell = n as f64 * (n as f64 + d as f64 - 2.0);
    let flux = |x: f64| medium.s_delta(delta, x) * medium.a_at(x) * x.powf(dm1);
    let reaction = |x: f64| {
        let s = medium.s_delta(delta, x);
        -s * medium.a_at(x) * ell * x.powf(d as f64 - 3.0)
            + k * k * medium.sign_at(x).value() * medium.sigma_at(x) * x.powf(dm1)
    };

    let size = r.len();
    let zero = C::new(0.0, 0.0);
    let (mut lower, mut diag, mut upper, mut rhs) = (vec![zero; size], vec![zero; size], vec![zero; size], vec![zero; size]);
    for i in 0..size {
        if i > 0 {
            let h = r[i] - r[i - 1];
            let p = flux(0.5 * (r[i] + r[i - 1])) / h;
            lower[i] += p;
            diag[i] -= p;
            diag[i] += reaction(r[i] - 0.25 * h) * (0.5 * h);
        }
        if i + 1 < size {
            let h = r[i + 1] - r[i];
            let p = flux(0.5 * (r[i] + r[i + 1])) / h;
            upper[i] += p;
            diag[i] -= p;
            diag[i] += reaction(r[i] + 0.25 * h) * (0.5 * h);
        }
    }
    if n > 0 {
        // u(0) = 0
        diag[0] = C::new(1.0, 0.0);
        upper[0] = zero;
        lower[1] = zero;
    }
    let lambda = if k > 0.0 {
        let (h, dh) = outgoing_radial_scaled(n, d, k, outer)?;
        dh.ratio(h)
    } else if d == 2 {
        C::new(-(n as f64) / outer, 0.0)
    } else {
        C::new(-(n as f64 + 1.0) / outer, 0.0)
    };
    diag[size - 1] += flux(outer) * lambda;
    rhs[src] = C::new(rho.powf(dm1), 0.0);
    let u = solve_tridiagonal(&lower, &diag, &upper, &rhs).ok_or(AlrError::Resonance { n })?;
    Ok(RadialOracle { r, u })
}

/// Gaussian elimination with partial pivoting on a tridiagonal system
/// (`lower[i]`, `upper[i]` multiply `x[i−1]`, `x[i+1]` in row `i`).
pub fn solve_tridiagonal(lower: &[C], diag: &[C], upper: &[C], rhs: &[C]) -> Option<Vec<C>> {
    let n = diag.len();
    let zero = C::new(0.0, 0.0);
    let mut rows: Vec<([C; 3], C)> = Vec::with_capacity(n);
    let mut cur = ([diag[0], if n > 1 { upper[0] } else { zero }], rhs[0]);
    for i in 0..n - 1 {
        let next = [lower[i + 1], diag[i + 1], if i + 2 < n { upper[i + 1] } else { zero }];
        let here = [cur.0[0], cur.0[1], zero];
        let (pivot, other) = if next[0].norm() > here[0].norm() {
            ((next, rhs[i + 1]), (here, cur.1))
        } else {
            ((here, cur.1), (next, rhs[i + 1]))
        };
        if pivot.0[0].norm() == 0.0 {
            return None;
        }
        let f = other.0[0] / pivot.0[0];
        cur = ([other.0[1] - f * pivot.0[1], other.0[2] - f * pivot.0[2]], other.1 - f * pivot.1);
        rows.push(pivot);
    }
    if cur.0[0].norm() == 0.0 {
        return None;
    }
    rows.push(([cur.0[0], zero, zero], cur.1));
    let mut x = vec![zero; n];
    for i in (0..n).rev() {
        let (u, y) = rows[i];
        let mut s = y;
        if i + 1 < n {
            s -= u[1] * x[i + 1];
        }
        if i + 2 < n {
            s -= u[2] * x[i + 2];
        }
        x[i] = s / u[0];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::Profile;
    use crate::solver::{far_radius, solve_mode};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn tridiagonal_needs_pivoting() {
        // zero leading diagonal
        let lower = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0)];
        let diag = [c(0.0, 0.0), c(3.0, 0.0), c(1.0, -1.0)];
        let upper = [c(1.0, 0.0), c(-1.0, 2.0), c(0.0, 0.0)];
        let x = [c(1.0, 1.0), c(-2.0, 0.5), c(0.25, 3.0)];
        let b: Vec<C> = (0..3)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s += lower[i] * x[i - 1];
                }
                if i < 2 {
                    s += upper[i] * x[i + 1];
                }
                s
            })
            .collect();
        let got = solve_tridiagonal(&lower, &diag, &upper, &b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-14);
        }
    }

    fn compare(medium: &RadialLayeredMedium, delta: f64, k: f64, n: u32, rho: f64) -> f64 {
        let spectral = solve_mode(medium, delta, k, n, rho).unwrap();
        let fd = radial_oracle(medium, delta, k, n, rho, 200_000).unwrap();
        let mut worst: f64 = 0.0;
        for r in [rho, far_radius(medium, rho)] {
            let a = spectral.radial(r).unwrap().0;
            let b = fd.value_at(r).unwrap();
            worst = worst.max((a - b).norm() / a.norm());
        }
        worst
    }

    #[test]
    fn agrees_with_the_spectral_solver() {
        let mn = RadialLayeredMedium::core_shell(2, 1.0, 2.0).unwrap();
        assert!(compare(&mn, 1e-1, 0.0, 5, 2.5) < 1e-3);
        let m6 = RadialLayeredMedium::doubly_complementary(2, Profile::Constant(1.0), Profile::Constant(1.0), 1.0, 4.0)
            .unwrap();
        assert!(compare(&m6, 1e-2, 1.0, 1, 3.0) < 1e-3);
        let hom = RadialLayeredMedium::homogeneous(3).unwrap();
        assert!(compare(&hom, 1e-1, 1.0, 0, 1.5) < 1e-3);
    }

    #[test]
    fn rejects_quasistatic_mode_zero() {
        let mn = RadialLayeredMedium::core_shell(2, 1.0, 2.0).unwrap();
        assert!(radial_oracle(&mn, 1e-2, 0.0, 0, 2.5, 1000).is_err());
    }
}
