use num_complex::Complex64;

use crate::error::{AlrError, Result};
use crate::quadrature::radial_rule;
use crate::solver::angular_weight;
use crate::special::{quasistatic_basis, Kind, RadialBasisPair};

/// Coefficients of `a Ĵ_n(k|x|) + b Ŷ_n(k|x|)` on one angular component
/// (`e^{±inθ}` or `Y_n^m`); at `k = 0` the powers `rⁿ`, `r^{−n}` (or
/// `r^{−n−1}`) take their place.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesTerm {
    pub n: u32,
    pub a: Complex64,
    pub b: Complex64,
}

type Pair = (Complex64, Complex64);

fn radial_pair(d: usize, k: f64, n: u32, r: f64) -> Result<(Pair, Pair)> {
    let kind = Kind::from_dimension(d)?;
    if k == 0.0 {
        let basis = quasistatic_basis(n, d)?;
        let t = Complex64::new(r, 0.0);
        return Ok((basis.regular(t)?, basis.singular(t)?));
    }
    let basis = RadialBasisPair::hat(kind, n);
    let t = Complex64::new(k * r, 0.0);
    let (j, dj) = basis.regular(t)?;
    let (y, dy) = basis.singular(t)?;
    Ok(((j, dj * k), (y, dy * k)))
}

fn term_value(d: usize, k: f64, t: &SeriesTerm, r: f64) -> Result<Pair> {
    let ((j, dj), y) = radial_pair(d, k, t.n, r)?;
    if t.b == Complex64::new(0.0, 0.0) {
        return Ok((t.a * j, t.a * dj));
    }
    let (y, dy) = y;
    Ok((t.a * j + t.b * y, t.a * dj + t.b * dy))
}

/// `(∫|∇u|², ∫|u|²)` of `u = Σ terms` over the annulus `lo < |x| < hi`
/// (`lo = 0`: the ball).
pub fn mode_sum_norms(d: usize, k: f64, terms: &[SeriesTerm], lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !(lo >= 0.0 && lo < hi) {
        return Err(AlrError::Geometry(format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    let w = angular_weight(d);
    let dm1 = d as f64 - 1.0;
    let (mut grad, mut l2) = (0.0, 0.0);
    for t in terms {
        let n = t.n as f64;
        let l = n * (n + d as f64 - 2.0);
        let rate = 2.0 * n + d as f64 + 4.0 + 4.0 * k * hi;
        for (r, q) in radial_rule(lo, hi, rate) {
            let (u, du) = term_value(d, k, t, r)?;
            let m = w * q * r.powf(dm1);
            grad += m * (du.norm_sqr() + l / (r * r) * u.norm_sqr());
            l2 += m * u.norm_sqr();
        }
    }
    Ok((grad, l2))
}

/// `‖Σ terms‖_{H¹}` over the annulus `lo < |x| < hi`.
pub fn mode_sum_h1(d: usize, k: f64, terms: &[SeriesTerm], lo: f64, hi: f64) -> Result<f64> {
    let (g, l) = mode_sum_norms(d, k, terms, lo, hi)?;
    Ok((g + l).sqrt())
}

/// The damped series `W_δ = Σ (1+ξ_n)^{−1} [a Ĵ_n + b Ŷ_n]`,
/// `ξ_n = δ^{1/2}(r₃/r₀)ⁿ`, and the flux defect `h_δ` it leaves on `∂B_{r₂}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSeries {
    pub d: usize,
    pub k: f64,
    pub delta: f64,
    pub r0: f64,
    pub r2: f64,
    pub r3: f64,
    pub base: Vec<SeriesTerm>,
    pub xi: Vec<f64>,
    pub derived: Vec<SeriesTerm>,
    /// Coefficients of `h_δ = ∂_r W · ξ/(1+ξ)` on `∂B_{r₂}`.
    pub h_coefficients: Vec<Complex64>,
    /// `‖W_δ‖_{H¹(B_{r₃}∖B_{r₂})}`.
    pub w_delta_norm: f64,
    /// `(Σ (1+n²)^{−1/2}|h_n|²)^{1/2}`.
    pub h_delta_norm: f64,
}

/// Builds the damped series from `W`'s coefficients; each mode of `W` must
/// vanish on `∂B_{r₂}` to 1e-8.
pub fn removing_singularity(
    d: usize,
    k: f64,
    base: &[SeriesTerm],
    delta: f64,
    r0: f64,
    r2: f64,
    r3: f64,
) -> Result<SingularSeries> {
    if !(r2 > 0.0 && r2 < r0 && r2 < r3 && r3.is_finite()) {
        return Err(AlrError::Geometry(format!("need 0 < r2 < r0 and r2 < r3, got r0 = {r0}, r2 = {r2}, r3 = {r3}")));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(AlrError::InconsistentInput(format!("delta must be nonnegative, got {delta}")));
    }
    let mut h_coefficients = Vec::with_capacity(base.len());
    let mut xi = Vec::with_capacity(base.len());
    let mut derived = Vec::with_capacity(base.len());
    for t in base {
        let ((j, dj), (y, dy)) = radial_pair(d, k, t.n, r2)?;
        let w = t.a * j + t.b * y;
        let scale = (t.a * j).norm() + (t.b * y).norm();
        if scale > 0.0 && w.norm() > 1e-8 * scale {
            return Err(AlrError::InconsistentInput(format!(
                "mode {} of W does not vanish on r = r2 (relative {:e})",
                t.n,
                w.norm() / scale
            )));
        }
        let x = delta.sqrt() * (r3 / r0).powi(t.n as i32);
        let damp = 1.0 / (1.0 + x);
        xi.push(x);
        derived.push(SeriesTerm { n: t.n, a: t.a * damp, b: t.b * damp });
        h_coefficients.push((t.a * dj + t.b * dy) * (x * damp));
    }
    let w_delta_norm = mode_sum_h1(d, k, &derived, r2, r3)?;
    let h_delta_norm = base
        .iter()
        .zip(&h_coefficients)
        .map(|(t, h)| h.norm_sqr() / (1.0 + (t.n as f64).powi(2)).sqrt())
        .sum::<f64>()
        .sqrt();
    Ok(SingularSeries {
        d,
        k,
        delta,
        r0,
        r2,
        r3,
        base: base.to_vec(),
        xi,
        derived,
        h_coefficients,
        w_delta_norm,
        h_delta_norm,
    })
}

/// The three `H¹` norms of an entire mode sum and the interpolation exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeSpheres {
    pub norms: [f64; 3],
    /// `‖u‖_{H¹(B_{R₂})}`.
    pub lhs: f64,
    /// `‖u‖^α_{H¹(B_{R₁})} ‖u‖^{1−α}_{H¹(B_{R₃})}`.
    pub rhs_without_c: f64,
    pub alpha: f64,
}

impl ThreeSpheres {
    /// `lhs / rhs`, zero for the zero solution.
    pub fn ratio(&self) -> f64 {
        if self.rhs_without_c > 0.0 {
            self.lhs / self.rhs_without_c
        } else {
            0.0
        }
    }
}

/// Three-spheres quantities of `u = Σ a Ĵ_n(k|x|)` (regular parts only).
pub fn three_spheres_check(d: usize, k: f64, terms: &[SeriesTerm], radii: [f64; 3]) -> Result<ThreeSpheres> {
    let [r1, r2, r3] = radii;
    if !(r1 > 0.0 && r1 < r2 && r2 < r3 && r3.is_finite()) {
        return Err(AlrError::Geometry(format!("radii must satisfy 0 < R1 < R2 < R3, got {radii:?}")));
    }
    let regular: Vec<SeriesTerm> = terms.iter().map(|t| SeriesTerm { b: Complex64::new(0.0, 0.0), ..*t }).collect();
    let alpha = (r3 / r2).ln() / (r3 / r1).ln();
    let mut norms = [0.0; 3];
    for (slot, r) in norms.iter_mut().zip(radii) {
        *slot = mode_sum_h1(d, k, &regular, 0.0, r)?;
    }
    Ok(ThreeSpheres {
        norms,
        lhs: norms[1],
        rhs_without_c: norms[0].powf(alpha) * norms[2].powf(1.0 - alpha),
        alpha,
    })
}
