//! Per-mode solution of `div(s_δ a ∇u) + k² s₀ σ u = f` for shell sources,
//! field reconstruction and norms.

pub mod basis;
pub mod mode;
mod source;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{AlrError, Result};
use crate::media::RadialLayeredMedium;
use crate::quadrature::radial_rule;
use crate::special::harmonics::spherical_harmonic;

pub use mode::{solve_mode, ModeSolution, ModeSpec, Section, RESIDUAL_TOLERANCE};
pub use source::{ModeIndex, ShellSource, SourceTerms};

/// Hard cap on the retained order.
pub const N_MAX: u32 = 400;
/// Relative tail tolerance for adaptive truncation.
pub const EPS_TAIL: f64 = 1e-8;

/// Angular weight of `∫ |Y|²` for the mode normalization in use.
pub fn angular_weight(d: usize) -> f64 {
    if d == 2 {
        2.0 * PI
    } else {
        1.0
    }
}

/// One solved order with the source terms it carries.
#[derive(Clone, Debug)]
pub struct FieldMode {
    pub solution: ModeSolution,
    pub terms: Vec<(ModeIndex, Complex64)>,
    /// `Σ w |c|²` over the terms.
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct FieldSolution {
    pub medium: Arc<RadialLayeredMedium>,
    pub delta: f64,
    pub k: f64,
    pub source: ShellSource,
    pub modes: Vec<FieldMode>,
    /// Relative contribution of the last three retained orders.
    pub tail_estimate: f64,
}

/// Value and gradient of a field at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation<const D: usize> {
    pub value: Complex64,
    pub gradient: [Complex64; D],
}

/// `∫_{lo}^{hi} g(r, u, u') r^{d−1} dr` for the unit-jump solution of one
/// mode, by Gauss quadrature on each section.
pub fn mode_integral(
    mode: &ModeSolution,
    lo: f64,
    hi: f64,
    g: impl Fn(f64, Complex64, Complex64, &Section) -> f64,
) -> Result<f64> {
    let d = mode.spec.d as f64;
    let n = mode.spec.n as f64;
    let mut total = 0.0;
    for (i, s) in mode.sections.iter().enumerate() {
        let a = s.lo.max(lo);
        let b = s.hi.min(hi);
        if b <= a {
            continue;
        }
        let osc = [a, 0.5 * (a + b), b]
            .iter()
            .map(|&r| mode.spec.k * (s.layer_data.sigma.eval(r) / s.a(r)).sqrt() * r)
            .fold(0.0, f64::max);
        let rate = 2.0 * n + d + 4.0 + 4.0 * osc;
        for (r, w) in radial_rule(a, b, rate) {
            let (u, du) = mode.radial_in(i, r)?;
            total += w * g(r, u, du, s) * r.powf(d - 1.0);
        }
    }
    Ok(total)
}

fn ell(mode: &ModeSolution) -> f64 {
    let n = mode.spec.n as f64;
    n * (n + mode.spec.d as f64 - 2.0)
}

/// `∫_shell (|u'|² + L|u|²/r²) r^{d−1} dr` of the unit-jump solution.
pub fn mode_shell_energy(mode: &ModeSolution, a_weighted: bool) -> Result<f64> {
    let l = ell(mode);
    let mut total = 0.0;
    for s in mode.sections.iter().filter(|s| s.is_negative()) {
        total += mode_integral(mode, s.lo, s.hi, |r, u, du, sec| {
            let w = if a_weighted { sec.a(r) } else { 1.0 };
            w * (du.norm_sqr() + l * u.norm_sqr() / (r * r))
        })?;
    }
    Ok(total)
}

/// Radius used for far-field diagnostics and the truncation test.
pub fn far_radius(medium: &RadialLayeredMedium, rho: f64) -> f64 {
    2.0 * medium.outer_radius().max(rho)
}

/// Solves every mode the source excites; infinite profiles are truncated
/// once the last three orders contribute less than [`EPS_TAIL`] to both the
/// shell energy and the far trace.
pub fn solve_field(medium: &RadialLayeredMedium, delta: f64, k: f64, source: &ShellSource) -> Result<FieldSolution> {
    let d = medium.dimension();
    if source.d != d {
        return Err(AlrError::Source(format!("source is {}-dimensional, medium {d}-dimensional", source.d)));
    }
    let has_shell = medium.shell().is_some();
    let far = far_radius(medium, source.rho);
    let w_ang = angular_weight(d);
    let quasistatic_2d = k == 0.0 && d == 2;
    let mut modes = Vec::new();
    let mut tail_estimate = 0.0;
    let orders: Vec<u32> = match source.max_order() {
        Some(top) => (0..=top).collect(),
        None => (0..=N_MAX).collect(),
    };
    let (mut e_hist, mut t_hist) = (Vec::new(), Vec::new());
    let (mut e_total, mut t_total) = (0.0, 0.0);
    let mut converged = source.max_order().is_some();
    for n in orders {
        let mut terms = source.terms_of_order(n);
        terms.retain(|(_, c)| *c != Complex64::new(0.0, 0.0));
        if quasistatic_2d && n == 0 {
            if source.is_explicit() && !terms.is_empty() {
                return Err(AlrError::Source("quasistatic d = 2 sources cannot carry mode 0".into()));
            }
            continue;
        }
        if terms.is_empty() {
            continue;
        }
        let solution = solve_mode(medium, delta, k, n, source.rho)?;
        let weight: f64 = terms.iter().map(|(_, c)| w_ang * c.norm_sqr()).sum();
        if !source.is_explicit() {
            let e = if has_shell { weight * mode_shell_energy(&solution, false)? } else { 0.0 };
            let (u, _) = solution.radial(far)?;
            let t = weight * u.norm_sqr();
            e_total += e;
            t_total += t;
            e_hist.push(e);
            t_hist.push(t);
        }
        modes.push(FieldMode { solution, terms, weight });
        if !source.is_explicit() && e_hist.len() >= 4 {
            let m = e_hist.len();
            let e_last: f64 = e_hist[m - 3..].iter().sum();
            let t_last: f64 = t_hist[m - 3..].iter().sum();
            let re = if e_total > 0.0 { e_last / e_total } else { 0.0 };
            let rt = if t_total > 0.0 { t_last / t_total } else { 0.0 };
            tail_estimate = re.max(rt);
            if tail_estimate < EPS_TAIL {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(AlrError::TruncationFailure { n_max: N_MAX, tail: tail_estimate });
    }
    Ok(FieldSolution { medium: Arc::new(medium.clone()), delta, k, source: source.clone(), modes, tail_estimate })
}

/// Solve in the δ-free effective medium, which must be positive.
pub fn solve_u_hat(effective: &RadialLayeredMedium, k: f64, source: &ShellSource) -> Result<FieldSolution> {
    if effective.shell().is_some() {
        return Err(AlrError::InconsistentInput("the effective medium must have all signs +1".into()));
    }
    solve_field(effective, 0.0, k, source)
}

impl FieldSolution {
    pub fn dimension(&self) -> usize {
        self.medium.dimension()
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// `Σ_modes w|c|² ∫_shell (|u'|² + L|u|²/r²) r^{d−1} dr`, optionally with `a`.
    pub fn shell_energy(&self, a_weighted: bool) -> Result<f64> {
        if self.medium.shell().is_none() {
            return Err(AlrError::NoShell);
        }
        self.modes.iter().map(|m| Ok(m.weight * mode_shell_energy(&m.solution, a_weighted)?)).sum()
    }

    /// `‖u‖_{L²(∂B_R)}`.
    pub fn trace_norm(&self, radius: f64) -> Result<f64> {
        let d = self.dimension() as f64;
        let mut s = 0.0;
        for m in &self.modes {
            let (u, _) = m.solution.radial(radius)?;
            s += m.weight * u.norm_sqr();
        }
        Ok((s * radius.powf(d - 1.0)).sqrt())
    }

    /// `‖u − other‖_{L²(∂B_R)}` for fields driven by the same source.
    pub fn trace_distance(&self, other: &FieldSolution, radius: f64) -> Result<f64> {
        let d = self.dimension() as f64;
        let mut s = 0.0;
        for m in &self.modes {
            let (u, _) = m.solution.radial(radius)?;
            let v = match other.modes.iter().find(|o| o.solution.n() == m.solution.n()) {
                Some(o) => o.solution.radial(radius)?.0,
                None => Complex64::new(0.0, 0.0),
            };
            s += m.weight * (u - v).norm_sqr();
        }
        for o in &other.modes {
            if !self.modes.iter().any(|m| m.solution.n() == o.solution.n()) {
                s += o.weight * o.solution.radial(radius)?.0.norm_sqr();
            }
        }
        Ok((s * radius.powf(d - 1.0)).sqrt())
    }

    /// `(∫_{lo}^{hi} |∇u|², ∫_{lo}^{hi} |u|²)` over the annulus.
    pub fn annulus_norms(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let (mut grad, mut l2) = (0.0, 0.0);
        for m in &self.modes {
            let l = ell(&m.solution);
            grad += m.weight * mode_integral(&m.solution, lo, hi, |r, u, du, _| du.norm_sqr() + l * u.norm_sqr() / (r * r))?;
            l2 += m.weight * mode_integral(&m.solution, lo, hi, |_, u, _, _| u.norm_sqr())?;
        }
        Ok((grad, l2))
    }

    /// `‖u‖_{H¹(B_R)}`.
    pub fn h1_norm(&self, radius: f64) -> Result<f64> {
        let (g, l) = self.annulus_norms(0.0, radius)?;
        Ok((g + l).sqrt())
    }

    /// `Im ∫_{∂B_R} ∂_r u ū`.
    pub fn far_flux(&self, radius: f64) -> Result<f64> {
        let d = self.dimension() as f64;
        let mut s = 0.0;
        for m in &self.modes {
            let (u, du) = m.solution.radial(radius)?;
            s += m.weight * (du * u.conj()).im;
        }
        Ok(s * radius.powf(d - 1.0))
    }

    /// `Im ∫ f ū` for the shell source.
    pub fn source_work(&self) -> Result<f64> {
        let d = self.dimension() as f64;
        let rho = self.source.rho;
        let mut s = 0.0;
        for m in &self.modes {
            let (u, _) = m.solution.radial(rho)?;
            s += m.weight * u.conj().im;
        }
        Ok(s * rho.powf(d - 1.0))
    }

    /// Terms of the power-balance identity
    /// `δ ∫_shell a|∇u|² + Im ∫_{∂B_R} ∂_r u ū = Im ∫ f ū`, returned as
    /// `(absorbed, radiated, supplied, relative residual)`.
    pub fn power_balance(&self, radius: f64) -> Result<(f64, f64, f64, f64)> {
        let absorbed = if self.medium.shell().is_some() { self.delta * self.shell_energy(true)? } else { 0.0 };
        let radiated = self.far_flux(radius)?;
        let supplied = self.source_work()?;
        let scale = absorbed.abs() + radiated.abs() + supplied.abs();
        let res = if scale > 0.0 { (absorbed + radiated - supplied).abs() / scale } else { 0.0 };
        Ok((absorbed, radiated, supplied, res))
    }

    /// Mode-sum values and gradients at Cartesian points.
    pub fn evaluate<const D: usize>(&self, points: &[[f64; D]]) -> Result<Vec<Evaluation<D>>> {
        if D != self.dimension() {
            return Err(AlrError::Domain(format!("points are {D}-dimensional, field is {}-dimensional", self.dimension())));
        }
        points.iter().map(|p| self.evaluate_point(p)).collect()
    }

    fn evaluate_point<const D: usize>(&self, p: &[f64; D]) -> Result<Evaluation<D>> {
        let zero = Complex64::new(0.0, 0.0);
        let mut value = zero;
        let mut grad = [zero; D];
        let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        let i = Complex64::new(0.0, 1.0);
        if D == 2 {
            let th = p[1].atan2(p[0]);
            let (s, c) = th.sin_cos();
            let (mut gr, mut gt) = (zero, zero);
            for m in &self.modes {
                let (u, du) = m.solution.radial(r)?;
                for (idx, coef) in &m.terms {
                    let mm = idx.azimuthal() as f64;
                    let e = Complex64::from_polar(1.0, mm * th) * coef;
                    value += e * u;
                    gr += e * du;
                    if r > 0.0 {
                        gt += e * u * i * mm / r;
                    }
                }
            }
            grad[0] = c * gr - s * gt;
            grad[1] = s * gr + c * gt;
        } else {
            let th = if r > 0.0 { (p[2] / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
            let ph = p[1].atan2(p[0]);
            let (st, ct) = th.sin_cos();
            let (sp, cp) = ph.sin_cos();
            let st_safe = th.clamp(1e-9, PI - 1e-9).sin();
            let (mut gr, mut gt, mut gp) = (zero, zero, zero);
            for m in &self.modes {
                let (u, du) = m.solution.radial(r)?;
                for (idx, coef) in &m.terms {
                    let (n, mm) = (idx.order(), idx.azimuthal());
                    let (y, dy) = spherical_harmonic(n, mm as i32, th, ph);
                    value += coef * u * y;
                    gr += coef * du * y;
                    if r > 0.0 {
                        gt += coef * u * dy / r;
                        gp += coef * u * y * i * mm as f64 / (r * st_safe);
                    }
                }
            }
            grad[0] = st * cp * gr + ct * cp * gt - sp * gp;
            grad[1] = st * sp * gr + ct * sp * gt + cp * gp;
            grad[2] = ct * gr - st * gt;
        }
        Ok(Evaluation { value, gradient: grad })
    }

    /// CSV rows `n,layer,alpha_re,alpha_im,beta_re,beta_im,cond`; `layer`
    /// counts sections from the origin, the last one being the exterior.
    pub fn mode_table(&self) -> Vec<(u32, usize, Complex64, Complex64, f64)> {
        let mut rows = Vec::new();
        for m in &self.modes {
            for (i, c) in m.solution.coefficients.iter().enumerate() {
                rows.push((m.solution.n(), i, c[0], c[1], m.solution.condition_number));
            }
        }
        rows
    }
}
