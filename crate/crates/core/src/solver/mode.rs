//! Transmission system of one angular mode.

use std::sync::Arc;

use num_complex::Complex64;

use super::basis::{LayerBasis, ModeContext};
use crate::error::{AlrError, Result};
use crate::linalg::{backward_error, solve_adaptive, DenseMatrix};
use crate::media::{Layer, RadialLayeredMedium, Sign};
use crate::special::Scaled;

/// Largest accepted interface residual of a solved mode.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Beyond this condition number even double-double cannot be trusted.
const CONDITION_LIMIT: f64 = 1e28;

/// Radial section `[lo, hi)` of one layer, between interfaces and the source.
#[derive(Clone, Debug)]
pub struct Section {
    pub lo: f64,
    pub hi: f64,
    /// Index into the medium's layers; `layers.len()` for the background.
    pub layer: usize,
    pub sign: Complex64,
    pub layer_data: Layer,
    basis: Arc<LayerBasis>,
    /// Per-solution normalization, the larger endpoint magnitude.
    norm: [Scaled; 2],
    count: usize,
    ctx_q: Complex64,
}

impl Section {
    /// Number of unknowns carried.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Normalized solution `j` and derivative at `r`.
    pub fn eval(&self, ctx: &ModeSpec, j: usize, r: f64) -> Result<(Complex64, Complex64)> {
        let c = ModeContext { d: ctx.d, n: ctx.n, k: ctx.k, q: self.ctx_q };
        let (u, du) = self.basis.eval(&c, j, r)?;
        Ok((u.div(self.norm[j]).value(), du.div(self.norm[j]).value()))
    }

    pub fn a(&self, r: f64) -> f64 {
        self.layer_data.a.eval(r)
    }

    pub fn is_negative(&self) -> bool {
        self.layer_data.sign == Sign::Negative
    }
}

/// Dimension, order and wavenumber of a mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSpec {
    pub d: usize,
    pub n: u32,
    pub k: f64,
}

/// Solution of one mode for a unit flux jump `[s a ∂_r u] = 1` at `ρ`.
#[derive(Clone, Debug)]
pub struct ModeSolution {
    pub spec: ModeSpec,
    pub rho: f64,
    pub sections: Arc<Vec<Section>>,
    /// `(α, β)` per section in the normalized basis; `β = 0` for the
    /// innermost section, and the exterior weight `γ` sits in `α` of the last.
    pub coefficients: Vec<[Complex64; 2]>,
    pub condition_number: f64,
    pub extended_precision: bool,
    pub residual: f64,
}

fn background(lo: f64) -> Layer {
    Layer::constant(lo, f64::INFINITY, Sign::Positive, 1.0, 1.0)
}

/// Sections of the medium split at `rho` (if given), with bases.
pub fn build_sections(
    medium: &RadialLayeredMedium,
    delta: f64,
    spec: ModeSpec,
    rho: Option<f64>,
) -> Result<Vec<Section>> {
    let mut layers: Vec<Layer> = medium.layers().to_vec();
    layers.push(background(medium.outer_radius()));
    let last_layer = layers.len() - 1;
    let mut pieces: Vec<(f64, f64, usize)> = Vec::new();
    for (i, l) in layers.iter().enumerate() {
        match rho {
            Some(p) if p > l.r_lo && p < l.r_hi => {
                if l.sign == Sign::Negative {
                    return Err(AlrError::Source(format!("source radius {p} lies in the negative annulus")));
                }
                pieces.push((l.r_lo, p, i));
                pieces.push((p, l.r_hi, i));
            }
            Some(p) if p == l.r_lo || (p == l.r_hi && l.r_hi.is_finite()) => {
                return Err(AlrError::Geometry(format!("source radius {p} lies on an interface")));
            }
            _ => pieces.push((l.r_lo, l.r_hi, i)),
        }
    }
    let total = pieces.len();
    let mut out = Vec::with_capacity(total);
    for (idx, &(lo, hi, li)) in pieces.iter().enumerate() {
        let layer = &layers[li];
        let sign = match layer.sign {
            Sign::Negative => Complex64::new(-1.0, -delta),
            Sign::Positive => Complex64::new(1.0, 0.0),
        };
        let q = Complex64::new(layer.sign.value(), 0.0) / sign;
        let ctx = ModeContext { d: spec.d, n: spec.n, k: spec.k, q };
        let basis = if idx + 1 == total {
            LayerBasis::exterior(&ctx)?
        } else if li == last_layer {
            LayerBasis::for_layer(&background(lo), &ctx)?
        } else {
            LayerBasis::for_layer(layer, &ctx)?
        };
        let count = if idx == 0 || idx + 1 == total { 1 } else { 2 };
        let mut norm = [Scaled::from_c64(Complex64::new(1.0, 0.0)); 2];
        let scale_n = spec.n as f64 + 1.0;
        for (j, nj) in norm.iter_mut().enumerate().take(count) {
            let mut best = f64::NEG_INFINITY;
            for r in [lo, hi] {
                if r <= 0.0 || !r.is_finite() {
                    continue;
                }
                let (u, du) = basis.eval(&ctx, j, r)?;
                let m = u.add(du * (r / scale_n)).ln_abs().max(u.ln_abs()).max((du * (r / scale_n)).ln_abs());
                best = best.max(m);
            }
            if !best.is_finite() {
                return Err(AlrError::Resonance { n: spec.n });
            }
            *nj = Scaled::new(Complex64::new(1.0, 0.0), best);
        }
        out.push(Section {
            lo,
            hi,
            layer: li,
            sign,
            layer_data: layer.clone(),
            basis: Arc::new(basis),
            norm,
            count,
            ctx_q: q,
        });
    }
    Ok(out)
}

/// Solves the mode with unit flux jump at `rho`.
pub fn solve_mode(medium: &RadialLayeredMedium, delta: f64, k: f64, n: u32, rho: f64) -> Result<ModeSolution> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(AlrError::Domain(format!("delta must be finite and non-negative, got {delta}")));
    }
    if !(k >= 0.0 && k.is_finite()) {
        return Err(AlrError::Domain(format!("k must be finite and non-negative, got {k}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(AlrError::Geometry(format!("source radius must be positive, got {rho}")));
    }
    if delta == 0.0 && medium.shell().is_some() {
        return Err(AlrError::Resonance { n });
    }
    let spec = ModeSpec { d: medium.dimension(), n, k };
    let sections = build_sections(medium, delta, spec, Some(rho))?;
    solve_sections(sections, spec, rho)
}

fn solve_sections(sections: Vec<Section>, spec: ModeSpec, rho: f64) -> Result<ModeSolution> {
    let s_count = sections.len();
    let mut offsets = Vec::with_capacity(s_count);
    let mut dim = 0;
    for s in &sections {
        offsets.push(dim);
        dim += s.count();
    }
    let mut m = DenseMatrix::<f64>::zeros(dim);
    let mut b = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..s_count - 1 {
        let (left, right) = (&sections[i], &sections[i + 1]);
        let r = left.hi;
        for (sec, sgn, off) in [(left, 1.0, offsets[i]), (right, -1.0, offsets[i + 1])] {
            // rows: u_L − u_R = 0 and F_R − F_L = jump, F = s a r u'
            let flux = sec.sign * sec.a(r) * r;
            for j in 0..sec.count() {
                let (u, du) = sec.eval(&spec, j, r)?;
                m[(2 * i, off + j)] += sgn * u;
                m[(2 * i + 1, off + j)] -= sgn * flux * du;
            }
        }
        if r == rho {
            b[2 * i + 1] = Complex64::new(rho, 0.0);
        }
    }
    // row equilibration
    for i in 0..dim {
        let s = (0..dim).map(|j| m[(i, j)].norm()).fold(0.0, f64::max);
        if s == 0.0 {
            return Err(AlrError::Resonance { n: spec.n });
        }
        for j in 0..dim {
            m[(i, j)] /= s;
        }
        b[i] /= s;
    }
    let sol = solve_adaptive(&m, &b).ok_or(AlrError::Resonance { n: spec.n })?;
    if sol.condition_number > CONDITION_LIMIT {
        return Err(AlrError::Resonance { n: spec.n });
    }
    let residual = backward_error(&m, &sol.x, &b);
    if residual > RESIDUAL_TOLERANCE {
        return Err(AlrError::Resonance { n: spec.n });
    }
    let coefficients = sections
        .iter()
        .zip(&offsets)
        .map(|(s, &o)| {
            let mut c = [Complex64::new(0.0, 0.0); 2];
            c[..s.count()].copy_from_slice(&sol.x[o..o + s.count()]);
            c
        })
        .collect();
    Ok(ModeSolution {
        spec,
        rho,
        sections: Arc::new(sections),
        coefficients,
        condition_number: sol.condition_number,
        extended_precision: sol.extended,
        residual,
    })
}

impl ModeSolution {
    pub fn n(&self) -> u32 {
        self.spec.n
    }

    fn section_index(&self, r: f64) -> usize {
        self.sections.partition_point(|s| s.hi <= r).min(self.sections.len() - 1)
    }

    /// `(u(r), u'(r))` of the unit-jump solution.
    pub fn radial(&self, r: f64) -> Result<(Complex64, Complex64)> {
        let i = self.section_index(r);
        self.radial_in(i, r)
    }

    /// Evaluation using the basis of section `i` (also valid at its ends).
    pub fn radial_in(&self, i: usize, r: f64) -> Result<(Complex64, Complex64)> {
        let s = &self.sections[i];
        let mut u = Complex64::new(0.0, 0.0);
        let mut du = Complex64::new(0.0, 0.0);
        for j in 0..s.count() {
            let c = self.coefficients[i][j];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (v, dv) = s.eval(&self.spec, j, r)?;
            u += c * v;
            du += c * dv;
        }
        Ok((u, du))
    }

    /// Largest relative mismatch of `u` and of the flux jump across the
    /// interfaces, recomputed from the stored coefficients.
    pub fn interface_mismatch(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 0..self.sections.len() - 1 {
            let r = self.sections[i].hi;
            let (ul, dl) = self.radial_in(i, r)?;
            let (ur, dr) = self.radial_in(i + 1, r)?;
            let fl = self.sections[i].sign * self.sections[i].a(r) * dl * r;
            let fr = self.sections[i + 1].sign * self.sections[i + 1].a(r) * dr * r;
            let jump = if r == self.rho { self.rho } else { 0.0 };
            let e_u = (ul - ur).norm() / (ul.norm() + ur.norm()).max(f64::MIN_POSITIVE);
            let e_f = (fr - fl - jump).norm() / (fl.norm() + fr.norm() + jump).max(f64::MIN_POSITIVE);
            worst = worst.max(e_u.min(1.0)).max(e_f.min(1.0));
        }
        Ok(worst)
    }
}
