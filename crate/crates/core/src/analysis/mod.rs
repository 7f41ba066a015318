//! Power, normalization, δ-sweeps, blow-up classification and the
//! critical-radius search.

mod predict;
mod series;
mod sweep;

use std::sync::Arc;

use crate::error::{AlrError, Result};
use crate::media::{effective_medium, Coefficient, Layer, RadialLayeredMedium, Sign};
use crate::solver::FieldSolution;
use crate::transforms::{kelvin_map, SmoothMap};

pub use predict::{cloak_admissibility, predict_blowup, CloakAssessment, CloakVerdict, Prediction};
pub use series::{mode_sum_h1, mode_sum_norms, removing_singularity, three_spheres_check, SeriesTerm, SingularSeries, ThreeSpheres};
pub use sweep::{
    asymptotic_exponent, classify_blowup, critical_radius_search, default_deltas, delta_sweep, diagnostic_radius, BlowupVerdict,
    CriticalRadius, DeltaSweepResult, Probe, SweepRow, Verdict, GAMMA,
};

/// `E_δ = δ ∫_shell |∇u_δ|²`.
pub fn power(field: &FieldSolution) -> Result<f64> {
    Ok(field.delta * field.shell_energy(false)?)
}

/// `c_δ = (δ^{1/2} ∫_shell |∇u_δ|²)^{−1/2}` from the shell energy.
pub fn normalization_from_energy(shell_energy: f64, delta: f64) -> Result<f64> {
    if !(shell_energy > 0.0) || !(delta > 0.0) {
        return Err(AlrError::ZeroShellEnergy);
    }
    Ok((delta.sqrt() * shell_energy).powf(-0.5))
}

pub fn normalization_constant(field: &FieldSolution) -> Result<f64> {
    normalization_from_energy(field.shell_energy(false)?, field.delta)
}

/// Effective medium `(Â, Σ̂)` of a doubly complementary medium whose shell
/// is `[r₁, r₂)`, taking `F`, `G` as the Kelvin maps in `∂B_{r₂}` and
/// `∂B_{r₃}`, `r₃ = r₂²/r₁`. At `k = 0` only `a` enters the equation, so
/// only the `a`-complementarity is checked there.
pub fn effective_for(medium: &RadialLayeredMedium, k: f64) -> Result<RadialLayeredMedium> {
    let Some((r1, r2)) = medium.shell() else {
        return Ok(medium.clone());
    };
    let r3 = r2 * r2 / r1;
    if k > 0.0 {
        return match medium.dimension() {
            2 => effective_with::<2>(medium, r2, r3),
            _ => effective_with::<3>(medium, r2, r3),
        };
    }
    quasistatic_effective(medium, r1, r2, r3)
}

fn effective_with<const D: usize>(medium: &RadialLayeredMedium, r2: f64, r3: f64) -> Result<RadialLayeredMedium> {
    let f: Arc<dyn SmoothMap<f64, D>> = Arc::new(kelvin_map(r2)?);
    let g: Arc<dyn SmoothMap<f64, D>> = Arc::new(kelvin_map(r3)?);
    effective_medium::<D>(medium, f, g)
}

fn quasistatic_effective(medium: &RadialLayeredMedium, r1: f64, r2: f64, r3: f64) -> Result<RadialLayeredMedium> {
    let d = medium.dimension();
    let mut worst: f64 = 0.0;
    for layer in medium.layers().iter().filter(|l| l.sign == Sign::Negative) {
        let image = layer.a.kelvin(r2, d, Coefficient::A);
        for j in 0..=32 {
            let x = layer.r_lo + (layer.r_hi - layer.r_lo) * (j as f64 + 0.5) / 33.0;
            let y = r2 * r2 / x;
            let got = if y < medium.outer_radius() { medium.a_at(y) } else { 1.0 };
            worst = worst.max((image.eval(y) - got).abs() / got.abs());
        }
    }
    if worst > 1e-8 {
        return Err(AlrError::NotDoublyComplementary { deviation: worst });
    }
    let lambda = (r3 / r2) * (r3 / r2);
    let mut layers = Vec::new();
    for l in medium.layers() {
        if l.r_hi <= r1 * (1.0 + 1e-12) {
            let hi = if (l.r_hi - r1).abs() <= 1e-12 * r1 { r3 } else { l.r_hi * lambda };
            layers.push(Layer::new(
                l.r_lo * lambda,
                hi,
                Sign::Positive,
                l.a.dilate(lambda, d, Coefficient::A),
                l.sigma.dilate(lambda, d, Coefficient::Sigma),
            ));
        } else if l.r_lo >= r3 * (1.0 - 1e-12) {
            layers.push(l.clone());
        }
    }
    if layers.last().is_some_and(|l| l.r_hi < r3) {
        return Err(AlrError::Geometry("effective medium leaves a gap below r3".into()));
    }
    RadialLayeredMedium::new(d, layers)
}
