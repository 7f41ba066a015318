//! Piecewise-radial media `(s_δ a, s₀ σ)` and the effective medium `(Â, Σ̂)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{AlrError, Result};
use crate::transforms::{
    annulus_samples, compose_maps, verify_reflecting_complementary, CoefficientField, RadialRegion, SmoothMap,
};

/// Admissible range of coefficient values inside a layer.
pub const PROFILE_MIN: f64 = 1e-6;
pub const PROFILE_MAX: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

/// Which coefficient a profile describes; they transform differently.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    A,
    Sigma,
}

/// Radial coefficient profile.
#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    /// `coef · r^exponent`
    Power { coef: f64, exponent: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "Constant({c})"),
            Profile::Power { coef, exponent } => write!(f, "Power({coef} r^{exponent})"),
            Profile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Profile {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Custom(Arc::new(f))
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Power { coef, exponent } => coef * r.powf(*exponent),
            Profile::Custom(f) => f(r),
        }
    }

    /// `(coef, exponent)` for constant and power profiles.
    pub fn as_power(&self) -> Option<(f64, f64)> {
        match self {
            Profile::Constant(c) => Some((*c, 0.0)),
            Profile::Power { coef, exponent } => Some((*coef, *exponent)),
            Profile::Custom(_) => None,
        }
    }

    fn simplify(coef: f64, exponent: f64) -> Profile {
        if exponent == 0.0 {
            Profile::Constant(coef)
        } else {
            Profile::Power { coef, exponent }
        }
    }

    /// Profile of the push-forward through the Kelvin map in `∂B_R`:
    /// `a ↦ (|y|/R)^{2(2−d)} a(R²/|y|)`, `σ ↦ (R/|y|)^{2d} σ(R²/|y|)`.
    pub fn kelvin(&self, radius: f64, d: usize, which: Coefficient) -> Profile {
        let d = d as f64;
        let r2 = radius * radius;
        match (self.as_power(), which) {
            (Some((c, p)), Coefficient::A) => {
                Profile::simplify(c * radius.powf(2.0 * p - 2.0 * (2.0 - d)), 2.0 * (2.0 - d) - p)
            }
            (Some((c, p)), Coefficient::Sigma) => Profile::simplify(c * radius.powf(2.0 * p + 2.0 * d), -p - 2.0 * d),
            (None, Coefficient::A) => {
                let f = self.clone();
                Profile::custom(move |y| (y / radius).powf(2.0 * (2.0 - d)) * f.eval(r2 / y))
            }
            (None, Coefficient::Sigma) => {
                let f = self.clone();
                Profile::custom(move |y| (radius / y).powf(2.0 * d) * f.eval(r2 / y))
            }
        }
    }

    /// Profile of the push-forward through `x ↦ μx`:
    /// `a ↦ μ^{2−d} a(y/μ)`, `σ ↦ μ^{−d} σ(y/μ)`.
    pub fn dilate(&self, mu: f64, d: usize, which: Coefficient) -> Profile {
        let factor = match which {
            Coefficient::A => mu.powf(2.0 - d as f64),
            Coefficient::Sigma => mu.powf(-(d as f64)),
        };
        match self.as_power() {
            Some((c, p)) => Profile::simplify(c * factor * mu.powf(-p), p),
            None => {
                let f = self.clone();
                Profile::custom(move |y| factor * f.eval(y / mu))
            }
        }
    }
}

/// Annulus `[r_lo, r_hi)` with isotropic coefficients `a(r)·I`, `σ(r)`.
#[derive(Clone, Debug)]
pub struct Layer {
    pub r_lo: f64,
    pub r_hi: f64,
    pub sign: Sign,
    pub a: Profile,
    pub sigma: Profile,
}

impl Layer {
    pub fn new(r_lo: f64, r_hi: f64, sign: Sign, a: Profile, sigma: Profile) -> Self {
        Layer { r_lo, r_hi, sign, a, sigma }
    }

    pub fn constant(r_lo: f64, r_hi: f64, sign: Sign, a: f64, sigma: f64) -> Self {
        Layer::new(r_lo, r_hi, sign, Profile::Constant(a), Profile::Constant(sigma))
    }
}

/// Row of [`RadialLayeredMedium::sample_radial_profiles`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileSample {
    pub r: f64,
    pub sign: f64,
    pub a: f64,
    pub sigma: f64,
}

/// Concentric layers from the origin outwards, `(I, 1)` beyond the last one.
#[derive(Clone, Debug)]
pub struct RadialLayeredMedium {
    d: usize,
    layers: Vec<Layer>,
}

impl RadialLayeredMedium {
    /// Validates contiguity, profile bounds and that the negative layers form
    /// one annulus. An empty layer list is the homogeneous medium `(I, 1)`.
    pub fn new(d: usize, layers: Vec<Layer>) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(AlrError::Geometry(format!("dimension must be 2 or 3, got {d}")));
        }
        let mut expect_lo = 0.0;
        for (i, l) in layers.iter().enumerate() {
            if l.r_lo != expect_lo {
                return Err(AlrError::Geometry(format!(
                    "layer {i} starts at {} but the previous one ends at {expect_lo}",
                    l.r_lo
                )));
            }
            if !(l.r_hi > l.r_lo && l.r_hi.is_finite()) {
                return Err(AlrError::Geometry(format!("layer {i} has radii [{}, {})", l.r_lo, l.r_hi)));
            }
            expect_lo = l.r_hi;
            let lo = if l.r_lo > 0.0 { l.r_lo } else { l.r_hi * 1e-3 };
            for j in 0..=16 {
                let r = lo + (l.r_hi - lo) * j as f64 / 16.0;
                for (name, p) in [("a", &l.a), ("sigma", &l.sigma)] {
                    let v = p.eval(r);
                    if !(PROFILE_MIN..=PROFILE_MAX).contains(&v) {
                        return Err(AlrError::Geometry(format!(
                            "layer {i}: {name}({r}) = {v} outside [{PROFILE_MIN}, {PROFILE_MAX}]"
                        )));
                    }
                }
            }
        }
        let neg: Vec<usize> = (0..layers.len()).filter(|&i| layers[i].sign == Sign::Negative).collect();
        if let (Some(first), Some(last)) = (neg.first(), neg.last()) {
            if last - first + 1 != neg.len() {
                return Err(AlrError::Geometry("negative layers must form one contiguous annulus".into()));
            }
            if *first == 0 {
                return Err(AlrError::Geometry("the negative annulus cannot contain the origin".into()));
            }
        }
        Ok(RadialLayeredMedium { d, layers })
    }

    pub fn homogeneous(d: usize) -> Result<Self> {
        RadialLayeredMedium::new(d, vec![])
    }

    /// Core `[0, r₁)` and shell `[r₁, r₂)` with `a = σ = 1`, the shell negative.
    pub fn core_shell(d: usize, r1: f64, r2: f64) -> Result<Self> {
        RadialLayeredMedium::new(
            d,
            vec![Layer::constant(0.0, r1, Sign::Positive, 1.0, 1.0), Layer::constant(r1, r2, Sign::Negative, 1.0, 1.0)],
        )
    }

    /// The four-region doubly complementary medium built from `(a, σ)` on
    /// `[r₂, r₃)`, with `r₁ = r₂²/r₃`: `(I, 1)` on `[0, r₁²/r₂)`, the dilated
    /// image on `[r₁²/r₂, r₁)`, the Kelvin image (negative) on `[r₁, r₂)`.
    pub fn doubly_complementary(d: usize, a: Profile, sigma: Profile, r2: f64, r3: f64) -> Result<Self> {
        if !(r2 > 0.0 && r2 < r3 && r3.is_finite()) {
            return Err(AlrError::Geometry(format!("need 0 < r2 < r3, got r2 = {r2}, r3 = {r3}")));
        }
        let r1 = r2 * r2 / r3;
        let r0 = r1 * r1 / r2;
        // F∘G is the dilation by (r₂/r₃)²
        let mu = (r2 / r3) * (r2 / r3);
        let layers = vec![
            Layer::constant(0.0, r0, Sign::Positive, 1.0, 1.0),
            Layer::new(r0, r1, Sign::Positive, a.dilate(mu, d, Coefficient::A), sigma.dilate(mu, d, Coefficient::Sigma)),
            Layer::new(r1, r2, Sign::Negative, a.kelvin(r2, d, Coefficient::A), sigma.kelvin(r2, d, Coefficient::Sigma)),
            Layer::new(r2, r3, Sign::Positive, a, sigma),
        ];
        RadialLayeredMedium::new(d, layers)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Radius beyond which the medium is `(I, 1)`.
    pub fn outer_radius(&self) -> f64 {
        self.layers.last().map_or(0.0, |l| l.r_hi)
    }

    /// Index of the layer containing `r` (half-open), `None` in the exterior.
    pub fn layer_index(&self, r: f64) -> Option<usize> {
        self.layers.iter().position(|l| r >= l.r_lo && r < l.r_hi)
    }

    pub fn layer_at(&self, r: f64) -> Option<&Layer> {
        self.layer_index(r).map(|i| &self.layers[i])
    }

    pub fn sign_at(&self, r: f64) -> Sign {
        self.layer_at(r).map_or(Sign::Positive, |l| l.sign)
    }

    pub fn a_at(&self, r: f64) -> f64 {
        self.layer_at(r).map_or(1.0, |l| l.a.eval(r))
    }

    pub fn sigma_at(&self, r: f64) -> f64 {
        self.layer_at(r).map_or(1.0, |l| l.sigma.eval(r))
    }

    /// `(r₁, r₂)` of the negative annulus.
    pub fn shell(&self) -> Option<(f64, f64)> {
        let neg: Vec<&Layer> = self.layers.iter().filter(|l| l.sign == Sign::Negative).collect();
        Some((neg.first()?.r_lo, neg.last()?.r_hi))
    }

    /// `s_δ(r)`: `−1 − iδ` in the negative annulus, `+1` elsewhere.
    pub fn s_delta(&self, delta: f64, r: f64) -> Complex64 {
        s_delta(self, delta, r)
    }

    /// `s_δ(r) a(r)`; its imaginary part is `−δ a` in the shell.
    pub fn lossy_coefficient(&self, delta: f64, r: f64) -> Complex64 {
        self.s_delta(delta, r) * self.a_at(r)
    }

    pub fn sample_radial_profiles(&self, radii: &[f64]) -> Vec<ProfileSample> {
        radii
            .iter()
            .map(|&r| ProfileSample { r, sign: self.sign_at(r).value(), a: self.a_at(r), sigma: self.sigma_at(r) })
            .collect()
    }

    /// Pointwise isotropic field of the medium (signs dropped).
    pub fn coefficient_field<const D: usize>(&self) -> CoefficientField<f64, D> {
        let m1 = self.clone();
        let m2 = self.clone();
        CoefficientField::isotropic(move |r| m1.a_at(r), move |r| m2.sigma_at(r), RadialRegion::punctured_space())
    }
}

/// `s_δ(r)`: `−1 − iδ` in the negative annulus, `+1` elsewhere.
pub fn s_delta(medium: &RadialLayeredMedium, delta: f64, r: f64) -> Complex64 {
    match medium.sign_at(r) {
        Sign::Negative => Complex64::new(-1.0, -delta),
        Sign::Positive => Complex64::new(1.0, 0.0),
    }
}

/// `(Â, Σ̂)`: the medium outside `B_{r₃}` together with the push-forward of
/// everything inside `B_{r₁}` through `G∘F`, which must be a dilation.
pub fn effective_medium<const D: usize>(
    medium: &RadialLayeredMedium,
    f: Arc<dyn SmoothMap<f64, D>>,
    g: Arc<dyn SmoothMap<f64, D>>,
) -> Result<RadialLayeredMedium> {
    if D != medium.dimension() {
        return Err(AlrError::Geometry(format!("maps act in dimension {D}, medium is {}-dimensional", medium.d)));
    }
    let Some((r1, r2)) = medium.shell() else {
        return Ok(medium.clone());
    };
    let (Some(rf), Some(r3)) = (f.kelvin_radius(), g.kelvin_radius()) else {
        return Err(AlrError::Geometry("effective medium needs Kelvin maps F and G".into()));
    };
    if (rf - r2).abs() > 1e-12 * r2 || r3 <= r2 {
        return Err(AlrError::Geometry(format!(
            "F must fix the outer shell radius {r2} (got {rf}) and G a larger sphere (got {r3})"
        )));
    }
    let gf = compose_maps(f.clone(), g.clone())?;
    let lambda = gf.dilation_factor().ok_or_else(|| AlrError::Geometry("G∘F is not a dilation".into()))?;
    if (r1 * lambda - r3).abs() > 1e-9 * r3 {
        return Err(AlrError::NotDoublyComplementary { deviation: (r1 * lambda - r3).abs() });
    }
    let field = medium.coefficient_field::<D>();
    let samples = annulus_samples::<f64, D>(r2, r3);
    let rep_f = verify_reflecting_complementary(&field, f.as_ref(), r2, &samples);
    let inner: Vec<[f64; D]> = samples
        .iter()
        .filter(|x| crate::transforms::norm(x) > r2 * (1.0 + 1e-12))
        .copied()
        .collect();
    let rep_gf = verify_reflecting_complementary(&field, &gf, r2, &inner);
    if !rep_f.pass || !rep_gf.pass {
        let deviation = [
            rep_f.max_matrix_deviation,
            rep_f.max_sigma_deviation,
            rep_gf.max_matrix_deviation,
            rep_gf.max_sigma_deviation,
        ]
        .into_iter()
        .fold(0.0, f64::max);
        return Err(AlrError::NotDoublyComplementary { deviation });
    }
    let d = medium.d;
    let mut layers = Vec::new();
    for l in medium.layers.iter() {
        if l.r_hi <= r1 * (1.0 + 1e-12) {
            layers.push(Layer::new(
                l.r_lo * lambda,
                if (l.r_hi - r1).abs() <= 1e-12 * r1 { r3 } else { l.r_hi * lambda },
                Sign::Positive,
                l.a.dilate(lambda, d, Coefficient::A),
                l.sigma.dilate(lambda, d, Coefficient::Sigma),
            ));
        } else if l.r_lo >= r3 * (1.0 - 1e-12) {
            layers.push(l.clone());
        } else if l.r_hi > r3 * (1.0 + 1e-12) {
            return Err(AlrError::Geometry(format!("layer [{}, {}) straddles r3 = {r3}", l.r_lo, l.r_hi)));
        }
    }
    if let Some(first_out) = layers.iter().position(|l| l.r_lo >= r3 * (1.0 - 1e-12)) {
        layers[first_out].r_lo = r3;
    }
    RadialLayeredMedium::new(d, layers)
}
