//! Origin-centred diffeomorphisms and the push-forward of coefficient fields.
//!
//! For a map `T` with Jacobian `DT`, the push-forward of `(a, σ)` is
//! `T_*a = DT a DTᵀ / |det DT|` and `T_*σ = σ / |det DT|`, both evaluated at
//! `x = T⁻¹(y)`. Everything here is generic over [`Real`] and the dimension.

use std::sync::Arc;

use crate::error::{AlrError, Result};
use crate::scalar::Real;

pub type Vector<T, const D: usize> = [T; D];
pub type Matrix<T, const D: usize> = [[T; D]; D];

/// Jacobian determinants below this are rejected by [`push_forward`].
pub const DEGENERATE_DET: f64 = 1e-14;
/// Pass threshold of [`verify_reflecting_complementary`].
pub const COMPLEMENTARY_TOL: f64 = 1e-8;
const FD_STEP: f64 = 1e-6;

/// Open radial region `inner < |x| < outer`; `outer` may be infinite and an
/// `inner` of zero punctures the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialRegion {
    pub inner: f64,
    pub outer: f64,
}

impl RadialRegion {
    pub fn punctured_space() -> Self {
        RadialRegion { inner: 0.0, outer: f64::INFINITY }
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        RadialRegion { inner, outer }
    }

    pub fn ball(radius: f64) -> Self {
        RadialRegion { inner: 0.0, outer: radius }
    }

    /// Membership with the closure of the region (boundary spheres included).
    pub fn contains_radius(&self, r: f64) -> bool {
        let tol = 1e-12 * r.max(1.0);
        r > 0.0 && r >= self.inner - tol && r <= self.outer + tol
    }

    pub fn contains_region(&self, other: &RadialRegion) -> bool {
        let tol = 1e-12;
        other.inner >= self.inner * (1.0 - tol) && other.outer <= self.outer * (1.0 + tol)
    }
}

pub fn norm<T: Real, const D: usize>(x: &Vector<T, D>) -> T {
    norm_sq(x).sqrt()
}

pub fn norm_sq<T: Real, const D: usize>(x: &Vector<T, D>) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v)
}

pub fn identity_matrix<T: Real, const D: usize>() -> Matrix<T, D> {
    let mut m = [[T::zero(); D]; D];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn mat_mul<T: Real, const D: usize>(a: &Matrix<T, D>, b: &Matrix<T, D>) -> Matrix<T, D> {
    let mut c = [[T::zero(); D]; D];
    for i in 0..D {
        for j in 0..D {
            let mut s = T::zero();
            for k in 0..D {
                s = s + a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn transpose<T: Real, const D: usize>(a: &Matrix<T, D>) -> Matrix<T, D> {
    let mut t = *a;
    for i in 0..D {
        for j in 0..D {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn scale_matrix<T: Real, const D: usize>(a: &Matrix<T, D>, s: T) -> Matrix<T, D> {
    let mut m = *a;
    m.iter_mut().flatten().for_each(|v| *v = *v * s);
    m
}

/// Largest absolute entry.
pub fn max_abs<T: Real, const D: usize>(a: &Matrix<T, D>) -> T {
    a.iter().flatten().fold(T::zero(), |m, &v| m.max(v.abs()))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Real, const D: usize>(a: &Matrix<T, D>) -> T {
    let mut m = *a;
    let mut det = T::one();
    for k in 0..D {
        let p = (k..D).fold(k, |p, i| if m[i][k].abs() > m[p][k].abs() { i } else { p });
        if m[p][k] == T::zero() {
            return T::zero();
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det = det * m[k][k];
        for i in (k + 1)..D {
            let f = m[i][k] / m[k][k];
            for j in k..D {
                m[i][j] = m[i][j] - f * m[k][j];
            }
        }
    }
    det
}

/// Gauss–Jordan inverse; `None` for a singular matrix.
pub fn invert<T: Real, const D: usize>(a: &Matrix<T, D>) -> Option<Matrix<T, D>> {
    let mut m = *a;
    let mut inv = identity_matrix::<T, D>();
    for k in 0..D {
        let p = (k..D).fold(k, |p, i| if m[i][k].abs() > m[p][k].abs() { i } else { p });
        if m[p][k] == T::zero() {
            return None;
        }
        m.swap(p, k);
        inv.swap(p, k);
        let piv = m[k][k];
        for j in 0..D {
            m[k][j] = m[k][j] / piv;
            inv[k][j] = inv[k][j] / piv;
        }
        for i in 0..D {
            if i != k {
                let f = m[i][k];
                for j in 0..D {
                    m[i][j] = m[i][j] - f * m[k][j];
                    inv[i][j] = inv[i][j] - f * inv[k][j];
                }
            }
        }
    }
    Some(inv)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real, const D: usize>(a: &Matrix<T, D>) -> [T; D] {
    let mut m = *a;
    let two = T::from_f64(2.0);
    for _ in 0..64 {
        let mut off = T::zero();
        for i in 0..D {
            for j in (i + 1)..D {
                off = off + m[i][j] * m[i][j];
            }
        }
        if off <= T::epsilon() * T::epsilon() * max_abs(&m).max(T::one()) * max_abs(&m).max(T::one()) {
            break;
        }
        for p in 0..D {
            for q in (p + 1)..D {
                if m[p][q] == T::zero() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (two * m[p][q]);
                let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                let t = sgn / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..D {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..D {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev = [T::zero(); D];
    for i in 0..D {
        ev[i] = m[i][i];
    }
    for i in 1..D {
        let mut j = i;
        while j > 0 && ev[j - 1] > ev[j] {
            ev.swap(j - 1, j);
            j -= 1;
        }
    }
    ev
}

/// Singular values of a square matrix, ascending.
pub fn singular_values<T: Real, const D: usize>(a: &Matrix<T, D>) -> [T; D] {
    let mut ev = symmetric_eigenvalues(&mat_mul(&transpose(a), a));
    ev.iter_mut().for_each(|v| *v = v.max(T::zero()).sqrt());
    ev
}

/// A diffeomorphism between radial regions.
pub trait SmoothMap<T: Real, const D: usize>: Send + Sync {
    fn forward(&self, x: &Vector<T, D>) -> Result<Vector<T, D>>;
    fn inverse(&self, y: &Vector<T, D>) -> Result<Vector<T, D>>;
    fn domain(&self) -> RadialRegion;
    fn image(&self) -> RadialRegion;

    /// Defaults to centred finite differences of [`SmoothMap::forward`].
    fn jacobian(&self, x: &Vector<T, D>) -> Result<Matrix<T, D>> {
        finite_difference_jacobian(self, x)
    }

    /// `Some(r)` when the map is the inversion in the sphere of radius `r`.
    fn kelvin_radius(&self) -> Option<f64> {
        None
    }

    /// `Some(λ)` when the map is the dilation `x ↦ λx`.
    fn dilation_factor(&self) -> Option<f64> {
        None
    }
}

pub fn finite_difference_jacobian<T: Real, const D: usize, M: SmoothMap<T, D> + ?Sized>(
    map: &M,
    x: &Vector<T, D>,
) -> Result<Matrix<T, D>> {
    let h = T::from_f64(FD_STEP);
    let two_h = h + h;
    let mut jac = [[T::zero(); D]; D];
    for j in 0..D {
        let mut xp = *x;
        let mut xm = *x;
        xp[j] = xp[j] + h;
        xm[j] = xm[j] - h;
        let fp = map.forward(&xp)?;
        let fm = map.forward(&xm)?;
        for i in 0..D {
            jac[i][j] = (fp[i] - fm[i]) / two_h;
        }
    }
    Ok(jac)
}

fn check_radius<T: Real, const D: usize>(region: &RadialRegion, x: &Vector<T, D>) -> Result<()> {
    let r = norm(x).to_f64();
    if r == 0.0 && region.inner == 0.0 {
        return Err(AlrError::SingularPoint);
    }
    if !region.contains_radius(r) {
        return Err(AlrError::Domain(format!("|x| = {r} not in [{}, {}]", region.inner, region.outer)));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityMap;

impl<T: Real, const D: usize> SmoothMap<T, D> for IdentityMap {
    fn forward(&self, x: &Vector<T, D>) -> Result<Vector<T, D>> {
        Ok(*x)
    }
    fn inverse(&self, y: &Vector<T, D>) -> Result<Vector<T, D>> {
        Ok(*y)
    }
    fn domain(&self) -> RadialRegion {
        RadialRegion { inner: 0.0, outer: f64::INFINITY }
    }
    fn image(&self) -> RadialRegion {
        RadialRegion { inner: 0.0, outer: f64::INFINITY }
    }
    fn jacobian(&self, _x: &Vector<T, D>) -> Result<Matrix<T, D>> {
        Ok(identity_matrix())
    }
    fn dilation_factor(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `x ↦ λx`.
#[derive(Clone, Copy, Debug)]
pub struct Dilation {
    pub factor: f64,
}

impl<T: Real, const D: usize> SmoothMap<T, D> for Dilation {
    fn forward(&self, x: &Vector<T, D>) -> Result<Vector<T, D>> {
        let l = T::from_f64(self.factor);
        Ok(x.map(|v| v * l))
    }
    fn inverse(&self, y: &Vector<T, D>) -> Result<Vector<T, D>> {
        let l = T::from_f64(self.factor);
        Ok(y.map(|v| v / l))
    }
    fn domain(&self) -> RadialRegion {
        RadialRegion::punctured_space()
    }
    fn image(&self) -> RadialRegion {
        RadialRegion::punctured_space()
    }
    fn jacobian(&self, _x: &Vector<T, D>) -> Result<Matrix<T, D>> {
        Ok(scale_matrix(&identity_matrix(), T::from_f64(self.factor)))
    }
    fn dilation_factor(&self) -> Option<f64> {
        Some(self.factor)
    }
}

/// Inversion `x ↦ r²x/|x|²` in the sphere of radius `r`; its own inverse.
#[derive(Clone, Copy, Debug)]
pub struct KelvinMap {
    pub radius: f64,
}

pub fn kelvin_map(radius: f64) -> Result<KelvinMap> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(AlrError::Geometry(format!("Kelvin radius must be positive, got {radius}")));
    }
    Ok(KelvinMap { radius })
}

impl<T: Real, const D: usize> SmoothMap<T, D> for KelvinMap {
    fn forward(&self, x: &Vector<T, D>) -> Result<Vector<T, D>> {
        let n2 = norm_sq(x);
        if n2 == T::zero() {
            return Err(AlrError::SingularPoint);
        }
        let r2 = T::from_f64(self.radius * self.radius);
        Ok(x.map(|v| r2 * v / n2))
    }
    fn inverse(&self, y: &Vector<T, D>) -> Result<Vector<T, D>> {
        self.forward(y)
    }
    fn domain(&self) -> RadialRegion {
        RadialRegion::punctured_space()
    }
    fn image(&self) -> RadialRegion {
        RadialRegion::punctured_space()
    }
    /// `(r²/|x|²)(I − 2 x xᵀ/|x|²)`.
    fn jacobian(&self, x: &Vector<T, D>) -> Result<Matrix<T, D>> {
        let n2 = norm_sq(x);
        if n2 == T::zero() {
            return Err(AlrError::SingularPoint);
        }
        let s = T::from_f64(self.radius * self.radius) / n2;
        let two = T::from_f64(2.0);
        let mut j = [[T::zero(); D]; D];
        for a in 0..D {
            for b in 0..D {
                let delta = if a == b { T::one() } else { T::zero() };
                j[a][b] = s * (delta - two * x[a] * x[b] / n2);
            }
        }
        Ok(j)
    }
    fn kelvin_radius(&self) -> Option<f64> {
        Some(self.radius)
    }
}

/// `second ∘ first`, with the chain-rule Jacobian.
pub struct ComposedMap<T: Real, const D: usize> {
    first: Arc<dyn SmoothMap<T, D>>,
    second: Arc<dyn SmoothMap<T, D>>,
}

/// Composition `T2 ∘ T1`. Fails when the image of `T1` does not fit in the
/// domain of `T2`.
pub fn compose_maps<T: Real, const D: usize>(
    t1: Arc<dyn SmoothMap<T, D>>,
    t2: Arc<dyn SmoothMap<T, D>>,
) -> Result<ComposedMap<T, D>> {
    if !t2.domain().contains_region(&t1.image()) {
        return Err(AlrError::Domain(format!(
            "image {:?} of the first map is not inside the domain {:?} of the second",
            t1.image(),
            t2.domain()
        )));
    }
    Ok(ComposedMap { first: t1, second: t2 })
}

impl<T: Real, const D: usize> SmoothMap<T, D> for ComposedMap<T, D> {
    fn forward(&self, x: &Vector<T, D>) -> Result<Vector<T, D>> {
        self.second.forward(&self.first.forward(x)?)
    }
    fn inverse(&self, y: &Vector<T, D>) -> Result<Vector<T, D>> {
        self.first.inverse(&self.second.inverse(y)?)
    }
    fn domain(&self) -> RadialRegion {
        self.first.domain()
    }
    fn image(&self) -> RadialRegion {
        self.second.image()
    }
    fn jacobian(&self, x: &Vector<T, D>) -> Result<Matrix<T, D>> {
        let j1 = self.first.jacobian(x)?;
        let j2 = self.second.jacobian(&self.first.forward(x)?)?;
        Ok(mat_mul(&j2, &j1))
    }
    fn dilation_factor(&self) -> Option<f64> {
        match (
            self.first.kelvin_radius(),
            self.second.kelvin_radius(),
            self.first.dilation_factor(),
            self.second.dilation_factor(),
        ) {
            // r_b² (r_a² x/|x|²) / |r_a² x/|x|²|² = (r_b/r_a)² x
            (Some(ra), Some(rb), _, _) => Some((rb / ra) * (rb / ra)),
            (_, _, Some(a), Some(b)) => Some(a * b),
            _ => None,
        }
    }
    fn kelvin_radius(&self) -> Option<f64> {
        match (
            self.first.kelvin_radius(),
            self.second.kelvin_radius(),
            self.first.dilation_factor(),
            self.second.dilation_factor(),
        ) {
            (Some(r), None, _, Some(1.0)) => Some(r),
            (None, Some(r), Some(1.0), _) => Some(r),
            _ => None,
        }
    }
}

/// The inverse of a map, with Jacobian `DT(T⁻¹ y)⁻¹`.
pub struct InverseMap<T: Real, const D: usize> {
    map: Arc<dyn SmoothMap<T, D>>,
}

pub fn inverse_map<T: Real, const D: usize>(map: Arc<dyn SmoothMap<T, D>>) -> InverseMap<T, D> {
    InverseMap { map }
}

impl<T: Real, const D: usize> SmoothMap<T, D> for InverseMap<T, D> {
    fn forward(&self, x: &Vector<T, D>) -> Result<Vector<T, D>> {
        self.map.inverse(x)
    }
    fn inverse(&self, y: &Vector<T, D>) -> Result<Vector<T, D>> {
        self.map.forward(y)
    }
    fn domain(&self) -> RadialRegion {
        self.map.image()
    }
    fn image(&self) -> RadialRegion {
        self.map.domain()
    }
    fn jacobian(&self, y: &Vector<T, D>) -> Result<Matrix<T, D>> {
        let x = self.map.inverse(y)?;
        let j = self.map.jacobian(&x)?;
        invert(&j).ok_or(AlrError::DegenerateJacobian { det: 0.0 })
    }
    fn kelvin_radius(&self) -> Option<f64> {
        self.map.kelvin_radius()
    }
    fn dilation_factor(&self) -> Option<f64> {
        self.map.dilation_factor().map(|l| 1.0 / l)
    }
}

type MatrixFn<T, const D: usize> = Arc<dyn Fn(&Vector<T, D>) -> Matrix<T, D> + Send + Sync>;
type ScalarFn<T, const D: usize> = Arc<dyn Fn(&Vector<T, D>) -> T + Send + Sync>;

/// Pointwise coefficient pair `(a, σ)` on a radial support.
#[derive(Clone)]
pub struct CoefficientField<T: Real, const D: usize> {
    a: MatrixFn<T, D>,
    sigma: ScalarFn<T, D>,
    pub support: RadialRegion,
    /// Declared ellipticity bounds of `a`.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Declared lower bound of `σ`.
    pub sigma_min: f64,
}

impl<T: Real, const D: usize> CoefficientField<T, D> {
    pub fn new(
        a: impl Fn(&Vector<T, D>) -> Matrix<T, D> + Send + Sync + 'static,
        sigma: impl Fn(&Vector<T, D>) -> T + Send + Sync + 'static,
        support: RadialRegion,
    ) -> Self {
        CoefficientField {
            a: Arc::new(a),
            sigma: Arc::new(sigma),
            support,
            lambda_min: 0.0,
            lambda_max: f64::INFINITY,
            sigma_min: 0.0,
        }
    }

    pub fn with_bounds(mut self, lambda_min: f64, lambda_max: f64, sigma_min: f64) -> Self {
        self.lambda_min = lambda_min;
        self.lambda_max = lambda_max;
        self.sigma_min = sigma_min;
        self
    }

    /// `(a·I, σ)` with constant scalars.
    pub fn constant(a: f64, sigma: f64, support: RadialRegion) -> Self {
        let am = scale_matrix(&identity_matrix::<T, D>(), T::from_f64(a));
        let s = T::from_f64(sigma);
        CoefficientField::new(move |_| am, move |_| s, support).with_bounds(a, a, sigma)
    }

    /// `(a(|x|)·I, σ(|x|))`.
    pub fn isotropic(
        a: impl Fn(T) -> T + Send + Sync + 'static,
        sigma: impl Fn(T) -> T + Send + Sync + 'static,
        support: RadialRegion,
    ) -> Self {
        CoefficientField::new(
            move |x| scale_matrix(&identity_matrix::<T, D>(), a(norm(x))),
            move |x| sigma(norm(x)),
            support,
        )
    }

    pub fn a(&self, x: &Vector<T, D>) -> Matrix<T, D> {
        (self.a)(x)
    }

    pub fn sigma(&self, x: &Vector<T, D>) -> T {
        (self.sigma)(x)
    }

    pub fn eval(&self, x: &Vector<T, D>) -> (Matrix<T, D>, T) {
        (self.a(x), self.sigma(x))
    }

    /// The field `(T_*a, T_*σ)` on the image of the support.
    pub fn pushed_forward(&self, map: Arc<dyn SmoothMap<T, D>>, support: RadialRegion) -> Self {
        let field = self.clone();
        let m2 = map.clone();
        let f2 = field.clone();
        let a = move |y: &Vector<T, D>| push_forward(map.as_ref(), &field, y).map(|p| p.0).unwrap_or(identity_matrix());
        let s = move |y: &Vector<T, D>| push_forward(m2.as_ref(), &f2, y).map(|p| p.1).unwrap_or(T::one());
        CoefficientField::new(a, s, support)
    }
}

/// `(DT a DTᵀ/|det DT|, σ/|det DT|)` at `x = T⁻¹(y)`.
pub fn push_forward<T: Real, const D: usize, M: SmoothMap<T, D> + ?Sized>(
    map: &M,
    field: &CoefficientField<T, D>,
    y: &Vector<T, D>,
) -> Result<(Matrix<T, D>, T)> {
    check_radius(&map.image(), y)?;
    let x = map.inverse(y)?;
    let jac = map.jacobian(&x)?;
    let det = determinant(&jac).abs();
    if det.to_f64() < DEGENERATE_DET {
        return Err(AlrError::DegenerateJacobian { det: det.to_f64() });
    }
    let (a, sigma) = field.eval(&x);
    let m = scale_matrix(&mat_mul(&mat_mul(&jac, &a), &transpose(&jac)), T::one() / det);
    // symmetrize away the rounding asymmetry of the triple product
    let half = T::from_f64(0.5);
    let mut sym = m;
    for i in 0..D {
        for j in 0..D {
            sym[i][j] = half * (m[i][j] + m[j][i]);
        }
    }
    Ok((sym, sigma / det))
}

/// Output of [`build_doubly_complementary`].
pub struct DoublyComplementary<T: Real, const D: usize> {
    pub field: CoefficientField<T, D>,
    /// Kelvin map in `∂B_{r₂}`.
    pub f: Arc<dyn SmoothMap<T, D>>,
    /// Kelvin map in `∂B_{r₃}`.
    pub g: Arc<dyn SmoothMap<T, D>>,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

/// Extends `(a, σ)` on `B_{r₃}∖B_{r₂}` to a doubly complementary field:
/// `F⁻¹_*` of it on `B_{r₂}∖B_{r₁}`, `F⁻¹_*G⁻¹_*` of it on
/// `B_{r₁}∖B_{r₁²/r₂}` and `(I, 1)` elsewhere, with `r₁ = r₂²/r₃`.
/// Layers are half-open `[r_lo, r_hi)`.
pub fn build_doubly_complementary<T: Real, const D: usize>(
    annulus: &CoefficientField<T, D>,
    r2: f64,
    r3: f64,
) -> Result<DoublyComplementary<T, D>> {
    if !(r2 > 0.0 && r3.is_finite() && r2 < r3) {
        return Err(AlrError::Geometry(format!("need 0 < r2 < r3, got r2 = {r2}, r3 = {r3}")));
    }
    let r1 = r2 * r2 / r3;
    let r0 = r1 * r1 / r2;
    let f: Arc<dyn SmoothMap<T, D>> = Arc::new(kelvin_map(r2)?);
    let g: Arc<dyn SmoothMap<T, D>> = Arc::new(kelvin_map(r3)?);
    // F⁻¹ = F and G⁻¹ = G; the core map is F⁻¹∘G⁻¹ = F∘G
    let core_map: Arc<dyn SmoothMap<T, D>> = Arc::new(compose_maps(g.clone(), f.clone())?);
    let base = annulus.clone();
    let shell_map = f.clone();
    let eval = move |x: &Vector<T, D>| -> (Matrix<T, D>, T) {
        let r = norm(x).to_f64();
        let pushed = if r >= r2 && r < r3 {
            return base.eval(x);
        } else if r >= r1 && r < r2 {
            push_forward(shell_map.as_ref(), &base, x)
        } else if r >= r0 && r < r1 {
            push_forward(core_map.as_ref(), &base, x)
        } else {
            return (identity_matrix(), T::one());
        };
        pushed.unwrap_or((identity_matrix(), T::one()))
    };
    let eval = Arc::new(eval);
    let e2 = eval.clone();
    let field = CoefficientField::new(move |x| eval(x).0, move |x| e2(x).1, RadialRegion::punctured_space());
    Ok(DoublyComplementary { field, f, g, r0, r1, r2, r3 })
}

/// Result of [`verify_reflecting_complementary`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplementarityReport {
    /// Largest entrywise `|F_*A − A|` over annulus samples.
    pub max_matrix_deviation: f64,
    /// Largest `|F_*Σ − Σ|` over annulus samples.
    pub max_sigma_deviation: f64,
    /// Largest `|F(x) − x|` over boundary samples.
    pub max_boundary_deviation: f64,
    /// Sample with the largest deviation of any kind.
    pub witness: Vec<f64>,
    pub annulus_samples: usize,
    pub boundary_samples: usize,
    /// Samples where the push-forward could not be evaluated.
    pub failures: usize,
    pub pass: bool,
}

/// Checks `(F_*A, F_*Σ) = (A, Σ)` on samples inside `Ω₃∖Ω₂` and `F(x) = x`
/// on samples of `∂Ω₂`. `inner_boundary` is the radius of `∂Ω₂`.
pub fn verify_reflecting_complementary<T: Real, const D: usize, M: SmoothMap<T, D> + ?Sized>(
    field: &CoefficientField<T, D>,
    map: &M,
    inner_boundary: f64,
    samples: &[Vector<T, D>],
) -> ComplementarityReport {
    let mut rep = ComplementarityReport {
        max_matrix_deviation: 0.0,
        max_sigma_deviation: 0.0,
        max_boundary_deviation: 0.0,
        witness: vec![],
        annulus_samples: 0,
        boundary_samples: 0,
        failures: 0,
        pass: true,
    };
    let mut worst = -1.0;
    for y in samples {
        let r = norm(y).to_f64();
        let dev = if (r - inner_boundary).abs() <= 1e-12 * inner_boundary {
            rep.boundary_samples += 1;
            match map.forward(y) {
                Ok(fy) => {
                    let mut diff = *y;
                    for i in 0..D {
                        diff[i] = fy[i] - y[i];
                    }
                    let d = norm(&diff).to_f64();
                    rep.max_boundary_deviation = rep.max_boundary_deviation.max(d);
                    d
                }
                Err(_) => {
                    rep.failures += 1;
                    f64::INFINITY
                }
            }
        } else {
            rep.annulus_samples += 1;
            match push_forward(map, field, y) {
                Ok((m, s)) => {
                    let (a, sigma) = field.eval(y);
                    let mut dm: f64 = 0.0;
                    for i in 0..D {
                        for j in 0..D {
                            dm = dm.max((m[i][j] - a[i][j]).abs().to_f64());
                        }
                    }
                    let ds = (s - sigma).abs().to_f64();
                    rep.max_matrix_deviation = rep.max_matrix_deviation.max(dm);
                    rep.max_sigma_deviation = rep.max_sigma_deviation.max(ds);
                    dm.max(ds)
                }
                Err(_) => {
                    rep.failures += 1;
                    f64::INFINITY
                }
            }
        };
        if dev > worst {
            worst = dev;
            rep.witness = y.iter().map(|v| v.to_f64()).collect();
        }
    }
    rep.pass = rep.failures == 0
        && rep.max_matrix_deviation < COMPLEMENTARY_TOL
        && rep.max_sigma_deviation < COMPLEMENTARY_TOL
        && rep.max_boundary_deviation < COMPLEMENTARY_TOL;
    rep
}

/// Unit directions: 64 angles in 2D, 16 polar × 32 azimuthal in 3D.
pub fn unit_directions<T: Real, const D: usize>() -> Vec<Vector<T, D>> {
    use std::f64::consts::PI;
    let mut out = Vec::new();
    match D {
        2 => {
            for j in 0..64 {
                let th = 2.0 * PI * (j as f64 + 0.5) / 64.0;
                let mut v = [T::zero(); D];
                v[0] = T::from_f64(th.cos());
                v[1] = T::from_f64(th.sin());
                out.push(v);
            }
        }
        3 => {
            for i in 0..16 {
                let th = PI * (i as f64 + 0.5) / 16.0;
                for j in 0..32 {
                    let ph = 2.0 * PI * (j as f64 + 0.5) / 32.0;
                    let mut v = [T::zero(); D];
                    v[0] = T::from_f64(th.sin() * ph.cos());
                    v[1] = T::from_f64(th.sin() * ph.sin());
                    v[2] = T::from_f64(th.cos());
                    out.push(v);
                }
            }
        }
        _ => {
            let mut v = [T::zero(); D];
            v[0] = T::one();
            out.push(v);
        }
    }
    out
}

/// Tensor grid of 32 radii strictly inside `(inner, outer)` times
/// [`unit_directions`], plus the directions on the sphere `|x| = inner`.
pub fn annulus_samples<T: Real, const D: usize>(inner: f64, outer: f64) -> Vec<Vector<T, D>> {
    let dirs = unit_directions::<T, D>();
    let mut out = Vec::with_capacity(33 * dirs.len());
    for i in 0..32 {
        let r = inner + (outer - inner) * (i as f64 + 0.5) / 32.0;
        let rt = T::from_f64(r);
        out.extend(dirs.iter().map(|d| d.map(|v| v * rt)));
    }
    let rb = T::from_f64(inner);
    out.extend(dirs.iter().map(|d| d.map(|v| v * rb)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;

    #[test]
    fn kelvin_examples() {
        let k = kelvin_map(1.0).unwrap();
        let y = SmoothMap::<f64, 2>::forward(&k, &[2.0, 0.0]).unwrap();
        assert_eq!(y, [0.5, 0.0]);
        let k2 = kelvin_map(2.0).unwrap();
        let y = SmoothMap::<f64, 3>::forward(&k2, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(y, [4.0, 0.0, 0.0]);
        assert_eq!(SmoothMap::<f64, 2>::forward(&k, &[0.0, 0.0]), Err(AlrError::SingularPoint));
    }

    #[test]
    fn kelvin_fixes_its_sphere() {
        let k = kelvin_map(1.7).unwrap();
        for d in unit_directions::<f64, 3>() {
            let x = d.map(|v| v * 1.7);
            let y = k.forward(&x).unwrap();
            let e: f64 = (0..3).map(|i| (y[i] - x[i]).abs()).fold(0.0, f64::max);
            assert!(e <= 1e-12);
        }
    }

    #[test]
    fn analytic_jacobians_match_finite_differences() {
        let k = kelvin_map(1.3).unwrap();
        let x = [0.7, -1.1, 0.4];
        let ja = SmoothMap::<f64, 3>::jacobian(&k, &x).unwrap();
        let jf = finite_difference_jacobian(&k, &x).unwrap();
        let scale = max_abs(&ja);
        for i in 0..3 {
            for j in 0..3 {
                assert!((ja[i][j] - jf[i][j]).abs() <= 1e-6 * scale);
            }
        }
    }

    #[test]
    fn dilation_push_forward() {
        let field = CoefficientField::<f64, 2>::constant(1.0, 1.0, RadialRegion::punctured_space());
        let (m, s) = push_forward(&Dilation { factor: 2.0 }, &field, &[0.3, 0.2]).unwrap();
        assert!((m[0][0] - 1.0).abs() < 1e-15 && m[0][1].abs() < 1e-15);
        assert!((s - 0.25).abs() < 1e-15);
    }

    #[test]
    fn kelvin_push_forward_of_identity_medium() {
        let field = CoefficientField::<f64, 2>::constant(1.0, 1.0, RadialRegion::punctured_space());
        let k = kelvin_map(1.0).unwrap();
        let (m, s) = push_forward(&k, &field, &[0.5, 0.0]).unwrap();
        assert!((m[0][0] - 1.0).abs() < 1e-14 && (m[1][1] - 1.0).abs() < 1e-14);
        assert!(m[0][1].abs() < 1e-14);
        assert!((s - 16.0).abs() < 1e-12);
    }

    #[test]
    fn double_kelvin_is_a_dilation() {
        let f: Arc<dyn SmoothMap<f64, 2>> = Arc::new(kelvin_map(1.0).unwrap());
        let g: Arc<dyn SmoothMap<f64, 2>> = Arc::new(kelvin_map(4.0).unwrap());
        let gf = compose_maps(f, g).unwrap();
        assert_eq!(gf.dilation_factor(), Some(16.0));
        let y = gf.forward(&[0.1, 0.05]).unwrap();
        assert!((y[0] - 1.6).abs() < 1e-14 && (y[1] - 0.8).abs() < 1e-14);
        let field = CoefficientField::<f64, 2>::constant(1.0, 1.0, RadialRegion::punctured_space());
        let (m, _) = push_forward(&gf, &field, &[0.9, 0.2]).unwrap();
        assert!((m[0][0] - 1.0).abs() < 1e-13 && m[0][1].abs() < 1e-13);
    }

    #[test]
    fn kelvin_is_an_involution() {
        let k: Arc<dyn SmoothMap<f64, 2>> = Arc::new(kelvin_map(2.0).unwrap());
        let kk = compose_maps(k.clone(), k).unwrap();
        let y = kk.forward(&[0.3, 1.7]).unwrap();
        assert!((y[0] - 0.3).abs() < 1e-14 && (y[1] - 1.7).abs() < 1e-14);
    }

    #[test]
    fn incompatible_domains_are_rejected() {
        struct Shrink;
        impl SmoothMap<f64, 2> for Shrink {
            fn forward(&self, x: &[f64; 2]) -> Result<[f64; 2]> {
                Ok(*x)
            }
            fn inverse(&self, y: &[f64; 2]) -> Result<[f64; 2]> {
                Ok(*y)
            }
            fn domain(&self) -> RadialRegion {
                RadialRegion::annulus(1.0, 2.0)
            }
            fn image(&self) -> RadialRegion {
                RadialRegion::annulus(1.0, 2.0)
            }
        }
        let t1: Arc<dyn SmoothMap<f64, 2>> = Arc::new(kelvin_map(1.0).unwrap());
        assert!(matches!(compose_maps(t1, Arc::new(Shrink)), Err(AlrError::Domain(_))));
    }

    #[test]
    fn builder_radii() {
        let a = CoefficientField::<f64, 2>::constant(1.0, 1.0, RadialRegion::annulus(2.0, 4.0));
        let dc = build_doubly_complementary(&a, 2.0, 4.0).unwrap();
        assert_eq!(dc.r1, 1.0);
        assert_eq!(dc.r0, 0.5);
        assert!(build_doubly_complementary(&a, 4.0, 2.0).is_err());
        let (m, s) = dc.field.eval(&[10.0, 0.0]);
        assert_eq!((m[0][0], s), (1.0, 1.0));
    }

    #[test]
    fn builder_passes_its_own_verification() {
        let a = CoefficientField::<f64, 2>::isotropic(
            |r| 1.0 + 0.1 * r,
            |r| 2.0 - 0.2 * r,
            RadialRegion::annulus(1.0, 3.0),
        );
        let dc = build_doubly_complementary(&a, 1.0, 3.0).unwrap();
        let samples = annulus_samples::<f64, 2>(1.0, 3.0);
        let rep = verify_reflecting_complementary(&dc.field, dc.f.as_ref(), 1.0, &samples);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.boundary_samples, 64);
    }

    #[test]
    fn perturbed_shell_fails_verification() {
        let a = CoefficientField::<f64, 2>::constant(1.0, 1.0, RadialRegion::annulus(1.0, 2.0));
        let dc = build_doubly_complementary(&a, 1.0, 2.0).unwrap();
        let base = dc.field.clone();
        let perturbed = CoefficientField::new(
            {
                let b = base.clone();
                move |x| b.a(x)
            },
            move |x| {
                let r = norm(x);
                base.sigma(x) + if (0.5..1.0).contains(&r) { 0.1 } else { 0.0 }
            },
            RadialRegion::punctured_space(),
        );
        let y = [1.5, 0.0];
        let rep = verify_reflecting_complementary(&perturbed, dc.f.as_ref(), 1.0, &[y]);
        assert!(!rep.pass);
        let det = determinant(&SmoothMap::<f64, 2>::jacobian(&kelvin_map(1.0).unwrap(), &[1.0 / 1.5, 0.0]).unwrap())
            .abs();
        assert!((rep.max_sigma_deviation - 0.1 / det).abs() < 1e-10);
    }

    #[test]
    fn works_in_double_double() {
        let field = CoefficientField::<Dd, 3>::constant(1.0, 1.0, RadialRegion::punctured_space());
        let k = kelvin_map(1.0).unwrap();
        let y = [Dd::from_f64(0.5), Dd::from_f64(0.0), Dd::from_f64(0.0)];
        let (m, s) = push_forward(&k, &field, &y).unwrap();
        // d = 3: a ↦ (r/|y|)^{2} I = 4 I, σ ↦ (r/|y|)^6 = 64
        assert!((m[0][0] - Dd::from_f64(4.0)).abs().to_f64() < 1e-28);
        assert!((s - Dd::from_f64(64.0)).abs().to_f64() < 1e-27);
    }

    #[test]
    fn eigenvalues_of_symmetric_matrix() {
        let m = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let ev = symmetric_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14 && (ev[2] - 5.0).abs() < 1e-14);
    }
}
