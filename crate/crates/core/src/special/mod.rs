//! Cylindrical and spherical Bessel functions of complex argument, with the
//! hat normalizations `Ĵ_n = 2ⁿ n! J_n`, `Ŷ_n = −π Y_n / (2ⁿ (n−1)!)`,
//! `ĵ_n = (2n+1)!! j_n` and `ŷ_n = −y_n / (2n−1)!!`.
//!
//! Values are returned as [`Scaled`] numbers so that orders up to 500 stay
//! representable; the plain `hat_*` functions convert to `Complex64` and
//! overflow to infinity where the value itself does.

mod cylindrical;
pub mod harmonics;
pub mod reference;
mod scaled;
mod spherical;

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{AlrError, Result};

pub use scaled::Scaled;

/// Largest supported order.
pub const MAX_ORDER: u32 = 500;
/// Largest supported `|t|`.
pub const MAX_ARGUMENT: f64 = 1e3;

pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Cylindrical,
    Spherical,
}

impl Kind {
    pub fn from_dimension(d: usize) -> Result<Kind> {
        match d {
            2 => Ok(Kind::Cylindrical),
            3 => Ok(Kind::Spherical),
            _ => Err(AlrError::InconsistentInput(format!("dimension {d} not in {{2, 3}}"))),
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            Kind::Cylindrical => 2,
            Kind::Spherical => 3,
        }
    }
}

/// Standard-normalized regular and singular functions with their
/// derivatives with respect to the argument.
#[derive(Clone, Copy, Debug)]
pub struct BesselPair {
    pub j: Scaled,
    pub dj: Scaled,
    pub y: Scaled,
    pub dy: Scaled,
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(2 * MAX_ORDER as usize + 8);
        let mut acc = 0.0f64;
        let mut c = 0.0f64;
        v.push(0.0);
        for k in 1..(2 * MAX_ORDER as usize + 8) {
            // compensated sum keeps ln(1000!) accurate to a few ulps
            let y = (k as f64).ln() - c;
            let s = acc + y;
            c = (s - acc) - y;
            acc = s;
            v.push(acc);
        }
        v
    });
    t[n]
}

fn check(n: u32, z: Complex64) -> Result<()> {
    if n > MAX_ORDER {
        return Err(AlrError::OrderOverflow(n));
    }
    let a = z.norm();
    if !a.is_finite() || a > MAX_ARGUMENT {
        return Err(AlrError::ArgumentRange(a));
    }
    Ok(())
}

fn is_zero(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

fn one() -> Scaled {
    Scaled::from_c64(Complex64::new(1.0, 0.0))
}

/// Value and derivative at the origin of the regular function, which is
/// `δ_{n0}` with derivative `1/2` (cylindrical) or `1/3` (spherical) at
/// `n = 1`.
fn regular_at_origin(kind: Kind, n: u32) -> (Scaled, Scaled) {
    let v = if n == 0 { one() } else { Scaled::ZERO };
    let d = match (n, kind) {
        (1, Kind::Cylindrical) => one() * 0.5,
        (1, Kind::Spherical) => one() * (1.0 / 3.0),
        _ => Scaled::ZERO,
    };
    (v, d)
}

fn raw(kind: Kind, n: u32, z: Complex64, want_y: bool) -> [Scaled; 4] {
    match kind {
        Kind::Cylindrical => cylindrical::evaluate(n, z, want_y),
        Kind::Spherical => spherical::evaluate(n, z, want_y),
    }
}

/// `Z_n' = (n/z) Z_n − Z_{n+1}`, valid for both kinds.
fn derivative(n: u32, z: Complex64, f: Scaled, f_next: Scaled) -> Scaled {
    (f * (n as f64 / z)).sub(f_next)
}

/// Regular function `J_n` or `j_n` and its derivative; defined at `z = 0`.
pub fn bessel_regular(kind: Kind, n: u32, z: Complex64) -> Result<(Scaled, Scaled)> {
    check(n, z)?;
    if is_zero(z) {
        return Ok(regular_at_origin(kind, n));
    }
    let [j, j1, _, _] = raw(kind, n, z, false);
    Ok((j, derivative(n, z, j, j1)))
}

/// Regular and singular functions with derivatives; `z = 0` is a pole.
pub fn bessel(kind: Kind, n: u32, z: Complex64) -> Result<BesselPair> {
    check(n, z)?;
    if is_zero(z) {
        return Err(AlrError::Pole);
    }
    let [j, j1, y, y1] = raw(kind, n, z, true);
    Ok(BesselPair { j, dj: derivative(n, z, j, j1), y, dy: derivative(n, z, y, y1) })
}

/// Log-space hat factors for orders `0..=MAX_ORDER`.
#[derive(Clone, Debug, PartialEq)]
pub struct HatTable {
    ln_cyl_j: Vec<f64>,
    ln_cyl_y: Vec<f64>,
    ln_sph_j: Vec<f64>,
    ln_sph_y: Vec<f64>,
}

impl HatTable {
    fn build() -> HatTable {
        let len = MAX_ORDER as usize + 1;
        let mut t = HatTable {
            ln_cyl_j: Vec::with_capacity(len),
            ln_cyl_y: Vec::with_capacity(len),
            ln_sph_j: Vec::with_capacity(len),
            ln_sph_y: Vec::with_capacity(len),
        };
        // ln n! by direct summation, kept separate from the series code
        let mut lf = vec![0.0f64; 2 * len + 2];
        for k in 1..lf.len() {
            lf[k] = lf[k - 1] + (k as f64).ln();
        }
        for n in 0..len {
            let nf = n as f64;
            t.ln_cyl_j.push(nf * LN_2 + lf[n]);
            t.ln_cyl_y.push(if n == 0 { LN_2 } else { nf * LN_2 + lf[n - 1] });
            t.ln_sph_j.push(lf[2 * n + 1] - nf * LN_2 - lf[n]);
            t.ln_sph_y.push(lf[2 * n] - nf * LN_2 - lf[n]);
        }
        t
    }

    /// Shared table built on first use.
    pub fn standard() -> &'static HatTable {
        static TABLE: OnceLock<HatTable> = OnceLock::new();
        TABLE.get_or_init(HatTable::build)
    }

    /// Copy with the regular cylindrical factor at order `n` shifted by
    /// `ln_offset`, for fault-injection checks.
    pub fn corrupted(n: u32, ln_offset: f64) -> HatTable {
        let mut t = HatTable::standard().clone();
        if let Some(v) = t.ln_cyl_j.get_mut(n as usize) {
            *v += ln_offset;
        }
        t
    }

    /// `ln` of the factor multiplying the standard regular function.
    pub fn ln_regular(&self, kind: Kind, n: u32) -> f64 {
        match kind {
            Kind::Cylindrical => self.ln_cyl_j[n as usize],
            Kind::Spherical => self.ln_sph_j[n as usize],
        }
    }

    /// `ln` of the modulus of the factor multiplying the standard singular
    /// function (the factor itself is negative).
    pub fn ln_singular(&self, kind: Kind, n: u32) -> f64 {
        match kind {
            Kind::Cylindrical => self.ln_cyl_y[n as usize] - PI.ln(),
            Kind::Spherical => self.ln_sph_y[n as usize],
        }
    }

    /// `(Ĵ_n(t), Ĵ_n'(t))` or the spherical analogue.
    pub fn hat_regular(&self, kind: Kind, n: u32, t: Complex64) -> Result<(Scaled, Scaled)> {
        let (v, d) = bessel_regular(kind, n, t)?;
        let f = self.ln_regular(kind, n);
        Ok((v.scale_ln(f), d.scale_ln(f)))
    }

    /// `(Ŷ_n(t), Ŷ_n'(t))` or the spherical analogue.
    pub fn hat_singular(&self, kind: Kind, n: u32, t: Complex64) -> Result<(Scaled, Scaled)> {
        let p = bessel(kind, n, t)?;
        let f = -self.ln_singular(kind, n);
        Ok(((-p.y).scale_ln(f), (-p.dy).scale_ln(f)))
    }

    /// Hat-normalized pair `(Ĵ, Ĵ', Ŷ, Ŷ')` from a single evaluation.
    pub fn hat_pair(&self, kind: Kind, n: u32, t: Complex64) -> Result<BesselPair> {
        let p = bessel(kind, n, t)?;
        let fj = self.ln_regular(kind, n);
        let fy = -self.ln_singular(kind, n);
        Ok(BesselPair {
            j: p.j.scale_ln(fj),
            dj: p.dj.scale_ln(fj),
            y: (-p.y).scale_ln(fy),
            dy: (-p.dy).scale_ln(fy),
        })
    }
}

macro_rules! hat_fn {
    ($name:ident, $prime:ident, $method:ident, $kind:expr) => {
        pub fn $name(n: u32, t: Complex64) -> Result<Complex64> {
            Ok(HatTable::standard().$method($kind, n, t)?.0.value())
        }
        pub fn $prime(n: u32, t: Complex64) -> Result<Complex64> {
            Ok(HatTable::standard().$method($kind, n, t)?.1.value())
        }
    };
}

hat_fn!(hat_cyl_j, hat_cyl_j_prime, hat_regular, Kind::Cylindrical);
hat_fn!(hat_cyl_y, hat_cyl_y_prime, hat_singular, Kind::Cylindrical);
hat_fn!(hat_sph_j, hat_sph_j_prime, hat_regular, Kind::Spherical);
hat_fn!(hat_sph_y, hat_sph_y_prime, hat_singular, Kind::Spherical);

/// Outgoing radial function `H_n^{(1)}(kr)` (d = 2) or `h_n^{(1)}(kr)`
/// (d = 3) and its `r`-derivative, in scaled form.
pub fn outgoing_radial_scaled(n: u32, d: usize, k: f64, r: f64) -> Result<(Scaled, Scaled)> {
    if k <= 0.0 {
        return Err(AlrError::Domain(format!("outgoing functions need k > 0, got {k}")));
    }
    if r <= 0.0 {
        return Err(AlrError::Domain(format!("outgoing functions need r > 0, got {r}")));
    }
    let kind = Kind::from_dimension(d)?;
    let p = bessel(kind, n, Complex64::new(k * r, 0.0))?;
    let i = Complex64::new(0.0, 1.0);
    let h = p.j.add(p.y * i);
    let dh = p.dj.add(p.dy * i) * k;
    Ok((h, dh))
}

/// Plain-valued [`outgoing_radial_scaled`].
pub fn outgoing_radial(n: u32, d: usize, k: f64, r: f64) -> Result<(Complex64, Complex64)> {
    let (h, dh) = outgoing_radial_scaled(n, d, k, r)?;
    Ok((h.value(), dh.value()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Family {
    Hat,
    Quasistatic,
}

/// Regular/singular radial pair of one order: hat-normalized Bessel
/// functions of `t`, or the `k = 0` power functions of `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialBasisPair {
    pub n: u32,
    pub kind: Kind,
    family: Family,
}

impl RadialBasisPair {
    pub fn hat(kind: Kind, n: u32) -> Self {
        RadialBasisPair { n, kind, family: Family::Hat }
    }

    pub fn is_quasistatic(&self) -> bool {
        self.family == Family::Quasistatic
    }

    /// Regular function and derivative.
    pub fn regular(&self, t: Complex64) -> Result<(Complex64, Complex64)> {
        match self.family {
            Family::Hat => {
                let (v, d) = HatTable::standard().hat_regular(self.kind, self.n, t)?;
                Ok((v.value(), d.value()))
            }
            Family::Quasistatic => {
                let n = self.n as i32;
                if n == 0 {
                    return Ok((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
                }
                Ok((t.powi(n), t.powi(n - 1) * n as f64))
            }
        }
    }

    /// Singular function and derivative.
    pub fn singular(&self, t: Complex64) -> Result<(Complex64, Complex64)> {
        if is_zero(t) {
            return Err(AlrError::Pole);
        }
        match self.family {
            Family::Hat => {
                let (v, d) = HatTable::standard().hat_singular(self.kind, self.n, t)?;
                Ok((v.value(), d.value()))
            }
            Family::Quasistatic => {
                let n = self.n as i32;
                match self.kind {
                    Kind::Cylindrical if n == 0 => Ok((t.ln(), t.inv())),
                    Kind::Cylindrical => Ok((t.powi(-n), t.powi(-n - 1) * (-n as f64))),
                    Kind::Spherical => Ok((t.powi(-n - 1), t.powi(-n - 2) * (-(n + 1) as f64))),
                }
            }
        }
    }
}

/// Relative gap between the series and recurrence evaluations of the
/// regular and singular functions; both paths are valid for `|z|²/4 ≈ n + 1`.
pub fn series_recurrence_gap(kind: Kind, n: u32, z: Complex64) -> f64 {
    match kind {
        Kind::Cylindrical => cylindrical::series_recurrence_gap(n, z),
        Kind::Spherical => spherical::series_recurrence_gap(n, z),
    }
}

/// `k → 0` basis: `rⁿ` with `r⁻ⁿ` (d = 2, n ≥ 1), `log r` (d = 2, n = 0) or
/// `r^{−n−1}` (d = 3).
pub fn quasistatic_basis(n: u32, d: usize) -> Result<RadialBasisPair> {
    Ok(RadialBasisPair { n, kind: Kind::from_dimension(d)?, family: Family::Quasistatic })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn known_values() {
        // J_0(1), Y_0(1), J_5(10), Y_5(10)
        let p = bessel(Kind::Cylindrical, 0, c(1.0, 0.0)).unwrap();
        assert!(rel(p.j.value(), c(0.765_197_686_557_966_6, 0.0)) < 1e-14);
        assert!(rel(p.y.value(), c(0.088_256_964_215_676_96, 0.0)) < 1e-13);
        let p = bessel(Kind::Cylindrical, 5, c(10.0, 0.0)).unwrap();
        assert!(rel(p.j.value(), c(-0.234_061_528_186_793_7, 0.0)) < 1e-13);
        assert!(rel(p.y.value(), c(0.135_403_047_689_362_4, 0.0)) < 1e-13);
        let p = bessel(Kind::Cylindrical, 1, c(2.0, 1.0)).unwrap();
        assert!(rel(p.j.value(), c(0.790_623_392_553_428_3, -0.079_932_694_167_776_05)) < 1e-13);
        let p = bessel(Kind::Spherical, 2, c(3.0, 0.0)).unwrap();
        assert!(rel(p.j.value(), c(0.298_637_497_075_733_5, 0.0)) < 1e-13);
        assert!(rel(p.y.value(), c(-0.267_038_335_264_499_2, 0.0)) < 1e-12);
    }

    #[test]
    fn trivial_hat_values() {
        assert!(rel(hat_cyl_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-15);
        let t = c(0.7, 0.2);
        let j0 = bessel(Kind::Cylindrical, 0, t).unwrap().j.value();
        assert!(rel(hat_cyl_j(0, t).unwrap(), j0) < 1e-15);
        let r = hat_cyl_j(40, c(0.5, 0.0)).unwrap() / 0.5f64.powi(40);
        assert!((r.re - 1.0).abs() < 0.02);
    }

    #[test]
    fn spherical_singular_small_argument() {
        let k = 1.0;
        for r in [1e-3, 1e-2] {
            let v = hat_sph_y(40, c(k * r, 0.0)).unwrap();
            let scaled = v * r.powi(41);
            assert!((scaled.re - 1.0).abs() < 5.0 / 40.0, "{scaled}");
        }
    }

    #[test]
    fn hat_asymptotics_in_order() {
        for n in 20..=60u32 {
            for t in [0.1, 0.5, 1.0, 1.5, 2.0] {
                let tt = c(t, 0.0);
                let j = HatTable::standard().hat_regular(Kind::Cylindrical, n, tt).unwrap().0;
                let y = HatTable::standard().hat_singular(Kind::Cylindrical, n, tt).unwrap().0;
                let tn = Scaled::powi(tt, n as i64);
                let bound = 5.0 / n as f64;
                assert!((j.ratio(tn) - 1.0).norm() <= bound, "J n={n} t={t}");
                assert!(((y * tn).value() - 1.0).norm() <= bound, "Y n={n} t={t}");
                let sj = HatTable::standard().hat_regular(Kind::Spherical, n, tt).unwrap().0;
                let sy = HatTable::standard().hat_singular(Kind::Spherical, n, tt).unwrap().0;
                assert!((sj.ratio(tn) - 1.0).norm() <= bound, "j n={n} t={t}");
                assert!(((sy * tn * t).value() - 1.0).norm() <= bound, "y n={n} t={t}");
            }
        }
    }

    #[test]
    fn wronskians() {
        let args = [c(0.3, 0.0), c(1.0, 0.5), c(7.0, -2.0), c(40.0, 1.0), c(3.0, 3.0), c(250.0, 0.0)];
        for n in [0u32, 1, 2, 7, 30, 120, 400] {
            for &t in &args {
                let p = bessel(Kind::Cylindrical, n, t).unwrap();
                let w = (p.j * p.dy).sub(p.dj * p.y);
                let expect = Scaled::from_c64(2.0 / (PI * t));
                let scale = (p.j * p.dy).ln_abs().max((p.dj * p.y).ln_abs());
                let err = w.sub(expect).ln_abs() - expect.ln_abs().max(scale);
                assert!(err < (1e-10f64).ln(), "cyl n={n} t={t} err={}", err.exp());
                let p = bessel(Kind::Spherical, n, t).unwrap();
                let w = (p.j * p.dy).sub(p.dj * p.y);
                let expect = Scaled::from_c64(1.0 / (t * t));
                let scale = (p.j * p.dy).ln_abs().max((p.dj * p.y).ln_abs());
                let err = w.sub(expect).ln_abs() - expect.ln_abs().max(scale);
                assert!(err < (1e-10f64).ln(), "sph n={n} t={t} err={}", err.exp());
            }
        }
    }

    #[test]
    fn hat_wronskians() {
        for n in [0u32, 1, 5, 50] {
            let t = c(1.3, 0.4);
            let p = HatTable::standard().hat_pair(Kind::Cylindrical, n, t).unwrap();
            let w = (p.j * p.dy).sub(p.dj * p.y).value();
            let expect = if n == 0 { -1.0 / t } else { -2.0 * n as f64 / t };
            assert!(rel(w, expect) < 1e-10, "n={n}");
            let p = HatTable::standard().hat_pair(Kind::Spherical, n, t).unwrap();
            let w = (p.j * p.dy).sub(p.dj * p.y).value();
            assert!(rel(w, -((2 * n + 1) as f64) / (t * t)) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for kind in [Kind::Cylindrical, Kind::Spherical] {
            for n in [0u32, 1, 3, 12] {
                for t in [c(0.8, 0.0), c(5.0, 1.0), c(20.0, -0.5)] {
                    let p = bessel(kind, n, t).unwrap();
                    let pp = bessel(kind, n, t + h).unwrap();
                    let pm = bessel(kind, n, t - h).unwrap();
                    let fdj = (pp.j.value() - pm.j.value()) / (2.0 * h);
                    let fdy = (pp.y.value() - pm.y.value()) / (2.0 * h);
                    let sj = p.j.value().norm().max(p.dj.value().norm());
                    let sy = p.y.value().norm().max(p.dy.value().norm());
                    assert!((fdj - p.dj.value()).norm() / sj < 1e-7, "{kind:?} n={n} t={t}");
                    assert!((fdy - p.dy.value()).norm() / sy < 1e-7, "{kind:?} n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for kind in [Kind::Cylindrical, Kind::Spherical] {
            for n in [0u32, 2, 25] {
                for t in [c(0.5, 0.3), c(4.0, 2.0), c(30.0, 10.0)] {
                    let a = bessel(kind, n, t).unwrap();
                    let b = bessel(kind, n, t.conj()).unwrap();
                    assert!(rel(b.j.value(), a.j.value().conj()) < 1e-14);
                    assert!(rel(b.y.value(), a.y.value().conj()) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn outgoing_closed_form_and_radiation() {
        let k = 1.7;
        for r in [0.1, 1.0, 9.0] {
            let (h, _) = outgoing_radial(0, 3, k, r).unwrap();
            let ikr = c(0.0, k * r);
            assert!((h * ikr - ikr.exp()).norm() <= 1e-12);
        }
        for d in [2, 3] {
            let mut last = f64::INFINITY;
            for r in [10.0 / k, 100.0 / k, 1000.0 / k] {
                let (h, dh) = outgoing_radial(3, d, k, r).unwrap();
                let defect = (dh - c(0.0, k) * h).norm() * r.powf((d as f64 - 1.0) / 2.0);
                assert!(defect < last);
                last = defect;
            }
            assert!(last < 1e-2);
        }
        // W(J_n, H_n) = 2i / (pi t)
        let t = 2.5;
        let p = bessel(Kind::Cylindrical, 4, c(t, 0.0)).unwrap();
        let (h, dh) = outgoing_radial(4, 2, 1.0, t).unwrap();
        let w = p.j.value() * dh - p.dj.value() * h;
        assert!(rel(w, c(0.0, 2.0 / (PI * t))) < 1e-12);
    }

    #[test]
    fn quasistatic_examples() {
        let b = quasistatic_basis(3, 2).unwrap();
        assert_eq!(b.regular(c(2.0, 0.0)).unwrap().0, c(8.0, 0.0));
        assert_eq!(b.singular(c(2.0, 0.0)).unwrap().0, c(0.125, 0.0));
        let b = quasistatic_basis(1, 3).unwrap();
        assert_eq!(b.regular(c(2.0, 0.0)).unwrap().0, c(2.0, 0.0));
        assert_eq!(b.singular(c(2.0, 0.0)).unwrap().0, c(0.25, 0.0));
        let b = quasistatic_basis(0, 2).unwrap();
        let e = std::f64::consts::E;
        assert_eq!(b.regular(c(e, 0.0)).unwrap().0, c(1.0, 0.0));
        assert!((b.singular(c(e, 0.0)).unwrap().0 - 1.0).norm() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(hat_cyl_y(3, c(0.0, 0.0)), Err(AlrError::Pole));
        assert_eq!(hat_sph_y(0, c(0.0, 0.0)), Err(AlrError::Pole));
        assert_eq!(hat_cyl_j(501, c(1.0, 0.0)), Err(AlrError::OrderOverflow(501)));
        assert!(matches!(hat_cyl_j(1, c(2e3, 0.0)), Err(AlrError::ArgumentRange(_))));
        assert!(outgoing_radial(0, 2, 0.0, 1.0).is_err());
        assert!(hat_cyl_j(500, c(1.0, 0.0)).is_ok());
    }

    #[test]
    fn high_order_values_are_finite_in_scaled_form() {
        let (j, _) = HatTable::standard().hat_regular(Kind::Cylindrical, 400, c(1.0, 0.0)).unwrap();
        assert!((j.ln_abs()).abs() < 1e-2);
        let p = bessel(Kind::Cylindrical, 400, c(1.0, 0.0)).unwrap();
        assert!(p.j.ln_abs() < -2000.0 && p.y.ln_abs() > 2000.0);
    }

    #[test]
    fn corrupted_table_changes_only_one_order() {
        let bad = HatTable::corrupted(7, 1e-3);
        let good = HatTable::standard();
        let t = c(1.0, 0.0);
        let a = bad.hat_regular(Kind::Cylindrical, 7, t).unwrap().0;
        let b = good.hat_regular(Kind::Cylindrical, 7, t).unwrap().0;
        assert!((a.ratio(b) - 1.0).norm() > 5e-4);
        let a = bad.hat_regular(Kind::Cylindrical, 6, t).unwrap().0;
        let b = good.hat_regular(Kind::Cylindrical, 6, t).unwrap().0;
        assert_eq!(a, b);
    }
}
