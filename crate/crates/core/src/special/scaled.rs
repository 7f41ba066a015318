use std::ops::{Mul, Neg};

use num_complex::Complex64;

/// Complex number stored as `mant · e^{ln_scale}`, for Bessel values far
/// outside the `f64` exponent range (`J_400(1) ~ 1e-1000`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mant: Complex64,
    pub ln_scale: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { mant: Complex64::new(0.0, 0.0), ln_scale: 0.0 };

    pub fn new(mant: Complex64, ln_scale: f64) -> Self {
        Scaled { mant, ln_scale }.normalized()
    }

    pub fn from_c64(z: Complex64) -> Self {
        Scaled::new(z, 0.0)
    }

    /// `e^{w}` for complex `w`.
    pub fn exp(w: Complex64) -> Self {
        Scaled { mant: Complex64::from_polar(1.0, w.im), ln_scale: w.re }
    }

    /// `z^n`, exact in modulus for any `n`.
    pub fn powi(z: Complex64, n: i64) -> Self {
        if n == 0 {
            return Scaled::from_c64(Complex64::new(1.0, 0.0));
        }
        let (r, th) = z.to_polar();
        Scaled { mant: Complex64::from_polar(1.0, th * n as f64), ln_scale: n as f64 * r.ln() }
    }

    /// Moves the magnitude of the mantissa into `ln_scale`.
    pub fn normalized(self) -> Self {
        let a = self.mant.norm();
        if a == 0.0 || !a.is_finite() {
            return if a == 0.0 { Scaled::ZERO } else { self };
        }
        Scaled { mant: self.mant / a, ln_scale: self.ln_scale + a.ln() }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    /// Plain value; overflows to infinity or underflows to zero when the
    /// magnitude is outside the `f64` range.
    pub fn value(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.mant * self.ln_scale.exp()
    }

    /// `ln |self|`, `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        self.mant.norm().ln() + self.ln_scale
    }

    pub fn scale_ln(self, ln_factor: f64) -> Self {
        Scaled { mant: self.mant, ln_scale: self.ln_scale + ln_factor }
    }

    pub fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (a, b) = (self.normalized(), other.normalized());
        let s = a.ln_scale.max(b.ln_scale);
        Scaled::new(a.mant * (a.ln_scale - s).exp() + b.mant * (b.ln_scale - s).exp(), s)
    }

    pub fn sub(self, other: Scaled) -> Scaled {
        self.add(-other)
    }

    pub fn div(self, other: Scaled) -> Scaled {
        Scaled::new(self.mant / other.mant, self.ln_scale - other.ln_scale)
    }

    pub fn recip(self) -> Scaled {
        Scaled::new(Complex64::new(1.0, 0.0) / self.mant, -self.ln_scale)
    }

    pub fn conj(self) -> Scaled {
        Scaled { mant: self.mant.conj(), ln_scale: self.ln_scale }
    }

    /// `self / reference` as a plain number, for ratios of nearby magnitudes.
    pub fn ratio(self, reference: Scaled) -> Complex64 {
        self.div(reference).value()
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mant * rhs.mant, self.ln_scale + rhs.ln_scale)
    }
}

impl Mul<Complex64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Complex64) -> Scaled {
        Scaled::new(self.mant * rhs, self.ln_scale)
    }
}

impl Mul<f64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: f64) -> Scaled {
        Scaled::new(self.mant * rhs, self.ln_scale)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled { mant: -self.mant, ln_scale: self.ln_scale }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beyond_f64_range() {
        let big = Scaled::powi(Complex64::new(10.0, 0.0), 400);
        let small = Scaled::powi(Complex64::new(10.0, 0.0), -398);
        assert!(((big * small).value().re - 100.0).abs() < 1e-10);
        assert!(big.value().re.is_infinite());
        let s = big.add(big);
        assert!((s.ln_abs() - (400.0 * 10f64.ln() + 2f64.ln())).abs() < 1e-12);
        assert!(big.sub(big).is_zero());
    }

    #[test]
    fn exp_keeps_phase() {
        let w = Complex64::new(800.0, 1.0);
        let e = Scaled::exp(w);
        assert!((e.ln_abs() - 800.0).abs() < 1e-12);
        assert!((e.mant - Complex64::from_polar(1.0, 1.0)).norm() < 1e-15);
    }
}
