//! Shell sources: flux-jump densities on the sphere `|x| = ρ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{AlrError, Result};

/// Angular mode: `e^{imθ}` (d = 2) or `Y_n^m` (d = 3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeIndex {
    Cyl(i64),
    Sph { n: u32, m: i32 },
}

impl ModeIndex {
    pub fn order(&self) -> u32 {
        match *self {
            ModeIndex::Cyl(m) => m.unsigned_abs() as u32,
            ModeIndex::Sph { n, .. } => n,
        }
    }

    pub fn azimuthal(&self) -> i64 {
        match *self {
            ModeIndex::Cyl(m) => m,
            ModeIndex::Sph { m, .. } => m as i64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SourceTerms {
    Explicit(BTreeMap<ModeIndex, Complex64>),
    /// Unit point density at angle 0 (d = 2) or the north pole (d = 3), each
    /// order reweighted by `(1 + n)^exponent`; infinitely many modes.
    PointLike { exponent: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShellSource {
    pub rho: f64,
    pub d: usize,
    pub terms: SourceTerms,
    pub description: String,
}

fn check_radius(rho: f64, d: usize) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(AlrError::Source(format!("source radius must be positive and finite, got {rho}")));
    }
    if d != 2 && d != 3 {
        return Err(AlrError::Source(format!("dimension must be 2 or 3, got {d}")));
    }
    Ok(())
}

impl ShellSource {
    pub fn explicit(rho: f64, d: usize, coefficients: impl IntoIterator<Item = (ModeIndex, Complex64)>) -> Result<Self> {
        check_radius(rho, d)?;
        let mut map = BTreeMap::new();
        for (idx, c) in coefficients {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(AlrError::Source(format!("non-finite amplitude at {idx:?}")));
            }
            match (d, idx) {
                (2, ModeIndex::Cyl(_)) => {}
                (3, ModeIndex::Sph { n, m }) if m.unsigned_abs() <= n => {}
                _ => return Err(AlrError::Source(format!("mode {idx:?} is not valid in dimension {d}"))),
            }
            if idx.order() > super::N_MAX {
                return Err(AlrError::Source(format!("mode {idx:?} above the cap {}", super::N_MAX)));
            }
            if c != Complex64::new(0.0, 0.0) {
                *map.entry(idx).or_insert(Complex64::new(0.0, 0.0)) += c;
            }
        }
        Ok(ShellSource { rho, d, terms: SourceTerms::Explicit(map), description: String::new() })
    }

    /// Single mode with unit amplitude.
    pub fn single(rho: f64, d: usize, idx: ModeIndex) -> Result<Self> {
        ShellSource::explicit(rho, d, [(idx, Complex64::new(1.0, 0.0))])
    }

    pub fn point_like(rho: f64, d: usize, exponent: f64) -> Result<Self> {
        check_radius(rho, d)?;
        if !exponent.is_finite() {
            return Err(AlrError::Source("profile exponent must be finite".into()));
        }
        Ok(ShellSource { rho, d, terms: SourceTerms::PointLike { exponent }, description: String::new() })
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.description = text.into();
        self
    }

    /// Same angular content at another radius.
    pub fn at_radius(&self, rho: f64) -> Result<Self> {
        check_radius(rho, self.d)?;
        Ok(ShellSource { rho, ..self.clone() })
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.terms, SourceTerms::Explicit(_))
    }

    /// Highest order carried, `None` for infinite profiles.
    pub fn max_order(&self) -> Option<u32> {
        match &self.terms {
            SourceTerms::Explicit(map) => Some(map.keys().map(|k| k.order()).max().unwrap_or(0)),
            SourceTerms::PointLike { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.terms, SourceTerms::Explicit(m) if m.is_empty())
    }

    /// Terms of order `n`.
    pub fn terms_of_order(&self, n: u32) -> Vec<(ModeIndex, Complex64)> {
        match &self.terms {
            SourceTerms::Explicit(map) => map.iter().filter(|(k, _)| k.order() == n).map(|(k, v)| (*k, *v)).collect(),
            SourceTerms::PointLike { exponent } => {
                let w = (1.0 + n as f64).powf(*exponent);
                if self.d == 2 {
                    let c = Complex64::new(w / (2.0 * PI * self.rho), 0.0);
                    if n == 0 {
                        vec![(ModeIndex::Cyl(0), c)]
                    } else {
                        vec![(ModeIndex::Cyl(-(n as i64)), c), (ModeIndex::Cyl(n as i64), c)]
                    }
                } else {
                    let y = ((2.0 * n as f64 + 1.0) / (4.0 * PI)).sqrt();
                    vec![(ModeIndex::Sph { n, m: 0 }, Complex64::new(w * y / (self.rho * self.rho), 0.0))]
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ShellSource::explicit(1.0, 2, [(ModeIndex::Sph { n: 1, m: 0 }, Complex64::new(1.0, 0.0))]).is_err());
        assert!(ShellSource::explicit(1.0, 3, [(ModeIndex::Sph { n: 1, m: 2 }, Complex64::new(1.0, 0.0))]).is_err());
        assert!(ShellSource::explicit(-1.0, 2, []).is_err());
        assert!(ShellSource::explicit(1.0, 2, [(ModeIndex::Cyl(1), Complex64::new(f64::NAN, 0.0))]).is_err());
        let s = ShellSource::explicit(2.0, 2, [(ModeIndex::Cyl(3), Complex64::new(0.0, 0.0))]).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn point_like_terms() {
        let s = ShellSource::point_like(2.0, 2, 0.0).unwrap();
        let t = s.terms_of_order(3);
        assert_eq!(t.len(), 2);
        assert!((t[0].1.re - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(s.terms_of_order(0).len(), 1);
        let s3 = ShellSource::point_like(1.0, 3, 0.0).unwrap();
        let t = s3.terms_of_order(2);
        assert!((t[0].1.re - (5.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
    }
}
