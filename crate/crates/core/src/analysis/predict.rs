use crate::error::{AlrError, Result};
use crate::solver::ShellSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prediction {
    BlowsUp,
    Bounded,
}

/// Blow-up iff the source radius lies below `√(r₂r₃)`. Sources at or beyond
/// `r₃` are bounded; the threshold itself is excluded.
pub fn predict_blowup(rho: f64, r2: f64, r3: f64) -> Result<Prediction> {
    if !(r2 > 0.0 && r2 < r3 && r3.is_finite()) {
        return Err(AlrError::Geometry(format!("need 0 < r2 < r3, got r2 = {r2}, r3 = {r3}")));
    }
    if !(rho > r2 && rho.is_finite()) {
        return Err(AlrError::Geometry(format!("source radius {rho} must exceed r2 = {r2}")));
    }
    let critical = (r2 * r3).sqrt();
    if (rho - critical).abs() <= 1e-12 * critical {
        return Err(AlrError::BoundaryCase(critical));
    }
    Ok(if rho < critical { Prediction::BlowsUp } else { Prediction::Bounded })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloakVerdict {
    Cloakable,
    NotCloakable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CloakAssessment {
    pub verdict: CloakVerdict,
    pub note: String,
}

/// Radial substitute for the `f ∉ H` test: a nonzero shell source is
/// cloaked iff it sits inside `√(r₂r₃)`.
pub fn cloak_admissibility(source: &ShellSource, r2: f64, r3: f64) -> CloakAssessment {
    let not = |note: String| CloakAssessment { verdict: CloakVerdict::NotCloakable, note };
    if source.is_zero() {
        return not("zero source: nothing to cloak".into());
    }
    match predict_blowup(source.rho, r2, r3) {
        Ok(Prediction::BlowsUp) => CloakAssessment {
            verdict: CloakVerdict::Cloakable,
            note: format!("rho = {} < sqrt(r2 r3) = {}", source.rho, (r2 * r3).sqrt()),
        },
        Ok(Prediction::Bounded) => not(format!("power stays bounded; rho = {} > sqrt(r2 r3)", source.rho)),
        Err(AlrError::BoundaryCase(c)) => not(format!("rho = sqrt(r2 r3) = {c}: boundary case, no prediction")),
        Err(e) => not(format!("criterion does not apply: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::ModeIndex;

    #[test]
    fn prediction() {
        assert_eq!(predict_blowup(1.5, 1.0, 4.0).unwrap(), Prediction::BlowsUp);
        assert_eq!(predict_blowup(3.0, 1.0, 4.0).unwrap(), Prediction::Bounded);
        assert_eq!(predict_blowup(6.0, 1.0, 4.0).unwrap(), Prediction::Bounded);
        assert_eq!(predict_blowup(2.0, 1.0, 4.0), Err(AlrError::BoundaryCase(2.0)));
        assert!(matches!(predict_blowup(0.5, 1.0, 4.0), Err(AlrError::Geometry(_))));
        assert!(predict_blowup(1.5, 4.0, 1.0).is_err());
    }

    #[test]
    fn cloaking() {
        let s = ShellSource::single(1.5, 2, ModeIndex::Cyl(3)).unwrap();
        assert_eq!(cloak_admissibility(&s, 1.0, 4.0).verdict, CloakVerdict::Cloakable);
        let s = s.at_radius(3.0).unwrap();
        assert_eq!(cloak_admissibility(&s, 1.0, 4.0).verdict, CloakVerdict::NotCloakable);
        let z = ShellSource::explicit(1.5, 2, []).unwrap();
        let a = cloak_admissibility(&z, 1.0, 4.0);
        assert_eq!(a.verdict, CloakVerdict::NotCloakable);
        assert!(a.note.contains("zero"));
        let b = cloak_admissibility(&s.at_radius(2.0).unwrap(), 1.0, 4.0);
        assert!(b.note.contains("boundary"));
    }
}
