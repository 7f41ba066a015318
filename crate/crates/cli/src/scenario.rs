//! Scenario files: versioned JSON describing medium, source, δ-grid and
//! output location.

use std::hash::{DefaultHasher, Hash, Hasher};
use std::path::PathBuf;

use alr_core::media::{Profile, RadialLayeredMedium};
use alr_core::solver::{ModeIndex, ShellSource};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant { value: f64 },
    /// `coef · r^exponent`
    Power { coef: f64, exponent: f64 },
}

impl ProfileSpec {
    pub fn profile(&self) -> Profile {
        match *self {
            ProfileSpec::Constant { value } => Profile::Constant(value),
            ProfileSpec::Power { coef, exponent } => Profile::Power { coef, exponent },
        }
    }

    pub(crate) fn validate(&self, field: &str) -> Result<(), CliError> {
        let ok = match *self {
            ProfileSpec::Constant { value } => value > 0.0 && value.is_finite(),
            ProfileSpec::Power { coef, exponent } => coef > 0.0 && coef.is_finite() && exponent.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(config(field, "profile must be positive and finite"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    /// Core `(I, 1)` on `[0, r₁)` and the negative shell `[r₁, r₂)`.
    CoreShell { r1: f64, r2: f64 },
    /// Doubly complementary medium built from `(a, σ)` on `[r₂, r₃)`.
    Complementary { r2: f64, r3: f64, a: ProfileSpec, sigma: ProfileSpec },
}

impl Geometry {
    /// `(r₂, r₃)` of the outer annulus, `r₃ = r₂²/r₁` for a core–shell.
    pub fn annulus(&self) -> (f64, f64) {
        match *self {
            Geometry::CoreShell { r1, r2 } => (r2, r2 * r2 / r1),
            Geometry::Complementary { r2, r3, .. } => (r2, r3),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAmplitude {
    /// Degree, required in d = 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub m: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceProfile {
    Modes { modes: Vec<ModeAmplitude> },
    PointLike { exponent: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub rho: f64,
    pub profile: SourceProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub dimension: usize,
    pub k: f64,
    pub geometry: Geometry,
    pub source: SourceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Input of `design-cloak`: the profile on the outer annulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusMedium {
    pub schema_version: u32,
    pub dimension: usize,
    pub a: ProfileSpec,
    pub sigma: ProfileSpec,
}

impl AnnulusMedium {
    pub fn load(path: &std::path::Path) -> Result<AnnulusMedium, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let m: AnnulusMedium = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(config("schema_version", &format!("unsupported version, expected {SCHEMA_VERSION}")));
        }
        if m.dimension != 2 && m.dimension != 3 {
            return Err(config("dimension", "must be 2 or 3"));
        }
        m.a.validate("a")?;
        m.sigma.validate("sigma")?;
        Ok(m)
    }
}

fn config(field: &str, msg: &str) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, CliError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &std::path::Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Scenario::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config("schema_version", &format!("unsupported version, expected {SCHEMA_VERSION}")));
        }
        if self.dimension != 2 && self.dimension != 3 {
            return Err(config("dimension", "must be 2 or 3"));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(config("k", "must be finite and >= 0"));
        }
        match &self.geometry {
            Geometry::CoreShell { r1, r2 } => {
                if !(*r1 > 0.0 && r1 < r2 && r2.is_finite()) {
                    return Err(config("geometry", "need 0 < r1 < r2"));
                }
            }
            Geometry::Complementary { r2, r3, a, sigma } => {
                if !(*r2 > 0.0 && r2 < r3 && r3.is_finite()) {
                    return Err(config("geometry", "need 0 < r2 < r3"));
                }
                a.validate("geometry.a")?;
                sigma.validate("geometry.sigma")?;
            }
        }
        let rho = self.source.rho;
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(config("source.rho", "must be positive and finite"));
        }
        match &self.source.profile {
            SourceProfile::Modes { modes } => {
                for (i, m) in modes.iter().enumerate() {
                    if !(m.re.is_finite() && m.im.is_finite()) {
                        return Err(config(&format!("source.profile.modes[{i}]"), "amplitude must be finite"));
                    }
                    if self.dimension == 3 && m.n.is_none() {
                        return Err(config(&format!("source.profile.modes[{i}].n"), "required in dimension 3"));
                    }
                }
            }
            SourceProfile::PointLike { exponent } => {
                if !exponent.is_finite() {
                    return Err(config("source.profile.exponent", "must be finite"));
                }
            }
        }
        if let Some(d) = &self.deltas {
            if d.is_empty() {
                return Err(config("deltas", "empty delta grid"));
            }
            if d.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                return Err(config("deltas", "values must lie in (0, 1)"));
            }
            if d.windows(2).any(|w| w[1] >= w[0]) {
                return Err(config("deltas", "must be strictly decreasing"));
            }
        }
        if let Some([lo, hi]) = self.rho_range {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(config("rho_range", "need 0 < lo < hi"));
            }
        }
        self.source()?;
        Ok(())
    }

    pub fn medium(&self) -> Result<RadialLayeredMedium, CliError> {
        let d = self.dimension;
        let m = match &self.geometry {
            Geometry::CoreShell { r1, r2 } => RadialLayeredMedium::core_shell(d, *r1, *r2),
            Geometry::Complementary { r2, r3, a, sigma } => {
                RadialLayeredMedium::doubly_complementary(d, a.profile(), sigma.profile(), *r2, *r3)
            }
        };
        m.map_err(|e| config("geometry", &e.to_string()))
    }

    pub fn source_at(&self, rho: f64) -> Result<ShellSource, CliError> {
        let d = self.dimension;
        let s = match &self.source.profile {
            SourceProfile::PointLike { exponent } => ShellSource::point_like(rho, d, *exponent),
            SourceProfile::Modes { modes } => {
                let terms = modes.iter().map(|m| {
                    let idx = match d {
                        2 => ModeIndex::Cyl(m.m),
                        _ => ModeIndex::Sph { n: m.n.unwrap_or(0), m: m.m as i32 },
                    };
                    (idx, Complex64::new(m.re, m.im))
                });
                ShellSource::explicit(rho, d, terms.collect::<Vec<_>>())
            }
        };
        s.map_err(|e| config("source", &e.to_string()))
    }

    pub fn source(&self) -> Result<ShellSource, CliError> {
        self.source_at(self.source.rho)
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.deltas.clone().unwrap_or_else(alr_core::analysis::default_deltas)
    }

    /// Hex digest of the canonical serialization.
    pub fn hash(&self) -> String {
        let mut h = DefaultHasher::new();
        serde_json::to_string(self).expect("scenario serializes").hash(&mut h);
        format!("{:016x}", h.finish())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MN: &str = r#"{
        "schema_version": 1,
        "dimension": 2,
        "k": 0.0,
        "geometry": {"type": "core_shell", "r1": 1.0, "r2": 2.0},
        "source": {"rho": 2.5, "profile": {"type": "modes", "modes": [{"m": 3, "re": 1.0}, {"m": -3, "re": 0.5, "im": 0.25}]}},
        "deltas": [0.1, 0.01, 0.001],
        "rho_range": [2.2, 3.6]
    }"#;

    #[test]
    fn round_trip() {
        let s = Scenario::parse(MN).unwrap();
        let again = Scenario::parse(&s.to_json()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.hash(), again.hash());
        assert_eq!(s.geometry.annulus(), (2.0, 4.0));
        let src = s.source().unwrap();
        assert_eq!(src.terms_of_order(3).len(), 2);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = MN.replace("\"deltas\": [0.1, 0.01, 0.001]", "\"deltas\": []");
        let e = Scenario::parse(&bad).unwrap_err();
        assert!(e.to_string().contains("deltas"), "{e}");
        let bad = MN.replace("\"r1\": 1.0", "\"r1\": 3.0");
        assert!(Scenario::parse(&bad).unwrap_err().to_string().contains("geometry"));
        let bad = MN.replace("\"k\": 0.0", "\"kk\": 0.0");
        let e = Scenario::parse(&bad).unwrap_err().to_string();
        assert!(e.contains("kk") && e.contains("line"), "{e}");
        let bad = MN.replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(Scenario::parse(&bad).unwrap_err().to_string().contains("schema_version"));
        let bad = MN.replace("\"deltas\": [0.1, 0.01, 0.001]", "\"deltas\": [0.01, 0.1]");
        assert!(Scenario::parse(&bad).is_err());
    }

    #[test]
    fn three_dimensional_modes_need_a_degree() {
        let s = MN.replace("\"dimension\": 2", "\"dimension\": 3");
        assert!(Scenario::parse(&s).unwrap_err().to_string().contains(".n"));
    }
}
