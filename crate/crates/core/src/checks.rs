//! Invariant suites shared by the self-test command and the test harness.
//! Each returns the worst observed defect against a fixed tolerance.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::media::{Profile, RadialLayeredMedium};
use crate::oracle::radial_oracle;
use crate::solver::{far_radius, solve_field, solve_mode, ShellSource};
use crate::special::{series_recurrence_gap, HatTable, Kind, Scaled};
use crate::transforms::{
    annulus_samples, build_doubly_complementary, compose_maps, inverse_map, kelvin_map, push_forward,
    verify_reflecting_complementary, CoefficientField, Dilation, Matrix, RadialRegion, SmoothMap, Vector,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, worst: f64, tolerance: f64, detail: String) -> Self {
        Check { name, worst, tolerance, pass: worst <= tolerance, detail }
    }

    fn failed(name: &'static str, tolerance: f64, detail: String) -> Self {
        Check { name, worst: f64::INFINITY, tolerance, pass: false, detail }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `n |Ĵ_n(t)/tⁿ − 1|` and the singular analogue over `n ∈ [20, 60]`,
/// `t ∈ (0, 2]`; the bound is 5.
pub fn hat_asymptotics(table: &HatTable) -> Check {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for n in 20..=60u32 {
        for t in [0.1, 0.5, 1.0, 1.5, 2.0] {
            let tt = c(t, 0.0);
            let tn = Scaled::powi(tt, n as i64);
            for kind in [Kind::Cylindrical, Kind::Spherical] {
                let (Ok((j, _)), Ok((y, _))) = (table.hat_regular(kind, n, tt), table.hat_singular(kind, n, tt)) else {
                    return Check::failed("hat asymptotics", 5.0, format!("evaluation failed at n = {n}, t = {t}"));
                };
                let ty = if kind == Kind::Spherical { tn * t } else { tn };
                let e = (j.ratio(tn) - 1.0).norm().max(((y * ty).value() - 1.0).norm()) * n as f64;
                if e > worst {
                    worst = e;
                    at = format!("{kind:?} n = {n}, t = {t}");
                }
            }
        }
    }
    Check::new("hat asymptotics", worst, 5.0, at)
}

/// `Ĵ Ŷ' − Ĵ' Ŷ` against `−2n/t` (`−1/t` at n = 0) and `−(2n+1)/t²`,
/// relative to the larger of the two products.
pub fn wronskians(table: &HatTable) -> Check {
    let args = [c(0.3, 0.0), c(1.3, 0.4), c(7.0, -2.0), c(40.0, 1.0), c(3.0, 3.0), c(250.0, 0.0)];
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for kind in [Kind::Cylindrical, Kind::Spherical] {
        for n in [0u32, 1, 2, 7, 30, 120, 400] {
            for &t in &args {
                let Ok(p) = table.hat_pair(kind, n, t) else {
                    return Check::failed("wronskians", 1e-10, format!("evaluation failed at n = {n}, t = {t}"));
                };
                let expect = match kind {
                    Kind::Cylindrical if n == 0 => -1.0 / t,
                    Kind::Cylindrical => -2.0 * n as f64 / t,
                    Kind::Spherical => -((2 * n + 1) as f64) / (t * t),
                };
                let expect = Scaled::from_c64(expect);
                let (a, b) = (p.j * p.dy, p.dj * p.y);
                let scale = a.ln_abs().max(b.ln_abs()).max(expect.ln_abs());
                let e = (a.sub(b).sub(expect).ln_abs() - scale).exp();
                if e > worst {
                    worst = e;
                    at = format!("{kind:?} n = {n}, t = {t}");
                }
            }
        }
    }
    Check::new("wronskians", worst, 1e-10, at)
}

/// Series against recurrence on `|z| = 2√(n+1)`, where both are accurate.
pub fn series_recurrence() -> Check {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for kind in [Kind::Cylindrical, Kind::Spherical] {
        for n in [0u32, 1, 2, 4, 9, 15, 30] {
            for arg in [0.0, 0.4, 1.0, -1.0] {
                let z = Complex64::from_polar(2.0 * ((n + 1) as f64).sqrt(), arg);
                let e = series_recurrence_gap(kind, n, z);
                if e > worst {
                    worst = e;
                    at = format!("{kind:?} n = {n}, z = {z}");
                }
            }
        }
    }
    Check::new("series vs recurrence", worst, 1e-10, at)
}

fn anisotropic<const D: usize>() -> CoefficientField<f64, D> {
    CoefficientField::new(
        |x: &Vector<f64, D>| {
            let n2: f64 = x.iter().map(|v| v * v).sum();
            let mut m = [[0.0; D]; D];
            for i in 0..D {
                for j in 0..D {
                    m[i][j] = 0.3 * x[i] * x[j] / (1.0 + n2) + if i == j { 1.0 + 0.1 * x[0] * x[0] } else { 0.0 };
                }
            }
            m
        },
        |x: &Vector<f64, D>| 1.0 + 0.2 * x[0] * x[0] + 0.05 * x[D - 1],
        RadialRegion::punctured_space(),
    )
}

fn gap<const D: usize>(a: &(Matrix<f64, D>, f64), b: &(Matrix<f64, D>, f64)) -> f64 {
    let mut scale: f64 = b.1.abs();
    let mut e: f64 = (a.1 - b.1).abs();
    for i in 0..D {
        for j in 0..D {
            scale = scale.max(b.0[i][j].abs());
            e = e.max((a.0[i][j] - b.0[i][j]).abs());
        }
    }
    e / scale
}

fn composition_defect<const D: usize>() -> Result<f64> {
    let field = anisotropic::<D>();
    let maps: Vec<Arc<dyn SmoothMap<f64, D>>> =
        vec![Arc::new(kelvin_map(1.5)?), Arc::new(kelvin_map(3.0)?), Arc::new(Dilation { factor: 2.0 })];
    let mut worst: f64 = 0.0;
    for f in &maps {
        for g in &maps {
            let gf = compose_maps(f.clone(), g.clone())?;
            let stepwise = field.pushed_forward(f.clone(), RadialRegion::punctured_space());
            let undo = inverse_map(f.clone());
            for y in annulus_samples::<f64, D>(0.6, 5.0).iter().step_by(7) {
                let direct = push_forward(&gf, &field, y)?;
                let two_step = push_forward(g.as_ref(), &stepwise, y)?;
                worst = worst.max(gap(&two_step, &direct));
                let back = push_forward(&undo, &stepwise, y)?;
                worst = worst.max(gap(&back, &field.eval(y)));
            }
        }
    }
    Ok(worst)
}

/// `(G∘F)_* = G_* F_*` and `(F⁻¹)_* F_* = id` for Kelvin maps and a
/// dilation acting on an anisotropic field, d = 2 and 3.
pub fn push_forward_composition() -> Check {
    match (composition_defect::<2>(), composition_defect::<3>()) {
        (Ok(a), Ok(b)) => Check::new("push-forward composition", a.max(b), 1e-9, String::new()),
        (Err(e), _) | (_, Err(e)) => Check::failed("push-forward composition", 1e-9, e.to_string()),
    }
}

fn builder_defect<const D: usize>() -> Result<(f64, String)> {
    let (r2, r3) = (1.0, 3.0);
    let annulus = CoefficientField::<f64, D>::isotropic(|r| 1.0 + 0.1 * r, |r| 2.0 - 0.2 * r, RadialRegion::annulus(r2, r3));
    let dc = build_doubly_complementary(&annulus, r2, r3)?;
    let samples = annulus_samples::<f64, D>(r2, r3);
    let rep = verify_reflecting_complementary(&dc.field, dc.f.as_ref(), r2, &samples);
    let mut worst = rep.max_matrix_deviation.max(rep.max_sigma_deviation).max(rep.max_boundary_deviation);
    if rep.failures > 0 {
        worst = f64::INFINITY;
    }
    // the core pushed through G∘F must reproduce the outer annulus
    let gf = compose_maps(dc.f.clone(), dc.g.clone())?;
    for y in samples.iter().filter(|y| {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        r > r2 * (1.0 + 1e-9) && r < r3 * (1.0 - 1e-9)
    }) {
        let pushed = push_forward(&gf, &dc.field, y)?;
        worst = worst.max(gap(&pushed, &dc.field.eval(y)));
    }
    Ok((worst, format!("{} annulus + {} boundary samples", rep.annulus_samples, rep.boundary_samples)))
}

/// The builder's output is reflecting complementary through `F` and its
/// core maps onto the annulus through `G∘F`.
pub fn builder_complementarity() -> Check {
    match (builder_defect::<2>(), builder_defect::<3>()) {
        (Ok(a), Ok(b)) => Check::new("builder complementarity", a.0.max(b.0), 1e-8, a.1),
        (Err(e), _) | (_, Err(e)) => Check::failed("builder complementarity", 1e-8, e.to_string()),
    }
}

/// `|δ∫a|∇u|² + Im∫∂_r u ū − Im∫f ū|` relative to the sum of magnitudes.
pub fn power_balance() -> Check {
    let run = || -> Result<f64> {
        let mn = RadialLayeredMedium::core_shell(2, 1.0, 2.0)?;
        let m6 = RadialLayeredMedium::doubly_complementary(2, Profile::Constant(1.0), Profile::Constant(1.0), 1.0, 4.0)?;
        let sph = RadialLayeredMedium::core_shell(3, 1.0, 2.0)?;
        let cases = [(&mn, 0.0, 2.5), (&m6, 1.0, 1.5), (&m6, 1.0, 3.0), (&m6, 1.0, 6.0), (&sph, 1.0, 3.0)];
        let mut worst: f64 = 0.0;
        for (m, k, rho) in cases {
            for delta in [1e-2, 1e-4] {
                let src = ShellSource::point_like(rho, m.dimension(), 0.0)?;
                let u = solve_field(m, delta, k, &src)?;
                worst = worst.max(u.power_balance(far_radius(m, rho))?.3);
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(w) => Check::new("power balance", w, 1e-6, String::new()),
        Err(e) => Check::failed("power balance", 1e-6, e.to_string()),
    }
}

/// Spectral modes against the finite-volume oracle at `ρ` and `2·max(outer, ρ)`.
pub fn fd_oracle(deltas: &[f64]) -> Check {
    let run = || -> Result<(f64, String)> {
        let hom = RadialLayeredMedium::homogeneous(2)?;
        let mn = RadialLayeredMedium::core_shell(2, 1.0, 2.0)?;
        let m6 = RadialLayeredMedium::doubly_complementary(2, Profile::Constant(1.0), Profile::Constant(1.0), 1.0, 4.0)?;
        let mut worst: f64 = 0.0;
        let mut at = String::new();
        for (name, m, k, rho) in [("homogeneous", &hom, 1.0, 1.5), ("core-shell", &mn, 0.0, 2.5), ("complementary", &m6, 1.0, 3.0)] {
            for &delta in deltas {
                for n in [0u32, 1, 5, 20] {
                    if k == 0.0 && n == 0 {
                        continue;
                    }
                    let sp = solve_mode(m, delta, k, n, rho)?;
                    let fd = radial_oracle(m, delta, k, n, rho, 200_000)?;
                    for r in [rho, far_radius(m, rho)] {
                        let a = sp.radial(r)?.0;
                        let e = (a - fd.value_at(r)?).norm() / a.norm();
                        if e > worst {
                            worst = e;
                            at = format!("{name} delta = {delta} n = {n} r = {r}");
                        }
                    }
                }
            }
        }
        Ok((worst, at))
    };
    match run() {
        Ok((w, at)) => Check::new("finite-difference oracle", w, 1e-3, at),
        Err(e) => Check::failed("finite-difference oracle", 1e-3, e.to_string()),
    }
}

/// Special functions, transforms and power balance.
pub fn quick_suite(table: &HatTable) -> Vec<Check> {
    vec![
        push_forward_composition(),
        builder_complementarity(),
        wronskians(table),
        series_recurrence(),
        hat_asymptotics(table),
        power_balance(),
    ]
}

/// The quick suite plus the oracle comparison at δ ∈ {1e-1, 1e-2}.
pub fn full_suite(table: &HatTable) -> Vec<Check> {
    let mut out = quick_suite(table);
    out.push(fd_oracle(&[1e-1, 1e-2]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        for c in quick_suite(HatTable::standard()) {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn corrupted_table_fails_the_wronskians() {
        let bad = HatTable::corrupted(7, 1e-6);
        let c = wronskians(&bad);
        assert!(!c.pass);
        assert!(c.detail.contains("n = 7"), "{}", c.detail);
        assert!(series_recurrence().pass);
    }
}
