//! The five subcommands. Each writes its files under `out` and a short
//! human-readable report to `log`.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use alr_core::analysis::{
    classify_blowup, critical_radius_search, delta_sweep, effective_for, predict_blowup, DeltaSweepResult,
};
use alr_core::checks::{full_suite, quick_suite, Check};
use alr_core::error::AlrError;
use alr_core::media::RadialLayeredMedium;
use alr_core::solver::{solve_u_hat, FieldSolution};
use alr_core::special::HatTable;
use alr_core::transforms::{
    annulus_samples, build_doubly_complementary, compose_maps, push_forward, verify_reflecting_complementary,
    CoefficientField, RadialRegion,
};
use serde_json::{json, Value};

use crate::output::{num, write_atomic, write_json, Csv};
use crate::scenario::{AnnulusMedium, Scenario};
use crate::CliError;

macro_rules! say {
    ($log:expr, $($arg:tt)*) => {
        let _ = writeln!($log, $($arg)*);
    };
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn sweep_csv(result: &DeltaSweepResult) -> String {
    let mut csv = Csv::new(&["delta", "E", "c_delta", "shell_energy", "far_trace_err", "h1_norm"]);
    for r in &result.rows {
        csv.row(&[num(r.delta), num(r.power), num(r.c_delta), num(r.shell_energy), num(r.far_trace_err), num(r.h1_norm)]);
    }
    csv.into_string()
}

fn modes_csv(table: &[(u32, usize, num_complex::Complex64, num_complex::Complex64, f64)]) -> String {
    let mut csv = Csv::new(&["n", "layer", "alpha_re", "alpha_im", "beta_re", "beta_im", "cond"]);
    for (n, layer, a, b, cond) in table {
        csv.row(&[n.to_string(), layer.to_string(), num(a.re), num(a.im), num(b.re), num(b.im), num(*cond)]);
    }
    csv.into_string()
}

fn run_sweep(scenario: &Scenario, deltas: &[f64]) -> Result<(RadialLayeredMedium, DeltaSweepResult), CliError> {
    let medium = scenario.medium()?;
    let source = scenario.source()?;
    let mut result = delta_sweep(&medium, scenario.k, &source, deltas)?;
    result.scenario_hash = Some(scenario.hash());
    Ok((medium, result))
}

/// `sweep.csv`, `verdict.json` and one `modes_<delta>.csv` per solved δ.
pub fn sweep(scenario: &Scenario, out: &Path, log: &mut dyn Write) -> Result<(), CliError> {
    let (_, result) = run_sweep(scenario, &scenario.deltas())?;
    write_atomic(&out.join("sweep.csv"), &sweep_csv(&result))?;
    for r in result.rows.iter().filter(|r| r.is_ok()) {
        write_atomic(&out.join(format!("modes_{:e}.csv", r.delta)), &modes_csv(&r.mode_table))?;
    }
    let v = classify_blowup(&result);
    let (r2, r3) = scenario.geometry.annulus();
    let prediction = match predict_blowup(scenario.source.rho, r2, r3) {
        Ok(alr_core::analysis::Prediction::BlowsUp) => json!("blows_up"),
        Ok(alr_core::analysis::Prediction::Bounded) => json!("bounded"),
        Err(_) => Value::Null,
    };
    let failed: Vec<Value> = result
        .rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| json!({"delta": r.delta, "error": e.to_string()})))
        .collect();
    let record = json!({
        "verdict": v.verdict.as_str(),
        "exponent": finite_or_null(v.exponent),
        "asymptotic_exponent": finite_or_null(v.asymptotic_exponent),
        "rows_used": v.rows_used,
        "decades": finite_or_null(v.decades),
        "note": v.note,
        "rho": scenario.source.rho,
        "critical_radius": (r2 * r3).sqrt(),
        "prediction": prediction,
        "failed_rows": failed,
        "scenario_hash": result.scenario_hash,
    });
    write_json(&out.join("verdict.json"), &record)?;
    say!(log, "verdict: {} (slope {:.3}, {} rows over {:.1} decades)", v.verdict.as_str(), v.exponent, v.rows_used, v.decades);
    for f in &failed {
        say!(log, "row failed: {f}");
    }
    Ok(())
}

/// Bisects the scenario's `rho_range`; writes `critical.json`.
pub fn critical_radius(scenario: &Scenario, out: &Path, log: &mut dyn Write) -> Result<(), CliError> {
    let Some([lo, hi]) = scenario.rho_range else {
        return Err(CliError::Config("rho_range: required by critical-radius".into()));
    };
    let medium = scenario.medium()?;
    let source = scenario.source()?;
    let c = critical_radius_search(&medium, scenario.k, &source, (lo, hi), &scenario.deltas())?;
    let (r2, r3) = scenario.geometry.annulus();
    let probes: Vec<Value> = c
        .probes
        .iter()
        .map(|p| {
            json!({
                "rho": p.rho,
                "verdict": p.verdict.as_str(),
                "exponent": finite_or_null(p.exponent),
                "asymptotic_exponent": finite_or_null(p.asymptotic_exponent),
            })
        })
        .collect();
    let record = json!({
        "estimate": c.estimate,
        "bracket": {"blows_up": c.bracket.0, "bounded": c.bracket.1},
        "predicted": (r2 * r3).sqrt(),
        "probes": probes,
        "scenario_hash": scenario.hash(),
    });
    write_json(&out.join("critical.json"), &record)?;
    say!(log, "critical radius: {:.6} (bracket {:.6} .. {:.6}, {} probes)", c.estimate, c.bracket.0, c.bracket.1, c.probes.len());
    Ok(())
}

/// Samples of `û` on `∂B_R`: the circle in d = 2, the meridian `φ = 0` in d = 3.
fn trace_csv(field: &FieldSolution, radius: f64) -> Result<String, CliError> {
    let mut csv = Csv::new(&["angle", "re", "im"]);
    let m = 256;
    if field.dimension() == 2 {
        let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
        let pts: Vec<[f64; 2]> = angles.iter().map(|t| [radius * t.cos(), radius * t.sin()]).collect();
        for (t, e) in angles.iter().zip(field.evaluate(&pts)?) {
            csv.row(&[num(*t), num(e.value.re), num(e.value.im)]);
        }
    } else {
        let angles: Vec<f64> = (0..=m).map(|i| PI * i as f64 / m as f64).collect();
        let pts: Vec<[f64; 3]> = angles.iter().map(|t| [radius * t.sin(), 0.0, radius * t.cos()]).collect();
        for (t, e) in angles.iter().zip(field.evaluate(&pts)?) {
            csv.row(&[num(*t), num(e.value.re), num(e.value.im)]);
        }
    }
    Ok(csv.into_string())
}

/// `converge.csv` against the effective-medium limit and its trace
/// `u_hat_trace.csv`; without a δ-grid only the latter.
pub fn converge(scenario: &Scenario, out: &Path, log: &mut dyn Write) -> Result<(), CliError> {
    let medium = scenario.medium()?;
    let radius = alr_core::analysis::diagnostic_radius(&medium, scenario.source.rho);
    let Some(deltas) = &scenario.deltas else {
        let source = scenario.source()?;
        let u_hat = solve_u_hat(&effective_for(&medium, scenario.k)?, scenario.k, &source)?;
        write_atomic(&out.join("u_hat_trace.csv"), &trace_csv(&u_hat, radius)?)?;
        say!(log, "u_hat trace at R = {radius}: norm {:.6e}", u_hat.trace_norm(radius)?);
        return Ok(());
    };
    let (_, result) = run_sweep(scenario, deltas)?;
    let mut csv = Csv::new(&["delta", "far_trace_err", "normalized_trace"]);
    for r in &result.rows {
        csv.row(&[num(r.delta), num(r.far_trace_err), num(r.normalized_trace())]);
    }
    write_atomic(&out.join("converge.csv"), &csv.into_string())?;
    let reference = result
        .reference
        .as_ref()
        .ok_or_else(|| CliError::Solver("effective-medium solution unavailable".into()))?;
    write_atomic(&out.join("u_hat_trace.csv"), &trace_csv(reference, result.radius)?)?;
    if let Some(last) = result.rows.iter().rev().find(|r| r.is_ok()) {
        say!(
            log,
            "delta = {:e}: far trace error {:.3e}, normalized trace {:.3e}",
            last.delta,
            last.far_trace_err,
            last.normalized_trace()
        );
    }
    Ok(())
}

const CLOAK_TOLERANCE: f64 = 1e-8;

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn cloak_report<const D: usize>(
    spec: &AnnulusMedium,
    medium: &RadialLayeredMedium,
    radii: &[f64],
    r2: f64,
    r3: f64,
) -> Result<Value, AlrError> {
    let (a, sigma) = (spec.a.profile(), spec.sigma.profile());
    let annulus = CoefficientField::<f64, D>::isotropic(move |r| a.eval(r), move |r| sigma.eval(r), RadialRegion::annulus(r2, r3));
    let dc = build_doubly_complementary(&annulus, r2, r3)?;
    let samples = annulus_samples::<f64, D>(r2, r3);
    let rep = verify_reflecting_complementary(&dc.field, dc.f.as_ref(), r2, &samples);

    // the core pushed through G∘F reproduces the annulus
    let gf = compose_maps(dc.f.clone(), dc.g.clone())?;
    let mut core: f64 = 0.0;
    for y in &samples {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > r2 * (1.0 + 1e-9) && r < r3 * (1.0 - 1e-9) {
            let (ma, s) = push_forward(&gf, &dc.field, y)?;
            let (ea, es) = dc.field.eval(y);
            core = core.max(relative_gap(s, es));
            for i in 0..D {
                for j in 0..D {
                    core = core.max((ma[i][j] - ea[i][j]).abs() / ea[i][i].abs());
                }
            }
        }
    }

    // the tabulated layers agree with the constructed field along an axis
    let mut table: f64 = 0.0;
    for &r in radii {
        let mut x = [0.0; D];
        x[0] = r;
        let (ma, s) = dc.field.eval(&x);
        table = table.max(relative_gap(medium.a_at(r), ma[0][0])).max(relative_gap(medium.sigma_at(r), s));
    }

    let pass = rep.pass && core <= CLOAK_TOLERANCE && table <= CLOAK_TOLERANCE;
    Ok(json!({
        "pass": pass,
        "tolerance": CLOAK_TOLERANCE,
        "r0": dc.r0,
        "r1": dc.r1,
        "r2": dc.r2,
        "r3": dc.r3,
        "max_matrix_deviation": rep.max_matrix_deviation,
        "max_sigma_deviation": rep.max_sigma_deviation,
        "max_boundary_deviation": rep.max_boundary_deviation,
        "core_deviation": core,
        "profile_table_deviation": table,
        "witness": rep.witness,
        "annulus_samples": rep.annulus_samples,
        "boundary_samples": rep.boundary_samples,
        "failures": rep.failures,
    }))
}

/// Four-layer profile table `cloak_profiles.csv` and the verification
/// report `verify.json`.
pub fn design_cloak(spec: &AnnulusMedium, r2: f64, r3: f64, out: &Path, log: &mut dyn Write) -> Result<(), CliError> {
    if !(r2 > 0.0 && r2 < r3 && r3.is_finite()) {
        return Err(CliError::Config(format!("--r2/--r3: need 0 < r2 < r3, got {r2}, {r3}")));
    }
    let d = spec.dimension;
    let medium = RadialLayeredMedium::doubly_complementary(d, spec.a.profile(), spec.sigma.profile(), r2, r3)?;
    let r1 = r2 * r2 / r3;
    let r0 = r1 * r1 / r2;
    let edges = [0.0, r0, r1, r2, r3, 1.25 * r3];
    let mut radii = Vec::new();
    for w in edges.windows(2) {
        radii.extend((0..64).map(|j| w[0] + (w[1] - w[0]) * j as f64 / 64.0));
    }
    radii.push(edges[5]);
    let mut csv = Csv::new(&["r", "sign", "a", "sigma"]);
    for s in medium.sample_radial_profiles(&radii) {
        csv.row(&[num(s.r), num(s.sign), num(s.a), num(s.sigma)]);
    }
    write_atomic(&out.join("cloak_profiles.csv"), &csv.into_string())?;
    let report = match d {
        2 => cloak_report::<2>(spec, &medium, &radii, r2, r3),
        _ => cloak_report::<3>(spec, &medium, &radii, r2, r3),
    }?;
    write_json(&out.join("verify.json"), &report)?;
    say!(log, "layers: r0 = {r0}, r1 = {r1}, r2 = {r2}, r3 = {r3}");
    if report["pass"] != json!(true) {
        return Err(CliError::Verification(format!("reflecting complementarity: {report}")));
    }
    say!(log, "verification passed");
    Ok(())
}

/// Fault injected into the self-test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    HatTable,
}

/// Runs the invariant suites; the first failing one names the error.
pub fn selftest(full: bool, fault: Option<Fault>, log: &mut dyn Write) -> Result<Vec<Check>, CliError> {
    let corrupted;
    let table = match fault {
        Some(Fault::HatTable) => {
            corrupted = HatTable::corrupted(7, 1e-6);
            &corrupted
        }
        None => HatTable::standard(),
    };
    let checks = if full { full_suite(table) } else { quick_suite(table) };
    for c in &checks {
        say!(
            log,
            "{} {:<26} worst {:.3e} (tolerance {:.0e}) {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance,
            c.detail
        );
    }
    if let Some(bad) = checks.iter().find(|c| !c.pass) {
        return Err(CliError::Verification(format!("{}: worst {:e} exceeds {:e} at {}", bad.name, bad.worst, bad.tolerance, bad.detail)));
    }
    Ok(checks)
}
