use num_complex::Complex64;
use rayon::prelude::*;

use super::{effective_for, normalization_from_energy};
use crate::error::{AlrError, Result};
use crate::media::RadialLayeredMedium;
use crate::solver::{far_radius, solve_field, solve_u_hat, FieldSolution, ShellSource};

/// Slope threshold of the blow-up classification.
pub const GAMMA: f64 = 0.25;

/// 13 points, geometric from 1e-1 to 1e-7.
pub fn default_deltas() -> Vec<f64> {
    (0..13).map(|i| 10f64.powf(-1.0 - 0.5 * i as f64)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub power: f64,
    pub c_delta: f64,
    pub shell_energy: f64,
    /// `‖u_δ − û‖/‖û‖` on `∂B_R`; NaN when no reference was solved.
    pub far_trace_err: f64,
    pub h1_norm: f64,
    /// `‖u_δ‖_{L²(∂B_R)}`.
    pub far_trace: f64,
    /// Largest relative power-balance residual at `R`.
    pub balance_residual: f64,
    /// Rows of [`FieldSolution::mode_table`], kept by full sweeps.
    pub mode_table: Vec<(u32, usize, Complex64, Complex64, f64)>,
    pub error: Option<AlrError>,
}

impl SweepRow {
    fn failed(delta: f64, error: AlrError) -> Self {
        SweepRow {
            delta,
            power: f64::NAN,
            c_delta: f64::NAN,
            shell_energy: f64::NAN,
            far_trace_err: f64::NAN,
            h1_norm: f64::NAN,
            far_trace: f64::NAN,
            balance_residual: f64::NAN,
            mode_table: Vec::new(),
            error: Some(error),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    /// `c_δ ‖u_δ‖_{L²(∂B_R)}`.
    pub fn normalized_trace(&self) -> f64 {
        self.c_delta * self.far_trace
    }
}

#[derive(Clone, Debug)]
pub struct DeltaSweepResult {
    pub rows: Vec<SweepRow>,
    pub k: f64,
    pub rho: f64,
    /// Radius of the far-field diagnostics.
    pub radius: f64,
    pub scenario_hash: Option<String>,
    pub reference: Option<FieldSolution>,
}

impl DeltaSweepResult {
    pub fn successful(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.is_ok() && r.power.is_finite() && r.power > 0.0)
    }
}

fn check_grid(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(AlrError::InconsistentInput("empty delta grid".into()));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(AlrError::InconsistentInput("deltas must lie in (0, 1)".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(AlrError::InconsistentInput("deltas must be strictly decreasing".into()));
    }
    Ok(())
}

/// Diagnostics radius `2r₃` with `r₃ = r₂²/r₁`, moved out to `2ρ` for
/// sources beyond it.
pub fn diagnostic_radius(medium: &RadialLayeredMedium, rho: f64) -> f64 {
    match medium.shell() {
        Some((r1, r2)) if rho < 2.0 * r2 * r2 / r1 => 2.0 * r2 * r2 / r1,
        Some(_) => 2.0 * rho,
        None => far_radius(medium, rho),
    }
}

/// Solves `u_δ` for every δ (in parallel) and tabulates power, normalization,
/// far-field error against `û` and the `H¹(B_R)` norm, `R = 2r₃`.
pub fn delta_sweep(
    medium: &RadialLayeredMedium,
    k: f64,
    source: &ShellSource,
    deltas: &[f64],
) -> Result<DeltaSweepResult> {
    sweep(medium, k, source, deltas, true)
}

pub(crate) fn sweep(
    medium: &RadialLayeredMedium,
    k: f64,
    source: &ShellSource,
    deltas: &[f64],
    with_reference: bool,
) -> Result<DeltaSweepResult> {
    check_grid(deltas)?;
    medium.shell().ok_or(AlrError::NoShell)?;
    let radius = diagnostic_radius(medium, source.rho);
    let reference = if with_reference {
        let eff = effective_for(medium, k)?;
        Some(solve_u_hat(&eff, k, source)?)
    } else {
        None
    };
    let ref_norm = match &reference {
        Some(u) => u.trace_norm(radius)?,
        None => f64::NAN,
    };
    let rows = deltas
        .par_iter()
        .map(|&delta| match row(medium, k, source, delta, radius, reference.as_ref(), ref_norm, with_reference) {
            Ok(r) => r,
            Err(e) => SweepRow::failed(delta, e),
        })
        .collect();
    Ok(DeltaSweepResult { rows, k, rho: source.rho, radius, scenario_hash: None, reference })
}

#[allow(clippy::too_many_arguments)]
fn row(
    medium: &RadialLayeredMedium,
    k: f64,
    source: &ShellSource,
    delta: f64,
    radius: f64,
    reference: Option<&FieldSolution>,
    ref_norm: f64,
    full: bool,
) -> Result<SweepRow> {
    let u = solve_field(medium, delta, k, source)?;
    let shell_energy = u.shell_energy(false)?;
    let power = delta * shell_energy;
    let (c_delta, error) = match normalization_from_energy(shell_energy, delta) {
        Ok(c) => (c, None),
        Err(e) => (f64::NAN, Some(e)),
    };
    let far_trace = u.trace_norm(radius)?;
    let far_trace_err = match reference {
        Some(r) if ref_norm > 0.0 => u.trace_distance(r, radius)? / ref_norm,
        _ => f64::NAN,
    };
    let (h1_norm, balance_residual, mode_table) = if full {
        (u.h1_norm(radius)?, u.power_balance(radius)?.3, u.mode_table())
    } else {
        (f64::NAN, f64::NAN, Vec::new())
    };
    Ok(SweepRow {
        delta,
        power,
        c_delta,
        shell_energy,
        far_trace_err,
        h1_norm,
        far_trace,
        balance_residual,
        mode_table,
        error,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    BlowsUp,
    Bounded,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::BlowsUp => "blows_up",
            Verdict::Bounded => "bounded",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupVerdict {
    pub verdict: Verdict,
    /// Slope of `log E` against `log δ` over the smallest decade.
    pub exponent: f64,
    /// Exponent of the fit `E ≈ C δ^p |log δ|^β` near the end of the grid.
    pub asymptotic_exponent: f64,
    pub rows_used: usize,
    pub decades: f64,
    pub note: String,
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn successful_points(sweep: &DeltaSweepResult) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = sweep.successful().map(|r| (r.delta, r.power)).collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    pts
}

/// Exponent `p` of `log E = p log δ + β log|log δ| + c`, fitted by least
/// squares to the rows with `δ ≤ 100 δ_min`. The logarithmic factor absorbs
/// the slowly varying corrections that bias the plain slope near the
/// critical radius. Falls back to the plain slope with fewer than 4 rows.
pub fn asymptotic_exponent(sweep: &DeltaSweepResult) -> Option<f64> {
    let pts = successful_points(sweep);
    let d_min = pts.last()?.0;
    let tail: Vec<(f64, f64)> = pts.into_iter().filter(|p| p.0 <= 100.0 * d_min * (1.0 + 1e-9)).collect();
    if tail.len() < 2 {
        return None;
    }
    if tail.len() < 4 {
        let lp: Vec<(f64, f64)> = tail.iter().map(|p| (p.0.ln(), p.1.ln())).collect();
        return Some(slope(&lp));
    }
    // normal equations in (p, β, c)
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (d, e) in &tail {
        let row = [d.ln(), (-d.ln()).ln(), 1.0];
        for i in 0..3 {
            atb[i] += row[i] * e.ln();
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    solve3(ata, atb).map(|x| x[0])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        a.swap(c, p);
        b.swap(c, p);
        if a[c][c].abs() < 1e-300 {
            return None;
        }
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for j in c..3 {
                a[r][j] -= f * a[c][j];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|j| a[c][j] * x[j]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

/// Slope over the smallest decade of the grid: `p ≤ −γ` blows up,
/// `p ≥ −γ/2` is bounded, anything between is inconclusive.
pub fn classify_blowup(sweep: &DeltaSweepResult) -> BlowupVerdict {
    let pts = successful_points(sweep);
    let inconclusive = |note: String, rows: usize, decades: f64| BlowupVerdict {
        verdict: Verdict::Inconclusive,
        exponent: f64::NAN,
        asymptotic_exponent: f64::NAN,
        rows_used: rows,
        decades,
        note,
    };
    if pts.len() < 5 {
        return inconclusive(format!("{} successful rows, need 5", pts.len()), pts.len(), 0.0);
    }
    let decades = (pts[0].0 / pts[pts.len() - 1].0).log10();
    if decades < 2.0 - 1e-9 {
        return inconclusive(format!("grid spans {decades:.2} decades, need 2"), pts.len(), decades);
    }
    let d_min = pts[pts.len() - 1].0;
    let last: Vec<(f64, f64)> =
        pts.iter().filter(|p| p.0 <= 10.0 * d_min * (1.0 + 1e-9)).map(|p| (p.0.ln(), p.1.ln())).collect();
    if last.len() < 2 {
        return inconclusive("fewer than two rows in the last decade".into(), pts.len(), decades);
    }
    let p = slope(&last);
    let verdict = if p <= -GAMMA {
        Verdict::BlowsUp
    } else if p >= -GAMMA / 2.0 {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    };
    BlowupVerdict {
        verdict,
        exponent: p,
        asymptotic_exponent: asymptotic_exponent(sweep).unwrap_or(f64::NAN),
        rows_used: pts.len(),
        decades,
        note: String::new(),
    }
}

/// One bisection probe.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub rho: f64,
    pub verdict: Verdict,
    pub exponent: f64,
    pub asymptotic_exponent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalRadius {
    pub estimate: f64,
    /// `(blows_up side, bounded side)`.
    pub bracket: (f64, f64),
    pub probes: Vec<Probe>,
}

fn probe(medium: &RadialLayeredMedium, k: f64, source: &ShellSource, rho: f64, deltas: &[f64]) -> Result<Probe> {
    let s = source.at_radius(rho)?;
    let result = sweep(medium, k, &s, deltas, false)?;
    let v = classify_blowup(&result);
    Ok(Probe { rho, verdict: v.verdict, exponent: v.exponent, asymptotic_exponent: v.asymptotic_exponent })
}

/// Bisection in `ρ` down to relative width 1e-2. The ends of the range must
/// carry conclusive, opposite verdicts; interior probes are decided by the
/// sign of the asymptotic exponent, so that the slowly varying power at
/// radii close to the threshold does not stall the search.
pub fn critical_radius_search(
    medium: &RadialLayeredMedium,
    k: f64,
    source: &ShellSource,
    rho_range: (f64, f64),
    deltas: &[f64],
) -> Result<CriticalRadius> {
    let (lo, hi) = rho_range;
    if !(lo > 0.0 && lo < hi) {
        return Err(AlrError::Bracket(format!("invalid range [{lo}, {hi}]")));
    }
    let ends: Vec<Result<Probe>> =
        [lo, hi].par_iter().map(|&rho| probe(medium, k, source, rho, deltas)).collect();
    let mut probes = Vec::new();
    for p in ends {
        probes.push(p?);
    }
    for p in &probes {
        if p.verdict == Verdict::Inconclusive {
            return Err(AlrError::Resolution { rho: p.rho });
        }
    }
    if probes[0].verdict == probes[1].verdict {
        return Err(AlrError::Bracket(format!(
            "both ends {} (rho = {lo}, {hi})",
            probes[0].verdict.as_str()
        )));
    }
    let lo_blows = probes[0].verdict == Verdict::BlowsUp;
    let (mut a, mut b) = (lo, hi);
    while (b - a) / (0.5 * (a + b)) > 1e-2 {
        let mid = 0.5 * (a + b);
        let p = probe(medium, k, source, mid, deltas)?;
        let blows = if p.asymptotic_exponent.is_finite() {
            p.asymptotic_exponent < 0.0
        } else {
            match p.verdict {
                Verdict::BlowsUp => true,
                Verdict::Bounded => false,
                Verdict::Inconclusive => return Err(AlrError::Resolution { rho: mid }),
            }
        };
        if blows == lo_blows {
            a = mid;
        } else {
            b = mid;
        }
        probes.push(p);
    }
    let bracket = if lo_blows { (a, b) } else { (b, a) };
    Ok(CriticalRadius { estimate: 0.5 * (a + b), bracket, probes })
}
