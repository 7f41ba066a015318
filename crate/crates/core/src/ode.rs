//! Dormand–Prince 5(4) for linear complex systems of size two, with cubic
//! Hermite dense output and overflow rescaling.

use num_complex::Complex64;

use crate::error::{AlrError, Result};

pub type State = [Complex64; 2];

const BIG: f64 = 1e100;
const MAX_STEPS: usize = 200_000;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Accepted steps of an integration. Values at step `i` are stored in units
/// of `exp(ln_scale[i])`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<State>,
    pub dy: Vec<State>,
    pub ln_scale: Vec<f64>,
}

fn axpy(y: &State, h: f64, k: &[State], coef: &[f64]) -> State {
    let mut out = *y;
    for (kj, &c) in k.iter().zip(coef) {
        if c != 0.0 {
            out[0] += h * c * kj[0];
            out[1] += h * c * kj[1];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction) for a
/// linear right-hand side, with relative tolerance `rtol`.
pub fn integrate(f: impl Fn(f64, &State) -> State, t0: f64, t1: f64, y0: State, rtol: f64) -> Result<Trajectory> {
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut fy = f(t, &y);
    let mut ln_scale = 0.0;
    let mut traj = Trajectory { t: vec![t], y: vec![y], dy: vec![fy], ln_scale: vec![0.0] };
    if span == 0.0 {
        return Ok(traj);
    }
    let mut h = span * 1e-3;
    for _ in 0..MAX_STEPS {
        let last = h >= (t1 - t) * dir;
        if last {
            h = (t1 - t) * dir;
        }
        let mut k: [State; 7] = [fy; 7];
        for i in 1..7 {
            let yi = axpy(&y, dir * h, &k[..i], &A[i][..i]);
            k[i] = f(t + dir * C[i] * h, &yi);
        }
        let y_new = axpy(&y, dir * h, &k[..6], &A[6][..6]);
        let ymax = y.iter().chain(y_new.iter()).map(|z| z.norm()).fold(0.0, f64::max);
        let mut err: f64 = 0.0;
        for c in 0..2 {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[c];
            }
            let sc = rtol * y[c].norm().max(y_new[c].norm()) + 1e-3 * rtol * ymax;
            err = err.max((h * e).norm() / sc);
        }
        if !err.is_finite() {
            return Err(AlrError::Integration(format!("non-finite error estimate at t = {t}")));
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + dir * h };
            y = y_new;
            fy = k[6];
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(fy);
            traj.ln_scale.push(ln_scale);
            if last {
                return Ok(traj);
            }
            if ymax > BIG {
                for z in y.iter_mut().chain(fy.iter_mut()) {
                    *z /= BIG;
                }
                ln_scale += BIG.ln();
                // the next interval starts from the rescaled copy
                traj.t.push(t);
                traj.y.push(y);
                traj.dy.push(fy);
                traj.ln_scale.push(ln_scale);
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < span * 1e-14 {
            return Err(AlrError::Integration(format!("step size underflow at t = {t}")));
        }
    }
    Err(AlrError::Integration(format!("more than {MAX_STEPS} steps")))
}

impl Trajectory {
    /// State at `t` by cubic Hermite interpolation, with its log scale.
    pub fn at(&self, t: f64) -> (State, f64) {
        let n = self.t.len();
        let ascending = self.t[n - 1] >= self.t[0];
        // index of the last node not past t in the direction of travel
        let pos = if ascending {
            self.t.partition_point(|&s| s <= t)
        } else {
            self.t.partition_point(|&s| s >= t)
        };
        let i = pos.saturating_sub(1).min(n.saturating_sub(2));
        if n == 1 {
            return (self.y[0], self.ln_scale[0]);
        }
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        if h == 0.0 {
            return (self.y[i + 1], self.ln_scale[i + 1]);
        }
        let x = (t - t0) / h;
        let h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
        let h10 = x * (1.0 - x) * (1.0 - x);
        let h01 = x * x * (3.0 - 2.0 * x);
        let h11 = x * x * (x - 1.0);
        let rel = (self.ln_scale[i + 1] - self.ln_scale[i]).exp();
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for (c, o) in out.iter_mut().enumerate() {
            *o = h00 * self.y[i][c]
                + h10 * h * self.dy[i][c]
                + rel * (h01 * self.y[i + 1][c] + h11 * h * self.dy[i + 1][c]);
        }
        (out, self.ln_scale[i])
    }

    pub fn last(&self) -> (State, f64) {
        let n = self.t.len() - 1;
        (self.y[n], self.ln_scale[n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn harmonic_oscillator() {
        // y0' = y1, y1' = -w² y0 with complex w
        let w = c(3.0, 0.2);
        let traj = integrate(|_, y| [y[1], -w * w * y[0]], 0.0, 2.0, [c(1.0, 0.0), c(0.0, 0.0)], 1e-10).unwrap();
        let (y, s) = traj.last();
        let exact = (w * 2.0).cos();
        assert!((y[0] * s.exp() - exact).norm() < 1e-8 * exact.norm().max(1.0));
        // dense output in the interior
        let (ym, sm) = traj.at(0.77);
        assert!((ym[0] * sm.exp() - (w * 0.77).cos()).norm() < 1e-7);
    }

    #[test]
    fn backward_and_rescaled() {
        // y' = -300 y integrated backwards grows like e^{300}, past several rescales
        let traj = integrate(|_, y| [-300.0 * y[0], -300.0 * y[1]], 1.0, 0.0, [c(1.0, 0.0), c(0.0, 1.0)], 1e-10).unwrap();
        let (y, s) = traj.last();
        assert!(((y[0].ln() + s) - c(300.0, 0.0)).norm() < 1e-8);
        let (ym, sm) = traj.at(0.5);
        assert!(((ym[1].ln() + sm) - c(150.0, std::f64::consts::FRAC_PI_2)).norm() < 1e-7);
    }
}
