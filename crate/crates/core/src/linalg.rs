//! Small dense complex linear systems.
//!
//! The transmission systems assembled per angular mode have at most a few
//! dozen unknowns, so a plain LU with partial pivoting is enough. The
//! factorization is generic over [`Real`] so that near-resonant systems can be
//! re-solved in double-double.

use num_complex::{Complex, Complex64};
use num_traits::Zero;

use crate::dd::Dd;
use crate::scalar::Real;

/// Condition number above which [`solve_adaptive`] switches to double-double.
pub const EXTENDED_PRECISION_THRESHOLD: f64 = 1e12;

/// Row-major dense square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![Complex::new(T::zero(), T::zero()); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|i| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..self.n {
                    acc = acc + self[(i, j)] * x[j];
                }
                acc
            })
            .collect()
    }

    /// Induced 1-norm (max column sum), with `|z|` taken as `|re| + |im|`.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| l1(self[(i, j)]).to_f64()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Option<Lu<T>> {
        Lu::factor(self.clone())
    }
}

impl DenseMatrix<f64> {
    pub fn to_dd(&self) -> DenseMatrix<Dd> {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|z| Complex::new(Dd::from_f64(z.re), Dd::from_f64(z.im))).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

#[inline]
fn l1<T: Real>(z: Complex<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// LU factorization `P A = L U` with unit lower triangle.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// Returns `None` when a pivot is exactly zero.
    pub fn factor(mut a: DenseMatrix<T>) -> Option<Self> {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = l1(a[(k, k)]);
            for i in (k + 1)..n {
                let v = l1(a[(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[(k, k)];
            for i in (k + 1)..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let v = a[(k, j)];
                    a[(i, j)] = a[(i, j)] - f * v;
                }
            }
        }
        Some(Lu { lu: a, perm })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.n;
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let v = x[j];
                x[i] = x[i] - self.lu[(i, j)] * v;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let v = x[j];
                x[i] = x[i] - self.lu[(i, j)] * v;
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> DenseMatrix<T> {
        let n = self.lu.n;
        let mut inv = DenseMatrix::zeros(n);
        let mut e = vec![Complex::new(T::zero(), T::zero()); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex::new(T::zero(), T::zero()));
            e[j] = Complex::new(T::one(), T::zero());
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// Result of [`solve_adaptive`].
#[derive(Clone, Debug)]
pub struct AdaptiveSolution {
    pub x: Vec<Complex64>,
    /// 1-norm condition number of the system matrix.
    pub condition_number: f64,
    /// True when the double-double path was taken.
    pub extended: bool,
}

/// Solves `A x = b`, switching to double-double when the 1-norm condition
/// number exceeds [`EXTENDED_PRECISION_THRESHOLD`]. Returns `None` for an
/// exactly singular matrix.
pub fn solve_adaptive(a: &DenseMatrix<f64>, b: &[Complex64]) -> Option<AdaptiveSolution> {
    let lu = a.lu()?;
    let inv = lu.inverse();
    let cond = a.norm1() * inv.norm1();
    if !cond.is_finite() {
        return None;
    }
    if cond <= EXTENDED_PRECISION_THRESHOLD {
        return Some(AdaptiveSolution { x: lu.solve(b), condition_number: cond, extended: false });
    }
    let add = a.to_dd();
    let lud = add.lu()?;
    let bd: Vec<Complex<Dd>> = b.iter().map(|z| Complex::new(Dd::from_f64(z.re), Dd::from_f64(z.im))).collect();
    let xd = lud.solve(&bd);
    let x = xd.iter().map(|z| Complex64::new(z.re.to_f64(), z.im.to_f64())).collect();
    Some(AdaptiveSolution { x, condition_number: cond, extended: true })
}

/// Relative backward error `|A x - b| / (|A| |x| + |b|)` in the max norm.
pub fn backward_error(a: &DenseMatrix<f64>, x: &[Complex64], b: &[Complex64]) -> f64 {
    let n = a.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut r = -b[i];
        let mut scale = b[i].norm();
        for j in 0..n {
            r += a[(i, j)] * x[j];
            scale += a[(i, j)].norm() * x[j].norm();
        }
        if scale > 0.0 {
            worst = worst.max(r.norm() / scale);
        }
    }
    worst
}
