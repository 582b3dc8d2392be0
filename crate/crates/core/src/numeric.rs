//! Reproducible reductions and the log-log line fit used by the scaling analyses.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::error::{bail, Result};
use crate::real::Real;

/// Neumaier-compensated accumulator.
///
/// Reductions in this crate run sequentially through this accumulator in a
/// fixed order, so results never depend on how work was scheduled.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

pub fn compensated_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

pub fn compensated_complex_sum<T: Real>(
    values: impl IntoIterator<Item = Complex<T>>,
) -> Complex<T> {
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for v in values {
        re.add(v.re);
        im.add(v.im);
    }
    Complex::new(re.value(), im.value())
}

/// ⟨a|b⟩ with compensated accumulation.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    compensated_complex_sum(a.iter().zip(b).map(|(x, y)| x.conj() * y))
}

pub fn norm_sqr<T: Real>(a: &[Complex<T>]) -> T {
    compensated_sum(a.iter().map(|x| x.norm_sqr()))
}

/// Symmetric eigendecomposition with eigenvalues sorted in ascending order.
pub fn sorted_eigen<T: Real>(m: DMatrix<T>) -> Result<(Vec<T>, DMatrix<T>)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, T::default_epsilon(), 100_000).ok_or_else(|| {
        crate::Error::Numerical(format!("symmetric eigensolver did not converge (n = {n})"))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Unweighted least-squares line `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square deviation of the points from the fitted line.
    pub rms_residual: T,
}

pub fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if xs.len() != ys.len() {
        bail!(
            Argument,
            "fit_line: {} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        );
    }
    if xs.len() < 2 {
        bail!(
            Argument,
            "fit_line needs at least two points, got {}",
            xs.len()
        );
    }
    let n = T::from_usize(xs.len()).unwrap();
    let mx = compensated_sum(xs.iter().copied()) / n;
    let my = compensated_sum(ys.iter().copied()) / n;
    let sxx = compensated_sum(xs.iter().map(|&x| (x - mx) * (x - mx)));
    if sxx <= T::zero() {
        bail!(Argument, "fit_line: all abscissae coincide");
    }
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = compensated_sum(xs.iter().zip(ys).map(|(&x, &y)| {
        let r = y - (slope * x + intercept);
        r * r
    }));
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
    })
}

/// Fits `ln y = slope·ln x + intercept`. All values must be positive.
pub fn fit_log_log<T: Real>(points: &[(usize, T)]) -> Result<LineFit<T>> {
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(n, y) in points {
        if n == 0 || !(y > T::zero()) || !y.is_finite() {
            bail!(
                Argument,
                "log-log fit needs positive finite points, got ({n}, {y:e})"
            );
        }
        xs.push(T::from_usize(n).unwrap().ln());
        ys.push(y.ln());
    }
    fit_line(&xs, &ys)
}

/// Number of distinct sizes in a `(size, value)` sequence.
pub(crate) fn distinct_sizes<T>(points: &[(usize, T)]) -> usize {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes.len()
}
