//! Anomalous-fluctuation analysis.
//!
//! The largest fluctuation ⟨δÂ²⟩ over additive operators
//! Â = Σ_{x,α} c_{xα} σ^α(x) with Σc² = N equals N·λ_max of the 3N×3N
//! symmetrized covariance matrix of the single-site Pauli operators. Fitting
//! ln⟨δÂ²⟩_max against ln N separates normally fluctuating states (exponent
//! near 1) from anomalously fluctuating ones (exponent near 2).

use std::fmt;

use nalgebra::{DMatrix, Matrix3};
use rayon::prelude::*;

use crate::error::{bail, Result};
use crate::numeric::{self, distinct_sizes, fit_log_log, sorted_eigen};
use crate::qcore::{
    additive_variance, pauli_images, pauli_means, AdditiveOperator, LatticeSpec, StateVector,
};
use crate::real::Real;

/// Fitted exponents at or above this are anomalous.
pub const AFS_MIN_EXPONENT: f64 = 1.75;
/// Fitted exponents at or below this are normal.
pub const NFS_MAX_EXPONENT: f64 = 1.25;
/// Normalization used for the maximizing coefficients, recorded in reports.
pub const COEFFICIENT_NORMALIZATION: &str = "sum of squared Pauli coefficients equals N";

/// C[(x,α),(y,β)] = ½⟨{δσ^α(x), δσ^β(y)}⟩, row/column index 3x + α.
#[derive(Clone, Debug)]
pub struct CovarianceMatrix<T: Real> {
    lattice: LatticeSpec,
    means: Vec<T>,
    entries: DMatrix<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    /// ⟨σ^α(x)⟩ at index 3x + α.
    pub fn means(&self) -> &[T] {
        &self.means
    }

    /// Bloch vector of site `x`.
    pub fn bloch(&self, x: usize) -> [T; 3] {
        [
            self.means[3 * x],
            self.means[3 * x + 1],
            self.means[3 * x + 2],
        ]
    }

    /// The 3×3 block between sites `x` (rows) and `y` (columns).
    pub fn block(&self, x: usize, y: usize) -> Matrix3<T> {
        Matrix3::from_fn(|a, b| self.entries[(3 * x + a, 3 * y + b)])
    }

    /// Row-major plain text, one matrix row per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in 0..self.entries.nrows() {
            let row: Vec<String> = (0..self.entries.ncols())
                .map(|c| format!("{:.16e}", self.entries[(r, c)].as_f64()))
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

pub fn covariance_matrix<T: Real>(state: &StateVector<T>) -> Result<CovarianceMatrix<T>> {
    state.check_normalized()?;
    let images = pauli_images(state);
    let means = pauli_means(state, &images);
    let dim = images.len();
    // Re⟨Aψ|Bψ⟩ = ½⟨{A,B}⟩ for Hermitian A, B.
    let rows: Vec<Vec<T>> = (0..dim)
        .into_par_iter()
        .map(|i| {
            (i..dim)
                .map(|j| numeric::inner(&images[i], &images[j]).re - means[i] * means[j])
                .collect()
        })
        .collect();
    let mut entries = DMatrix::zeros(dim, dim);
    for (i, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            entries[(i, i + k)] = v;
            entries[(i + k, i)] = v;
        }
    }
    Ok(CovarianceMatrix {
        lattice: *state.lattice(),
        means,
        entries,
    })
}

#[derive(Clone, Debug)]
pub struct FluctuationReport<T: Real> {
    pub lattice: LatticeSpec,
    /// max ⟨δÂ²⟩ = N·λ_max.
    pub max_variance: T,
    pub lambda_max: T,
    /// Pauli coefficients of the maximizing operator at index 3x + α, Σc² = N.
    pub optimal_coefficients: Vec<T>,
}

impl<T: Real> FluctuationReport<T> {
    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    /// The maximizing additive operator.
    pub fn operator(&self) -> AdditiveOperator<T> {
        AdditiveOperator::from_coefficients(self.lattice, &self.optimal_coefficients)
            .expect("coefficient count matches lattice")
    }
}

pub fn max_additive_fluctuation<T: Real>(state: &StateVector<T>) -> Result<FluctuationReport<T>> {
    let cov = covariance_matrix(state)?;
    fluctuation_from_covariance(state, &cov)
}

pub fn fluctuation_from_covariance<T: Real>(
    state: &StateVector<T>,
    cov: &CovarianceMatrix<T>,
) -> Result<FluctuationReport<T>> {
    let n = state.n_sites();
    let (values, vectors) = sorted_eigen(cov.entries.clone())?;
    let top = values.len() - 1;
    let lambda_max = values[top];
    let mut v: Vec<T> = vectors.column(top).iter().copied().collect();
    // Fix the overall sign: largest-magnitude component positive.
    let lead = v.iter().enumerate().fold(
        0,
        |best, (k, c)| if c.abs() > v[best].abs() { k } else { best },
    );
    if v[lead] < T::zero() {
        v.iter_mut().for_each(|c| *c = -*c);
    }
    let scale = T::from_usize(n).unwrap().sqrt();
    let optimal_coefficients: Vec<T> = v.iter().map(|&c| c * scale).collect();
    let max_variance = lambda_max * T::from_usize(n).unwrap();
    let report = FluctuationReport {
        lattice: *state.lattice(),
        max_variance,
        lambda_max,
        optimal_coefficients,
    };
    let check = additive_variance(&report.operator(), state)?;
    let tol = T::tol(1e-8) * max_variance.abs().max(T::one());
    if (check - max_variance).abs() > tol {
        bail!(
            Consistency,
            "maximizing operator has variance {check:e}, eigenvalue route gave {max_variance:e}"
        );
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FluctuationClass {
    /// Anomalously fluctuating: ⟨δÂ²⟩ ∝ N².
    Afs,
    /// Normally fluctuating: ⟨δÂ²⟩ ∝ N.
    Nfs,
    Intermediate,
}

impl fmt::Display for FluctuationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FluctuationClass::Afs => "AFS",
            FluctuationClass::Nfs => "NFS",
            FluctuationClass::Intermediate => "intermediate",
        })
    }
}

impl FluctuationClass {
    pub fn from_exponent(exponent: f64) -> Self {
        if exponent >= AFS_MIN_EXPONENT {
            FluctuationClass::Afs
        } else if exponent <= NFS_MAX_EXPONENT {
            FluctuationClass::Nfs
        } else {
            FluctuationClass::Intermediate
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScalingVerdict<T> {
    /// Slope of ln max_variance against ln N; NaN when a variance was zero.
    pub exponent: T,
    pub intercept: T,
    /// RMS deviation of the log-log points from the fit.
    pub residual: T,
    pub verdict: FluctuationClass,
}

/// Fits the size scaling of `(N, max_variance)` points.
pub fn classify_scaling<T: Real>(points: &[(usize, T)]) -> Result<ScalingVerdict<T>> {
    if distinct_sizes(points) < 3 {
        bail!(
            Argument,
            "scaling classification needs at least 3 distinct sizes"
        );
    }
    if points.iter().any(|&(_, v)| !v.is_finite() || v < T::zero()) {
        bail!(Argument, "max variances must be finite and non-negative");
    }
    if points.iter().any(|&(_, v)| v == T::zero()) {
        return Ok(ScalingVerdict {
            exponent: T::nan(),
            intercept: T::nan(),
            residual: T::zero(),
            verdict: FluctuationClass::Nfs,
        });
    }
    let fit = fit_log_log(points)?;
    Ok(ScalingVerdict {
        exponent: fit.slope,
        intercept: fit.intercept,
        residual: fit.rms_residual,
        verdict: FluctuationClass::from_exponent(fit.slope.as_f64()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{make_dicke, make_ghz, make_uniform_product_state, Axis};
    use std::f64::consts::FRAC_PI_2;

    fn open(n: usize) -> LatticeSpec {
        LatticeSpec::open(n).unwrap()
    }

    #[test]
    fn ghz_covariance_zz_block_is_all_ones() {
        let cov = covariance_matrix(&make_ghz::<f64>(open(4)).unwrap()).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert!((cov.block(x, y)[(2, 2)] - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn all_up_covariance_blocks() {
        let up = StateVector::<f64>::basis(open(3), 0).unwrap();
        let cov = covariance_matrix(&up).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let b = cov.block(x, y);
                let d = if x == y { 1.0 } else { 0.0 };
                assert!((b[(0, 0)] - d).abs() < 1e-15);
                assert!((b[(1, 1)] - d).abs() < 1e-15);
                assert!(b[(2, 2)].abs() < 1e-15);
            }
        }
    }

    #[test]
    fn diagonal_is_one_minus_mean_squared() {
        let s = make_uniform_product_state::<f64>(open(3), 0.7, 0.3).unwrap();
        let cov = covariance_matrix(&s).unwrap();
        for k in 0..9 {
            let m = cov.means()[k];
            assert!((cov.entries()[(k, k)] - (1.0 - m * m)).abs() < 1e-14);
        }
    }

    #[test]
    fn max_fluctuation_examples() {
        let r = max_additive_fluctuation(&make_ghz::<f64>(open(4)).unwrap()).unwrap();
        assert!((r.max_variance - 16.0).abs() < 1e-10);
        let norm: f64 = r.optimal_coefficients.iter().map(|c| c * c).sum();
        assert!((norm - 4.0).abs() < 1e-12);

        let up = StateVector::<f64>::basis(open(6), 0).unwrap();
        let r = max_additive_fluctuation(&up).unwrap();
        assert!((r.max_variance - 6.0).abs() < 1e-10);
    }

    #[test]
    fn max_fluctuation_dominates_uniform_operators() {
        let s = make_dicke::<f64>(open(5), 2).unwrap();
        let r = max_additive_fluctuation(&s).unwrap();
        for axis in Axis::ALL {
            let v = additive_variance(&AdditiveOperator::uniform(open(5), axis), &s).unwrap();
            assert!(r.max_variance >= v - 1e-10);
        }
    }

    #[test]
    fn scaling_examples() {
        let v = classify_scaling(&[(4, 16.0), (6, 36.0), (8, 64.0), (10, 100.0)]).unwrap();
        assert!((v.exponent - 2.0f64).abs() < 1e-9);
        assert_eq!(v.verdict, FluctuationClass::Afs);
        let v = classify_scaling(&[(4, 4.0), (6, 6.0), (8, 8.0), (10, 10.0)]).unwrap();
        assert!((v.exponent - 1.0f64).abs() < 1e-9);
        assert_eq!(v.verdict, FluctuationClass::Nfs);
        let v = classify_scaling(&[(4, 8.0), (8, 16.0), (16, 32.0)]).unwrap();
        assert!((v.exponent - 1.0f64).abs() < 1e-12);
        assert_eq!(v.verdict, FluctuationClass::Nfs);
    }

    #[test]
    fn scaling_edge_cases() {
        assert!(classify_scaling(&[(4, 1.0), (6, 2.0)]).is_err());
        assert!(classify_scaling(&[(4, 1.0), (4, 2.0), (6, 3.0)]).is_err());
        let v = classify_scaling::<f64>(&[(4, 0.0), (6, 2.0), (8, 3.0)]).unwrap();
        assert!(v.exponent.is_nan());
        assert_eq!(v.residual, 0.0);
        assert_eq!(v.verdict, FluctuationClass::Nfs);
        assert_eq!(
            FluctuationClass::from_exponent(1.5),
            FluctuationClass::Intermediate
        );
        assert_eq!(FluctuationClass::from_exponent(1.75), FluctuationClass::Afs);
        assert_eq!(FluctuationClass::from_exponent(1.25), FluctuationClass::Nfs);
    }

    #[test]
    fn plus_product_has_unit_lambda() {
        let s = make_uniform_product_state::<f64>(open(5), FRAC_PI_2, 0.0).unwrap();
        let r = max_additive_fluctuation(&s).unwrap();
        assert!((r.lambda_max - 1.0).abs() < 1e-12);
    }
}
