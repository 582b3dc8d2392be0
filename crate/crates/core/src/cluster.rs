//! Finite-volume cluster property.
//!
//! ρ(x,y) is the supremum, over single-site Hermitian operators â(x) and
//! b̂(y), of |⟨δâ δb̂⟩| / √(⟨δâ²⟩⟨δb̂²⟩). Over the Pauli basis this is the
//! largest singular value of the whitened cross-covariance block
//! C_xx^{-1/2} C_xy C_yy^{-1/2}. Ω(ε,x) counts the sites y ≠ x with
//! ρ(x,y) > ε and Ω(ε) is its maximum over x.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use num_complex::Complex;

use crate::analyzer::{covariance_matrix, CovarianceMatrix};
use crate::error::{bail, Result};
use crate::numeric;
use crate::qcore::{expectation, LatticeSpec, LocalOperator, Observable, StateVector};
use crate::real::Real;

/// Eigenvalues of a site covariance block below this are treated as deterministic directions.
pub const VARIANCE_FLOOR: f64 = 1e-10;

/// Human-readable form of the finite-size rule used by [`cluster_verdict`].
pub const CLUSTER_RULE: &str =
    "omega equal at the two largest sizes and omega <= N/2 at the largest size";

/// ⟨âb̂⟩ − ⟨â⟩⟨b̂⟩ for operators on distinct sites.
pub fn connected_correlator<T: Real>(
    state: &StateVector<T>,
    a: &LocalOperator<T>,
    b: &LocalOperator<T>,
) -> Result<Complex<T>> {
    if a.site() == b.site() {
        bail!(
            Argument,
            "connected correlator needs distinct sites (both at {})",
            a.site()
        );
    }
    let mean_a = expectation(a, state)?;
    let mean_b = expectation(b, state)?;
    let b_psi = StateVector::from_raw(*state.lattice(), b.apply(state)?);
    let ab_psi = a.apply(&b_psi)?;
    let ab = numeric::inner(state.amplitudes(), &ab_psi);
    Ok(ab - Complex::new(mean_a * mean_b, T::zero()))
}

/// Pseudo-inverse square root of a site block, or `None` if the whole block is below the floor.
fn whitener<T: Real>(block: Matrix3<T>) -> Option<Matrix3<T>> {
    let floor = T::tol(VARIANCE_FLOOR);
    let eig = SymmetricEigen::new(block);
    let mut w = Matrix3::zeros();
    let mut kept = false;
    for k in 0..3 {
        let lambda = eig.eigenvalues[k];
        if lambda >= floor {
            let v = eig.eigenvectors.column(k);
            w += v * v.transpose() / lambda.sqrt();
            kept = true;
        }
    }
    kept.then_some(w)
}

fn block_correlation<T: Real>(cov: &CovarianceMatrix<T>, x: usize, y: usize) -> T {
    let (Some(wx), Some(wy)) = (whitener(cov.block(x, x)), whitener(cov.block(y, y))) else {
        return T::zero();
    };
    let whitened = wx * cov.block(x, y) * wy;
    whitened
        .singular_values()
        .iter()
        .fold(T::zero(), |m, &s| if s > m { s } else { m })
}

/// ρ(x,y) ∈ [0, 1], symmetric, with ρ(x,x) = 1 by convention.
#[derive(Clone, Debug)]
pub struct CorrelationField<T: Real> {
    lattice: LatticeSpec,
    rho: DMatrix<T>,
}

impl<T: Real> CorrelationField<T> {
    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn rho(&self, x: usize, y: usize) -> T {
        self.rho[(x, y)]
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.rho
    }

    /// Row `x`, column `y`, comma separated.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for x in 0..self.rho.nrows() {
            let row: Vec<String> = (0..self.rho.ncols())
                .map(|y| format!("{:.16e}", self.rho[(x, y)].as_f64()))
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn correlation_field<T: Real>(state: &StateVector<T>) -> Result<CorrelationField<T>> {
    Ok(correlation_field_from_covariance(&covariance_matrix(
        state,
    )?))
}

pub fn correlation_field_from_covariance<T: Real>(
    cov: &CovarianceMatrix<T>,
) -> CorrelationField<T> {
    let n = cov.lattice().n_sites();
    let mut rho = DMatrix::identity(n, n);
    for x in 0..n {
        for y in x + 1..n {
            let r = block_correlation(cov, x, y);
            rho[(x, y)] = r;
            rho[(y, x)] = r;
        }
    }
    CorrelationField {
        lattice: *cov.lattice(),
        rho,
    }
}

pub fn normalized_correlation<T: Real>(state: &StateVector<T>, x: usize, y: usize) -> Result<T> {
    state.lattice().check_site(x)?;
    state.lattice().check_site(y)?;
    if x == y {
        bail!(
            Argument,
            "normalized correlation needs distinct sites (both at {x})"
        );
    }
    Ok(block_correlation(&covariance_matrix(state)?, x, y))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterReport<T> {
    pub n_sites: usize,
    pub epsilon: T,
    /// |Ω(ε,x)| per site.
    pub omega_of_x: Vec<usize>,
    /// Ω(ε) = max_x |Ω(ε,x)|.
    pub omega: usize,
}

fn check_epsilon<T: Real>(epsilon: T) -> Result<()> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        bail!(Argument, "epsilon must lie in (0, 1), got {epsilon:e}");
    }
    Ok(())
}

pub fn omega<T: Real>(state: &StateVector<T>, epsilon: T) -> Result<ClusterReport<T>> {
    check_epsilon(epsilon)?;
    omega_from_field(&correlation_field(state)?, epsilon)
}

pub fn omega_from_field<T: Real>(
    field: &CorrelationField<T>,
    epsilon: T,
) -> Result<ClusterReport<T>> {
    check_epsilon(epsilon)?;
    let n = field.lattice.n_sites();
    let omega_of_x: Vec<usize> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| y != x && field.rho(x, y) > epsilon)
                .count()
        })
        .collect();
    let omega = omega_of_x.iter().copied().max().unwrap_or(0);
    Ok(ClusterReport {
        n_sites: n,
        epsilon,
        omega_of_x,
        omega,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterVerdict {
    pub has_cluster_property: bool,
    /// `(N, Ω(ε))` sorted by N.
    pub sequence: Vec<(usize, usize)>,
    pub rule: &'static str,
}

/// Ω(ε) is deemed size independent when it is unchanged between the two
/// largest sizes and does not exceed half of the largest lattice.
pub fn cluster_verdict(sequence: &[(usize, usize)]) -> Result<ClusterVerdict> {
    if numeric::distinct_sizes(sequence) < 3 || sequence.len() != numeric::distinct_sizes(sequence)
    {
        bail!(
            Argument,
            "cluster verdict needs at least 3 distinct sizes, one entry each"
        );
    }
    let mut sequence = sequence.to_vec();
    sequence.sort_unstable();
    let [.., (_, prev), (n_last, last)] = sequence[..] else {
        unreachable!()
    };
    let has_cluster_property = prev == last && 2 * last <= n_last;
    Ok(ClusterVerdict {
        has_cluster_property,
        sequence,
        rule: CLUSTER_RULE,
    })
}
