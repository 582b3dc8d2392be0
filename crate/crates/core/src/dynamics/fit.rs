//! Log-log fit of decoherence rates against system size, Γ ≈ K·N^{1+δ}.

use crate::error::{bail, Result};
use crate::numeric::{distinct_sizes, fit_log_log};
use crate::real::Real;

/// A state is called fragile when 1+δ reaches this value.
pub const FRAGILE_MIN_EXPONENT: f64 = 1.5;

#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceFit<T> {
    pub gamma_per_size: Vec<(usize, T)>,
    /// Prefactor K = exp(intercept).
    pub k: T,
    pub one_plus_delta: T,
    /// RMS residual of the log-log fit.
    pub residual: T,
    pub fragile: bool,
}

pub fn fit_gamma_scaling<T: Real>(points: &[(usize, T)]) -> Result<DecoherenceFit<T>> {
    if distinct_sizes(points) < 3 {
        bail!(
            Argument,
            "rate scaling fit needs at least three distinct sizes"
        );
    }
    if let Some((n, g)) = points
        .iter()
        .find(|(_, g)| !g.is_finite() || *g <= T::zero())
    {
        bail!(
            Argument,
            "decoherence rate at N = {n} must be positive, got {:e}",
            g.as_f64()
        );
    }
    let line = fit_log_log(points)?;
    Ok(DecoherenceFit {
        gamma_per_size: points.to_vec(),
        k: line.intercept.exp(),
        one_plus_delta: line.slope,
        residual: line.rms_residual,
        fragile: line.slope >= T::lit(FRAGILE_MIN_EXPONENT),
    })
}
