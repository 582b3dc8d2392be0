//! Pure states, single-site operators and additive operators on a spin chain.

mod io;
mod lattice;
mod operator;
mod state;

use num_complex::Complex;

pub use io::{
    export_state, import_state, import_state_with, read_state_file, read_state_header,
    write_state_file, STATE_HEADER,
};
pub use lattice::{Geometry, LatticeSpec, DEFAULT_MAX_SITES, HARD_MAX_SITES};
pub use operator::{pauli, pauli_matrix, AdditiveOperator, Axis, LocalOperator, Matrix2};
pub use state::{
    make_dicke, make_ghz, make_product_state, make_uniform_product_state, make_w, StateVector,
};

use crate::error::{bail, Result};
use crate::numeric;
use crate::real::Real;

/// Something that acts on a state vector of the same lattice.
pub trait Observable<T: Real> {
    /// Ô|ψ⟩ (unnormalized).
    fn apply(&self, state: &StateVector<T>) -> Result<Vec<Complex<T>>>;
}

impl<T: Real> Observable<T> for LocalOperator<T> {
    fn apply(&self, state: &StateVector<T>) -> Result<Vec<Complex<T>>> {
        state.lattice().check_site(self.site())?;
        let mut out = vec![Complex::new(T::zero(), T::zero()); state.amplitudes().len()];
        self.apply_into(state.amplitudes(), &mut out);
        Ok(out)
    }
}

impl<T: Real> Observable<T> for AdditiveOperator<T> {
    fn apply(&self, state: &StateVector<T>) -> Result<Vec<Complex<T>>> {
        if self.lattice().n_sites() != state.n_sites() {
            bail!(
                Argument,
                "additive operator on {} sites applied to a {}-site state",
                self.lattice().n_sites(),
                state.n_sites()
            );
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); state.amplitudes().len()];
        for term in self.terms().iter().filter(|t| !t.is_zero()) {
            term.accumulate_into(state.amplitudes(), &mut out);
        }
        Ok(out)
    }
}

/// (op ⊗ 1)|ψ⟩. The result is generally not normalized.
pub fn apply_local<T: Real>(
    op: &LocalOperator<T>,
    state: &StateVector<T>,
) -> Result<StateVector<T>> {
    let amplitudes = op.apply(state)?;
    Ok(StateVector::from_raw(*state.lattice(), amplitudes))
}

fn real_part_checked<T: Real>(value: Complex<T>) -> Result<T> {
    if value.im.abs() > T::tol(1e-8) {
        bail!(
            Consistency,
            "expectation of a Hermitian operator has imaginary part {:e}",
            value.im
        );
    }
    Ok(value.re)
}

/// ⟨ψ|Ô|ψ⟩ for a Hermitian Ô.
pub fn expectation<T: Real, O: Observable<T> + ?Sized>(
    op: &O,
    state: &StateVector<T>,
) -> Result<T> {
    state.check_normalized()?;
    let image = op.apply(state)?;
    real_part_checked(numeric::inner(state.amplitudes(), &image))
}

/// ⟨δÂ²⟩ = ⟨Â²⟩ − ⟨Â⟩², clamped at zero.
pub fn additive_variance<T: Real>(op: &AdditiveOperator<T>, state: &StateVector<T>) -> Result<T> {
    state.check_normalized()?;
    let image = op.apply(state)?;
    let mean = real_part_checked(numeric::inner(state.amplitudes(), &image))?;
    // Â is Hermitian, so ⟨Â²⟩ = ‖Â|ψ⟩‖².
    let second = numeric::norm_sqr(&image);
    let var = second - mean * mean;
    if var < -T::tol(1e-10) * (T::one() + second) {
        bail!(Consistency, "negative variance {var:e}");
    }
    Ok(if var < T::zero() { T::zero() } else { var })
}

/// σ^α(x)|ψ⟩ for every site and axis, ordered as index 3x + α.
pub(crate) fn pauli_images<T: Real>(state: &StateVector<T>) -> Vec<Vec<Complex<T>>> {
    use rayon::prelude::*;
    let n = state.n_sites();
    (0..3 * n)
        .into_par_iter()
        .map(|k| {
            let op =
                LocalOperator::from_pauli_coefficients(k / 3, T::zero(), Axis::ALL[k % 3].unit());
            let mut out = vec![Complex::new(T::zero(), T::zero()); state.amplitudes().len()];
            op.apply_into(state.amplitudes(), &mut out);
            out
        })
        .collect()
}

/// ⟨σ^α(x)⟩ from precomputed images.
pub(crate) fn pauli_means<T: Real>(state: &StateVector<T>, images: &[Vec<Complex<T>>]) -> Vec<T> {
    images
        .iter()
        .map(|img| numeric::inner(state.amplitudes(), img).re)
        .collect()
}
