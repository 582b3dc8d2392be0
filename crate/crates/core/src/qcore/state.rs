use num_complex::Complex;

use super::lattice::LatticeSpec;
use crate::error::{bail, Result};
use crate::numeric;
use crate::real::Real;

/// Amplitudes of a pure state of N spin-1/2 sites.
///
/// Bit `k` of a basis index is site `k`; a 0 bit is σ_z = +1 ("up") and a
/// 1 bit is σ_z = −1 ("down"). All named constructors return normalized
/// states. Values are never mutated in place: operations that change a state
/// return a new one.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    lattice: LatticeSpec,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps raw amplitudes. The result is not renormalized; see [`StateVector::normalized`].
    pub fn from_amplitudes(lattice: LatticeSpec, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != lattice.dim() {
            bail!(
                Argument,
                "{} sites need {} amplitudes, got {}",
                lattice.n_sites(),
                lattice.dim(),
                amplitudes.len()
            );
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            bail!(Argument, "non-finite amplitude");
        }
        Ok(Self {
            lattice,
            amplitudes,
        })
    }

    pub(crate) fn from_raw(lattice: LatticeSpec, amplitudes: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amplitudes.len(), lattice.dim());
        Self {
            lattice,
            amplitudes,
        }
    }

    /// Computational basis state |index⟩.
    pub fn basis(lattice: LatticeSpec, index: usize) -> Result<Self> {
        if index >= lattice.dim() {
            bail!(
                Argument,
                "basis index {index} out of range for {} sites",
                lattice.n_sites()
            );
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); lattice.dim()];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self::from_raw(lattice, amplitudes))
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    /// Same amplitudes on a lattice with the same site count but another geometry.
    pub fn with_lattice(mut self, lattice: LatticeSpec) -> Result<Self> {
        if lattice.n_sites() != self.n_sites() {
            bail!(
                Argument,
                "cannot relabel a {}-site state onto {} sites",
                self.n_sites(),
                lattice.n_sites()
            );
        }
        self.lattice = lattice;
        Ok(self)
    }

    pub fn norm_sqr(&self) -> T {
        numeric::norm_sqr(&self.amplitudes)
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.norm_sqr() - T::one()).abs() <= tol
    }

    /// Errors with [`crate::Error::State`] unless Σ|a|² = 1 within 1e-10.
    pub fn check_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - T::one()).abs() > T::tol(1e-10) {
            bail!(State, "state is not normalized (norm² = {n2:e})");
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > T::zero()) || !n2.is_finite() {
            bail!(State, "cannot normalize a state of norm² {n2:e}");
        }
        let inv = T::one() / n2.sqrt();
        Ok(Self::from_raw(
            self.lattice,
            self.amplitudes.iter().map(|a| a.scale(inv)).collect(),
        ))
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.lattice.n_sites() != other.lattice.n_sites() {
            bail!(Argument, "inner product of states on different lattices");
        }
        Ok(numeric::inner(&self.amplitudes, &other.amplitudes))
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// Tensor product of cos(θ/2)|up⟩ + e^{iφ} sin(θ/2)|down⟩ over the sites.
pub fn make_product_state<T: Real>(
    lattice: LatticeSpec,
    bloch_angles: &[(T, T)],
) -> Result<StateVector<T>> {
    if bloch_angles.len() != lattice.n_sites() {
        bail!(
            Argument,
            "need one (θ, φ) pair per site: {} sites, {} pairs",
            lattice.n_sites(),
            bloch_angles.len()
        );
    }
    let half = T::lit(0.5);
    let mut amplitudes = vec![Complex::new(T::one(), T::zero())];
    for &(theta, phi) in bloch_angles {
        if !theta.is_finite() || !phi.is_finite() {
            bail!(Argument, "Bloch angles must be finite");
        }
        let up = Complex::new((theta * half).cos(), T::zero());
        let s = (theta * half).sin();
        let down = Complex::new(phi.cos() * s, phi.sin() * s);
        let mut next = Vec::with_capacity(amplitudes.len() * 2);
        next.extend(amplitudes.iter().map(|a| *a * up));
        next.extend(amplitudes.iter().map(|a| *a * down));
        amplitudes = next;
    }
    Ok(StateVector::from_raw(lattice, amplitudes))
}

/// The same single-site state on every site.
pub fn make_uniform_product_state<T: Real>(
    lattice: LatticeSpec,
    theta: T,
    phi: T,
) -> Result<StateVector<T>> {
    make_product_state(lattice, &vec![(theta, phi); lattice.n_sites()])
}

/// (|all-up⟩ + |all-down⟩)/√2.
pub fn make_ghz<T: Real>(lattice: LatticeSpec) -> Result<StateVector<T>> {
    if lattice.n_sites() < 2 {
        bail!(Size, "GHZ state needs at least two sites");
    }
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); lattice.dim()];
    let a = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    amplitudes[0] = a;
    amplitudes[lattice.dim() - 1] = a;
    Ok(StateVector::from_raw(lattice, amplitudes))
}

/// Equal superposition of all basis states with exactly `k` down spins.
pub fn make_dicke<T: Real>(lattice: LatticeSpec, k: usize) -> Result<StateVector<T>> {
    let n = lattice.n_sites();
    if k > n {
        bail!(Argument, "excitation count {k} exceeds {n} sites");
    }
    let count = (0..lattice.dim())
        .filter(|i| i.count_ones() as usize == k)
        .count();
    let a = Complex::new(T::one() / T::from_usize(count).unwrap().sqrt(), T::zero());
    let z = Complex::new(T::zero(), T::zero());
    let amplitudes = (0..lattice.dim())
        .map(|i| if i.count_ones() as usize == k { a } else { z })
        .collect();
    Ok(StateVector::from_raw(lattice, amplitudes))
}

/// W state, the one-excitation Dicke state.
pub fn make_w<T: Real>(lattice: LatticeSpec) -> Result<StateVector<T>> {
    make_dicke(lattice, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn amps(s: &StateVector<f64>) -> Vec<(f64, f64)> {
        s.amplitudes().iter().map(|a| (a.re, a.im)).collect()
    }

    #[test]
    fn product_state_examples() {
        let s = make_uniform_product_state(LatticeSpec::open(2).unwrap(), 0.0, 0.0).unwrap();
        assert_eq!(
            amps(&s),
            vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]
        );

        let s = make_product_state(LatticeSpec::open(1).unwrap(), &[(FRAC_PI_2, 0.0)]).unwrap();
        for a in s.amplitudes() {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15 && a.im == 0.0);
        }

        // Expanding (|0⟩+|1⟩)^⊗3 / √8 by hand: every amplitude is 1/√8.
        let s = make_uniform_product_state(LatticeSpec::open(3).unwrap(), FRAC_PI_2, 0.0).unwrap();
        for a in s.amplitudes() {
            assert!((a.re - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        }
        assert!(s.is_normalized(1e-12));
    }

    #[test]
    fn product_state_rejects_bad_input() {
        let l = LatticeSpec::open(2).unwrap();
        assert!(make_product_state(l, &[(0.0, 0.0)]).is_err());
        assert!(make_product_state(l, &[(f64::NAN, 0.0), (0.0, 0.0)]).is_err());
        assert!(matches!(LatticeSpec::open(20), Err(crate::Error::Size(_))));
    }

    #[test]
    fn ghz_examples() {
        let s = make_ghz::<f64>(LatticeSpec::open(2).unwrap()).unwrap();
        assert_eq!(
            amps(&s),
            vec![
                (FRAC_1_SQRT_2, 0.0),
                (0.0, 0.0),
                (0.0, 0.0),
                (FRAC_1_SQRT_2, 0.0)
            ]
        );
        let s = make_ghz::<f64>(LatticeSpec::open(3).unwrap()).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let expect = if i == 0 || i == 7 { FRAC_1_SQRT_2 } else { 0.0 };
            assert_eq!(a.re, expect);
        }
        assert!(matches!(
            make_ghz::<f64>(LatticeSpec::open(1).unwrap()),
            Err(crate::Error::Size(_))
        ));
    }

    #[test]
    fn dicke_examples() {
        let w = make_w::<f64>(LatticeSpec::open(3).unwrap()).unwrap();
        for (i, a) in w.amplitudes().iter().enumerate() {
            let expect = if [1, 2, 4].contains(&i) {
                1.0 / 3f64.sqrt()
            } else {
                0.0
            };
            assert!((a.re - expect).abs() < 1e-15);
        }
        let d0 = make_dicke::<f64>(LatticeSpec::open(3).unwrap(), 0).unwrap();
        assert_eq!(
            d0,
            StateVector::basis(LatticeSpec::open(3).unwrap(), 0).unwrap()
        );
        // C(4,2) = 6 basis states with two down spins.
        let d = make_dicke::<f64>(LatticeSpec::open(4).unwrap(), 2).unwrap();
        let nz: Vec<_> = d.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nz.len(), 6);
        assert!(nz.iter().all(|a| (a.re - 1.0 / 6f64.sqrt()).abs() < 1e-15));
        assert!(make_dicke::<f64>(LatticeSpec::open(3).unwrap(), 4).is_err());
    }

    #[test]
    fn normalization() {
        let l = LatticeSpec::open(2).unwrap();
        let raw = StateVector::from_amplitudes(l, vec![Complex::new(2.0, 0.0); 4]).unwrap();
        assert!(raw.check_normalized().is_err());
        let n = raw.normalized().unwrap();
        assert!(n.is_normalized(1e-15));
        let zero = StateVector::from_amplitudes(l, vec![Complex::new(0.0, 0.0); 4]).unwrap();
        assert!(zero.normalized().is_err());
        assert!(StateVector::from_amplitudes(l, vec![Complex::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn single_precision_constructors() {
        let s = make_ghz::<f32>(LatticeSpec::open(6).unwrap()).unwrap();
        assert!(s.is_normalized(f32::tol(1e-12)));
    }
}
