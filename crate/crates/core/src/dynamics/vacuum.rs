//! Pure-phase vacua: the polarized partners of a parity-symmetric ground state.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use super::hamiltonian::{build_hamiltonian, HamiltonianSpec};
use super::krylov::{ground_state, Which};
use crate::error::{bail, Result};
use crate::numeric;
use crate::qcore::{expectation, AdditiveOperator, Axis, StateVector};
use crate::real::Real;

/// Strength of the selecting field, B = 0.05·|J|.
pub const SB_FIELD_FRACTION: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VacuumMethod {
    /// (|E₀⟩ + e^{iφ}|E₁⟩)/√2 with φ maximizing ⟨M⟩.
    DoubletSuperposition,
    /// Ground state with a small longitudinal field.
    SbFieldLimit,
}

impl FromStr for VacuumMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "doublet" | "doublet-superposition" => Ok(VacuumMethod::DoubletSuperposition),
            "sb-field" | "sb-field-limit" => Ok(VacuumMethod::SbFieldLimit),
            other => Err(crate::Error::Argument(format!(
                "unknown vacuum method {other:?}"
            ))),
        }
    }
}

impl fmt::Display for VacuumMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VacuumMethod::DoubletSuperposition => "doublet-superposition",
            VacuumMethod::SbFieldLimit => "sb-field-limit",
        })
    }
}

#[derive(Clone, Debug)]
pub struct PurePhaseVacuum<T: Real> {
    pub state: StateVector<T>,
    /// ⟨H⟩ under the Hamiltonian as given (without any selecting field).
    pub energy: T,
    /// ⟨M⟩ with M = Σ_x σ_z(x).
    pub magnetization: T,
    pub method: VacuumMethod,
    /// Set when |h| ≥ |J|: there is no ordered phase to select.
    pub paramagnetic: bool,
}

/// ⟨Σ_x σ_z(x)⟩.
pub fn magnetization<T: Real>(state: &StateVector<T>) -> Result<T> {
    expectation(&AdditiveOperator::uniform(*state.lattice(), Axis::Z), state)
}

pub fn pure_phase_vacuum<T: Real>(
    spec: &HamiltonianSpec<T>,
    method: VacuumMethod,
) -> Result<PurePhaseVacuum<T>> {
    let h = build_hamiltonian(spec)?;
    let lattice = spec.lattice;
    let state = match method {
        VacuumMethod::DoubletSuperposition => {
            if lattice.dim() < 2 {
                bail!(Size, "doublet needs at least two basis states");
            }
            let pair = ground_state(&h, Which::LowestTwo)?;
            let (e0, e1) = (pair[0].state.amplitudes(), pair[1].state.amplitudes());
            let n = lattice.n_sites();
            let m01 = numeric::compensated_complex_sum((0..e0.len()).map(|i| {
                let m = T::lit(n as f64 - 2.0 * (i.count_ones() as f64));
                e0[i].conj() * e1[i].scale(m)
            }));
            let phase = if m01.norm_sqr().sqrt() > T::zero() {
                m01.conj() / Complex::new(m01.norm_sqr().sqrt(), T::zero())
            } else {
                Complex::new(T::one(), T::zero())
            };
            let s = T::FRAC_1_SQRT_2();
            let amps = e0
                .iter()
                .zip(e1)
                .map(|(a, b)| (a + phase * b).scale(s))
                .collect();
            StateVector::from_amplitudes(lattice, amps)?.normalized()?
        }
        VacuumMethod::SbFieldLimit => {
            let field = spec.j.abs() * T::lit(SB_FIELD_FRACTION);
            let biased = build_hamiltonian(&spec.with_field(spec.b + field))?;
            ground_state(&biased, Which::Lowest)?.remove(0).state
        }
    };
    Ok(PurePhaseVacuum {
        energy: h.energy(&state)?,
        magnetization: magnetization(&state)?,
        state,
        method,
        paramagnetic: spec.is_paramagnetic(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::LatticeSpec;

    #[test]
    fn doublet_is_polarized_and_costs_half_the_gap() {
        let spec =
            HamiltonianSpec::<f64>::transverse_ising(LatticeSpec::open(6).unwrap(), 1.0, 0.1);
        let vac = pure_phase_vacuum(&spec, VacuumMethod::DoubletSuperposition).unwrap();
        let h = build_hamiltonian(&spec).unwrap();
        let pair = ground_state(&h, Which::LowestTwo).unwrap();
        assert!((vac.energy - 0.5 * (pair[0].energy + pair[1].energy)).abs() < 1e-10);
        assert!(vac.energy >= pair[0].energy - 1e-10);
        assert!(vac.magnetization >= 0.9 * 6.0);
        assert!(!vac.paramagnetic);
    }

    #[test]
    fn classical_limit_is_all_up() {
        let spec =
            HamiltonianSpec::<f64>::transverse_ising(LatticeSpec::open(4).unwrap(), 1.0, 1e-4);
        let vac = pure_phase_vacuum(&spec, VacuumMethod::SbFieldLimit).unwrap();
        assert!(vac.state.amplitudes()[0].norm_sqr() > 1.0 - 1e-6);
        let doublet = pure_phase_vacuum(&spec, VacuumMethod::DoubletSuperposition).unwrap();
        assert!(doublet.state.amplitudes()[0].norm_sqr() > 1.0 - 1e-6);
    }

    #[test]
    fn paramagnet_is_flagged() {
        let spec =
            HamiltonianSpec::<f64>::transverse_ising(LatticeSpec::open(4).unwrap(), 1.0, 2.0);
        assert!(
            pure_phase_vacuum(&spec, VacuumMethod::SbFieldLimit)
                .unwrap()
                .paramagnetic
        );
    }
}
