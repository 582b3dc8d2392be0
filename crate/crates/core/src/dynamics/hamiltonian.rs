use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{bail, Result};
use crate::numeric;
use crate::qcore::{LatticeSpec, StateVector};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// H = −J Σ σ_zσ_z − h Σ σ_x − B Σ σ_z
    TransverseIsing,
    /// H = J Σ (σ_xσ_x + σ_yσ_y + Δ σ_zσ_z) − h Σ σ_x − B Σ σ_z
    Xxz,
}

impl FromStr for Model {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tfim" | "transverse-ising" => Ok(Model::TransverseIsing),
            "xxz" => Ok(Model::Xxz),
            other => Err(crate::Error::Argument(format!(
                "unsupported model {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::TransverseIsing => "transverse-ising",
            Model::Xxz => "xxz",
        })
    }
}

/// Couplings are in energy units; `b` is the longitudinal symmetry-breaking field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianSpec<T> {
    pub model: Model,
    pub lattice: LatticeSpec,
    pub j: T,
    pub h: T,
    pub delta: T,
    pub b: T,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn transverse_ising(lattice: LatticeSpec, j: T, h: T) -> Self {
        Self {
            model: Model::TransverseIsing,
            lattice,
            j,
            h,
            delta: T::zero(),
            b: T::zero(),
        }
    }

    pub fn xxz(lattice: LatticeSpec, j: T, delta: T) -> Self {
        Self {
            model: Model::Xxz,
            lattice,
            j,
            h: T::zero(),
            delta,
            b: T::zero(),
        }
    }

    pub fn with_field(mut self, b: T) -> Self {
        self.b = b;
        self
    }

    pub fn with_lattice(mut self, lattice: LatticeSpec) -> Self {
        self.lattice = lattice;
        self
    }

    /// Transverse field at least as strong as the exchange coupling.
    pub fn is_paramagnetic(&self) -> bool {
        self.h.abs() >= self.j.abs()
    }
}

/// Matrix-free Hamiltonian in the σ_z basis. All supported models are real symmetric.
#[derive(Clone, Debug)]
pub struct Hamiltonian<T> {
    spec: HamiltonianSpec<T>,
    diagonal: Vec<T>,
    /// Amplitude of each single-spin flip (−h).
    flip: T,
    /// Bond masks for the exchange flip-flop term (XXZ only).
    exchange_masks: Vec<usize>,
    /// Amplitude of the flip-flop term on antiparallel bonds (2J).
    exchange: T,
}

pub fn build_hamiltonian<T: Real>(spec: &HamiltonianSpec<T>) -> Result<Hamiltonian<T>> {
    for (name, v) in [
        ("J", spec.j),
        ("h", spec.h),
        ("delta", spec.delta),
        ("B", spec.b),
    ] {
        if !v.is_finite() {
            bail!(Argument, "coupling {name} must be finite");
        }
    }
    let lattice = spec.lattice;
    let bonds = lattice.bonds();
    let zz = match spec.model {
        Model::TransverseIsing => -spec.j,
        Model::Xxz => spec.j * spec.delta,
    };
    let n = lattice.n_sites();
    let sz = |i: usize, k: usize| if i >> k & 1 == 0 { T::one() } else { -T::one() };
    let diagonal = (0..lattice.dim())
        .map(|i| {
            let bond_sum =
                numeric::compensated_sum(bonds.iter().map(|&(k, l)| sz(i, k) * sz(i, l)));
            let mag = numeric::compensated_sum((0..n).map(|k| sz(i, k)));
            zz * bond_sum - spec.b * mag
        })
        .collect();
    let (exchange_masks, exchange) = match spec.model {
        Model::TransverseIsing => (Vec::new(), T::zero()),
        Model::Xxz => (
            bonds
                .iter()
                .map(|&(k, l)| (1usize << k) | (1usize << l))
                .collect(),
            spec.j * T::lit(2.0),
        ),
    };
    Ok(Hamiltonian {
        spec: *spec,
        diagonal,
        flip: -spec.h,
        exchange_masks,
        exchange,
    })
}

impl<T: Real> Hamiltonian<T> {
    pub fn spec(&self) -> &HamiltonianSpec<T> {
        &self.spec
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.spec.lattice
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Whether the global spin flip Π_x σ_x commutes with H (true unless B ≠ 0).
    pub fn has_parity_symmetry(&self) -> bool {
        self.spec.b == T::zero()
    }

    fn row(&self, i: usize, x: &[Complex<T>]) -> Complex<T> {
        let mut acc = x[i].scale(self.diagonal[i]);
        if self.flip != T::zero() {
            let mut s = Complex::new(T::zero(), T::zero());
            for k in 0..self.spec.lattice.n_sites() {
                s += x[i ^ (1 << k)];
            }
            acc += s.scale(self.flip);
        }
        for &mask in &self.exchange_masks {
            let bits = i & mask;
            if bits != 0 && bits != mask {
                acc += x[i ^ mask].scale(self.exchange);
            }
        }
        acc
    }

    /// y = H x.
    pub fn apply_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        if self.dim() >= 4096 {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(i, yi)| *yi = self.row(i, x));
        } else {
            y.iter_mut()
                .enumerate()
                .for_each(|(i, yi)| *yi = self.row(i, x));
        }
    }

    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![Complex::new(T::zero(), T::zero()); x.len()];
        self.apply_into(x, &mut y);
        y
    }

    /// ⟨ψ|H|ψ⟩.
    pub fn energy(&self, state: &StateVector<T>) -> Result<T> {
        if state.n_sites() != self.spec.lattice.n_sites() {
            bail!(Argument, "state and Hamiltonian live on different lattices");
        }
        state.check_normalized()?;
        Ok(numeric::inner(state.amplitudes(), &self.apply(state.amplitudes())).re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(n: usize) -> LatticeSpec {
        LatticeSpec::open(n).unwrap()
    }

    #[test]
    fn classical_limit_eigenstate() {
        let h = build_hamiltonian(&HamiltonianSpec::<f64>::transverse_ising(open(5), 1.0, 0.0))
            .unwrap();
        let up = StateVector::<f64>::basis(open(5), 0).unwrap();
        let hx = h.apply(up.amplitudes());
        assert_eq!(hx[0].re, -4.0);
        assert!(hx[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn hermitian_on_random_vectors() {
        let spec = HamiltonianSpec::<f64>::xxz(LatticeSpec::periodic(5).unwrap(), 0.7, 1.3)
            .with_field(0.2);
        let mut spec = spec;
        spec.h = 0.4;
        let h = build_hamiltonian(&spec).unwrap();
        let mut seed = 17u64;
        let mut rnd = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let u: Vec<Complex<f64>> = (0..32).map(|_| Complex::new(rnd(), rnd())).collect();
        let v: Vec<Complex<f64>> = (0..32).map(|_| Complex::new(rnd(), rnd())).collect();
        let lhs = numeric::inner(&u, &h.apply(&v));
        let rhs = numeric::inner(&h.apply(&u), &v);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn unknown_model_rejected() {
        assert!("heisenberg".parse::<Model>().is_err());
        assert_eq!("tfim".parse::<Model>().unwrap(), Model::TransverseIsing);
        let mut spec = HamiltonianSpec::<f64>::transverse_ising(open(3), 1.0, f64::NAN);
        assert!(build_hamiltonian(&spec).is_err());
        spec.h = 0.5;
        assert!(build_hamiltonian(&spec).is_ok());
    }
}
