//! Spatially correlated white noise coupled to single-site operators.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{bail, Result};
use crate::numeric::{self, sorted_eigen};
use crate::qcore::{pauli, Axis, LatticeSpec, LocalOperator, Observable, StateVector};
use crate::real::Real;

/// Relative tolerance on negative kernel eigenvalues.
const PSD_TOLERANCE: f64 = 1e-10;

/// The â(x) each noise component f(x,t) couples to.
#[derive(Clone, Debug)]
pub enum Coupling<T> {
    /// Pauli operator along one axis on every site.
    Axis(Axis),
    /// Explicit per-site operators; sites without an entry are not coupled.
    Operators(Vec<LocalOperator<T>>),
}

/// Spatial correlation g(x, y) of the noise field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel<T> {
    /// g ≡ 1: one noise field shared by every site.
    Collective,
    /// g = δ_xy.
    Independent,
    /// g = exp(−d(x, y)/ξ) with the lattice distance d.
    Exponential { xi: T },
}

impl<T: Real> Kernel<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Collective => "collective",
            Kernel::Independent => "independent",
            Kernel::Exponential { .. } => "exponential",
        }
    }

    /// Parses `collective`, `independent` or `exponential`; `xi` is needed for the last.
    pub fn parse(name: &str, xi: Option<T>) -> Result<Self> {
        match (name, xi) {
            ("collective", _) => Ok(Kernel::Collective),
            ("independent", _) => Ok(Kernel::Independent),
            ("exponential", Some(xi)) => Ok(Kernel::Exponential { xi }),
            ("exponential", None) => {
                bail!(Argument, "exponential kernel needs a correlation length xi")
            }
            (other, _) => bail!(Argument, "unknown kernel {other:?}"),
        }
    }

    fn value(&self, d: usize) -> T {
        match *self {
            Kernel::Collective => T::one(),
            Kernel::Independent => {
                if d == 0 {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Kernel::Exponential { xi } => (-T::lit(d as f64) / xi).exp(),
        }
    }
}

impl<T: Real> fmt::Display for Kernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Exponential { xi } => write!(f, "exponential(xi={})", xi.as_f64()),
            other => f.write_str(other.name()),
        }
    }
}

/// White noise with E[f(x,t) f(y,t′)] = κ g(x, y) δ(t − t′).
#[derive(Clone, Debug)]
pub struct NoiseModel<T> {
    pub coupling: Coupling<T>,
    /// Intensity κ (1/time).
    pub kappa: T,
    pub kernel: Kernel<T>,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(coupling: Coupling<T>, kappa: T, kernel: Kernel<T>) -> Self {
        Self {
            coupling,
            kappa,
            kernel,
        }
    }

    pub fn axis(axis: Axis, kappa: T, kernel: Kernel<T>) -> Self {
        Self::new(Coupling::Axis(axis), kappa, kernel)
    }

    /// Validates the model on a lattice and precomputes the kernel spectrum.
    pub fn prepare(&self, lattice: &LatticeSpec) -> Result<PreparedNoise<T>> {
        if !self.kappa.is_finite() || self.kappa < T::zero() {
            bail!(Model, "noise intensity must be finite and non-negative");
        }
        if let Kernel::Exponential { xi } = self.kernel {
            if !xi.is_finite() || xi <= T::zero() {
                bail!(Model, "correlation length must be finite and positive");
            }
        }
        let n = lattice.n_sites();
        let operators = match &self.coupling {
            Coupling::Axis(axis) => (0..n)
                .map(|x| pauli(lattice, x, *axis))
                .collect::<Result<Vec<_>>>()?,
            Coupling::Operators(list) => {
                let mut ops: Vec<Option<LocalOperator<T>>> = vec![None; n];
                for op in list {
                    if op.site() >= n {
                        bail!(
                            Model,
                            "coupling operator on site {} outside a {n}-site lattice",
                            op.site()
                        );
                    }
                    if ops[op.site()].replace(op.clone()).is_some() {
                        bail!(Model, "two coupling operators on site {}", op.site());
                    }
                }
                ops.into_iter()
                    .enumerate()
                    .map(|(x, op)| op.unwrap_or_else(|| LocalOperator::zero(x)))
                    .collect()
            }
        };
        let kernel_matrix =
            DMatrix::from_fn(n, n, |x, y| self.kernel.value(lattice.distance(x, y)));
        let (values, vectors) = sorted_eigen(kernel_matrix.clone())?;
        let lambda_max = values[n - 1];
        let floor = -T::lit(PSD_TOLERANCE) * lambda_max.abs().max(T::one());
        if values[0] < floor {
            bail!(
                Model,
                "{} kernel is not positive semidefinite on this lattice (eigenvalue {:e})",
                self.kernel,
                values[0].as_f64()
            );
        }
        // g = L Lᵀ with L = U √λ⁺; Cholesky would reject the rank-one collective kernel.
        let factor = DMatrix::from_fn(n, n, |r, c| {
            vectors[(r, c)] * values[c].max(T::zero()).sqrt()
        });
        Ok(PreparedNoise {
            lattice: *lattice,
            kappa: self.kappa,
            kernel: self.kernel,
            kernel_matrix,
            lambda_max,
            factor,
            operators,
        })
    }
}

/// A noise model bound to a lattice.
#[derive(Clone, Debug)]
pub struct PreparedNoise<T> {
    lattice: LatticeSpec,
    kappa: T,
    kernel: Kernel<T>,
    kernel_matrix: DMatrix<T>,
    lambda_max: T,
    factor: DMatrix<T>,
    operators: Vec<LocalOperator<T>>,
}

impl<T: Real> PreparedNoise<T> {
    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn kernel(&self) -> Kernel<T> {
        self.kernel
    }

    pub fn kernel_matrix(&self) -> &DMatrix<T> {
        &self.kernel_matrix
    }

    /// Largest eigenvalue of g.
    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    /// Matrix L with L Lᵀ = g, used to correlate independent normals.
    pub fn sampling_factor(&self) -> &DMatrix<T> {
        &self.factor
    }

    /// One operator per site, zero where nothing couples.
    pub fn operators(&self) -> &[LocalOperator<T>] {
        &self.operators
    }

    /// κ·N·λ_max, the fastest decay rate the noise can produce up to operator norms.
    pub fn rate_scale(&self) -> T {
        self.kappa * T::lit(self.lattice.n_sites() as f64) * self.lambda_max
    }

    /// Largest admissible trajectory step, 0.1/(κ N λ_max).
    pub fn max_step(&self) -> T {
        let scale = self.rate_scale();
        if scale > T::zero() {
            T::lit(0.1) / scale
        } else {
            T::lit(f64::INFINITY)
        }
    }
}

/// Γ = κ Σ_{x,y} g(x,y) Re⟨δâ(x) δâ(y)⟩, the exact initial decay rate −dF/dt at t = 0.
pub fn analytic_dephasing_rate<T: Real>(
    state: &StateVector<T>,
    noise: &NoiseModel<T>,
) -> Result<T> {
    state.check_normalized()?;
    let prepared = noise.prepare(state.lattice())?;
    prepared_dephasing_rate(state, &prepared)
}

pub fn prepared_dephasing_rate<T: Real>(
    state: &StateVector<T>,
    noise: &PreparedNoise<T>,
) -> Result<T> {
    if state.lattice().n_sites() != noise.lattice.n_sites() {
        bail!(Argument, "noise model prepared for a different lattice");
    }
    state.check_normalized()?;
    let images: Vec<Vec<Complex<T>>> = noise
        .operators
        .iter()
        .map(|op| op.apply(state))
        .collect::<Result<_>>()?;
    let means: Vec<T> = images
        .iter()
        .map(|img| numeric::inner(state.amplitudes(), img).re)
        .collect();
    let n = images.len();
    let mut acc = numeric::CompensatedSum::new();
    for x in 0..n {
        for y in 0..n {
            let g = noise.kernel_matrix[(x, y)];
            if g == T::zero() {
                continue;
            }
            let c = numeric::inner(&images[x], &images[y]).re - means[x] * means[y];
            acc.add(g * c);
        }
    }
    Ok(noise.kappa * acc.value())
}
