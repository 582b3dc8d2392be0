//! Krylov-subspace routines: restarted Lanczos for the lowest eigenpairs and
//! the action of exp(−iHt) on a vector.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::hamiltonian::Hamiltonian;
use crate::error::{bail, Result};
use crate::numeric::{inner, norm_sqr, sorted_eigen};
use crate::qcore::StateVector;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Lowest,
    LowestTwo,
}

impl Which {
    fn count(self) -> usize {
        match self {
            Which::Lowest => 1,
            Which::LowestTwo => 2,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Krylov vectors kept per restart cycle.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Required ‖Hψ − Eψ‖.
    pub tolerance: f64,
    /// Seeds the deterministic start vectors.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 60,
            max_restarts: 400,
            tolerance: 1e-9,
            seed: 0x6d61_6372_6f73_7462,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair<T: Real> {
    pub energy: T,
    pub state: StateVector<T>,
    /// ‖Hψ − Eψ‖ at convergence.
    pub residual: T,
}

/// Invariant subspace of the global spin flip P = Π_x σ_x, which maps basis index i to !i.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sector {
    Full,
    Even,
    Odd,
}

impl Sector {
    fn dim(self, full: usize) -> usize {
        match self {
            Sector::Full => full,
            Sector::Even | Sector::Odd => full / 2,
        }
    }

    fn project<T: Real>(self, v: &mut [Complex<T>]) {
        if self == Sector::Full {
            return;
        }
        let all = v.len() - 1;
        let half = T::lit(0.5);
        for i in 0..v.len() {
            let k = i ^ all;
            if i < k {
                let (a, b) = (v[i], v[k]);
                if self == Sector::Even {
                    let s = (a + b).scale(half);
                    v[i] = s;
                    v[k] = s;
                } else {
                    let s = (a - b).scale(half);
                    v[i] = s;
                    v[k] = -s;
                }
            }
        }
    }
}

fn axpy<T: Real>(y: &mut [Complex<T>], a: Complex<T>, x: &[Complex<T>]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn orthogonalize<'a, T: Real>(
    w: &mut [Complex<T>],
    against: impl Iterator<Item = &'a Vec<Complex<T>>> + Clone,
) {
    for _ in 0..2 {
        for q in against.clone() {
            let c = inner(q, w);
            axpy(w, -c, q);
        }
    }
}

fn normalize<T: Real>(v: &mut [Complex<T>]) -> T {
    let n = norm_sqr(v).sqrt();
    if n > T::zero() {
        let inv = T::one() / n;
        v.iter_mut().for_each(|a| *a = a.scale(inv));
    }
    n
}

fn start_vector<T: Real>(dim: usize, seed: u64, stream: u64) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..dim)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            Complex::new(T::lit(u - 0.5), T::zero())
        })
        .collect()
}

fn lowest_in_sector<T: Real>(
    h: &Hamiltonian<T>,
    sector: Sector,
    deflate: &[Vec<Complex<T>>],
    opts: &LanczosOptions,
    stream: u64,
) -> Result<(T, Vec<Complex<T>>, T)> {
    let dim = h.dim();
    let mut v = start_vector::<T>(dim, opts.seed, stream);
    sector.project(&mut v);
    orthogonalize(&mut v, deflate.iter());
    if normalize(&mut v) < T::tol(1e-8) {
        bail!(Numerical, "Lanczos start vector vanished after projection");
    }
    let m = opts.krylov_dim.max(2);
    let mut last_residual = T::nan();
    for _ in 0..opts.max_restarts {
        let mut basis: Vec<Vec<Complex<T>>> = vec![v];
        let mut alpha: Vec<T> = Vec::with_capacity(m);
        let mut beta: Vec<T> = Vec::with_capacity(m);
        loop {
            let j = basis.len() - 1;
            let mut w = h.apply(&basis[j]);
            sector.project(&mut w);
            let a = inner(&basis[j], &w).re;
            axpy(&mut w, Complex::new(-a, T::zero()), &basis[j]);
            if j > 0 {
                axpy(&mut w, Complex::new(-beta[j - 1], T::zero()), &basis[j - 1]);
            }
            orthogonalize(&mut w, deflate.iter().chain(basis.iter()));
            alpha.push(a);
            let b = norm_sqr(&w).sqrt();
            if basis.len() == m || b <= T::tol(1e-12) * (T::one() + a.abs()) {
                break;
            }
            let inv = T::one() / b;
            w.iter_mut().for_each(|c| *c = c.scale(inv));
            beta.push(b);
            basis.push(w);
        }
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                T::zero()
            }
        });
        let (_, vectors) = sorted_eigen(t)?;
        let mut x = vec![Complex::new(T::zero(), T::zero()); dim];
        for (i, q) in basis.iter().enumerate() {
            axpy(&mut x, Complex::new(vectors[(i, 0)], T::zero()), q);
        }
        sector.project(&mut x);
        orthogonalize(&mut x, deflate.iter());
        normalize(&mut x);
        let hx = h.apply(&x);
        let energy = inner(&x, &hx).re;
        let mut r = hx;
        axpy(&mut r, Complex::new(-energy, T::zero()), &x);
        let residual = norm_sqr(&r).sqrt();
        let floor = T::default_epsilon() * T::lit(1e3) * (T::one() + energy.abs());
        let tol = T::tol(opts.tolerance).max(floor);
        if residual <= tol {
            return Ok((energy, x, residual));
        }
        last_residual = residual;
        v = x;
    }
    bail!(
        Numerical,
        "Lanczos did not converge after {} restarts (residual {last_residual:e})",
        opts.max_restarts
    )
}

pub fn ground_state<T: Real>(h: &Hamiltonian<T>, which: Which) -> Result<Vec<Eigenpair<T>>> {
    ground_state_with(h, which, &LanczosOptions::default())
}

/// Lowest one or two eigenpairs, energies ascending.
///
/// When H commutes with the global spin flip each parity sector is solved
/// separately, so nearly degenerate symmetric/antisymmetric doublets come
/// out as exact parity eigenstates instead of arbitrary mixtures.
pub fn ground_state_with<T: Real>(
    h: &Hamiltonian<T>,
    which: Which,
    opts: &LanczosOptions,
) -> Result<Vec<Eigenpair<T>>> {
    let count = which.count();
    let sectors: &[Sector] = if h.has_parity_symmetry() {
        &[Sector::Even, Sector::Odd]
    } else {
        &[Sector::Full]
    };
    let mut found: Vec<(T, Vec<Complex<T>>, T)> = Vec::new();
    for (s, &sector) in sectors.iter().enumerate() {
        let mut deflate: Vec<Vec<Complex<T>>> = Vec::new();
        for k in 0..count.min(sector.dim(h.dim())) {
            let (e, v, r) = lowest_in_sector(h, sector, &deflate, opts, (s * 16 + k) as u64)?;
            deflate.push(v.clone());
            found.push((e, v, r));
        }
    }
    if found.len() < count {
        bail!(Argument, "Hilbert space too small for {count} eigenpairs");
    }
    found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    found.truncate(count);
    Ok(found
        .into_iter()
        .map(|(energy, v, residual)| Eigenpair {
            energy,
            state: StateVector::from_raw(*h.lattice(), v),
            residual,
        })
        .collect())
}

const PROPAGATOR_MAX_KRYLOV: usize = 40;
const PROPAGATOR_TOLERANCE: f64 = 1e-10;

/// exp(−iHt)|v⟩ via a Lanczos approximation, with automatic time splitting
/// until the a-posteriori error estimate drops below 1e-10.
pub fn propagate<T: Real>(h: &Hamiltonian<T>, v: &[Complex<T>], t: T) -> Result<Vec<Complex<T>>> {
    propagate_split(h, v, t, 0)
}

fn propagate_split<T: Real>(
    h: &Hamiltonian<T>,
    v: &[Complex<T>],
    t: T,
    depth: usize,
) -> Result<Vec<Complex<T>>> {
    let beta0 = norm_sqr(v).sqrt();
    if beta0 == T::zero() || t == T::zero() {
        return Ok(v.to_vec());
    }
    let inv = T::one() / beta0;
    let mut basis: Vec<Vec<Complex<T>>> = vec![v.iter().map(|a| a.scale(inv)).collect()];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let tol = T::tol(PROPAGATOR_TOLERANCE);
    for j in 0..PROPAGATOR_MAX_KRYLOV {
        let mut w = h.apply(&basis[j]);
        let a = inner(&basis[j], &w).re;
        axpy(&mut w, Complex::new(-a, T::zero()), &basis[j]);
        if j > 0 {
            axpy(&mut w, Complex::new(-beta[j - 1], T::zero()), &basis[j - 1]);
        }
        orthogonalize(&mut w, basis.iter());
        alpha.push(a);
        let b = norm_sqr(&w).sqrt();
        let coeffs = tridiagonal_exp(&alpha, &beta, t)?;
        let estimate = b * coeffs[j].norm_sqr().sqrt();
        if estimate <= tol || b <= T::tol(1e-13) * (T::one() + a.abs()) {
            let mut out = vec![Complex::new(T::zero(), T::zero()); v.len()];
            for (c, q) in coeffs.iter().zip(&basis) {
                axpy(&mut out, c.scale(beta0), q);
            }
            return Ok(out);
        }
        let inv = T::one() / b;
        w.iter_mut().for_each(|c| *c = c.scale(inv));
        beta.push(b);
        basis.push(w);
    }
    if depth >= 24 {
        bail!(Numerical, "Krylov propagator failed to converge");
    }
    let half = t * T::lit(0.5);
    let mid = propagate_split(h, v, half, depth + 1)?;
    propagate_split(h, &mid, half, depth + 1)
}

/// First column of exp(−iTt) for the Lanczos tridiagonal T.
fn tridiagonal_exp<T: Real>(alpha: &[T], beta: &[T], t: T) -> Result<Vec<Complex<T>>> {
    let k = alpha.len();
    let m = DMatrix::from_fn(k, k, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            T::zero()
        }
    });
    let (values, vectors) = sorted_eigen(m)?;
    Ok((0..k)
        .map(|i| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (l, &lambda) in values.iter().enumerate() {
                let phase = -lambda * t;
                let w = vectors[(i, l)] * vectors[(0, l)];
                acc += Complex::new(phase.cos() * w, phase.sin() * w);
            }
            acc
        })
        .collect())
}
