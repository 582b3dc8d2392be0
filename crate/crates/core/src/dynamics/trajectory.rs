//! Stochastic pure-state trajectories under white local noise, their
//! ensemble averages and the initial decay rate of the fidelity.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use super::hamiltonian::Hamiltonian;
use super::krylov::propagate;
use super::noise::{NoiseModel, PreparedNoise};
use super::rng::NoiseStream;
use crate::error::{bail, Result};
use crate::numeric::{self, sorted_eigen, CompensatedSum};
use crate::qcore::{LatticeSpec, StateVector};
use crate::real::Real;

/// Largest lattice for which the ensemble density matrix is accumulated.
pub const DENSITY_MATRIX_MAX_SITES: usize = 8;
pub const MIN_TRAJECTORIES: usize = 100;
/// Fraction of the horizon used by the initial-slope fit.
pub const RATE_FIT_FRACTION: f64 = 0.05;
/// Contiguous trajectory batches used for the rate standard error.
pub const RATE_BATCHES: usize = 20;
/// Default number of steps per horizon.
pub const DEFAULT_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleConfig<T> {
    pub n_traj: usize,
    pub dt: T,
    pub horizon: T,
    pub seed: u64,
    /// Accumulate ρ̄ at the horizon (N ≤ 8 only).
    pub density_matrix: bool,
}

impl<T: Real> EnsembleConfig<T> {
    /// Horizon 1/(κ N λ_max) resolved into 200 steps.
    pub fn for_noise(noise: &PreparedNoise<T>, n_traj: usize, seed: u64) -> Result<Self> {
        let scale = noise.rate_scale();
        if scale <= T::zero() {
            bail!(
                Argument,
                "noise intensity is zero; give the horizon explicitly"
            );
        }
        let horizon = T::one() / scale;
        Ok(Self {
            n_traj,
            dt: horizon / T::lit(DEFAULT_STEPS as f64),
            horizon,
            seed,
            density_matrix: false,
        })
    }

    pub fn with_density_matrix(mut self, on: bool) -> Self {
        self.density_matrix = on;
        self
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt - T::lit(1e-9))
            .ceil()
            .to_usize()
            .unwrap_or(0)
    }
}

/// Noise-averaged density matrix ρ̄ in the computational basis.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Real> {
    lattice: LatticeSpec,
    entries: DMatrix<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn from_entries(lattice: LatticeSpec, entries: DMatrix<Complex<T>>) -> Result<Self> {
        if entries.nrows() != lattice.dim() || entries.ncols() != lattice.dim() {
            bail!(Argument, "density matrix must be {0}×{0}", lattice.dim());
        }
        Ok(Self { lattice, entries })
    }

    pub fn pure(state: &StateVector<T>) -> Self {
        let a = state.amplitudes();
        let entries = DMatrix::from_fn(a.len(), a.len(), |r, c| a[r] * a[c].conj());
        Self {
            lattice: *state.lattice(),
            entries,
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn trace(&self) -> T {
        numeric::compensated_sum((0..self.entries.nrows()).map(|i| self.entries[(i, i)].re))
    }

    /// Eigenvalues ascending, through the real symmetric embedding [[Re, −Im], [Im, Re]].
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let d = self.entries.nrows();
        let e = &self.entries;
        let real = DMatrix::from_fn(2 * d, 2 * d, |r, c| {
            let (rr, cc) = (r % d, c % d);
            let z = (e[(rr, cc)] + e[(cc, rr)].conj()).scale(T::lit(0.5));
            match (r < d, c < d) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let (values, _) = sorted_eigen(real)?;
        Ok(values.into_iter().step_by(2).collect())
    }

    /// Largest |ρ − ρ†| entry.
    pub fn hermiticity_error(&self) -> T {
        let e = &self.entries;
        let d = e.nrows();
        let mut worst = T::zero();
        for r in 0..d {
            for c in 0..d {
                worst = worst.max((e[(r, c)] - e[(c, r)].conj()).norm_sqr().sqrt());
            }
        }
        worst
    }

    /// Hermitian, unit trace within 1e-8 and eigenvalues ≥ −1e-6.
    pub fn check_invariants(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > T::tol(1e-10) {
            bail!(
                Consistency,
                "density matrix not Hermitian (error {:e})",
                herm.as_f64()
            );
        }
        let trace = self.trace();
        if (trace - T::one()).abs() > T::tol(1e-8) {
            bail!(Consistency, "density matrix trace {:e}", trace.as_f64());
        }
        let lowest = self.eigenvalues()?[0];
        if lowest < -T::lit(1e-6) {
            bail!(
                Consistency,
                "density matrix eigenvalue {:e}",
                lowest.as_f64()
            );
        }
        Ok(())
    }

    /// ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        if self.entries.shape() != other.entries.shape() {
            bail!(Argument, "density matrices of different dimension");
        }
        let diff = Self {
            lattice: self.lattice,
            entries: &self.entries - &other.entries,
        };
        let values = diff.eigenvalues()?;
        Ok(numeric::compensated_sum(values.iter().map(|v| v.abs())) * T::lit(0.5))
    }
}

/// Ensemble-averaged fidelity F(t) = ⟨ψ₀|ρ̄(t)|ψ₀⟩ on the time grid t_k = k·dt.
#[derive(Clone, Debug)]
pub struct NoisyEvolution<T: Real> {
    pub times: Vec<T>,
    pub fidelity_mean: Vec<T>,
    pub fidelity_stderr: Vec<T>,
    /// Largest |‖ψ‖² − 1| seen on any trajectory.
    pub max_norm_error: T,
    pub density_matrix: Option<DensityMatrix<T>>,
    /// Per-trajectory fidelities, trajectory-major.
    samples: Vec<Vec<T>>,
    horizon: T,
}

/// Weighted least-squares slope of −ln F through the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate<T> {
    pub gamma: T,
    /// Batch-means standard error.
    pub stderr: T,
    pub fit_points: usize,
    pub fit_window: T,
}

impl<T: Real> NoisyEvolution<T> {
    pub fn n_traj(&self) -> usize {
        self.samples.len()
    }

    /// CSV with columns `t,F_mean,F_stderr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,F_mean,F_stderr\n");
        for ((t, f), s) in self
            .times
            .iter()
            .zip(&self.fidelity_mean)
            .zip(&self.fidelity_stderr)
        {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e}",
                t.as_f64(),
                f.as_f64(),
                s.as_f64()
            );
        }
        out
    }

    /// Initial decay rate from −ln F over 0 < t ≤ 0.05·horizon.
    pub fn estimate_rate(&self) -> Result<RateEstimate<T>> {
        let window = self.horizon * T::lit(RATE_FIT_FRACTION);
        let idx: Vec<usize> = (1..self.times.len())
            .filter(|&k| self.times[k] <= window * (T::one() + T::lit(1e-9)))
            .collect();
        if idx.is_empty() {
            bail!(
                Argument,
                "time step too coarse: no samples inside the rate-fit window"
            );
        }
        let sigmas: Vec<T> = idx
            .iter()
            .map(|&k| self.fidelity_stderr[k] / self.fidelity_mean[k])
            .collect();
        let weights: Vec<T> = if sigmas.iter().all(|s| s.is_finite() && *s > T::zero()) {
            sigmas.iter().map(|s| T::one() / (*s * *s)).collect()
        } else {
            vec![T::one(); idx.len()]
        };
        let fit = |means: &[T]| -> Result<T> {
            let mut num = CompensatedSum::new();
            let mut den = CompensatedSum::new();
            for (w, &k) in weights.iter().zip(&idx) {
                if means[k] <= T::zero() {
                    bail!(
                        Numerical,
                        "fidelity reached zero inside the rate-fit window"
                    );
                }
                let t = self.times[k];
                num.add(*w * t * -means[k].ln());
                den.add(*w * t * t);
            }
            Ok(num.value() / den.value())
        };
        let gamma = fit(&self.fidelity_mean)?;
        let n = self.samples.len();
        let batches = RATE_BATCHES.min(n);
        let mut rates = Vec::with_capacity(batches);
        for b in 0..batches {
            let lo = b * n / batches;
            let hi = (b + 1) * n / batches;
            let means = mean_series(&self.samples[lo..hi], self.times.len());
            rates.push(fit(&means)?);
        }
        let stderr = if batches > 1 {
            let m = numeric::compensated_sum(rates.iter().copied()) / T::lit(batches as f64);
            let var = numeric::compensated_sum(rates.iter().map(|r| (*r - m) * (*r - m)))
                / T::lit((batches - 1) as f64);
            (var / T::lit(batches as f64)).sqrt()
        } else {
            T::nan()
        };
        Ok(RateEstimate {
            gamma,
            stderr,
            fit_points: idx.len(),
            fit_window: window,
        })
    }
}

fn mean_series<T: Real>(samples: &[Vec<T>], len: usize) -> Vec<T> {
    let n = T::lit(samples.len() as f64);
    (0..len)
        .map(|k| numeric::compensated_sum(samples.iter().map(|s| s[k])) / n)
        .collect()
}

/// Per-site data of exp(−iW â) = e^{−iW c₀} [cos(W|c|) − i sin(W|c|) ĉ·σ].
struct SiteRotation<T> {
    mask: usize,
    identity: T,
    length: T,
    axis: [T; 3],
}

impl<T: Real> SiteRotation<T> {
    fn apply(&self, w: T, amps: &mut [Complex<T>]) {
        let (c, s) = ((w * self.length).cos(), (w * self.length).sin());
        let phase = Complex::new((w * self.identity).cos(), -(w * self.identity).sin());
        let [nx, ny, nz] = self.axis;
        // −i s (ĉ·σ) with ĉ·σ = [[nz, nx − i ny], [nx + i ny, −nz]].
        let m00 = phase * Complex::new(c, -s * nz);
        let m11 = phase * Complex::new(c, s * nz);
        let m01 = phase * Complex::new(-s * ny, -s * nx);
        let m10 = phase * Complex::new(s * ny, -s * nx);
        for i in 0..amps.len() {
            if i & self.mask != 0 {
                continue;
            }
            let j = i | self.mask;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m00 * a + m01 * b;
            amps[j] = m10 * a + m11 * b;
        }
    }
}

/// Runs `n_traj` trajectories of dψ = −i (H dt + Σ_x dW_x â(x)) ψ.
///
/// With H present each step is the symmetric split e^{−iH dt/2} N e^{−iH dt/2};
/// the noise factor N = Π_x exp(−iW_x â(x)) is exact because operators on
/// distinct sites commute.
pub fn evolve_noisy<T: Real>(
    initial: &StateVector<T>,
    hamiltonian: Option<&Hamiltonian<T>>,
    noise: &NoiseModel<T>,
    config: &EnsembleConfig<T>,
) -> Result<NoisyEvolution<T>> {
    initial.check_normalized()?;
    let lattice = *initial.lattice();
    let n = lattice.n_sites();
    if let Some(h) = hamiltonian {
        if h.lattice().n_sites() != n {
            bail!(Argument, "Hamiltonian and state live on different lattices");
        }
    }
    if config.n_traj < MIN_TRAJECTORIES {
        bail!(
            Argument,
            "need at least {MIN_TRAJECTORIES} trajectories, got {}",
            config.n_traj
        );
    }
    if !config.dt.is_finite()
        || config.dt <= T::zero()
        || !config.horizon.is_finite()
        || config.horizon <= T::zero()
    {
        bail!(Argument, "dt and horizon must be finite and positive");
    }
    if config.density_matrix && n > DENSITY_MATRIX_MAX_SITES {
        bail!(
            Capability,
            "ensemble density matrix limited to {DENSITY_MATRIX_MAX_SITES} sites, got {n}"
        );
    }
    let prepared = noise.prepare(&lattice)?;
    let bound = prepared.max_step();
    if config.dt > bound * (T::one() + T::lit(1e-12)) {
        bail!(
            Argument,
            "dt = {:e} exceeds the stability bound 0.1/(κ N λ_max) = {:e}",
            config.dt.as_f64(),
            bound.as_f64()
        );
    }
    let steps = config.steps();
    if steps == 0 {
        bail!(Argument, "horizon shorter than one step");
    }

    let rotations: Vec<SiteRotation<T>> = prepared
        .operators()
        .iter()
        .map(|op| {
            let (identity, c) = op.pauli_coefficients();
            let length = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            let axis = if length > T::zero() {
                [c[0] / length, c[1] / length, c[2] / length]
            } else {
                [T::zero(); 3]
            };
            SiteRotation {
                mask: 1 << op.site(),
                identity,
                length,
                axis,
            }
        })
        .collect();
    let factor = prepared.sampling_factor();
    let sqrt_kappa_dt = (prepared.kappa() * config.dt).sqrt();
    let half = config.dt * T::lit(0.5);
    let psi0 = initial.amplitudes();

    let run = |traj: usize| -> Result<(Vec<T>, Option<Vec<Complex<T>>>, T)> {
        let mut stream = NoiseStream::new(config.seed, traj as u64, n);
        let mut z = vec![0.0; n];
        let mut w = vec![T::zero(); n];
        let mut psi = psi0.to_vec();
        let mut fid = Vec::with_capacity(steps + 1);
        fid.push(numeric::inner(psi0, &psi).norm_sqr());
        let mut norm_err = T::zero();
        for step in 0..steps {
            if let Some(h) = hamiltonian {
                psi = propagate(h, &psi, half)?;
            }
            if sqrt_kappa_dt > T::zero() {
                stream.normals(step as u64, &mut z);
                for (x, wx) in w.iter_mut().enumerate() {
                    *wx = sqrt_kappa_dt
                        * numeric::compensated_sum((0..n).map(|k| factor[(x, k)] * T::lit(z[k])));
                }
                for (rot, &wx) in rotations.iter().zip(&w) {
                    if rot.length > T::zero() || rot.identity != T::zero() {
                        rot.apply(wx, &mut psi);
                    }
                }
            }
            if let Some(h) = hamiltonian {
                psi = propagate(h, &psi, half)?;
            }
            norm_err = norm_err.max((numeric::norm_sqr(&psi) - T::one()).abs());
            fid.push(numeric::inner(psi0, &psi).norm_sqr());
        }
        Ok((fid, config.density_matrix.then_some(psi), norm_err))
    };
    let results: Vec<(Vec<T>, Option<Vec<Complex<T>>>, T)> = (0..config.n_traj)
        .into_par_iter()
        .map(run)
        .collect::<Result<_>>()?;

    let mut samples = Vec::with_capacity(results.len());
    let mut finals = Vec::new();
    let mut max_norm_error = T::zero();
    for (fid, last, err) in results {
        samples.push(fid);
        if let Some(v) = last {
            finals.push(v);
        }
        max_norm_error = max_norm_error.max(err);
    }
    let len = steps + 1;
    let fidelity_mean = mean_series(&samples, len);
    let count = T::lit(samples.len() as f64);
    let fidelity_stderr = (0..len)
        .map(|k| {
            let m = fidelity_mean[k];
            let ss = numeric::compensated_sum(samples.iter().map(|s| (s[k] - m) * (s[k] - m)));
            (ss / (count - T::one()) / count).sqrt()
        })
        .collect();
    let density_matrix = if config.density_matrix {
        let d = lattice.dim();
        let mut rho = DMatrix::from_element(d, d, Complex::new(T::zero(), T::zero()));
        let inv = T::one() / count;
        for v in &finals {
            for c in 0..d {
                let vc = v[c].conj().scale(inv);
                for r in 0..d {
                    rho[(r, c)] += v[r] * vc;
                }
            }
        }
        Some(DensityMatrix {
            lattice,
            entries: rho,
        })
    } else {
        None
    };
    Ok(NoisyEvolution {
        times: (0..len).map(|k| config.dt * T::lit(k as f64)).collect(),
        fidelity_mean,
        fidelity_stderr,
        max_norm_error,
        density_matrix,
        samples,
        horizon: config.horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian::{build_hamiltonian, HamiltonianSpec};
    use crate::dynamics::noise::{analytic_dephasing_rate, Kernel};
    use crate::qcore::{make_ghz, make_uniform_product_state, Axis};

    fn chain(n: usize) -> LatticeSpec {
        LatticeSpec::open(n).unwrap()
    }

    #[test]
    fn no_noise_no_decay() {
        let ghz = make_ghz::<f64>(chain(4)).unwrap();
        let noise = NoiseModel::axis(Axis::Z, 0.0, Kernel::Collective);
        let cfg = EnsembleConfig {
            n_traj: 100,
            dt: 0.1,
            horizon: 2.0,
            seed: 1,
            density_matrix: true,
        };
        let ev = evolve_noisy(&ghz, None, &noise, &cfg).unwrap();
        assert!(ev.fidelity_mean.iter().all(|f| (f - 1.0).abs() < 1e-9));
        let rate = ev.estimate_rate().unwrap();
        assert!(rate.gamma.abs() < 1e-12);
    }

    #[test]
    fn preconditions() {
        let ghz = make_ghz::<f64>(chain(4)).unwrap();
        let noise = NoiseModel::axis(Axis::Z, 1.0, Kernel::Collective);
        let mut cfg =
            EnsembleConfig::for_noise(&noise.prepare(&chain(4)).unwrap(), 100, 0).unwrap();
        cfg.dt *= 30.0;
        assert!(matches!(
            evolve_noisy(&ghz, None, &noise, &cfg),
            Err(crate::Error::Argument(_))
        ));
        cfg.dt /= 30.0;
        cfg.n_traj = 99;
        assert!(matches!(
            evolve_noisy(&ghz, None, &noise, &cfg),
            Err(crate::Error::Argument(_))
        ));
        let big = make_ghz::<f64>(chain(9)).unwrap();
        let cfg = EnsembleConfig::for_noise(&noise.prepare(&chain(9)).unwrap(), 100, 0)
            .unwrap()
            .with_density_matrix(true);
        assert!(matches!(
            evolve_noisy(&big, None, &noise, &cfg),
            Err(crate::Error::Capability(_))
        ));
    }

    #[test]
    fn rate_matches_analytic_for_plus_state() {
        let plus =
            make_uniform_product_state::<f64>(chain(4), std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let noise = NoiseModel::axis(Axis::Z, 0.05, Kernel::Exponential { xi: 1.0 });
        let cfg = EnsembleConfig::for_noise(&noise.prepare(&chain(4)).unwrap(), 1000, 11).unwrap();
        let ev = evolve_noisy(&plus, None, &noise, &cfg).unwrap();
        let rate = ev.estimate_rate().unwrap();
        let exact = analytic_dephasing_rate(&plus, &noise).unwrap();
        assert!(
            (rate.gamma - exact).abs() <= 3.0 * rate.stderr + 0.05 * exact,
            "{rate:?} vs {exact}"
        );
    }

    #[test]
    fn hamiltonian_runs_are_unitary_and_deterministic() {
        let lattice = chain(5);
        let h = build_hamiltonian(&HamiltonianSpec::<f64>::transverse_ising(lattice, 1.0, 0.5))
            .unwrap();
        let ghz = make_ghz::<f64>(lattice).unwrap();
        let noise = NoiseModel::axis(Axis::X, 0.02, Kernel::Independent);
        let cfg = EnsembleConfig::for_noise(&noise.prepare(&lattice).unwrap(), 100, 5)
            .unwrap()
            .with_density_matrix(true);
        let a = evolve_noisy(&ghz, Some(&h), &noise, &cfg).unwrap();
        let b = evolve_noisy(&ghz, Some(&h), &noise, &cfg).unwrap();
        assert_eq!(a.fidelity_mean, b.fidelity_mean);
        assert!(a.max_norm_error < 1e-8);
        a.density_matrix.unwrap().check_invariants().unwrap();
    }
}
