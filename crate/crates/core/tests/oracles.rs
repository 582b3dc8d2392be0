//! Cross-checks of the matrix-free kernels against dense linear algebra and
//! closed forms computed independently here.

mod common;

use common::*;
use macrostab::cluster::{correlation_field, normalized_correlation};
use macrostab::dynamics::*;
use macrostab::measure::{conditional_distribution, measure_local};
use macrostab::qcore::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[test]
fn tfim_ground_energies_match_dense_diagonalization() {
    for n in 2..=8 {
        for &(j, h) in &[(1.0, 0.1), (1.0, 1.0), (0.7, 2.0), (-1.0, 0.5)] {
            for periodic in [false, true] {
                let lattice = if periodic {
                    LatticeSpec::periodic(n)
                } else {
                    LatticeSpec::open(n)
                }
                .unwrap();
                let ham =
                    build_hamiltonian(&HamiltonianSpec::transverse_ising(lattice, j, h)).unwrap();
                let pairs = ground_state(&ham, Which::LowestTwo).unwrap();
                let (dense, _) = real_spectrum(&dense_tfim(n, j, h, 0.0, periodic));
                assert!(
                    (pairs[0].energy - dense[0]).abs() < 1e-8,
                    "N={n} J={j} h={h}"
                );
                assert!(
                    (pairs[1].energy - dense[1]).abs() < 1e-8,
                    "N={n} J={j} h={h}"
                );
                assert!(pairs.iter().all(|p| p.residual <= 1e-9));
            }
        }
    }
}

#[test]
fn xxz_with_fields_matches_dense_diagonalization() {
    for n in 2..=7 {
        for &(j, delta, h, b) in &[
            (1.0, 1.0, 0.0, 0.0),
            (0.5, -0.3, 0.2, 0.1),
            (1.0, 2.0, 0.0, 0.05),
        ] {
            let lattice = LatticeSpec::open(n).unwrap();
            let mut spec = HamiltonianSpec::xxz(lattice, j, delta).with_field(b);
            spec.h = h;
            let ham = build_hamiltonian(&spec).unwrap();
            let gs = ground_state(&ham, Which::Lowest).unwrap();
            let (dense, _) = real_spectrum(&dense_xxz(n, j, delta, h, b, false));
            assert!(
                (gs[0].energy - dense[0]).abs() < 1e-8,
                "N={n} J={j} Δ={delta}"
            );
        }
    }
}

#[test]
fn matvec_matches_dense_matrix() {
    let n = 5;
    let lattice = LatticeSpec::periodic(n).unwrap();
    let mut spec = HamiltonianSpec::xxz(lattice, 0.8, 1.7).with_field(-0.3);
    spec.h = 0.6;
    let ham = build_hamiltonian(&spec).unwrap();
    let dense = dense_xxz(n, 0.8, 1.7, 0.6, -0.3, true);
    let psi = random_state(lattice, 3);
    let expected = &dense * column(&psi);
    let got = ham.apply(psi.amplitudes());
    for (a, b) in got.iter().zip(expected.iter()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn propagator_matches_dense_exponential() {
    let n = 6;
    let lattice = LatticeSpec::open(n).unwrap();
    let ham =
        build_hamiltonian(&HamiltonianSpec::transverse_ising(lattice, 1.0, 0.8).with_field(0.2))
            .unwrap();
    let (values, vectors) = real_spectrum(&dense_tfim(n, 1.0, 0.8, 0.2, false));
    let psi = random_state(lattice, 9);
    for t in [0.01, 0.5, 4.0] {
        let vc = vectors.map(|x| Complex64::new(x, 0.0));
        let phases = DVector::from_iterator(
            values.len(),
            values.iter().map(|e| Complex64::from_polar(1.0, -e * t)),
        );
        let coeffs = vc.adjoint() * column(&psi);
        let expected = &vc * coeffs.component_mul(&phases);
        let got = propagate(&ham, psi.amplitudes(), t).unwrap();
        let err: f64 = got
            .iter()
            .zip(expected.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-9, "t={t}: {err:e}");
    }
}

/// Brute-force sup over directions u, v of |uᵀ C_xy v| / √(uᵀC_xx u · vᵀC_yy v),
/// with all moments computed from dense Pauli matrices.
fn brute_force_rho(state: &StateVector<f64>, x: usize, y: usize) -> f64 {
    let n = state.n_sites();
    let px: Vec<_> = Axis::ALL.iter().map(|&a| dense_pauli(n, x, a)).collect();
    let py: Vec<_> = Axis::ALL.iter().map(|&a| dense_pauli(n, y, a)).collect();
    let mean = |m: &DMatrix<Complex64>| dense_expectation(m, state).re;
    let cov = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| {
        let sym = (a * b + b * a) * Complex64::new(0.5, 0.0);
        mean(&sym) - mean(a) * mean(b)
    };
    let cxx = DMatrix::from_fn(3, 3, |i, j| cov(&px[i], &px[j]));
    let cyy = DMatrix::from_fn(3, 3, |i, j| cov(&py[i], &py[j]));
    let cxy = DMatrix::from_fn(3, 3, |i, j| cov(&px[i], &py[j]));
    let dir =
        |t: f64, p: f64| DVector::from_vec(vec![t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]);
    let value = |q: &[f64; 4]| {
        let (u, v) = (dir(q[0], q[1]), dir(q[2], q[3]));
        let num = (u.transpose() * &cxy * &v)[(0, 0)].abs();
        let den =
            ((u.transpose() * &cxx * &u)[(0, 0)] * (v.transpose() * &cyy * &v)[(0, 0)]).sqrt();
        if den > 1e-12 {
            num / den
        } else {
            0.0
        }
    };
    let steps = 10;
    let mut best = (0.0, [0.0; 4]);
    for a in 0..steps {
        for b in 0..steps {
            for c in 0..steps {
                for d in 0..steps {
                    let q = [
                        std::f64::consts::PI * (a as f64 + 0.5) / steps as f64,
                        std::f64::consts::TAU * b as f64 / steps as f64,
                        std::f64::consts::PI * (c as f64 + 0.5) / steps as f64,
                        std::f64::consts::TAU * d as f64 / steps as f64,
                    ];
                    let v = value(&q);
                    if v > best.0 {
                        best = (v, q);
                    }
                }
            }
        }
    }
    let mut step = 0.3;
    while step > 1e-9 {
        let mut moved = false;
        for k in 0..4 {
            for s in [1.0, -1.0] {
                let mut q = best.1;
                q[k] += s * step;
                let v = value(&q);
                if v > best.0 {
                    best = (v, q);
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best.0
}

#[test]
fn w_state_correlation_matches_brute_force_scan() {
    let lattice = LatticeSpec::open(3).unwrap();
    let w = make_w::<f64>(lattice).unwrap();
    let field = correlation_field(&w).unwrap();
    let rho01 = field.rho(0, 1);
    assert!(rho01 > 0.0 && rho01 < 1.0);
    for (x, y) in [(0, 1), (0, 2), (1, 2)] {
        assert!((field.rho(x, y) - rho01).abs() < 1e-12);
    }
    let brute = brute_force_rho(&w, 0, 1);
    assert!((brute - rho01).abs() < 1e-6, "{brute} vs {rho01}");
}

#[test]
fn random_state_correlation_matches_brute_force_scan() {
    let lattice = LatticeSpec::open(3).unwrap();
    let psi = random_state(lattice, 21);
    let lib = normalized_correlation(&psi, 0, 2).unwrap();
    let brute = brute_force_rho(&psi, 0, 2);
    assert!((brute - lib).abs() < 1e-6, "{brute} vs {lib}");
}

/// ρ_ij(t) = ρ_ij(0)·exp(−(κt/2) Σ_xy g_xy Δ_x Δ_y) with Δ_x = s_i(x) − s_j(x).
fn dephasing_channel(
    state: &StateVector<f64>,
    g: &DMatrix<f64>,
    kappa: f64,
    t: f64,
) -> DMatrix<Complex64> {
    let n = state.n_sites();
    let a = state.amplitudes();
    let spin = |i: usize, x: usize| if i >> x & 1 == 0 { 1.0 } else { -1.0 };
    DMatrix::from_fn(a.len(), a.len(), |i, j| {
        let mut q = 0.0;
        for x in 0..n {
            for y in 0..n {
                q += g[(x, y)] * (spin(i, x) - spin(j, x)) * (spin(i, y) - spin(j, y));
            }
        }
        a[i] * a[j].conj() * (-0.5 * kappa * t * q).exp()
    })
}

#[test]
fn ensemble_matches_closed_form_dephasing_for_correlated_kernel() {
    let lattice = LatticeSpec::open(3).unwrap();
    let psi = make_uniform_product_state::<f64>(lattice, 1.1, 0.4).unwrap();
    let noise = NoiseModel::axis(Axis::Z, 0.5, Kernel::Exponential { xi: 1.0 });
    let prepared = noise.prepare(&lattice).unwrap();
    let dt = prepared.max_step();
    let cfg = EnsembleConfig {
        n_traj: 2000,
        dt,
        horizon: 10.0 * dt,
        seed: 4,
        density_matrix: true,
    };
    let ev = evolve_noisy(&psi, None, &noise, &cfg).unwrap();
    let rho = ev.density_matrix.unwrap();
    rho.check_invariants().unwrap();
    let exact = dephasing_channel(&psi, prepared.kernel_matrix(), 0.5, cfg.horizon);
    let exact = DensityMatrix::from_entries(lattice, exact).unwrap();
    let distance = rho.trace_distance(&exact).unwrap();
    assert!(distance < 0.03, "trace distance {distance}");
}

#[test]
fn moment_formula_matches_explicit_projection() {
    let lattice = LatticeSpec::open(4).unwrap();
    let psi = random_state(lattice, 77);
    let cov = macrostab::analyzer::covariance_matrix(&psi).unwrap();
    let dirs = [
        [0.0, 0.0, 1.0],
        [0.6, 0.0, 0.8],
        [0.48, 0.6, 0.64],
        [-1.0, 0.0, 0.0],
    ];
    for (x, y) in [(0, 3), (2, 1)] {
        let m = macrostab::measure::TwoSiteMoments::from_covariance(&cov, x, y);
        for na in &dirs {
            for nb in &dirs {
                let a = LocalOperator::from_pauli_coefficients(x, 0.0, *na);
                let b = LocalOperator::from_pauli_coefficients(y, 0.0, *nb);
                let table = conditional_distribution(&psi, &a, &b).unwrap();
                let via_moments = m.deviation(na, nb, 0.0).unwrap();
                let k = if via_moments.a == 1 { 0 } else { 1 };
                let explicit = table.p_b_given_a[k].unwrap()[0];
                assert!((explicit - via_moments.p_b_given_a).abs() < 1e-10);
                assert!((table.p_b[0] - via_moments.p_b).abs() < 1e-10);
                let pa = measure_local(&psi, &a).unwrap().probabilities[k];
                assert!((pa - via_moments.p_a).abs() < 1e-10);
            }
        }
    }
}
