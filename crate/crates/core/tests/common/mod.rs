//! Dense reference constructions shared by the integration tests.
#![allow(dead_code)]

use macrostab::qcore::{Axis, LatticeSpec, StateVector};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli2(axis: Axis) -> DMatrix<Complex64> {
    match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        Axis::Y => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    }
}

/// σ_axis on `site` of an n-site register where site k is bit k of the index.
pub fn dense_pauli(n: usize, site: usize, axis: Axis) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1., 0.));
    for k in (0..n).rev() {
        let factor = if k == site {
            pauli2(axis)
        } else {
            DMatrix::identity(2, 2)
        };
        m = m.kronecker(&factor);
    }
    m
}

fn bonds(n: usize, periodic: bool) -> Vec<(usize, usize)> {
    let mut b: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|k| (k, k + 1)).collect();
    if periodic && n >= 3 {
        b.push((n - 1, 0));
    }
    b
}

pub fn dense_tfim(n: usize, j: f64, h: f64, b: f64, periodic: bool) -> DMatrix<Complex64> {
    let d = 1 << n;
    let mut m = DMatrix::from_element(d, d, c(0., 0.));
    for (x, y) in bonds(n, periodic) {
        m -= dense_pauli(n, x, Axis::Z) * dense_pauli(n, y, Axis::Z) * c(j, 0.);
    }
    for x in 0..n {
        m -= dense_pauli(n, x, Axis::X) * c(h, 0.);
        m -= dense_pauli(n, x, Axis::Z) * c(b, 0.);
    }
    m
}

pub fn dense_xxz(
    n: usize,
    j: f64,
    delta: f64,
    h: f64,
    b: f64,
    periodic: bool,
) -> DMatrix<Complex64> {
    let d = 1 << n;
    let mut m = DMatrix::from_element(d, d, c(0., 0.));
    for (x, y) in bonds(n, periodic) {
        for (axis, w) in [(Axis::X, 1.0), (Axis::Y, 1.0), (Axis::Z, delta)] {
            m += dense_pauli(n, x, axis) * dense_pauli(n, y, axis) * c(j * w, 0.);
        }
    }
    for x in 0..n {
        m -= dense_pauli(n, x, Axis::X) * c(h, 0.);
        m -= dense_pauli(n, x, Axis::Z) * c(b, 0.);
    }
    m
}

/// Eigenvalues of a real-symmetric complex matrix, ascending.
pub fn real_spectrum(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<f64>) {
    let re = m.map(|z| z.re);
    assert!(m.iter().all(|z| z.im.abs() < 1e-14));
    let (rows, cols) = re.shape();
    let eig = re.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(rows, cols, |r, k| eig.eigenvectors[(r, idx[k])]);
    (values, vectors)
}

/// Deterministic pseudo-random normalized state.
pub fn random_state(lattice: LatticeSpec, seed: u64) -> StateVector<f64> {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let amps = (0..lattice.dim()).map(|_| c(next(), next())).collect();
    StateVector::from_amplitudes(lattice, amps)
        .unwrap()
        .normalized()
        .unwrap()
}

pub fn column(state: &StateVector<f64>) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(state.amplitudes())
}

/// ⟨ψ|M|ψ⟩ for a dense matrix.
pub fn dense_expectation(m: &DMatrix<Complex64>, state: &StateVector<f64>) -> Complex64 {
    let v = column(state);
    (v.adjoint() * m * &v)[(0, 0)]
}
