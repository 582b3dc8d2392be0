use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use super::lattice::LatticeSpec;
use crate::error::{bail, Result};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Unit vector along this axis in Pauli-coefficient space.
    pub fn unit<T: Real>(self) -> [T; 3] {
        let mut c = [T::zero(); 3];
        c[self.index()] = T::one();
        c
    }
}

impl FromStr for Axis {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(crate::Error::Argument(format!("unknown axis {other:?}"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

pub type Matrix2<T> = [[Complex<T>; 2]; 2];

pub fn pauli_matrix<T: Real>(axis: Axis) -> Matrix2<T> {
    let z = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    match axis {
        Axis::X => [[z, one], [one, z]],
        Axis::Y => [[z, -i], [i, z]],
        Axis::Z => [[one, z], [z, -one]],
    }
}

/// A Hermitian operator supported on a single site.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator<T> {
    site: usize,
    matrix: Matrix2<T>,
}

impl<T: Real> LocalOperator<T> {
    /// Wraps a 2×2 matrix, rejecting it unless it is Hermitian within 1e-12.
    pub fn new(site: usize, matrix: Matrix2<T>) -> Result<Self> {
        let tol = T::tol(1e-12);
        for (r, row) in matrix.iter().enumerate() {
            for (c, m) in row.iter().enumerate() {
                if !m.re.is_finite() || !m.im.is_finite() {
                    bail!(
                        Argument,
                        "non-finite entry in local operator at site {site}"
                    );
                }
                if (*m - matrix[c][r].conj()).norm_sqr().sqrt() > tol {
                    bail!(Argument, "local operator at site {site} is not Hermitian");
                }
            }
        }
        Ok(Self { site, matrix })
    }

    /// `identity·1 + c_x σ_x + c_y σ_y + c_z σ_z`, Hermitian by construction.
    pub fn from_pauli_coefficients(site: usize, identity: T, c: [T; 3]) -> Self {
        let matrix = [
            [
                Complex::new(identity + c[2], T::zero()),
                Complex::new(c[0], -c[1]),
            ],
            [
                Complex::new(c[0], c[1]),
                Complex::new(identity - c[2], T::zero()),
            ],
        ];
        Self { site, matrix }
    }

    pub fn zero(site: usize) -> Self {
        Self::from_pauli_coefficients(site, T::zero(), [T::zero(); 3])
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn matrix(&self) -> &Matrix2<T> {
        &self.matrix
    }

    /// Decomposes into `(identity, [c_x, c_y, c_z])` over {1, σ_x, σ_y, σ_z}.
    pub fn pauli_coefficients(&self) -> (T, [T; 3]) {
        let m = &self.matrix;
        let two = T::lit(2.0);
        let identity = (m[0][0].re + m[1][1].re) / two;
        let cz = (m[0][0].re - m[1][1].re) / two;
        let off = (m[0][1] + m[1][0].conj()) / Complex::new(two, T::zero());
        (identity, [off.re, -off.im, cz])
    }

    pub fn is_zero(&self) -> bool {
        self.matrix
            .iter()
            .flatten()
            .all(|m| m.re == T::zero() && m.im == T::zero())
    }

    /// Writes (op ⊗ 1)|amps⟩ into `out`.
    pub(crate) fn apply_into(&self, amps: &[Complex<T>], out: &mut [Complex<T>]) {
        let mask = 1usize << self.site;
        let m = &self.matrix;
        for i0 in 0..amps.len() {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let (a0, a1) = (amps[i0], amps[i1]);
            out[i0] = m[0][0] * a0 + m[0][1] * a1;
            out[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Adds (op ⊗ 1)|amps⟩ onto `out`.
    pub(crate) fn accumulate_into(&self, amps: &[Complex<T>], out: &mut [Complex<T>]) {
        let mask = 1usize << self.site;
        let m = &self.matrix;
        for i0 in 0..amps.len() {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let (a0, a1) = (amps[i0], amps[i1]);
            out[i0] += m[0][0] * a0 + m[0][1] * a1;
            out[i1] += m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

/// Pauli matrix σ^axis at `site`, checked against the lattice.
pub fn pauli<T: Real>(lattice: &LatticeSpec, site: usize, axis: Axis) -> Result<LocalOperator<T>> {
    lattice.check_site(site)?;
    Ok(LocalOperator {
        site,
        matrix: pauli_matrix(axis),
    })
}

/// Â = Σ_x â(x): exactly one single-site term per lattice site.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveOperator<T> {
    lattice: LatticeSpec,
    terms: Vec<LocalOperator<T>>,
}

impl<T: Real> AdditiveOperator<T> {
    /// Terms may come in any order but must cover every site exactly once.
    pub fn new(lattice: LatticeSpec, mut terms: Vec<LocalOperator<T>>) -> Result<Self> {
        if terms.len() != lattice.n_sites() {
            bail!(
                Argument,
                "additive operator needs {} terms, got {}",
                lattice.n_sites(),
                terms.len()
            );
        }
        terms.sort_by_key(|t| t.site);
        for (x, t) in terms.iter().enumerate() {
            if t.site != x {
                bail!(
                    Argument,
                    "additive operator terms must cover each site once (missing site {x})"
                );
            }
        }
        Ok(Self { lattice, terms })
    }

    /// Σ_x σ^axis(x), e.g. the order parameter M̂ = Σσ_z.
    pub fn uniform(lattice: LatticeSpec, axis: Axis) -> Self {
        let terms = (0..lattice.n_sites())
            .map(|x| LocalOperator::from_pauli_coefficients(x, T::zero(), axis.unit()))
            .collect();
        Self { lattice, terms }
    }

    /// Σ_{x,α} c[3x+α] σ^α(x).
    pub fn from_coefficients(lattice: LatticeSpec, coefficients: &[T]) -> Result<Self> {
        let n = lattice.n_sites();
        if coefficients.len() != 3 * n {
            bail!(
                Argument,
                "expected {} coefficients, got {}",
                3 * n,
                coefficients.len()
            );
        }
        let terms = coefficients
            .chunks_exact(3)
            .enumerate()
            .map(|(x, c)| LocalOperator::from_pauli_coefficients(x, T::zero(), [c[0], c[1], c[2]]))
            .collect();
        Ok(Self { lattice, terms })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn terms(&self) -> &[LocalOperator<T>] {
        &self.terms
    }
}
