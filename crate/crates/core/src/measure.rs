//! Ideal local measurements and stability against them.
//!
//! For two sites measured with no evolution in between, every conditional
//! probability follows from the Bloch vectors r_x, r_y and the two-point
//! tensor T_αβ = ⟨σ_α(x) σ_β(y)⟩. For outcomes s, t = ±1 of n_a·σ(x) and
//! n_b·σ(y):
//!
//! P(s, t) = ¼ (1 + s n_a·r_x + t n_b·r_y + s t n_aᵀ T n_b).
//!
//! The stability sweep maximizes |P(b;a) − P(b)| over directions with a
//! fixed 26-direction grid followed by a pattern search.

use std::fmt::Write as _;

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::analyzer::{covariance_matrix, max_additive_fluctuation, CovarianceMatrix};
use crate::error::{bail, Result};
use crate::numeric;
use crate::qcore::{LocalOperator, Observable, StateVector};
use crate::real::Real;

/// Default conditioning floor ε̄ on P(a).
pub const DEFAULT_CONDITIONING_FLOOR: f64 = 0.05;
/// Outcomes rarer than this get no post-measurement state.
pub const POST_STATE_MIN_PROBABILITY: f64 = 1e-12;
/// Identifies the direction grid and refinement schedule used by [`stability_test`].
pub const SEARCH_VERSION: &str = "cube26+pattern(0.25..1e-6)/v1";

const SEARCH_INITIAL_STEP: f64 = 0.25;
const SEARCH_MIN_STEP: f64 = 1e-6;
const SEARCH_MAX_ITERATIONS: usize = 20_000;

#[derive(Clone, Debug)]
pub struct MeasurementOutcome<T: Real> {
    pub observable: LocalOperator<T>,
    /// (a₊, a₋), a₊ > a₋.
    pub eigenvalues: [T; 2],
    pub probabilities: [T; 2],
    /// Normalized Π_a ψ / √P(a), absent when P(a) < 1e-12.
    pub post_states: [Option<StateVector<T>>; 2],
}

/// Eigenvalues and unit axis of a non-degenerate 2×2 observable.
fn spectral_axis<T: Real>(obs: &LocalOperator<T>) -> Result<([T; 2], [T; 3])> {
    let (c0, c) = obs.pauli_coefficients();
    let len = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    if len <= T::tol(1e-12) * (T::one() + c0.abs()) {
        bail!(
            Argument,
            "observable on site {} has a degenerate spectrum",
            obs.site()
        );
    }
    Ok(([c0 + len, c0 - len], [c[0] / len, c[1] / len, c[2] / len]))
}

/// Projector (1 ± n̂·σ)/2 on the observable's site.
fn projector<T: Real>(site: usize, axis: [T; 3], sign: T) -> LocalOperator<T> {
    let h = T::lit(0.5) * sign;
    LocalOperator::from_pauli_coefficients(
        site,
        T::lit(0.5),
        [h * axis[0], h * axis[1], h * axis[2]],
    )
}

pub fn measure_local<T: Real>(
    state: &StateVector<T>,
    obs: &LocalOperator<T>,
) -> Result<MeasurementOutcome<T>> {
    state.check_normalized()?;
    state.lattice().check_site(obs.site())?;
    let (eigenvalues, axis) = spectral_axis(obs)?;
    let mut probabilities = [T::zero(); 2];
    let mut post_states = [None, None];
    for (k, sign) in [T::one(), -T::one()].into_iter().enumerate() {
        let image = projector(obs.site(), axis, sign).apply(state)?;
        let p = numeric::norm_sqr(&image);
        probabilities[k] = p;
        if p >= T::lit(POST_STATE_MIN_PROBABILITY) {
            let inv = T::one() / p.sqrt();
            let amps = image.into_iter().map(|a| a.scale(inv)).collect();
            post_states[k] = Some(StateVector::from_amplitudes(*state.lattice(), amps)?);
        }
    }
    Ok(MeasurementOutcome {
        observable: obs.clone(),
        eigenvalues,
        probabilities,
        post_states,
    })
}

/// P(b) and P(b;a) for sequential measurements at t_b − t_a → 0.
#[derive(Clone, Debug)]
pub struct ConditionalTable<T> {
    pub a_eigenvalues: [T; 2],
    pub b_eigenvalues: [T; 2],
    pub p_a: [T; 2],
    pub p_b: [T; 2],
    /// Row per outcome a; `None` when P(a) is too small to condition on.
    pub p_b_given_a: [Option<[T; 2]>; 2],
}

pub fn conditional_distribution<T: Real>(
    state: &StateVector<T>,
    a_obs: &LocalOperator<T>,
    b_obs: &LocalOperator<T>,
) -> Result<ConditionalTable<T>> {
    if a_obs.site() == b_obs.site() {
        bail!(
            Argument,
            "conditional distribution needs two distinct sites"
        );
    }
    let a = measure_local(state, a_obs)?;
    let b = measure_local(state, b_obs)?;
    let mut p_b_given_a = [None, None];
    for (k, post) in a.post_states.iter().enumerate() {
        if let Some(post) = post {
            p_b_given_a[k] = Some(measure_local(post, b_obs)?.probabilities);
        }
    }
    Ok(ConditionalTable {
        a_eigenvalues: a.eigenvalues,
        b_eigenvalues: b.eigenvalues,
        p_a: a.probabilities,
        p_b: b.probabilities,
        p_b_given_a,
    })
}

/// Single- and two-site Pauli moments of a state (or mixture) on a pair of sites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSiteMoments<T: Real> {
    pub r_x: [T; 3],
    pub r_y: [T; 3],
    /// T_αβ = ⟨σ_α(x) σ_β(y)⟩.
    pub t: Matrix3<T>,
}

impl<T: Real> TwoSiteMoments<T> {
    pub fn from_covariance(cov: &CovarianceMatrix<T>, x: usize, y: usize) -> Self {
        let r_x = cov.bloch(x);
        let r_y = cov.bloch(y);
        let t = Matrix3::from_fn(|a, b| cov.block(x, y)[(a, b)] + r_x[a] * r_y[b]);
        Self { r_x, r_y, t }
    }

    /// Convex combination Σ w_k m_k.
    pub fn mix(parts: &[(T, Self)]) -> Self {
        let mut out = Self {
            r_x: [T::zero(); 3],
            r_y: [T::zero(); 3],
            t: Matrix3::zeros(),
        };
        for (w, m) in parts {
            for a in 0..3 {
                out.r_x[a] += *w * m.r_x[a];
                out.r_y[a] += *w * m.r_y[a];
            }
            out.t += m.t * *w;
        }
        out
    }

    /// Best conditioning outcome for measuring n_a·σ(x) then n_b·σ(y); `None` when no
    /// outcome of a has probability ≥ `floor`.
    pub fn deviation(&self, n_a: &[T; 3], n_b: &[T; 3], floor: T) -> Option<Conditional<T>> {
        let dot = |u: &[T; 3], v: &[T; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let ma = dot(n_a, &self.r_x);
        let mb = dot(n_b, &self.r_y);
        let mut tn = [T::zero(); 3];
        for (a, v) in tn.iter_mut().enumerate() {
            *v = self.t[(a, 0)] * n_b[0] + self.t[(a, 1)] * n_b[1] + self.t[(a, 2)] * n_b[2];
        }
        let corr = dot(n_a, &tn);
        let quarter = T::lit(0.25);
        let half = T::lit(0.5);
        let p_b = half * (T::one() + mb);
        let mut best: Option<Conditional<T>> = None;
        for s in [1i8, -1] {
            let sv = T::lit(s as f64);
            let p_a = half * (T::one() + sv * ma);
            if p_a < floor || p_a <= T::zero() {
                continue;
            }
            let joint = quarter * (T::one() + sv * ma + mb + sv * corr);
            let p_b_given_a = (joint / p_a).max(T::zero()).min(T::one());
            let deviation = (p_b_given_a - p_b).abs();
            if best.is_none_or(|b| deviation > b.deviation) {
                best = Some(Conditional {
                    a: s,
                    p_a,
                    p_b_given_a,
                    p_b,
                    deviation,
                });
            }
        }
        best
    }
}

/// Outcome a = ±1 and the b = +1 probabilities it produces. For two outcomes
/// the deviation is the same for b = −1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conditional<T> {
    pub a: i8,
    pub p_a: T,
    pub p_b_given_a: T,
    pub p_b: T,
    pub deviation: T,
}

/// The 26 normalized vectors (i, j, k) ∈ {−1, 0, 1}³ \ {0} in lexicographic order.
pub fn direction_grid<T: Real>() -> Vec<[T; 3]> {
    let mut out = Vec::with_capacity(26);
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            for k in -1i32..=1 {
                if (i, j, k) == (0, 0, 0) {
                    continue;
                }
                let len = ((i * i + j * j + k * k) as f64).sqrt();
                out.push([
                    T::lit(i as f64 / len),
                    T::lit(j as f64 / len),
                    T::lit(k as f64 / len),
                ]);
            }
        }
    }
    out
}

fn to_angles<T: Real>(n: &[T; 3]) -> (T, T) {
    let z = n[2].max(-T::one()).min(T::one());
    (z.acos(), n[1].atan2(n[0]))
}

fn from_angles<T: Real>(theta: T, phi: T) -> [T; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDeviation<T> {
    /// Site of the conditioning measurement a.
    pub x: usize,
    pub y: usize,
    pub distance: usize,
    /// Grid indices the refinement started from.
    pub grid_a: usize,
    pub grid_b: usize,
    pub direction_a: [T; 3],
    pub direction_b: [T; 3],
    pub a: i8,
    pub b: i8,
    pub p_a: T,
    pub p_b_given_a: T,
    pub p_b: T,
    pub deviation: T,
}

#[derive(Clone, Debug)]
pub struct MeasurementStabilityReport<T> {
    pub n_sites: usize,
    pub epsilon: T,
    pub varepsilon: T,
    pub min_distance: usize,
    /// Ordered pairs (x, y), lexicographic.
    pub pairs: Vec<PairDeviation<T>>,
    /// (distance, largest deviation at that distance), ascending distance.
    pub max_deviation_at_distance: Vec<(usize, T)>,
    pub max_deviation: T,
    pub stable: bool,
    pub search: &'static str,
}

impl<T: Real> MeasurementStabilityReport<T> {
    /// Pair with the largest deviation (first in (x, y) order on ties).
    pub fn worst_pair(&self) -> Option<&PairDeviation<T>> {
        let mut best: Option<&PairDeviation<T>> = None;
        for p in &self.pairs {
            if best.is_none_or(|b| p.deviation > b.deviation) {
                best = Some(p);
            }
        }
        best
    }

    /// CSV with one row per pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,dir_a,dir_b,a,b,P_b_given_a,P_b,deviation\n");
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.17e},{:.17e},{:.17e}",
                p.x,
                p.y,
                p.grid_a,
                p.grid_b,
                p.a,
                p.b,
                p.p_b_given_a.as_f64(),
                p.p_b.as_f64(),
                p.deviation.as_f64()
            );
        }
        out
    }
}

/// Maximizes the deviation for one ordered pair. Returns `None` when no outcome
/// of any tried direction passes the conditioning floor.
pub fn maximize_pair<T: Real>(
    m: &TwoSiteMoments<T>,
    floor: T,
) -> Option<(usize, usize, [T; 3], [T; 3], Conditional<T>)> {
    let grid = direction_grid::<T>();
    let mut start: Option<(usize, usize, Conditional<T>)> = None;
    for (ia, na) in grid.iter().enumerate() {
        for (ib, nb) in grid.iter().enumerate() {
            if let Some(c) = m.deviation(na, nb, floor) {
                if start.is_none_or(|(_, _, b)| c.deviation > b.deviation) {
                    start = Some((ia, ib, c));
                }
            }
        }
    }
    let (ia, ib, mut best) = start?;
    let (ta, pa) = to_angles(&grid[ia]);
    let (tb, pb) = to_angles(&grid[ib]);
    let mut p = [ta, pa, tb, pb];
    let mut step = T::lit(SEARCH_INITIAL_STEP);
    let min_step = T::lit(SEARCH_MIN_STEP);
    let mut iterations = 0;
    while step >= min_step && iterations < SEARCH_MAX_ITERATIONS {
        iterations += 1;
        let mut improved = false;
        for coord in 0..4 {
            for sign in [T::one(), -T::one()] {
                let mut q = p;
                q[coord] += sign * step;
                let na = from_angles(q[0], q[1]);
                let nb = from_angles(q[2], q[3]);
                if let Some(c) = m.deviation(&na, &nb, floor) {
                    if c.deviation > best.deviation {
                        best = c;
                        p = q;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= T::lit(0.5);
        }
    }
    Some((
        ia,
        ib,
        from_angles(p[0], p[1]),
        from_angles(p[2], p[3]),
        best,
    ))
}

fn check_parameters<T: Real>(
    n: usize,
    epsilon: T,
    varepsilon: T,
    min_distance: usize,
) -> Result<()> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        bail!(Argument, "epsilon must lie in (0, 1)");
    }
    if !(varepsilon > T::zero() && varepsilon < T::one()) {
        bail!(Argument, "conditioning floor must lie in (0, 1)");
    }
    if min_distance >= n {
        bail!(
            Argument,
            "min_distance {min_distance} must be smaller than N = {n}"
        );
    }
    Ok(())
}

fn sweep<T: Real>(
    lattice: &crate::qcore::LatticeSpec,
    moments: impl Fn(usize, usize) -> TwoSiteMoments<T> + Sync,
    epsilon: T,
    varepsilon: T,
    min_distance: usize,
) -> Result<MeasurementStabilityReport<T>> {
    let n = lattice.n_sites();
    check_parameters(n, epsilon, varepsilon, min_distance)?;
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| x != y && lattice.distance(x, y) >= min_distance.max(1))
        .collect();
    if candidates.is_empty() {
        bail!(
            Argument,
            "no site pairs at distance ≥ {min_distance} on this lattice"
        );
    }
    let pairs: Vec<PairDeviation<T>> = candidates
        .par_iter()
        .filter_map(|&(x, y)| {
            let m = moments(x, y);
            maximize_pair(&m, varepsilon).map(|(grid_a, grid_b, direction_a, direction_b, c)| {
                PairDeviation {
                    x,
                    y,
                    distance: lattice.distance(x, y),
                    grid_a,
                    grid_b,
                    direction_a,
                    direction_b,
                    a: c.a,
                    b: 1,
                    p_a: c.p_a,
                    p_b_given_a: c.p_b_given_a,
                    p_b: c.p_b,
                    deviation: c.deviation,
                }
            })
        })
        .collect();
    if pairs.is_empty() {
        bail!(
            Argument,
            "no outcome passes the conditioning floor {:e}",
            varepsilon.as_f64()
        );
    }
    let mut by_distance: Vec<(usize, T)> = Vec::new();
    for p in &pairs {
        match by_distance.iter_mut().find(|(d, _)| *d == p.distance) {
            Some(entry) => entry.1 = entry.1.max(p.deviation),
            None => by_distance.push((p.distance, p.deviation)),
        }
    }
    by_distance.sort_by_key(|(d, _)| *d);
    let max_deviation = pairs.iter().fold(T::zero(), |m, p| m.max(p.deviation));
    Ok(MeasurementStabilityReport {
        n_sites: n,
        epsilon,
        varepsilon,
        min_distance,
        pairs,
        max_deviation_at_distance: by_distance,
        max_deviation,
        stable: max_deviation <= epsilon,
        search: SEARCH_VERSION,
    })
}

/// Sweeps every ordered pair at distance ≥ `min_distance`; stable iff the largest
/// deviation found is ≤ `epsilon`. The search value is a lower bound on the true supremum.
pub fn stability_test<T: Real>(
    state: &StateVector<T>,
    epsilon: T,
    varepsilon: T,
    min_distance: usize,
) -> Result<MeasurementStabilityReport<T>> {
    check_parameters(state.n_sites(), epsilon, varepsilon, min_distance)?;
    let cov = covariance_matrix(state)?;
    sweep(
        state.lattice(),
        |x, y| TwoSiteMoments::from_covariance(&cov, x, y),
        epsilon,
        varepsilon,
        min_distance,
    )
}

/// [`stability_test`] for the mixture Σ_k w_k |ψ_k⟩⟨ψ_k|.
pub fn stability_test_mixture<T: Real>(
    components: &[(T, &StateVector<T>)],
    epsilon: T,
    varepsilon: T,
    min_distance: usize,
) -> Result<MeasurementStabilityReport<T>> {
    let Some((_, first)) = components.first() else {
        bail!(Argument, "empty mixture");
    };
    let lattice = *first.lattice();
    if components
        .iter()
        .any(|(w, s)| !(w.is_finite() && *w > T::zero()) || s.n_sites() != lattice.n_sites())
    {
        bail!(
            Argument,
            "mixture weights must be positive and states share one lattice"
        );
    }
    let total = numeric::compensated_sum(components.iter().map(|(w, _)| *w));
    if (total - T::one()).abs() > T::tol(1e-10) {
        bail!(
            Argument,
            "mixture weights sum to {:e}, not 1",
            total.as_f64()
        );
    }
    check_parameters(lattice.n_sites(), epsilon, varepsilon, min_distance)?;
    let covs: Vec<(T, CovarianceMatrix<T>)> = components
        .iter()
        .map(|(w, s)| Ok((*w, covariance_matrix(s)?)))
        .collect::<Result<_>>()?;
    sweep(
        &lattice,
        |x, y| {
            let parts: Vec<(T, TwoSiteMoments<T>)> = covs
                .iter()
                .map(|(w, c)| (*w, TwoSiteMoments::from_covariance(c, x, y)))
                .collect();
            TwoSiteMoments::mix(&parts)
        },
        epsilon,
        varepsilon,
        min_distance,
    )
}

/// Single-state NFS bound used by the cascade: max ⟨δÂ²⟩ ≤ 2N.
pub const CASCADE_NFS_FACTOR: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct CascadeStep<T> {
    pub site: usize,
    /// Recorded σ_z outcome (+1 or −1).
    pub outcome: i8,
    pub probability: T,
    /// max_additive_fluctuation of the post-measurement state.
    pub max_variance: T,
    pub nfs: bool,
}

/// Measures σ_z on sites 0, 1, 2, … keeping the more probable outcome (+1 on ties),
/// until the post-measurement state has max ⟨δÂ²⟩ ≤ 2N or `max_steps` is reached.
pub fn measurement_cascade<T: Real>(
    state: &StateVector<T>,
    max_steps: usize,
) -> Result<Vec<CascadeStep<T>>> {
    let n = state.n_sites();
    let bound = T::lit(CASCADE_NFS_FACTOR * n as f64);
    let mut current = state.clone();
    let mut steps = Vec::new();
    for site in 0..max_steps.min(n) {
        let obs = crate::qcore::pauli(current.lattice(), site, crate::qcore::Axis::Z)?;
        let outcome = measure_local(&current, &obs)?;
        let k = if outcome.probabilities[0] >= outcome.probabilities[1] {
            0
        } else {
            1
        };
        let Some(post) = outcome.post_states[k].clone() else {
            bail!(
                Numerical,
                "measurement outcome with vanishing probability selected"
            );
        };
        let max_variance = max_additive_fluctuation(&post)?.max_variance;
        let nfs = max_variance <= bound;
        steps.push(CascadeStep {
            site,
            outcome: if k == 0 { 1 } else { -1 },
            probability: outcome.probabilities[k],
            max_variance,
            nfs,
        });
        current = post;
        if nfs {
            break;
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{make_ghz, make_uniform_product_state, pauli, Axis, LatticeSpec};

    fn chain(n: usize) -> LatticeSpec {
        LatticeSpec::open(n).unwrap()
    }

    #[test]
    fn ghz_z_measurement() {
        let ghz = make_ghz::<f64>(chain(4)).unwrap();
        let out = measure_local(&ghz, &pauli(&chain(4), 0, Axis::Z).unwrap()).unwrap();
        assert!((out.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((out.probabilities[1] - 0.5).abs() < 1e-12);
        assert!((out.post_states[0].as_ref().unwrap().amplitudes()[0].re - 1.0).abs() < 1e-12);
        assert!((out.post_states[1].as_ref().unwrap().amplitudes()[15].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenstate_and_plus_state() {
        let up = make_uniform_product_state::<f64>(chain(3), 0.0, 0.0).unwrap();
        let out = measure_local(&up, &pauli(&chain(3), 2, Axis::Z).unwrap()).unwrap();
        assert_eq!(out.probabilities[1], 0.0);
        assert!(out.post_states[1].is_none());
        assert_eq!(out.post_states[0].as_ref().unwrap(), &up);
        let plus =
            make_uniform_product_state::<f64>(chain(1), std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let out = measure_local(&plus, &pauli(&chain(1), 0, Axis::Z).unwrap()).unwrap();
        assert!((out.probabilities[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_same_site_rejected() {
        let up = make_uniform_product_state::<f64>(chain(2), 0.0, 0.0).unwrap();
        let identity = LocalOperator::from_pauli_coefficients(0, 1.0, [0.0; 3]);
        assert!(matches!(
            measure_local(&up, &identity),
            Err(crate::Error::Argument(_))
        ));
        let z = pauli(&chain(2), 0, Axis::Z).unwrap();
        assert!(conditional_distribution(&up, &z, &z).is_err());
    }

    #[test]
    fn ghz_conditional_table() {
        let lattice = chain(4);
        let ghz = make_ghz::<f64>(lattice).unwrap();
        let table = conditional_distribution(
            &ghz,
            &pauli(&lattice, 0, Axis::Z).unwrap(),
            &pauli(&lattice, 3, Axis::Z).unwrap(),
        )
        .unwrap();
        assert!((table.p_b_given_a[0].unwrap()[0] - 1.0).abs() < 1e-12);
        assert!((table.p_b[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ghz_is_unstable_at_one_half() {
        let ghz = make_ghz::<f64>(chain(6)).unwrap();
        let report = stability_test(&ghz, 0.1, 0.1, 3).unwrap();
        assert!((report.max_deviation - 0.5).abs() < 1e-9);
        assert!(!report.stable);
        assert!(report.pairs.iter().all(|p| p.distance >= 3));
    }

    #[test]
    fn product_is_stable() {
        let s = make_uniform_product_state::<f64>(chain(5), 0.7, 0.3).unwrap();
        let report = stability_test(&s, 0.01, 0.05, 1).unwrap();
        assert!(report.max_deviation <= 1e-12);
        assert!(report.stable);
        assert!(stability_test(&s, 0.1, 0.05, 5).is_err());
    }

    #[test]
    fn mixture_of_polarized_states_is_unstable() {
        let lattice = chain(4);
        let up = make_uniform_product_state::<f64>(lattice, 0.0, 0.0).unwrap();
        let down = make_uniform_product_state::<f64>(lattice, std::f64::consts::PI, 0.0).unwrap();
        let report = stability_test_mixture(&[(0.5, &up), (0.5, &down)], 0.1, 0.05, 2).unwrap();
        assert!((report.max_deviation - 0.5).abs() < 1e-9);
        assert!(stability_test_mixture(&[(0.4, &up), (0.5, &down)], 0.1, 0.05, 2).is_err());
    }

    #[test]
    fn ghz_cascade_stops_after_one_measurement() {
        let ghz = make_ghz::<f64>(chain(6)).unwrap();
        let steps = measurement_cascade(&ghz, 6).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(steps[0].nfs);
        assert!(steps[0].max_variance <= 6.0 + 1e-6);
    }
}
