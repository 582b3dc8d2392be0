//! Spin-chain Hamiltonians, iterative ground states, noisy evolution and
//! decoherence-rate scaling.

mod fit;
mod hamiltonian;
mod krylov;
mod noise;
pub mod rng;
mod trajectory;
mod vacuum;

pub use fit::{fit_gamma_scaling, DecoherenceFit, FRAGILE_MIN_EXPONENT};
pub use hamiltonian::{build_hamiltonian, Hamiltonian, HamiltonianSpec, Model};
pub use krylov::{ground_state, ground_state_with, propagate, Eigenpair, LanczosOptions, Which};
pub use noise::{
    analytic_dephasing_rate, prepared_dephasing_rate, Coupling, Kernel, NoiseModel, PreparedNoise,
};
pub use trajectory::{
    evolve_noisy, DensityMatrix, EnsembleConfig, NoisyEvolution, RateEstimate, DEFAULT_STEPS,
    DENSITY_MATRIX_MAX_SITES, MIN_TRAJECTORIES, RATE_BATCHES, RATE_FIT_FRACTION,
};
pub use vacuum::{
    magnetization, pure_phase_vacuum, PurePhaseVacuum, VacuumMethod, SB_FIELD_FRACTION,
};
