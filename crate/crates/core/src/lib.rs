//! Exact state-vector laboratory for macroscopic quantum states on spin chains:
//! fluctuations of additive operators, the cluster property, decoherence
//! under correlated local noise and stability against local measurements.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the aliases below fix the common double-precision case.

pub mod analyzer;
pub mod cluster;
pub mod dynamics;
pub mod error;
pub mod measure;
pub mod numeric;
pub mod qcore;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

pub type StateVector = qcore::StateVector<f64>;
pub type LocalOperator = qcore::LocalOperator<f64>;
pub type AdditiveOperator = qcore::AdditiveOperator<f64>;
pub type CovarianceMatrix = analyzer::CovarianceMatrix<f64>;
pub type FluctuationReport = analyzer::FluctuationReport<f64>;
pub type ScalingVerdict = analyzer::ScalingVerdict<f64>;
pub type CorrelationField = cluster::CorrelationField<f64>;
pub type ClusterReport = cluster::ClusterReport<f64>;
pub type HamiltonianSpec = dynamics::HamiltonianSpec<f64>;
pub type Hamiltonian = dynamics::Hamiltonian<f64>;
pub type NoiseModel = dynamics::NoiseModel<f64>;
pub type EnsembleConfig = dynamics::EnsembleConfig<f64>;
pub type NoisyEvolution = dynamics::NoisyEvolution<f64>;
pub type DensityMatrix = dynamics::DensityMatrix<f64>;
pub type DecoherenceFit = dynamics::DecoherenceFit<f64>;
pub type MeasurementOutcome = measure::MeasurementOutcome<f64>;
pub type MeasurementStabilityReport = measure::MeasurementStabilityReport<f64>;

pub type StateVector32 = qcore::StateVector<f32>;
pub type LocalOperator32 = qcore::LocalOperator<f32>;
pub type AdditiveOperator32 = qcore::AdditiveOperator<f32>;
pub type Hamiltonian32 = dynamics::Hamiltonian<f32>;
pub type NoiseModel32 = dynamics::NoiseModel<f32>;
