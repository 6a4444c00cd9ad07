//! Pulse-level simulator and gate compiler for chains of spin-½ nuclei in a
//! quantum-Hall two-dimensional electron gas, coupled by electron-mediated
//! XY exchange.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`). The
//! crate root re-exports the `f64` instantiations under short names; [`f32`]
//! holds the single-precision ones.
//!
//! Units: angular frequencies in rad/s, times in s, lengths in nm, fields in
//! tesla, energies in J.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compiler;
pub mod control;
pub mod engine;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod physics;
pub mod scalar;
pub mod schema;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex = scalar::C<f64>;
pub type ChainSpec = model::ChainSpec<f64>;
pub type SwitchMask = model::SwitchMask<f64>;
pub type HamiltonianMatrix = model::HamiltonianMatrix<f64>;
pub type StateVector = engine::StateVector<f64>;
pub type Propagator = engine::Propagator<f64>;
pub type ControlEvent = control::ControlEvent<f64>;
pub type Program = control::Program<f64>;
pub type RunOptions = control::RunOptions<f64>;
pub type RunResult = control::RunResult<f64>;
pub type TargetUnitary = compiler::TargetUnitary<f64>;
pub type SynthesisResult = compiler::SynthesisResult<f64>;
pub type DisorderParams = ensemble::DisorderParams<f64>;
pub type NoiseParams = ensemble::NoiseParams<f64>;
pub type EnsembleReport = ensemble::EnsembleReport<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type Complex = crate::scalar::C<f32>;
    pub type ChainSpec = crate::model::ChainSpec<f32>;
    pub type SwitchMask = crate::model::SwitchMask<f32>;
    pub type StateVector = crate::engine::StateVector<f32>;
    pub type Propagator = crate::engine::Propagator<f32>;
    pub type ControlEvent = crate::control::ControlEvent<f32>;
    pub type Program = crate::control::Program<f32>;
    pub type RunOptions = crate::control::RunOptions<f32>;
    pub type TargetUnitary = crate::compiler::TargetUnitary<f32>;
    pub type EnsembleReport = crate::ensemble::EnsembleReport<f32>;
}
