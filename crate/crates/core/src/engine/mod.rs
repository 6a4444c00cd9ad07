//! Exact state-vector evolution: pumped initialization, hard pulses,
//! piecewise-constant segments and projective readout.

mod measure;
mod propagator;
mod state;

pub use measure::{
    measure_difference, measure_mask, measure_single, MeasurementKind, MeasurementOutcome,
};
pub use propagator::{apply_propagator, segment_propagator, Eigensystem, Propagator};
pub use state::{apply_pulse, initialize_pumped, rotation_matrix, StateVector};

pub(crate) use state::{apply_single_qubit_slice, check_qubit_count};

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 14;
