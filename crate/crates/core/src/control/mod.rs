//! The program IR of the machine and its deterministic interpreter.
//!
//! Delays evolve under the full always-on Hamiltonian with the current switch
//! mask; Zeeman phases accumulate in the lab frame and are never removed
//! implicitly.

mod interpreter;
mod program;

pub use interpreter::{
    idle_unitary, program_unitary, run, Interpreter, PropagatorCache, RunOptions, RunResult,
};
pub use program::{validate, ControlEvent, Diagnostic, Program};
