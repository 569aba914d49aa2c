//! Execution of QIR programs: an interpreter for the classical subset whose
//! intrinsic calls drive a statevector simulator.
//!
//! Qubits get simulator indices in the order they are first seen. When the
//! entry point carries `required_num_qubits` = k, static addresses 0..k are
//! allocated up front in that order; any other static address is allocated
//! the first time it is used.

mod interpreter;
mod results;
pub mod rng;
pub mod statevector;

pub use crate::intrinsics::{intrinsic_table, Intrinsic};
pub use interpreter::{
    interpret, run_shot, QubitKey, RuntimeError, RuntimeErrorKind, RuntimeOptions, RuntimeState, ShotTrace,
};
pub use results::ExecutionResult;
pub use statevector::{gate_matrix, SimError, StateVector};
