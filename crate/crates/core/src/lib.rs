//! Toolkit for the textual Quantum Intermediate Representation (QIR).
//!
//! Three ways of consuming a QIR program are provided side by side:
//!
//! * [`circuit`] turns base-profile QIR into a flat gate list and bridges it
//!   to OpenQASM 2;
//! * [`transforms`] rewrites the QIR itself: loop unrolling by partial
//!   evaluation, static qubit allocation and lowering to the base profile;
//! * [`runtime`] interprets the program while a statevector simulator
//!   supplies the quantum intrinsics.
//!
//! [`frontend`] holds the parser, printer and profile checker that all three
//! build on.

pub mod arith;
pub mod circuit;
pub mod cli;
pub mod corpus;
pub mod frontend;
pub mod gate;
pub mod intrinsics;
pub mod runtime;
pub mod transforms;

pub use circuit::{CircuitOp, QuantumCircuit};
pub use frontend::{parse_module, print_module, validate_profile, Profile, QirModule};
pub use gate::GateKind;
