//! Flat quantum-circuit representation and its bridges to base-profile QIR
//! and OpenQASM 2.

mod base_qir;
mod qasm;

use std::collections::HashSet;

use thiserror::Error;

pub use crate::gate::GateKind;
pub use base_qir::{circuit_from_base_qir, circuit_to_base_qir};
pub use qasm::{export_openqasm2, import_openqasm2, import_openqasm2_with_warnings};

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    Gate { kind: GateKind, params: Vec<f64>, qubits: Vec<usize> },
    Measure { qubit: usize, clbit: usize },
    Reset { qubit: usize },
}

impl CircuitOp {
    pub fn gate(kind: GateKind, qubits: &[usize]) -> CircuitOp {
        CircuitOp::Gate { kind, params: Vec::new(), qubits: qubits.to_vec() }
    }

    pub fn rotation(kind: GateKind, angle: f64, qubit: usize) -> CircuitOp {
        CircuitOp::Gate { kind, params: vec![angle], qubits: vec![qubit] }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            CircuitOp::Gate { qubits, .. } => qubits.clone(),
            CircuitOp::Measure { qubit, .. } | CircuitOp::Reset { qubit } => vec![*qubit],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("op {index}: qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, qubit: usize, num_qubits: usize },
    #[error("op {index}: classical bit {clbit} out of range for {num_clbits} bits")]
    ClbitOutOfRange { index: usize, clbit: usize, num_clbits: usize },
    #[error("op {index}: {kind} expects {expected} qubits and {params} parameters")]
    Arity { index: usize, kind: GateKind, expected: usize, params: usize },
    #[error("op {index}: repeated qubit operand {qubit}")]
    DuplicateQubit { index: usize, qubit: usize },
}

/// Errors converting between QIR and the circuit form.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConversionError {
    #[error("module is not base profile: {0}")]
    NotBase(String),
    #[error("{location}: call to `@{callee}` has no circuit equivalent")]
    NonIntrinsic { location: String, callee: String },
    #[error("{location}: {message}")]
    Operand { location: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuantumCircuit {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub ops: Vec<CircuitOp>,
}

impl QuantumCircuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> QuantumCircuit {
        QuantumCircuit { num_qubits, num_clbits, ops: Vec::new() }
    }

    /// Appends an op after checking it against the circuit's invariants.
    pub fn push(&mut self, op: CircuitOp) -> Result<&mut Self, CircuitError> {
        check_op(self, self.ops.len(), &op)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        self.ops.iter().enumerate().try_for_each(|(i, op)| check_op(self, i, op))
    }
}

fn check_op(c: &QuantumCircuit, index: usize, op: &CircuitOp) -> Result<(), CircuitError> {
    if let CircuitOp::Gate { kind, params, qubits } = op {
        if qubits.len() != kind.num_qubits() || params.len() != kind.num_params() {
            return Err(CircuitError::Arity {
                index,
                kind: *kind,
                expected: kind.num_qubits(),
                params: kind.num_params(),
            });
        }
        let mut seen = HashSet::new();
        if let Some(&qubit) = qubits.iter().find(|q| !seen.insert(**q)) {
            return Err(CircuitError::DuplicateQubit { index, qubit });
        }
    }
    for qubit in op.qubits() {
        if qubit >= c.num_qubits {
            return Err(CircuitError::QubitOutOfRange { index, qubit, num_qubits: c.num_qubits });
        }
    }
    if let CircuitOp::Measure { clbit, .. } = op {
        if *clbit >= c.num_clbits {
            return Err(CircuitError::ClbitOutOfRange { index, clbit: *clbit, num_clbits: c.num_clbits });
        }
    }
    Ok(())
}
