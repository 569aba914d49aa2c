//! The closed set of unitary gates understood by every part of the toolkit.

use std::fmt;

/// A unitary gate kind. The names on each side of the OpenQASM/QIR bridge are
/// fixed by [`GateKind::qasm_name`] and [`GateKind::qir_name`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    Cnot,
    Cz,
    Swap,
    Ccx,
}

impl GateKind {
    pub const ALL: [GateKind; 15] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Swap,
        GateKind::Ccx,
    ];

    /// Number of qubit operands.
    pub fn num_qubits(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => 2,
            GateKind::Ccx => 3,
            _ => 1,
        }
    }

    /// Number of angle parameters (radians).
    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            _ => 0,
        }
    }

    /// Name of the `__quantum__qis__<name>__body` intrinsic.
    pub fn qir_name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "s_adj",
            GateKind::T => "t",
            GateKind::Tdg => "t_adj",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Ccx => "ccx",
        }
    }

    /// Name in the OpenQASM 2 standard library.
    pub fn qasm_name(self) -> &'static str {
        match self {
            GateKind::Sdg => "sdg",
            GateKind::Tdg => "tdg",
            GateKind::Cnot => "cx",
            other => other.qir_name(),
        }
    }

    pub fn from_qir_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|g| g.qir_name() == name)
    }

    pub fn from_qasm_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|g| g.qasm_name() == name)
    }

    /// The full intrinsic symbol, e.g. `__quantum__qis__cnot__body`.
    pub fn intrinsic_symbol(self) -> String {
        format!("__quantum__qis__{}__body", self.qir_name())
    }

    /// The inverse gate together with its parameters.
    pub fn adjoint(self, params: &[f64]) -> (GateKind, Vec<f64>) {
        match self {
            GateKind::S => (GateKind::Sdg, vec![]),
            GateKind::Sdg => (GateKind::S, vec![]),
            GateKind::T => (GateKind::Tdg, vec![]),
            GateKind::Tdg => (GateKind::T, vec![]),
            GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                (self, params.iter().map(|p| -p).collect())
            }
            other => (other, vec![]),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.qasm_name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn name_tables_are_bijective() {
        for g in GateKind::ALL {
            assert_eq!(GateKind::from_qir_name(g.qir_name()), Some(g));
            assert_eq!(GateKind::from_qasm_name(g.qasm_name()), Some(g));
        }
        assert_eq!(GateKind::from_qasm_name("cnot"), None);
        assert_eq!(GateKind::from_qir_name("cx"), None);
    }

    #[test]
    fn adjoint_is_involutive() {
        for g in GateKind::ALL {
            let params = vec![0.3; g.num_params()];
            let (a, p) = g.adjoint(&params);
            let (b, q) = a.adjoint(&p);
            assert_eq!(b, g);
            assert_eq!(q, params);
        }
    }
}
