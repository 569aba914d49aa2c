//! The closed table of quantum intrinsics (`__quantum__qis__*`) and runtime
//! functions (`__quantum__rt__*`) that programs may call.

use std::collections::BTreeMap;

use crate::frontend::ast::{FuncDecl, IntWidth, Type};
use crate::gate::GateKind;

/// Semantic action bound to an intrinsic symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Intrinsic {
    Gate(GateKind),
    Measure,
    Reset,
    QubitAllocate,
    QubitAllocateArray,
    ArrayGetElementPtr1d,
    QubitRelease,
    QubitReleaseArray,
    ReadResult,
    ResultRecordOutput,
    ArrayRecordOutput,
}

/// Role of one intrinsic parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    Qubit,
    Result,
    Angle,
    Int64,
    Array,
    Label,
}

impl ParamRole {
    pub fn ty(self) -> Type {
        match self {
            ParamRole::Angle => Type::Double,
            ParamRole::Int64 => Type::Int(IntWidth::I64),
            _ => Type::Ptr,
        }
    }
}

/// Kind of value an intrinsic returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnRole {
    Void,
    Qubit,
    Array,
    Bool,
}

impl ReturnRole {
    pub fn ty(self) -> Type {
        match self {
            ReturnRole::Void => Type::Void,
            ReturnRole::Qubit | ReturnRole::Array => Type::Ptr,
            ReturnRole::Bool => Type::Int(IntWidth::I1),
        }
    }
}

const RUNTIME: [(&str, Intrinsic); 9] = [
    ("__quantum__rt__qubit_allocate", Intrinsic::QubitAllocate),
    ("__quantum__rt__qubit_allocate_array", Intrinsic::QubitAllocateArray),
    ("__quantum__rt__array_get_element_ptr_1d", Intrinsic::ArrayGetElementPtr1d),
    ("__quantum__rt__qubit_release", Intrinsic::QubitRelease),
    ("__quantum__rt__qubit_release_array", Intrinsic::QubitReleaseArray),
    ("__quantum__rt__read_result", Intrinsic::ReadResult),
    ("__quantum__rt__result_record_output", Intrinsic::ResultRecordOutput),
    ("__quantum__rt__array_record_output", Intrinsic::ArrayRecordOutput),
    ("__quantum__qis__mz__body", Intrinsic::Measure),
];

impl Intrinsic {
    /// Resolves a symbol (without the leading `@`).
    pub fn lookup(symbol: &str) -> Option<Intrinsic> {
        if symbol == "__quantum__qis__reset__body" {
            return Some(Intrinsic::Reset);
        }
        if let Some((_, i)) = RUNTIME.iter().find(|(name, _)| *name == symbol) {
            return Some(*i);
        }
        symbol
            .strip_prefix("__quantum__qis__")
            .and_then(|rest| rest.strip_suffix("__body"))
            .and_then(GateKind::from_qir_name)
            .map(Intrinsic::Gate)
    }

    pub fn symbol(self) -> String {
        match self {
            Intrinsic::Gate(g) => g.intrinsic_symbol(),
            Intrinsic::Reset => "__quantum__qis__reset__body".to_string(),
            other => RUNTIME
                .iter()
                .find(|(_, i)| *i == other)
                .map(|(name, _)| name.to_string())
                .expect("every runtime intrinsic has a symbol"),
        }
    }

    pub fn params(self) -> Vec<ParamRole> {
        use ParamRole::*;
        match self {
            Intrinsic::Gate(g) => {
                let mut p = vec![Angle; g.num_params()];
                p.extend(std::iter::repeat_n(Qubit, g.num_qubits()));
                p
            }
            Intrinsic::Measure => vec![Qubit, Result],
            Intrinsic::Reset => vec![Qubit],
            Intrinsic::QubitAllocate => vec![],
            Intrinsic::QubitAllocateArray => vec![Int64],
            Intrinsic::ArrayGetElementPtr1d => vec![Array, Int64],
            Intrinsic::QubitRelease => vec![Qubit],
            Intrinsic::QubitReleaseArray => vec![Array],
            Intrinsic::ReadResult => vec![Result],
            Intrinsic::ResultRecordOutput => vec![Result, Label],
            Intrinsic::ArrayRecordOutput => vec![Int64, Label],
        }
    }

    pub fn returns(self) -> ReturnRole {
        match self {
            Intrinsic::QubitAllocate | Intrinsic::ArrayGetElementPtr1d => ReturnRole::Qubit,
            Intrinsic::QubitAllocateArray => ReturnRole::Array,
            Intrinsic::ReadResult => ReturnRole::Bool,
            _ => ReturnRole::Void,
        }
    }

    /// The `declare` line for this intrinsic.
    pub fn declaration(self) -> FuncDecl {
        FuncDecl {
            name: self.symbol(),
            ret_ty: self.returns().ty(),
            params: self.params().into_iter().map(ParamRole::ty).collect(),
        }
    }

    /// True for calls that act on the quantum state (gates, measurement, reset).
    pub fn is_quantum_operation(self) -> bool {
        matches!(self, Intrinsic::Gate(_) | Intrinsic::Measure | Intrinsic::Reset)
    }

    /// True for the allocation and release family.
    pub fn is_allocation(self) -> bool {
        matches!(
            self,
            Intrinsic::QubitAllocate
                | Intrinsic::QubitAllocateArray
                | Intrinsic::ArrayGetElementPtr1d
                | Intrinsic::QubitRelease
                | Intrinsic::QubitReleaseArray
        )
    }

    pub fn is_output_recording(self) -> bool {
        matches!(self, Intrinsic::ResultRecordOutput | Intrinsic::ArrayRecordOutput)
    }
}

/// Every intrinsic symbol the toolkit understands, with its action.
pub fn intrinsic_table() -> BTreeMap<String, Intrinsic> {
    let mut table: BTreeMap<String, Intrinsic> = GateKind::ALL
        .into_iter()
        .map(|g| (g.intrinsic_symbol(), Intrinsic::Gate(g)))
        .collect();
    table.insert(Intrinsic::Reset.symbol(), Intrinsic::Reset);
    for (name, i) in RUNTIME {
        table.insert(name.to_string(), i);
    }
    table
}
