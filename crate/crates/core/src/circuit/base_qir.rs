use std::collections::BTreeMap;

use super::{CircuitOp, ConversionError, QuantumCircuit};
use crate::frontend::ast::*;
use crate::frontend::{validate_profile, Profile};
use crate::intrinsics::{Intrinsic, ParamRole};

/// Reads a base-profile module line by line into a circuit.
///
/// Qubit and classical-bit indices are the static address indices. Counts are
/// one past the largest index seen, raised to the `required_num_*` attribute
/// when that is larger.
pub fn circuit_from_base_qir(module: &QirModule) -> Result<QuantumCircuit, ConversionError> {
    let report = validate_profile(module);
    if report.profile != Profile::Base {
        let reasons: Vec<String> = report
            .violations
            .iter()
            .chain(&report.base_violations)
            .map(ToString::to_string)
            .collect();
        return Err(ConversionError::NotBase(reasons.join("; ")));
    }

    let mut ops = Vec::new();
    let mut max_qubit: Option<u64> = None;
    let mut max_clbit: Option<u64> = None;
    let block = &module.entry.blocks[0];
    for (i, inst) in block.instructions.iter().enumerate() {
        let location = Location { block: block.label.clone(), index: Some(i) }.to_string();
        let Instruction::Call { callee, args, .. } = inst else {
            unreachable!("base profile contains only calls");
        };
        let intrinsic = Intrinsic::lookup(callee)
            .ok_or_else(|| ConversionError::NonIntrinsic { location: location.clone(), callee: callee.clone() })?;
        let operand_error = |message: String| ConversionError::Operand { location: location.clone(), message };

        let mut qubits = Vec::new();
        let mut params = Vec::new();
        let mut results = Vec::new();
        for (role, arg) in intrinsic.params().into_iter().zip(args) {
            match role {
                ParamRole::Qubit | ParamRole::Result => {
                    let idx = arg
                        .value
                        .static_index()
                        .ok_or_else(|| operand_error("expected a static address".into()))?;
                    if role == ParamRole::Qubit {
                        qubits.push(idx);
                    } else {
                        results.push(idx);
                    }
                }
                ParamRole::Angle => params.push(match arg.value {
                    Value::Float(x) => x,
                    Value::Int { value, .. } => value as f64,
                    _ => return Err(operand_error("rotation angle must be a constant".into())),
                }),
                _ => {}
            }
        }
        let op = match intrinsic {
            Intrinsic::Gate(kind) => CircuitOp::Gate {
                kind,
                params,
                qubits: qubits.iter().map(|&q| q as usize).collect(),
            },
            Intrinsic::Measure => {
                max_clbit = max_clbit.max(Some(results[0]));
                CircuitOp::Measure { qubit: qubits[0] as usize, clbit: results[0] as usize }
            }
            Intrinsic::Reset => CircuitOp::Reset { qubit: qubits[0] as usize },
            i if i.is_output_recording() => continue,
            _ => {
                return Err(ConversionError::NonIntrinsic { location, callee: callee.clone() });
            }
        };
        max_qubit = max_qubit.max(qubits.iter().copied().max());
        ops.push(op);
    }
    let count = |max: Option<u64>, attr: Option<u64>| (max.map_or(0, |m| m + 1)).max(attr.unwrap_or(0)) as usize;
    Ok(QuantumCircuit {
        num_qubits: count(max_qubit, module.required_qubits()),
        num_clbits: count(max_clbit, module.required_results()),
        ops,
    })
}

/// Emits a statically addressed base-profile module: one intrinsic call per
/// op, then one `result_record_output` per classical bit in ascending order.
pub fn circuit_to_base_qir(circuit: &QuantumCircuit) -> QirModule {
    let mut module = QirModule::empty();
    let mut calls = Vec::new();
    let mut used: Vec<Intrinsic> = Vec::new();
    let mut call = |intrinsic: Intrinsic, args: Vec<Arg>| {
        if !used.contains(&intrinsic) {
            used.push(intrinsic);
        }
        calls.push(Instruction::Call { result: None, ret_ty: Type::Void, callee: intrinsic.symbol(), args });
    };
    for op in &circuit.ops {
        match op {
            CircuitOp::Gate { kind, params, qubits } => {
                let mut args: Vec<Arg> = params.iter().map(|p| Arg::new(Type::Double, Value::Float(*p))).collect();
                args.extend(qubits.iter().map(|&q| Arg::ptr(Value::qubit(q as u64))));
                call(Intrinsic::Gate(*kind), args);
            }
            CircuitOp::Measure { qubit, clbit } => {
                let result = Arg { ty: Type::Ptr, attrs: vec![ParamAttr::WriteOnly], value: Value::result(*clbit as u64) };
                call(Intrinsic::Measure, vec![Arg::ptr(Value::qubit(*qubit as u64)), result]);
            }
            CircuitOp::Reset { qubit } => call(Intrinsic::Reset, vec![Arg::ptr(Value::qubit(*qubit as u64))]),
        }
    }
    for clbit in 0..circuit.num_clbits {
        call(
            Intrinsic::ResultRecordOutput,
            vec![Arg::ptr(Value::result(clbit as u64)), Arg::ptr(Value::qubit(0))],
        );
    }
    module.entry.blocks[0].instructions = calls;
    module.declarations = used.into_iter().map(Intrinsic::declaration).collect();
    module.attributes = base_attributes(circuit.num_qubits as u64, circuit.num_clbits as u64);
    module
}

pub(crate) fn base_attributes(qubits: u64, results: u64) -> BTreeMap<String, String> {
    let mut attrs = BTreeMap::new();
    attrs.insert(ENTRY_POINT_ATTR.to_string(), String::new());
    attrs.insert("qir_profiles".to_string(), "base_profile".to_string());
    attrs.insert(REQUIRED_QUBITS_ATTR.to_string(), qubits.to_string());
    attrs.insert(REQUIRED_RESULTS_ATTR.to_string(), results.to_string());
    attrs
}
