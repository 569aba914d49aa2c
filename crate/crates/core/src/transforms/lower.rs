//! Lowering of adaptive-subset modules to the base profile.

use std::collections::{BTreeMap, BTreeSet};

use super::{allocate_static_addresses, require_supported, unroll_and_fold, TransformError, DEFAULT_ITERATION_CAP};
use crate::frontend::ast::*;
use crate::frontend::{canonicalize, validate_profile, Profile};
use crate::intrinsics::{Intrinsic, ParamRole};

pub fn lower_to_base(module: &QirModule) -> Result<QirModule, TransformError> {
    lower_to_base_with_cap(module, DEFAULT_ITERATION_CAP)
}

/// Unrolls, allocates static addresses, sinks measurements to the end and
/// records every measured result when the program records nothing itself.
pub fn lower_to_base_with_cap(module: &QirModule, iteration_cap: u64) -> Result<QirModule, TransformError> {
    require_supported(module)?;
    let unrolled = unroll_and_fold(module, iteration_cap).map_err(|e| match e {
        TransformError::DataDependent { block, feedback: true } => TransformError::FeedbackRequired {
            location: Location { block, index: None }.to_string(),
            reason: "a branch on a measurement result guards operations on the measured qubit".to_string(),
        },
        other => other,
    })?;
    let allocated = allocate_static_addresses(&unrolled)?;
    let mut out = sink_measurements(&allocated)?;
    canonicalize(&mut out);
    let report = validate_profile(&out);
    if report.profile != Profile::Base {
        let reasons: Vec<String> = report.base_violations.iter().map(ToString::to_string).collect();
        return Err(TransformError::Unsupported(format!("lowered module is not base profile: {}", reasons.join("; "))));
    }
    Ok(out)
}

fn uses_local(inst: &Instruction, name: &str) -> bool {
    inst.operands().iter().any(|v| v.as_local() == Some(name))
}

type Record = (Instruction, Option<(u64, usize)>, String);

fn sink_measurements(module: &QirModule) -> Result<QirModule, TransformError> {
    let block = &module.entry.blocks[0];
    let mut gates = Vec::new();
    let mut measures = Vec::new();
    // (call, (result, index of the measurement it reads), location)
    let mut records: Vec<Record> = Vec::new();
    let mut pending: BTreeSet<u64> = BTreeSet::new();
    let mut writes: BTreeMap<u64, usize> = BTreeMap::new();
    let mut max_qubit: Option<u64> = None;

    for (i, inst) in block.instructions.iter().enumerate() {
        let location = Location { block: block.label.clone(), index: Some(i) }.to_string();
        let Instruction::Call { result, callee, args, .. } = inst else {
            return Err(TransformError::FeedbackRequired {
                location,
                reason: "classical computation on a measurement result".to_string(),
            });
        };
        let intrinsic = Intrinsic::lookup(callee)
            .ok_or_else(|| TransformError::Unsupported(format!("{location}: `@{callee}` is not an intrinsic")))?;
        let mut qubits = Vec::new();
        let mut results = Vec::new();
        for (role, a) in intrinsic.params().into_iter().zip(args) {
            match (role, a.value.static_index()) {
                (ParamRole::Qubit, Some(q)) => qubits.push(q),
                (ParamRole::Result, Some(r)) => results.push(r),
                (ParamRole::Qubit | ParamRole::Result, None) => {
                    return Err(TransformError::Unsupported(format!("{location}: operand is not a static address")));
                }
                _ => {}
            }
        }
        max_qubit = max_qubit.max(qubits.iter().copied().max());
        match intrinsic {
            Intrinsic::ReadResult => {
                let name = result.as_deref().unwrap_or_default();
                let used = block.instructions[i + 1..].iter().any(|later| uses_local(later, name))
                    || matches!(&block.terminator, Terminator::Ret(Some((_, Value::Local(n)))) if n == name);
                if used {
                    return Err(TransformError::FeedbackRequired {
                        location,
                        reason: format!("`%{name}` reads a measurement result at run time"),
                    });
                }
            }
            Intrinsic::Gate(_) | Intrinsic::Reset => {
                if let Some(q) = qubits.iter().find(|q| pending.contains(q)) {
                    return Err(TransformError::MeasurementNotSinkable {
                        location,
                        reason: format!("qubit {q} is used after its measurement"),
                    });
                }
                if intrinsic == Intrinsic::Reset && !pending.is_empty() {
                    return Err(TransformError::MeasurementNotSinkable {
                        location,
                        reason: "reset after a measurement".to_string(),
                    });
                }
                gates.push(inst.clone());
            }
            Intrinsic::Measure => {
                pending.extend(&qubits);
                *writes.entry(results[0]).or_insert(0) += 1;
                measures.push(inst.clone());
            }
            Intrinsic::ResultRecordOutput => {
                let r = results[0];
                records.push((inst.clone(), Some((r, writes.get(&r).copied().unwrap_or(0))), location));
            }
            Intrinsic::ArrayRecordOutput => records.push((inst.clone(), None, location)),
            other => {
                return Err(TransformError::Unsupported(format!("{location}: `{}` left after allocation", other.symbol())));
            }
        }
    }
    for (_, seen, location) in &records {
        if let Some((r, count)) = seen {
            if writes.get(r).copied().unwrap_or(0) != *count {
                return Err(TransformError::MeasurementNotSinkable {
                    location: location.clone(),
                    reason: format!("result {r} is recorded before a later measurement overwrites it"),
                });
            }
        }
    }
    let mut body = gates;
    body.extend(measures);
    if records.is_empty() {
        for &r in writes.keys() {
            body.push(Instruction::Call {
                result: None,
                ret_ty: Type::Void,
                callee: Intrinsic::ResultRecordOutput.symbol(),
                args: vec![Arg::ptr(Value::result(r)), Arg::ptr(Value::qubit(0))],
            });
        }
    } else {
        body.extend(records.into_iter().map(|(inst, _, _)| inst));
    }

    let mut out = module.clone();
    out.entry.blocks[0].instructions = body;
    let mut used: Vec<String> = Vec::new();
    for (callee, _) in out.entry_calls() {
        if !used.iter().any(|u| u == callee) {
            used.push(callee.to_string());
        }
    }
    let mut decls: Vec<FuncDecl> = out.declarations.iter().filter(|d| used.contains(&d.name)).cloned().collect();
    for name in &used {
        if !decls.iter().any(|d| &d.name == name) {
            if let Some(i) = Intrinsic::lookup(name) {
                decls.push(i.declaration());
            }
        }
    }
    out.declarations = decls;

    let qubits = max_qubit.map_or(0, |q| q + 1).max(module.required_qubits().unwrap_or(0));
    let results = writes.keys().last().map_or(0, |r| r + 1).max(module.required_results().unwrap_or(0));
    out.attributes.insert(ENTRY_POINT_ATTR.to_string(), String::new());
    out.attributes.insert("qir_profiles".to_string(), "base_profile".to_string());
    out.attributes.insert(REQUIRED_QUBITS_ATTR.to_string(), qubits.to_string());
    out.attributes.insert(REQUIRED_RESULTS_ATTR.to_string(), results.to_string());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::frontend::{parse_module, print_module};

    #[test]
    fn dynamic_bell_lowers_to_static_listing() {
        let m = lower_to_base(&parse_module(corpus::BELL_DYNAMIC).unwrap()).unwrap();
        let text = print_module(&m);
        assert!(text.contains("call void @__quantum__qis__h__body(ptr null)"), "{text}");
        assert!(text.contains("call void @__quantum__qis__cnot__body(ptr null, ptr inttoptr (i64 1 to ptr))"));
        assert!(text.contains("\"required_num_qubits\"=\"2\""));
        assert!(!text.contains("allocate"));
        let callees: Vec<&str> = m.entry_calls().map(|(c, _)| c).collect();
        assert_eq!(&callees[4..], ["__quantum__rt__result_record_output"; 2]);
    }

    #[test]
    fn loop_lowers_to_ten_hadamards() {
        let m = lower_to_base(&parse_module(corpus::FOR_LOOP).unwrap()).unwrap();
        assert_eq!(m.entry_calls().count(), 10);
        assert_eq!(m.required_qubits(), Some(10));
        assert_eq!(m.required_results(), Some(0));
    }

    #[test]
    fn feedback_is_rejected() {
        let e = lower_to_base(&parse_module(corpus::FEEDBACK).unwrap()).unwrap_err();
        assert_eq!(e.kind(), "FeedbackRequired");
    }

    #[test]
    fn measurements_sink_past_disjoint_gates() {
        let src = "define void @main() {\nentry:\n  call void @__quantum__qis__h__body(ptr null)\n  call void @__quantum__qis__mz__body(ptr null, ptr null)\n  call void @__quantum__qis__x__body(ptr inttoptr (i64 1 to ptr))\n  ret void\n}\ndeclare void @__quantum__qis__h__body(ptr)\ndeclare void @__quantum__qis__x__body(ptr)\ndeclare void @__quantum__qis__mz__body(ptr, ptr)\n";
        let m = lower_to_base(&parse_module(src).unwrap()).unwrap();
        let callees: Vec<&str> = m.entry_calls().map(|(c, _)| c).collect();
        assert_eq!(callees, [
            "__quantum__qis__h__body",
            "__quantum__qis__x__body",
            "__quantum__qis__mz__body",
            "__quantum__rt__result_record_output"
        ]);
        let blocked = src.replace("x__body(ptr inttoptr (i64 1 to ptr))", "x__body(ptr null)");
        let e = lower_to_base(&parse_module(&blocked).unwrap()).unwrap_err();
        assert_eq!(e.kind(), "MeasurementNotSinkable");
    }

    #[test]
    fn unused_read_is_dropped() {
        let src = "define void @main() {\nentry:\n  call void @__quantum__qis__mz__body(ptr null, ptr null)\n  %m = call i1 @__quantum__rt__read_result(ptr null)\n  ret void\n}\ndeclare void @__quantum__qis__mz__body(ptr, ptr)\ndeclare i1 @__quantum__rt__read_result(ptr)\n";
        let m = lower_to_base(&parse_module(src).unwrap()).unwrap();
        assert!(m.declaration("__quantum__rt__read_result").is_none());
        assert!(m.declaration("__quantum__rt__result_record_output").is_some());
    }

    #[test]
    fn idempotent() {
        for src in [corpus::BELL_DYNAMIC, corpus::FOR_LOOP, corpus::PHI_LOOP, corpus::BELL_STATIC, corpus::EMPTY] {
            let once = lower_to_base(&parse_module(src).unwrap()).unwrap();
            assert_eq!(lower_to_base(&once).unwrap(), once);
        }
    }
}
