//! Replacement of dynamic qubit handles by static addresses.
//!
//! Works like register allocation over a straight-line program: each
//! allocation takes the lowest index that is neither live nor used as a
//! static address elsewhere in the module, and a release returns the index to
//! the pool.

use std::collections::{BTreeSet, HashMap};

use super::TransformError;
use crate::frontend::ast::*;
use crate::frontend::canonicalize;
use crate::intrinsics::{Intrinsic, ParamRole};

/// Where each dynamic handle ended up.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AllocationMap {
    /// Handle name (`arr[k]` for array elements) → static index, in
    /// allocation order.
    pub assignments: Vec<(String, u64)>,
    /// One past the largest index occupied at any point.
    pub high_water_mark: u64,
}

enum Handle {
    Qubit { index: u64, owner: String },
    Array { indices: Vec<u64> },
}

struct Pool {
    reserved: BTreeSet<u64>,
    live: BTreeSet<u64>,
    ever_used: BTreeSet<u64>,
    high_water: u64,
}

impl Pool {
    fn take(&mut self) -> (u64, bool) {
        let index = (0..).find(|i| !self.reserved.contains(i) && !self.live.contains(i)).unwrap();
        self.live.insert(index);
        let reused = !self.ever_used.insert(index);
        self.high_water = self.high_water.max(index + 1);
        (index, reused)
    }
}

pub fn allocate_static_addresses(module: &QirModule) -> Result<QirModule, TransformError> {
    allocate_static_addresses_with_map(module).map(|(m, _)| m)
}

/// As [`allocate_static_addresses`], also returning the handle assignment.
///
/// A reused index gets a `reset` where the new allocation was, so the
/// qubit starts in |0⟩ as a fresh allocation would.
pub fn allocate_static_addresses_with_map(module: &QirModule) -> Result<(QirModule, AllocationMap), TransformError> {
    if module.entry.blocks.len() != 1 || !module.entry.blocks[0].phis.is_empty() {
        return Err(TransformError::Unsupported(
            "static allocation needs a straight-line entry function (unroll first)".to_string(),
        ));
    }
    let block = &module.entry.blocks[0];
    let mut pool = Pool { reserved: BTreeSet::new(), live: BTreeSet::new(), ever_used: BTreeSet::new(), high_water: 0 };
    for (callee, args) in module.entry_calls() {
        let Some(intrinsic) = Intrinsic::lookup(callee) else { continue };
        for (role, a) in intrinsic.params().into_iter().zip(args) {
            if let (ParamRole::Qubit, Some(i)) = (role, a.value.static_index()) {
                pool.reserved.insert(i);
                pool.high_water = pool.high_water.max(i + 1);
            }
        }
    }
    let static_high_water = pool.high_water;

    let mut handles: HashMap<String, Handle> = HashMap::new();
    let mut released: BTreeSet<String> = BTreeSet::new();
    let mut map = AllocationMap::default();
    let mut out = Vec::new();
    let mut any_allocation = false;
    let mut inserted_reset = false;

    for (i, inst) in block.instructions.iter().enumerate() {
        let location = Location { block: block.label.clone(), index: Some(i) }.to_string();
        let check_handle = |name: &str, released: &BTreeSet<String>| -> Result<(), TransformError> {
            if released.contains(name) {
                Err(TransformError::UseAfterRelease { location: location.clone(), handle: name.to_string() })
            } else {
                Ok(())
            }
        };
        let intrinsic = match inst {
            Instruction::Call { callee, .. } => Intrinsic::lookup(callee),
            _ => None,
        };
        let Some(intrinsic) = intrinsic else {
            if let Some(h) = inst.operands().iter().filter_map(|v| v.as_local()).find(|n| handles.contains_key(*n)) {
                return Err(TransformError::EscapingHandle { location, handle: h.to_string() });
            }
            out.push(inst.clone());
            continue;
        };
        let Instruction::Call { result, args, .. } = inst else { unreachable!() };
        let const_arg = |k: usize| match args.get(k).map(|a| &a.value) {
            Some(Value::Int { value, .. }) => Ok(*value),
            _ => Err(TransformError::NonConstantAllocation {
                location: location.clone(),
                reason: "size or index is not a constant".to_string(),
            }),
        };
        let handle_arg = |k: usize| args.get(k).and_then(|a| a.value.as_local()).map(str::to_string);
        match intrinsic {
            Intrinsic::QubitAllocate | Intrinsic::QubitAllocateArray => {
                any_allocation = true;
                let name = result.clone().unwrap_or_default();
                let count = if intrinsic == Intrinsic::QubitAllocate { 1 } else { const_arg(0)? };
                if count < 0 {
                    return Err(TransformError::NonConstantAllocation {
                        location,
                        reason: format!("negative array size {count}"),
                    });
                }
                let mut indices = Vec::new();
                for k in 0..count {
                    let (index, reused) = pool.take();
                    if reused {
                        inserted_reset = true;
                        out.push(Instruction::Call {
                            result: None,
                            ret_ty: Type::Void,
                            callee: Intrinsic::Reset.symbol(),
                            args: vec![Arg::ptr(Value::qubit(index))],
                        });
                    }
                    let label = if intrinsic == Intrinsic::QubitAllocate { name.clone() } else { format!("{name}[{k}]") };
                    map.assignments.push((label, index));
                    indices.push(index);
                }
                let h = if intrinsic == Intrinsic::QubitAllocate {
                    Handle::Qubit { index: indices[0], owner: name.clone() }
                } else {
                    Handle::Array { indices }
                };
                handles.insert(name, h);
            }
            Intrinsic::ArrayGetElementPtr1d => {
                let arr = handle_arg(0).unwrap_or_default();
                check_handle(&arr, &released)?;
                let k = const_arg(1)?;
                let Some(Handle::Array { indices }) = handles.get(&arr) else {
                    return Err(TransformError::NonConstantAllocation {
                        location,
                        reason: "element access on something other than an allocated array".to_string(),
                    });
                };
                let index = *usize::try_from(k).ok().and_then(|k| indices.get(k)).ok_or_else(|| {
                    TransformError::NonConstantAllocation {
                        location: location.clone(),
                        reason: format!("index {k} out of range for `%{arr}` of {} qubits", indices.len()),
                    }
                })?;
                if let Some(r) = result {
                    handles.insert(r.clone(), Handle::Qubit { index, owner: arr });
                }
            }
            Intrinsic::QubitRelease | Intrinsic::QubitReleaseArray => {
                let name = handle_arg(0).unwrap_or_default();
                check_handle(&name, &released)?;
                let freed = match handles.get(&name) {
                    Some(Handle::Qubit { index, .. }) if intrinsic == Intrinsic::QubitRelease => vec![*index],
                    Some(Handle::Array { indices }) if intrinsic == Intrinsic::QubitReleaseArray => indices.clone(),
                    _ => {
                        return Err(TransformError::NonConstantAllocation {
                            location,
                            reason: format!("release of `%{name}`, which is not a matching allocation"),
                        });
                    }
                };
                for idx in &freed {
                    pool.live.remove(idx);
                }
                let owned: Vec<String> = handles
                    .iter()
                    .filter(|(n, h)| **n == name || matches!(h, Handle::Qubit { owner, .. } if *owner == name))
                    .map(|(n, _)| n.clone())
                    .collect();
                released.extend(owned);
            }
            _ => {
                let mut new_args = args.clone();
                for a in &mut new_args {
                    let Some(n) = a.value.as_local() else { continue };
                    match handles.get(n) {
                        Some(Handle::Qubit { index, .. }) => {
                            check_handle(n, &released)?;
                            a.value = Value::qubit(*index);
                        }
                        Some(Handle::Array { .. }) => {
                            return Err(TransformError::EscapingHandle { location, handle: n.to_string() });
                        }
                        None => {}
                    }
                }
                let mut call = inst.clone();
                if let Instruction::Call { args, .. } = &mut call {
                    *args = new_args;
                }
                out.push(call);
            }
        }
    }
    if let Terminator::Ret(Some((_, Value::Local(n)))) = &block.terminator {
        if handles.contains_key(n) {
            let location = Location { block: block.label.clone(), index: None }.to_string();
            return Err(TransformError::EscapingHandle { location, handle: n.clone() });
        }
    }

    let mut result = module.clone();
    result.entry.blocks[0].instructions = out;
    if any_allocation {
        result.declarations.retain(|d| !Intrinsic::lookup(&d.name).is_some_and(Intrinsic::is_allocation));
        if inserted_reset && result.declaration(&Intrinsic::Reset.symbol()).is_none() {
            result.declarations.push(Intrinsic::Reset.declaration());
        }
        let hwm = pool.high_water.max(static_high_water);
        let existing = result.required_qubits().unwrap_or(0);
        result.attributes.insert(REQUIRED_QUBITS_ATTR.to_string(), hwm.max(existing).to_string());
        map.high_water_mark = hwm;
    } else {
        map.high_water_mark = static_high_water;
    }
    canonicalize(&mut result);
    Ok((result, map))
}
