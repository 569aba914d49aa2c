//! Loop unrolling and constant folding by partial evaluation.
//!
//! The entry function is executed abstractly: every classical value is either
//! a known constant or a residual SSA value that depends on a measurement or a
//! dynamic qubit handle. Branches on known conditions are taken, memory slots
//! are tracked and removed, and each intrinsic call is emitted into a single
//! residual block in execution order with its operands concretized.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{require_supported, TransformError};
use crate::arith;
use crate::frontend::ast::*;
use crate::frontend::canonicalize;
use crate::intrinsics::{Intrinsic, ParamRole};

#[derive(Debug, Clone)]
enum PVal {
    Known(Value),
    /// Residual value; `taint` holds the qubits whose measurement it depends on.
    Dynamic { value: Value, taint: BTreeSet<String> },
    /// Address of an `alloca` slot.
    Slot(String),
}

enum Outcome {
    Done,
    Stopped,
    Unknown { block: String, taint: BTreeSet<String>, succs: Vec<String> },
}

#[derive(Clone)]
struct Evaluator<'m> {
    func: &'m FuncDef,
    cap: u64,
    env: HashMap<String, PVal>,
    slots: HashMap<String, Option<PVal>>,
    visits: HashMap<String, u64>,
    used_names: HashSet<String>,
    name_counters: HashMap<String, u64>,
    out: Vec<Instruction>,
    ret: Option<(Type, Value)>,
    /// Residual local → stable qubit identity (`arr[k]` for array elements).
    qubit_alias: HashMap<String, String>,
    /// Result identity → qubits most recently measured into it.
    measured: HashMap<String, BTreeSet<String>>,
    touched: BTreeSet<String>,
}

fn addr_key(v: &Value, alias: &HashMap<String, String>) -> String {
    match v {
        Value::StaticAddr { index, .. } => format!("#{index}"),
        Value::NullRef => "#0".to_string(),
        Value::Local(n) => alias.get(n).cloned().unwrap_or_else(|| format!("%{n}")),
        other => format!("{other:?}"),
    }
}

impl<'m> Evaluator<'m> {
    fn new(func: &'m FuncDef, cap: u64) -> Self {
        Evaluator {
            func,
            cap,
            env: HashMap::new(),
            slots: HashMap::new(),
            visits: HashMap::new(),
            used_names: HashSet::new(),
            name_counters: HashMap::new(),
            out: Vec::new(),
            ret: None,
            qubit_alias: HashMap::new(),
            measured: HashMap::new(),
            touched: BTreeSet::new(),
        }
    }

    fn fresh(&mut self, base: &str) -> String {
        if self.used_names.insert(base.to_string()) {
            return base.to_string();
        }
        let counter = self.name_counters.entry(base.to_string()).or_insert(0);
        loop {
            *counter += 1;
            let name = format!("{base}.{counter}");
            if self.used_names.insert(name.clone()) {
                return name;
            }
        }
    }

    fn eval(&self, v: &Value, loc: &Location) -> Result<PVal, TransformError> {
        Ok(match v {
            Value::Local(n) => self
                .env
                .get(n)
                .cloned()
                .ok_or_else(|| TransformError::Unsupported(format!("{loc}: `%{n}` has no value on this path")))?,
            Value::NullRef => PVal::Known(Value::qubit(0)),
            other => PVal::Known(other.clone()),
        })
    }

    /// The operand to emit for `v`, with its taint.
    fn residual(&self, v: &Value, loc: &Location) -> Result<(Value, BTreeSet<String>), TransformError> {
        match self.eval(v, loc)? {
            PVal::Known(k) => Ok((k, BTreeSet::new())),
            PVal::Dynamic { value, taint } => Ok((value, taint)),
            PVal::Slot(s) => Err(TransformError::Unsupported(format!("{loc}: address of slot `%{s}` escapes"))),
        }
    }

    fn known_int(&self, v: &Value, loc: &Location) -> Result<Option<i64>, TransformError> {
        Ok(match self.eval(v, loc)? {
            PVal::Known(Value::Int { value, .. }) => Some(value),
            _ => None,
        })
    }

    fn emit_dynamic(&mut self, result: &str, make: impl FnOnce(String) -> Instruction, taint: BTreeSet<String>) {
        let name = self.fresh(result);
        self.out.push(make(name.clone()));
        self.env.insert(result.to_string(), PVal::Dynamic { value: Value::Local(name), taint });
    }

    fn step(&mut self, inst: &Instruction, loc: &Location) -> Result<(), TransformError> {
        match inst {
            Instruction::Alloca { result, .. } => {
                self.slots.insert(result.clone(), None);
                self.env.insert(result.clone(), PVal::Slot(result.clone()));
            }
            Instruction::Store { value, slot, .. } => {
                let PVal::Slot(s) = self.eval(slot, loc)? else {
                    return Err(TransformError::Unsupported(format!("{loc}: store through a non-slot pointer")));
                };
                let v = self.eval(value, loc)?;
                if let PVal::Slot(inner) = &v {
                    return Err(TransformError::Unsupported(format!("{loc}: address of slot `%{inner}` stored")));
                }
                self.slots.insert(s, Some(v));
            }
            Instruction::Load { result, slot, .. } => {
                let PVal::Slot(s) = self.eval(slot, loc)? else {
                    return Err(TransformError::Unsupported(format!("{loc}: load through a non-slot pointer")));
                };
                let v = self.slots.get(&s).cloned().flatten().ok_or_else(|| {
                    TransformError::Unsupported(format!("{loc}: load of slot `%{s}` before any store"))
                })?;
                self.env.insert(result.clone(), v);
            }
            Instruction::BinOp { result, op, width, lhs, rhs } => {
                match (self.known_int(lhs, loc)?, self.known_int(rhs, loc)?) {
                    (Some(a), Some(b)) => {
                        let v = arith::eval_binop(*op, *width, a, b);
                        self.env.insert(result.clone(), PVal::Known(Value::int(*width, v)));
                    }
                    _ => {
                        let (l, mut taint) = self.residual(lhs, loc)?;
                        let (r, t2) = self.residual(rhs, loc)?;
                        taint.extend(t2);
                        let (op, width) = (*op, *width);
                        self.emit_dynamic(
                            result,
                            |result| Instruction::BinOp { result, op, width, lhs: l, rhs: r },
                            taint,
                        );
                    }
                }
            }
            Instruction::ICmp { result, pred, width, lhs, rhs } => {
                match (self.known_int(lhs, loc)?, self.known_int(rhs, loc)?) {
                    (Some(a), Some(b)) => {
                        let v = arith::eval_icmp(*pred, *width, a, b);
                        self.env.insert(result.clone(), PVal::Known(Value::int(IntWidth::I1, v as i64)));
                    }
                    _ => {
                        let (l, mut taint) = self.residual(lhs, loc)?;
                        let (r, t2) = self.residual(rhs, loc)?;
                        taint.extend(t2);
                        let (pred, width) = (*pred, *width);
                        self.emit_dynamic(
                            result,
                            |result| Instruction::ICmp { result, pred, width, lhs: l, rhs: r },
                            taint,
                        );
                    }
                }
            }
            Instruction::Ext { result, kind, from, to, source } => match self.known_int(source, loc)? {
                Some(v) => {
                    let v = arith::eval_ext(*kind, *from, *to, v);
                    self.env.insert(result.clone(), PVal::Known(Value::int(*to, v)));
                }
                None => {
                    let (s, taint) = self.residual(source, loc)?;
                    let (kind, from, to) = (*kind, *from, *to);
                    self.emit_dynamic(result, |result| Instruction::Ext { result, kind, from, to, source: s }, taint);
                }
            },
            Instruction::IntToAddr { result, from, source } => match self.known_int(source, loc)? {
                Some(v) => {
                    let index = arith::as_unsigned(*from, v);
                    self.env.insert(result.clone(), PVal::Known(Value::qubit(index)));
                }
                None => {
                    let (s, taint) = self.residual(source, loc)?;
                    let from = *from;
                    self.emit_dynamic(result, |result| Instruction::IntToAddr { result, from, source: s }, taint);
                }
            },
            Instruction::Select { result, cond, ty, if_true, if_false } => match self.known_int(cond, loc)? {
                Some(c) => {
                    let chosen = if c & 1 == 1 { if_true } else { if_false };
                    let v = self.eval(chosen, loc)?;
                    self.env.insert(result.clone(), v);
                }
                None => {
                    let (c, mut taint) = self.residual(cond, loc)?;
                    let (t, t1) = self.residual(if_true, loc)?;
                    let (f, t2) = self.residual(if_false, loc)?;
                    taint.extend(t1);
                    taint.extend(t2);
                    let ty = *ty;
                    self.emit_dynamic(
                        result,
                        |result| Instruction::Select { result, cond: c, ty, if_true: t, if_false: f },
                        taint,
                    );
                }
            },
            Instruction::Call { result, ret_ty, callee, args } => {
                let intrinsic = Intrinsic::lookup(callee).ok_or_else(|| {
                    TransformError::Unsupported(format!("{loc}: call to `@{callee}` is not an intrinsic"))
                })?;
                let mut new_args = Vec::with_capacity(args.len());
                let mut taint = BTreeSet::new();
                for a in args {
                    let (value, t) = self.residual(&a.value, loc)?;
                    taint.extend(t);
                    new_args.push(Arg { ty: a.ty, attrs: a.attrs.clone(), value });
                }
                let roles = intrinsic.params();
                let key = |role: ParamRole, this: &Self| -> Vec<String> {
                    roles
                        .iter()
                        .zip(&new_args)
                        .filter(|(r, _)| **r == role)
                        .map(|(_, a)| addr_key(&a.value, &this.qubit_alias))
                        .collect()
                };
                let qubits = key(ParamRole::Qubit, self);
                let results = key(ParamRole::Result, self);
                let mut result_taint = BTreeSet::new();
                match intrinsic {
                    Intrinsic::Gate(_) | Intrinsic::Reset => self.touched.extend(qubits),
                    Intrinsic::Measure => {
                        self.touched.extend(qubits.iter().cloned());
                        self.measured.insert(results[0].clone(), qubits.into_iter().collect());
                    }
                    Intrinsic::ReadResult => {
                        result_taint = self.measured.get(&results[0]).cloned().unwrap_or_default();
                    }
                    _ => {}
                }
                let array_element = match (intrinsic, &new_args[..]) {
                    (Intrinsic::ArrayGetElementPtr1d, [arr, Arg { value: Value::Int { value: k, .. }, .. }]) => {
                        Some(format!("{}[{k}]", addr_key(&arr.value, &self.qubit_alias)))
                    }
                    _ => None,
                };
                let call = |result| Instruction::Call {
                    result,
                    ret_ty: *ret_ty,
                    callee: callee.clone(),
                    args: new_args,
                };
                match result {
                    Some(r) => {
                        result_taint.extend(taint);
                        self.emit_dynamic(r, |name| call(Some(name)), result_taint);
                        if let (Some(alias), Some(PVal::Dynamic { value: Value::Local(name), .. })) =
                            (array_element, self.env.get(r))
                        {
                            self.qubit_alias.insert(name.clone(), alias);
                        }
                    }
                    None => self.out.push(call(None)),
                }
            }
        }
        Ok(())
    }

    fn run(&mut self, start: &str, pred: Option<&str>, stop: Option<&str>) -> Result<Outcome, TransformError> {
        let mut label = start.to_string();
        let mut pred = pred.map(str::to_string);
        loop {
            if stop == Some(label.as_str()) {
                return Ok(Outcome::Stopped);
            }
            let visits = self.visits.entry(label.clone()).or_insert(0);
            *visits += 1;
            if *visits > self.cap.saturating_add(1) {
                return Err(TransformError::CapExceeded { block: label, cap: self.cap });
            }
            let func = self.func;
            let block = func
                .block(&label)
                .ok_or_else(|| TransformError::Unsupported(format!("branch to unknown block `{label}`")))?;
            if !block.phis.is_empty() {
                let from = pred.clone().unwrap_or_default();
                let loc = Location { block: label.clone(), index: Some(0) };
                let mut incoming = Vec::new();
                for phi in &block.phis {
                    let (v, _) = phi.incoming.iter().find(|(_, l)| *l == from).ok_or_else(|| {
                        TransformError::Unsupported(format!("{loc}: phi `%{}` has no entry for `{from}`", phi.result))
                    })?;
                    incoming.push((phi.result.clone(), self.eval(v, &loc)?));
                }
                self.env.extend(incoming);
            }
            for (i, inst) in block.instructions.iter().enumerate() {
                self.step(inst, &Location { block: label.clone(), index: Some(i) })?;
            }
            let loc = Location { block: label.clone(), index: None };
            let next = match &block.terminator {
                Terminator::Br(l) => l.clone(),
                Terminator::CondBr { cond, if_true, if_false } => match self.eval(cond, &loc)? {
                    PVal::Known(Value::Int { value, .. }) => {
                        if value & 1 == 1 {
                            if_true.clone()
                        } else {
                            if_false.clone()
                        }
                    }
                    PVal::Dynamic { taint, .. } => {
                        return Ok(Outcome::Unknown {
                            block: label,
                            taint,
                            succs: vec![if_true.clone(), if_false.clone()],
                        });
                    }
                    _ => return Err(TransformError::Unsupported(format!("{loc}: branch on a non-integer value"))),
                },
                Terminator::Ret(v) => {
                    self.ret = match v {
                        Some((ty, v)) => Some((*ty, self.residual(v, &loc)?.0)),
                        None => None,
                    };
                    return Ok(Outcome::Done);
                }
            };
            pred = Some(label);
            label = next;
        }
    }

    /// Collects qubits touched on any path from `block`'s successors up to
    /// `stop`.
    fn explore(&self, block: &str, succs: &[String], stop: Option<&str>, depth: u32, touched: &mut BTreeSet<String>) {
        for s in succs {
            let mut e = self.clone();
            e.touched.clear();
            let outcome = e.run(s, Some(block), stop);
            touched.extend(e.touched.iter().cloned());
            if let Ok(Outcome::Unknown { block: b, succs: next, .. }) = outcome {
                if depth < 6 {
                    e.explore(&b, &next, stop, depth + 1, touched);
                }
            }
        }
    }
}

/// Immediate post-dominator of every block, by label.
fn immediate_post_dominators(func: &FuncDef) -> HashMap<String, String> {
    let n = func.blocks.len();
    let index: HashMap<&str, usize> = func.blocks.iter().enumerate().map(|(i, b)| (b.label.as_str(), i)).collect();
    let succs: Vec<Vec<usize>> = func
        .blocks
        .iter()
        .map(|b| b.terminator.successors().into_iter().filter_map(|s| index.get(s).copied()).collect())
        .collect();
    let all: BTreeSet<usize> = (0..n).collect();
    let mut pdom: Vec<BTreeSet<usize>> =
        (0..n).map(|i| if succs[i].is_empty() { BTreeSet::from([i]) } else { all.clone() }).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for i in (0..n).rev() {
            if succs[i].is_empty() {
                continue;
            }
            let mut set = succs[i]
                .iter()
                .map(|&s| pdom[s].clone())
                .reduce(|a, b| a.intersection(&b).copied().collect())
                .unwrap_or_default();
            set.insert(i);
            if set != pdom[i] {
                pdom[i] = set;
                changed = true;
            }
        }
    }
    let mut out = HashMap::new();
    for i in 0..n {
        let mut strict = pdom[i].clone();
        strict.remove(&i);
        if let Some(&d) = strict.iter().find(|&&d| pdom[d] == strict) {
            out.insert(func.blocks[i].label.clone(), func.blocks[d].label.clone());
        }
    }
    out
}

/// Unrolls every loop with statically known bounds and folds known
/// arithmetic, leaving a single-block entry function.
///
/// A block entered more than `iteration_cap + 1` times (a loop running more
/// than `iteration_cap` iterations) fails with `CapExceeded`. A branch on a
/// value derived from a measurement fails with `DataDependent`; its
/// `feedback` flag is set when a path out of the branch acts on a qubit whose
/// measurement the condition depends on.
pub fn unroll_and_fold(module: &QirModule, iteration_cap: u64) -> Result<QirModule, TransformError> {
    require_supported(module)?;
    let func = &module.entry;
    let mut ev = Evaluator::new(func, iteration_cap.max(1));
    let entry_label = func.blocks[0].label.clone();
    match ev.run(&entry_label, None, None)? {
        Outcome::Done | Outcome::Stopped => {}
        Outcome::Unknown { block, taint, succs } => {
            let stop = immediate_post_dominators(func).get(&block).cloned();
            let mut touched = BTreeSet::new();
            ev.explore(&block, &succs, stop.as_deref(), 0, &mut touched);
            let feedback = touched.intersection(&taint).next().is_some();
            return Err(TransformError::DataDependent { block, feedback });
        }
    }
    let mut out = module.clone();
    out.entry.blocks = vec![BasicBlock {
        label: entry_label,
        phis: Vec::new(),
        instructions: ev.out,
        terminator: Terminator::Ret(ev.ret),
    }];
    canonicalize(&mut out);
    Ok(out)
}
