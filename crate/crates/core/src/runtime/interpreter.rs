//! Shot-by-shot interpreter for the entry function.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use super::rng::ShotRng;
use super::statevector::StateVector;
use super::ExecutionResult;
use crate::arith;
use crate::frontend::ast::*;
use crate::gate::GateKind;
use crate::intrinsics::{Intrinsic, ParamRole};

/// A program-level qubit: a static address or a handle from an allocation call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitKey {
    Static(u64),
    Dynamic(u64),
}

impl fmt::Display for QubitKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitKey::Static(i) => write!(f, "qubit {i}"),
            QubitKey::Dynamic(h) => write!(f, "allocated qubit #{h}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuntimeOptions {
    pub max_qubits: usize,
    /// Instructions executed per shot before giving up.
    pub step_limit: u64,
}

impl Default for RuntimeOptions {
    fn default() -> Self {
        RuntimeOptions { max_qubits: 26, step_limit: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeErrorKind {
    #[error("UnknownIntrinsic: `@{0}`")]
    UnknownIntrinsic(String),
    #[error("QubitLimit: more than {0} qubits")]
    QubitLimit(usize),
    #[error("ReadBeforeMeasure: result {0} read before any measurement")]
    ReadBeforeMeasure(u64),
    #[error("StepLimit: more than {0} instructions executed")]
    StepLimit(u64),
    #[error("UseAfterRelease: {0} used after release")]
    UseAfterRelease(QubitKey),
    #[error("ReleaseNotClassical: {0} released while not in a basis state")]
    ReleaseNotClassical(QubitKey),
    #[error("InvalidOperand: {0}")]
    InvalidOperand(String),
}

impl RuntimeErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            RuntimeErrorKind::UnknownIntrinsic(_) => "UnknownIntrinsic",
            RuntimeErrorKind::QubitLimit(_) => "QubitLimit",
            RuntimeErrorKind::ReadBeforeMeasure(_) => "ReadBeforeMeasure",
            RuntimeErrorKind::StepLimit(_) => "StepLimit",
            RuntimeErrorKind::UseAfterRelease(_) => "UseAfterRelease",
            RuntimeErrorKind::ReleaseNotClassical(_) => "ReleaseNotClassical",
            RuntimeErrorKind::InvalidOperand(_) => "InvalidOperand",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct RuntimeError {
    pub shot: u64,
    pub location: Option<Location>,
    pub kind: RuntimeErrorKind,
}

impl fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(loc) => write!(f, "shot {}, {}: {}", self.shot, loc, self.kind),
            None => write!(f, "shot {}: {}", self.shot, self.kind),
        }
    }
}

/// Simulator state of one shot.
#[derive(Debug, Clone)]
pub struct RuntimeState {
    state: StateVector,
    index_of: HashMap<QubitKey, usize>,
    /// Program qubit at each simulator index.
    order: Vec<QubitKey>,
    arrays: HashMap<u64, Vec<u64>>,
    next_handle: u64,
    results: BTreeMap<u64, bool>,
    rng: ShotRng,
    recorded: Option<String>,
    max_qubits: usize,
    peak: usize,
}

impl RuntimeState {
    pub fn new(seed: u64, shot: u64, options: &RuntimeOptions) -> RuntimeState {
        RuntimeState {
            state: StateVector::new(0),
            index_of: HashMap::new(),
            order: Vec::new(),
            arrays: HashMap::new(),
            next_handle: 0,
            results: BTreeMap::new(),
            rng: ShotRng::new(seed, shot),
            recorded: None,
            max_qubits: options.max_qubits,
            peak: 0,
        }
    }

    fn add(&mut self, key: QubitKey) -> Result<usize, RuntimeErrorKind> {
        if self.state.num_qubits() >= self.max_qubits {
            return Err(RuntimeErrorKind::QubitLimit(self.max_qubits));
        }
        let idx = self.state.add_qubit();
        self.index_of.insert(key, idx);
        self.order.push(key);
        self.peak = self.peak.max(self.state.num_qubits());
        Ok(idx)
    }

    /// Simulator index of `key`, allocating static addresses on first use.
    pub fn qubit_index(&mut self, key: QubitKey) -> Result<usize, RuntimeErrorKind> {
        match (self.index_of.get(&key), key) {
            (Some(&i), _) => Ok(i),
            (None, QubitKey::Static(_)) => self.add(key),
            (None, QubitKey::Dynamic(_)) => Err(RuntimeErrorKind::UseAfterRelease(key)),
        }
    }

    pub fn allocate(&mut self) -> Result<QubitKey, RuntimeErrorKind> {
        let key = QubitKey::Dynamic(self.next_handle);
        self.next_handle += 1;
        self.add(key)?;
        Ok(key)
    }

    pub fn allocate_array(&mut self, n: u64) -> Result<u64, RuntimeErrorKind> {
        let id = self.next_handle;
        self.next_handle += 1;
        let mut handles = Vec::new();
        for _ in 0..n {
            let QubitKey::Dynamic(h) = self.allocate()? else { unreachable!() };
            handles.push(h);
        }
        self.arrays.insert(id, handles);
        Ok(id)
    }

    pub fn array_element(&self, array: u64, k: i64) -> Result<QubitKey, RuntimeErrorKind> {
        let elems = self
            .arrays
            .get(&array)
            .ok_or_else(|| RuntimeErrorKind::InvalidOperand("element access on a released array".into()))?;
        usize::try_from(k)
            .ok()
            .and_then(|k| elems.get(k))
            .map(|&h| QubitKey::Dynamic(h))
            .ok_or_else(|| RuntimeErrorKind::InvalidOperand(format!("index {k} out of range for {} qubits", elems.len())))
    }

    /// Removes a qubit that is in a definite basis state.
    pub fn release(&mut self, key: QubitKey) -> Result<(), RuntimeErrorKind> {
        let idx = *self.index_of.get(&key).ok_or(RuntimeErrorKind::UseAfterRelease(key))?;
        let p1 = self.state.prob_one(idx);
        if p1.min(1.0 - p1) > 1e-10 {
            return Err(RuntimeErrorKind::ReleaseNotClassical(key));
        }
        self.state.remove_qubit(idx);
        self.index_of.remove(&key);
        let moved = self.order.pop().unwrap();
        if moved != key {
            self.order[idx] = moved;
            self.index_of.insert(moved, idx);
        }
        Ok(())
    }

    pub fn release_array(&mut self, array: u64) -> Result<(), RuntimeErrorKind> {
        let handles = self
            .arrays
            .remove(&array)
            .ok_or_else(|| RuntimeErrorKind::InvalidOperand("array released twice".into()))?;
        handles.into_iter().try_for_each(|h| self.release(QubitKey::Dynamic(h)))
    }

    pub fn apply_gate(&mut self, kind: GateKind, params: &[f64], qubits: &[QubitKey]) -> Result<(), RuntimeErrorKind> {
        let targets = qubits.iter().map(|&k| self.qubit_index(k)).collect::<Result<Vec<_>, _>>()?;
        self.state
            .apply_gate(kind, params, &targets)
            .map_err(|e| RuntimeErrorKind::InvalidOperand(e.to_string()))
    }

    /// Measures `qubit` into result `result`; always takes one draw.
    pub fn measure(&mut self, qubit: QubitKey, result: u64) -> Result<bool, RuntimeErrorKind> {
        let idx = self.qubit_index(qubit)?;
        let bit = self.state.measure(idx, self.rng.next_f64());
        self.results.insert(result, bit);
        Ok(bit)
    }

    /// Returns the qubit to |0⟩. Draws only when the qubit is not already in
    /// a basis state.
    pub fn reset(&mut self, qubit: QubitKey) -> Result<(), RuntimeErrorKind> {
        let idx = self.qubit_index(qubit)?;
        let p1 = self.state.prob_one(idx);
        let one = if p1 < 1e-12 {
            false
        } else if p1 > 1.0 - 1e-12 {
            true
        } else {
            self.state.measure(idx, self.rng.next_f64())
        };
        self.state.collapse(idx, one);
        if one {
            self.state.apply_gate(GateKind::X, &[], &[idx]).unwrap();
        }
        Ok(())
    }

    pub fn read_result(&self, result: u64) -> Result<bool, RuntimeErrorKind> {
        self.results.get(&result).copied().ok_or(RuntimeErrorKind::ReadBeforeMeasure(result))
    }

    /// Appends a result to the output; a never-measured result records 0.
    pub fn record_result(&mut self, result: u64) {
        let bit = self.results.get(&result).copied().unwrap_or(false);
        self.recorded.get_or_insert_with(String::new).push(if bit { '1' } else { '0' });
    }

    pub fn mark_recording(&mut self) {
        self.recorded.get_or_insert_with(String::new);
    }

    /// The shot's output: the recorded bits, or every measured result in
    /// ascending index order when nothing was recorded.
    pub fn bits(&self) -> String {
        match &self.recorded {
            Some(b) => b.clone(),
            None => self.results.values().map(|&b| if b { '1' } else { '0' }).collect(),
        }
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn qubit_order(&self) -> &[QubitKey] {
        &self.order
    }

    pub fn peak_qubits(&self) -> usize {
        self.peak
    }
}

/// Everything observable about one shot.
#[derive(Debug, Clone)]
pub struct ShotTrace {
    pub bits: String,
    pub final_state: StateVector,
    pub final_order: Vec<QubitKey>,
    /// State just before the first measurement or reset (the final state if
    /// there is none).
    pub pre_measurement: StateVector,
    pub pre_measurement_order: Vec<QubitKey>,
    pub peak_qubits: usize,
}

#[derive(Debug, Clone)]
enum RVal {
    Int(i64),
    Float(f64),
    Addr(u64),
    Qubit(QubitKey),
    Array(u64),
    Slot(String),
    Global,
}

struct Shot<'m> {
    func: &'m FuncDef,
    rt: RuntimeState,
    env: HashMap<&'m str, RVal>,
    slots: HashMap<String, Option<RVal>>,
    steps: u64,
    step_limit: u64,
    snapshot: Option<(StateVector, Vec<QubitKey>)>,
}

type Fail = (Option<Location>, RuntimeErrorKind);

fn invalid(msg: impl Into<String>) -> RuntimeErrorKind {
    RuntimeErrorKind::InvalidOperand(msg.into())
}

impl<'m> Shot<'m> {
    fn eval(&self, v: &Value) -> Result<RVal, RuntimeErrorKind> {
        Ok(match v {
            Value::Local(n) => self.env.get(n.as_str()).cloned().ok_or_else(|| invalid(format!("`%{n}` is undefined")))?,
            Value::Int { value, .. } => RVal::Int(*value),
            Value::Float(x) => RVal::Float(*x),
            Value::NullRef => RVal::Addr(0),
            Value::StaticAddr { index, .. } => RVal::Addr(*index),
            Value::Global(_) => RVal::Global,
        })
    }

    fn int(&self, v: &Value) -> Result<i64, RuntimeErrorKind> {
        match self.eval(v)? {
            RVal::Int(i) => Ok(i),
            other => Err(invalid(format!("expected an integer, got {other:?}"))),
        }
    }

    fn tick(&mut self) -> Result<(), RuntimeErrorKind> {
        self.steps += 1;
        if self.steps > self.step_limit {
            Err(RuntimeErrorKind::StepLimit(self.step_limit))
        } else {
            Ok(())
        }
    }

    fn snapshot(&mut self) {
        if self.snapshot.is_none() {
            self.snapshot = Some((self.rt.state().clone(), self.rt.qubit_order().to_vec()));
        }
    }

    fn call(&mut self, callee: &str, args: &[Arg]) -> Result<Option<RVal>, RuntimeErrorKind> {
        let intrinsic = Intrinsic::lookup(callee).ok_or_else(|| RuntimeErrorKind::UnknownIntrinsic(callee.to_string()))?;
        let roles = intrinsic.params();
        if roles.len() != args.len() {
            return Err(invalid(format!("`@{callee}` takes {} arguments", roles.len())));
        }
        let vals = args.iter().map(|a| self.eval(&a.value)).collect::<Result<Vec<_>, _>>()?;
        let mut qubits = Vec::new();
        let mut results = Vec::new();
        let mut params = Vec::new();
        let mut ints = Vec::new();
        let mut arrays = Vec::new();
        for (role, v) in roles.iter().zip(&vals) {
            match (role, v) {
                (ParamRole::Qubit, RVal::Addr(i)) => qubits.push(QubitKey::Static(*i)),
                (ParamRole::Qubit, RVal::Qubit(k)) => qubits.push(*k),
                (ParamRole::Result, RVal::Addr(i)) => results.push(*i),
                (ParamRole::Angle, RVal::Float(x)) => params.push(*x),
                (ParamRole::Angle, RVal::Int(i)) => params.push(*i as f64),
                (ParamRole::Int64, RVal::Int(i)) => ints.push(*i),
                (ParamRole::Array, RVal::Array(a)) => arrays.push(*a),
                (ParamRole::Label, _) => {}
                (role, v) => return Err(invalid(format!("`@{callee}`: {v:?} passed as {role:?}"))),
            }
        }
        let rt = &mut self.rt;
        Ok(match intrinsic {
            Intrinsic::Gate(kind) => {
                rt.apply_gate(kind, &params, &qubits)?;
                None
            }
            Intrinsic::Measure => {
                self.snapshot();
                self.rt.measure(qubits[0], results[0])?;
                None
            }
            Intrinsic::Reset => {
                self.snapshot();
                self.rt.reset(qubits[0])?;
                None
            }
            Intrinsic::QubitAllocate => Some(RVal::Qubit(rt.allocate()?)),
            Intrinsic::QubitAllocateArray => {
                let n = u64::try_from(ints[0]).map_err(|_| invalid(format!("negative array size {}", ints[0])))?;
                Some(RVal::Array(rt.allocate_array(n)?))
            }
            Intrinsic::ArrayGetElementPtr1d => Some(RVal::Qubit(rt.array_element(arrays[0], ints[0])?)),
            Intrinsic::QubitRelease => {
                rt.release(qubits[0])?;
                None
            }
            Intrinsic::QubitReleaseArray => {
                rt.release_array(arrays[0])?;
                None
            }
            Intrinsic::ReadResult => Some(RVal::Int(rt.read_result(results[0])? as i64)),
            Intrinsic::ResultRecordOutput => {
                rt.record_result(results[0]);
                None
            }
            Intrinsic::ArrayRecordOutput => {
                rt.mark_recording();
                None
            }
        })
    }

    fn exec(&mut self, inst: &'m Instruction) -> Result<(), RuntimeErrorKind> {
        let val = match inst {
            Instruction::Call { callee, args, .. } => self.call(callee, args)?,
            Instruction::Alloca { result, .. } => {
                self.slots.insert(result.clone(), None);
                Some(RVal::Slot(result.clone()))
            }
            Instruction::Store { value, slot, .. } => {
                let RVal::Slot(s) = self.eval(slot)? else { return Err(invalid("store through a non-slot pointer")) };
                let v = self.eval(value)?;
                self.slots.insert(s, Some(v));
                None
            }
            Instruction::Load { slot, .. } => {
                let RVal::Slot(s) = self.eval(slot)? else { return Err(invalid("load through a non-slot pointer")) };
                let v = self.slots.get(&s).cloned().flatten();
                Some(v.ok_or_else(|| invalid(format!("load of slot `%{s}` before any store")))?)
            }
            Instruction::BinOp { op, width, lhs, rhs, .. } => {
                Some(RVal::Int(arith::eval_binop(*op, *width, self.int(lhs)?, self.int(rhs)?)))
            }
            Instruction::ICmp { pred, width, lhs, rhs, .. } => {
                Some(RVal::Int(arith::eval_icmp(*pred, *width, self.int(lhs)?, self.int(rhs)?) as i64))
            }
            Instruction::Ext { kind, from, to, source, .. } => {
                Some(RVal::Int(arith::eval_ext(*kind, *from, *to, self.int(source)?)))
            }
            Instruction::IntToAddr { from, source, .. } => Some(RVal::Addr(arith::as_unsigned(*from, self.int(source)?))),
            Instruction::Select { cond, if_true, if_false, .. } => {
                let chosen = if self.int(cond)? & 1 == 1 { if_true } else { if_false };
                Some(self.eval(chosen)?)
            }
        };
        if let (Some(name), Some(v)) = (inst.result(), val) {
            self.env.insert(name, v);
        }
        Ok(())
    }

    fn run(&mut self) -> Result<(), Fail> {
        let func = self.func;
        let mut block = &func.blocks[0];
        let mut pred: Option<&str> = None;
        loop {
            let mut incoming = Vec::new();
            for phi in &block.phis {
                let loc = || Some(Location { block: block.label.clone(), index: Some(0) });
                let from = pred.unwrap_or_default();
                let (v, _) = phi
                    .incoming
                    .iter()
                    .find(|(_, l)| l == from)
                    .ok_or_else(|| (loc(), invalid(format!("phi `%{}` has no entry for `{from}`", phi.result))))?;
                incoming.push((phi.result.as_str(), self.eval(v).map_err(|e| (loc(), e))?));
            }
            self.env.extend(incoming);
            for (i, inst) in block.instructions.iter().enumerate() {
                let at = |e| (Some(Location { block: block.label.clone(), index: Some(i) }), e);
                self.tick().map_err(at)?;
                self.exec(inst).map_err(at)?;
            }
            let at = |e| (Some(Location { block: block.label.clone(), index: None }), e);
            self.tick().map_err(at)?;
            let next = match &block.terminator {
                Terminator::Br(l) => l,
                Terminator::CondBr { cond, if_true, if_false } => {
                    if self.int(cond).map_err(at)? & 1 == 1 {
                        if_true
                    } else {
                        if_false
                    }
                }
                Terminator::Ret(_) => return Ok(()),
            };
            pred = Some(&block.label);
            block = func.block(next).ok_or_else(|| at(invalid(format!("unknown block `{next}`"))))?;
        }
    }
}

/// Runs shot `shot` of `module` and returns its full trace.
pub fn run_shot(module: &QirModule, seed: u64, shot: u64, options: &RuntimeOptions) -> Result<ShotTrace, RuntimeError> {
    let mut rt = RuntimeState::new(seed, shot, options);
    let fail = |(location, kind): Fail| RuntimeError { shot, location, kind };
    for i in 0..module.required_qubits().unwrap_or(0) {
        rt.qubit_index(QubitKey::Static(i)).map_err(|k| fail((None, k)))?;
    }
    let mut s = Shot {
        func: &module.entry,
        rt,
        env: HashMap::new(),
        slots: HashMap::new(),
        steps: 0,
        step_limit: options.step_limit,
        snapshot: None,
    };
    s.run().map_err(fail)?;
    let (pre_measurement, pre_measurement_order) =
        s.snapshot.take().unwrap_or_else(|| (s.rt.state().clone(), s.rt.qubit_order().to_vec()));
    Ok(ShotTrace {
        bits: s.rt.bits(),
        final_state: s.rt.state().clone(),
        final_order: s.rt.qubit_order().to_vec(),
        pre_measurement,
        pre_measurement_order,
        peak_qubits: s.rt.peak_qubits(),
    })
}

/// Runs `shots` independent shots in parallel. Shot `s` draws from the
/// stream keyed by `(seed, s)`, so the result does not depend on scheduling.
/// On failure the error of the lowest failing shot is returned.
pub fn interpret(
    module: &QirModule,
    shots: u64,
    seed: u64,
    options: &RuntimeOptions,
) -> Result<ExecutionResult, RuntimeError> {
    let outcomes: Vec<Result<String, RuntimeError>> =
        (0..shots).into_par_iter().map(|s| run_shot(module, seed, s, options).map(|t| t.bits)).collect();
    let memory = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ExecutionResult::from_memory(seed, memory))
}
