//! In-memory form of a parsed QIR module.

use std::collections::BTreeMap;
use std::fmt;

/// Integer widths supported by the classical subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntWidth {
    I1,
    I32,
    I64,
}

impl IntWidth {
    pub fn bits(self) -> u32 {
        match self {
            IntWidth::I1 => 1,
            IntWidth::I32 => 32,
            IntWidth::I64 => 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Type {
    Void,
    Int(IntWidth),
    Double,
    /// The opaque reference type. Legacy `%Qubit*`/`%Result*` spellings
    /// normalize to this.
    Ptr,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Void => f.write_str("void"),
            Type::Int(w) => write!(f, "i{}", w.bits()),
            Type::Double => f.write_str("double"),
            Type::Ptr => f.write_str("ptr"),
        }
    }
}

/// What a static address refers to, inferred from the position it is used in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AddrKind {
    Qubit,
    Result,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Local(String),
    Int { width: IntWidth, value: i64 },
    Float(f64),
    /// Textual `null` before normalization. The parser never leaves one behind.
    NullRef,
    /// `inttoptr (i64 N to ptr)`; `null` is index 0.
    StaticAddr { index: u64, kind: AddrKind },
    Global(String),
}

impl Value {
    pub fn qubit(index: u64) -> Value {
        Value::StaticAddr { index, kind: AddrKind::Qubit }
    }

    pub fn result(index: u64) -> Value {
        Value::StaticAddr { index, kind: AddrKind::Result }
    }

    pub fn int(width: IntWidth, value: i64) -> Value {
        Value::Int { width, value: crate::arith::wrap(width, value) }
    }

    pub fn as_local(&self) -> Option<&str> {
        match self {
            Value::Local(name) => Some(name),
            _ => None,
        }
    }

    pub fn static_index(&self) -> Option<u64> {
        match self {
            Value::StaticAddr { index, .. } => Some(*index),
            Value::NullRef => Some(0),
            _ => None,
        }
    }
}

/// Parameter annotation carried for printing; no semantic effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamAttr {
    WriteOnly,
    ReadOnly,
}

impl fmt::Display for ParamAttr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamAttr::WriteOnly => "writeonly",
            ParamAttr::ReadOnly => "readonly",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub ty: Type,
    pub attrs: Vec<ParamAttr>,
    pub value: Value,
}

impl Arg {
    pub fn new(ty: Type, value: Value) -> Arg {
        Arg { ty, attrs: Vec::new(), value }
    }

    pub fn ptr(value: Value) -> Arg {
        Arg::new(Type::Ptr, value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    And,
    Or,
    Xor,
}

impl BinOp {
    pub const ALL: [BinOp; 6] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::And, BinOp::Or, BinOp::Xor];

    pub fn keyword(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Xor => "xor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpPred {
    Eq,
    Ne,
    Slt,
    Sle,
    Sgt,
    Sge,
}

impl CmpPred {
    pub const ALL: [CmpPred; 6] =
        [CmpPred::Eq, CmpPred::Ne, CmpPred::Slt, CmpPred::Sle, CmpPred::Sgt, CmpPred::Sge];

    pub fn keyword(self) -> &'static str {
        match self {
            CmpPred::Eq => "eq",
            CmpPred::Ne => "ne",
            CmpPred::Slt => "slt",
            CmpPred::Sle => "sle",
            CmpPred::Sgt => "sgt",
            CmpPred::Sge => "sge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtKind {
    Zext,
    Sext,
    Trunc,
}

impl ExtKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ExtKind::Zext => "zext",
            ExtKind::Sext => "sext",
            ExtKind::Trunc => "trunc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Call { result: Option<String>, ret_ty: Type, callee: String, args: Vec<Arg> },
    Alloca { result: String, ty: Type },
    Store { ty: Type, value: Value, slot: Value },
    Load { result: String, ty: Type, slot: Value },
    BinOp { result: String, op: BinOp, width: IntWidth, lhs: Value, rhs: Value },
    ICmp { result: String, pred: CmpPred, width: IntWidth, lhs: Value, rhs: Value },
    IntToAddr { result: String, from: IntWidth, source: Value },
    Ext { result: String, kind: ExtKind, from: IntWidth, to: IntWidth, source: Value },
    Select { result: String, cond: Value, ty: Type, if_true: Value, if_false: Value },
}

impl Instruction {
    /// The SSA name this instruction defines, if any.
    pub fn result(&self) -> Option<&str> {
        match self {
            Instruction::Call { result, .. } => result.as_deref(),
            Instruction::Store { .. } => None,
            Instruction::Alloca { result, .. }
            | Instruction::Load { result, .. }
            | Instruction::BinOp { result, .. }
            | Instruction::ICmp { result, .. }
            | Instruction::IntToAddr { result, .. }
            | Instruction::Ext { result, .. }
            | Instruction::Select { result, .. } => Some(result),
        }
    }

    /// Every operand, in source order.
    pub fn operands(&self) -> Vec<&Value> {
        match self {
            Instruction::Call { args, .. } => args.iter().map(|a| &a.value).collect(),
            Instruction::Alloca { .. } => vec![],
            Instruction::Store { value, slot, .. } => vec![value, slot],
            Instruction::Load { slot, .. } => vec![slot],
            Instruction::BinOp { lhs, rhs, .. } | Instruction::ICmp { lhs, rhs, .. } => vec![lhs, rhs],
            Instruction::IntToAddr { source, .. } | Instruction::Ext { source, .. } => vec![source],
            Instruction::Select { cond, if_true, if_false, .. } => vec![cond, if_true, if_false],
        }
    }

    pub fn operands_mut(&mut self) -> Vec<&mut Value> {
        match self {
            Instruction::Call { args, .. } => args.iter_mut().map(|a| &mut a.value).collect(),
            Instruction::Alloca { .. } => vec![],
            Instruction::Store { value, slot, .. } => vec![value, slot],
            Instruction::Load { slot, .. } => vec![slot],
            Instruction::BinOp { lhs, rhs, .. } | Instruction::ICmp { lhs, rhs, .. } => vec![lhs, rhs],
            Instruction::IntToAddr { source, .. } | Instruction::Ext { source, .. } => vec![source],
            Instruction::Select { cond, if_true, if_false, .. } => vec![cond, if_true, if_false],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiNode {
    pub result: String,
    pub ty: Type,
    pub incoming: Vec<(Value, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Terminator {
    Br(String),
    CondBr { cond: Value, if_true: String, if_false: String },
    Ret(Option<(Type, Value)>),
}

impl Terminator {
    pub fn successors(&self) -> Vec<&str> {
        match self {
            Terminator::Br(l) => vec![l],
            Terminator::CondBr { if_true, if_false, .. } => vec![if_true, if_false],
            Terminator::Ret(_) => vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicBlock {
    pub label: String,
    pub phis: Vec<PhiNode>,
    pub instructions: Vec<Instruction>,
    pub terminator: Terminator,
}

impl BasicBlock {
    pub fn new(label: impl Into<String>) -> BasicBlock {
        BasicBlock {
            label: label.into(),
            phis: Vec::new(),
            instructions: Vec::new(),
            terminator: Terminator::Ret(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuncDef {
    pub name: String,
    pub ret_ty: Type,
    pub params: Vec<(Type, String)>,
    pub blocks: Vec<BasicBlock>,
}

impl FuncDef {
    pub fn block(&self, label: &str) -> Option<&BasicBlock> {
        self.blocks.iter().find(|b| b.label == label)
    }

    pub fn block_index(&self, label: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.label == label)
    }

    /// Predecessor labels of every block, in block order.
    pub fn predecessors(&self) -> BTreeMap<String, Vec<String>> {
        let mut preds: BTreeMap<String, Vec<String>> =
            self.blocks.iter().map(|b| (b.label.clone(), Vec::new())).collect();
        for b in &self.blocks {
            for s in b.terminator.successors() {
                if let Some(list) = preds.get_mut(s) {
                    if !list.contains(&b.label) {
                        list.push(b.label.clone());
                    }
                }
            }
        }
        preds
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuncDecl {
    pub name: String,
    pub ret_ty: Type,
    pub params: Vec<Type>,
}

/// `@name = internal constant [N x i8] c"..."`, used for output labels.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalString {
    pub name: String,
    /// Body between the quotes, escapes kept verbatim.
    pub text: String,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QirModule {
    pub source_name: String,
    pub globals: Vec<GlobalString>,
    pub declarations: Vec<FuncDecl>,
    pub entry: FuncDef,
    /// Definitions other than the entry point. Carried through printing but
    /// never executed.
    pub other_functions: Vec<FuncDef>,
    /// Attributes of the entry point. Flag attributes map to `""`.
    pub attributes: BTreeMap<String, String>,
}

pub const ENTRY_POINT_ATTR: &str = "entry_point";
pub const REQUIRED_QUBITS_ATTR: &str = "required_num_qubits";
pub const REQUIRED_RESULTS_ATTR: &str = "required_num_results";

impl QirModule {
    /// A module whose entry function `main` holds one empty `entry` block.
    pub fn empty() -> QirModule {
        let mut attributes = BTreeMap::new();
        attributes.insert(ENTRY_POINT_ATTR.to_string(), String::new());
        QirModule {
            source_name: String::new(),
            globals: Vec::new(),
            declarations: Vec::new(),
            entry: FuncDef {
                name: "main".to_string(),
                ret_ty: Type::Void,
                params: Vec::new(),
                blocks: vec![BasicBlock::new("entry")],
            },
            other_functions: Vec::new(),
            attributes,
        }
    }

    fn count_attr(&self, key: &str) -> Option<u64> {
        self.attributes.get(key).and_then(|v| v.parse().ok())
    }

    pub fn required_qubits(&self) -> Option<u64> {
        self.count_attr(REQUIRED_QUBITS_ATTR)
    }

    pub fn required_results(&self) -> Option<u64> {
        self.count_attr(REQUIRED_RESULTS_ATTR)
    }

    pub fn declaration(&self, name: &str) -> Option<&FuncDecl> {
        self.declarations.iter().find(|d| d.name == name)
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.entry.name == name || self.other_functions.iter().any(|f| f.name == name)
    }

    /// Calls in the entry function, in block then program order.
    pub fn entry_calls(&self) -> impl Iterator<Item = (&str, &[Arg])> {
        self.entry.blocks.iter().flat_map(|b| b.instructions.iter()).filter_map(|i| match i {
            Instruction::Call { callee, args, .. } => Some((callee.as_str(), args.as_slice())),
            _ => None,
        })
    }
}

/// Position of an instruction inside the entry function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub block: String,
    /// Instruction index within the block; `None` for the terminator.
    pub index: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}#{}", self.block, i),
            None => write!(f, "{}#terminator", self.block),
        }
    }
}
