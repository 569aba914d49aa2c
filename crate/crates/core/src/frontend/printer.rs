//! Canonical textual form of a [`QirModule`].

use std::fmt::{self, Write};

use super::ast::*;

pub fn print_module(module: &QirModule) -> String {
    let mut out = String::new();
    write_module(&mut out, module).expect("writing to a String cannot fail");
    out
}

fn write_module(out: &mut String, m: &QirModule) -> fmt::Result {
    if !m.source_name.is_empty() {
        writeln!(out, "source_filename = \"{}\"", m.source_name)?;
        writeln!(out)?;
    }
    for g in &m.globals {
        writeln!(out, "@{} = internal constant [{} x i8] c\"{}\"", g.name, g.len, g.text)?;
    }
    if !m.globals.is_empty() {
        writeln!(out)?;
    }
    let entry_attrs = if m.attributes.is_empty() { "" } else { " #0" };
    write_function(out, &m.entry, entry_attrs)?;
    for f in &m.other_functions {
        writeln!(out)?;
        write_function(out, f, "")?;
    }
    if !m.declarations.is_empty() {
        writeln!(out)?;
    }
    for d in &m.declarations {
        let params: Vec<String> = d.params.iter().map(Type::to_string).collect();
        writeln!(out, "declare {} @{}({})", d.ret_ty, d.name, params.join(", "))?;
    }
    if !m.attributes.is_empty() {
        writeln!(out)?;
        let items: Vec<String> = m
            .attributes
            .iter()
            .map(|(k, v)| if v.is_empty() { format!("\"{k}\"") } else { format!("\"{k}\"=\"{v}\"") })
            .collect();
        writeln!(out, "attributes #0 = {{ {} }}", items.join(" "))?;
    }
    Ok(())
}

fn write_function(out: &mut String, f: &FuncDef, attrs: &str) -> fmt::Result {
    let params: Vec<String> = f.params.iter().map(|(t, n)| format!("{t} %{n}")).collect();
    writeln!(out, "define {} @{}({}){} {{", f.ret_ty, f.name, params.join(", "), attrs)?;
    for b in &f.blocks {
        writeln!(out, "{}:", b.label)?;
        for phi in &b.phis {
            let incoming: Vec<String> = phi
                .incoming
                .iter()
                .map(|(v, l)| format!("[ {}, %{} ]", ValueText(v), l))
                .collect();
            writeln!(out, "  %{} = phi {} {}", phi.result, phi.ty, incoming.join(", "))?;
        }
        for inst in &b.instructions {
            writeln!(out, "  {}", InstText(inst))?;
        }
        writeln!(out, "  {}", TermText(&b.terminator))?;
    }
    writeln!(out, "}}")
}

/// Display adapter for a [`Value`].
pub struct ValueText<'a>(pub &'a Value);

impl fmt::Display for ValueText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Value::Local(n) => write!(f, "%{n}"),
            Value::Int { width: IntWidth::I1, value } => f.write_str(if *value & 1 == 1 { "true" } else { "false" }),
            Value::Int { value, .. } => write!(f, "{value}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::NullRef | Value::StaticAddr { index: 0, .. } => f.write_str("null"),
            Value::StaticAddr { index, .. } => write!(f, "inttoptr (i64 {index} to ptr)"),
            Value::Global(n) => write!(f, "@{n}"),
        }
    }
}

/// Display adapter for an [`Instruction`].
pub struct InstText<'a>(pub &'a Instruction);

impl fmt::Display for InstText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Instruction::Call { result, ret_ty, callee, args } => {
                if let Some(r) = result {
                    write!(f, "%{r} = ")?;
                }
                write!(f, "call {ret_ty} @{callee}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", a.ty)?;
                    for attr in &a.attrs {
                        write!(f, " {attr}")?;
                    }
                    write!(f, " {}", ValueText(&a.value))?;
                }
                f.write_str(")")
            }
            Instruction::Alloca { result, ty } => write!(f, "%{result} = alloca {ty}"),
            Instruction::Store { ty, value, slot } => {
                write!(f, "store {ty} {}, ptr {}", ValueText(value), ValueText(slot))
            }
            Instruction::Load { result, ty, slot } => write!(f, "%{result} = load {ty}, ptr {}", ValueText(slot)),
            Instruction::BinOp { result, op, width, lhs, rhs } => write!(
                f,
                "%{result} = {} i{} {}, {}",
                op.keyword(),
                width.bits(),
                ValueText(lhs),
                ValueText(rhs)
            ),
            Instruction::ICmp { result, pred, width, lhs, rhs } => write!(
                f,
                "%{result} = icmp {} i{} {}, {}",
                pred.keyword(),
                width.bits(),
                ValueText(lhs),
                ValueText(rhs)
            ),
            Instruction::IntToAddr { result, from, source } => {
                write!(f, "%{result} = inttoptr i{} {} to ptr", from.bits(), ValueText(source))
            }
            Instruction::Ext { result, kind, from, to, source } => write!(
                f,
                "%{result} = {} i{} {} to i{}",
                kind.keyword(),
                from.bits(),
                ValueText(source),
                to.bits()
            ),
            Instruction::Select { result, cond, ty, if_true, if_false } => write!(
                f,
                "%{result} = select i1 {}, {ty} {}, {ty} {}",
                ValueText(cond),
                ValueText(if_true),
                ValueText(if_false)
            ),
        }
    }
}

struct TermText<'a>(&'a Terminator);

impl fmt::Display for TermText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Terminator::Br(l) => write!(f, "br label %{l}"),
            Terminator::CondBr { cond, if_true, if_false } => {
                write!(f, "br i1 {}, label %{if_true}, label %{if_false}", ValueText(cond))
            }
            Terminator::Ret(None) => f.write_str("ret void"),
            Terminator::Ret(Some((ty, v))) => write!(f, "ret {ty} {}", ValueText(v)),
        }
    }
}
