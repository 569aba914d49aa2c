//! OpenQASM 2 subset reader and writer.

use std::fmt::Write as _;

use super::{CircuitOp, GateKind, QuantumCircuit};
use crate::frontend::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Arrow,
    Sym(char),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

impl Spanned {
    fn text(&self) -> String {
        match &self.tok {
            Tok::Ident(s) | Tok::Number(s) => s.clone(),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Arrow => "->".into(),
            Tok::Sym(c) => c.to_string(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let line_no = ln + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: line_no, column });
            if c.is_whitespace() {
                i += 1;
            } else if c == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                push(&mut out, Tok::Number(chars[start..i].iter().collect()));
            } else if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(ParseError::new(line_no, column, "\"", "unterminated string"));
                }
                push(&mut out, Tok::Str(chars[start..i].iter().collect()));
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                push(&mut out, Tok::Arrow);
                i += 2;
            } else if "[](),;+-*/=<>{}!^".contains(c) {
                push(&mut out, Tok::Sym(c));
                i += 1;
            } else {
                return Err(ParseError::new(line_no, column, c.to_string(), "unexpected character"));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct Register {
    name: String,
    offset: usize,
    size: usize,
}

/// `q` or `q[i]`, resolved to flat indices.
struct Operand {
    indices: Vec<usize>,
    whole: bool,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<Register>,
    warnings: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        match self.peek().or(self.toks.last()) {
            Some(t) => ParseError::new(t.line, t.column, t.text(), message),
            None => ParseError::new(1, 1, "", message),
        }
    }

    fn next(&mut self) -> Result<Spanned, ParseError> {
        let t = self.peek().cloned().ok_or_else(|| self.error_here("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().is_some_and(|t| t.tok == Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error_here("expected an identifier")),
        }
    }

    fn unsigned(&mut self) -> Result<usize, ParseError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Number(s)) => {
                let v = s.parse().map_err(|_| self.error_here("expected an integer"))?;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.error_here("expected an integer")),
        }
    }

    fn statement(&mut self, circuit: &mut QuantumCircuit) -> Result<(), ParseError> {
        let start = self.pos;
        let head = self.ident()?;
        match head.as_str() {
            "OPENQASM" => {
                match self.next()?.tok {
                    Tok::Number(v) if v == "2.0" || v == "2" => {}
                    _ => {
                        self.pos -= 1;
                        return Err(self.error_here("only OpenQASM 2.0 is supported"));
                    }
                }
            }
            "include" => {
                if !matches!(self.next()?.tok, Tok::Str(_)) {
                    self.pos -= 1;
                    return Err(self.error_here("expected a file name"));
                }
            }
            "qreg" | "creg" => {
                let name = self.ident()?;
                self.expect_sym('[')?;
                let size = self.unsigned()?;
                self.expect_sym(']')?;
                if self.qregs.iter().chain(&self.cregs).any(|r| r.name == name) {
                    self.pos = start + 1;
                    return Err(self.error_here(format!("register `{name}` declared twice")));
                }
                if head == "qreg" {
                    self.qregs.push(Register { name, offset: circuit.num_qubits, size });
                    circuit.num_qubits += size;
                } else {
                    self.cregs.push(Register { name, offset: circuit.num_clbits, size });
                    circuit.num_clbits += size;
                }
            }
            "measure" => {
                let q = self.operand(true)?;
                if self.peek().map(|t| &t.tok) != Some(&Tok::Arrow) {
                    return Err(self.error_here("expected `->`"));
                }
                self.pos += 1;
                let c = self.operand(false)?;
                if q.indices.len() != c.indices.len() {
                    self.pos = start;
                    return Err(self.error_here("measure operands have different sizes"));
                }
                for (qubit, clbit) in q.indices.into_iter().zip(c.indices) {
                    circuit.ops.push(CircuitOp::Measure { qubit, clbit });
                }
            }
            "reset" => {
                for qubit in self.operand(true)?.indices {
                    circuit.ops.push(CircuitOp::Reset { qubit });
                }
            }
            "barrier" => {
                let t = &self.toks[start];
                self.warnings.push(format!("line {}: barrier dropped", t.line));
                while !self.eat_sym(';') {
                    self.next()?;
                }
                return Ok(());
            }
            "if" | "gate" | "opaque" => {
                self.pos = start;
                return Err(self.error_here(format!("`{head}` is not supported")));
            }
            name => {
                let Some(kind) = GateKind::from_qasm_name(name) else {
                    self.pos = start;
                    return Err(self.error_here(format!("unknown gate `{name}`")));
                };
                let mut params = Vec::new();
                if self.eat_sym('(')
                    && !self.eat_sym(')') {
                        loop {
                            params.push(self.expr()?);
                            if self.eat_sym(')') {
                                break;
                            }
                            self.expect_sym(',')?;
                        }
                    }
                if params.len() != kind.num_params() {
                    self.pos = start;
                    return Err(self.error_here(format!("`{name}` takes {} parameters", kind.num_params())));
                }
                let mut operands = vec![self.operand(true)?];
                while self.eat_sym(',') {
                    operands.push(self.operand(true)?);
                }
                if operands.len() != kind.num_qubits() {
                    self.pos = start;
                    return Err(self.error_here(format!("`{name}` takes {} qubits", kind.num_qubits())));
                }
                let width = operands.iter().filter(|o| o.whole).map(|o| o.indices.len()).max();
                let width = match width {
                    Some(w) => {
                        if operands.iter().any(|o| o.whole && o.indices.len() != w) {
                            self.pos = start;
                            return Err(self.error_here("registers of different sizes"));
                        }
                        w
                    }
                    None => 1,
                };
                for k in 0..width {
                    let qubits: Vec<usize> =
                        operands.iter().map(|o| if o.whole { o.indices[k] } else { o.indices[0] }).collect();
                    let op = CircuitOp::Gate { kind, params: params.clone(), qubits };
                    if let Err(e) = super::check_op(circuit, circuit.ops.len(), &op) {
                        self.pos = start;
                        return Err(self.error_here(e.to_string()));
                    }
                    circuit.ops.push(op);
                }
            }
        }
        self.expect_sym(';')
    }

    fn operand(&mut self, quantum: bool) -> Result<Operand, ParseError> {
        let at = self.pos;
        let name = self.ident()?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let Some(reg) = regs.iter().find(|r| r.name == name).cloned() else {
            self.pos = at;
            let what = if quantum { "quantum" } else { "classical" };
            return Err(self.error_here(format!("undeclared {what} register `{name}`")));
        };
        if self.eat_sym('[') {
            let idx_at = self.pos;
            let idx = self.unsigned()?;
            if idx >= reg.size {
                self.pos = idx_at;
                return Err(self.error_here(format!("index {idx} out of range for `{name}[{}]`", reg.size)));
            }
            self.expect_sym(']')?;
            Ok(Operand { indices: vec![reg.offset + idx], whole: false })
        } else {
            Ok(Operand { indices: (reg.offset..reg.offset + reg.size).collect(), whole: true })
        }
    }

    fn expr(&mut self) -> Result<f64, ParseError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, ParseError> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym('*') {
                v *= self.unary()?;
            } else if self.eat_sym('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ParseError> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_sym('(') {
            let v = self.expr()?;
            self.expect_sym(')')?;
            return Ok(v);
        }
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Number(s)) => {
                let v = s.parse().map_err(|_| self.error_here("malformed number"))?;
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Ident(s)) if s == "pi" => {
                self.pos += 1;
                Ok(std::f64::consts::PI)
            }
            _ => Err(self.error_here("expected a parameter expression")),
        }
    }
}

/// Parses OpenQASM 2 text, returning the circuit and any warnings (dropped
/// barriers).
pub fn import_openqasm2_with_warnings(text: &str) -> Result<(QuantumCircuit, Vec<String>), ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, qregs: Vec::new(), cregs: Vec::new(), warnings: Vec::new() };
    let mut circuit = QuantumCircuit::default();
    while p.peek().is_some() {
        if p.eat_sym(';') {
            continue;
        }
        p.statement(&mut circuit)?;
    }
    Ok((circuit, p.warnings))
}

/// Parses OpenQASM 2 text. Warnings go to the `log` facade.
pub fn import_openqasm2(text: &str) -> Result<QuantumCircuit, ParseError> {
    let (circuit, warnings) = import_openqasm2_with_warnings(text)?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(circuit)
}

/// Writes the circuit over one `q` and one `c` register.
///
/// A run of measurements `q[i] -> c[i]` covering every qubit, in order, is
/// written as the register-wide `measure q -> c;`.
pub fn export_openqasm2(circuit: &QuantumCircuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if circuit.num_qubits > 0 {
        writeln!(out, "qreg q[{}];", circuit.num_qubits).unwrap();
    }
    if circuit.num_clbits > 0 {
        writeln!(out, "creg c[{}];", circuit.num_clbits).unwrap();
    }
    let n = circuit.num_qubits;
    let mut i = 0;
    while i < circuit.ops.len() {
        if n > 0 && n == circuit.num_clbits && is_full_measure(&circuit.ops[i..], n) {
            out.push_str("measure q -> c;\n");
            i += n;
            continue;
        }
        match &circuit.ops[i] {
            CircuitOp::Gate { kind, params, qubits } => {
                out.push_str(kind.qasm_name());
                if !params.is_empty() {
                    let p: Vec<String> = params.iter().map(|x| format!("{x:?}")).collect();
                    write!(out, "({})", p.join(", ")).unwrap();
                }
                let q: Vec<String> = qubits.iter().map(|q| format!("q[{q}]")).collect();
                writeln!(out, " {};", q.join(", ")).unwrap();
            }
            CircuitOp::Measure { qubit, clbit } => writeln!(out, "measure q[{qubit}] -> c[{clbit}];").unwrap(),
            CircuitOp::Reset { qubit } => writeln!(out, "reset q[{qubit}];").unwrap(),
        }
        i += 1;
    }
    out
}

fn is_full_measure(ops: &[CircuitOp], n: usize) -> bool {
    ops.len() >= n
        && ops[..n]
            .iter()
            .enumerate()
            .all(|(k, op)| *op == CircuitOp::Measure { qubit: k, clbit: k })
}
