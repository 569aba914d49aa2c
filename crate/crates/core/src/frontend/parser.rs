//! Recursive-descent parser producing a [`QirModule`].
//!
//! The accepted grammar is a whitelist. Anything outside it is a hard error
//! carrying the line and column of the offending token.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::ParseError;
use crate::intrinsics::{Intrinsic, ParamRole};

pub fn parse_module(text: &str) -> Result<QirModule, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut module = parser.module()?;
    canonicalize(&mut module);
    Ok(module)
}

/// Replaces `null` with static address 0 and infers the kind of each static
/// address from the intrinsic parameter it is passed to.
pub fn canonicalize(module: &mut QirModule) {
    canonicalize_function(&mut module.entry);
    for f in &mut module.other_functions {
        canonicalize_function(f);
    }
}

fn canonicalize_function(f: &mut FuncDef) {
    fn fix(v: &mut Value, kind: AddrKind) {
        match v {
            Value::NullRef => *v = Value::StaticAddr { index: 0, kind },
            Value::StaticAddr { kind: k, .. } => *k = kind,
            _ => {}
        }
    }
    for block in &mut f.blocks {
        for phi in &mut block.phis {
            for (v, _) in &mut phi.incoming {
                fix(v, AddrKind::Qubit);
            }
        }
        for inst in &mut block.instructions {
            if let Instruction::Call { callee, args, .. } = inst {
                let roles = Intrinsic::lookup(callee).map(|i| i.params()).unwrap_or_default();
                for (i, arg) in args.iter_mut().enumerate() {
                    let kind = match roles.get(i) {
                        Some(ParamRole::Result) => AddrKind::Result,
                        _ => AddrKind::Qubit,
                    };
                    fix(&mut arg.value, kind);
                }
            } else {
                for v in inst.operands_mut() {
                    fix(v, AddrKind::Qubit);
                }
            }
        }
        match &mut block.terminator {
            Terminator::CondBr { cond, .. } => fix(cond, AddrKind::Qubit),
            Terminator::Ret(Some((_, v))) => fix(v, AddrKind::Qubit),
            _ => {}
        }
    }
}

#[derive(Clone)]
struct Site {
    line: usize,
    column: usize,
    text: String,
}

impl Site {
    fn of(tok: &Token) -> Site {
        Site { line: tok.line, column: tok.column, text: tok.text.clone() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column, self.text.clone(), message)
    }
}

/// Facts collected while parsing one function, checked once it is complete.
#[derive(Default)]
struct FnFacts {
    labels: Vec<(String, Site)>,
    defs: Vec<(String, Site)>,
    uses: Vec<(String, Site)>,
    branch_targets: Vec<(String, Site)>,
    phi_sites: Vec<(String, usize, Site)>,
    calls: Vec<(String, Site)>,
    global_uses: Vec<(String, Site)>,
}

struct ParsedFn {
    def: FuncDef,
    attr_groups: Vec<u32>,
    inline_attrs: Vec<(String, String)>,
    facts: FnFacts,
    site: Site,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| self.eof_error())?;
        self.pos += 1;
        Ok(tok)
    }

    fn eof_error(&self) -> ParseError {
        match self.tokens.last() {
            Some(t) => ParseError::new(t.line, t.column, t.text.clone(), "unexpected end of input"),
            None => ParseError::new(1, 1, "", "unexpected end of input"),
        }
    }

    fn unexpected(tok: &Token, expected: &str) -> ParseError {
        ParseError::new(tok.line, tok.column, tok.text.clone(), format!("expected {expected}"))
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        let tok = self.next()?;
        if tok.kind == kind {
            Ok(tok)
        } else {
            Err(Self::unexpected(&tok, what))
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<Token, ParseError> {
        self.expect(TokenKind::Word(word.to_string()), &format!("`{word}`"))
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Word(w)) if w == word)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn skip_line(&mut self) {
        if let Some(line) = self.peek().map(|t| t.line) {
            while self.peek().is_some_and(|t| t.line == line) {
                self.pos += 1;
            }
        }
    }

    fn module(&mut self) -> Result<QirModule, ParseError> {
        let mut source_name = String::new();
        let mut globals = Vec::new();
        let mut declarations: Vec<FuncDecl> = Vec::new();
        let mut functions: Vec<ParsedFn> = Vec::new();
        let mut groups: HashMap<u32, Vec<(String, String)>> = HashMap::new();
        let mut decl_sites: HashSet<String> = HashSet::new();

        while let Some(tok) = self.peek().cloned() {
            match &tok.kind {
                TokenKind::Word(w) if w == "source_filename" => {
                    self.pos += 1;
                    self.expect(TokenKind::Equals, "`=`")?;
                    let t = self.next()?;
                    match t.kind {
                        TokenKind::Str(s) => source_name = s,
                        _ => return Err(Self::unexpected(&t, "a string")),
                    }
                }
                TokenKind::Word(w) if w == "target" => self.skip_line(),
                TokenKind::Bang => self.skip_line(),
                TokenKind::Local(_) => {
                    // `%Qubit = type opaque`
                    self.pos += 1;
                    self.expect(TokenKind::Equals, "`=`")?;
                    self.expect_word("type")?;
                    self.expect_word("opaque")?;
                }
                TokenKind::Global(_) => globals.push(self.global_string()?),
                TokenKind::Word(w) if w == "declare" => {
                    let decl = self.declaration()?;
                    if !decl_sites.insert(decl.name.clone()) {
                        return Err(Site::of(&tok).error(format!("duplicate declaration of @{}", decl.name)));
                    }
                    declarations.push(decl);
                }
                TokenKind::Word(w) if w == "define" => functions.push(self.definition()?),
                TokenKind::Word(w) if w == "attributes" => {
                    self.pos += 1;
                    let id_tok = self.next()?;
                    let TokenKind::AttrRef(id) = id_tok.kind else {
                        return Err(Self::unexpected(&id_tok, "an attribute group `#N`"));
                    };
                    self.expect(TokenKind::Equals, "`=`")?;
                    self.expect(TokenKind::LBrace, "`{`")?;
                    let mut items = Vec::new();
                    loop {
                        let t = self.next()?;
                        match t.kind {
                            TokenKind::RBrace => break,
                            TokenKind::Str(key) => {
                                let value = if self.eat(&TokenKind::Equals) {
                                    let v = self.next()?;
                                    match v.kind {
                                        TokenKind::Str(s) => s,
                                        _ => return Err(Self::unexpected(&v, "a string value")),
                                    }
                                } else {
                                    String::new()
                                };
                                items.push((key, value));
                            }
                            TokenKind::Word(w) => items.push((w, String::new())),
                            _ => return Err(Self::unexpected(&t, "an attribute")),
                        }
                    }
                    groups.insert(id, items);
                }
                _ => return Err(Self::unexpected(&tok, "a top-level declaration")),
            }
        }

        let mut defined: HashSet<String> = HashSet::new();
        for f in &functions {
            if !defined.insert(f.def.name.clone()) {
                return Err(f.site.error(format!("duplicate definition of @{}", f.def.name)));
            }
            if decl_sites.contains(&f.def.name) {
                return Err(f.site.error(format!("@{} is both declared and defined", f.def.name)));
            }
        }
        let global_names: HashSet<&str> = globals.iter().map(|g: &GlobalString| g.name.as_str()).collect();
        for f in &functions {
            check_function(f, &decl_sites, &defined, &global_names)?;
        }

        let attrs_of = |f: &ParsedFn| -> BTreeMap<String, String> {
            let mut m = BTreeMap::new();
            for id in &f.attr_groups {
                if let Some(items) = groups.get(id) {
                    for (k, v) in items {
                        m.insert(k.clone(), v.clone());
                    }
                }
            }
            for (k, v) in &f.inline_attrs {
                m.insert(k.clone(), v.clone());
            }
            m
        };

        let entry_idx = {
            let marked: Vec<usize> = functions
                .iter()
                .enumerate()
                .filter(|(_, f)| attrs_of(f).contains_key(ENTRY_POINT_ATTR))
                .map(|(i, _)| i)
                .collect();
            match (marked.len(), functions.len()) {
                (1, _) => marked[0],
                (0, 1) => 0,
                (0, 0) => return Err(self.eof_error_at_start("module defines no function")),
                (0, _) => {
                    return Err(functions[1].site.error("several functions defined and none carries `entry_point`"))
                }
                _ => return Err(functions[marked[1]].site.error("more than one `entry_point` function")),
            }
        };
        let attributes = attrs_of(&functions[entry_idx]);
        let mut other_functions = Vec::new();
        let mut entry = None;
        for (i, f) in functions.into_iter().enumerate() {
            if i == entry_idx {
                if !f.def.params.is_empty() {
                    return Err(f.site.error("the entry point must take no parameters"));
                }
                entry = Some(f.def);
            } else {
                other_functions.push(f.def);
            }
        }
        Ok(QirModule {
            source_name,
            globals,
            declarations,
            entry: entry.expect("entry index is valid"),
            other_functions,
            attributes,
        })
    }

    fn eof_error_at_start(&self, message: &str) -> ParseError {
        match self.tokens.first() {
            Some(t) => ParseError::new(t.line, t.column, t.text.clone(), message),
            None => ParseError::new(1, 1, "", message),
        }
    }

    fn global_string(&mut self) -> Result<GlobalString, ParseError> {
        let name_tok = self.next()?;
        let TokenKind::Global(name) = name_tok.kind else { unreachable!() };
        self.expect(TokenKind::Equals, "`=`")?;
        while self.is_word("internal") || self.is_word("private") || self.is_word("unnamed_addr") {
            self.pos += 1;
        }
        self.expect_word("constant")?;
        self.expect(TokenKind::LBracket, "`[`")?;
        let len_tok = self.next()?;
        let TokenKind::Int(len) = len_tok.kind else {
            return Err(Self::unexpected(&len_tok, "an array length"));
        };
        self.expect_word("x")?;
        self.expect_word("i8")?;
        self.expect(TokenKind::RBracket, "`]`")?;
        let body = self.next()?;
        let TokenKind::CStr(text) = body.kind else {
            return Err(Self::unexpected(&body, "a `c\"...\"` string"));
        };
        Ok(GlobalString { name, text, len: len.max(0) as usize })
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let tok = self.next()?;
        let ty = match &tok.kind {
            TokenKind::Word(w) => match w.as_str() {
                "void" => Type::Void,
                "i1" => Type::Int(IntWidth::I1),
                "i32" => Type::Int(IntWidth::I32),
                "i64" => Type::Int(IntWidth::I64),
                "double" => Type::Double,
                "ptr" => Type::Ptr,
                "i8" if self.eat(&TokenKind::Star) => Type::Ptr,
                _ => return Err(Self::unexpected(&tok, "a type")),
            },
            TokenKind::Local(name) if matches!(name.as_str(), "Qubit" | "Result" | "Array" | "String") => {
                if !self.eat(&TokenKind::Star) {
                    return Err(Self::unexpected(&tok, "a reference type `%Name*`"));
                }
                Type::Ptr
            }
            _ => return Err(Self::unexpected(&tok, "a type")),
        };
        Ok(ty)
    }

    fn int_ty(&mut self) -> Result<IntWidth, ParseError> {
        let tok = self.peek().cloned().ok_or_else(|| self.eof_error())?;
        match self.ty()? {
            Type::Int(w) => Ok(w),
            _ => Err(Self::unexpected(&tok, "an integer type")),
        }
    }

    fn ptr_ty(&mut self) -> Result<(), ParseError> {
        let tok = self.peek().cloned().ok_or_else(|| self.eof_error())?;
        match self.ty()? {
            Type::Ptr => Ok(()),
            _ => Err(Self::unexpected(&tok, "`ptr`")),
        }
    }

    fn param_attrs(&mut self) -> Vec<ParamAttr> {
        let mut attrs = Vec::new();
        loop {
            if self.is_word("writeonly") {
                attrs.push(ParamAttr::WriteOnly);
            } else if self.is_word("readonly") {
                attrs.push(ParamAttr::ReadOnly);
            } else {
                return attrs;
            }
            self.pos += 1;
        }
    }

    fn declaration(&mut self) -> Result<FuncDecl, ParseError> {
        self.expect_word("declare")?;
        let ret_ty = self.ty()?;
        let name_tok = self.next()?;
        let TokenKind::Global(name) = name_tok.kind else {
            return Err(Self::unexpected(&name_tok, "a function name"));
        };
        self.expect(TokenKind::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                params.push(self.ty()?);
                self.param_attrs();
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                self.expect(TokenKind::Comma, "`,` or `)`")?;
            }
        }
        while matches!(self.peek_kind(), Some(TokenKind::AttrRef(_))) {
            self.pos += 1;
        }
        Ok(FuncDecl { name, ret_ty, params })
    }

    fn definition(&mut self) -> Result<ParsedFn, ParseError> {
        let define_tok = self.expect_word("define")?;
        let ret_ty = self.ty()?;
        let name_tok = self.next()?;
        let TokenKind::Global(name) = name_tok.kind.clone() else {
            return Err(Self::unexpected(&name_tok, "a function name"));
        };
        let mut facts = FnFacts::default();
        self.expect(TokenKind::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                let ty = self.ty()?;
                self.param_attrs();
                let t = self.next()?;
                let TokenKind::Local(pname) = t.kind.clone() else {
                    return Err(Self::unexpected(&t, "a parameter name"));
                };
                facts.defs.push((pname.clone(), Site::of(&t)));
                params.push((ty, pname));
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                self.expect(TokenKind::Comma, "`,` or `)`")?;
            }
        }
        let mut attr_groups = Vec::new();
        let mut inline_attrs = Vec::new();
        loop {
            match self.peek_kind().cloned() {
                Some(TokenKind::AttrRef(id)) => {
                    self.pos += 1;
                    attr_groups.push(id);
                }
                Some(TokenKind::Str(key)) => {
                    self.pos += 1;
                    let mut value = String::new();
                    if self.eat(&TokenKind::Equals) {
                        let v = self.next()?;
                        let TokenKind::Str(s) = v.kind else {
                            return Err(Self::unexpected(&v, "a string value"));
                        };
                        value = s;
                    }
                    inline_attrs.push((key, value));
                }
                _ => break,
            }
        }
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut blocks = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            let label = match self.peek_kind().cloned() {
                Some(TokenKind::LabelDef(l)) => {
                    let t = self.next()?;
                    facts.labels.push((l.clone(), Site::of(&t)));
                    l
                }
                _ if blocks.is_empty() => "entry".to_string(),
                _ => {
                    let t = self.next()?;
                    return Err(Self::unexpected(&t, "a block label"));
                }
            };
            blocks.push(self.block(label, &mut facts)?);
        }
        if blocks.is_empty() {
            return Err(Site::of(&name_tok).error("function body has no blocks"));
        }
        Ok(ParsedFn {
            def: FuncDef { name, ret_ty, params, blocks },
            attr_groups,
            inline_attrs,
            facts,
            site: Site::of(&define_tok),
        })
    }

    fn block(&mut self, label: String, facts: &mut FnFacts) -> Result<BasicBlock, ParseError> {
        let mut block = BasicBlock::new(label);
        loop {
            let tok = self.peek().cloned().ok_or_else(|| self.eof_error())?;
            match &tok.kind {
                TokenKind::Word(w) if w == "br" || w == "ret" => {
                    block.terminator = self.terminator(facts)?;
                    return Ok(block);
                }
                TokenKind::Word(w) if w == "call" => {
                    block.instructions.push(self.call(None, facts)?);
                }
                TokenKind::Word(w) if w == "store" => {
                    self.pos += 1;
                    let ty = self.ty()?;
                    let value = self.value(ty, facts)?;
                    self.expect(TokenKind::Comma, "`,`")?;
                    self.ptr_ty()?;
                    let slot = self.value(Type::Ptr, facts)?;
                    self.align()?;
                    block.instructions.push(Instruction::Store { ty, value, slot });
                }
                TokenKind::Local(name) => {
                    self.pos += 1;
                    self.expect(TokenKind::Equals, "`=`")?;
                    facts.defs.push((name.clone(), Site::of(&tok)));
                    if self.is_word("phi") {
                        let op_tok = self.next()?;
                        if !block.instructions.is_empty() {
                            return Err(Site::of(&op_tok).error("phi nodes must appear at the start of a block"));
                        }
                        let phi = self.phi(name.clone(), facts)?;
                        facts.phi_sites.push((block.label.clone(), block.phis.len(), Site::of(&op_tok)));
                        block.phis.push(phi);
                    } else {
                        block.instructions.push(self.assignment(name.clone(), facts)?);
                    }
                }
                _ => return Err(Self::unexpected(&tok, "an instruction")),
            }
        }
    }

    fn align(&mut self) -> Result<(), ParseError> {
        if self.peek_kind() == Some(&TokenKind::Comma) {
            self.pos += 1;
            self.expect_word("align")?;
            let t = self.next()?;
            if !matches!(t.kind, TokenKind::Int(_)) {
                return Err(Self::unexpected(&t, "an alignment"));
            }
        }
        Ok(())
    }

    fn label_ref(&mut self, facts: &mut FnFacts) -> Result<String, ParseError> {
        let t = self.next()?;
        match t.kind.clone() {
            TokenKind::Local(l) => {
                facts.branch_targets.push((l.clone(), Site::of(&t)));
                Ok(l)
            }
            _ => Err(Self::unexpected(&t, "a label `%name`")),
        }
    }

    fn terminator(&mut self, facts: &mut FnFacts) -> Result<Terminator, ParseError> {
        let tok = self.next()?;
        if tok.kind == TokenKind::Word("ret".into()) {
            if self.is_word("void") {
                self.pos += 1;
                return Ok(Terminator::Ret(None));
            }
            let ty = self.ty()?;
            let v = self.value(ty, facts)?;
            return Ok(Terminator::Ret(Some((ty, v))));
        }
        if self.is_word("label") {
            self.pos += 1;
            return Ok(Terminator::Br(self.label_ref(facts)?));
        }
        let ty_tok = self.peek().cloned().ok_or_else(|| self.eof_error())?;
        if self.int_ty()? != IntWidth::I1 {
            return Err(Self::unexpected(&ty_tok, "`i1` branch condition"));
        }
        let cond = self.value(Type::Int(IntWidth::I1), facts)?;
        self.expect(TokenKind::Comma, "`,`")?;
        self.expect_word("label")?;
        let if_true = self.label_ref(facts)?;
        self.expect(TokenKind::Comma, "`,`")?;
        self.expect_word("label")?;
        let if_false = self.label_ref(facts)?;
        Ok(Terminator::CondBr { cond, if_true, if_false })
    }

    fn call(&mut self, result: Option<String>, facts: &mut FnFacts) -> Result<Instruction, ParseError> {
        self.expect_word("call")?;
        let ret_ty = self.ty()?;
        let callee_tok = self.next()?;
        let TokenKind::Global(callee) = callee_tok.kind.clone() else {
            return Err(Self::unexpected(&callee_tok, "a function symbol `@name`"));
        };
        facts.calls.push((callee.clone(), Site::of(&callee_tok)));
        if result.is_some() && ret_ty == Type::Void {
            return Err(Site::of(&callee_tok).error("cannot name the result of a void call"));
        }
        self.expect(TokenKind::LParen, "`(`")?;
        let mut args = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                let ty = self.ty()?;
                let attrs = self.param_attrs();
                let value = self.value(ty, facts)?;
                args.push(Arg { ty, attrs, value });
                if self.eat(&TokenKind::RParen) {
                    break;
                }
                self.expect(TokenKind::Comma, "`,` or `)`")?;
            }
        }
        while matches!(self.peek_kind(), Some(TokenKind::AttrRef(_))) {
            self.pos += 1;
        }
        Ok(Instruction::Call { result, ret_ty, callee, args })
    }

    fn assignment(&mut self, result: String, facts: &mut FnFacts) -> Result<Instruction, ParseError> {
        let tok = self.peek().cloned().ok_or_else(|| self.eof_error())?;
        let TokenKind::Word(op) = &tok.kind else {
            return Err(Self::unexpected(&tok, "an instruction"));
        };
        if op == "call" {
            return self.call(Some(result), facts);
        }
        self.pos += 1;
        if let Some(bin) = BinOp::ALL.into_iter().find(|b| b.keyword() == op) {
            while self.is_word("nsw") || self.is_word("nuw") {
                self.pos += 1;
            }
            let width = self.int_ty()?;
            let lhs = self.value(Type::Int(width), facts)?;
            self.expect(TokenKind::Comma, "`,`")?;
            let rhs = self.value(Type::Int(width), facts)?;
            return Ok(Instruction::BinOp { result, op: bin, width, lhs, rhs });
        }
        match op.as_str() {
            "alloca" => {
                let ty = self.ty()?;
                if ty == Type::Void {
                    return Err(Site::of(&tok).error("cannot allocate a void slot"));
                }
                self.align()?;
                Ok(Instruction::Alloca { result, ty })
            }
            "load" => {
                let ty = self.ty()?;
                self.expect(TokenKind::Comma, "`,`")?;
                self.ptr_ty()?;
                let slot = self.value(Type::Ptr, facts)?;
                self.align()?;
                Ok(Instruction::Load { result, ty, slot })
            }
            "icmp" => {
                let pt = self.next()?;
                let pred = match &pt.kind {
                    TokenKind::Word(w) => CmpPred::ALL.into_iter().find(|p| p.keyword() == w),
                    _ => None,
                }
                .ok_or_else(|| Self::unexpected(&pt, "a comparison predicate (eq, ne, slt, sle, sgt, sge)"))?;
                let width = self.int_ty()?;
                let lhs = self.value(Type::Int(width), facts)?;
                self.expect(TokenKind::Comma, "`,`")?;
                let rhs = self.value(Type::Int(width), facts)?;
                Ok(Instruction::ICmp { result, pred, width, lhs, rhs })
            }
            "inttoptr" => {
                let from = self.int_ty()?;
                let source = self.value(Type::Int(from), facts)?;
                self.expect_word("to")?;
                self.ptr_ty()?;
                Ok(Instruction::IntToAddr { result, from, source })
            }
            "zext" | "sext" | "trunc" => {
                let kind = match op.as_str() {
                    "zext" => ExtKind::Zext,
                    "sext" => ExtKind::Sext,
                    _ => ExtKind::Trunc,
                };
                let from = self.int_ty()?;
                let source = self.value(Type::Int(from), facts)?;
                self.expect_word("to")?;
                let to_tok = self.peek().cloned().ok_or_else(|| self.eof_error())?;
                let to = self.int_ty()?;
                let ok = match kind {
                    ExtKind::Trunc => to.bits() < from.bits(),
                    _ => to.bits() > from.bits(),
                };
                if !ok {
                    return Err(Site::of(&to_tok).error(format!("invalid widths for {}", kind.keyword())));
                }
                Ok(Instruction::Ext { result, kind, from, to, source })
            }
            "select" => {
                let ct = self.peek().cloned().ok_or_else(|| self.eof_error())?;
                if self.int_ty()? != IntWidth::I1 {
                    return Err(Self::unexpected(&ct, "`i1` select condition"));
                }
                let cond = self.value(Type::Int(IntWidth::I1), facts)?;
                self.expect(TokenKind::Comma, "`,`")?;
                let ty = self.ty()?;
                let if_true = self.value(ty, facts)?;
                self.expect(TokenKind::Comma, "`,`")?;
                let t2 = self.peek().cloned().ok_or_else(|| self.eof_error())?;
                if self.ty()? != ty {
                    return Err(Self::unexpected(&t2, &format!("`{ty}` to match the first operand")));
                }
                let if_false = self.value(ty, facts)?;
                Ok(Instruction::Select { result, cond, ty, if_true, if_false })
            }
            _ => Err(Site::of(&tok).error(format!("unsupported instruction `{op}`"))),
        }
    }

    fn phi(&mut self, result: String, facts: &mut FnFacts) -> Result<PhiNode, ParseError> {
        let ty = self.ty()?;
        let mut incoming = Vec::new();
        loop {
            self.expect(TokenKind::LBracket, "`[`")?;
            let v = self.value(ty, facts)?;
            self.expect(TokenKind::Comma, "`,`")?;
            let lt = self.next()?;
            let TokenKind::Local(label) = lt.kind.clone() else {
                return Err(Self::unexpected(&lt, "a predecessor label"));
            };
            facts.branch_targets.push((label.clone(), Site::of(&lt)));
            self.expect(TokenKind::RBracket, "`]`")?;
            incoming.push((v, label));
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(PhiNode { result, ty, incoming })
    }

    fn value(&mut self, ty: Type, facts: &mut FnFacts) -> Result<Value, ParseError> {
        let tok = self.next()?;
        let mismatch = || Self::unexpected(&tok, &format!("a `{ty}` value"));
        let v = match &tok.kind {
            TokenKind::Local(name) => {
                facts.uses.push((name.clone(), Site::of(&tok)));
                Value::Local(name.clone())
            }
            TokenKind::Global(name) => {
                if ty != Type::Ptr {
                    return Err(mismatch());
                }
                facts.global_uses.push((name.clone(), Site::of(&tok)));
                Value::Global(name.clone())
            }
            TokenKind::Int(n) => match ty {
                Type::Int(w) => Value::int(w, *n),
                Type::Double => Value::Float(*n as f64),
                _ => return Err(mismatch()),
            },
            TokenKind::Float(x) if ty == Type::Double => Value::Float(*x),
            TokenKind::Word(w) => match (w.as_str(), ty) {
                ("true", Type::Int(IntWidth::I1)) => Value::int(IntWidth::I1, 1),
                ("false", Type::Int(IntWidth::I1)) => Value::int(IntWidth::I1, 0),
                ("null", Type::Ptr) => Value::NullRef,
                ("inttoptr", Type::Ptr) => {
                    self.expect(TokenKind::LParen, "`(`")?;
                    self.int_ty()?;
                    let n = self.next()?;
                    let TokenKind::Int(index) = n.kind else {
                        return Err(Self::unexpected(&n, "a constant address"));
                    };
                    if index < 0 {
                        return Err(Site::of(&n).error("static addresses must be non-negative"));
                    }
                    self.expect_word("to")?;
                    self.ptr_ty()?;
                    self.expect(TokenKind::RParen, "`)`")?;
                    Value::StaticAddr { index: index as u64, kind: AddrKind::Qubit }
                }
                _ => return Err(mismatch()),
            },
            _ => return Err(mismatch()),
        };
        Ok(v)
    }
}

fn check_function(
    f: &ParsedFn,
    declared: &HashSet<String>,
    defined: &HashSet<String>,
    globals: &HashSet<&str>,
) -> Result<(), ParseError> {
    let facts = &f.facts;
    let mut labels = HashSet::new();
    for (l, site) in &facts.labels {
        if !labels.insert(l.as_str()) {
            return Err(site.error(format!("duplicate block label `{l}`")));
        }
    }
    labels.extend(f.def.blocks.first().map(|b| b.label.as_str()));
    for (l, site) in &facts.branch_targets {
        if !labels.contains(l.as_str()) {
            return Err(site.error(format!("unknown block label `%{l}`")));
        }
    }
    let mut defs = HashSet::new();
    for (name, site) in &facts.defs {
        if labels.contains(name.as_str()) || !defs.insert(name.as_str()) {
            return Err(site.error(format!("`%{name}` is defined more than once")));
        }
    }
    for (name, site) in &facts.uses {
        if !defs.contains(name.as_str()) {
            return Err(site.error(format!("use of undefined value `%{name}`")));
        }
    }
    for (callee, site) in &facts.calls {
        if !declared.contains(callee) && !defined.contains(callee) {
            return Err(site.error(format!("call to undeclared function `@{callee}`")));
        }
    }
    for (name, site) in &facts.global_uses {
        if !globals.contains(name.as_str()) {
            return Err(site.error(format!("reference to undefined global `@{name}`")));
        }
    }
    let preds = f.def.predecessors();
    for (label, idx, site) in &facts.phi_sites {
        let block = f.def.block(label).expect("phi site refers to a parsed block");
        let phi = &block.phis[*idx];
        let mut listed: Vec<&str> = phi.incoming.iter().map(|(_, l)| l.as_str()).collect();
        listed.sort_unstable();
        let before = listed.len();
        listed.dedup();
        let mut expected: Vec<&str> = preds[label].iter().map(String::as_str).collect();
        expected.sort_unstable();
        if before != listed.len() || listed != expected {
            return Err(site.error(format!(
                "phi `%{}` must list exactly one value per predecessor of `{label}`",
                phi.result
            )));
        }
    }
    Ok(())
}
