// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Recursive descent over the token stream.
//!
//! ```text
//! program  := fun*
//! fun      := "fun" IDENT "(" [param {"," param}] ")" [":" type]
//!             {"requires" expr | "ensures" expr} block
//! param    := IDENT ":" type
//! type     := "int" | "bool" | "set" | "vec"
//! block    := "{" stmt* "}"
//! stmt     := "var" IDENT ":" type ":=" expr ";"
//!           | IDENT ":=" expr ";" | IDENT "[" expr "]" ":=" expr ";"
//!           | IDENT "(" args ")" ";"
//!           | "if" expr block ["else" (block | if-stmt)]
//!           | "while" expr "invariant" expr block
//!           | "assert" expr ";" | "return" [expr] ";" | "print" expr ";"
//! expr     := imp ["<==>" imp]
//! imp      := or ["==>" imp]
//! or       := and {"or" and}
//! and      := neg {"and" neg}
//! neg      := "not" neg | cmp
//! cmp      := add [("=" | "!=" | "<" | "<=" | ">" | ">=" | "in" | "subset") add]
//! add      := mul {("+" | "-" | "union" | "diff") mul}
//! mul      := unary {("*" | "div" | "mod" | "inter") unary}
//! unary    := "-" unary | "forall" IDENT "::" expr | postfix
//! postfix  := primary {"[" expr "]"}
//! primary  := INT | "true" | "false" | IDENT ["(" args ")"] | "(" expr ")"
//!           | "{" [args] "}" | ("len" | "card" | "newvec") "(" expr ")"
//!           | "read" "(" ")" | "\result" | "\old" "(" IDENT ")"
//! ```
//!
//! `a != b`, `a > b` and `a >= b` are read as `not a = b`, `b < a` and
//! `b <= a`. A minus directly before a literal makes a negative literal;
//! any other negation `-e` is read as `0 - e`.

use std::collections::BTreeSet;

use crate::ast::*;
use crate::error::ParseError;
use crate::lexer::{lex, Tok};

pub fn parse_program(src: &str) -> Result<SourceProgram, ParseError> {
    let mut p = Parser::new(src)?;
    let mut functions = Vec::new();
    while p.peek() != &Tok::Eof {
        functions.push(p.function()?);
    }
    Ok(SourceProgram { functions })
}

/// Parses a single expression, as written in annotations.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

type R<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    expected: BTreeSet<String>,
}

const fn kw(s: &'static str) -> Tok {
    Tok::Kw(s)
}

const fn sym(s: &'static str) -> Tok {
    Tok::Sym(s)
}

impl Parser {
    fn new(src: &str) -> R<Parser> {
        Ok(Parser {
            toks: lex(src)?.toks,
            i: 0,
            expected: BTreeSet::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.i + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        self.expected.clear();
        t
    }

    fn at(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            true
        } else {
            self.expected.insert(t.to_string());
            false
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        let hit = self.at(t);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect(&mut self, t: &Tok) -> R<Pos> {
        let pos = self.pos();
        if self.eat(t) {
            Ok(pos)
        } else {
            Err(self.error())
        }
    }

    fn error(&self) -> ParseError {
        ParseError {
            pos: self.pos(),
            found: self.peek().to_string(),
            expected: self.expected.iter().cloned().collect(),
        }
    }

    fn ident(&mut self) -> R<String> {
        if let Tok::Ident(s) = self.peek() {
            let s = s.clone();
            self.bump();
            return Ok(s);
        }
        self.expected.insert("identifier".into());
        Err(self.error())
    }

    fn ty(&mut self) -> R<Type> {
        for (k, t) in [
            ("int", Type::Int),
            ("bool", Type::Bool),
            ("set", Type::Set),
            ("vec", Type::Vec),
        ] {
            if self.eat(&kw(k)) {
                return Ok(t);
            }
        }
        Err(self.error())
    }

    fn function(&mut self) -> R<FunctionDecl> {
        let pos = self.expect(&kw("fun"))?;
        let name = self.ident()?;
        self.expect(&sym("("))?;
        let mut params = Vec::new();
        if !self.eat(&sym(")")) {
            loop {
                let name = self.ident()?;
                self.expect(&sym(":"))?;
                params.push(Param {
                    name,
                    ty: self.ty()?,
                });
                if self.eat(&sym(")")) {
                    break;
                }
                self.expect(&sym(","))?;
            }
        }
        let ret = if self.eat(&sym(":")) { Some(self.ty()?) } else { None };
        let (mut requires, mut ensures) = (None, None);
        loop {
            let slot = if self.eat(&kw("requires")) {
                &mut requires
            } else if self.eat(&kw("ensures")) {
                &mut ensures
            } else {
                break;
            };
            let e = self.expr()?;
            *slot = Some(match slot.take() {
                None => e,
                Some(prev) => {
                    let pos = e.pos;
                    Expr::new(ExprKind::Binary(BinOp::And, Box::new(prev), Box::new(e)), pos)
                }
            });
        }
        let body = self.block()?;
        Ok(FunctionDecl {
            name,
            params,
            ret,
            requires,
            ensures,
            body,
            pos,
        })
    }

    fn block(&mut self) -> R<Vec<Stmt>> {
        self.expect(&sym("{"))?;
        let mut out = Vec::new();
        while !self.eat(&sym("}")) {
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn stmt(&mut self) -> R<Stmt> {
        let pos = self.pos();
        let kind = if self.eat(&kw("var")) {
            let name = self.ident()?;
            self.expect(&sym(":"))?;
            let ty = self.ty()?;
            self.expect(&sym(":="))?;
            let e = self.expr()?;
            self.expect(&sym(";"))?;
            StmtKind::VarDecl(name, ty, e)
        } else if self.at(&kw("if")) {
            return self.if_stmt();
        } else if self.eat(&kw("while")) {
            let cond = self.expr()?;
            self.expect(&kw("invariant"))?;
            let inv = self.expr()?;
            StmtKind::While(cond, inv, self.block()?)
        } else if self.eat(&kw("assert")) {
            let e = self.expr()?;
            self.expect(&sym(";"))?;
            StmtKind::Assert(e)
        } else if self.eat(&kw("return")) {
            if self.eat(&sym(";")) {
                StmtKind::Return(None)
            } else {
                let e = self.expr()?;
                self.expect(&sym(";"))?;
                StmtKind::Return(Some(e))
            }
        } else if self.eat(&kw("print")) {
            let e = self.expr()?;
            self.expect(&sym(";"))?;
            StmtKind::Print(e)
        } else if let Tok::Ident(_) = self.peek() {
            let name = self.ident()?;
            let kind = if self.eat(&sym(":=")) {
                StmtKind::Assign(name, self.expr()?)
            } else if self.eat(&sym("[")) {
                let i = self.expr()?;
                self.expect(&sym("]"))?;
                self.expect(&sym(":="))?;
                StmtKind::VecStore(name, i, self.expr()?)
            } else if self.eat(&sym("(")) {
                StmtKind::Call(name, self.args(")")?)
            } else {
                return Err(self.error());
            };
            self.expect(&sym(";"))?;
            kind
        } else {
            for k in ["var", "while", "assert", "return", "print", "}"] {
                self.expected.insert(format!("`{k}`"));
            }
            self.expected.insert("identifier".into());
            return Err(self.error());
        };
        Ok(Stmt { kind, pos })
    }

    fn if_stmt(&mut self) -> R<Stmt> {
        let pos = self.expect(&kw("if"))?;
        let cond = self.expr()?;
        let then = self.block()?;
        let els = if self.eat(&kw("else")) {
            if self.at(&kw("if")) {
                vec![self.if_stmt()?]
            } else {
                self.block()?
            }
        } else {
            Vec::new()
        };
        Ok(Stmt {
            kind: StmtKind::If(cond, then, els),
            pos,
        })
    }

    /// Comma-separated expressions up to the closing symbol.
    fn args(&mut self, close: &'static str) -> R<Vec<Expr>> {
        let mut out = Vec::new();
        if self.eat(&sym(close)) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat(&sym(close)) {
                return Ok(out);
            }
            self.expect(&sym(","))?;
        }
    }

    pub(crate) fn expr(&mut self) -> R<Expr> {
        let lhs = self.imp()?;
        let pos = self.pos();
        if self.eat(&sym("<==>")) {
            let rhs = self.imp()?;
            return Ok(bin(BinOp::Iff, lhs, rhs, pos));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> R<Expr> {
        let lhs = self.or()?;
        let pos = self.pos();
        if self.eat(&sym("==>")) {
            let rhs = self.imp()?;
            return Ok(bin(BinOp::Implies, lhs, rhs, pos));
        }
        Ok(lhs)
    }

    fn left_assoc(
        &mut self,
        ops: &[(Tok, BinOp)],
        next: fn(&mut Parser) -> R<Expr>,
    ) -> R<Expr> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (t, op) in ops {
                let pos = self.pos();
                if self.eat(t) {
                    let rhs = next(self)?;
                    lhs = bin(*op, lhs, rhs, pos);
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn or(&mut self) -> R<Expr> {
        self.left_assoc(&[(kw("or"), BinOp::Or)], Parser::and)
    }

    fn and(&mut self) -> R<Expr> {
        self.left_assoc(&[(kw("and"), BinOp::And)], Parser::neg)
    }

    fn neg(&mut self) -> R<Expr> {
        let pos = self.pos();
        if self.eat(&kw("not")) {
            let e = self.neg()?;
            return Ok(Expr::new(ExprKind::Not(Box::new(e)), pos));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> R<Expr> {
        let lhs = self.add()?;
        let pos = self.pos();
        let table = [
            (sym("="), BinOp::Eq, false),
            (sym("<"), BinOp::Lt, false),
            (sym("<="), BinOp::Le, false),
            (sym(">"), BinOp::Lt, true),
            (sym(">="), BinOp::Le, true),
            (kw("in"), BinOp::In, false),
            (kw("subset"), BinOp::Subset, false),
        ];
        for (t, op, swap) in table {
            if self.eat(&t) {
                let rhs = self.add()?;
                return Ok(if swap {
                    bin(op, rhs, lhs, pos)
                } else {
                    bin(op, lhs, rhs, pos)
                });
            }
        }
        if self.eat(&sym("!=")) {
            let rhs = self.add()?;
            let eq = bin(BinOp::Eq, lhs, rhs, pos);
            return Ok(Expr::new(ExprKind::Not(Box::new(eq)), pos));
        }
        Ok(lhs)
    }

    fn add(&mut self) -> R<Expr> {
        self.left_assoc(
            &[
                (sym("+"), BinOp::Add),
                (sym("-"), BinOp::Sub),
                (kw("union"), BinOp::Union),
                (kw("diff"), BinOp::Diff),
            ],
            Parser::mul,
        )
    }

    fn mul(&mut self) -> R<Expr> {
        self.left_assoc(
            &[
                (sym("*"), BinOp::Mul),
                (kw("div"), BinOp::Div),
                (kw("mod"), BinOp::Mod),
                (kw("inter"), BinOp::Inter),
            ],
            Parser::unary,
        )
    }

    fn unary(&mut self) -> R<Expr> {
        let pos = self.pos();
        if self.eat(&sym("-")) {
            if let (Tok::Int(n), t) = (self.peek().clone(), self.peek2()) {
                if t != &sym("[") {
                    self.bump();
                    let v = i64::try_from(-(n as i128))
                        .map_err(|_| ParseError::lexical(pos, "integer literal too large"))?;
                    return Ok(Expr::new(ExprKind::Int(v), pos));
                }
            }
            let e = self.unary()?;
            let zero = Expr::new(ExprKind::Int(0), pos);
            return Ok(bin(BinOp::Sub, zero, e, pos));
        }
        if self.eat(&kw("forall")) {
            let v = self.ident()?;
            self.expect(&sym("::"))?;
            let body = self.expr()?;
            return Ok(Expr::new(ExprKind::Forall(v, Box::new(body)), pos));
        }
        let mut e = self.primary()?;
        loop {
            let pos = self.pos();
            if !self.eat(&sym("[")) {
                return Ok(e);
            }
            let i = self.expr()?;
            self.expect(&sym("]"))?;
            e = Expr::new(ExprKind::Index(Box::new(e), Box::new(i)), pos);
        }
    }

    fn primary(&mut self) -> R<Expr> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                let v = i64::try_from(n)
                    .map_err(|_| ParseError::lexical(pos, "integer literal too large"))?;
                ExprKind::Int(v)
            }
            Tok::Kw("true") | Tok::Kw("false") => {
                let (t, _) = self.bump();
                ExprKind::Bool(t == kw("true"))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat(&sym("(")) {
                    ExprKind::Call(name, self.args(")")?)
                } else {
                    ExprKind::Var(name)
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(&sym(")"))?;
                return Ok(e);
            }
            Tok::Sym("{") => {
                self.bump();
                ExprKind::SetLit(self.args("}")?)
            }
            Tok::Kw(k @ ("len" | "card" | "newvec")) => {
                self.bump();
                self.expect(&sym("("))?;
                let a = Box::new(self.expr()?);
                self.expect(&sym(")"))?;
                match k {
                    "len" => ExprKind::Len(a),
                    "card" => ExprKind::Card(a),
                    _ => ExprKind::NewVec(a),
                }
            }
            Tok::Kw("read") => {
                self.bump();
                self.expect(&sym("("))?;
                self.expect(&sym(")"))?;
                ExprKind::Read
            }
            Tok::Sym("\\result") => {
                self.bump();
                ExprKind::Result
            }
            Tok::Sym("\\old") => {
                self.bump();
                self.expect(&sym("("))?;
                let v = self.ident()?;
                self.expect(&sym(")"))?;
                ExprKind::Old(v)
            }
            _ => {
                for e in ["integer", "identifier", "`(`", "`{`", "`true`", "`false`", "`-`"] {
                    self.expected.insert(e.into());
                }
                return Err(self.error());
            }
        };
        Ok(Expr::new(kind, pos))
    }
}

fn bin(op: BinOp, a: Expr, b: Expr, pos: Pos) -> Expr {
    Expr::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), pos)
}
