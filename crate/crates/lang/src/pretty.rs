// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Canonical layout: one statement per line, two-space indentation and
//! only the parentheses the grammar needs.

use std::fmt::Write;

use crate::ast::*;

pub fn print_program(p: &SourceProgram) -> String {
    let mut out = String::new();
    for (i, f) in p.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_function(&mut out, f);
    }
    out
}

fn print_function(out: &mut String, f: &FunctionDecl) {
    let params: Vec<String> = f.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
    write!(out, "fun {}({})", f.name, params.join(", ")).unwrap();
    if let Some(t) = f.ret {
        write!(out, ": {t}").unwrap();
    }
    out.push('\n');
    if let Some(r) = &f.requires {
        writeln!(out, "  requires {}", print_expr(r)).unwrap();
    }
    if let Some(e) = &f.ensures {
        writeln!(out, "  ensures {}", print_expr(e)).unwrap();
    }
    out.push_str("{\n");
    block(out, &f.body, 1);
    out.push_str("}\n");
}

fn block(out: &mut String, body: &[Stmt], depth: usize) {
    for s in body {
        stmt(out, s, depth);
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    let ind = "  ".repeat(depth);
    out.push_str(&ind);
    match &s.kind {
        StmtKind::VarDecl(x, t, e) => writeln!(out, "var {x}: {t} := {};", print_expr(e)).unwrap(),
        StmtKind::Assign(x, e) => writeln!(out, "{x} := {};", print_expr(e)).unwrap(),
        StmtKind::VecStore(x, i, e) => {
            writeln!(out, "{x}[{}] := {};", print_expr(i), print_expr(e)).unwrap()
        }
        StmtKind::If(c, t, e) => {
            writeln!(out, "if {} {{", print_expr(c)).unwrap();
            block(out, t, depth + 1);
            if !e.is_empty() {
                writeln!(out, "{ind}}} else {{").unwrap();
                block(out, e, depth + 1);
            }
            writeln!(out, "{ind}}}").unwrap();
        }
        StmtKind::While(c, inv, body) => {
            writeln!(out, "while {}", print_expr(c)).unwrap();
            writeln!(out, "{ind}  invariant {}", print_expr(inv)).unwrap();
            writeln!(out, "{ind}{{").unwrap();
            block(out, body, depth + 1);
            writeln!(out, "{ind}}}").unwrap();
        }
        StmtKind::Assert(e) => writeln!(out, "assert {};", print_expr(e)).unwrap(),
        StmtKind::Return(None) => out.push_str("return;\n"),
        StmtKind::Return(Some(e)) => writeln!(out, "return {};", print_expr(e)).unwrap(),
        StmtKind::Print(e) => writeln!(out, "print {};", print_expr(e)).unwrap(),
        StmtKind::Call(f, args) => writeln!(out, "{f}({});", list(args)).unwrap(),
    }
}

const NOT: u8 = 5;
const UNARY: u8 = 9;
const POSTFIX: u8 = 10;

fn list(es: &[Expr]) -> String {
    es.iter().map(print_expr).collect::<Vec<_>>().join(", ")
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, _, _) => op.precedence(),
        ExprKind::Not(_) => NOT,
        ExprKind::Int(n) if *n < 0 => UNARY,
        // Quantifiers extend to the right as far as possible.
        ExprKind::Forall(..) => 0,
        ExprKind::Index(..) => POSTFIX,
        _ => POSTFIX + 1,
    }
}

/// Prints `e` where the context requires binding strength `min`.
fn expr(out: &mut String, e: &Expr, min: u8) {
    let p = prec(e);
    let paren = p < min || (p == 0 && min > 0);
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Int(n) => write!(out, "{n}").unwrap(),
        ExprKind::Bool(b) => write!(out, "{b}").unwrap(),
        ExprKind::Var(x) => out.push_str(x),
        ExprKind::Not(a) => {
            out.push_str("not ");
            expr(out, a, NOT);
        }
        ExprKind::Binary(op, a, b) => {
            let (l, r) = match op {
                BinOp::Implies => (p + 1, p),
                BinOp::Iff | BinOp::Eq | BinOp::Lt | BinOp::Le | BinOp::In | BinOp::Subset => {
                    (p + 1, p + 1)
                }
                _ => (p, p + 1),
            };
            expr(out, a, l);
            write!(out, " {} ", op.symbol()).unwrap();
            expr(out, b, r);
        }
        ExprKind::SetLit(es) => write!(out, "{{{}}}", list(es)).unwrap(),
        ExprKind::Index(v, i) => {
            expr(out, v, POSTFIX);
            write!(out, "[{}]", print_expr(i)).unwrap();
        }
        ExprKind::Len(a) => write!(out, "len({})", print_expr(a)).unwrap(),
        ExprKind::Card(a) => write!(out, "card({})", print_expr(a)).unwrap(),
        ExprKind::NewVec(a) => write!(out, "newvec({})", print_expr(a)).unwrap(),
        ExprKind::Read => out.push_str("read()"),
        ExprKind::Call(f, args) => write!(out, "{f}({})", list(args)).unwrap(),
        ExprKind::Result => out.push_str("\\result"),
        ExprKind::Old(x) => write!(out, "\\old({x})").unwrap(),
        ExprKind::Forall(v, body) => {
            write!(out, "forall {v} :: ").unwrap();
            expr(out, body, 0);
        }
    }
    if paren {
        out.push(')');
    }
}
