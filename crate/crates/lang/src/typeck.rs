// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Static checking.
//!
//! Besides the typing rules this enforces the structural rules the
//! verifier relies on: every variable name is declared once per function
//! (no shadowing, including quantifier variables), `return` only as the
//! last statement of a body and required there for value-returning
//! functions, calls forming a DAG, annotations free of calls and input,
//! `\result` and `\old` only in `ensures`, `\old` only of parameters, and
//! a parameter that the body assigns appears in `ensures` only under
//! `\old`.

use std::collections::{BTreeMap, BTreeSet};

use lissom_logic::{is_reserved_binder_name, Formula, Term};

use crate::ast::*;
use crate::error::{TypeError, TypeErrorKind};

/// Logical name of `\result`.
pub const RESULT: &str = "\\result";

/// Logical name of `\old(x)`.
pub fn old_name(x: &str) -> String {
    format!("\\old_{x}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedFunction {
    /// The declaration with every expression typed.
    pub decl: FunctionDecl,
    /// Every parameter and local variable.
    pub vars: BTreeMap<String, Type>,
    /// Locals in declaration order, parameters excluded.
    pub locals: Vec<(String, Type)>,
    pub requires: Formula,
    pub ensures: Formula,
    /// Parameters used under `\old`, in parameter order.
    pub olds: Vec<String>,
    /// Variables the body assigns.
    pub assigned: BTreeSet<String>,
}

impl TypedFunction {
    pub fn name(&self) -> &str {
        &self.decl.name
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedProgram {
    pub functions: Vec<TypedFunction>,
}

impl TypedProgram {
    pub fn function(&self, name: &str) -> Option<&TypedFunction> {
        self.functions.iter().find(|f| f.name() == name)
    }

    pub fn source(&self) -> SourceProgram {
        SourceProgram {
            functions: self.functions.iter().map(|f| f.decl.clone()).collect(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Code,
    /// Requires, invariants and asserts.
    Annotation,
    Ensures,
}

struct Sig {
    params: Vec<Type>,
    ret: Option<Type>,
}

struct Checker<'a> {
    sigs: &'a BTreeMap<String, Sig>,
    errors: Vec<TypeError>,
    visible: BTreeMap<String, Type>,
    declared: BTreeSet<String>,
    locals: Vec<(String, Type)>,
    vars: BTreeMap<String, Type>,
    assigned: BTreeSet<String>,
    calls: BTreeSet<String>,
    params: BTreeSet<String>,
    ret: Option<Type>,
    /// Parameters mentioned in `ensures` outside `\old`, and under it.
    ens_plain: BTreeMap<String, Pos>,
    ens_old: BTreeSet<String>,
}

pub fn typecheck(p: &SourceProgram) -> Result<TypedProgram, Vec<TypeError>> {
    let mut errors = Vec::new();
    let mut sigs = BTreeMap::new();
    for f in &p.functions {
        let sig = Sig {
            params: f.params.iter().map(|p| p.ty).collect(),
            ret: f.ret,
        };
        if sigs.insert(f.name.clone(), sig).is_some() {
            errors.push(invalid(f.pos, format!("function `{}` is defined twice", f.name)));
        }
    }
    let mut functions = Vec::new();
    let mut graph: BTreeMap<String, (Pos, BTreeSet<String>)> = BTreeMap::new();
    for f in &p.functions {
        let mut c = Checker {
            sigs: &sigs,
            errors: Vec::new(),
            visible: BTreeMap::new(),
            declared: BTreeSet::new(),
            locals: Vec::new(),
            vars: BTreeMap::new(),
            assigned: BTreeSet::new(),
            calls: BTreeSet::new(),
            params: f.params.iter().map(|p| p.name.clone()).collect(),
            ret: f.ret,
            ens_plain: BTreeMap::new(),
            ens_old: BTreeSet::new(),
        };
        let tf = c.function(f);
        graph.insert(f.name.clone(), (f.pos, std::mem::take(&mut c.calls)));
        errors.append(&mut c.errors);
        functions.push(tf);
    }
    check_acyclic(&graph, &mut errors);
    if errors.is_empty() {
        Ok(TypedProgram { functions })
    } else {
        Err(errors)
    }
}

fn invalid(pos: Pos, msg: impl Into<String>) -> TypeError {
    TypeError {
        pos,
        kind: TypeErrorKind::Invalid(msg.into()),
    }
}

fn check_acyclic(graph: &BTreeMap<String, (Pos, BTreeSet<String>)>, errors: &mut Vec<TypeError>) {
    let mut done: BTreeSet<&str> = BTreeSet::new();
    loop {
        let ready: Vec<&str> = graph
            .iter()
            .filter(|(f, (_, cs))| {
                !done.contains(f.as_str())
                    && cs.iter().all(|c| done.contains(c.as_str()) || !graph.contains_key(c))
            })
            .map(|(f, _)| f.as_str())
            .collect();
        if ready.is_empty() {
            break;
        }
        done.extend(ready);
    }
    for (f, (pos, _)) in graph {
        if !done.contains(f.as_str()) {
            errors.push(invalid(*pos, format!("`{f}` is part of a recursive call cycle")));
        }
    }
}

impl Checker<'_> {
    fn err(&mut self, pos: Pos, kind: TypeErrorKind) {
        self.errors.push(TypeError { pos, kind });
    }

    fn expect(&mut self, pos: Pos, expected: Type, found: Type) {
        if expected != found {
            self.err(pos, TypeErrorKind::Mismatch { expected, found });
        }
    }

    fn declare(&mut self, pos: Pos, name: &str, ty: Type) {
        if is_reserved_binder_name(name) {
            self.err(pos, TypeErrorKind::Invalid(format!("`{name}` is a reserved name")));
        } else if !self.declared.insert(name.to_string()) {
            self.err(pos, TypeErrorKind::Invalid(format!("`{name}` is already declared")));
        }
        self.visible.insert(name.to_string(), ty);
        self.vars.entry(name.to_string()).or_insert(ty);
    }

    fn function(&mut self, f: &FunctionDecl) -> TypedFunction {
        let mut decl = f.clone();
        for p in &f.params {
            self.declare(f.pos, &p.name, p.ty);
        }
        if let Some(e) = &mut decl.requires {
            self.formula(e, Ctx::Annotation);
        }
        let n = decl.body.len();
        for (i, s) in decl.body.iter_mut().enumerate() {
            self.stmt(s, i + 1 == n);
        }
        match (f.ret, decl.body.last().map(|s| &s.kind)) {
            (Some(_), Some(StmtKind::Return(Some(_)))) => {}
            (Some(_), _) => self.err(
                f.pos,
                TypeErrorKind::Invalid(format!(
                    "`{}` must end with a `return` of its result",
                    f.name
                )),
            ),
            _ => {}
        }
        self.visible = f.params.iter().map(|p| (p.name.clone(), p.ty)).collect();
        if let Some(e) = &mut decl.ensures {
            self.formula(e, Ctx::Ensures);
        }
        for (x, pos) in std::mem::take(&mut self.ens_plain) {
            if self.assigned.contains(&x) {
                self.err(
                    pos,
                    TypeErrorKind::Invalid(format!(
                        "ensures mentions parameter `{x}`, which the body assigns; use \\old({x})"
                    )),
                );
            }
        }
        let olds = f
            .params
            .iter()
            .filter(|p| self.ens_old.contains(&p.name))
            .map(|p| p.name.clone())
            .collect();
        // Formulas are only built from well-typed annotations.
        let lower = |e: &Option<Expr>, ok: bool| match e {
            Some(e) if ok => annotation_formula(e),
            _ => Formula::True,
        };
        let ok = self.errors.is_empty();
        TypedFunction {
            requires: lower(&decl.requires, ok),
            ensures: lower(&decl.ensures, ok),
            decl,
            vars: std::mem::take(&mut self.vars),
            locals: std::mem::take(&mut self.locals),
            olds,
            assigned: std::mem::take(&mut self.assigned),
        }
    }

    fn block(&mut self, body: &mut [Stmt]) {
        let saved = self.visible.clone();
        for s in body {
            self.stmt(s, false);
        }
        self.visible = saved;
    }

    fn formula(&mut self, e: &mut Expr, ctx: Ctx) {
        let t = self.expr(e, ctx);
        self.expect(e.pos, Type::Bool, t);
    }

    fn assign_target(&mut self, pos: Pos, x: &str) -> Option<Type> {
        match self.visible.get(x) {
            Some(t) => {
                self.assigned.insert(x.to_string());
                Some(*t)
            }
            None => {
                self.err(pos, TypeErrorKind::UndefinedVariable(x.to_string()));
                None
            }
        }
    }

    fn stmt(&mut self, s: &mut Stmt, last: bool) {
        let pos = s.pos;
        match &mut s.kind {
            StmtKind::VarDecl(x, t, e) => {
                let found = self.expr(e, Ctx::Code);
                self.expect(e.pos, *t, found);
                self.declare(pos, x, *t);
                self.locals.push((x.clone(), *t));
            }
            StmtKind::Assign(x, e) => {
                let found = self.expr(e, Ctx::Code);
                if let Some(t) = self.assign_target(pos, x) {
                    self.expect(e.pos, t, found);
                }
            }
            StmtKind::VecStore(x, i, e) => {
                let ti = self.expr(i, Ctx::Code);
                self.expect(i.pos, Type::Int, ti);
                let te = self.expr(e, Ctx::Code);
                self.expect(e.pos, Type::Int, te);
                if let Some(t) = self.assign_target(pos, x) {
                    self.expect(pos, Type::Vec, t);
                }
            }
            StmtKind::If(c, t, e) => {
                self.formula(c, Ctx::Code);
                self.block(t);
                self.block(e);
            }
            StmtKind::While(c, inv, body) => {
                self.formula(c, Ctx::Code);
                self.formula(inv, Ctx::Annotation);
                self.block(body);
            }
            StmtKind::Assert(f) => self.formula(f, Ctx::Annotation),
            StmtKind::Return(e) => {
                if !last {
                    self.err(
                        pos,
                        TypeErrorKind::Invalid(
                            "`return` is only allowed as the last statement of a function body"
                                .into(),
                        ),
                    );
                }
                match (e, self.ret) {
                    (Some(e), Some(t)) => {
                        let found = self.expr(e, Ctx::Code);
                        self.expect(e.pos, t, found);
                    }
                    (None, None) => {}
                    (Some(e), None) => {
                        self.expr(e, Ctx::Code);
                        self.err(pos, TypeErrorKind::Invalid("function has no result".into()));
                    }
                    (None, Some(t)) => self.err(
                        pos,
                        TypeErrorKind::Invalid(format!("missing result of type {t}")),
                    ),
                }
            }
            StmtKind::Print(e) => {
                let t = self.expr(e, Ctx::Code);
                self.expect(e.pos, Type::Int, t);
            }
            StmtKind::Call(f, args) => {
                if let Some(t) = self.call(pos, f, args) {
                    self.err(
                        pos,
                        TypeErrorKind::Invalid(format!("result of type {t} of `{f}` is discarded")),
                    );
                }
            }
        }
    }

    /// Checks a call and returns the callee's result type.
    fn call(&mut self, pos: Pos, f: &str, args: &mut [Expr]) -> Option<Type> {
        let found: Vec<Type> = args.iter_mut().map(|a| self.expr(a, Ctx::Code)).collect();
        self.calls.insert(f.to_string());
        let sigs = self.sigs;
        let Some(sig) = sigs.get(f) else {
            self.err(pos, TypeErrorKind::UndefinedFunction(f.to_string()));
            return None;
        };
        if sig.params.len() != args.len() {
            self.err(
                pos,
                TypeErrorKind::ArityMismatch {
                    function: f.to_string(),
                    expected: sig.params.len(),
                    found: args.len(),
                },
            );
        } else {
            for ((a, t), want) in args.iter().zip(found).zip(&sig.params) {
                self.expect(a.pos, *want, t);
            }
        }
        sig.ret
    }

    fn expr(&mut self, e: &mut Expr, ctx: Ctx) -> Type {
        let t = self.infer(e, ctx);
        e.ty = Some(t);
        t
    }

    fn only(&mut self, pos: Pos, ok: bool, what: &str) {
        if !ok {
            self.err(pos, TypeErrorKind::Invalid(what.to_string()));
        }
    }

    fn infer(&mut self, e: &mut Expr, ctx: Ctx) -> Type {
        use Type::*;
        let pos = e.pos;
        match &mut e.kind {
            ExprKind::Int(_) => Int,
            ExprKind::Bool(_) => Bool,
            ExprKind::Var(x) => match self.visible.get(x.as_str()) {
                Some(t) => {
                    if ctx == Ctx::Ensures && self.params.contains(x.as_str()) {
                        self.ens_plain.entry(x.clone()).or_insert(pos);
                    }
                    *t
                }
                None => {
                    self.err(pos, TypeErrorKind::UndefinedVariable(x.clone()));
                    Int
                }
            },
            ExprKind::Not(a) => {
                self.formula(a, ctx);
                Bool
            }
            ExprKind::Binary(op, a, b) => {
                let op = *op;
                if op.annotation_only() {
                    self.only(pos, ctx != Ctx::Code, &format!("`{}` only in annotations", op.symbol()));
                }
                let ta = self.expr(a, ctx);
                let tb = self.expr(b, ctx);
                let (want_a, want_b, out) = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => (Int, Int, Int),
                    BinOp::Eq => (ta, ta, Bool),
                    BinOp::Lt | BinOp::Le => (Int, Int, Bool),
                    BinOp::And | BinOp::Or | BinOp::Implies | BinOp::Iff => (Bool, Bool, Bool),
                    BinOp::In => (Int, Set, Bool),
                    BinOp::Subset => (Set, Set, Bool),
                    BinOp::Union | BinOp::Inter | BinOp::Diff => (Set, Set, Set),
                };
                self.expect(a.pos, want_a, ta);
                self.expect(b.pos, want_b, tb);
                out
            }
            ExprKind::SetLit(es) => {
                for x in es {
                    let t = self.expr(x, ctx);
                    self.expect(x.pos, Int, t);
                }
                Set
            }
            ExprKind::Index(v, i) => {
                let tv = self.expr(v, ctx);
                self.expect(v.pos, Vec, tv);
                let ti = self.expr(i, ctx);
                self.expect(i.pos, Int, ti);
                Int
            }
            ExprKind::Len(v) => {
                let tv = self.expr(v, ctx);
                self.expect(v.pos, Vec, tv);
                Int
            }
            ExprKind::Card(s) => {
                let ts = self.expr(s, ctx);
                self.expect(s.pos, Set, ts);
                Int
            }
            ExprKind::NewVec(n) => {
                let tn = self.expr(n, ctx);
                self.expect(n.pos, Int, tn);
                Vec
            }
            ExprKind::Read => {
                self.only(pos, ctx == Ctx::Code, "`read()` is not allowed in annotations");
                Int
            }
            ExprKind::Call(f, args) => {
                self.only(pos, ctx == Ctx::Code, "calls are not allowed in annotations");
                let f = f.clone();
                match self.call(pos, &f, args) {
                    Some(t) => t,
                    None => {
                        if self.sigs.contains_key(&f) {
                            self.err(pos, TypeErrorKind::Invalid(format!("`{f}` has no result")));
                        }
                        Int
                    }
                }
            }
            ExprKind::Result => match (ctx, self.ret) {
                (Ctx::Ensures, Some(t)) => t,
                (Ctx::Ensures, None) => {
                    self.err(pos, TypeErrorKind::Invalid("`\\result` of a function without result".into()));
                    Int
                }
                _ => {
                    self.err(pos, TypeErrorKind::Invalid("`\\result` only in ensures".into()));
                    Int
                }
            },
            ExprKind::Old(x) => {
                if ctx != Ctx::Ensures {
                    self.err(pos, TypeErrorKind::Invalid("`\\old` only in ensures".into()));
                }
                if !self.params.contains(x.as_str()) {
                    self.err(
                        pos,
                        TypeErrorKind::Invalid(format!("`\\old({x})`: `{x}` is not a parameter")),
                    );
                    return Int;
                }
                self.ens_old.insert(x.clone());
                self.visible.get(x.as_str()).copied().unwrap_or(Int)
            }
            ExprKind::Forall(v, body) => {
                if ctx == Ctx::Code {
                    self.err(pos, TypeErrorKind::Invalid("`forall` only in annotations".into()));
                }
                let saved = self.visible.clone();
                if self.visible.contains_key(v.as_str()) || is_reserved_binder_name(v) {
                    self.err(pos, TypeErrorKind::Invalid(format!("`{v}` shadows a variable")));
                }
                self.visible.insert(v.clone(), Int);
                self.formula(body, ctx);
                self.visible = saved;
                Bool
            }
        }
    }
}

/// The logic formula of a typed boolean expression.
///
/// Integer, set and vector variables become [`Term::Var`], boolean ones
/// [`Formula::BVar`], boolean equality becomes a biconditional, `\result`
/// and `\old(x)` become the variables [`RESULT`] and [`old_name`]`(x)`.
/// Calls and `read()` have no logical counterpart and must not occur.
pub fn annotation_formula(e: &Expr) -> Formula {
    use ExprKind::*;
    match &e.kind {
        Bool(true) => Formula::True,
        Bool(false) => Formula::False,
        Var(x) => Formula::BVar(x.clone()),
        Result => Formula::BVar(RESULT.into()),
        Old(x) => Formula::BVar(old_name(x)),
        Not(a) => Formula::not(annotation_formula(a)),
        Forall(v, body) => Formula::forall(v.clone(), annotation_formula(body)),
        Binary(op, a, b) => {
            let f = annotation_formula;
            let t = annotation_term;
            match op {
                BinOp::And => Formula::and(f(a), f(b)),
                BinOp::Or => Formula::or(f(a), f(b)),
                BinOp::Implies => Formula::imp(f(a), f(b)),
                BinOp::Iff => Formula::iff(f(a), f(b)),
                BinOp::Eq if a.ty() == Type::Bool => Formula::iff(f(a), f(b)),
                BinOp::Eq => Formula::eq(t(a), t(b)),
                BinOp::Lt => Formula::lt(t(a), t(b)),
                BinOp::Le => Formula::le(t(a), t(b)),
                BinOp::In => Formula::mem(t(a), t(b)),
                BinOp::Subset => Formula::Subset(t(a), t(b)),
                _ => unreachable!("non-boolean operator {op:?} in a formula"),
            }
        }
        _ => unreachable!("non-boolean expression in a formula"),
    }
}

/// The logic term of a typed non-boolean annotation expression.
pub fn annotation_term(e: &Expr) -> Term {
    use ExprKind::*;
    let t = annotation_term;
    match &e.kind {
        Int(n) => Term::Int(*n),
        Var(x) => Term::var(x.clone(), e.ty().sort()),
        Result => Term::var(RESULT, e.ty().sort()),
        Old(x) => Term::var(old_name(x), e.ty().sort()),
        Binary(op, a, b) => {
            let (a, b) = (t(a), t(b));
            match op {
                BinOp::Add => Term::add(a, b),
                BinOp::Sub => Term::sub(a, b),
                BinOp::Mul => Term::mul(a, b),
                BinOp::Div => Term::div(a, b),
                BinOp::Mod => Term::modulo(a, b),
                BinOp::Union => Term::union(a, b),
                BinOp::Inter => Term::inter(a, b),
                BinOp::Diff => Term::diff(a, b),
                _ => unreachable!("boolean operator {op:?} in a term"),
            }
        }
        SetLit(es) if es.is_empty() => Term::EmptySet,
        SetLit(es) => Term::SetLit(es.iter().map(t).collect()),
        Index(v, i) => Term::idx(t(v), t(i)),
        Len(v) => Term::len(t(v)),
        Card(s) => Term::card(t(s)),
        NewVec(n) => Term::newvec(t(n)),
        _ => unreachable!("expression without a logical term"),
    }
}
