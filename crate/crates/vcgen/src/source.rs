// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Backward weakest preconditions over typed LISS.
//!
//! A precondition is kept as a list of goals rather than one conjunction,
//! so that every goal keeps its own provenance. Loops produce closed
//! obligations of their own and contribute only the invariant upwards.

use std::collections::HashMap;

use lissom_lang::{
    annotation_formula, old_name, BinOp, Expr, ExprKind, Pos, Stmt, StmtKind, TypedFunction,
    TypedProgram, RESULT,
};
use lissom_logic::{substitute, Formula, Replacement, Term};

use crate::common::{
    call_var, div_guard, index_guard, instantiate_call, newvec_guard, read_var, set_insert,
    sym_eq, Sym,
};
use crate::error::VcError;
use crate::obligation::{Level, Location, Obligation, Provenance, Site};

/// A step of evaluation seen by the logic: a checked fact becomes an
/// obligation and is assumed afterwards, an assumed one is only assumed.
#[derive(Clone, Debug)]
enum Effect<L> {
    Check(Formula, Site, L),
    Assume(Formula),
}

/// A formula still to be discharged, stated over the program state at
/// the current point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub formula: Formula,
    pub site: Site,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default)]
pub struct Wp {
    pub goals: Vec<Goal>,
    /// Obligations of loops inside the statements, already independent of
    /// the surrounding code.
    pub closed: Vec<Obligation>,
}

impl Wp {
    /// The precondition as a single formula.
    pub fn pre(&self) -> Formula {
        Formula::and_all(self.goals.iter().map(|g| g.formula.clone()))
    }
}

/// Verification conditions of every function, in source names.
pub fn source_obligations(p: &TypedProgram) -> Result<Vec<Obligation>, VcError> {
    let mut out = Vec::new();
    for f in &p.functions {
        out.extend(function_obligations(p, f)?);
    }
    Ok(out)
}

pub fn function_obligations(p: &TypedProgram, f: &TypedFunction) -> Result<Vec<Obligation>, VcError> {
    let post = Goal {
        formula: f.ensures.clone(),
        site: Site::Postcondition,
        pos: f.decl.pos,
    };
    let wp = wp_source(p, f, &f.decl.body, vec![post])?;
    let mut hyps = vec![f.requires.clone()];
    for x in &f.olds {
        let sort = f.vars[x].sort();
        hyps.push(sym_eq(Sym::var(&old_name(x), sort), Sym::var(x, sort)).expect("same sort"));
    }
    let mut out: Vec<Obligation> = wp
        .goals
        .into_iter()
        .map(|g| obligation(f.name(), Formula::imp_chain(hyps.clone(), g.formula), g.site, g.pos))
        .collect();
    out.extend(wp.closed);
    Ok(out)
}

/// Weakest precondition of `stmts`, inside `f`, for the goals `post`.
///
/// A `return` discards `post` and targets the postcondition of `f`.
pub fn wp_source(
    p: &TypedProgram,
    f: &TypedFunction,
    stmts: &[Stmt],
    post: Vec<Goal>,
) -> Result<Wp, VcError> {
    let mut g = Gen { p, f, ord: HashMap::new(), closed: Vec::new() };
    let (mut calls, mut reads) = (0, 0);
    for s in stmts {
        number_stmt(s, &mut g.ord, &mut calls, &mut reads);
    }
    let goals = g.block(stmts, post)?;
    Ok(Wp { goals, closed: g.closed })
}

fn obligation(function: &str, formula: Formula, site: Site, pos: Pos) -> Obligation {
    Obligation::new(
        formula,
        Provenance {
            level: Level::Source,
            function: function.to_string(),
            site,
            location: Location::Source { line: pos.line as usize, col: pos.col as usize },
        },
    )
}

fn key<T>(x: &T) -> usize {
    x as *const T as usize
}

fn number_expr(e: &Expr, ord: &mut HashMap<usize, usize>, calls: &mut usize, reads: &mut usize) {
    for c in e.children() {
        number_expr(c, ord, calls, reads);
    }
    let counter = match e.kind {
        ExprKind::Call(..) => calls,
        ExprKind::Read => reads,
        _ => return,
    };
    ord.insert(key(e), *counter);
    *counter += 1;
}

fn number_stmt(s: &Stmt, ord: &mut HashMap<usize, usize>, calls: &mut usize, reads: &mut usize) {
    let mut ex = |e: &Expr, ord: &mut HashMap<usize, usize>| number_expr(e, ord, calls, reads);
    match &s.kind {
        StmtKind::VarDecl(_, _, e) | StmtKind::Assign(_, e) | StmtKind::Print(e) | StmtKind::Return(Some(e)) => ex(e, ord),
        StmtKind::VecStore(_, i, e) => {
            ex(i, ord);
            ex(e, ord);
        }
        StmtKind::Call(_, args) => {
            for a in args {
                ex(a, ord);
            }
            ord.insert(key(s), *calls);
            *calls += 1;
        }
        StmtKind::If(c, a, b) => {
            ex(c, ord);
            for s in a.iter().chain(b) {
                number_stmt(s, ord, calls, reads);
            }
        }
        StmtKind::While(c, _, body) => {
            ex(c, ord);
            for s in body {
                number_stmt(s, ord, calls, reads);
            }
        }
        StmtKind::Assert(_) | StmtKind::Return(None) => {}
    }
}

fn assume(h: &Formula, goals: Vec<Goal>) -> Vec<Goal> {
    goals
        .into_iter()
        .map(|g| Goal { formula: Formula::imp(h.clone(), g.formula), ..g })
        .collect()
}

fn assign(x: &str, v: Sym, goals: Vec<Goal>) -> Vec<Goal> {
    let r: Replacement = v.into_replacement();
    goals
        .into_iter()
        .map(|g| Goal {
            formula: substitute(&g.formula, x, r.clone()).expect("sort-correct assignment"),
            ..g
        })
        .collect()
}

fn apply(effects: Vec<Effect<Pos>>, mut goals: Vec<Goal>) -> Vec<Goal> {
    for e in effects.into_iter().rev() {
        goals = match e {
            Effect::Check(f, site, pos) => {
                let mut out = vec![Goal { formula: f.clone(), site, pos }];
                out.extend(assume(&f, goals));
                out
            }
            Effect::Assume(f) => assume(&f, goals),
        };
    }
    goals
}

struct Gen<'a> {
    p: &'a TypedProgram,
    f: &'a TypedFunction,
    ord: HashMap<usize, usize>,
    closed: Vec<Obligation>,
}

impl Gen<'_> {
    fn err(&self, message: String) -> VcError {
        VcError::Source { function: self.f.name().to_string(), message }
    }

    fn term(&self, v: Sym) -> Result<Term, VcError> {
        match v {
            Sym::T(t) => Ok(t),
            Sym::F(_) => Err(self.err("boolean where a value was expected".into())),
        }
    }

    fn formula(&self, v: Sym) -> Result<Formula, VcError> {
        match v {
            Sym::F(f) => Ok(f),
            Sym::T(_) => Err(self.err("value where a boolean was expected".into())),
        }
    }

    fn call(&self, name: &str, args: &[Expr], k: usize, pos: Pos, eff: &mut Vec<Effect<Pos>>) -> Result<Option<Sym>, VcError> {
        let callee = self
            .p
            .function(name)
            .ok_or_else(|| self.err(format!("call to undefined `{name}`")))?;
        let mut vals = Vec::new();
        for a in args {
            vals.push(self.expr(a, eff)?);
        }
        let params: Vec<(String, Option<String>)> = callee
            .decl
            .params
            .iter()
            .map(|p| (p.name.clone(), callee.olds.contains(&p.name).then(|| old_name(&p.name))))
            .collect();
        let result = callee.decl.ret.map(|t| (call_var(k), t.sort()));
        let (pre, post) = instantiate_call(&callee.requires, &callee.ensures, &params, vals, result.clone());
        eff.push(Effect::Check(pre, Site::Precondition, pos));
        eff.push(Effect::Assume(post));
        Ok(result.map(|(n, s)| Sym::var(&n, s)))
    }

    fn expr(&self, e: &Expr, eff: &mut Vec<Effect<Pos>>) -> Result<Sym, VcError> {
        use ExprKind::*;
        Ok(match &e.kind {
            Int(n) => Sym::T(Term::Int(*n)),
            Bool(b) => Sym::F(if *b { Formula::True } else { Formula::False }),
            Var(x) => Sym::var(x, e.ty().sort()),
            Not(a) => Sym::F(Formula::not(self.formula(self.expr(a, eff)?)?)),
            Binary(op, a, b) => {
                let a = self.expr(a, eff)?;
                let b = self.expr(b, eff)?;
                match op {
                    BinOp::And => Sym::F(Formula::and(self.formula(a)?, self.formula(b)?)),
                    BinOp::Or => Sym::F(Formula::or(self.formula(a)?, self.formula(b)?)),
                    BinOp::Eq => Sym::F(sym_eq(a, b).ok_or_else(|| self.err("ill-sorted equality".into()))?),
                    _ => {
                        let (a, b) = (self.term(a)?, self.term(b)?);
                        match op {
                            BinOp::Add => Sym::T(Term::add(a, b)),
                            BinOp::Sub => Sym::T(Term::sub(a, b)),
                            BinOp::Mul => Sym::T(Term::mul(a, b)),
                            BinOp::Div | BinOp::Mod => {
                                let (g, site) = div_guard(&b);
                                eff.push(Effect::Check(g, site, e.pos));
                                Sym::T(if *op == BinOp::Div { Term::div(a, b) } else { Term::modulo(a, b) })
                            }
                            BinOp::Lt => Sym::F(Formula::lt(a, b)),
                            BinOp::Le => Sym::F(Formula::le(a, b)),
                            BinOp::In => Sym::F(Formula::mem(a, b)),
                            BinOp::Union => Sym::T(Term::union(a, b)),
                            BinOp::Inter => Sym::T(Term::inter(a, b)),
                            BinOp::Diff => Sym::T(Term::diff(a, b)),
                            _ => return Err(self.err(format!("`{}` in executable code", op.symbol()))),
                        }
                    }
                }
            }
            SetLit(es) => {
                let mut s = Term::EmptySet;
                for x in es {
                    let v = self.expr(x, eff)?;
                    s = set_insert(s, self.term(v)?);
                }
                Sym::T(s)
            }
            Index(v, i) => {
                let v = self.expr(v, eff)?;
                let i = self.expr(i, eff)?;
                let (v, i) = (self.term(v)?, self.term(i)?);
                let (g, site) = index_guard(&v, &i);
                eff.push(Effect::Check(g, site, e.pos));
                Sym::T(Term::idx(v, i))
            }
            Len(v) => Sym::T(Term::len(self.term(self.expr(v, eff)?)?)),
            Card(s) => Sym::T(Term::card(self.term(self.expr(s, eff)?)?)),
            NewVec(n) => {
                let n = self.term(self.expr(n, eff)?)?;
                let (g, site) = newvec_guard(&n);
                eff.push(Effect::Check(g, site, e.pos));
                Sym::T(Term::newvec(n))
            }
            Read => Sym::T(Term::int_var(read_var(self.ord[&key(e)]))),
            Call(name, args) => self
                .call(name, args, self.ord[&key(e)], e.pos, eff)?
                .ok_or_else(|| self.err(format!("`{name}` returns nothing")))?,
            Result | Old(_) | Forall(..) => {
                return Err(self.err("annotation-only expression in executable code".into()))
            }
        })
    }

    fn block(&mut self, stmts: &[Stmt], mut q: Vec<Goal>) -> Result<Vec<Goal>, VcError> {
        for s in stmts.iter().rev() {
            q = self.stmt(s, q)?;
        }
        Ok(q)
    }

    fn stmt(&mut self, s: &Stmt, q: Vec<Goal>) -> Result<Vec<Goal>, VcError> {
        let mut eff = Vec::new();
        Ok(match &s.kind {
            StmtKind::VarDecl(x, _, e) | StmtKind::Assign(x, e) => {
                let v = self.expr(e, &mut eff)?;
                apply(eff, assign(x, v, q))
            }
            StmtKind::VecStore(x, i, e) => {
                let vec = Term::var(x.clone(), lissom_logic::Sort::Vec);
                let i = self.expr(i, &mut eff)?;
                let e = self.expr(e, &mut eff)?;
                let (i, e) = (self.term(i)?, self.term(e)?);
                let (g, site) = index_guard(&vec, &i);
                eff.push(Effect::Check(g, site, s.pos));
                apply(eff, assign(x, Sym::T(Term::upd(vec, i, e)), q))
            }
            StmtKind::Print(e) => {
                self.expr(e, &mut eff)?;
                apply(eff, q)
            }
            StmtKind::Call(name, args) => {
                self.call(name, args, self.ord[&key(s)], s.pos, &mut eff)?;
                apply(eff, q)
            }
            StmtKind::Assert(e) => {
                let a = annotation_formula(e);
                let mut out = vec![Goal { formula: a.clone(), site: Site::Assert, pos: s.pos }];
                out.extend(assume(&a, q));
                out
            }
            StmtKind::Return(None) => vec![self.post(None, s.pos)],
            StmtKind::Return(Some(e)) => {
                let v = self.expr(e, &mut eff)?;
                apply(eff, vec![self.post(Some(v), s.pos)])
            }
            StmtKind::If(c, a, b) => {
                let c = self.expr(c, &mut eff)?;
                let c = self.formula(c)?;
                let mut goals = assume(&c, self.block(a, q.clone())?);
                goals.extend(assume(&Formula::not(c), self.block(b, q)?));
                apply(eff, goals)
            }
            StmtKind::While(c, inv, body) => {
                let inv = annotation_formula(inv);
                let keep = Goal { formula: inv.clone(), site: Site::Preservation, pos: s.pos };
                let inside = self.block(body, vec![keep])?;
                let c = self.expr(c, &mut eff)?;
                let c = self.formula(c)?;
                let mut seg = assume(&c, inside);
                seg.extend(assume(&Formula::not(c), q));
                for g in apply(eff, seg) {
                    let f = Formula::imp(inv.clone(), g.formula);
                    self.closed.push(obligation(self.f.name(), f, g.site, g.pos));
                }
                vec![Goal { formula: inv, site: Site::Establishment, pos: s.pos }]
            }
        })
    }

    fn post(&self, result: Option<Sym>, pos: Pos) -> Goal {
        let mut formula = self.f.ensures.clone();
        if let Some(v) = result {
            formula = substitute(&formula, RESULT, v.into_replacement()).expect("sort-correct result");
        }
        Goal { formula, site: Site::Postcondition, pos }
    }
}
