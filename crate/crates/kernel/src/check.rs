// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Bidirectional certificate checking.
//!
//! Introduction rules and `lia` are checked against a known goal; every
//! other node infers the formula it proves, which is then compared with
//! the goal up to renaming of bound variables.

use std::fmt;

use lissom_logic::{eval_ground, substitute, Formula, GroundState, Sort, Term};

use crate::axioms;
use crate::cert::Certificate;
use crate::linear::{check_farkas, goal_constraints, premise_constraints};

/// Certificates deeper than this are rejected outright.
pub const MAX_DEPTH: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub reason: String,
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("at /")?;
        let p: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        f.write_str(&p.join("/"))?;
        write!(f, ": {}", self.reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Checks `cert` as a proof of `goal` from no hypotheses.
pub fn check_certificate(goal: &Formula, cert: &Certificate) -> Verdict {
    check_in_context(&[], goal, cert)
}

/// Checks `cert` as a proof of `goal` from `hyps`, which `(hyp i)` refers
/// to by position.
pub fn check_in_context(hyps: &[Formula], goal: &Formula, cert: &Certificate) -> Verdict {
    let mut c = Checker {
        ctx: hyps.to_vec(),
        path: Vec::new(),
    };
    let result = (|| {
        for h in hyps {
            c.well_sorted(h)?;
        }
        c.well_sorted(goal)?;
        if cert.depth() > MAX_DEPTH {
            return Err(c.reject(format!("certificate deeper than {MAX_DEPTH}")));
        }
        c.check(goal, cert)
    })();
    match result {
        Ok(()) => Verdict::Accept,
        Err(r) => Verdict::Reject(r),
    }
}

struct Checker {
    ctx: Vec<Formula>,
    path: Vec<usize>,
}

type Res<T> = Result<T, Rejection>;

fn node_name(c: &Certificate) -> &'static str {
    use Certificate::*;
    match c {
        Hyp(_) => "hyp",
        AndI(..) => "andI",
        AndE1(_) => "andE1",
        AndE2(_) => "andE2",
        OrI1(..) => "orI1",
        OrI2(..) => "orI2",
        OrE(..) => "orE",
        ImpI(..) => "impI",
        ImpE(..) => "impE",
        NotI(..) => "notI",
        Contra(_) => "contra",
        ForallI(..) => "forallI",
        ForallE(..) => "forallE",
        Refl(_) => "refl",
        Rewrite(..) => "rewrite",
        Eval(_) => "eval",
        Lia(..) => "lia",
        Axiom(..) => "axiom",
    }
}

impl Checker {
    fn reject(&self, reason: impl Into<String>) -> Rejection {
        Rejection {
            reason: reason.into(),
            path: self.path.clone(),
        }
    }

    fn well_sorted(&self, f: &Formula) -> Res<()> {
        f.check_sorts().map_err(|e| self.reject(e.to_string()))
    }

    fn child<T>(&mut self, i: usize, run: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        self.path.push(i);
        let r = run(self);
        self.path.pop();
        r
    }

    fn with_hyp<T>(&mut self, h: Formula, run: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        self.ctx.push(h);
        let r = run(self);
        self.ctx.pop();
        r
    }

    fn sub_check(&mut self, i: usize, goal: &Formula, c: &Certificate) -> Res<()> {
        self.child(i, |s| s.check(goal, c))
    }

    fn sub_infer(&mut self, i: usize, c: &Certificate) -> Res<Formula> {
        self.child(i, |s| s.infer(c))
    }

    fn mismatch(&self, expected: &Formula, found: &Formula) -> Rejection {
        self.reject(format!("proves `{found}` but `{expected}` is required"))
    }

    fn eigenvariable_ok(&self, x: &str, goal: &Formula) -> Res<()> {
        if goal.free_vars().contains_key(x) {
            return Err(self.reject(format!("eigenvariable `{x}` is free in the goal")));
        }
        if self.ctx.iter().any(|h| h.free_vars().contains_key(x)) {
            return Err(self.reject(format!("eigenvariable `{x}` is free in a hypothesis")));
        }
        Ok(())
    }

    fn check(&mut self, goal: &Formula, c: &Certificate) -> Res<()> {
        use Certificate::*;
        match (c, goal) {
            (ImpI(ant, body), Formula::Imp(a, b)) => {
                if !ant.alpha_eq(a) {
                    return Err(self.reject(format!("impI assumes `{ant}` but goal assumes `{a}`")));
                }
                let a = a.as_ref().clone();
                self.with_hyp(a, |s| s.sub_check(0, b, body))
            }
            (NotI(f, body), Formula::Not(a)) => {
                if !f.alpha_eq(a) {
                    return Err(self.reject(format!("notI assumes `{f}` but goal negates `{a}`")));
                }
                let a = a.as_ref().clone();
                self.with_hyp(a, |s| s.sub_check(0, &Formula::False, body))
            }
            (AndI(l, r), Formula::And(a, b)) => {
                self.sub_check(0, a, l)?;
                self.sub_check(1, b, r)
            }
            (OrI1(p, other), Formula::Or(a, b)) => {
                if !other.alpha_eq(b) {
                    return Err(self.mismatch(goal, &Formula::or((**a).clone(), other.clone())));
                }
                self.sub_check(0, a, p)
            }
            (OrI2(p, other), Formula::Or(a, b)) => {
                if !other.alpha_eq(a) {
                    return Err(self.mismatch(goal, &Formula::or(other.clone(), (**b).clone())));
                }
                self.sub_check(0, b, p)
            }
            (OrE(d, l, r), _) => {
                let (a, b) = match self.sub_infer(0, d)? {
                    Formula::Or(a, b) => (*a, *b),
                    other => return Err(self.reject(format!("orE needs a disjunction, got `{other}`"))),
                };
                self.with_hyp(a, |s| s.sub_check(1, goal, l))?;
                self.with_hyp(b, |s| s.sub_check(2, goal, r))
            }
            (ForallI(x, body), Formula::Forall(y, inner)) => {
                self.eigenvariable_ok(x, goal)?;
                let opened = substitute(inner, y, Term::int_var(x.clone()))
                    .map_err(|e| self.reject(e.to_string()))?;
                self.sub_check(0, &opened, body)
            }
            (Contra(p), _) => {
                let nn = Formula::not(Formula::not(goal.clone()));
                self.sub_check(0, &nn, p)
            }
            (Refl(t), Formula::Eq(a, b)) => {
                if a == t && b == t {
                    Ok(())
                } else {
                    Err(self.mismatch(goal, &Formula::Eq(t.clone(), t.clone())))
                }
            }
            (Lia(coeffs, premises), _) => {
                let Some(goals) = goal_constraints(goal) else {
                    return Err(self.reject(format!("lia cannot prove `{goal}`")));
                };
                let mut constraints = Vec::new();
                for (i, p) in premises.iter().enumerate() {
                    let f = self.sub_infer(i, p)?;
                    match premise_constraints(&f) {
                        Some(cs) => constraints.extend(cs),
                        None => {
                            return Err(self.reject(format!("premise {i} `{f}` is not linear")))
                        }
                    }
                }
                check_farkas(&constraints, &goals, coeffs).map_err(|e| self.reject(e.to_string()))
            }
            _ => {
                let found = self.infer(c)?;
                if found.alpha_eq(goal) {
                    Ok(())
                } else {
                    Err(self.mismatch(goal, &found))
                }
            }
        }
    }

    fn infer(&mut self, c: &Certificate) -> Res<Formula> {
        use Certificate::*;
        match c {
            Hyp(i) => self
                .ctx
                .get(*i)
                .cloned()
                .ok_or_else(|| self.reject(format!("no hypothesis {i} (context has {})", self.ctx.len()))),
            AndI(l, r) => {
                let a = self.sub_infer(0, l)?;
                let b = self.sub_infer(1, r)?;
                Ok(Formula::and(a, b))
            }
            AndE1(p) | AndE2(p) => match self.sub_infer(0, p)? {
                Formula::And(a, b) => Ok(if matches!(c, AndE1(_)) { *a } else { *b }),
                other => Err(self.reject(format!("{} needs a conjunction, got `{other}`", node_name(c)))),
            },
            OrI1(p, other) => {
                self.well_sorted(other)?;
                let a = self.sub_infer(0, p)?;
                Ok(Formula::or(a, other.clone()))
            }
            OrI2(p, other) => {
                self.well_sorted(other)?;
                let b = self.sub_infer(0, p)?;
                Ok(Formula::or(other.clone(), b))
            }
            OrE(d, l, r) => {
                let (a, b) = match self.sub_infer(0, d)? {
                    Formula::Or(a, b) => (*a, *b),
                    other => return Err(self.reject(format!("orE needs a disjunction, got `{other}`"))),
                };
                let fl = self.with_hyp(a, |s| s.sub_infer(1, l))?;
                let fr = self.with_hyp(b, |s| s.sub_infer(2, r))?;
                if fl.alpha_eq(&fr) {
                    Ok(fl)
                } else {
                    Err(self.reject(format!("orE branches prove `{fl}` and `{fr}`")))
                }
            }
            ImpI(ant, body) => {
                self.well_sorted(ant)?;
                let b = self.with_hyp(ant.clone(), |s| s.sub_infer(0, body))?;
                Ok(Formula::imp(ant.clone(), b))
            }
            NotI(f, body) => {
                self.well_sorted(f)?;
                self.with_hyp(f.clone(), |s| s.sub_check(0, &Formula::False, body))?;
                Ok(Formula::not(f.clone()))
            }
            ImpE(p, arg) => match self.sub_infer(0, p)? {
                Formula::Imp(a, b) => {
                    self.sub_check(1, &a, arg)?;
                    Ok(*b)
                }
                Formula::Not(a) => {
                    self.sub_check(1, &a, arg)?;
                    Ok(Formula::False)
                }
                other => Err(self.reject(format!("impE needs an implication, got `{other}`"))),
            },
            Contra(p) => match self.sub_infer(0, p)? {
                Formula::Not(inner) => match *inner {
                    Formula::Not(f) => Ok(*f),
                    other => Err(self.reject(format!("contra needs a double negation, got `(not {other})`"))),
                },
                other => Err(self.reject(format!("contra needs a double negation, got `{other}`"))),
            },
            ForallI(x, body) => {
                if self.ctx.iter().any(|h| h.free_vars().contains_key(x)) {
                    return Err(self.reject(format!("eigenvariable `{x}` is free in a hypothesis")));
                }
                let b = self.sub_infer(0, body)?;
                if let Some(s) = b.free_vars().get(x) {
                    if *s != Sort::Int {
                        return Err(self.reject(format!("eigenvariable `{x}` has sort {s}")));
                    }
                }
                Ok(Formula::forall(x.clone(), b))
            }
            ForallE(p, t) => {
                let sort = t.sort().map_err(|e| self.reject(e.to_string()))?;
                if sort != Sort::Int {
                    return Err(self.reject(format!("forallE needs an int term, got sort {sort}")));
                }
                match self.sub_infer(0, p)? {
                    Formula::Forall(y, body) => {
                        substitute(&body, &y, t.clone()).map_err(|e| self.reject(e.to_string()))
                    }
                    other => Err(self.reject(format!("forallE needs a quantifier, got `{other}`"))),
                }
            }
            Refl(t) => {
                t.sort().map_err(|e| self.reject(e.to_string()))?;
                Ok(Formula::Eq(t.clone(), t.clone()))
            }
            Rewrite(eq, target, positions) => {
                let (l, r) = match self.sub_infer(0, eq)? {
                    Formula::Eq(l, r) => (l, r),
                    other => return Err(self.reject(format!("rewrite needs an equation, got `{other}`"))),
                };
                let f = self.sub_infer(1, target)?;
                if positions.is_empty() || positions.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(self.reject("rewrite positions must be non-empty and increasing"));
                }
                let mut rw = Rewriter {
                    l: &l,
                    r: &r,
                    positions,
                    seen: 0,
                    done: 0,
                    bound: Vec::new(),
                    capture: None,
                };
                let out = rw.formula(&f);
                if let Some(v) = rw.capture {
                    return Err(self.reject(format!("rewrite would capture `{v}`")));
                }
                if rw.done != positions.len() {
                    return Err(self.reject(format!(
                        "rewrite position {} out of range: `{l}` occurs {} times",
                        positions[rw.done], rw.seen
                    )));
                }
                Ok(out)
            }
            Eval(f) => {
                self.well_sorted(f)?;
                if !f.free_vars().is_empty() || !f.is_quantifier_free() {
                    return Err(self.reject(format!("eval needs a ground quantifier-free formula, got `{f}`")));
                }
                match eval_ground(f, &GroundState::new()) {
                    Ok(true) => Ok(f.clone()),
                    Ok(false) => Err(self.reject(format!("`{f}` evaluates to false"))),
                    Err(e) => Err(self.reject(format!("`{f}` does not evaluate: {e}"))),
                }
            }
            Lia(..) => Err(self.reject("lia can only be checked against a goal")),
            Axiom(id, inst) => axioms::instantiate(id, inst).map_err(|e| self.reject(e)),
        }
    }
}

struct Rewriter<'a> {
    l: &'a Term,
    r: &'a Term,
    positions: &'a [usize],
    seen: usize,
    done: usize,
    bound: Vec<String>,
    capture: Option<String>,
}

impl Rewriter<'_> {
    fn term(&mut self, t: &Term) -> Term {
        if t == self.l {
            let here = self.seen;
            self.seen += 1;
            if self.positions.get(self.done) == Some(&here) {
                self.done += 1;
                if let Some(v) = self
                    .bound
                    .iter()
                    .find(|v| self.l.mentions(v) || self.r.mentions(v))
                {
                    self.capture.get_or_insert_with(|| v.clone());
                }
                return self.r.clone();
            }
            return t.clone();
        }
        t.map_children::<()>(&mut |c| Ok(self.term(c)))
            .expect("infallible")
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::True | Formula::False | Formula::BVar(_) => f.clone(),
            Formula::Eq(a, b) => Formula::Eq(self.term(a), self.term(b)),
            Formula::Lt(a, b) => Formula::Lt(self.term(a), self.term(b)),
            Formula::Le(a, b) => Formula::Le(self.term(a), self.term(b)),
            Formula::Mem(a, b) => Formula::Mem(self.term(a), self.term(b)),
            Formula::Subset(a, b) => Formula::Subset(self.term(a), self.term(b)),
            Formula::Not(g) => Formula::not(self.formula(g)),
            Formula::And(g, h) => {
                let g = self.formula(g);
                Formula::and(g, self.formula(h))
            }
            Formula::Or(g, h) => {
                let g = self.formula(g);
                Formula::or(g, self.formula(h))
            }
            Formula::Imp(g, h) => {
                let g = self.formula(g);
                Formula::imp(g, self.formula(h))
            }
            Formula::Forall(v, body) => {
                self.bound.push(v.clone());
                let body = self.formula(body);
                self.bound.pop();
                Formula::forall(v.clone(), body)
            }
        }
    }
}
