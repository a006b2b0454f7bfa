// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::LogicError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    Bool,
    Set,
    Vec,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Int => "int",
            Sort::Bool => "bool",
            Sort::Set => "set",
            Sort::Vec => "vec",
        })
    }
}

impl FromStr for Sort {
    type Err = LogicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "int" => Ok(Sort::Int),
            "bool" => Ok(Sort::Bool),
            "set" => Ok(Sort::Set),
            "vec" => Ok(Sort::Vec),
            other => Err(LogicError::UnknownSort(other.to_string())),
        }
    }
}

/// Integer, set and vector valued terms.
///
/// Boolean-sorted variables live at the formula level ([`Formula::BVar`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i64),
    Var(String, Sort),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    /// Euclidean division.
    Div(Box<Term>, Box<Term>),
    /// Euclidean remainder, always non-negative.
    Mod(Box<Term>, Box<Term>),
    Len(Box<Term>),
    Idx(Box<Term>, Box<Term>),
    /// Functional vector update `upd(v, i, e)`.
    Upd(Box<Term>, Box<Term>, Box<Term>),
    /// Zero-filled vector of the given length.
    NewVec(Box<Term>),
    Card(Box<Term>),
    Union(Box<Term>, Box<Term>),
    Inter(Box<Term>, Box<Term>),
    Diff(Box<Term>, Box<Term>),
    SetLit(Vec<Term>),
    EmptySet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Lt(Term, Term),
    Le(Term, Term),
    Mem(Term, Term),
    Subset(Term, Term),
    BVar(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// Universal quantification over an integer variable.
    Forall(String, Box<Formula>),
}

fn b<T>(t: T) -> Box<T> {
    Box::new(t)
}

#[allow(clippy::should_implement_trait)]
impl Term {
    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(name.into(), sort)
    }

    pub fn int_var(name: impl Into<String>) -> Term {
        Term::Var(name.into(), Sort::Int)
    }

    pub fn add(a: Term, c: Term) -> Term {
        Term::Add(b(a), b(c))
    }

    pub fn sub(a: Term, c: Term) -> Term {
        Term::Sub(b(a), b(c))
    }

    pub fn mul(a: Term, c: Term) -> Term {
        Term::Mul(b(a), b(c))
    }

    pub fn div(a: Term, c: Term) -> Term {
        Term::Div(b(a), b(c))
    }

    pub fn modulo(a: Term, c: Term) -> Term {
        Term::Mod(b(a), b(c))
    }

    pub fn len(v: Term) -> Term {
        Term::Len(b(v))
    }

    pub fn idx(v: Term, i: Term) -> Term {
        Term::Idx(b(v), b(i))
    }

    pub fn upd(v: Term, i: Term, e: Term) -> Term {
        Term::Upd(b(v), b(i), b(e))
    }

    pub fn newvec(n: Term) -> Term {
        Term::NewVec(b(n))
    }

    pub fn card(s: Term) -> Term {
        Term::Card(b(s))
    }

    pub fn union(a: Term, c: Term) -> Term {
        Term::Union(b(a), b(c))
    }

    pub fn inter(a: Term, c: Term) -> Term {
        Term::Inter(b(a), b(c))
    }

    pub fn diff(a: Term, c: Term) -> Term {
        Term::Diff(b(a), b(c))
    }

    /// Sort of a well-formed term, checking argument sorts on the way.
    pub fn sort(&self) -> Result<Sort, LogicError> {
        use Term::*;
        let expect = |t: &Term, s: Sort| -> Result<(), LogicError> {
            let got = t.sort()?;
            if got == s {
                Ok(())
            } else {
                Err(LogicError::SortMismatch {
                    expected: s,
                    found: got,
                    context: t.to_string(),
                })
            }
        };
        match self {
            Int(_) => Ok(Sort::Int),
            Var(_, s) => {
                if *s == Sort::Bool {
                    Err(LogicError::SortMismatch {
                        expected: Sort::Int,
                        found: Sort::Bool,
                        context: self.to_string(),
                    })
                } else {
                    Ok(*s)
                }
            }
            Add(x, y) | Sub(x, y) | Mul(x, y) | Div(x, y) | Mod(x, y) => {
                expect(x, Sort::Int)?;
                expect(y, Sort::Int)?;
                Ok(Sort::Int)
            }
            Len(v) => {
                expect(v, Sort::Vec)?;
                Ok(Sort::Int)
            }
            Idx(v, i) => {
                expect(v, Sort::Vec)?;
                expect(i, Sort::Int)?;
                Ok(Sort::Int)
            }
            Upd(v, i, e) => {
                expect(v, Sort::Vec)?;
                expect(i, Sort::Int)?;
                expect(e, Sort::Int)?;
                Ok(Sort::Vec)
            }
            NewVec(n) => {
                expect(n, Sort::Int)?;
                Ok(Sort::Vec)
            }
            Card(s) => {
                expect(s, Sort::Set)?;
                Ok(Sort::Int)
            }
            Union(x, y) | Inter(x, y) | Diff(x, y) => {
                expect(x, Sort::Set)?;
                expect(y, Sort::Set)?;
                Ok(Sort::Set)
            }
            SetLit(es) => {
                for e in es {
                    expect(e, Sort::Int)?;
                }
                Ok(Sort::Set)
            }
            EmptySet => Ok(Sort::Set),
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        use Term::*;
        match self {
            Int(_) | Var(..) | EmptySet => vec![],
            Add(x, y) | Sub(x, y) | Mul(x, y) | Div(x, y) | Mod(x, y) | Idx(x, y)
            | Union(x, y) | Inter(x, y) | Diff(x, y) => vec![x, y],
            Len(x) | NewVec(x) | Card(x) => vec![x],
            Upd(x, y, z) => vec![x, y, z],
            SetLit(es) => es.iter().collect(),
        }
    }

    /// Rebuilds the node with each child passed through `f`.
    pub fn map_children<E>(
        &self,
        f: &mut impl FnMut(&Term) -> Result<Term, E>,
    ) -> Result<Term, E> {
        use Term::*;
        Ok(match self {
            Int(_) | Var(..) | EmptySet => self.clone(),
            Add(x, y) => Add(b(f(x)?), b(f(y)?)),
            Sub(x, y) => Sub(b(f(x)?), b(f(y)?)),
            Mul(x, y) => Mul(b(f(x)?), b(f(y)?)),
            Div(x, y) => Div(b(f(x)?), b(f(y)?)),
            Mod(x, y) => Mod(b(f(x)?), b(f(y)?)),
            Idx(x, y) => Idx(b(f(x)?), b(f(y)?)),
            Union(x, y) => Union(b(f(x)?), b(f(y)?)),
            Inter(x, y) => Inter(b(f(x)?), b(f(y)?)),
            Diff(x, y) => Diff(b(f(x)?), b(f(y)?)),
            Len(x) => Len(b(f(x)?)),
            NewVec(x) => NewVec(b(f(x)?)),
            Card(x) => Card(b(f(x)?)),
            Upd(x, y, z) => Upd(b(f(x)?), b(f(y)?), b(f(z)?)),
            SetLit(es) => SetLit(es.iter().map(&mut *f).collect::<Result<_, _>>()?),
        })
    }

    pub fn free_vars_into(&self, out: &mut BTreeMap<String, Sort>) {
        if let Term::Var(n, s) = self {
            out.insert(n.clone(), *s);
        }
        for c in self.children() {
            c.free_vars_into(out);
        }
    }

    pub fn free_vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        self.free_vars_into(&mut out);
        out
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Var(n, _) => n == name,
            _ => self.children().into_iter().any(|c| c.mentions(name)),
        }
    }

    /// Visits every subterm in preorder.
    pub fn for_each_subterm<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        for c in self.children() {
            c.for_each_subterm(f);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn eq(a: Term, c: Term) -> Formula {
        Formula::Eq(a, c)
    }

    pub fn lt(a: Term, c: Term) -> Formula {
        Formula::Lt(a, c)
    }

    pub fn le(a: Term, c: Term) -> Formula {
        Formula::Le(a, c)
    }

    pub fn mem(a: Term, c: Term) -> Formula {
        Formula::Mem(a, c)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(b(f))
    }

    pub fn and(f: Formula, g: Formula) -> Formula {
        Formula::And(b(f), b(g))
    }

    pub fn or(f: Formula, g: Formula) -> Formula {
        Formula::Or(b(f), b(g))
    }

    pub fn imp(f: Formula, g: Formula) -> Formula {
        Formula::Imp(b(f), b(g))
    }

    /// `(f → g) ∧ (g → f)`; there is no primitive biconditional.
    pub fn iff(f: Formula, g: Formula) -> Formula {
        Formula::and(Formula::imp(f.clone(), g.clone()), Formula::imp(g, f))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(var.into(), b(body))
    }

    /// Right-nested conjunction; `True` when empty.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut fs: Vec<Formula> = fs.into_iter().collect();
        let Some(mut acc) = fs.pop() else {
            return Formula::True;
        };
        while let Some(f) = fs.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Right-nested disjunction; `False` when empty.
    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut fs: Vec<Formula> = fs.into_iter().collect();
        let Some(mut acc) = fs.pop() else {
            return Formula::False;
        };
        while let Some(f) = fs.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }

    /// `h₁ → (h₂ → … → goal)`.
    pub fn imp_chain(hyps: impl IntoIterator<Item = Formula>, goal: Formula) -> Formula {
        let hyps: Vec<Formula> = hyps.into_iter().collect();
        hyps.into_iter()
            .rev()
            .fold(goal, |acc, h| Formula::imp(h, acc))
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::Eq(..)
                | Formula::Lt(..)
                | Formula::Le(..)
                | Formula::Mem(..)
                | Formula::Subset(..)
                | Formula::BVar(_)
        )
    }

    pub fn atom_terms(&self) -> Option<(&Term, &Term)> {
        match self {
            Formula::Eq(x, y)
            | Formula::Lt(x, y)
            | Formula::Le(x, y)
            | Formula::Mem(x, y)
            | Formula::Subset(x, y) => Some((x, y)),
            _ => None,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Forall(..) => false,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Imp(f, g) => {
                f.is_quantifier_free() && g.is_quantifier_free()
            }
            _ => true,
        }
    }

    /// Free variables with their sorts (boolean variables included).
    pub fn free_vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        self.free_vars_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_vars_into(&self, bound: &mut Vec<String>, out: &mut BTreeMap<String, Sort>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::BVar(n) => {
                out.insert(n.clone(), Sort::Bool);
            }
            Formula::Not(f) => f.free_vars_into(bound, out),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Imp(f, g) => {
                f.free_vars_into(bound, out);
                g.free_vars_into(bound, out);
            }
            Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.free_vars_into(bound, out);
                bound.pop();
            }
            _ => {
                let (x, y) = self.atom_terms().expect("atom");
                let mut tv = BTreeMap::new();
                x.free_vars_into(&mut tv);
                y.free_vars_into(&mut tv);
                for (n, s) in tv {
                    if !(s == Sort::Int && bound.contains(&n)) {
                        out.insert(n, s);
                    }
                }
            }
        }
    }

    /// Free variables in order of first occurrence (preorder, left to right).
    pub fn free_vars_ordered(&self) -> Vec<(String, Sort)> {
        fn term_walk(t: &Term, bound: &[String], out: &mut Vec<(String, Sort)>) {
            if let Term::Var(n, s) = t {
                let is_bound = *s == Sort::Int && bound.iter().any(|v| v == n);
                if !is_bound && !out.iter().any(|(m, _)| m == n) {
                    out.push((n.clone(), *s));
                }
            }
            for c in t.children() {
                term_walk(c, bound, out);
            }
        }
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<(String, Sort)>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::BVar(n) => {
                    if !out.iter().any(|(m, _)| m == n) {
                        out.push((n.clone(), Sort::Bool));
                    }
                }
                Formula::Not(g) => walk(g, bound, out),
                Formula::And(g, h) | Formula::Or(g, h) | Formula::Imp(g, h) => {
                    walk(g, bound, out);
                    walk(h, bound, out);
                }
                Formula::Forall(v, body) => {
                    bound.push(v.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
                _ => {
                    let (x, y) = f.atom_terms().expect("atom");
                    term_walk(x, bound, out);
                    term_walk(y, bound, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every name occurring anywhere, bound or free.
    pub fn all_names(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::BVar(n) => {
                out.insert(n.clone());
            }
            Formula::Not(f) => f.all_names(out),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Imp(f, g) => {
                f.all_names(out);
                g.all_names(out);
            }
            Formula::Forall(v, body) => {
                out.insert(v.clone());
                body.all_names(out);
            }
            _ => {
                let (x, y) = self.atom_terms().expect("atom");
                let mut m = BTreeMap::new();
                x.free_vars_into(&mut m);
                y.free_vars_into(&mut m);
                out.extend(m.into_keys());
            }
        }
    }

    /// Checks sort-correctness of every atom; quantified variables must be
    /// used at sort `Int`.
    pub fn check_sorts(&self) -> Result<(), LogicError> {
        let mismatch = |expected, found, ctx: &dyn fmt::Display| LogicError::SortMismatch {
            expected,
            found,
            context: ctx.to_string(),
        };
        match self {
            Formula::True | Formula::False | Formula::BVar(_) => Ok(()),
            Formula::Not(f) => f.check_sorts(),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Imp(f, g) => {
                f.check_sorts()?;
                g.check_sorts()
            }
            Formula::Forall(v, body) => {
                if let Some(s) = body.free_vars().get(v) {
                    if *s != Sort::Int {
                        return Err(mismatch(Sort::Int, *s, self));
                    }
                }
                body.check_sorts()
            }
            Formula::Eq(x, y) => {
                let (sx, sy) = (x.sort()?, y.sort()?);
                if sx != sy {
                    return Err(mismatch(sx, sy, self));
                }
                Ok(())
            }
            Formula::Lt(x, y) | Formula::Le(x, y) => {
                for t in [x, y] {
                    let s = t.sort()?;
                    if s != Sort::Int {
                        return Err(mismatch(Sort::Int, s, self));
                    }
                }
                Ok(())
            }
            Formula::Mem(x, y) => {
                let (sx, sy) = (x.sort()?, y.sort()?);
                if sx != Sort::Int {
                    return Err(mismatch(Sort::Int, sx, self));
                }
                if sy != Sort::Set {
                    return Err(mismatch(Sort::Set, sy, self));
                }
                Ok(())
            }
            Formula::Subset(x, y) => {
                for t in [x, y] {
                    let s = t.sort()?;
                    if s != Sort::Set {
                        return Err(mismatch(Sort::Set, s, self));
                    }
                }
                Ok(())
            }
        }
    }

    /// Structural equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_formula(self, other, &mut Vec::new(), &mut Vec::new())
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::BVar(_) => 1,
            Formula::Not(f) | Formula::Forall(_, f) => 1 + f.size(),
            Formula::And(f, g) | Formula::Or(f, g) | Formula::Imp(f, g) => 1 + f.size() + g.size(),
            _ => {
                let (x, y) = self.atom_terms().expect("atom");
                1 + x.size() + y.size()
            }
        }
    }

    /// Visits every term occurring at atom level (not descending into terms).
    pub fn for_each_atom_term<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Formula::True | Formula::False | Formula::BVar(_) => {}
            Formula::Not(g) | Formula::Forall(_, g) => g.for_each_atom_term(f),
            Formula::And(g, h) | Formula::Or(g, h) | Formula::Imp(g, h) => {
                g.for_each_atom_term(f);
                h.for_each_atom_term(f);
            }
            _ => {
                let (x, y) = self.atom_terms().expect("atom");
                f(x);
                f(y);
            }
        }
    }

    /// Splits `h₁ → (h₂ → … → g)` into its hypotheses and final goal.
    pub fn split_imp_chain(&self) -> (Vec<&Formula>, &Formula) {
        let mut hyps = Vec::new();
        let mut cur = self;
        while let Formula::Imp(h, g) = cur {
            hyps.push(h.as_ref());
            cur = g;
        }
        (hyps, cur)
    }
}

fn lookup(stack: &[String], name: &str) -> Option<usize> {
    stack.iter().rposition(|v| v == name)
}

fn alpha_term(a: &Term, c: &Term, sa: &[String], sc: &[String]) -> bool {
    match (a, c) {
        (Term::Var(x, s1), Term::Var(y, s2)) => {
            let bx = if *s1 == Sort::Int { lookup(sa, x) } else { None };
            let by = if *s2 == Sort::Int { lookup(sc, y) } else { None };
            match (bx, by) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y && s1 == s2,
                _ => false,
            }
        }
        (Term::Int(x), Term::Int(y)) => x == y,
        (Term::EmptySet, Term::EmptySet) => true,
        (Term::SetLit(xs), Term::SetLit(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_term(x, y, sa, sc))
        }
        _ => {
            std::mem::discriminant(a) == std::mem::discriminant(c) && {
                let (ca, cc) = (a.children(), c.children());
                ca.len() == cc.len() && ca.iter().zip(cc).all(|(x, y)| alpha_term(x, y, sa, sc))
            }
        }
    }
}

fn alpha_formula(a: &Formula, c: &Formula, sa: &mut Vec<String>, sc: &mut Vec<String>) -> bool {
    use Formula::*;
    match (a, c) {
        (True, True) | (False, False) => true,
        (BVar(x), BVar(y)) => x == y,
        (Not(x), Not(y)) => alpha_formula(x, y, sa, sc),
        (And(x1, y1), And(x2, y2)) | (Or(x1, y1), Or(x2, y2)) | (Imp(x1, y1), Imp(x2, y2)) => {
            std::mem::discriminant(a) == std::mem::discriminant(c)
                && alpha_formula(x1, x2, sa, sc)
                && alpha_formula(y1, y2, sa, sc)
        }
        (Forall(v1, b1), Forall(v2, b2)) => {
            sa.push(v1.clone());
            sc.push(v2.clone());
            let r = alpha_formula(b1, b2, sa, sc);
            sa.pop();
            sc.pop();
            r
        }
        _ => match (a.atom_terms(), c.atom_terms()) {
            (Some((x1, y1)), Some((x2, y2))) => {
                std::mem::discriminant(a) == std::mem::discriminant(c)
                    && alpha_term(x1, x2, sa, sc)
                    && alpha_term(y1, y2, sa, sc)
            }
            _ => false,
        },
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::term_canonical_text(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::canonical_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::int_var("x")
    }

    #[test]
    fn sorts_are_checked() {
        let v = Term::var("v", Sort::Vec);
        assert_eq!(Term::idx(v.clone(), x()).sort().unwrap(), Sort::Int);
        assert!(Term::idx(x(), v).sort().is_err());
        assert!(Formula::mem(x(), Term::EmptySet).check_sorts().is_ok());
        assert!(Formula::mem(Term::EmptySet, x()).check_sorts().is_err());
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let f = Formula::forall("i", Formula::eq(Term::int_var("i"), Term::int_var("i")));
        let g = Formula::forall("j", Formula::eq(Term::int_var("j"), Term::int_var("j")));
        let h = Formula::forall("j", Formula::eq(Term::int_var("j"), Term::int_var("i")));
        assert!(f.alpha_eq(&g));
        assert!(!f.alpha_eq(&h));
    }

    #[test]
    fn free_vars_skip_bound_ints() {
        let f = Formula::forall(
            "i",
            Formula::le(Term::int_var("i"), Term::len(Term::var("v", Sort::Vec))),
        );
        let fv = f.free_vars();
        assert_eq!(fv.len(), 1);
        assert_eq!(fv["v"], Sort::Vec);
    }

    #[test]
    fn imp_chain_round_trips() {
        let hs = vec![Formula::True, Formula::BVar("b".into())];
        let f = Formula::imp_chain(hs.clone(), Formula::False);
        let (got, goal) = f.split_imp_chain();
        assert_eq!(got.len(), 2);
        assert_eq!(*goal, Formula::False);
    }
}
