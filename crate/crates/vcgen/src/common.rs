// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use lissom_logic::{substitute_many, Formula, Replacement, Sort, Term};
use lissom_vm::MAX_VEC_LEN;

use crate::obligation::{SafetyKind, Site};

/// A symbolic value: a term, or a formula for booleans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Sym {
    T(Term),
    F(Formula),
}

impl Sym {
    pub(crate) fn var(name: &str, sort: Sort) -> Sym {
        match sort {
            Sort::Bool => Sym::F(Formula::BVar(name.to_string())),
            s => Sym::T(Term::var(name, s)),
        }
    }

    pub(crate) fn into_replacement(self) -> Replacement {
        match self {
            Sym::T(t) => Replacement::Term(t),
            Sym::F(f) => Replacement::Formula(f),
        }
    }
}

/// Name of the value returned by the `k`-th call site of a function.
pub fn call_var(k: usize) -> String {
    format!("\\call{k}")
}

/// Name of the value produced by the `k`-th `read` of a function.
pub fn read_var(k: usize) -> String {
    format!("\\read{k}")
}

pub(crate) fn div_guard(d: &Term) -> (Formula, Site) {
    (
        Formula::not(Formula::eq(d.clone(), Term::Int(0))),
        Site::Safety(SafetyKind::DivByZero),
    )
}

pub(crate) fn index_guard(v: &Term, i: &Term) -> (Formula, Site) {
    (
        Formula::and(
            Formula::le(Term::Int(0), i.clone()),
            Formula::lt(i.clone(), Term::len(v.clone())),
        ),
        Site::Safety(SafetyKind::OutOfBounds),
    )
}

pub(crate) fn newvec_guard(n: &Term) -> (Formula, Site) {
    (
        Formula::and(
            Formula::le(Term::Int(0), n.clone()),
            Formula::le(n.clone(), Term::Int(MAX_VEC_LEN)),
        ),
        Site::Safety(SafetyKind::OutOfBounds),
    )
}

/// Equality at either sort; booleans compare by equivalence.
pub(crate) fn sym_eq(a: Sym, b: Sym) -> Option<Formula> {
    match (a, b) {
        (Sym::T(a), Sym::T(b)) => Some(Formula::eq(a, b)),
        (Sym::F(a), Sym::F(b)) => Some(Formula::iff(a, b)),
        _ => None,
    }
}

/// Inserts into a set value, extending a literal when there is one.
pub(crate) fn set_insert(s: Term, e: Term) -> Term {
    match s {
        Term::EmptySet => Term::SetLit(vec![e]),
        Term::SetLit(mut es) => {
            es.push(e);
            Term::SetLit(es)
        }
        s => Term::union(s, Term::SetLit(vec![e])),
    }
}

/// Callee specification at a call site: `requires` over the arguments,
/// and `ensures` over the arguments with the result named `result`.
pub(crate) fn instantiate_call(
    requires: &Formula,
    ensures: &Formula,
    params: &[(String, Option<String>)],
    args: Vec<Sym>,
    result: Option<(String, Sort)>,
) -> (Formula, Formula) {
    let mut map = BTreeMap::new();
    for ((p, ghost), a) in params.iter().zip(args) {
        let r = a.into_replacement();
        if let Some(g) = ghost {
            map.insert(g.clone(), r.clone());
        }
        map.insert(p.clone(), r);
    }
    let pre = substitute_many(requires, &map);
    if let Some((name, sort)) = result {
        map.insert(
            lissom_vm::RESULT.to_string(),
            Sym::var(&name, sort).into_replacement(),
        );
    }
    (pre, substitute_many(ensures, &map))
}
