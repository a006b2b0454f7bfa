// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};

use crate::error::LogicError;
use crate::formula::{Formula, Sort, Term};

/// What a variable is replaced by: a term for int/set/vec variables, a
/// formula for boolean ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Replacement {
    Term(Term),
    Formula(Formula),
}

impl Replacement {
    pub fn sort(&self) -> Result<Sort, LogicError> {
        match self {
            Replacement::Term(t) => t.sort(),
            Replacement::Formula(_) => Ok(Sort::Bool),
        }
    }

    fn free_vars(&self) -> BTreeMap<String, Sort> {
        match self {
            Replacement::Term(t) => t.free_vars(),
            Replacement::Formula(f) => f.free_vars(),
        }
    }
}

impl From<Term> for Replacement {
    fn from(t: Term) -> Self {
        Replacement::Term(t)
    }
}

impl From<Formula> for Replacement {
    fn from(f: Formula) -> Self {
        Replacement::Formula(f)
    }
}

/// Capture-avoiding substitution of a single free variable.
pub fn substitute(
    f: &Formula,
    var: &str,
    with: impl Into<Replacement>,
) -> Result<Formula, LogicError> {
    let with = with.into();
    if let Some(s) = f.free_vars().get(var) {
        let got = with.sort()?;
        if got != *s {
            return Err(LogicError::SortMismatch {
                expected: *s,
                found: got,
                context: var.to_string(),
            });
        }
    }
    let mut map = BTreeMap::new();
    map.insert(var.to_string(), with);
    Ok(substitute_many(f, &map))
}

/// Simultaneous capture-avoiding substitution. Sorts are not re-checked;
/// entries whose sort does not fit the occurrence are ignored.
pub fn substitute_many(f: &Formula, map: &BTreeMap<String, Replacement>) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    subst_formula(f, map)
}

pub(crate) fn subst_term(t: &Term, map: &BTreeMap<String, Replacement>) -> Term {
    match t {
        Term::Var(n, _) => match map.get(n) {
            Some(Replacement::Term(r)) => r.clone(),
            _ => t.clone(),
        },
        _ => t
            .map_children(&mut |c| Ok::<_, ()>(subst_term(c, map)))
            .expect("infallible"),
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "k" } else { stem };
    (1..)
        .map(|k| format!("{stem}{k}"))
        .find(|n| !avoid.contains(n) && !crate::is_reserved_binder_name(n))
        .expect("unbounded")
}

fn subst_formula(f: &Formula, map: &BTreeMap<String, Replacement>) -> Formula {
    use Formula::*;
    match f {
        True | False => f.clone(),
        BVar(n) => match map.get(n) {
            Some(Replacement::Formula(g)) => g.clone(),
            _ => f.clone(),
        },
        Not(g) => Formula::not(subst_formula(g, map)),
        And(g, h) => Formula::and(subst_formula(g, map), subst_formula(h, map)),
        Or(g, h) => Formula::or(subst_formula(g, map), subst_formula(h, map)),
        Imp(g, h) => Formula::imp(subst_formula(g, map), subst_formula(h, map)),
        Eq(x, y) => Eq(subst_term(x, map), subst_term(y, map)),
        Lt(x, y) => Lt(subst_term(x, map), subst_term(y, map)),
        Le(x, y) => Le(subst_term(x, map), subst_term(y, map)),
        Mem(x, y) => Mem(subst_term(x, map), subst_term(y, map)),
        Subset(x, y) => Subset(subst_term(x, map), subst_term(y, map)),
        Forall(v, body) => {
            let body_fv = body.free_vars();
            let inner: BTreeMap<String, Replacement> = map
                .iter()
                .filter(|(k, _)| *k != v && body_fv.contains_key(*k))
                .map(|(k, r)| (k.clone(), r.clone()))
                .collect();
            if inner.is_empty() {
                return f.clone();
            }
            let captures = inner.values().any(|r| r.free_vars().contains_key(v));
            if !captures {
                return Formula::forall(v.clone(), subst_formula(body, &inner));
            }
            let mut avoid = BTreeSet::new();
            body.all_names(&mut avoid);
            for r in inner.values() {
                avoid.extend(r.free_vars().into_keys());
            }
            avoid.extend(inner.keys().cloned());
            let fresh = fresh_name(v, &avoid);
            let mut all = inner;
            all.insert(v.clone(), Replacement::Term(Term::int_var(fresh.clone())));
            Formula::forall(fresh, subst_formula(body, &all))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::int_var("x")
    }

    #[test]
    fn replaces_free_occurrences() {
        let f = Formula::le(x(), Term::Int(5));
        let g = substitute(&f, "x", Term::add(x(), Term::Int(1))).unwrap();
        assert_eq!(g, Formula::le(Term::add(x(), Term::Int(1)), Term::Int(5)));
    }

    #[test]
    fn bound_occurrences_untouched() {
        let f = Formula::forall("x", Formula::le(Term::Int(0), x()));
        assert_eq!(substitute(&f, "x", Term::Int(7)).unwrap(), f);
    }

    #[test]
    fn binder_is_renamed_to_avoid_capture() {
        let y = Term::int_var("y");
        let f = Formula::forall("y", Formula::le(y.clone(), x()));
        let g = substitute(&f, "x", Term::add(y.clone(), Term::Int(1))).unwrap();
        let Formula::Forall(v, body) = &g else {
            panic!("expected forall")
        };
        assert_ne!(v, "y");
        assert_eq!(
            **body,
            Formula::le(Term::int_var(v.clone()), Term::add(y, Term::Int(1)))
        );
    }

    #[test]
    fn sort_mismatch_is_reported() {
        let f = Formula::le(x(), Term::Int(5));
        assert!(matches!(
            substitute(&f, "x", Term::EmptySet),
            Err(LogicError::SortMismatch { .. })
        ));
    }

    #[test]
    fn boolean_variables_take_formulas() {
        let f = Formula::imp(Formula::BVar("b".into()), Formula::False);
        let g = substitute(&f, "b", Formula::lt(x(), Term::Int(0))).unwrap();
        assert_eq!(g, Formula::imp(Formula::lt(x(), Term::Int(0)), Formula::False));
    }
}
