// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! The fixed catalog of axiom schemas.
//!
//! Each schema is a formula over metavariables of known sort. Vector and
//! division laws carry range guards so that every instance holds under
//! the partial semantics of `idx`, `upd`, `newvec`, `div` and `mod`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use lissom_logic::{
    formula_from_sexp, parse_sexp, substitute_many, Formula, Replacement, Sort, SortEnv, Term,
};

/// Version tag of the catalog, recorded in bundles.
pub const CATALOG_VERSION: &str = "lissom-axioms-1";

pub struct Schema {
    pub id: &'static str,
    pub metavars: Vec<(&'static str, Sort)>,
    pub pattern: Formula,
}

const S: Sort = Sort::Set;
const I: Sort = Sort::Int;
const V: Sort = Sort::Vec;

type Source = (&'static str, &'static [(&'static str, Sort)], &'static str);

const SOURCES: &[Source] = &[
    (
        "mem_union",
        &[("e", I), ("A", S), ("B", S)],
        "(iff (mem e (union A B)) (or (mem e A) (mem e B)))",
    ),
    (
        "mem_inter",
        &[("e", I), ("A", S), ("B", S)],
        "(iff (mem e (inter A B)) (and (mem e A) (mem e B)))",
    ),
    (
        "mem_diff",
        &[("e", I), ("A", S), ("B", S)],
        "(iff (mem e (diff A B)) (and (mem e A) (not (mem e B))))",
    ),
    ("mem_empty", &[("e", I)], "(not (mem e (empty)))"),
    (
        "mem_set1",
        &[("e", I), ("a", I)],
        "(iff (mem e (set a)) (eq e a))",
    ),
    (
        "mem_set2",
        &[("e", I), ("a", I), ("b", I)],
        "(iff (mem e (set a b)) (or (eq e a) (eq e b)))",
    ),
    (
        "mem_set3",
        &[("e", I), ("a", I), ("b", I), ("c", I)],
        "(iff (mem e (set a b c)) (or (eq e a) (or (eq e b) (eq e c))))",
    ),
    (
        "mem_set4",
        &[("e", I), ("a", I), ("b", I), ("c", I), ("d", I)],
        "(iff (mem e (set a b c d)) (or (eq e a) (or (eq e b) (or (eq e c) (eq e d)))))",
    ),
    (
        "subset_def",
        &[("A", S), ("B", S)],
        "(iff (subset A B) (forall k (imp (mem k A) (mem k B))))",
    ),
    (
        "set_ext",
        &[("A", S), ("B", S)],
        "(imp (and (subset A B) (subset B A)) (eq A B))",
    ),
    ("card_nonneg", &[("A", S)], "(le 0 (card A))"),
    (
        "card_union",
        &[("A", S), ("B", S)],
        "(eq (add (card (union A B)) (card (inter A B))) (add (card A) (card B)))",
    ),
    ("card_empty", &[], "(eq (card (empty)) 0)"),
    ("card_set1", &[("a", I)], "(eq (card (set a)) 1)"),
    ("len_nonneg", &[("v", V)], "(le 0 (len v))"),
    (
        "len_upd",
        &[("v", V), ("i", I), ("e", I)],
        "(imp (and (le 0 i) (lt i (len v))) (eq (len (upd v i e)) (len v)))",
    ),
    (
        "sel_upd_eq",
        &[("v", V), ("i", I), ("j", I), ("e", I)],
        "(imp (and (and (le 0 i) (lt i (len v))) (eq i j)) (eq (idx (upd v i e) j) e))",
    ),
    (
        "sel_upd_ne",
        &[("v", V), ("i", I), ("j", I), ("e", I)],
        "(imp (and (and (le 0 i) (lt i (len v))) (and (and (le 0 j) (lt j (len v))) \
         (not (eq i j)))) (eq (idx (upd v i e) j) (idx v j)))",
    ),
    (
        "len_newvec",
        &[("n", I)],
        "(imp (le 0 n) (eq (len (newvec n)) n))",
    ),
    (
        "idx_newvec",
        &[("n", I), ("j", I)],
        "(imp (and (le 0 n) (and (le 0 j) (lt j n))) (eq (idx (newvec n) j) 0))",
    ),
    (
        "divmod_pos",
        &[("e", I), ("d", I)],
        "(imp (lt 0 d) (and (eq e (add (mul d (div e d)) (mod e d))) \
         (and (le 0 (mod e d)) (lt (mod e d) d))))",
    ),
    (
        "divmod_neg",
        &[("e", I), ("d", I)],
        "(imp (lt d 0) (and (eq e (add (mul d (div e d)) (mod e d))) \
         (and (le 0 (mod e d)) (lt (mod e d) (sub 0 d)))))",
    ),
    (
        "int_trichotomy",
        &[("a", I), ("b", I)],
        "(or (lt a b) (or (eq a b) (lt b a)))",
    ),
];

/// All schemas, in catalog order.
pub fn catalog() -> &'static [Schema] {
    static CATALOG: OnceLock<Vec<Schema>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        SOURCES
            .iter()
            .map(|(id, metavars, text)| {
                let env: SortEnv = metavars.iter().map(|(m, s)| (m.to_string(), *s)).collect();
                let sexp = parse_sexp(text).expect("catalog text parses");
                let pattern = formula_from_sexp(&sexp, &env).expect("catalog formula is well formed");
                Schema {
                    id,
                    metavars: metavars.to_vec(),
                    pattern,
                }
            })
            .collect()
    })
}

pub fn lookup(id: &str) -> Option<&'static Schema> {
    catalog().iter().find(|s| s.id == id)
}

/// Instantiates a schema; every metavariable must be given exactly once
/// with a term of its sort.
pub fn instantiate(id: &str, inst: &[(String, Term)]) -> Result<Formula, String> {
    let schema = lookup(id).ok_or_else(|| format!("unknown axiom `{id}`"))?;
    let mut map = BTreeMap::new();
    for (m, t) in inst {
        let Some((_, sort)) = schema.metavars.iter().find(|(n, _)| n == m) else {
            return Err(format!("axiom `{id}` has no metavariable `{m}`"));
        };
        let found = t.sort().map_err(|e| e.to_string())?;
        if found != *sort {
            return Err(format!(
                "axiom `{id}`: `{m}` needs sort {sort}, found {found}"
            ));
        }
        if map.insert(m.clone(), Replacement::Term(t.clone())).is_some() {
            return Err(format!("axiom `{id}`: `{m}` instantiated twice"));
        }
    }
    if map.len() != schema.metavars.len() {
        return Err(format!("axiom `{id}`: instantiation is incomplete"));
    }
    Ok(substitute_many(&schema.pattern, &map))
}
