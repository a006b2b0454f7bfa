// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use lissom_lang::{old_name, TypedFunction, RESULT};
use lissom_logic::{substitute_many, Formula, Replacement, Sort, Term};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("variable `{0}` has no machine-level name")]
pub struct UnmappedVariable(pub String);

/// Source-to-machine naming for one function.
///
/// Parameters take the first slots in order, then locals in declaration
/// order. The variable in slot `k` is called `{name}_s{k}` at the machine
/// level and the ghost for `\old(x)` is `old_{x}_s{k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMap {
    pub slots: BTreeMap<String, usize>,
    /// Source logical name to machine logical name, ghosts included.
    pub names: BTreeMap<String, String>,
}

pub fn slot_name(name: &str, slot: usize) -> String {
    format!("{name}_s{slot}")
}

pub fn ghost_name(name: &str, slot: usize) -> String {
    format!("old_{name}_s{slot}")
}

impl VarMap {
    pub fn of(f: &TypedFunction) -> VarMap {
        let mut slots = BTreeMap::new();
        let mut names = BTreeMap::new();
        let all = f
            .decl
            .params
            .iter()
            .map(|p| p.name.clone())
            .chain(f.locals.iter().map(|(x, _)| x.clone()));
        for (k, x) in all.enumerate() {
            names.insert(x.clone(), slot_name(&x, k));
            slots.insert(x, k);
        }
        for x in &f.olds {
            names.insert(old_name(x), ghost_name(x, slots[x]));
        }
        VarMap { slots, names }
    }
}

/// Renames the free variables of `f` through `vm`.
///
/// `\result` and other backslash names (site variables) are kept; any
/// other variable missing from the map is an error.
pub fn translate_formula(f: &Formula, vm: &VarMap) -> Result<Formula, UnmappedVariable> {
    let mut map = BTreeMap::new();
    for (x, sort) in f.free_vars() {
        let new = match vm.names.get(&x) {
            Some(n) => n.clone(),
            None if x == RESULT || x.starts_with('\\') => continue,
            None => return Err(UnmappedVariable(x)),
        };
        let r = match sort {
            Sort::Bool => Replacement::Formula(Formula::BVar(new)),
            s => Replacement::Term(Term::var(new, s)),
        };
        map.insert(x, r);
    }
    Ok(substitute_many(f, &map))
}
