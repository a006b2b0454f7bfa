// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use lissom_logic::{Formula, Sort, SortEnv};

use crate::isa::Instr;

/// Logical name bound to `\result` in exit specifications.
pub const RESULT: &str = "\\result";

/// Machine-level specification carrier of one function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotationTable {
    pub requires: Formula,
    /// Over slot names, `\old` ghosts and `\result`.
    pub ensures: Formula,
    /// Loop-head pc to invariant.
    pub invariants: BTreeMap<usize, Formula>,
    /// Slot to logical name and sort.
    pub vars: BTreeMap<usize, (String, Sort)>,
    /// Entry snapshots: parameter slot and ghost name, in slot order.
    pub olds: Vec<(usize, String)>,
    /// Proof-only assertions, checked when control reaches the pc.
    pub asserts: Vec<(usize, Formula)>,
}

impl Default for AnnotationTable {
    fn default() -> Self {
        AnnotationTable {
            requires: Formula::True,
            ensures: Formula::True,
            invariants: BTreeMap::new(),
            vars: BTreeMap::new(),
            olds: Vec::new(),
            asserts: Vec::new(),
        }
    }
}

impl AnnotationTable {
    pub fn slot_name(&self, slot: usize) -> Option<&str> {
        self.vars.get(&slot).map(|(n, _)| n.as_str())
    }

    pub fn slot_sort(&self, slot: usize) -> Option<Sort> {
        self.vars.get(&slot).map(|(_, s)| *s)
    }

    /// Sorts of every logical name an annotation may mention.
    pub fn sort_env(&self, ret: Option<Sort>) -> SortEnv {
        let mut env: SortEnv = self.vars.values().map(|(n, s)| (n.clone(), *s)).collect();
        for (slot, ghost) in &self.olds {
            if let Some(s) = self.slot_sort(*slot) {
                env.insert(ghost.clone(), s);
            }
        }
        if let Some(r) = ret {
            env.insert(RESULT.to_string(), r);
        }
        env
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BytecodeFunction {
    pub name: String,
    pub nparams: usize,
    pub nslots: usize,
    /// `None` for functions returning nothing.
    pub ret: Option<Sort>,
    pub code: Vec<Instr>,
    pub annotations: AnnotationTable,
}

impl BytecodeFunction {
    pub fn param_sorts(&self) -> Vec<Option<Sort>> {
        (0..self.nparams)
            .map(|s| self.annotations.slot_sort(s))
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BytecodeModule {
    pub functions: Vec<BytecodeFunction>,
}

impl BytecodeModule {
    pub fn function(&self, name: &str) -> Option<&BytecodeFunction> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }
}
