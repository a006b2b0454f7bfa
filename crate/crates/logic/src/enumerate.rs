// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Bounded exhaustive validity checking, used as a test oracle.
//!
//! Enumeration order: free variables are assigned in order of first
//! occurrence in the formula (preorder, left to right), the last one
//! varying fastest. Each variable ranges over its sort's domain in this
//! order:
//!
//! * `int`: `-bound, …, bound` ascending;
//! * `bool`: `false, true`;
//! * `set`: subsets of `[-bound, bound]` by size `0..=set_cap`, each size
//!   in lexicographic order of the ascending element list;
//! * `vec`: vectors by length `0..=vec_cap`, each length in
//!   lexicographic order with elements drawn from `[-bound, bound]`.
//!
//! Quantifiers are instantiated over `[-bound, bound]`. Hypotheses of a
//! top-level implication chain are evaluated as soon as their variables
//! are assigned, which prunes states that cannot be counter-models without
//! changing which counter-model is found first.

use std::collections::BTreeSet;

use crate::error::{EvalError, LogicError};
use crate::eval::{eval_assoc, GroundState, Value};
use crate::formula::{Formula, Sort};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// First state (in enumeration order) falsifying the formula.
    CounterModel(GroundState),
    /// First state on which evaluation hits a partial operation outside
    /// any guard.
    Undefined(GroundState, EvalError),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    pub bound: i64,
    pub set_cap: usize,
    pub vec_cap: usize,
    /// Maximum number of states the enumerator may visit.
    pub ceiling: u128,
}

impl EnumConfig {
    pub const DEFAULT_CEILING: u128 = 200_000_000_000;

    pub fn new(bound: i64, set_cap: usize, vec_cap: usize) -> Self {
        EnumConfig {
            bound,
            set_cap,
            vec_cap,
            ceiling: Self::DEFAULT_CEILING,
        }
    }
}

fn domain(sort: Sort, cfg: &EnumConfig) -> Vec<Value> {
    let lo = -cfg.bound;
    let hi = cfg.bound;
    match sort {
        Sort::Int => (lo..=hi).map(Value::Int).collect(),
        Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Sort::Set => {
            let elems: Vec<i64> = (lo..=hi).collect();
            let mut out = Vec::new();
            for size in 0..=cfg.set_cap.min(elems.len()) {
                combinations(&elems, size, 0, &mut Vec::new(), &mut out);
            }
            out
        }
        Sort::Vec => {
            let mut out = Vec::new();
            for len in 0..=cfg.vec_cap {
                sequences(lo, hi, len, &mut Vec::new(), &mut out);
            }
            out
        }
    }
}

fn combinations(
    elems: &[i64],
    size: usize,
    start: usize,
    cur: &mut Vec<i64>,
    out: &mut Vec<Value>,
) {
    if cur.len() == size {
        out.push(Value::Set(cur.iter().copied().collect::<BTreeSet<_>>()));
        return;
    }
    for i in start..elems.len() {
        cur.push(elems[i]);
        combinations(elems, size, i + 1, cur, out);
        cur.pop();
    }
}

fn sequences(lo: i64, hi: i64, len: usize, cur: &mut Vec<i64>, out: &mut Vec<Value>) {
    if cur.len() == len {
        out.push(Value::Vec(cur.clone()));
        return;
    }
    for n in lo..=hi {
        cur.push(n);
        sequences(lo, hi, len, cur, out);
        cur.pop();
    }
}

fn domain_size(sort: Sort, cfg: &EnumConfig) -> u128 {
    let width = (2 * cfg.bound.max(0) + 1) as u128;
    match sort {
        Sort::Int => width,
        Sort::Bool => 2,
        Sort::Set => {
            let mut total = 1u128;
            let mut c = 1u128;
            for k in 1..=(cfg.set_cap as u128).min(width) {
                c = c * (width - k + 1) / k;
                total += c;
            }
            total
        }
        Sort::Vec => {
            let mut total = 0u128;
            let mut p = 1u128;
            for _ in 0..=cfg.vec_cap {
                total = total.saturating_add(p);
                p = p.saturating_mul(width);
            }
            total
        }
    }
}

struct Search<'a> {
    vars: Vec<(String, Sort)>,
    domains: Vec<Vec<Value>>,
    hyps: Vec<&'a Formula>,
    /// Number of assigned variables each hypothesis needs.
    needs: Vec<usize>,
    goal: &'a Formula,
    cfg: EnumConfig,
    state: Vec<(String, Value)>,
}

enum Found {
    Counter,
    Undefined(EvalError),
}

impl Search<'_> {
    fn eval(&self, f: &Formula) -> Result<bool, LogicError> {
        eval_assoc(f, &self.state, -self.cfg.bound, self.cfg.bound)
    }

    fn complete_state(&self) -> GroundState {
        let mut s: GroundState = self.state.iter().cloned().collect();
        for (i, (n, _)) in self.vars.iter().enumerate().skip(self.state.len()) {
            s.insert(n.clone(), self.domains[i][0].clone());
        }
        s
    }

    /// Returns `Ok(None)` when every completion of the current partial
    /// state satisfies the formula.
    fn dfs(&mut self, next_hyp: usize) -> Result<Option<Found>, LogicError> {
        let assigned = self.state.len();
        let mut h = next_hyp;
        while h < self.hyps.len() && self.needs[h] <= assigned {
            match self.eval(self.hyps[h]) {
                Ok(true) => h += 1,
                Ok(false) => return Ok(None),
                Err(LogicError::Eval(e)) => return Ok(Some(Found::Undefined(e))),
                Err(other) => return Err(other),
            }
        }
        if assigned == self.vars.len() {
            return match self.eval(self.goal) {
                Ok(true) => Ok(None),
                Ok(false) => Ok(Some(Found::Counter)),
                Err(LogicError::Eval(e)) => Ok(Some(Found::Undefined(e))),
                Err(other) => Err(other),
            };
        }
        let name = self.vars[assigned].0.clone();
        for i in 0..self.domains[assigned].len() {
            let v = self.domains[assigned][i].clone();
            self.state.push((name.clone(), v));
            let r = self.dfs(h)?;
            if r.is_some() {
                return Ok(r);
            }
            self.state.pop();
        }
        Ok(None)
    }
}

/// Exhaustively checks `f` over all states within the given caps.
pub fn enumerate_validity(
    f: &Formula,
    bound: i64,
    set_cap: usize,
    vec_cap: usize,
) -> Result<Validity, LogicError> {
    enumerate_with(f, &EnumConfig::new(bound, set_cap, vec_cap))
}

pub fn enumerate_with(f: &Formula, cfg: &EnumConfig) -> Result<Validity, LogicError> {
    let vars = f.free_vars_ordered();
    let mut size: u128 = 1;
    for (_, s) in &vars {
        size = size.saturating_mul(domain_size(*s, cfg));
    }
    if size > cfg.ceiling {
        return Err(LogicError::TooLarge {
            size,
            ceiling: cfg.ceiling,
        });
    }
    let (hyps, goal) = f.split_imp_chain();
    let needs = hyps
        .iter()
        .map(|h| {
            let fv = h.free_vars();
            vars.iter()
                .rposition(|(n, _)| fv.contains_key(n))
                .map_or(0, |p| p + 1)
        })
        .collect();
    let domains = vars.iter().map(|(_, s)| domain(*s, cfg)).collect();
    let mut search = Search {
        vars,
        domains,
        hyps,
        needs,
        goal,
        cfg: *cfg,
        state: Vec::new(),
    };
    Ok(match search.dfs(0)? {
        None => Validity::Valid,
        Some(Found::Counter) => Validity::CounterModel(search.complete_state()),
        Some(Found::Undefined(e)) => Validity::Undefined(search.complete_state(), e),
    })
}
