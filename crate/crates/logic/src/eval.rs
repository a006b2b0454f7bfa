// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{EvalError, LogicError};
use crate::formula::{Formula, Sort, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Set(BTreeSet<i64>),
    Vec(Vec<i64>),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
            Value::Set(_) => Sort::Set,
            Value::Vec(_) => Sort::Vec,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, it: &mut dyn Iterator<Item = &i64>| {
            let parts: Vec<String> = it.map(|n| n.to_string()).collect();
            f.write_str(&parts.join(", "))
        };
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Set(s) => {
                f.write_str("{")?;
                list(f, &mut s.iter())?;
                f.write_str("}")
            }
            Value::Vec(v) => {
                f.write_str("[")?;
                list(f, &mut v.iter())?;
                f.write_str("]")
            }
        }
    }
}

/// Assignment of values to variable names.
pub type GroundState = BTreeMap<String, Value>;

pub(crate) trait Lookup {
    fn get_value(&self, name: &str) -> Option<&Value>;
}

impl Lookup for GroundState {
    fn get_value(&self, name: &str) -> Option<&Value> {
        self.get(name)
    }
}

impl Lookup for [(String, Value)] {
    fn get_value(&self, name: &str) -> Option<&Value> {
        self.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

struct Env<'a, L: Lookup + ?Sized> {
    state: &'a L,
    bound: Vec<(String, i64)>,
}

impl<L: Lookup + ?Sized> Env<'_, L> {
    fn var(&self, name: &str, sort: Sort) -> Result<Value, LogicError> {
        if sort == Sort::Int {
            if let Some((_, v)) = self.bound.iter().rev().find(|(n, _)| n == name) {
                return Ok(Value::Int(*v));
            }
        }
        match self.state.get_value(name) {
            Some(v) if v.sort() == sort => Ok(v.clone()),
            Some(v) => Err(LogicError::SortMismatch {
                expected: sort,
                found: v.sort(),
                context: name.to_string(),
            }),
            None => Err(LogicError::Unbound(name.to_string())),
        }
    }
}

fn int(v: Value) -> Result<i64, LogicError> {
    match v {
        Value::Int(n) => Ok(n),
        other => Err(LogicError::SortMismatch {
            expected: Sort::Int,
            found: other.sort(),
            context: other.to_string(),
        }),
    }
}

fn set(v: Value) -> Result<BTreeSet<i64>, LogicError> {
    match v {
        Value::Set(s) => Ok(s),
        other => Err(LogicError::SortMismatch {
            expected: Sort::Set,
            found: other.sort(),
            context: other.to_string(),
        }),
    }
}

fn vector(v: Value) -> Result<Vec<i64>, LogicError> {
    match v {
        Value::Vec(s) => Ok(s),
        other => Err(LogicError::SortMismatch {
            expected: Sort::Vec,
            found: other.sort(),
            context: other.to_string(),
        }),
    }
}

fn arith(r: Option<i64>, err: EvalError) -> Result<Value, LogicError> {
    r.map(Value::Int).ok_or(LogicError::Eval(err))
}

fn index(v: &[i64], i: i64) -> Result<usize, LogicError> {
    if i < 0 || i as u64 >= v.len() as u64 {
        Err(LogicError::Eval(EvalError::IdxOutOfBounds))
    } else {
        Ok(i as usize)
    }
}

/// Largest vector `newvec` will build during evaluation.
const MAX_NEWVEC: i64 = 1 << 16;

fn term<L: Lookup + ?Sized>(t: &Term, env: &Env<'_, L>) -> Result<Value, LogicError> {
    use Term::*;
    Ok(match t {
        Int(n) => Value::Int(*n),
        Var(n, s) => env.var(n, *s)?,
        Add(x, y) => arith(
            int(term(x, env)?)?.checked_add(int(term(y, env)?)?),
            EvalError::Overflow,
        )?,
        Sub(x, y) => arith(
            int(term(x, env)?)?.checked_sub(int(term(y, env)?)?),
            EvalError::Overflow,
        )?,
        Mul(x, y) => arith(
            int(term(x, env)?)?.checked_mul(int(term(y, env)?)?),
            EvalError::Overflow,
        )?,
        Div(x, y) | Mod(x, y) => {
            let a = int(term(x, env)?)?;
            let d = int(term(y, env)?)?;
            if d == 0 {
                return Err(LogicError::Eval(EvalError::DivByZero));
            }
            let r = if matches!(t, Div(..)) {
                a.checked_div_euclid(d)
            } else {
                a.checked_rem_euclid(d)
            };
            arith(r, EvalError::Overflow)?
        }
        Len(v) => Value::Int(vector(term(v, env)?)?.len() as i64),
        Idx(v, i) => {
            let v = vector(term(v, env)?)?;
            let i = index(&v, int(term(i, env)?)?)?;
            Value::Int(v[i])
        }
        Upd(v, i, e) => {
            let mut v = vector(term(v, env)?)?;
            let i = index(&v, int(term(i, env)?)?)?;
            v[i] = int(term(e, env)?)?;
            Value::Vec(v)
        }
        NewVec(n) => {
            let n = int(term(n, env)?)?;
            if !(0..=MAX_NEWVEC).contains(&n) {
                return Err(LogicError::Eval(EvalError::IdxOutOfBounds));
            }
            Value::Vec(vec![0; n as usize])
        }
        Card(s) => Value::Int(set(term(s, env)?)?.len() as i64),
        Union(x, y) => {
            let mut a = set(term(x, env)?)?;
            a.extend(set(term(y, env)?)?);
            Value::Set(a)
        }
        Inter(x, y) => {
            let a = set(term(x, env)?)?;
            let c = set(term(y, env)?)?;
            Value::Set(a.intersection(&c).copied().collect())
        }
        Diff(x, y) => {
            let a = set(term(x, env)?)?;
            let c = set(term(y, env)?)?;
            Value::Set(a.difference(&c).copied().collect())
        }
        SetLit(es) => {
            let mut s = BTreeSet::new();
            for e in es {
                s.insert(int(term(e, env)?)?);
            }
            Value::Set(s)
        }
        EmptySet => Value::Set(BTreeSet::new()),
    })
}

/// Left-to-right short-circuit evaluation. `range` bounds quantifier
/// instantiation; `None` rejects quantifiers.
fn formula<L: Lookup + ?Sized>(
    f: &Formula,
    env: &mut Env<'_, L>,
    range: Option<(i64, i64)>,
) -> Result<bool, LogicError> {
    use Formula::*;
    Ok(match f {
        True => true,
        False => false,
        BVar(n) => match env.state.get_value(n) {
            Some(Value::Bool(b)) => *b,
            Some(v) => {
                return Err(LogicError::SortMismatch {
                    expected: Sort::Bool,
                    found: v.sort(),
                    context: n.clone(),
                })
            }
            None => return Err(LogicError::Unbound(n.clone())),
        },
        Not(g) => !formula(g, env, range)?,
        And(g, h) => formula(g, env, range)? && formula(h, env, range)?,
        Or(g, h) => formula(g, env, range)? || formula(h, env, range)?,
        Imp(g, h) => !formula(g, env, range)? || formula(h, env, range)?,
        Eq(x, y) => term(x, env)? == term(y, env)?,
        Lt(x, y) => int(term(x, env)?)? < int(term(y, env)?)?,
        Le(x, y) => int(term(x, env)?)? <= int(term(y, env)?)?,
        Mem(x, y) => {
            let e = int(term(x, env)?)?;
            set(term(y, env)?)?.contains(&e)
        }
        Subset(x, y) => {
            let a = set(term(x, env)?)?;
            a.is_subset(&set(term(y, env)?)?)
        }
        Forall(v, body) => {
            let Some((lo, hi)) = range else {
                return Err(LogicError::NonGround(f.to_string()));
            };
            for n in lo..=hi {
                env.bound.push((v.clone(), n));
                let r = formula(body, env, range);
                env.bound.pop();
                if !r? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

/// Evaluates a quantifier-free formula in a state covering its free
/// variables.
pub fn eval_ground(f: &Formula, state: &GroundState) -> Result<bool, LogicError> {
    let mut env = Env {
        state,
        bound: Vec::new(),
    };
    formula(f, &mut env, None)
}

pub fn eval_term(t: &Term, state: &GroundState) -> Result<Value, LogicError> {
    let env = Env {
        state,
        bound: Vec::new(),
    };
    term(t, &env)
}

/// Evaluation with every quantifier instantiated over `[lo, hi]`.
pub fn eval_with_quantifiers(
    f: &Formula,
    state: &GroundState,
    lo: i64,
    hi: i64,
) -> Result<bool, LogicError> {
    let mut env = Env {
        state,
        bound: Vec::new(),
    };
    formula(f, &mut env, Some((lo, hi)))
}

pub(crate) fn eval_assoc(
    f: &Formula,
    state: &[(String, Value)],
    lo: i64,
    hi: i64,
) -> Result<bool, LogicError> {
    let mut env = Env {
        state,
        bound: Vec::new(),
    };
    formula(f, &mut env, Some((lo, hi)))
}
