// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Big-step reference semantics, used as the oracle for the compiler.
//!
//! Evaluation is strict and left to right, `and`/`or` included, with the
//! machine's trap rules: checked 64-bit arithmetic, Euclidean `div` and
//! `mod`, bounds-checked indexing and `newvec` lengths in
//! `0..=MAX_VEC_LEN`. Unlike the machine, assertions are checked; a
//! quantifier in an assertion ranges over `[-ASSERT_RANGE, ASSERT_RANGE]`.

use std::collections::BTreeSet;
use std::fmt;

use lissom_logic::{eval_with_quantifiers, GroundState, Value};
use thiserror::Error;

use crate::ast::*;
use crate::typeck::{annotation_formula, TypedFunction, TypedProgram};

pub const MAX_VEC_LEN: i64 = 1 << 20;
pub const DEFAULT_FUEL: u64 = 10_000_000;
pub const ASSERT_RANGE: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrapKind {
    DivByZero,
    OutOfBounds,
    InputExhausted,
    Overflow,
    AssertFailed,
}

impl fmt::Display for TrapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trap {
    pub kind: TrapKind,
    pub function: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Returned(Option<Value>),
    Trap(Trap),
    OutOfFuel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub outputs: Vec<i64>,
    pub status: Status,
    /// Variables of the entry function when it stopped.
    pub store: GroundState,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("no function `{0}`")]
    UnknownEntry(String),
    #[error("entry function `{0}` takes parameters")]
    EntryTakesParameters(String),
}

/// Runs `main` with the default fuel.
pub fn interpret_source(p: &TypedProgram, inputs: &[i64]) -> Result<Outcome, RunError> {
    interpret(p, "main", inputs, DEFAULT_FUEL)
}

/// Runs `entry`; every executed statement and loop test costs one unit
/// of fuel.
pub fn interpret(
    p: &TypedProgram,
    entry: &str,
    inputs: &[i64],
    fuel: u64,
) -> Result<Outcome, RunError> {
    let f = p
        .function(entry)
        .ok_or_else(|| RunError::UnknownEntry(entry.to_string()))?;
    if !f.decl.params.is_empty() {
        return Err(RunError::EntryTakesParameters(entry.to_string()));
    }
    let mut m = Interp {
        p,
        inputs,
        next_input: 0,
        outputs: Vec::new(),
        fuel,
    };
    let mut store = GroundState::new();
    let status = match m.call(f, &mut store) {
        Ok(v) => Status::Returned(v),
        Err(Stop::Trap(t)) => Status::Trap(t),
        Err(Stop::OutOfFuel) => Status::OutOfFuel,
    };
    Ok(Outcome {
        outputs: m.outputs,
        status,
        store,
    })
}

enum Stop {
    Trap(Trap),
    OutOfFuel,
}

struct Interp<'a> {
    p: &'a TypedProgram,
    inputs: &'a [i64],
    next_input: usize,
    outputs: Vec<i64>,
    fuel: u64,
}

struct Frame<'a> {
    func: &'a str,
    store: &'a mut GroundState,
}

type R<T> = Result<T, Stop>;

impl Frame<'_> {
    fn trap(&self, kind: TrapKind, pos: Pos) -> Stop {
        Stop::Trap(Trap {
            kind,
            function: self.func.to_string(),
            pos,
        })
    }
}

impl Interp<'_> {
    fn tick(&mut self) -> R<()> {
        if self.fuel == 0 {
            return Err(Stop::OutOfFuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    /// Runs a function whose parameters are already in `store`.
    fn call(&mut self, f: &TypedFunction, store: &mut GroundState) -> R<Option<Value>> {
        let mut fr = Frame {
            func: &f.decl.name,
            store,
        };
        for s in &f.decl.body {
            if let StmtKind::Return(e) = &s.kind {
                self.tick()?;
                return match e {
                    Some(e) => Ok(Some(self.eval(&mut fr, e)?)),
                    None => Ok(None),
                };
            }
            self.stmt(&mut fr, s)?;
        }
        Ok(None)
    }

    fn block(&mut self, fr: &mut Frame<'_>, body: &[Stmt]) -> R<()> {
        body.iter().try_for_each(|s| self.stmt(fr, s))
    }

    fn stmt(&mut self, fr: &mut Frame<'_>, s: &Stmt) -> R<()> {
        self.tick()?;
        match &s.kind {
            StmtKind::VarDecl(x, _, e) | StmtKind::Assign(x, e) => {
                let v = self.eval(fr, e)?;
                fr.store.insert(x.clone(), v);
            }
            StmtKind::VecStore(x, i, e) => {
                let i = self.int(fr, i)?;
                let e = self.int(fr, e)?;
                let Some(Value::Vec(v)) = fr.store.get_mut(x) else {
                    unreachable!("typed vector store")
                };
                let cell = usize::try_from(i).ok().and_then(|i| v.get_mut(i));
                match cell {
                    Some(c) => *c = e,
                    None => return Err(fr.trap(TrapKind::OutOfBounds, s.pos)),
                }
            }
            StmtKind::If(c, t, e) => {
                if self.boolean(fr, c)? {
                    self.block(fr, t)?;
                } else {
                    self.block(fr, e)?;
                }
            }
            StmtKind::While(c, _, body) => {
                while self.boolean(fr, c)? {
                    self.block(fr, body)?;
                    self.tick()?;
                }
            }
            StmtKind::Assert(f) => {
                let holds = eval_with_quantifiers(
                    &annotation_formula(f),
                    fr.store,
                    -ASSERT_RANGE,
                    ASSERT_RANGE,
                );
                if holds != Ok(true) {
                    return Err(fr.trap(TrapKind::AssertFailed, s.pos));
                }
            }
            StmtKind::Return(_) => unreachable!("return is the last statement"),
            StmtKind::Print(e) => {
                let n = self.int(fr, e)?;
                self.outputs.push(n);
            }
            StmtKind::Call(f, args) => {
                self.invoke(fr, f, args)?;
            }
        }
        Ok(())
    }

    fn invoke(&mut self, fr: &mut Frame<'_>, name: &str, args: &[Expr]) -> R<Option<Value>> {
        let f = self.p.function(name).expect("typed call");
        let mut store = GroundState::new();
        for (p, a) in f.decl.params.iter().zip(args) {
            let v = self.eval(fr, a)?;
            store.insert(p.name.clone(), v);
        }
        self.call(f, &mut store)
    }

    fn int(&mut self, fr: &mut Frame<'_>, e: &Expr) -> R<i64> {
        match self.eval(fr, e)? {
            Value::Int(n) => Ok(n),
            v => unreachable!("typed int expression gave {v}"),
        }
    }

    fn boolean(&mut self, fr: &mut Frame<'_>, e: &Expr) -> R<bool> {
        match self.eval(fr, e)? {
            Value::Bool(b) => Ok(b),
            v => unreachable!("typed bool expression gave {v}"),
        }
    }

    fn set(&mut self, fr: &mut Frame<'_>, e: &Expr) -> R<BTreeSet<i64>> {
        match self.eval(fr, e)? {
            Value::Set(s) => Ok(s),
            v => unreachable!("typed set expression gave {v}"),
        }
    }

    fn vector(&mut self, fr: &mut Frame<'_>, e: &Expr) -> R<Vec<i64>> {
        match self.eval(fr, e)? {
            Value::Vec(v) => Ok(v),
            v => unreachable!("typed vector expression gave {v}"),
        }
    }

    fn eval(&mut self, fr: &mut Frame<'_>, e: &Expr) -> R<Value> {
        use ExprKind::*;
        let pos = e.pos;
        Ok(match &e.kind {
            Int(n) => Value::Int(*n),
            Bool(b) => Value::Bool(*b),
            Var(x) => fr.store.get(x).cloned().expect("typed variable is bound"),
            Not(a) => Value::Bool(!self.boolean(fr, a)?),
            Binary(op, a, b) => match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
                    let x = self.int(fr, a)?;
                    let y = self.int(fr, b)?;
                    let r = match op {
                        BinOp::Add => x.checked_add(y),
                        BinOp::Sub => x.checked_sub(y),
                        BinOp::Mul => x.checked_mul(y),
                        _ if y == 0 => return Err(fr.trap(TrapKind::DivByZero, pos)),
                        BinOp::Div => x.checked_div_euclid(y),
                        _ => x.checked_rem_euclid(y),
                    };
                    Value::Int(r.ok_or_else(|| fr.trap(TrapKind::Overflow, pos))?)
                }
                BinOp::Eq => {
                    let x = self.eval(fr, a)?;
                    let y = self.eval(fr, b)?;
                    Value::Bool(x == y)
                }
                BinOp::Lt | BinOp::Le => {
                    let x = self.int(fr, a)?;
                    let y = self.int(fr, b)?;
                    Value::Bool(if *op == BinOp::Lt { x < y } else { x <= y })
                }
                BinOp::And | BinOp::Or => {
                    let x = self.boolean(fr, a)?;
                    let y = self.boolean(fr, b)?;
                    Value::Bool(if *op == BinOp::And { x && y } else { x || y })
                }
                BinOp::In => {
                    let x = self.int(fr, a)?;
                    let s = self.set(fr, b)?;
                    Value::Bool(s.contains(&x))
                }
                BinOp::Union | BinOp::Inter | BinOp::Diff => {
                    let x = self.set(fr, a)?;
                    let y = self.set(fr, b)?;
                    Value::Set(match op {
                        BinOp::Union => x.union(&y).copied().collect(),
                        BinOp::Inter => x.intersection(&y).copied().collect(),
                        _ => x.difference(&y).copied().collect(),
                    })
                }
                BinOp::Subset | BinOp::Implies | BinOp::Iff => {
                    unreachable!("annotation operator in code")
                }
            },
            SetLit(es) => {
                let mut s = BTreeSet::new();
                for x in es {
                    s.insert(self.int(fr, x)?);
                }
                Value::Set(s)
            }
            Index(v, i) => {
                let v = self.vector(fr, v)?;
                let i = self.int(fr, i)?;
                let x = usize::try_from(i).ok().and_then(|i| v.get(i).copied());
                Value::Int(x.ok_or_else(|| fr.trap(TrapKind::OutOfBounds, pos))?)
            }
            Len(v) => Value::Int(self.vector(fr, v)?.len() as i64),
            Card(s) => Value::Int(self.set(fr, s)?.len() as i64),
            NewVec(n) => {
                let n = self.int(fr, n)?;
                if !(0..=MAX_VEC_LEN).contains(&n) {
                    return Err(fr.trap(TrapKind::OutOfBounds, pos));
                }
                Value::Vec(vec![0; n as usize])
            }
            Read => {
                let x = *self
                    .inputs
                    .get(self.next_input)
                    .ok_or_else(|| fr.trap(TrapKind::InputExhausted, pos))?;
                self.next_input += 1;
                Value::Int(x)
            }
            Call(f, args) => self.invoke(fr, f, args)?.expect("typed call has a result"),
            Result | Old(_) | Forall(..) => unreachable!("annotation expression in code"),
        })
    }
}
