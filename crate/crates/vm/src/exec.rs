// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use lissom_logic::{Sort, Value};
use thiserror::Error;

use crate::isa::Instr;
use crate::loader::LoadedModule;
use crate::module::BytecodeFunction;

/// Longest vector `NEWVEC` will allocate.
pub const MAX_VEC_LEN: i64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrapKind {
    DivByZero,
    /// Index or `NEWVEC` length out of range.
    OutOfBounds,
    InputExhausted,
    Overflow,
    /// An operand of the wrong tag; unreachable in loaded modules.
    TypeMismatch,
    /// An operand stack underflow; unreachable in loaded modules.
    StackUnderflow,
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
    pub pc: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    /// The entry function returned, with its result if it has one.
    Returned(Option<Value>),
    Halted,
    Trap(Trap),
    OutOfFuel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub outputs: Vec<i64>,
    pub status: Status,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("no function `{0}`")]
    UnknownEntry(String),
    #[error("entry function `{0}` takes parameters")]
    EntryTakesParameters(String),
}

/// A function return, reported to monitors.
pub struct ReturnEvent<'a> {
    pub function: &'a BytecodeFunction,
    /// Parameter values at entry.
    pub args: &'a [Value],
    /// Slot values at the return.
    pub slots: &'a [Value],
    pub result: Option<&'a Value>,
}

struct Frame {
    func: usize,
    pc: usize,
    stack: Vec<Value>,
    slots: Vec<Value>,
    args: Vec<Value>,
}

fn default_value(s: Sort) -> Value {
    match s {
        Sort::Int => Value::Int(0),
        Sort::Bool => Value::Bool(false),
        Sort::Set => Value::Set(BTreeSet::new()),
        Sort::Vec => Value::Vec(Vec::new()),
    }
}

fn new_frame(m: &LoadedModule, func: usize, args: Vec<Value>) -> Frame {
    let f = &m.module.functions[func];
    let mut slots = args.clone();
    for s in args.len()..f.nslots {
        slots.push(default_value(f.annotations.slot_sort(s).unwrap_or(Sort::Int)));
    }
    Frame {
        func,
        pc: 0,
        stack: Vec::new(),
        slots,
        args,
    }
}

pub fn run(m: &LoadedModule, entry: &str, inputs: &[i64], fuel: u64) -> Result<Outcome, RunError> {
    run_monitored(m, entry, inputs, fuel, &mut |_| {})
}

/// Runs `entry`, calling `monitor` at every function return.
pub fn run_monitored(
    m: &LoadedModule,
    entry: &str,
    inputs: &[i64],
    fuel: u64,
    monitor: &mut dyn FnMut(&ReturnEvent<'_>),
) -> Result<Outcome, RunError> {
    let e = m
        .module
        .index_of(entry)
        .ok_or_else(|| RunError::UnknownEntry(entry.to_string()))?;
    if m.module.functions[e].nparams != 0 {
        return Err(RunError::EntryTakesParameters(entry.to_string()));
    }
    let index: HashMap<&str, usize> = m
        .module
        .functions
        .iter()
        .enumerate()
        .map(|(i, f)| (f.name.as_str(), i))
        .collect();
    let mut machine = Machine {
        m,
        index,
        frames: vec![new_frame(m, e, Vec::new())],
        inputs,
        next_input: 0,
        outputs: Vec::new(),
    };
    let mut steps = 0;
    let status = loop {
        if steps >= fuel {
            break Status::OutOfFuel;
        }
        steps += 1;
        match machine.step(monitor) {
            Ok(None) => {}
            Ok(Some(s)) => break s,
            Err(kind) => {
                let top = machine.frames.last().expect("a frame is active");
                break Status::Trap(Trap {
                    kind,
                    function: m.module.functions[top.func].name.clone(),
                    pc: top.pc,
                });
            }
        }
    };
    Ok(Outcome {
        outputs: machine.outputs,
        status,
        steps,
    })
}

struct Machine<'a> {
    m: &'a LoadedModule,
    index: HashMap<&'a str, usize>,
    frames: Vec<Frame>,
    inputs: &'a [i64],
    next_input: usize,
    outputs: Vec<i64>,
}

type Step = Result<Option<Status>, TrapKind>;

impl Machine<'_> {
    fn step(&mut self, monitor: &mut dyn FnMut(&ReturnEvent<'_>)) -> Step {
        let m = self.m;
        let fr = self.frames.last_mut().expect("a frame is active");
        let func = &m.module.functions[fr.func];
        let instr = &func.code[fr.pc];
        debug_assert_eq!(
            m.stacks[fr.func][fr.pc].as_ref().map(|s| s.len()),
            Some(fr.stack.len()),
            "operand stack depth differs from the load-time map"
        );
        let mut next = fr.pc + 1;
        let st = &mut fr.stack;
        use Instr::*;
        match instr {
            Push(n) => st.push(Value::Int(*n)),
            PushBool(b) => st.push(Value::Bool(*b)),
            Load(s) => st.push(fr.slots[*s].clone()),
            Store(s) => fr.slots[*s] = pop(st)?,
            Add | Sub | Mul | Div | Mod => {
                let b = int(pop(st)?)?;
                let a = int(pop(st)?)?;
                let r = match instr {
                    Add => a.checked_add(b),
                    Sub => a.checked_sub(b),
                    Mul => a.checked_mul(b),
                    Div | Mod if b == 0 => return Err(TrapKind::DivByZero),
                    Div => a.checked_div_euclid(b),
                    _ => a.checked_rem_euclid(b),
                };
                st.push(Value::Int(r.ok_or(TrapKind::Overflow)?));
            }
            Eq => {
                let b = pop(st)?;
                let a = pop(st)?;
                if a.sort() != b.sort() {
                    return Err(TrapKind::TypeMismatch);
                }
                st.push(Value::Bool(a == b));
            }
            Lt | Le => {
                let b = int(pop(st)?)?;
                let a = int(pop(st)?)?;
                st.push(Value::Bool(if matches!(instr, Lt) { a < b } else { a <= b }));
            }
            Not => {
                let a = boolean(pop(st)?)?;
                st.push(Value::Bool(!a));
            }
            And | Or => {
                let b = boolean(pop(st)?)?;
                let a = boolean(pop(st)?)?;
                st.push(Value::Bool(if matches!(instr, And) { a && b } else { a || b }));
            }
            Jmp(t) => next = *t,
            Jz(t) => {
                if !boolean(pop(st)?)? {
                    next = *t;
                }
            }
            NewVec => {
                let n = int(pop(st)?)?;
                if !(0..=MAX_VEC_LEN).contains(&n) {
                    return Err(TrapKind::OutOfBounds);
                }
                st.push(Value::Vec(vec![0; n as usize]));
            }
            GetIdx => {
                let i = int(pop(st)?)?;
                let v = vector(pop(st)?)?;
                let x = usize::try_from(i)
                    .ok()
                    .and_then(|i| v.get(i).copied())
                    .ok_or(TrapKind::OutOfBounds)?;
                st.push(Value::Int(x));
            }
            SetIdx => {
                let e = int(pop(st)?)?;
                let i = int(pop(st)?)?;
                let mut v = vector(pop(st)?)?;
                let cell = usize::try_from(i)
                    .ok()
                    .and_then(|i| v.get_mut(i))
                    .ok_or(TrapKind::OutOfBounds)?;
                *cell = e;
                st.push(Value::Vec(v));
            }
            VLen => {
                let v = vector(pop(st)?)?;
                st.push(Value::Int(v.len() as i64));
            }
            NewSet => st.push(Value::Set(BTreeSet::new())),
            SIns => {
                let e = int(pop(st)?)?;
                let mut s = set(pop(st)?)?;
                s.insert(e);
                st.push(Value::Set(s));
            }
            SUnion | SInter | SDiff => {
                let b = set(pop(st)?)?;
                let a = set(pop(st)?)?;
                let r = match instr {
                    SUnion => a.union(&b).copied().collect(),
                    SInter => a.intersection(&b).copied().collect(),
                    _ => a.difference(&b).copied().collect(),
                };
                st.push(Value::Set(r));
            }
            SMem => {
                let s = set(pop(st)?)?;
                let e = int(pop(st)?)?;
                st.push(Value::Bool(s.contains(&e)));
            }
            SCard => {
                let s = set(pop(st)?)?;
                st.push(Value::Int(s.len() as i64));
            }
            Call(name) => {
                let callee = *self.index.get(name.as_str()).expect("loader resolved calls");
                let n = m.module.functions[callee].nparams;
                if st.len() < n {
                    return Err(TrapKind::StackUnderflow);
                }
                let args = st.split_off(st.len() - n);
                fr.pc = next;
                self.frames.push(new_frame(m, callee, args));
                return Ok(None);
            }
            Ret => {
                let result = if func.ret.is_some() { Some(pop(st)?) } else { None };
                monitor(&ReturnEvent {
                    function: func,
                    args: &fr.args,
                    slots: &fr.slots,
                    result: result.as_ref(),
                });
                self.frames.pop();
                match self.frames.last_mut() {
                    None => return Ok(Some(Status::Returned(result))),
                    Some(caller) => caller.stack.extend(result),
                }
                return Ok(None);
            }
            Read => {
                let x = *self
                    .inputs
                    .get(self.next_input)
                    .ok_or(TrapKind::InputExhausted)?;
                self.next_input += 1;
                st.push(Value::Int(x));
            }
            Print => {
                let x = int(pop(st)?)?;
                self.outputs.push(x);
            }
            Halt => return Ok(Some(Status::Halted)),
        }
        fr.pc = next;
        Ok(None)
    }
}

fn pop(st: &mut Vec<Value>) -> Result<Value, TrapKind> {
    st.pop().ok_or(TrapKind::StackUnderflow)
}

fn int(v: Value) -> Result<i64, TrapKind> {
    match v {
        Value::Int(n) => Ok(n),
        _ => Err(TrapKind::TypeMismatch),
    }
}

fn boolean(v: Value) -> Result<bool, TrapKind> {
    match v {
        Value::Bool(b) => Ok(b),
        _ => Err(TrapKind::TypeMismatch),
    }
}

fn vector(v: Value) -> Result<Vec<i64>, TrapKind> {
    match v {
        Value::Vec(v) => Ok(v),
        _ => Err(TrapKind::TypeMismatch),
    }
}

fn set(v: Value) -> Result<BTreeSet<i64>, TrapKind> {
    match v {
        Value::Set(s) => Ok(s),
        _ => Err(TrapKind::TypeMismatch),
    }
}
