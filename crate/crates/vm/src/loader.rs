// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Structural well-formedness: operands in range, a consistent sorted
//! operand stack at every reachable pc, annotations that only mention
//! declared names, and an acyclic call graph.

use std::collections::{BTreeMap, BTreeSet};

use lissom_logic::{is_reserved_binder_name, Formula, Sort};

use crate::binary::decode_module;
use crate::error::{Location, MalformedModule};
use crate::isa::Instr;
use crate::lbc::parse_lbc;
use crate::module::{BytecodeFunction, BytecodeModule, RESULT};

/// Deepest operand stack a module may use.
pub const MAX_STACK: usize = 256;

/// Sorted operand stack before each pc; `None` where unreachable.
pub type StackMap = Vec<Option<Vec<Sort>>>;

/// A module that passed [`check_module`], with its stack maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedModule {
    pub module: BytecodeModule,
    pub stacks: Vec<StackMap>,
}

impl LoadedModule {
    pub fn function(&self, name: &str) -> Option<(&BytecodeFunction, &StackMap)> {
        let i = self.module.index_of(name)?;
        Some((&self.module.functions[i], &self.stacks[i]))
    }
}

/// Parses `.lbc` text and checks it.
pub fn load_module(text: &str) -> Result<LoadedModule, MalformedModule> {
    check_module(parse_lbc(text)?)
}

/// Decodes the binary form and checks it.
pub fn load_binary(bytes: &[u8]) -> Result<LoadedModule, MalformedModule> {
    check_module(decode_module(bytes)?)
}

pub fn check_module(module: BytecodeModule) -> Result<LoadedModule, MalformedModule> {
    let mut names = BTreeSet::new();
    for f in &module.functions {
        if f.name.is_empty() || !names.insert(f.name.as_str()) {
            return Err(MalformedModule::new(format!("duplicate or empty function name `{}`", f.name)));
        }
    }
    let mut stacks = Vec::new();
    for f in &module.functions {
        check_annotations(f).map_err(|e| e.in_function(&f.name))?;
        stacks.push(analyze(&module, f).map_err(|e| e.in_function(&f.name))?);
    }
    check_call_graph(&module)?;
    Ok(LoadedModule { module, stacks })
}

fn check_annotations(f: &BytecodeFunction) -> Result<(), MalformedModule> {
    let t = &f.annotations;
    if f.nparams > f.nslots {
        return Err(MalformedModule::new("more parameters than slots"));
    }
    for slot in 0..f.nslots {
        if !t.vars.contains_key(&slot) {
            return Err(MalformedModule::new(format!("slot {slot} has no `#var`")));
        }
    }
    let mut names = BTreeSet::new();
    let bad_name = |n: &str| n.is_empty() || n.starts_with('\\') || is_reserved_binder_name(n);
    for (slot, (name, _)) in &t.vars {
        if *slot >= f.nslots {
            return Err(MalformedModule::new(format!("`#var` for slot {slot} beyond {}", f.nslots)));
        }
        if bad_name(name) || !names.insert(name.clone()) {
            return Err(MalformedModule::new(format!("bad or repeated slot name `{name}`")));
        }
    }
    let mut ghosted = BTreeSet::new();
    for (slot, ghost) in &t.olds {
        if *slot >= f.nparams || !ghosted.insert(*slot) {
            return Err(MalformedModule::new(format!("`#old` for slot {slot} is not a fresh parameter")));
        }
        if bad_name(ghost) || !names.insert(ghost.clone()) {
            return Err(MalformedModule::new(format!("bad or repeated ghost name `{ghost}`")));
        }
    }
    let env = t.sort_env(f.ret);
    let params: BTreeSet<&str> = (0..f.nparams).filter_map(|s| t.slot_name(s)).collect();
    let covered = |what: &str, fm: &Formula, allowed: &dyn Fn(&str) -> bool| {
        fm.check_sorts()
            .map_err(|e| MalformedModule::new(format!("{what}: {e}")))?;
        for (v, s) in fm.free_vars() {
            if !allowed(&v) || env.get(&v) != Some(&s) {
                return Err(MalformedModule::new(format!("{what} mentions undeclared `{v}`")));
            }
        }
        Ok(())
    };
    covered("requires", &t.requires, &|v| params.contains(v))?;
    let ghosts: BTreeSet<&str> = t.olds.iter().map(|(_, g)| g.as_str()).collect();
    covered("ensures", &t.ensures, &|v| {
        v == RESULT || params.contains(v) || ghosts.contains(v)
    })?;
    for slot in 0..f.nparams {
        let stored = f.code.contains(&Instr::Store(slot));
        match t.slot_name(slot) {
            Some(name) if stored && t.ensures.free_vars().contains_key(name) => {
                return Err(MalformedModule::new(format!(
                    "ensures mentions parameter `{name}`, which the body assigns"
                )));
            }
            _ => {}
        }
    }
    for (pc, inv) in &t.invariants {
        if *pc >= f.code.len() {
            return Err(MalformedModule::new(format!("invariant at pc {pc} beyond the code")));
        }
        covered("invariant", inv, &|v| v != RESULT && env.contains_key(v))?;
    }
    for (pc, a) in &t.asserts {
        if *pc >= f.code.len() {
            return Err(MalformedModule::new(format!("assertion at pc {pc} beyond the code")));
        }
        covered("assertion", a, &|v| v != RESULT && env.contains_key(v))?;
    }
    Ok(())
}

fn analyze(m: &BytecodeModule, f: &BytecodeFunction) -> Result<StackMap, MalformedModule> {
    let n = f.code.len();
    if n == 0 {
        return Err(MalformedModule::new("empty function body"));
    }
    let mut map: StackMap = vec![None; n];
    map[0] = Some(Vec::new());
    let mut work = vec![0usize];
    let mut rets = 0;
    let mut visited = vec![false; n];
    while let Some(pc) = work.pop() {
        let err = |r: String| MalformedModule::new(r).at(Location::Pc(pc));
        let mut stack = map[pc].clone().expect("queued pcs have a stack");
        let instr = &f.code[pc];
        if !visited[pc] {
            visited[pc] = true;
            if matches!(instr, Instr::Ret) {
                rets += 1;
            }
        }
        let pop = |want: Option<Sort>, stack: &mut Vec<Sort>| -> Result<Sort, MalformedModule> {
            let s = stack
                .pop()
                .ok_or_else(|| err(format!("stack underflow at {instr}")))?;
            match want {
                Some(w) if w != s => Err(err(format!("{instr} expects {w}, found {s}"))),
                _ => Ok(s),
            }
        };
        use Instr::*;
        use Sort::{Bool as B, Int as I, Set as S, Vec as V};
        let ops = |ins: &[Sort], out: Option<Sort>, stack: &mut Vec<Sort>| {
            for s in ins.iter().rev() {
                pop(Some(*s), stack)?;
            }
            stack.extend(out);
            Ok::<(), MalformedModule>(())
        };
        match instr {
            Push(_) => ops(&[], Some(I), &mut stack)?,
            PushBool(_) => ops(&[], Some(B), &mut stack)?,
            Load(s) | Store(s) => {
                let sort = f
                    .annotations
                    .slot_sort(*s)
                    .filter(|_| *s < f.nslots)
                    .ok_or_else(|| err(format!("slot {s} out of range")))?;
                if matches!(instr, Load(_)) {
                    ops(&[], Some(sort), &mut stack)?;
                } else {
                    ops(&[sort], None, &mut stack)?;
                }
            }
            Add | Sub | Mul | Div | Mod => ops(&[I, I], Some(I), &mut stack)?,
            Eq => {
                let b = pop(None, &mut stack)?;
                pop(Some(b), &mut stack)?;
                stack.push(B);
            }
            Lt | Le => ops(&[I, I], Some(B), &mut stack)?,
            Not => ops(&[B], Some(B), &mut stack)?,
            And | Or => ops(&[B, B], Some(B), &mut stack)?,
            Jmp(_) => {}
            Jz(_) => ops(&[B], None, &mut stack)?,
            NewVec => ops(&[I], Some(V), &mut stack)?,
            GetIdx => ops(&[V, I], Some(I), &mut stack)?,
            SetIdx => ops(&[V, I, I], Some(V), &mut stack)?,
            VLen => ops(&[V], Some(I), &mut stack)?,
            NewSet => ops(&[], Some(S), &mut stack)?,
            SIns => ops(&[S, I], Some(S), &mut stack)?,
            SUnion | SInter | SDiff => ops(&[S, S], Some(S), &mut stack)?,
            SMem => ops(&[I, S], Some(B), &mut stack)?,
            SCard => ops(&[S], Some(I), &mut stack)?,
            Call(name) => {
                let callee = m
                    .function(name)
                    .ok_or_else(|| err(format!("call to unknown function `{name}`")))?;
                let sorts: Option<Vec<Sort>> = callee.param_sorts().into_iter().collect();
                let sorts = sorts.ok_or_else(|| err(format!("`{name}` has undeclared parameters")))?;
                ops(&sorts, callee.ret, &mut stack)?;
            }
            Ret => {
                let expected: Vec<Sort> = f.ret.into_iter().collect();
                if stack != expected {
                    return Err(err(format!(
                        "RET with stack {stack:?}, expected {expected:?}"
                    )));
                }
            }
            Read => ops(&[], Some(I), &mut stack)?,
            Print => ops(&[I], None, &mut stack)?,
            Halt => {}
        }
        if stack.len() > MAX_STACK {
            return Err(err(format!("operand stack deeper than {MAX_STACK}")));
        }
        let mut succ = Vec::new();
        if let Some(t) = instr.jump_target() {
            if t >= n {
                return Err(err(format!("jump target {t} out of range")));
            }
            succ.push(t);
        }
        if instr.falls_through() {
            if pc + 1 >= n {
                return Err(err("control falls off the end of the function".into()));
            }
            succ.push(pc + 1);
        }
        for s in succ {
            match &map[s] {
                None => {
                    map[s] = Some(stack.clone());
                    work.push(s);
                }
                Some(existing) if *existing != stack => {
                    return Err(MalformedModule::new(format!(
                        "inconsistent stacks {existing:?} and {stack:?}"
                    ))
                    .at(Location::Pc(s)));
                }
                Some(_) => {}
            }
        }
    }
    for pc in f.annotations.invariants.keys() {
        if matches!(&map[*pc], Some(s) if !s.is_empty()) {
            return Err(MalformedModule::new("loop head with a non-empty stack").at(Location::Pc(*pc)));
        }
    }
    if f.ret.is_some() && rets != 1 {
        return Err(MalformedModule::new(format!(
            "value-returning function has {rets} reachable RETs"
        )));
    }
    Ok(map)
}

fn check_call_graph(m: &BytecodeModule) -> Result<(), MalformedModule> {
    let edges: BTreeMap<&str, BTreeSet<&str>> = m
        .functions
        .iter()
        .map(|f| {
            let callees = f
                .code
                .iter()
                .filter_map(|i| match i {
                    Instr::Call(n) => Some(n.as_str()),
                    _ => None,
                })
                .collect();
            (f.name.as_str(), callees)
        })
        .collect();
    // Kahn-style: repeatedly drop functions whose callees are all dropped.
    let mut done: BTreeSet<&str> = BTreeSet::new();
    loop {
        let ready: Vec<&str> = edges
            .iter()
            .filter(|(f, cs)| !done.contains(*f) && cs.iter().all(|c| done.contains(c)))
            .map(|(f, _)| *f)
            .collect();
        if ready.is_empty() {
            break;
        }
        done.extend(ready);
    }
    match edges.keys().find(|f| !done.contains(*f)) {
        Some(f) => Err(MalformedModule::new("recursive call cycle").in_function(f)),
        None => Ok(()),
    }
}
