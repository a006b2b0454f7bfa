// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Forward symbolic execution of bytecode between cut points.
//!
//! A cut point is the entry of a function or a pc carrying an invariant.
//! Every back edge (a jump whose target is not after it) must land on an
//! invariant, so paths between cut points only move forward and there
//! are finitely many of them.

use std::collections::BTreeMap;

use lissom_logic::{substitute_many, Formula, Term};
use lissom_vm::{BytecodeFunction, BytecodeModule, Instr, LoadedModule, RESULT};

use crate::common::{
    call_var, div_guard, index_guard, instantiate_call, newvec_guard, read_var, set_insert,
    sym_eq, Sym,
};
use crate::error::VcError;
use crate::obligation::{Level, Location, Obligation, Provenance, Site};

/// Instructions symbolically executed per module, across all paths.
pub const MAX_STEPS: usize = 2_000_000;
/// Obligations per module.
pub const MAX_OBLIGATIONS: usize = 100_000;
/// Size of a symbolic value written to a slot.
pub const MAX_TERM_SIZE: usize = 1 << 16;

/// Verification conditions of every function of a loaded module.
pub fn bytecode_obligations(m: &LoadedModule) -> Result<Vec<Obligation>, VcError> {
    let mut out = Vec::new();
    let mut steps = 0;
    for f in &m.module.functions {
        Gen::new(&m.module, f, &mut out, &mut steps).function()?;
    }
    Ok(out)
}

/// Checks that every cycle of every function passes through an invariant.
pub fn check_cut_points(m: &BytecodeModule) -> Result<(), VcError> {
    m.functions.iter().try_for_each(cut_points)
}

fn cut_points(f: &BytecodeFunction) -> Result<(), VcError> {
    for (pc, i) in f.code.iter().enumerate() {
        if let Instr::Jmp(t) | Instr::Jz(t) = i {
            if *t <= pc && !f.annotations.invariants.contains_key(t) {
                return Err(VcError::UncoveredCycle {
                    function: f.name.clone(),
                    from: pc,
                    to: *t,
                });
            }
        }
    }
    Ok(())
}

#[derive(Clone)]
struct State {
    pc: usize,
    stack: Vec<Sym>,
    store: Vec<Sym>,
    hyps: Vec<Formula>,
}

struct Gen<'a> {
    module: &'a BytecodeModule,
    f: &'a BytecodeFunction,
    out: &'a mut Vec<Obligation>,
    steps: &'a mut usize,
    call_ord: BTreeMap<usize, usize>,
    read_ord: BTreeMap<usize, usize>,
}

impl<'a> Gen<'a> {
    fn new(
        module: &'a BytecodeModule,
        f: &'a BytecodeFunction,
        out: &'a mut Vec<Obligation>,
        steps: &'a mut usize,
    ) -> Self {
        let mut call_ord = BTreeMap::new();
        let mut read_ord = BTreeMap::new();
        for (pc, i) in f.code.iter().enumerate() {
            match i {
                Instr::Call(_) => {
                    call_ord.insert(pc, call_ord.len());
                }
                Instr::Read => {
                    read_ord.insert(pc, read_ord.len());
                }
                _ => {}
            }
        }
        Gen { module, f, out, steps, call_ord, read_ord }
    }

    fn err_stack(&self, pc: usize) -> VcError {
        VcError::SymbolicStackMismatch { function: self.f.name.clone(), pc }
    }

    fn too_large(&self, what: &'static str) -> VcError {
        VcError::TooLarge { function: self.f.name.clone(), what }
    }

    fn identity(&self) -> Vec<Sym> {
        let t = &self.f.annotations;
        (0..self.f.nslots)
            .map(|s| {
                let (n, sort) = &t.vars[&s];
                Sym::var(n, *sort)
            })
            .collect()
    }

    fn function(mut self) -> Result<(), VcError> {
        cut_points(self.f)?;
        let t = &self.f.annotations;
        let mut hyps = vec![t.requires.clone()];
        for (slot, ghost) in &t.olds {
            let (n, sort) = &t.vars[slot];
            let g = sym_eq(Sym::var(ghost, *sort), Sym::var(n, *sort)).expect("same sort");
            hyps.push(g);
        }
        let entry = State { pc: 0, stack: vec![], store: self.identity(), hyps };
        let mut work = Vec::new();
        if let Some(s) = self.arrive(entry)? {
            work.push(s);
        }
        self.explore(work)?;
        for (pc, inv) in &t.invariants {
            let head = State { pc: *pc, stack: vec![], store: self.identity(), hyps: vec![inv.clone()] };
            self.explore(vec![head])?;
        }
        Ok(())
    }

    fn subst_store(&self, f: &Formula, store: &[Sym], result: Option<Sym>) -> Formula {
        let mut map: BTreeMap<_, _> = store
            .iter()
            .enumerate()
            .map(|(s, v)| (self.f.annotations.vars[&s].0.clone(), v.clone().into_replacement()))
            .collect();
        if let Some(r) = result {
            map.insert(RESULT.to_string(), r.into_replacement());
        }
        substitute_many(f, &map)
    }

    fn emit(&mut self, hyps: &[Formula], goal: Formula, site: Site, pc: usize) -> Result<(), VcError> {
        if self.out.len() >= MAX_OBLIGATIONS {
            return Err(self.too_large("obligations"));
        }
        let formula = Formula::imp_chain(hyps.iter().cloned(), goal);
        self.out.push(Obligation::new(
            formula,
            Provenance {
                level: Level::Bytecode,
                function: self.f.name.clone(),
                site,
                location: Location::Pc(pc),
            },
        ));
        Ok(())
    }

    fn check(&mut self, st: &mut State, goal: Formula, site: Site, pc: usize) -> Result<(), VcError> {
        self.emit(&st.hyps, goal.clone(), site, pc)?;
        st.hyps.push(goal);
        Ok(())
    }

    /// Arrival at `st.pc` other than along a back edge: asserts there are
    /// checked, and an invariant ends the path.
    fn arrive(&mut self, mut st: State) -> Result<Option<State>, VcError> {
        let t = &self.f.annotations;
        let at = st.pc;
        for (pc, a) in &t.asserts {
            if *pc == at {
                let g = self.subst_store(a, &st.store, None);
                self.check(&mut st, g, Site::Assert, at)?;
            }
        }
        if let Some(inv) = t.invariants.get(&st.pc) {
            let g = self.subst_store(inv, &st.store, None);
            self.emit(&st.hyps, g, Site::Establishment, st.pc)?;
            return Ok(None);
        }
        Ok(Some(st))
    }

    fn jump(&mut self, mut st: State, from: usize, to: usize, hyp: Option<Formula>, work: &mut Vec<State>) -> Result<(), VcError> {
        st.hyps.extend(hyp);
        st.pc = to;
        if to <= from {
            let inv = &self.f.annotations.invariants[&to];
            let g = self.subst_store(inv, &st.store, None);
            return self.emit(&st.hyps, g, Site::Preservation, from);
        }
        if let Some(s) = self.arrive(st)? {
            work.push(s);
        }
        Ok(())
    }

    fn explore(&mut self, mut work: Vec<State>) -> Result<(), VcError> {
        while let Some(mut st) = work.pop() {
            *self.steps += 1;
            if *self.steps > MAX_STEPS {
                return Err(self.too_large("paths"));
            }
            let pc = st.pc;
            let Some(instr) = self.f.code.get(pc) else {
                return Err(self.err_stack(pc));
            };
            macro_rules! pop_t {
                () => {
                    match st.stack.pop() {
                        Some(Sym::T(t)) => t,
                        _ => return Err(self.err_stack(pc)),
                    }
                };
            }
            macro_rules! pop_f {
                () => {
                    match st.stack.pop() {
                        Some(Sym::F(f)) => f,
                        _ => return Err(self.err_stack(pc)),
                    }
                };
            }
            match instr {
                Instr::Push(n) => st.stack.push(Sym::T(Term::Int(*n))),
                Instr::PushBool(b) => st.stack.push(Sym::F(if *b { Formula::True } else { Formula::False })),
                Instr::Load(s) => {
                    let v = st.store.get(*s).cloned().ok_or_else(|| self.err_stack(pc))?;
                    st.stack.push(v);
                }
                Instr::Store(s) => {
                    let v = st.stack.pop().ok_or_else(|| self.err_stack(pc))?;
                    let size = match &v {
                        Sym::T(t) => t.size(),
                        Sym::F(f) => f.size(),
                    };
                    if size > MAX_TERM_SIZE {
                        return Err(self.too_large("symbolic values"));
                    }
                    *st.store.get_mut(*s).ok_or_else(|| self.err_stack(pc))? = v;
                }
                Instr::Add | Instr::Sub | Instr::Mul | Instr::SUnion | Instr::SInter | Instr::SDiff => {
                    let b = pop_t!();
                    let a = pop_t!();
                    st.stack.push(Sym::T(match instr {
                        Instr::Add => Term::add(a, b),
                        Instr::Sub => Term::sub(a, b),
                        Instr::Mul => Term::mul(a, b),
                        Instr::SUnion => Term::union(a, b),
                        Instr::SInter => Term::inter(a, b),
                        _ => Term::diff(a, b),
                    }));
                }
                Instr::Div | Instr::Mod => {
                    let b = pop_t!();
                    let a = pop_t!();
                    let (g, site) = div_guard(&b);
                    self.check(&mut st, g, site, pc)?;
                    st.stack.push(Sym::T(if *instr == Instr::Div { Term::div(a, b) } else { Term::modulo(a, b) }));
                }
                Instr::Eq => {
                    let b = st.stack.pop().ok_or_else(|| self.err_stack(pc))?;
                    let a = st.stack.pop().ok_or_else(|| self.err_stack(pc))?;
                    let f = sym_eq(a, b).ok_or_else(|| self.err_stack(pc))?;
                    st.stack.push(Sym::F(f));
                }
                Instr::Lt | Instr::Le => {
                    let b = pop_t!();
                    let a = pop_t!();
                    st.stack.push(Sym::F(if *instr == Instr::Lt { Formula::lt(a, b) } else { Formula::le(a, b) }));
                }
                Instr::SMem => {
                    let s = pop_t!();
                    let e = pop_t!();
                    st.stack.push(Sym::F(Formula::mem(e, s)));
                }
                Instr::Not => {
                    let a = pop_f!();
                    st.stack.push(Sym::F(Formula::not(a)));
                }
                Instr::And | Instr::Or => {
                    let b = pop_f!();
                    let a = pop_f!();
                    st.stack.push(Sym::F(if *instr == Instr::And { Formula::and(a, b) } else { Formula::or(a, b) }));
                }
                Instr::NewVec => {
                    let n = pop_t!();
                    let (g, site) = newvec_guard(&n);
                    self.check(&mut st, g, site, pc)?;
                    st.stack.push(Sym::T(Term::newvec(n)));
                }
                Instr::GetIdx => {
                    let i = pop_t!();
                    let v = pop_t!();
                    let (g, site) = index_guard(&v, &i);
                    self.check(&mut st, g, site, pc)?;
                    st.stack.push(Sym::T(Term::idx(v, i)));
                }
                Instr::SetIdx => {
                    let e = pop_t!();
                    let i = pop_t!();
                    let v = pop_t!();
                    let (g, site) = index_guard(&v, &i);
                    self.check(&mut st, g, site, pc)?;
                    st.stack.push(Sym::T(Term::upd(v, i, e)));
                }
                Instr::VLen => {
                    let v = pop_t!();
                    st.stack.push(Sym::T(Term::len(v)));
                }
                Instr::SCard => {
                    let s = pop_t!();
                    st.stack.push(Sym::T(Term::card(s)));
                }
                Instr::NewSet => st.stack.push(Sym::T(Term::EmptySet)),
                Instr::SIns => {
                    let e = pop_t!();
                    let s = pop_t!();
                    st.stack.push(Sym::T(set_insert(s, e)));
                }
                Instr::Read => st.stack.push(Sym::T(Term::int_var(read_var(self.read_ord[&pc])))),
                Instr::Print => {
                    pop_t!();
                }
                Instr::Call(name) => {
                    let callee = self.module.function(name).ok_or_else(|| self.err_stack(pc))?;
                    if st.stack.len() < callee.nparams {
                        return Err(self.err_stack(pc));
                    }
                    let args = st.stack.split_off(st.stack.len() - callee.nparams);
                    let ct = &callee.annotations;
                    let params: Vec<(String, Option<String>)> = (0..callee.nparams)
                        .map(|s| {
                            let ghost = ct.olds.iter().find(|(o, _)| *o == s).map(|(_, g)| g.clone());
                            (ct.vars[&s].0.clone(), ghost)
                        })
                        .collect();
                    let k = self.call_ord[&pc];
                    let result = callee.ret.map(|s| (call_var(k), s));
                    let (pre, post) = instantiate_call(&ct.requires, &ct.ensures, &params, args, result.clone());
                    self.check(&mut st, pre, Site::Precondition, pc)?;
                    st.hyps.push(post);
                    if let Some((n, s)) = result {
                        st.stack.push(Sym::var(&n, s));
                    }
                }
                Instr::Ret => {
                    let r = match self.f.ret {
                        Some(_) => Some(st.stack.pop().ok_or_else(|| self.err_stack(pc))?),
                        None => None,
                    };
                    let g = self.subst_store(&self.f.annotations.ensures, &st.store, r);
                    self.emit(&st.hyps, g, Site::Postcondition, pc)?;
                    continue;
                }
                Instr::Halt => continue,
                Instr::Jmp(to) => {
                    self.jump(st, pc, *to, None, &mut work)?;
                    continue;
                }
                Instr::Jz(to) => {
                    let c = pop_f!();
                    self.jump(st.clone(), pc, *to, Some(Formula::not(c.clone())), &mut work)?;
                    self.jump(st, pc, pc + 1, Some(c), &mut work)?;
                    continue;
                }
            }
            let next = pc + 1;
            self.jump(st, pc, next, None, &mut work)?;
        }
        Ok(())
    }
}
