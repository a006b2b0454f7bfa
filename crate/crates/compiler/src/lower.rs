// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lowering. Expressions go to postorder code; control flow uses these
//! shapes, with no optimization:
//!
//! ```text
//! if c S1 else S2:  c; JZ else; S1; JMP end; else: S2; JMP end; end:
//! while c inv I S:  head: c; JZ exit; S; JMP head; exit:
//! ```
//!
//! The else branch ends in its own jump so that the pc after a branch
//! differs from the pc after the whole `if`; an assertion at either
//! place keeps its own program point.

use std::ops::Range;

use lissom_lang::{BinOp, Expr, ExprKind, Pos, Stmt, StmtKind, TypedFunction, TypedProgram};
use lissom_logic::Formula;
use lissom_vm::{AnnotationTable, BytecodeFunction, BytecodeModule, Instr};

use crate::varmap::{ghost_name, slot_name, translate_formula, VarMap};

/// Where each statement went.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LoweringTrace {
    pub functions: Vec<FunctionTrace>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FunctionTrace {
    pub name: String,
    /// Every statement, in source preorder; `path` indexes into nested
    /// bodies (then-block before else-block).
    pub statements: Vec<StmtRange>,
    /// Loop head pc of each `while`, by statement path.
    pub loop_heads: Vec<(Vec<usize>, usize)>,
    /// The trailing `RET` of a function without a final `return`.
    pub epilogue: Range<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StmtRange {
    pub path: Vec<usize>,
    pub pos: Pos,
    pub range: Range<usize>,
}

pub fn compile(p: &TypedProgram) -> (BytecodeModule, LoweringTrace) {
    let mut trace = LoweringTrace::default();
    let functions = p
        .functions
        .iter()
        .map(|f| {
            let (bf, ft) = compile_function(f);
            trace.functions.push(ft);
            bf
        })
        .collect();
    (BytecodeModule { functions }, trace)
}

fn translate(f: &Formula, vm: &VarMap) -> Formula {
    translate_formula(f, vm).unwrap_or_else(|e| panic!("compiler bug: {e}"))
}

struct Gen<'a> {
    vm: &'a VarMap,
    code: Vec<Instr>,
    table: AnnotationTable,
    trace: FunctionTrace,
}

fn compile_function(f: &TypedFunction) -> (BytecodeFunction, FunctionTrace) {
    let vm = VarMap::of(f);
    let mut table = AnnotationTable::default();
    let all = f
        .decl
        .params
        .iter()
        .map(|p| (p.name.clone(), p.ty))
        .chain(f.locals.iter().cloned());
    for (k, (x, t)) in all.enumerate() {
        table.vars.insert(k, (slot_name(&x, k), t.sort()));
    }
    for x in &f.olds {
        let k = vm.slots[x];
        table.olds.push((k, ghost_name(x, k)));
    }
    table.requires = translate(&f.requires, &vm);
    table.ensures = translate(&f.ensures, &vm);
    let mut g = Gen {
        vm: &vm,
        code: Vec::new(),
        table,
        trace: FunctionTrace {
            name: f.decl.name.clone(),
            ..FunctionTrace::default()
        },
    };
    g.block(&f.decl.body, &[]);
    let start = g.code.len();
    if !matches!(f.decl.body.last().map(|s| &s.kind), Some(StmtKind::Return(_))) {
        g.code.push(Instr::Ret);
    }
    g.trace.epilogue = start..g.code.len();
    let bf = BytecodeFunction {
        name: f.decl.name.clone(),
        nparams: f.decl.params.len(),
        nslots: vm.slots.len(),
        ret: f.decl.ret.map(|t| t.sort()),
        code: g.code,
        annotations: g.table,
    };
    (bf, g.trace)
}

impl Gen<'_> {
    fn pc(&self) -> usize {
        self.code.len()
    }

    fn emit(&mut self, i: Instr) -> usize {
        self.code.push(i);
        self.code.len() - 1
    }

    fn patch(&mut self, at: usize, target: usize) {
        match &mut self.code[at] {
            Instr::Jmp(t) | Instr::Jz(t) => *t = target,
            i => panic!("compiler bug: patching {i}"),
        }
    }

    fn slot(&self, x: &str) -> usize {
        self.vm.slots[x]
    }

    fn block(&mut self, body: &[Stmt], path: &[usize]) {
        for (i, s) in body.iter().enumerate() {
            let mut p = path.to_vec();
            p.push(i);
            self.stmt(s, p);
        }
    }

    fn stmt(&mut self, s: &Stmt, path: Vec<usize>) {
        let start = self.pc();
        let entry = self.trace.statements.len();
        self.trace.statements.push(StmtRange {
            path: path.clone(),
            pos: s.pos,
            range: start..start,
        });
        match &s.kind {
            StmtKind::VarDecl(x, _, e) | StmtKind::Assign(x, e) => {
                self.expr(e);
                self.emit(Instr::Store(self.slot(x)));
            }
            StmtKind::VecStore(x, i, e) => {
                self.emit(Instr::Load(self.slot(x)));
                self.expr(i);
                self.expr(e);
                self.emit(Instr::SetIdx);
                self.emit(Instr::Store(self.slot(x)));
            }
            StmtKind::If(c, t, e) => {
                self.expr(c);
                let jz = self.emit(Instr::Jz(0));
                self.block(t, &[path.as_slice(), &[0]].concat());
                let j1 = self.emit(Instr::Jmp(0));
                self.patch(jz, self.pc());
                self.block(e, &[path.as_slice(), &[1]].concat());
                let j2 = self.emit(Instr::Jmp(0));
                self.patch(j1, self.pc());
                self.patch(j2, self.pc());
            }
            StmtKind::While(c, inv, body) => {
                let head = self.pc();
                let inv = lissom_lang::annotation_formula(inv);
                self.table.invariants.insert(head, translate(&inv, self.vm));
                self.trace.loop_heads.push((path.clone(), head));
                self.expr(c);
                let jz = self.emit(Instr::Jz(0));
                self.block(body, &path);
                self.emit(Instr::Jmp(head));
                self.patch(jz, self.pc());
            }
            StmtKind::Assert(f) => {
                let f = lissom_lang::annotation_formula(f);
                let a = translate(&f, self.vm);
                self.table.asserts.push((self.pc(), a));
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
                self.emit(Instr::Ret);
            }
            StmtKind::Print(e) => {
                self.expr(e);
                self.emit(Instr::Print);
            }
            StmtKind::Call(f, args) => {
                args.iter().for_each(|a| self.expr(a));
                self.emit(Instr::Call(f.clone()));
            }
        }
        self.trace.statements[entry].range = start..self.pc();
    }

    fn expr(&mut self, e: &Expr) {
        use ExprKind::*;
        match &e.kind {
            Int(n) => {
                self.emit(Instr::Push(*n));
            }
            Bool(b) => {
                self.emit(Instr::PushBool(*b));
            }
            Var(x) => {
                self.emit(Instr::Load(self.slot(x)));
            }
            Not(a) => {
                self.expr(a);
                self.emit(Instr::Not);
            }
            Binary(op, a, b) => {
                self.expr(a);
                self.expr(b);
                self.emit(match op {
                    BinOp::Add => Instr::Add,
                    BinOp::Sub => Instr::Sub,
                    BinOp::Mul => Instr::Mul,
                    BinOp::Div => Instr::Div,
                    BinOp::Mod => Instr::Mod,
                    BinOp::Eq => Instr::Eq,
                    BinOp::Lt => Instr::Lt,
                    BinOp::Le => Instr::Le,
                    BinOp::And => Instr::And,
                    BinOp::Or => Instr::Or,
                    BinOp::In => Instr::SMem,
                    BinOp::Union => Instr::SUnion,
                    BinOp::Inter => Instr::SInter,
                    BinOp::Diff => Instr::SDiff,
                    BinOp::Subset | BinOp::Implies | BinOp::Iff => {
                        panic!("compiler bug: annotation operator in code")
                    }
                });
            }
            SetLit(es) => {
                self.emit(Instr::NewSet);
                for x in es {
                    self.expr(x);
                    self.emit(Instr::SIns);
                }
            }
            Index(v, i) => {
                self.expr(v);
                self.expr(i);
                self.emit(Instr::GetIdx);
            }
            Len(v) => {
                self.expr(v);
                self.emit(Instr::VLen);
            }
            Card(s) => {
                self.expr(s);
                self.emit(Instr::SCard);
            }
            NewVec(n) => {
                self.expr(n);
                self.emit(Instr::NewVec);
            }
            Read => {
                self.emit(Instr::Read);
            }
            Call(f, args) => {
                args.iter().for_each(|a| self.expr(a));
                self.emit(Instr::Call(f.clone()));
            }
            Result | Old(_) | Forall(..) => panic!("compiler bug: annotation expression in code"),
        }
    }
}
