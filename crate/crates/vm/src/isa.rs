// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Instruction set.
//!
//! Stack effects, top of stack rightmost:
//!
//! | opcode | before | after |
//! |---|---|---|
//! | `PUSH n` / `PUSH true` | | int / bool |
//! | `LOAD s` | | value of slot `s` |
//! | `STORE s` | `x` | (slot `s` := `x`) |
//! | `ADD SUB MUL DIV MOD` | int `a`, int `b` | int `a op b` |
//! | `EQ` | `a`, `b` of one sort | bool |
//! | `LT LE` | int, int | bool |
//! | `NOT` | bool | bool |
//! | `AND OR` | bool, bool | bool |
//! | `JMP l` | | |
//! | `JZ l` | bool | (jumps when false) |
//! | `NEWVEC` | int `n` | zero vector of length `n` |
//! | `GETIDX` | vec `v`, int `i` | int `v[i]` |
//! | `SETIDX` | vec `v`, int `i`, int `e` | vec `v` with `v[i] = e` |
//! | `VLEN` | vec | int |
//! | `NEWSET` | | empty set |
//! | `SINS` | set `s`, int `e` | set `s ∪ {e}` |
//! | `SUNION SINTER SDIFF` | set, set | set |
//! | `SMEM` | int `e`, set `s` | bool `e ∈ s` |
//! | `SCARD` | set | int |
//! | `CALL f` | arguments of `f` in order | result of `f`, if any |
//! | `RET` | result, if any | |
//! | `READ` | | next input |
//! | `PRINT` | int | |
//! | `HALT` | | |
//!
//! `DIV` and `MOD` are Euclidean: the remainder is never negative.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    Push(i64),
    PushBool(bool),
    Load(usize),
    Store(usize),
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Lt,
    Le,
    Not,
    And,
    Or,
    Jmp(usize),
    Jz(usize),
    NewVec,
    GetIdx,
    SetIdx,
    VLen,
    NewSet,
    SIns,
    SUnion,
    SInter,
    SDiff,
    SMem,
    SCard,
    Call(String),
    Ret,
    Read,
    Print,
    Halt,
}

impl Instr {
    /// Mnemonic for operand-free instructions, and the operand kind for
    /// the rest.
    pub fn mnemonic(&self) -> &'static str {
        use Instr::*;
        match self {
            Push(_) | PushBool(_) => "PUSH",
            Load(_) => "LOAD",
            Store(_) => "STORE",
            Add => "ADD",
            Sub => "SUB",
            Mul => "MUL",
            Div => "DIV",
            Mod => "MOD",
            Eq => "EQ",
            Lt => "LT",
            Le => "LE",
            Not => "NOT",
            And => "AND",
            Or => "OR",
            Jmp(_) => "JMP",
            Jz(_) => "JZ",
            NewVec => "NEWVEC",
            GetIdx => "GETIDX",
            SetIdx => "SETIDX",
            VLen => "VLEN",
            NewSet => "NEWSET",
            SIns => "SINS",
            SUnion => "SUNION",
            SInter => "SINTER",
            SDiff => "SDIFF",
            SMem => "SMEM",
            SCard => "SCARD",
            Call(_) => "CALL",
            Ret => "RET",
            Read => "READ",
            Print => "PRINT",
            Halt => "HALT",
        }
    }

    pub fn from_mnemonic(m: &str) -> Option<Instr> {
        use Instr::*;
        Some(match m {
            "ADD" => Add,
            "SUB" => Sub,
            "MUL" => Mul,
            "DIV" => Div,
            "MOD" => Mod,
            "EQ" => Eq,
            "LT" => Lt,
            "LE" => Le,
            "NOT" => Not,
            "AND" => And,
            "OR" => Or,
            "NEWVEC" => NewVec,
            "GETIDX" => GetIdx,
            "SETIDX" => SetIdx,
            "VLEN" => VLen,
            "NEWSET" => NewSet,
            "SINS" => SIns,
            "SUNION" => SUnion,
            "SINTER" => SInter,
            "SDIFF" => SDiff,
            "SMEM" => SMem,
            "SCARD" => SCard,
            "RET" => Ret,
            "READ" => Read,
            "PRINT" => Print,
            "HALT" => Halt,
            _ => return None,
        })
    }

    pub fn jump_target(&self) -> Option<usize> {
        match self {
            Instr::Jmp(t) | Instr::Jz(t) => Some(*t),
            _ => None,
        }
    }

    /// Whether control can continue at the next instruction.
    pub fn falls_through(&self) -> bool {
        !matches!(self, Instr::Jmp(_) | Instr::Ret | Instr::Halt)
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Push(n) => write!(f, "PUSH {n}"),
            Instr::PushBool(b) => write!(f, "PUSH {b}"),
            Instr::Load(s) => write!(f, "LOAD {s}"),
            Instr::Store(s) => write!(f, "STORE {s}"),
            Instr::Jmp(t) => write!(f, "JMP L{t}"),
            Instr::Jz(t) => write!(f, "JZ L{t}"),
            Instr::Call(n) => write!(f, "CALL {n}"),
            other => f.write_str(other.mnemonic()),
        }
    }
}
