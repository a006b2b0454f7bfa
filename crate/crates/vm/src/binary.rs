// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Binary module encoding; the layout is specified in `docs/formats.md`.
//!
//! Integers are little-endian 64-bit (`u64`/`i64`), strings are a `u64`
//! byte length followed by UTF-8, and formulas are strings holding their
//! canonical text.

use lissom_logic::{canonical_text, formula_from_sexp, parse_sexp, Formula, Sort, SortEnv};

use crate::error::{Location, MalformedModule};
use crate::isa::Instr;
use crate::module::{AnnotationTable, BytecodeFunction, BytecodeModule};

pub const MAGIC: &[u8; 4] = b"LBC1";

fn sort_code(s: Option<Sort>) -> u8 {
    match s {
        None => 0,
        Some(Sort::Int) => 1,
        Some(Sort::Bool) => 2,
        Some(Sort::Set) => 3,
        Some(Sort::Vec) => 4,
    }
}

fn sort_of(code: u8) -> Option<Option<Sort>> {
    Some(match code {
        0 => None,
        1 => Some(Sort::Int),
        2 => Some(Sort::Bool),
        3 => Some(Sort::Set),
        4 => Some(Sort::Vec),
        _ => return None,
    })
}

fn opcode(i: &Instr) -> u8 {
    use Instr::*;
    match i {
        Push(_) => 0,
        PushBool(_) => 1,
        Load(_) => 2,
        Store(_) => 3,
        Add => 4,
        Sub => 5,
        Mul => 6,
        Div => 7,
        Mod => 8,
        Eq => 9,
        Lt => 10,
        Le => 11,
        Not => 12,
        And => 13,
        Or => 14,
        Jmp(_) => 15,
        Jz(_) => 16,
        NewVec => 17,
        GetIdx => 18,
        SetIdx => 19,
        VLen => 20,
        NewSet => 21,
        SIns => 22,
        SUnion => 23,
        SInter => 24,
        SDiff => 25,
        SMem => 26,
        SCard => 27,
        Call(_) => 28,
        Ret => 29,
        Read => 30,
        Print => 31,
        Halt => 32,
    }
}

const PLAIN: &[Instr] = &[
    Instr::Add,
    Instr::Sub,
    Instr::Mul,
    Instr::Div,
    Instr::Mod,
    Instr::Eq,
    Instr::Lt,
    Instr::Le,
    Instr::Not,
    Instr::And,
    Instr::Or,
    Instr::NewVec,
    Instr::GetIdx,
    Instr::SetIdx,
    Instr::VLen,
    Instr::NewSet,
    Instr::SIns,
    Instr::SUnion,
    Instr::SInter,
    Instr::SDiff,
    Instr::SMem,
    Instr::SCard,
    Instr::Ret,
    Instr::Read,
    Instr::Print,
    Instr::Halt,
];

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, b: u8) {
        self.0.push(b);
    }
    fn u64(&mut self, n: u64) {
        self.0.extend_from_slice(&n.to_le_bytes());
    }
    fn usize(&mut self, n: usize) {
        self.u64(n as u64);
    }
    fn str(&mut self, s: &str) {
        self.usize(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }
    fn formula(&mut self, f: &Formula) {
        self.str(&canonical_text(f));
    }
}

/// Encodes a module; equal modules encode to equal bytes.
pub fn encode_module(m: &BytecodeModule) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.usize(m.functions.len());
    for f in &m.functions {
        w.str(&f.name);
        w.usize(f.nparams);
        w.usize(f.nslots);
        w.u8(sort_code(f.ret));
        let t = &f.annotations;
        w.usize(t.vars.len());
        for (slot, (name, sort)) in &t.vars {
            w.usize(*slot);
            w.str(name);
            w.u8(sort_code(Some(*sort)));
        }
        w.usize(t.olds.len());
        for (slot, ghost) in &t.olds {
            w.usize(*slot);
            w.str(ghost);
        }
        w.formula(&t.requires);
        w.formula(&t.ensures);
        w.usize(t.invariants.len());
        for (pc, inv) in &t.invariants {
            w.usize(*pc);
            w.formula(inv);
        }
        w.usize(t.asserts.len());
        for (pc, a) in &t.asserts {
            w.usize(*pc);
            w.formula(a);
        }
        w.usize(f.code.len());
        for i in &f.code {
            w.u8(opcode(i));
            match i {
                Instr::Push(n) => w.u64(*n as u64),
                Instr::PushBool(b) => w.u8(*b as u8),
                Instr::Load(s) | Instr::Store(s) | Instr::Jmp(s) | Instr::Jz(s) => w.usize(*s),
                Instr::Call(name) => w.str(name),
                _ => {}
            }
        }
    }
    w.0
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

type R<T> = Result<T, MalformedModule>;

impl Reader<'_> {
    fn err(&self, reason: impl Into<String>) -> MalformedModule {
        MalformedModule::new(reason).at(Location::Byte(self.pos))
    }

    fn take(&mut self, n: usize) -> R<&[u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(self.err("unexpected end of data"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> R<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> R<u64> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    /// A count or index; must fit the remaining input when it sizes a
    /// collection, which bounds allocation on hostile input.
    fn usize(&mut self) -> R<usize> {
        let n = self.u64()?;
        usize::try_from(n).map_err(|_| self.err("integer out of range"))
    }

    fn count(&mut self, min_item: usize) -> R<usize> {
        let n = self.usize()?;
        if n.saturating_mul(min_item) > self.bytes.len() - self.pos {
            return Err(self.err(format!("count {n} exceeds the remaining data")));
        }
        Ok(n)
    }

    fn str(&mut self) -> R<String> {
        let n = self.count(1)?;
        let b = self.take(n)?;
        String::from_utf8(b.to_vec()).map_err(|_| self.err("invalid UTF-8"))
    }

    fn sort(&mut self) -> R<Option<Sort>> {
        let c = self.u8()?;
        sort_of(c).ok_or_else(|| self.err(format!("bad sort code {c}")))
    }

    fn formula(&mut self, env: &SortEnv) -> R<Formula> {
        let text = self.str()?;
        let s = parse_sexp(&text).map_err(|e| self.err(e.to_string()))?;
        let f = formula_from_sexp(&s, env).map_err(|e| self.err(e.to_string()))?;
        f.check_sorts().map_err(|e| self.err(e.to_string()))?;
        Ok(f)
    }

    fn instr(&mut self) -> R<Instr> {
        let op = self.u8()?;
        Ok(match op {
            0 => Instr::Push(self.u64()? as i64),
            1 => match self.u8()? {
                0 => Instr::PushBool(false),
                1 => Instr::PushBool(true),
                b => return Err(self.err(format!("bad boolean {b}"))),
            },
            2 => Instr::Load(self.usize()?),
            3 => Instr::Store(self.usize()?),
            15 => Instr::Jmp(self.usize()?),
            16 => Instr::Jz(self.usize()?),
            28 => Instr::Call(self.str()?),
            n => PLAIN
                .iter()
                .find(|i| opcode(i) == n)
                .cloned()
                .ok_or_else(|| self.err(format!("bad opcode {n}")))?,
        })
    }

    fn function(&mut self) -> R<BytecodeFunction> {
        let name = self.str()?;
        let nparams = self.usize()?;
        let nslots = self.usize()?;
        let ret = self.sort()?;
        let mut t = AnnotationTable::default();
        for _ in 0..self.count(17)? {
            let slot = self.usize()?;
            let n = self.str()?;
            let s = self
                .sort()?
                .ok_or_else(|| self.err("slot without a sort"))?;
            if t.vars.insert(slot, (n, s)).is_some() {
                return Err(self.err(format!("slot {slot} declared twice")));
            }
        }
        for _ in 0..self.count(16)? {
            let slot = self.usize()?;
            t.olds.push((slot, self.str()?));
        }
        let env = t.sort_env(ret);
        t.requires = self.formula(&env)?;
        t.ensures = self.formula(&env)?;
        for _ in 0..self.count(16)? {
            let pc = self.usize()?;
            let f = self.formula(&env)?;
            if t.invariants.insert(pc, f).is_some() {
                return Err(self.err(format!("second invariant at pc {pc}")));
            }
        }
        for _ in 0..self.count(16)? {
            let pc = self.usize()?;
            t.asserts.push((pc, self.formula(&env)?));
        }
        let n = self.count(1)?;
        let code = (0..n).map(|_| self.instr()).collect::<R<_>>()?;
        Ok(BytecodeFunction {
            name,
            nparams,
            nslots,
            ret,
            code,
            annotations: t,
        })
    }
}

/// Decodes a module without checking well-formedness. Total on
/// arbitrary bytes.
pub fn decode_module(bytes: &[u8]) -> Result<BytecodeModule, MalformedModule> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(MalformedModule::new("bad magic").at(Location::Byte(0)));
    }
    let n = r.count(8)?;
    let functions = (0..n).map(|_| r.function()).collect::<R<_>>()?;
    if r.pos != bytes.len() {
        return Err(r.err("trailing bytes"));
    }
    Ok(BytecodeModule { functions })
}
