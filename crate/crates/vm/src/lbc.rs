// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! The `.lbc` textual assembly.
//!
//! ```text
//! .func max 2 3 int
//! #var 0 a_s0 int
//! #var 1 b_s1 int
//! #var 2 r_s2 int
//! #requires true
//! #ensures (and (le a_s0 \result) (le b_s1 \result))
//!   LOAD 0
//!   STORE 2
//!   ...
//! loop:
//!   LOAD 2; RET
//! .end
//! ```
//!
//! Instructions go one per line or `;`-separated; `label:` may prefix an
//! instruction or stand alone. `//` starts a comment. Pragmas:
//! `#requires F`, `#ensures F`, `#invariant <label> F`,
//! `#var <slot> <name> <sort>`, `#old <slot> <ghost>` and
//! `#assert <pc> F`, with formulas in canonical text. A file without any
//! `.func` is a single parameterless function `main` returning nothing,
//! with the slots its `#var` lines declare and `HALT` appended when its
//! last instruction would fall through.

use std::collections::BTreeMap;
use std::fmt::Write;

use lissom_logic::{canonical_text, formula_from_sexp, parse_sexp, Formula, Sort};

use crate::error::{Location, MalformedModule};
use crate::isa::Instr;
use crate::module::{AnnotationTable, BytecodeFunction, BytecodeModule};

fn ret_name(r: Option<Sort>) -> String {
    r.map_or_else(|| "void".to_string(), |s| s.to_string())
}

fn parse_ret(s: &str) -> Option<Option<Sort>> {
    match s {
        "void" => Some(None),
        other => other.parse::<Sort>().ok().map(Some),
    }
}

enum Operand {
    None,
    Label(String),
}

struct Draft {
    name: String,
    nparams: usize,
    nslots: usize,
    ret: Option<Sort>,
    line: usize,
    code: Vec<(Instr, Operand, usize)>,
    labels: BTreeMap<String, usize>,
    requires: Option<(String, usize)>,
    ensures: Option<(String, usize)>,
    invariants: Vec<(String, String, usize)>,
    vars: BTreeMap<usize, (String, Sort)>,
    olds: Vec<(usize, String)>,
    asserts: Vec<(usize, String, usize)>,
}

impl Draft {
    fn new(name: String, nparams: usize, nslots: usize, ret: Option<Sort>, line: usize) -> Self {
        Draft {
            name,
            nparams,
            nslots,
            ret,
            line,
            code: Vec::new(),
            labels: BTreeMap::new(),
            requires: None,
            ensures: None,
            invariants: Vec::new(),
            vars: BTreeMap::new(),
            olds: Vec::new(),
            asserts: Vec::new(),
        }
    }

    fn err(&self, line: usize, reason: impl Into<String>) -> MalformedModule {
        MalformedModule::new(reason)
            .in_function(&self.name)
            .at(Location::Line(line))
    }

    fn finish(self) -> Result<BytecodeFunction, MalformedModule> {
        let resolve = |label: &str, line: usize| {
            self.labels
                .get(label)
                .copied()
                .ok_or_else(|| self.err(line, format!("undefined label `{label}`")))
        };
        let mut code = Vec::with_capacity(self.code.len());
        for (instr, op, line) in &self.code {
            code.push(match (instr, op) {
                (Instr::Jmp(_), Operand::Label(l)) => Instr::Jmp(resolve(l, *line)?),
                (Instr::Jz(_), Operand::Label(l)) => Instr::Jz(resolve(l, *line)?),
                (i, _) => i.clone(),
            });
        }
        let mut table = AnnotationTable {
            vars: self.vars.clone(),
            olds: self.olds.clone(),
            ..AnnotationTable::default()
        };
        let env = table.sort_env(self.ret);
        let formula = |text: &str, line: usize| -> Result<Formula, MalformedModule> {
            let s = parse_sexp(text).map_err(|e| self.err(line, e.to_string()))?;
            let f = formula_from_sexp(&s, &env).map_err(|e| self.err(line, e.to_string()))?;
            f.check_sorts().map_err(|e| self.err(line, e.to_string()))?;
            Ok(f)
        };
        if let Some((t, l)) = &self.requires {
            table.requires = formula(t, *l)?;
        }
        if let Some((t, l)) = &self.ensures {
            table.ensures = formula(t, *l)?;
        }
        for (label, t, l) in &self.invariants {
            let pc = resolve(label, *l)?;
            if table.invariants.insert(pc, formula(t, *l)?).is_some() {
                return Err(self.err(*l, format!("second invariant at `{label}`")));
            }
        }
        for (pc, t, l) in &self.asserts {
            table.asserts.push((*pc, formula(t, *l)?));
        }
        Ok(BytecodeFunction {
            name: self.name,
            nparams: self.nparams,
            nslots: self.nslots,
            ret: self.ret,
            code,
            annotations: table,
        })
    }
}

fn number(tok: Option<&str>, what: &str, line: usize) -> Result<usize, MalformedModule> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| MalformedModule::new(format!("expected {what}")).at(Location::Line(line)))
}

fn is_label(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_instr(text: &str, line: usize) -> Result<(Instr, Operand), MalformedModule> {
    let bad = |m: String| MalformedModule::new(m).at(Location::Line(line));
    let mut parts = text.split_whitespace();
    let op = parts.next().unwrap_or_default();
    let arg = parts.next();
    if let Some(extra) = parts.next() {
        return Err(bad(format!("unexpected `{extra}` after `{op}`")));
    }
    let operand = arg.ok_or_else(|| bad(format!("`{op}` needs an operand")));
    let out = match op {
        "PUSH" => match operand? {
            "true" => (Instr::PushBool(true), Operand::None),
            "false" => (Instr::PushBool(false), Operand::None),
            n => (
                Instr::Push(n.parse().map_err(|_| bad(format!("bad literal `{n}`")))?),
                Operand::None,
            ),
        },
        "LOAD" | "STORE" => {
            let a = operand?;
            let s: usize = a.parse().map_err(|_| bad(format!("bad slot `{a}`")))?;
            let i = if op == "LOAD" { Instr::Load(s) } else { Instr::Store(s) };
            (i, Operand::None)
        }
        "JMP" | "JZ" => {
            let l = operand?;
            if !is_label(l) {
                return Err(bad(format!("bad label `{l}`")));
            }
            let i = if op == "JMP" { Instr::Jmp(0) } else { Instr::Jz(0) };
            (i, Operand::Label(l.to_string()))
        }
        "CALL" => (Instr::Call(operand?.to_string()), Operand::None),
        m => match Instr::from_mnemonic(m) {
            Some(i) => {
                if let Some(a) = arg {
                    return Err(bad(format!("`{m}` takes no operand, found `{a}`")));
                }
                (i, Operand::None)
            }
            None => return Err(bad(format!("unknown instruction `{m}`"))),
        },
    };
    Ok(out)
}

/// Parses `.lbc` text without checking well-formedness.
pub fn parse_lbc(text: &str) -> Result<BytecodeModule, MalformedModule> {
    let mut functions = Vec::new();
    let mut current: Option<Draft> = None;
    let mut implicit = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split("//").next().unwrap_or_default().trim();
        if content.is_empty() {
            continue;
        }
        let at = |m: String| MalformedModule::new(m).at(Location::Line(line));
        if let Some(rest) = content.strip_prefix(".func") {
            if current.is_some() {
                return Err(at("`.func` inside a function".into()));
            }
            if implicit {
                return Err(at("`.func` after top-level instructions".into()));
            }
            let mut p = rest.split_whitespace();
            let name = p.next().ok_or_else(|| at("`.func` needs a name".into()))?;
            let nparams = number(p.next(), "parameter count", line)?;
            let nslots = number(p.next(), "slot count", line)?;
            let ret = p
                .next()
                .and_then(parse_ret)
                .ok_or_else(|| at("expected a return sort".into()))?;
            if nparams > nslots {
                return Err(at("more parameters than slots".into()));
            }
            current = Some(Draft::new(name.to_string(), nparams, nslots, ret, line));
            continue;
        }
        if content == ".end" {
            let d = current.take().ok_or_else(|| at("`.end` outside a function".into()))?;
            functions.push(d.finish()?);
            continue;
        }
        if current.is_none() {
            if !functions.is_empty() {
                return Err(at("text outside `.func`".into()));
            }
            implicit = true;
            current = Some(Draft::new("main".into(), 0, 0, None, line));
        }
        let d = current.as_mut().expect("function open");
        if let Some(p) = content.strip_prefix('#') {
            let (kw, rest) = p.split_once(char::is_whitespace).unwrap_or((p, ""));
            let rest = rest.trim();
            match kw {
                "requires" => d.requires = Some((rest.to_string(), line)),
                "ensures" => d.ensures = Some((rest.to_string(), line)),
                "invariant" => {
                    let (label, f) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| at("`#invariant` needs a label and a formula".into()))?;
                    d.invariants.push((label.to_string(), f.trim().to_string(), line));
                }
                "var" => {
                    let mut p = rest.split_whitespace();
                    let slot = number(p.next(), "slot", line)?;
                    let name = p.next().ok_or_else(|| at("`#var` needs a name".into()))?;
                    let sort = p
                        .next()
                        .and_then(|s| s.parse::<Sort>().ok())
                        .ok_or_else(|| at("`#var` needs a sort".into()))?;
                    if d.vars.insert(slot, (name.to_string(), sort)).is_some() {
                        return Err(at(format!("slot {slot} declared twice")));
                    }
                }
                "old" => {
                    let mut p = rest.split_whitespace();
                    let slot = number(p.next(), "slot", line)?;
                    let ghost = p.next().ok_or_else(|| at("`#old` needs a ghost name".into()))?;
                    d.olds.push((slot, ghost.to_string()));
                }
                "assert" => {
                    let (pc, f) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| at("`#assert` needs a pc and a formula".into()))?;
                    let pc = number(Some(pc), "pc", line)?;
                    d.asserts.push((pc, f.trim().to_string(), line));
                }
                other => return Err(at(format!("unknown pragma `#{other}`"))),
            }
            continue;
        }
        for piece in content.split(';') {
            let mut piece = piece.trim();
            while let Some((label, rest)) = piece.split_once(':') {
                let label = label.trim();
                if !is_label(label) {
                    break;
                }
                if d.labels.insert(label.to_string(), d.code.len()).is_some() {
                    return Err(at(format!("label `{label}` defined twice")));
                }
                piece = rest.trim();
            }
            if piece.is_empty() {
                continue;
            }
            let (instr, op) = parse_instr(piece, line)?;
            d.code.push((instr, op, line));
        }
    }
    match current {
        Some(mut d) if implicit => {
            d.nslots = d.vars.keys().next_back().map_or(0, |s| s + 1);
            if d.code.last().is_none_or(|(i, _, _)| i.falls_through()) {
                d.code.push((Instr::Halt, Operand::None, d.line));
            }
            functions.push(d.finish()?)
        }
        Some(d) => {
            return Err(MalformedModule::new("missing `.end`")
                .in_function(&d.name)
                .at(Location::Line(d.line)))
        }
        None => {}
    }
    Ok(BytecodeModule { functions })
}

/// Prints a module in `.lbc` form; labels are `L<pc>`.
pub fn print_lbc(m: &BytecodeModule) -> String {
    let mut out = String::new();
    for f in &m.functions {
        let _ = writeln!(
            out,
            ".func {} {} {} {}",
            f.name,
            f.nparams,
            f.nslots,
            ret_name(f.ret)
        );
        let t = &f.annotations;
        for (slot, (name, sort)) in &t.vars {
            let _ = writeln!(out, "#var {slot} {name} {sort}");
        }
        for (slot, ghost) in &t.olds {
            let _ = writeln!(out, "#old {slot} {ghost}");
        }
        let _ = writeln!(out, "#requires {}", canonical_text(&t.requires));
        let _ = writeln!(out, "#ensures {}", canonical_text(&t.ensures));
        for (pc, inv) in &t.invariants {
            let _ = writeln!(out, "#invariant L{pc} {}", canonical_text(inv));
        }
        for (pc, a) in &t.asserts {
            let _ = writeln!(out, "#assert {pc} {}", canonical_text(a));
        }
        let mut labelled: Vec<usize> = f.code.iter().filter_map(Instr::jump_target).collect();
        labelled.extend(t.invariants.keys());
        labelled.sort_unstable();
        labelled.dedup();
        for (pc, instr) in f.code.iter().enumerate() {
            if labelled.binary_search(&pc).is_ok() {
                let _ = writeln!(out, "L{pc}:");
            }
            let _ = writeln!(out, "  {instr}");
        }
        for pc in labelled.iter().filter(|&&pc| pc >= f.code.len()) {
            let _ = writeln!(out, "L{pc}:");
        }
        out.push_str(".end\n");
    }
    out
}
