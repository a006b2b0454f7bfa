// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Canonical text format for terms and formulas.
//!
//! Fully parenthesized prefix notation. Bound variables are printed by
//! nesting depth as `q0`, `q1`, … so alpha-equivalent formulas print the
//! same. Variable sorts are not printed; the reader infers them from
//! position (`idx`/`len`/`upd` arguments are vectors, `mem`/`card`/set
//! operator arguments are sets, `eq` propagates sorts between its sides)
//! and defaults to `int`. The closed form
//! `(closed ((name sort) …) formula)` carries sorts explicitly.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::LogicError;
use crate::formula::{Formula, Sort, Term};
use crate::sexp::{parse_sexp, Sexp};

/// Explicit sorts for free variables, consulted before inference.
pub type SortEnv = BTreeMap<String, Sort>;

fn write_term(t: &Term, bound: &[String], out: &mut String) {
    let bin = |op: &str, x: &Term, y: &Term, out: &mut String| {
        out.push('(');
        out.push_str(op);
        out.push(' ');
        write_term(x, bound, out);
        out.push(' ');
        write_term(y, bound, out);
        out.push(')');
    };
    match t {
        Term::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Term::Var(n, s) => match (*s == Sort::Int)
            .then(|| bound.iter().rposition(|b| b == n))
            .flatten()
        {
            Some(level) => {
                let _ = write!(out, "q{level}");
            }
            None => out.push_str(n),
        },
        Term::Add(x, y) => bin("add", x, y, out),
        Term::Sub(x, y) => bin("sub", x, y, out),
        Term::Mul(x, y) => bin("mul", x, y, out),
        Term::Div(x, y) => bin("div", x, y, out),
        Term::Mod(x, y) => bin("mod", x, y, out),
        Term::Idx(x, y) => bin("idx", x, y, out),
        Term::Union(x, y) => bin("union", x, y, out),
        Term::Inter(x, y) => bin("inter", x, y, out),
        Term::Diff(x, y) => bin("diff", x, y, out),
        Term::Len(x) | Term::NewVec(x) | Term::Card(x) => {
            out.push_str(match t {
                Term::Len(_) => "(len ",
                Term::NewVec(_) => "(newvec ",
                _ => "(card ",
            });
            write_term(x, bound, out);
            out.push(')');
        }
        Term::Upd(v, i, e) => {
            out.push_str("(upd ");
            write_term(v, bound, out);
            out.push(' ');
            write_term(i, bound, out);
            out.push(' ');
            write_term(e, bound, out);
            out.push(')');
        }
        Term::SetLit(es) => {
            out.push_str("(set");
            for e in es {
                out.push(' ');
                write_term(e, bound, out);
            }
            out.push(')');
        }
        Term::EmptySet => out.push_str("(empty)"),
    }
}

fn write_formula(f: &Formula, bound: &mut Vec<String>, out: &mut String) {
    let atom = |op: &str, x: &Term, y: &Term, bound: &[String], out: &mut String| {
        out.push('(');
        out.push_str(op);
        out.push(' ');
        write_term(x, bound, out);
        out.push(' ');
        write_term(y, bound, out);
        out.push(')');
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::BVar(n) => out.push_str(n),
        Formula::Eq(x, y) => atom("eq", x, y, bound, out),
        Formula::Lt(x, y) => atom("lt", x, y, bound, out),
        Formula::Le(x, y) => atom("le", x, y, bound, out),
        Formula::Mem(x, y) => atom("mem", x, y, bound, out),
        Formula::Subset(x, y) => atom("subset", x, y, bound, out),
        Formula::Not(g) => {
            out.push_str("(not ");
            write_formula(g, bound, out);
            out.push(')');
        }
        Formula::And(g, h) | Formula::Or(g, h) | Formula::Imp(g, h) => {
            out.push_str(match f {
                Formula::And(..) => "(and ",
                Formula::Or(..) => "(or ",
                _ => "(imp ",
            });
            write_formula(g, bound, out);
            out.push(' ');
            write_formula(h, bound, out);
            out.push(')');
        }
        Formula::Forall(v, body) => {
            let _ = write!(out, "(forall q{} ", bound.len());
            bound.push(v.clone());
            write_formula(body, bound, out);
            bound.pop();
            out.push(')');
        }
    }
}

/// Canonical text with binders normalized to `q0, q1, …` by depth.
pub fn canonical_text(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut Vec::new(), &mut out);
    out
}

pub fn term_canonical_text(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &[], &mut out);
    out
}

/// `(closed ((x int) (v vec) …) F)`: free variables with sorts, sorted
/// by name, followed by the canonical text of `f`.
pub fn closed_text(f: &Formula) -> String {
    let mut out = String::from("(closed (");
    for (i, (n, s)) in f.free_vars().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({n} {s})");
    }
    out.push_str(") ");
    out.push_str(&canonical_text(f));
    out.push(')');
    out
}

fn syntax(pos: usize, msg: impl Into<String>) -> LogicError {
    LogicError::Syntax {
        pos,
        msg: msg.into(),
    }
}

const FORMULA_KEYWORDS: &[&str] = &[
    "true", "false", "eq", "lt", "le", "ge", "gt", "ne", "mem", "subset", "not", "and", "or",
    "imp", "iff", "forall",
];

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '\\' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '$' | '@' | '.'))
        && !FORMULA_KEYWORDS.contains(&s)
}

/// Sort a term expression is known to have from its head alone.
fn head_sort(s: &Sexp) -> Option<Sort> {
    match s {
        Sexp::Atom(a, _) => a.parse::<i64>().ok().map(|_| Sort::Int),
        Sexp::List(..) => match s.head()?.0 {
            "add" | "sub" | "mul" | "div" | "mod" | "len" | "idx" | "card" => Some(Sort::Int),
            "upd" | "newvec" => Some(Sort::Vec),
            "union" | "inter" | "diff" | "set" | "empty" => Some(Sort::Set),
            _ => None,
        },
    }
}

struct Inference {
    hints: BTreeMap<String, Sort>,
    links: Vec<(String, String)>,
}

impl Inference {
    fn hint(&mut self, s: &Sexp, sort: Sort, bound: &[String]) {
        if let Sexp::Atom(a, _) = s {
            if is_identifier(a) && !bound.contains(a) {
                self.hints.entry(a.clone()).or_insert(sort);
            }
        }
    }

    fn term(&mut self, s: &Sexp, expected: Option<Sort>, bound: &[String]) {
        if let Some(sort) = expected {
            self.hint(s, sort, bound);
        }
        let Some((head, args)) = s.head() else {
            return;
        };
        let arg_sorts: &[Sort] = match head {
            "add" | "sub" | "mul" | "div" | "mod" | "newvec" | "set" => &[Sort::Int; 0],
            "len" => &[Sort::Vec],
            "idx" => &[Sort::Vec, Sort::Int],
            "upd" => &[Sort::Vec, Sort::Int, Sort::Int],
            "card" => &[Sort::Set],
            "union" | "inter" | "diff" => &[Sort::Set, Sort::Set],
            _ => &[],
        };
        for (i, a) in args.iter().enumerate() {
            let sort = arg_sorts.get(i).copied().or(Some(Sort::Int));
            self.term(a, sort, bound);
        }
    }

    fn formula(&mut self, s: &Sexp, bound: &mut Vec<String>) {
        let Some((head, args)) = s.head() else {
            return;
        };
        match head {
            "not" | "and" | "or" | "imp" | "iff" => {
                for a in args {
                    self.formula(a, bound);
                }
            }
            "forall" => {
                if let [Sexp::Atom(v, _), body] = args {
                    bound.push(v.clone());
                    self.formula(body, bound);
                    bound.pop();
                }
            }
            "lt" | "le" | "ge" | "gt" => {
                for a in args {
                    self.term(a, Some(Sort::Int), bound);
                }
            }
            "mem" => {
                if let [x, y] = args {
                    self.term(x, Some(Sort::Int), bound);
                    self.term(y, Some(Sort::Set), bound);
                }
            }
            "subset" => {
                for a in args {
                    self.term(a, Some(Sort::Set), bound);
                }
            }
            "eq" | "ne" => {
                if let [x, y] = args {
                    let sx = head_sort(x);
                    let sy = head_sort(y);
                    let known = sx.or(sy);
                    self.term(x, known, bound);
                    self.term(y, known, bound);
                    if known.is_none() {
                        if let (Sexp::Atom(a, _), Sexp::Atom(c, _)) = (x, y) {
                            if !bound.contains(a) && !bound.contains(c) {
                                self.links.push((a.clone(), c.clone()));
                            }
                        }
                    }
                }
            }
            _ => {}
        }
    }

    fn solve(mut self, env: &SortEnv) -> SortEnv {
        for (n, s) in env {
            self.hints.insert(n.clone(), *s);
        }
        loop {
            let mut changed = false;
            for (a, c) in &self.links {
                match (self.hints.get(a).copied(), self.hints.get(c).copied()) {
                    (Some(s), None) => {
                        self.hints.insert(c.clone(), s);
                        changed = true;
                    }
                    (None, Some(s)) => {
                        self.hints.insert(a.clone(), s);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        self.hints
    }
}

struct Reader<'a> {
    sorts: &'a SortEnv,
}

impl Reader<'_> {
    fn args<'s>(&self, s: &'s Sexp, n: usize) -> Result<&'s [Sexp], LogicError> {
        let (head, args) = s.head().ok_or_else(|| syntax(s.pos(), "expected list"))?;
        if args.len() != n {
            return Err(syntax(
                s.pos(),
                format!("`{head}` takes {n} arguments, found {}", args.len()),
            ));
        }
        Ok(args)
    }

    fn term(&self, s: &Sexp, bound: &[String]) -> Result<Term, LogicError> {
        match s {
            Sexp::Atom(a, pos) => {
                if let Ok(n) = a.parse::<i64>() {
                    return Ok(Term::Int(n));
                }
                if !is_identifier(a) {
                    return Err(syntax(*pos, format!("bad term `{a}`")));
                }
                if bound.contains(a) {
                    return Ok(Term::int_var(a.clone()));
                }
                let sort = self.sorts.get(a).copied().unwrap_or(Sort::Int);
                if sort == Sort::Bool {
                    return Err(syntax(*pos, format!("boolean `{a}` used as a term")));
                }
                Ok(Term::Var(a.clone(), sort))
            }
            Sexp::List(..) => {
                let (head, args) = s
                    .head()
                    .ok_or_else(|| syntax(s.pos(), "expected operator"))?;
                let t = |i: usize| self.term(&args[i], bound);
                let two = |ctor: fn(Term, Term) -> Term| -> Result<Term, LogicError> {
                    self.args(s, 2)?;
                    Ok(ctor(t(0)?, t(1)?))
                };
                match head {
                    "add" => two(Term::add),
                    "sub" => two(Term::sub),
                    "mul" => two(Term::mul),
                    "div" => two(Term::div),
                    "mod" => two(Term::modulo),
                    "idx" => two(Term::idx),
                    "union" => two(Term::union),
                    "inter" => two(Term::inter),
                    "diff" => two(Term::diff),
                    "len" | "newvec" | "card" => {
                        self.args(s, 1)?;
                        let x = t(0)?;
                        Ok(match head {
                            "len" => Term::len(x),
                            "newvec" => Term::newvec(x),
                            _ => Term::card(x),
                        })
                    }
                    "upd" => {
                        self.args(s, 3)?;
                        Ok(Term::upd(t(0)?, t(1)?, t(2)?))
                    }
                    "set" => Ok(Term::SetLit(
                        (0..args.len()).map(t).collect::<Result<_, _>>()?,
                    )),
                    "empty" => {
                        self.args(s, 0)?;
                        Ok(Term::EmptySet)
                    }
                    other => Err(syntax(s.pos(), format!("unknown term operator `{other}`"))),
                }
            }
        }
    }

    fn formula(&self, s: &Sexp, bound: &mut Vec<String>) -> Result<Formula, LogicError> {
        match s {
            Sexp::Atom(a, pos) => match a.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                _ if is_identifier(a) && !bound.contains(a) => {
                    match self.sorts.get(a) {
                        None | Some(Sort::Bool) => Ok(Formula::BVar(a.clone())),
                        Some(other) => Err(syntax(
                            *pos,
                            format!("`{a}` of sort {other} used as a formula"),
                        )),
                    }
                }
                _ => Err(syntax(*pos, format!("bad formula `{a}`"))),
            },
            Sexp::List(..) => {
                let (head, args) = s
                    .head()
                    .ok_or_else(|| syntax(s.pos(), "expected connective"))?;
                let atom = |ctor: fn(Term, Term) -> Formula,
                            swap: bool|
                 -> Result<Formula, LogicError> {
                    self.args(s, 2)?;
                    let x = self.term(&args[0], bound)?;
                    let y = self.term(&args[1], bound)?;
                    Ok(if swap { ctor(y, x) } else { ctor(x, y) })
                };
                let f = match head {
                    "eq" => atom(Formula::Eq, false)?,
                    "lt" => atom(Formula::Lt, false)?,
                    "le" => atom(Formula::Le, false)?,
                    "gt" => atom(Formula::Lt, true)?,
                    "ge" => atom(Formula::Le, true)?,
                    "ne" => Formula::not(atom(Formula::Eq, false)?),
                    "mem" => atom(Formula::Mem, false)?,
                    "subset" => atom(Formula::Subset, false)?,
                    "not" => {
                        self.args(s, 1)?;
                        Formula::not(self.formula(&args[0], bound)?)
                    }
                    "and" | "or" => {
                        if args.len() < 2 {
                            return Err(syntax(s.pos(), format!("`{head}` needs two operands")));
                        }
                        let parts = args
                            .iter()
                            .map(|a| self.formula(a, bound))
                            .collect::<Result<Vec<_>, _>>()?;
                        if head == "and" {
                            Formula::and_all(parts)
                        } else {
                            Formula::or_all(parts)
                        }
                    }
                    "imp" | "iff" => {
                        self.args(s, 2)?;
                        let g = self.formula(&args[0], bound)?;
                        let h = self.formula(&args[1], bound)?;
                        if head == "imp" {
                            Formula::imp(g, h)
                        } else {
                            Formula::iff(g, h)
                        }
                    }
                    "forall" => {
                        self.args(s, 2)?;
                        let v = args[0]
                            .as_atom()
                            .filter(|v| is_identifier(v))
                            .ok_or_else(|| syntax(args[0].pos(), "expected binder name"))?;
                        bound.push(v.to_string());
                        let body = self.formula(&args[1], bound);
                        bound.pop();
                        Formula::forall(v, body?)
                    }
                    other => {
                        return Err(syntax(s.pos(), format!("unknown connective `{other}`")))
                    }
                };
                f.check_sorts()?;
                Ok(f)
            }
        }
    }
}

/// Converts an s-expression to a formula, inferring sorts not in `env`.
pub fn formula_from_sexp(s: &Sexp, env: &SortEnv) -> Result<Formula, LogicError> {
    let mut inf = Inference {
        hints: BTreeMap::new(),
        links: Vec::new(),
    };
    inf.formula(s, &mut Vec::new());
    let sorts = inf.solve(env);
    Reader { sorts: &sorts }.formula(s, &mut Vec::new())
}

/// Converts an s-expression to a term. `bound` lists integer variables
/// in scope as binders.
pub fn term_from_sexp(s: &Sexp, env: &SortEnv, bound: &[String]) -> Result<Term, LogicError> {
    let mut inf = Inference {
        hints: BTreeMap::new(),
        links: Vec::new(),
    };
    inf.term(s, None, bound);
    let sorts = inf.solve(env);
    let t = Reader { sorts: &sorts }.term(s, bound)?;
    t.sort()?;
    Ok(t)
}

fn parse_decls(s: &Sexp) -> Result<SortEnv, LogicError> {
    let items = s
        .as_list()
        .ok_or_else(|| syntax(s.pos(), "expected declaration list"))?;
    let mut env = SortEnv::new();
    for d in items {
        match d.as_list() {
            Some([Sexp::Atom(n, _), Sexp::Atom(sort, p)]) if is_identifier(n) => {
                let sort = sort
                    .parse::<Sort>()
                    .map_err(|_| syntax(*p, format!("unknown sort `{sort}`")))?;
                if env.insert(n.clone(), sort).is_some() {
                    return Err(syntax(d.pos(), format!("duplicate declaration of `{n}`")));
                }
            }
            _ => return Err(syntax(d.pos(), "expected (name sort)")),
        }
    }
    Ok(env)
}

/// Parses either plain canonical text or the closed form.
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    parse_closed(text).map(|(_, f)| f)
}

/// Parses the closed form, returning declared sorts with the formula. Plain
/// canonical text is accepted too and yields the inferred sorts.
pub fn parse_closed(text: &str) -> Result<(SortEnv, Formula), LogicError> {
    let s = parse_sexp(text).map_err(|e| syntax(e.pos, e.msg))?;
    if let Some(("closed", args)) = s.head() {
        let [decls, body] = args else {
            return Err(syntax(s.pos(), "closed form takes declarations and a body"));
        };
        let env = parse_decls(decls)?;
        let f = formula_from_sexp(body, &env)?;
        for (n, sort) in f.free_vars() {
            if env.get(&n) != Some(&sort) {
                return Err(syntax(s.pos(), format!("free variable `{n}` not declared")));
            }
        }
        return Ok((env, f));
    }
    let f = formula_from_sexp(&s, &SortEnv::new())?;
    Ok((f.free_vars(), f))
}

pub fn parse_term(text: &str) -> Result<Term, LogicError> {
    let s = parse_sexp(text).map_err(|e| syntax(e.pos, e.msg))?;
    term_from_sexp(&s, &SortEnv::new(), &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_atom() {
        let f = Formula::le(Term::int_var("x"), Term::Int(5));
        assert_eq!(canonical_text(&f), "(le x 5)");
    }

    #[test]
    fn binders_are_normalized() {
        let f = Formula::forall("i", Formula::eq(Term::int_var("i"), Term::int_var("i")));
        assert_eq!(canonical_text(&f), "(forall q0 (eq q0 q0))");
    }

    #[test]
    fn sorts_are_inferred_from_position() {
        let f = parse_formula("(forall i (imp (lt i (len v)) (mem (idx v i) s)))").unwrap();
        let fv = f.free_vars();
        assert_eq!(fv["v"], Sort::Vec);
        assert_eq!(fv["s"], Sort::Set);
        let g = parse_formula("(and (eq a b) (eq (card a) 1))").unwrap();
        assert_eq!(g.free_vars()["b"], Sort::Set);
    }

    #[test]
    fn closed_form_round_trips() {
        let f = Formula::eq(Term::var("v", Sort::Vec), Term::var("w", Sort::Vec));
        let text = closed_text(&f);
        assert_eq!(text, "(closed ((v vec) (w vec)) (eq v w))");
        assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn sugar_is_desugared() {
        let f = parse_formula("(ge x 1)").unwrap();
        assert_eq!(f, Formula::le(Term::Int(1), Term::int_var("x")));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_formula("(le x)").is_err());
        assert!(parse_formula("(frob x y)").is_err());
        assert!(parse_formula("(mem x 3)").is_err());
        assert!(parse_formula("(closed ((x int)) (le x y))").is_err());
    }
}
