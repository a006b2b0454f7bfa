// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Certificate trees and their text format.
//!
//! ```text
//! (hyp N)                     (andI C C)   (andE1 C)   (andE2 C)
//! (orI1 C F)   (orI2 C F)     (orE C C C)
//! (impI F C)   (impE C C)     (notI F C)   (contra C)
//! (forallI x C)               (forallE C T)
//! (refl T)                    (rewrite C C (P ...))
//! (eval F)                    (lia (Q ...) C ...)
//! (axiom ID ((x T) ...))
//! ```
//!
//! `F` and `T` are formulas and terms in canonical text, `N` and `P` are
//! non-negative integers and `Q` non-negative rationals written `n` or
//! `n/d`.

use std::fmt::{self, Write};

use lissom_logic::{
    canonical_text, formula_from_sexp, parse_sexp, term_canonical_text, term_from_sexp, Formula,
    Sexp, SortEnv, Term,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Hypothesis by position in the context, outermost first.
    Hyp(usize),
    AndI(Box<Certificate>, Box<Certificate>),
    AndE1(Box<Certificate>),
    AndE2(Box<Certificate>),
    /// Left disjunct proven; the formula is the right disjunct.
    OrI1(Box<Certificate>, Formula),
    /// Right disjunct proven; the formula is the left disjunct.
    OrI2(Box<Certificate>, Formula),
    /// Disjunction, then the goal under each disjunct.
    OrE(Box<Certificate>, Box<Certificate>, Box<Certificate>),
    ImpI(Formula, Box<Certificate>),
    ImpE(Box<Certificate>, Box<Certificate>),
    /// Derives `¬f` from a derivation of `false` under `f`.
    NotI(Formula, Box<Certificate>),
    /// Derives `f` from a derivation of `¬¬f`.
    Contra(Box<Certificate>),
    ForallI(String, Box<Certificate>),
    ForallE(Box<Certificate>, Term),
    Refl(Term),
    /// Equation `l = r`, target, and which occurrences of `l` to replace.
    Rewrite(Box<Certificate>, Box<Certificate>, Vec<usize>),
    Eval(Formula),
    /// Farkas coefficients and premises.
    Lia(Vec<BigRational>, Vec<Certificate>),
    Axiom(String, Vec<(String, Term)>),
}

fn bx(c: Certificate) -> Box<Certificate> {
    Box::new(c)
}

impl Certificate {
    pub fn and_i(a: Certificate, b: Certificate) -> Self {
        Certificate::AndI(bx(a), bx(b))
    }
    pub fn and_e1(c: Certificate) -> Self {
        Certificate::AndE1(bx(c))
    }
    pub fn and_e2(c: Certificate) -> Self {
        Certificate::AndE2(bx(c))
    }
    pub fn or_i1(c: Certificate, right: Formula) -> Self {
        Certificate::OrI1(bx(c), right)
    }
    pub fn or_i2(c: Certificate, left: Formula) -> Self {
        Certificate::OrI2(bx(c), left)
    }
    pub fn or_e(c: Certificate, l: Certificate, r: Certificate) -> Self {
        Certificate::OrE(bx(c), bx(l), bx(r))
    }
    pub fn imp_i(f: Formula, c: Certificate) -> Self {
        Certificate::ImpI(f, bx(c))
    }
    pub fn imp_e(c: Certificate, arg: Certificate) -> Self {
        Certificate::ImpE(bx(c), bx(arg))
    }
    pub fn not_i(f: Formula, c: Certificate) -> Self {
        Certificate::NotI(f, bx(c))
    }
    pub fn contra(c: Certificate) -> Self {
        Certificate::Contra(bx(c))
    }
    pub fn forall_i(x: impl Into<String>, c: Certificate) -> Self {
        Certificate::ForallI(x.into(), bx(c))
    }
    pub fn forall_e(c: Certificate, t: Term) -> Self {
        Certificate::ForallE(bx(c), t)
    }
    pub fn rewrite(eq: Certificate, target: Certificate, positions: Vec<usize>) -> Self {
        Certificate::Rewrite(bx(eq), bx(target), positions)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        use Certificate::*;
        1 + match self {
            Hyp(_) | Refl(_) | Eval(_) | Axiom(..) => 0,
            AndE1(c) | AndE2(c) | OrI1(c, _) | OrI2(c, _) | ImpI(_, c) | NotI(_, c)
            | Contra(c) | ForallI(_, c) | ForallE(c, _) => c.size(),
            AndI(a, b) | ImpE(a, b) | Rewrite(a, b, _) => a.size() + b.size(),
            OrE(a, b, c) => a.size() + b.size() + c.size(),
            Lia(_, ps) => ps.iter().map(|p| p.size()).sum(),
        }
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        use Certificate::*;
        1 + match self {
            Hyp(_) | Refl(_) | Eval(_) | Axiom(..) => 0,
            AndE1(c) | AndE2(c) | OrI1(c, _) | OrI2(c, _) | ImpI(_, c) | NotI(_, c)
            | Contra(c) | ForallI(_, c) | ForallE(c, _) => c.depth(),
            AndI(a, b) | ImpE(a, b) | Rewrite(a, b, _) => a.depth().max(b.depth()),
            OrE(a, b, c) => a.depth().max(b.depth()).max(c.depth()),
            Lia(_, ps) => ps.iter().map(|p| p.depth()).max().unwrap_or(0),
        }
    }

    fn write(&self, out: &mut String) {
        use Certificate::*;
        let child = |name: &str, cs: &[&Certificate], out: &mut String| {
            out.push('(');
            out.push_str(name);
            for c in cs {
                out.push(' ');
                c.write(out);
            }
            out.push(')');
        };
        match self {
            Hyp(i) => {
                let _ = write!(out, "(hyp {i})");
            }
            AndI(a, b) => child("andI", &[a, b], out),
            AndE1(c) => child("andE1", &[c], out),
            AndE2(c) => child("andE2", &[c], out),
            OrI1(c, f) | OrI2(c, f) => {
                out.push_str(if matches!(self, OrI1(..)) {
                    "(orI1 "
                } else {
                    "(orI2 "
                });
                c.write(out);
                out.push(' ');
                out.push_str(&canonical_text(f));
                out.push(')');
            }
            OrE(a, b, c) => child("orE", &[a, b, c], out),
            ImpI(f, c) | NotI(f, c) => {
                out.push_str(if matches!(self, ImpI(..)) {
                    "(impI "
                } else {
                    "(notI "
                });
                out.push_str(&canonical_text(f));
                out.push(' ');
                c.write(out);
                out.push(')');
            }
            ImpE(a, b) => child("impE", &[a, b], out),
            Contra(c) => child("contra", &[c], out),
            ForallI(x, c) => {
                let _ = write!(out, "(forallI {x} ");
                c.write(out);
                out.push(')');
            }
            ForallE(c, t) => {
                out.push_str("(forallE ");
                c.write(out);
                out.push(' ');
                out.push_str(&term_canonical_text(t));
                out.push(')');
            }
            Refl(t) => {
                let _ = write!(out, "(refl {})", term_canonical_text(t));
            }
            Rewrite(e, c, ps) => {
                out.push_str("(rewrite ");
                e.write(out);
                out.push(' ');
                c.write(out);
                out.push_str(" (");
                let ps: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                out.push_str(&ps.join(" "));
                out.push_str("))");
            }
            Eval(f) => {
                let _ = write!(out, "(eval {})", canonical_text(f));
            }
            Lia(coeffs, ps) => {
                out.push_str("(lia (");
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                out.push_str(&cs.join(" "));
                out.push(')');
                for p in ps {
                    out.push(' ');
                    p.write(out);
                }
                out.push(')');
            }
            Axiom(id, inst) => {
                let _ = write!(out, "(axiom {id} (");
                for (i, (m, t)) in inst.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "({m} {})", term_canonical_text(t));
                }
                out.push_str("))");
            }
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate syntax error at byte {pos}: {msg}")]
pub struct CertSyntaxError {
    pub pos: usize,
    pub msg: String,
}

fn err(pos: usize, msg: impl Into<String>) -> CertSyntaxError {
    CertSyntaxError {
        pos,
        msg: msg.into(),
    }
}

struct Reader<'a> {
    env: &'a SortEnv,
}

impl Reader<'_> {
    fn formula(&self, s: &Sexp) -> Result<Formula, CertSyntaxError> {
        formula_from_sexp(s, self.env).map_err(|e| err(s.pos(), e.to_string()))
    }

    fn term(&self, s: &Sexp) -> Result<Term, CertSyntaxError> {
        term_from_sexp(s, self.env, &[]).map_err(|e| err(s.pos(), e.to_string()))
    }

    fn index(s: &Sexp) -> Result<usize, CertSyntaxError> {
        s.as_atom()
            .and_then(|a| a.parse::<usize>().ok())
            .ok_or_else(|| err(s.pos(), "expected a non-negative integer"))
    }

    fn rational(s: &Sexp) -> Result<BigRational, CertSyntaxError> {
        let a = s
            .as_atom()
            .ok_or_else(|| err(s.pos(), "expected a rational"))?;
        let (num, den) = match a.split_once('/') {
            Some((n, d)) => (n, d),
            None => (a, "1"),
        };
        let parse = |t: &str| {
            t.parse::<BigInt>()
                .map_err(|_| err(s.pos(), format!("bad rational `{a}`")))
        };
        let (n, d) = (parse(num)?, parse(den)?);
        if d.is_zero() || d.is_negative() {
            return Err(err(s.pos(), format!("bad denominator in `{a}`")));
        }
        Ok(BigRational::new(n, d))
    }

    fn cert(&self, s: &Sexp) -> Result<Certificate, CertSyntaxError> {
        use Certificate::*;
        let (head, args) = s
            .head()
            .ok_or_else(|| err(s.pos(), "expected a rule application"))?;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(err(
                    s.pos(),
                    format!("`{head}` takes {n} arguments, found {}", args.len()),
                ))
            }
        };
        let sub = |i: usize| self.cert(&args[i]).map(bx);
        Ok(match head {
            "hyp" => {
                arity(1)?;
                Hyp(Self::index(&args[0])?)
            }
            "andI" => {
                arity(2)?;
                AndI(sub(0)?, sub(1)?)
            }
            "andE1" => {
                arity(1)?;
                AndE1(sub(0)?)
            }
            "andE2" => {
                arity(1)?;
                AndE2(sub(0)?)
            }
            "orI1" => {
                arity(2)?;
                OrI1(sub(0)?, self.formula(&args[1])?)
            }
            "orI2" => {
                arity(2)?;
                OrI2(sub(0)?, self.formula(&args[1])?)
            }
            "orE" => {
                arity(3)?;
                OrE(sub(0)?, sub(1)?, sub(2)?)
            }
            "impI" => {
                arity(2)?;
                ImpI(self.formula(&args[0])?, sub(1)?)
            }
            "impE" => {
                arity(2)?;
                ImpE(sub(0)?, sub(1)?)
            }
            "notI" => {
                arity(2)?;
                NotI(self.formula(&args[0])?, sub(1)?)
            }
            "contra" => {
                arity(1)?;
                Contra(sub(0)?)
            }
            "forallI" => {
                arity(2)?;
                let x = args[0]
                    .as_atom()
                    .ok_or_else(|| err(args[0].pos(), "expected a variable"))?;
                ForallI(x.to_string(), sub(1)?)
            }
            "forallE" => {
                arity(2)?;
                ForallE(sub(0)?, self.term(&args[1])?)
            }
            "refl" => {
                arity(1)?;
                Refl(self.term(&args[0])?)
            }
            "rewrite" => {
                arity(3)?;
                let ps = args[2]
                    .as_list()
                    .ok_or_else(|| err(args[2].pos(), "expected a position list"))?
                    .iter()
                    .map(Self::index)
                    .collect::<Result<_, _>>()?;
                Rewrite(sub(0)?, sub(1)?, ps)
            }
            "eval" => {
                arity(1)?;
                Eval(self.formula(&args[0])?)
            }
            "lia" => {
                let (coeffs, premises) = args
                    .split_first()
                    .ok_or_else(|| err(s.pos(), "lia needs a coefficient list"))?;
                let coeffs = coeffs
                    .as_list()
                    .ok_or_else(|| err(coeffs.pos(), "expected a coefficient list"))?
                    .iter()
                    .map(Self::rational)
                    .collect::<Result<_, _>>()?;
                let premises = premises
                    .iter()
                    .map(|p| self.cert(p))
                    .collect::<Result<_, _>>()?;
                Lia(coeffs, premises)
            }
            "axiom" => {
                arity(2)?;
                let id = args[0]
                    .as_atom()
                    .ok_or_else(|| err(args[0].pos(), "expected a schema id"))?;
                let inst = args[1]
                    .as_list()
                    .ok_or_else(|| err(args[1].pos(), "expected an instantiation list"))?
                    .iter()
                    .map(|pair| match pair.as_list() {
                        Some([Sexp::Atom(m, _), t]) => Ok((m.clone(), self.term(t)?)),
                        _ => Err(err(pair.pos(), "expected (metavariable term)")),
                    })
                    .collect::<Result<_, _>>()?;
                Axiom(id.to_string(), inst)
            }
            other => return Err(err(s.pos(), format!("unknown rule `{other}`"))),
        })
    }
}

/// Parses a certificate, inferring variable sorts from context.
pub fn parse_certificate(text: &str) -> Result<Certificate, CertSyntaxError> {
    parse_certificate_with(text, &SortEnv::new())
}

/// Parses a certificate with known sorts for free variables (typically
/// those of the goal it will be checked against).
pub fn parse_certificate_with(text: &str, env: &SortEnv) -> Result<Certificate, CertSyntaxError> {
    let s = parse_sexp(text).map_err(|e| err(e.pos, e.msg))?;
    Reader { env }.cert(&s)
}
