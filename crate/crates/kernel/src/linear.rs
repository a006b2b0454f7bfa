// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Integer linear arithmetic with Farkas certificates.
//!
//! Integer terms normalize to polynomials whose monomials are sorted
//! lists of atoms. Variables are atoms; so are `div`, `mod`, `len`, `idx`
//! and `card` applications, keyed by their text with integer arguments
//! themselves normalized. Nonlinear monomials are treated as opaque.
//!
//! A constraint `p ≤ 0` has integer coefficients, so strict comparisons
//! tighten to `p + 1 ≤ 0`. A combination `Σ λᵢ pᵢ` with `λᵢ ≥ 0` proves
//! the goal `g ≤ 0` when its non-constant part equals that of `g` and
//! `⌊-c⌋ ≤ -g₀`, where `c` is the combination's constant and `g₀` that
//! of the goal. The rounding is sound because the non-constant part of
//! `g` only takes integer values.

use std::collections::BTreeMap;

use lissom_logic::{Formula, Sort, Term};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Monomial = Vec<String>;

/// Polynomial with rational coefficients; zero coefficients are never
/// stored, and the empty monomial is the constant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly(pub BTreeMap<Monomial, BigRational>);

impl Poly {
    pub fn constant(c: impl Into<BigInt>) -> Self {
        let mut p = Poly::default();
        p.add_term(Vec::new(), BigRational::from_integer(c.into()));
        p
    }

    pub fn atom(key: String) -> Self {
        let mut p = Poly::default();
        p.add_term(vec![key], BigRational::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.add_scaled(other, &BigRational::one())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add_scaled(other, &-BigRational::one())
    }

    pub fn add_scaled(&self, other: &Poly, k: &BigRational) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        Poly::default().add_scaled(self, k)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                let mut m = m1.clone();
                m.extend(m2.iter().cloned());
                m.sort();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn constant_part(&self) -> BigRational {
        self.0.get(&Vec::new()).cloned().unwrap_or_else(BigRational::zero)
    }

    /// The polynomial without its constant.
    pub fn linear_part(&self) -> Poly {
        let mut p = self.clone();
        p.0.remove(&Vec::new());
        p
    }

    pub fn is_constant(&self) -> bool {
        self.0.keys().all(|m| m.is_empty())
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.0.get(m).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// Key under which a non-arithmetic term is an atom.
pub fn atom_key(t: &Term) -> String {
    match t {
        Term::Var(n, _) => n.clone(),
        _ => {
            let mut out = String::new();
            write_key(t, &mut out);
            out
        }
    }
}

fn write_key(t: &Term, out: &mut String) {
    let arithmetic = matches!(
        t,
        Term::Int(_) | Term::Add(..) | Term::Sub(..) | Term::Mul(..)
    );
    if arithmetic {
        out.push_str(&poly_key(&normalize(t)));
        return;
    }
    let head = match t {
        Term::Var(n, _) => {
            out.push_str(n);
            return;
        }
        Term::EmptySet => {
            out.push_str("(empty)");
            return;
        }
        Term::Div(..) => "div",
        Term::Mod(..) => "mod",
        Term::Len(_) => "len",
        Term::Idx(..) => "idx",
        Term::Upd(..) => "upd",
        Term::NewVec(_) => "newvec",
        Term::Card(_) => "card",
        Term::Union(..) => "union",
        Term::Inter(..) => "inter",
        Term::Diff(..) => "diff",
        Term::SetLit(_) => "set",
        _ => unreachable!(),
    };
    out.push('(');
    out.push_str(head);
    for c in t.children() {
        out.push(' ');
        write_key(c, out);
    }
    out.push(')');
}

fn poly_key(p: &Poly) -> String {
    if p.0.is_empty() {
        return "0".into();
    }
    if p.0.len() == 1 {
        if let Some((m, c)) = p.0.iter().next() {
            if m.is_empty() {
                return c.to_string();
            }
            if m.len() == 1 && c.is_one() {
                return m[0].clone();
            }
        }
    }
    let mut out = String::from("(poly");
    for (m, c) in &p.0 {
        out.push_str(&format!(" ({c}"));
        for a in m {
            out.push(' ');
            out.push_str(a);
        }
        out.push(')');
    }
    out.push(')');
    out
}

/// Normal form of an integer term.
pub fn normalize(t: &Term) -> Poly {
    match t {
        Term::Int(n) => Poly::constant(*n),
        Term::Add(a, b) => normalize(a).add(&normalize(b)),
        Term::Sub(a, b) => normalize(a).sub(&normalize(b)),
        Term::Mul(a, b) => normalize(a).mul(&normalize(b)),
        _ => Poly::atom(atom_key(t)),
    }
}

fn is_int(t: &Term) -> bool {
    matches!(t.sort(), Ok(Sort::Int))
}

/// Constraints `p ≤ 0` equivalent to a premise, or `None` when the
/// formula has no linear reading.
pub fn premise_constraints(f: &Formula) -> Option<Vec<Poly>> {
    let one = Poly::constant(1);
    Some(match f {
        Formula::False => vec![one],
        Formula::Le(a, b) if is_int(a) && is_int(b) => vec![normalize(a).sub(&normalize(b))],
        Formula::Lt(a, b) if is_int(a) && is_int(b) => {
            vec![normalize(a).sub(&normalize(b)).add(&one)]
        }
        Formula::Eq(a, b) if is_int(a) && is_int(b) => {
            let d = normalize(a).sub(&normalize(b));
            vec![d.clone(), d.scale(&-BigRational::one())]
        }
        Formula::Not(g) => match g.as_ref() {
            Formula::Le(a, b) if is_int(a) && is_int(b) => {
                vec![normalize(b).sub(&normalize(a)).add(&one)]
            }
            Formula::Lt(a, b) if is_int(a) && is_int(b) => vec![normalize(b).sub(&normalize(a))],
            _ => return None,
        },
        _ => return None,
    })
}

/// Constraints `g ≤ 0` that together establish a goal.
pub fn goal_constraints(f: &Formula) -> Option<Vec<Poly>> {
    match f {
        Formula::False => Some(vec![Poly::constant(1)]),
        Formula::Le(..) | Formula::Lt(..) | Formula::Eq(..) | Formula::Not(_) => {
            premise_constraints(f)
        }
        _ => None,
    }
}

/// Why a Farkas combination fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FarkasError {
    NegativeCoefficient(usize),
    CoefficientCount { expected: usize, found: usize },
    Mismatch { goal: usize, monomial: String },
    Constant { goal: usize },
}

impl std::fmt::Display for FarkasError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FarkasError::NegativeCoefficient(i) => write!(f, "coefficient {i} is negative"),
            FarkasError::CoefficientCount { expected, found } => {
                write!(f, "expected {expected} coefficients, found {found}")
            }
            FarkasError::Mismatch { goal, monomial } => write!(
                f,
                "Farkas combination mismatch on `{monomial}` for goal constraint {goal}"
            ),
            FarkasError::Constant { goal } => {
                write!(f, "Farkas combination too weak for goal constraint {goal}")
            }
        }
    }
}

/// Checks `coeffs` against premises and goals; each goal constraint
/// consumes one block of `premises.len()` coefficients.
pub fn check_farkas(
    premises: &[Poly],
    goals: &[Poly],
    coeffs: &[BigRational],
) -> Result<(), FarkasError> {
    let n = premises.len();
    if coeffs.len() != n * goals.len() {
        return Err(FarkasError::CoefficientCount {
            expected: n * goals.len(),
            found: coeffs.len(),
        });
    }
    if let Some(i) = coeffs.iter().position(|c| c.is_negative()) {
        return Err(FarkasError::NegativeCoefficient(i));
    }
    for (gi, g) in goals.iter().enumerate() {
        let mut sum = Poly::default();
        for (p, k) in premises.iter().zip(&coeffs[gi * n..(gi + 1) * n]) {
            sum = sum.add_scaled(p, k);
        }
        let diff = sum.linear_part().sub(&g.linear_part());
        if let Some(m) = diff.0.keys().next() {
            return Err(FarkasError::Mismatch {
                goal: gi,
                monomial: m.join("*"),
            });
        }
        let bound = (-sum.constant_part()).floor();
        if bound > -g.constant_part() {
            return Err(FarkasError::Constant { goal: gi });
        }
    }
    Ok(())
}
