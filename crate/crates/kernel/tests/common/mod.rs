// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use lissom_kernel::axioms::catalog;
use lissom_kernel::Certificate;
use lissom_logic::{Formula, Sort, Term};
use num_rational::BigRational;
use rand::Rng;

const INT_VARS: &[&str] = &["x", "y", "z"];

pub fn int_term(rng: &mut impl Rng, depth: u32) -> Term {
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.6) {
            Term::int_var(INT_VARS[rng.gen_range(0..INT_VARS.len())])
        } else {
            Term::Int(rng.gen_range(-2..=3))
        };
    }
    let a = int_term(rng, depth - 1);
    match rng.gen_range(0..8) {
        0 | 1 => Term::add(a, int_term(rng, depth - 1)),
        2 | 3 => Term::sub(a, int_term(rng, depth - 1)),
        4 => Term::mul(Term::Int(rng.gen_range(-2..=2)), a),
        5 => Term::div(a, int_term(rng, depth - 1)),
        6 => Term::card(Term::var("A", Sort::Set)),
        _ => Term::modulo(a, int_term(rng, depth - 1)),
    }
}

pub fn atom(rng: &mut impl Rng) -> Formula {
    let (a, b) = (int_term(rng, 2), int_term(rng, 2));
    match rng.gen_range(0..6) {
        0 | 1 => Formula::le(a, b),
        2 | 3 => Formula::lt(a, b),
        4 => Formula::eq(a, b),
        _ => Formula::mem(a, Term::var("A", Sort::Set)),
    }
}

pub fn formula(rng: &mut impl Rng, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..12) {
            0 => Formula::True,
            1 => Formula::False,
            _ => atom(rng),
        };
    }
    match rng.gen_range(0..6) {
        0 => Formula::not(formula(rng, depth - 1)),
        1 => Formula::and(formula(rng, depth - 1), formula(rng, depth - 1)),
        2 => Formula::or(formula(rng, depth - 1), formula(rng, depth - 1)),
        3 | 4 => Formula::imp(formula(rng, depth - 1), formula(rng, depth - 1)),
        _ => Formula::forall("x", formula(rng, depth - 1)),
    }
}

/// Subformulas, used to make random certificates plausible.
pub fn subformulas(f: &Formula, out: &mut Vec<Formula>) {
    out.push(f.clone());
    match f {
        Formula::Not(g) | Formula::Forall(_, g) => subformulas(g, out),
        Formula::And(g, h) | Formula::Or(g, h) | Formula::Imp(g, h) => {
            subformulas(g, out);
            subformulas(h, out);
        }
        _ => {}
    }
}

fn pick_formula(rng: &mut impl Rng, pool: &[Formula]) -> Formula {
    if !pool.is_empty() && rng.gen_bool(0.7) {
        pool[rng.gen_range(0..pool.len())].clone()
    } else {
        formula(rng, 2)
    }
}

fn subterms(pool: &[Formula]) -> Vec<Term> {
    let mut out = Vec::new();
    for f in pool {
        f.for_each_atom_term(&mut |t| t.for_each_subterm(&mut |s| out.push(s.clone())));
    }
    out
}

fn pick_term(rng: &mut impl Rng, pool: &[Formula]) -> Term {
    let ts = subterms(pool);
    if !ts.is_empty() && rng.gen_bool(0.7) {
        ts[rng.gen_range(0..ts.len())].clone()
    } else {
        int_term(rng, 2)
    }
}

/// A random certificate tree whose formulas and terms are mostly drawn
/// from `pool`.
pub fn certificate(rng: &mut impl Rng, pool: &[Formula], depth: u32) -> Certificate {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..5) {
            0 | 1 => Certificate::Hyp(rng.gen_range(0..4)),
            2 => Certificate::Refl(pick_term(rng, pool)),
            3 => Certificate::Eval(pick_formula(rng, pool)),
            _ => {
                let schemas = catalog();
                let s = &schemas[rng.gen_range(0..schemas.len())];
                let inst = s
                    .metavars
                    .iter()
                    .map(|(m, sort)| {
                        let t = match sort {
                            Sort::Int => pick_term(rng, pool),
                            Sort::Set => Term::var("A", Sort::Set),
                            Sort::Vec => Term::var("v", Sort::Vec),
                            Sort::Bool => unreachable!(),
                        };
                        (m.to_string(), t)
                    })
                    .collect();
                Certificate::Axiom(s.id.to_string(), inst)
            }
        };
    }
    let sub = |rng: &mut _| certificate(rng, pool, depth - 1);
    match rng.gen_range(0..16) {
        0 => Certificate::and_i(sub(rng), sub(rng)),
        1 => Certificate::and_e1(sub(rng)),
        2 => Certificate::and_e2(sub(rng)),
        3 => Certificate::or_i1(sub(rng), pick_formula(rng, pool)),
        4 => Certificate::or_i2(sub(rng), pick_formula(rng, pool)),
        5 => Certificate::or_e(sub(rng), sub(rng), sub(rng)),
        6 => Certificate::imp_i(pick_formula(rng, pool), sub(rng)),
        7 => Certificate::imp_e(sub(rng), sub(rng)),
        8 => Certificate::not_i(pick_formula(rng, pool), sub(rng)),
        9 => Certificate::contra(sub(rng)),
        10 => Certificate::forall_i(["x", "y", "k"][rng.gen_range(0..3)], sub(rng)),
        11 => Certificate::forall_e(sub(rng), pick_term(rng, pool)),
        12 => {
            let n = rng.gen_range(1..3);
            Certificate::rewrite(sub(rng), sub(rng), (0..n).collect())
        }
        _ => {
            let n = rng.gen_range(1..4);
            let premises = (0..n).map(|_| sub(rng)).collect();
            let slots = rng.gen_range(n..=2 * n + 1);
            let coeffs = (0..slots)
                .map(|_| BigRational::new(rng.gen_range(0..4).into(), rng.gen_range(1..3).into()))
                .collect();
            Certificate::Lia(coeffs, premises)
        }
    }
}

/// Wraps a random body in the introduction rules matching the goal's
/// shape, so the fuzzer reaches the leaves instead of failing at the root.
pub fn shaped_certificate(rng: &mut impl Rng, goal: &Formula, pool: &[Formula]) -> Certificate {
    match goal {
        Formula::Imp(a, b) if rng.gen_bool(0.8) => {
            Certificate::imp_i((**a).clone(), shaped_certificate(rng, b, pool))
        }
        Formula::Not(a) if rng.gen_bool(0.8) => {
            Certificate::not_i((**a).clone(), certificate(rng, pool, 3))
        }
        Formula::And(a, b) if rng.gen_bool(0.8) => Certificate::and_i(
            shaped_certificate(rng, a, pool),
            shaped_certificate(rng, b, pool),
        ),
        Formula::Forall(v, body) if rng.gen_bool(0.8) => {
            Certificate::forall_i(v.clone(), shaped_certificate(rng, body, pool))
        }
        _ => certificate(rng, pool, 3),
    }
}
