// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Farkas multipliers by Fourier–Motzkin elimination.
//!
//! Every derived row remembers the non-negative combination of input
//! rows it came from, so an infeasible constant row directly yields the
//! multipliers the kernel's `lia` rule expects.

use std::collections::{BTreeMap, BTreeSet};

use lissom_kernel::linear::{Monomial, Poly};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Rows kept per elimination step before giving up.
const MAX_ROWS: usize = 4000;

#[derive(Clone)]
struct Row {
    p: Poly,
    combo: Vec<BigRational>,
}

fn scaled(r: &Row, k: &BigRational) -> Row {
    Row {
        p: r.p.scale(k),
        combo: r.combo.iter().map(|c| c * k).collect(),
    }
}

fn sum(a: &Row, b: &Row) -> Row {
    Row {
        p: a.p.add(&b.p),
        combo: a.combo.iter().zip(&b.combo).map(|(x, y)| x + y).collect(),
    }
}

/// Scales a row so its largest coefficient has magnitude one.
fn normalized(r: Row) -> Row {
    let max = r.p.0.values().map(|c| c.abs()).max();
    match max {
        Some(m) if !m.is_zero() && !m.is_one() => scaled(&r, &m.recip()),
        _ => r,
    }
}

/// Multipliers `λ ≥ 0` such that `Σ λᵢ pᵢ` is a positive constant, which
/// refutes the system `pᵢ ≤ 0`.
pub fn refute(rows: &[Poly]) -> Option<Vec<BigRational>> {
    let n = rows.len();
    let mut current: Vec<Row> = rows
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut combo = vec![BigRational::zero(); n];
            combo[i] = BigRational::one();
            Row { p: p.clone(), combo }
        })
        .collect();
    loop {
        if let Some(r) = current
            .iter()
            .find(|r| r.p.is_constant() && r.p.constant_part().is_positive())
        {
            return Some(r.combo.clone());
        }
        let mut counts: BTreeMap<&Monomial, (usize, usize)> = BTreeMap::new();
        for r in &current {
            for (m, c) in &r.p.0 {
                if m.is_empty() {
                    continue;
                }
                let e = counts.entry(m).or_default();
                if c.is_positive() {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        let (m, _) = counts.iter().min_by_key(|(_, (p, q))| p * q)?;
        let m: Monomial = (*m).clone();
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in current {
            let c = r.p.coeff(&m);
            if c.is_positive() {
                pos.push((c, r));
            } else if c.is_negative() {
                neg.push((c, r));
            } else {
                rest.push(r);
            }
        }
        let mut seen: BTreeSet<Vec<(Monomial, BigRational)>> = rest
            .iter()
            .map(|r| r.p.0.clone().into_iter().collect())
            .collect();
        for (cp, p) in &pos {
            for (cn, q) in &neg {
                let r = normalized(sum(&scaled(p, &-cn), &scaled(q, cp)));
                if r.p.is_constant() && !r.p.constant_part().is_positive() {
                    continue;
                }
                if seen.insert(r.p.0.clone().into_iter().collect()) {
                    rest.push(r);
                }
                if rest.len() > MAX_ROWS {
                    return None;
                }
            }
        }
        current = rest;
    }
}

/// Multipliers proving `goal ≤ 0` from `premises`, in the form checked by
/// the kernel: the combination's linear part equals the goal's and its
/// constant is strong enough after integer rounding.
pub fn entail(premises: &[Poly], goal: &Poly) -> Option<Vec<BigRational>> {
    let mut rows = premises.to_vec();
    rows.push(Poly::constant(1).sub(goal));
    let combo = refute(&rows)?;
    let mu = combo[premises.len()].clone();
    if mu.is_zero() {
        return None;
    }
    Some(combo[..premises.len()].iter().map(|c| c / &mu).collect())
}
