// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Goal-directed search.
//!
//! Connectives of the goal are introduced until an atomic leaf remains.
//! A leaf is proved directly when it follows by linear arithmetic from
//! the facts, and otherwise by refuting its negation. Refutation
//! saturates the facts (decomposition, axiom instances, quantifier
//! instances, modus ponens and tollens), looks for a contradiction and,
//! failing that, splits on a disjunction, an implication or an integer
//! disequality.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use lissom_kernel::axioms;
use lissom_kernel::linear::{goal_constraints, premise_constraints, Poly};
use lissom_logic::{
    canonical_text, eval_ground, substitute, term_canonical_text, Formula, GroundState, Sort, Term,
};

use crate::farkas;
use crate::proof::{rc, HypId, Pf, P};

const MAX_SPLITS: usize = 14;
const SATURATION_ROUNDS: usize = 8;
const MAX_CANDIDATES: usize = 12;

#[derive(Clone)]
struct Imp {
    a: Formula,
    b: Formula,
    p: P,
    live: bool,
}

#[derive(Clone, Default)]
pub(crate) struct Facts {
    lits: Vec<(Formula, P)>,
    imps: Vec<Imp>,
    ors: Vec<(Formula, Formula, P)>,
    foralls: Vec<(String, Formula, P)>,
    conflict: Option<P>,
    seen: HashSet<String>,
    done: HashSet<String>,
    /// Instantiation candidates, drawn from assumed formulas only.
    cands: Vec<Term>,
    assumed: Vec<Formula>,
    splits: usize,
}

pub(crate) struct Search {
    next: HypId,
    names: BTreeSet<String>,
    deadline: Instant,
    pub residuals: Vec<Formula>,
}

fn is_int(t: &Term) -> bool {
    matches!(t.sort(), Ok(Sort::Int))
}

fn ex_falso(s: &mut Search, f: &Formula, pf: P) -> P {
    let i = s.id();
    rc(Pf::Contra(rc(Pf::NotI(Formula::not(f.clone()), i, pf))))
}

impl Search {
    pub fn new(goal: &Formula, deadline: Instant) -> Search {
        let mut names = BTreeSet::new();
        goal.all_names(&mut names);
        Search { next: 0, names, deadline, residuals: Vec::new() }
    }

    fn id(&mut self) -> HypId {
        self.next += 1;
        self.next
    }

    fn out_of_time(&self) -> bool {
        Instant::now() >= self.deadline
    }

    fn fresh(&mut self, x: &str) -> String {
        let mut n = 1;
        loop {
            let name = format!("{x}_{n}");
            if self.names.insert(name.clone()) {
                return name;
            }
            n += 1;
        }
    }

    // ---- goals -------------------------------------------------------

    pub fn goal(&mut self, fs: &Facts, g: &Formula) -> Option<P> {
        if self.out_of_time() {
            self.residuals.push(Formula::imp_chain(fs.assumed.clone(), g.clone()));
            return None;
        }
        match g {
            Formula::True => Some(rc(Pf::Eval(Formula::True))),
            Formula::And(a, b) => {
                let pa = self.goal(fs, a)?;
                let pb = self.goal(fs, b)?;
                Some(rc(Pf::AndI(pa, pb)))
            }
            Formula::Imp(a, b) => {
                let i = self.id();
                let mut inner = fs.clone();
                inner.assumed.push((**a).clone());
                self.assume(&mut inner, (**a).clone(), rc(Pf::Hyp(i)));
                let pb = self.goal(&inner, b)?;
                Some(rc(Pf::ImpI((**a).clone(), i, pb)))
            }
            Formula::Forall(x, body) => {
                let y = self.fresh(x);
                let opened = substitute(body, x, Term::int_var(y.clone())).ok()?;
                let mut inner = fs.clone();
                inner.cands.push(Term::int_var(y.clone()));
                let pb = self.goal(&inner, &opened)?;
                Some(rc(Pf::ForallI(y, pb)))
            }
            Formula::Not(a) => {
                let i = self.id();
                let mut inner = fs.clone();
                inner.assumed.push((**a).clone());
                self.assume(&mut inner, (**a).clone(), rc(Pf::Hyp(i)));
                match self.refute(inner) {
                    Some(r) => Some(rc(Pf::NotI((**a).clone(), i, r))),
                    None => {
                        self.residuals.push(Formula::imp_chain(fs.assumed.clone(), g.clone()));
                        None
                    }
                }
            }
            _ => {
                let r = self.leaf(fs, g);
                if r.is_none() {
                    self.residuals.push(Formula::imp_chain(fs.assumed.clone(), g.clone()));
                }
                r
            }
        }
    }

    fn leaf(&mut self, fs: &Facts, g: &Formula) -> Option<P> {
        let mut sat = fs.clone();
        self.saturate(&mut sat);
        if let Some(c) = sat.conflict.clone() {
            return Some(ex_falso(self, g, c));
        }
        if let Some(p) = self.quick(&sat, g) {
            return Some(p);
        }
        if let Formula::Subset(a, b) = g {
            let inst = vec![("A".to_string(), a.clone()), ("B".to_string(), b.clone())];
            if let Ok(Formula::And(_, back)) = axioms::instantiate("subset_def", &inst) {
                if let Formula::Imp(all, _) = &*back {
                    let ax = rc(Pf::Axiom("subset_def".into(), inst));
                    if let Some(p) = self.goal(fs, all) {
                        return Some(rc(Pf::ImpE(rc(Pf::AndE2(ax)), p)));
                    }
                }
            }
        }
        let i = self.id();
        let neg = Formula::not(g.clone());
        let mut inner = sat;
        self.assume(&mut inner, neg.clone(), rc(Pf::Hyp(i)));
        let r = self.refute(inner)?;
        Some(rc(Pf::Contra(rc(Pf::NotI(neg, i, r)))))
    }

    // ---- facts -------------------------------------------------------

    fn add(&mut self, fs: &mut Facts, f: Formula, p: P) {
        if fs.conflict.is_some() || !fs.seen.insert(canonical_text(&f)) {
            return;
        }
        match f {
            Formula::True => {}
            Formula::False => fs.conflict = Some(p),
            Formula::And(a, b) => {
                self.add(fs, *a, rc(Pf::AndE1(p.clone())));
                self.add(fs, *b, rc(Pf::AndE2(p)));
            }
            Formula::Imp(a, b) => fs.imps.push(Imp { a: *a, b: *b, p, live: true }),
            Formula::Or(a, b) => fs.ors.push((*a, *b, p)),
            Formula::Forall(x, body) => fs.foralls.push((x, *body, p)),
            Formula::Not(g) => match *g {
                Formula::Not(a) => self.add(fs, *a, rc(Pf::Contra(p))),
                Formula::True => fs.conflict = Some(rc(Pf::ImpE(p, rc(Pf::Eval(Formula::True))))),
                Formula::False => {}
                Formula::Or(a, b) => {
                    let i = self.id();
                    let na = rc(Pf::NotI(
                        (*a).clone(),
                        i,
                        rc(Pf::ImpE(p.clone(), rc(Pf::OrI1(rc(Pf::Hyp(i)), (*b).clone())))),
                    ));
                    let j = self.id();
                    let nb = rc(Pf::NotI(
                        (*b).clone(),
                        j,
                        rc(Pf::ImpE(p, rc(Pf::OrI2(rc(Pf::Hyp(j)), (*a).clone())))),
                    ));
                    self.add(fs, Formula::not(*a), na);
                    self.add(fs, Formula::not(*b), nb);
                }
                Formula::And(a, b) => {
                    let (i, j) = (self.id(), self.id());
                    let both = rc(Pf::AndI(rc(Pf::Hyp(i)), rc(Pf::Hyp(j))));
                    let pf = rc(Pf::ImpI(
                        (*a).clone(),
                        i,
                        rc(Pf::NotI((*b).clone(), j, rc(Pf::ImpE(p, both)))),
                    ));
                    self.add(fs, Formula::imp(*a, Formula::not(*b)), pf);
                }
                Formula::Imp(a, b) => {
                    let (i, j) = (self.id(), self.id());
                    let nb = rc(Pf::NotI(
                        (*b).clone(),
                        i,
                        rc(Pf::ImpE(p.clone(), rc(Pf::ImpI((*a).clone(), j, rc(Pf::Hyp(i)))))),
                    ));
                    let (k, l) = (self.id(), self.id());
                    let absurd = rc(Pf::ImpE(rc(Pf::Hyp(k)), rc(Pf::Hyp(l))));
                    let body = ex_falso(self, &b, absurd);
                    let pa = rc(Pf::Contra(rc(Pf::NotI(
                        Formula::not((*a).clone()),
                        k,
                        rc(Pf::ImpE(p, rc(Pf::ImpI((*a).clone(), l, body)))),
                    ))));
                    self.add(fs, Formula::not((*b).clone()), nb);
                    self.add(fs, *a, pa);
                }
                other => self.literal(fs, Formula::not(other), p),
            },
            other => self.literal(fs, other, p),
        }
    }

    fn literal(&mut self, fs: &mut Facts, f: Formula, p: P) {
        for (g, q) in &fs.lits {
            if let Formula::Not(inner) = g {
                if inner.alpha_eq(&f) {
                    fs.conflict = Some(rc(Pf::ImpE(q.clone(), p)));
                    return;
                }
            }
            if let Formula::Not(inner) = &f {
                if inner.alpha_eq(g) {
                    fs.conflict = Some(rc(Pf::ImpE(p, q.clone())));
                    return;
                }
            }
        }
        fs.lits.push((f, p));
    }

    fn find_lit(fs: &Facts, f: &Formula) -> Option<P> {
        fs.lits.iter().find(|(g, _)| g.alpha_eq(f)).map(|(_, p)| p.clone())
    }

    // ---- cheap reasoning --------------------------------------------

    fn linear_premises(fs: &Facts) -> (Vec<Poly>, Vec<P>, Vec<usize>) {
        let (mut polys, mut certs, mut sizes) = (Vec::new(), Vec::new(), Vec::new());
        for (f, p) in &fs.lits {
            if let Some(cs) = premise_constraints(f) {
                sizes.push(cs.len());
                polys.extend(cs);
                certs.push(p.clone());
            }
        }
        (polys, certs, sizes)
    }

    /// A checkable proof of `g` by one `lia` step.
    fn entail(fs: &Facts, g: &Formula) -> Option<P> {
        let goals = goal_constraints(g)?;
        let (polys, certs, _) = Self::linear_premises(fs);
        let mut coeffs = Vec::new();
        for gp in &goals {
            coeffs.extend(farkas::entail(&polys, gp)?);
        }
        Some(rc(Pf::Lia(coeffs, certs)))
    }

    /// A checkable proof of `false` from the facts plus `x`, proved by the
    /// inferable `px`, without splitting.
    fn quick_refute(&mut self, fs: &Facts, x: &Formula, px: P) -> Option<P> {
        match x {
            Formula::False => return Some(px),
            Formula::And(a, b) => {
                return self
                    .quick_refute(fs, a, rc(Pf::AndE1(px.clone())))
                    .or_else(|| self.quick_refute(fs, b, rc(Pf::AndE2(px))))
            }
            Formula::Not(y) => {
                if let Some(q) = Self::find_lit(fs, y) {
                    return Some(rc(Pf::ImpE(px, q)));
                }
            }
            _ => {}
        }
        if let Some(q) = Self::find_lit(fs, &Formula::not(x.clone())) {
            return Some(rc(Pf::ImpE(q, px)));
        }
        let extra = premise_constraints(x)?;
        let (mut polys, mut certs, _) = Self::linear_premises(fs);
        polys.extend(extra);
        certs.push(px);
        let coeffs = farkas::refute(&polys)?;
        Some(rc(Pf::Lia(coeffs, certs)))
    }

    /// A checkable proof of `g` without splitting.
    fn quick(&mut self, fs: &Facts, g: &Formula) -> Option<P> {
        if let Some(p) = Self::find_lit(fs, g) {
            return Some(p);
        }
        match g {
            Formula::True => return Some(rc(Pf::Eval(Formula::True))),
            Formula::And(a, b) => {
                let pa = self.quick(fs, a)?;
                let pb = self.quick(fs, b)?;
                return Some(rc(Pf::AndI(pa, pb)));
            }
            Formula::Or(a, b) => {
                if let Some(p) = self.quick(fs, a) {
                    return Some(rc(Pf::OrI1(p, (**b).clone())));
                }
                return self.quick(fs, b).map(|p| rc(Pf::OrI2(p, (**a).clone())));
            }
            Formula::Eq(a, b) if a == b => return Some(rc(Pf::Refl(a.clone()))),
            _ => {}
        }
        if g.free_vars().is_empty() && g.is_quantifier_free() {
            if let Ok(true) = eval_ground(g, &GroundState::new()) {
                return Some(rc(Pf::Eval(g.clone())));
            }
        }
        if let Some(p) = Self::entail(fs, g) {
            return Some(p);
        }
        if let Formula::Not(x) = g {
            let i = self.id();
            let r = self.quick_refute(fs, x, rc(Pf::Hyp(i)))?;
            return Some(rc(Pf::NotI((**x).clone(), i, r)));
        }
        None
    }

    /// `(have F p)`: an inferable proof of `f` from a checkable one.
    fn have(&mut self, f: &Formula, p: P) -> P {
        let i = self.id();
        rc(Pf::ImpE(rc(Pf::ImpI(f.clone(), i, rc(Pf::Hyp(i)))), p))
    }

    fn lem(&mut self, phi: &Formula) -> P {
        let not_phi = Formula::not(phi.clone());
        let disj = Formula::or(phi.clone(), not_phi.clone());
        let (i, j) = (self.id(), self.id());
        let left = rc(Pf::OrI1(rc(Pf::Hyp(j)), not_phi));
        let refute_phi = rc(Pf::NotI(phi.clone(), j, rc(Pf::ImpE(rc(Pf::Hyp(i)), left))));
        let body = rc(Pf::ImpE(rc(Pf::Hyp(i)), rc(Pf::OrI2(refute_phi, phi.clone()))));
        rc(Pf::Contra(rc(Pf::NotI(Formula::not(disj), i, body))))
    }

    // ---- saturation --------------------------------------------------

    fn saturate(&mut self, fs: &mut Facts) {
        for _ in 0..SATURATION_ROUNDS {
            if fs.conflict.is_some() {
                return;
            }
            let before = fs.seen.len();
            self.instantiate_axioms(fs);
            self.instantiate_foralls(fs);
            self.fire_implications(fs);
            self.unit_disjunctions(fs);
            if fs.seen.len() == before {
                return;
            }
        }
    }

    fn instantiate_axioms(&mut self, fs: &mut Facts) {
        let mut found = Vec::new();
        for (f, _) in &fs.lits {
            triggers(f, &mut found);
        }
        for imp in &fs.imps {
            triggers(&imp.a, &mut found);
            triggers(&imp.b, &mut found);
        }
        for (a, b, _) in &fs.ors {
            triggers(a, &mut found);
            triggers(b, &mut found);
        }
        for (id, inst) in found {
            let key = format!(
                "{id}{}",
                inst.iter().map(|(m, t)| format!(" {m}={}", term_canonical_text(t))).collect::<String>()
            );
            if !fs.done.insert(key) {
                continue;
            }
            if let Ok(f) = axioms::instantiate(id, &inst) {
                self.add(fs, f, rc(Pf::Axiom(id.to_string(), inst)));
            }
        }
    }

    /// Adds an assumption, drawing instantiation candidates from it.
    fn assume(&mut self, fs: &mut Facts, f: Formula, p: P) {
        let push = |t: &Term, out: &mut Vec<Term>| {
            if out.len() < MAX_CANDIDATES && !out.contains(t) && is_int(t) {
                out.push(t.clone());
            }
        };
        visit_atoms(&f, &mut |a| {
            if let Formula::Mem(e, _) = a {
                push(e, &mut fs.cands);
            }
            if let Some((x, y)) = a.atom_terms() {
                for t in [x, y] {
                    t.for_each_subterm(&mut |s| {
                        if let Term::Idx(_, j) = s {
                            push(j, &mut fs.cands);
                        }
                    });
                }
            }
        });
        self.add(fs, f, p);
    }

    fn instantiate_foralls(&mut self, fs: &mut Facts) {
        let cands = fs.cands.clone();
        let foralls = fs.foralls.clone();
        for (x, body, p) in foralls {
            for t in &cands {
                let key = format!("∀{x}.{} @ {}", canonical_text(&body), term_canonical_text(t));
                if !fs.done.insert(key) {
                    continue;
                }
                if let Ok(f) = substitute(&body, &x, t.clone()) {
                    self.add(fs, f, rc(Pf::ForallE(p.clone(), t.clone())));
                }
            }
        }
    }

    fn fire_implications(&mut self, fs: &mut Facts) {
        let mut k = 0;
        while k < fs.imps.len() {
            if fs.conflict.is_some() {
                return;
            }
            if !fs.imps[k].live {
                k += 1;
                continue;
            }
            let Imp { a, b, p, .. } = fs.imps[k].clone();
            if let Some(q) = self.quick(fs, &a) {
                fs.imps[k].live = false;
                self.add(fs, b, rc(Pf::ImpE(p, q)));
            } else {
                let i = self.id();
                let from_a = rc(Pf::ImpE(p, rc(Pf::Hyp(i))));
                if let Some(r) = self.quick_refute(fs, &b, from_a) {
                    fs.imps[k].live = false;
                    self.add(fs, Formula::not(a), rc(Pf::NotI(fs.imps[k].a.clone(), i, r)));
                } else {
                    let j = self.id();
                    if self.quick_refute(fs, &a, rc(Pf::Hyp(j))).is_some() {
                        fs.imps[k].live = false;
                    }
                }
            }
            k += 1;
        }
    }

    fn unit_disjunctions(&mut self, fs: &mut Facts) {
        let ors = std::mem::take(&mut fs.ors);
        let mut keep = Vec::new();
        for (a, b, p) in ors {
            if fs.conflict.is_some() {
                keep.push((a, b, p));
                continue;
            }
            let (i, j) = (self.id(), self.id());
            if let Some(r) = self.quick_refute(fs, &a, rc(Pf::Hyp(i))) {
                let left = ex_falso(self, &b, r);
                self.add(fs, b, rc(Pf::OrE(p, i, left, j, rc(Pf::Hyp(j)))));
            } else if let Some(r) = self.quick_refute(fs, &b, rc(Pf::Hyp(j))) {
                let right = ex_falso(self, &a, r);
                self.add(fs, a, rc(Pf::OrE(p, i, rc(Pf::Hyp(i)), j, right)));
            } else if self.quick(fs, &a).is_some() || self.quick(fs, &b).is_some() {
                // Already known to hold; splitting on it gains nothing.
            } else {
                keep.push((a, b, p));
            }
        }
        fs.ors.extend(keep);
    }

    /// Equalities between `idx` and `mem` arguments that linear
    /// arithmetic can prove, turned into facts by rewriting.
    fn congruence(&mut self, fs: &mut Facts) -> bool {
        let mut idx: Vec<Term> = Vec::new();
        let mut mems: Vec<(Term, Term, P, bool)> = Vec::new();
        for (f, p) in &fs.lits {
            visit_atoms(f, &mut |a| {
                if let Some((x, y)) = a.atom_terms() {
                    for t in [x, y] {
                        t.for_each_subterm(&mut |s| {
                            if opaque(s) && !idx.contains(s) {
                                idx.push(s.clone());
                            }
                        });
                    }
                }
            });
            match f {
                Formula::Mem(e, s) => mems.push((e.clone(), s.clone(), p.clone(), true)),
                Formula::Not(g) => {
                    if let Formula::Mem(e, s) = &**g {
                        mems.push((e.clone(), s.clone(), p.clone(), false));
                    }
                }
                _ => {}
            }
        }
        let mut added = false;
        for x in 0..idx.len() {
            for y in x + 1..idx.len() {
                let (s, t) = (&idx[x], &idx[y]);
                if std::mem::discriminant(s) != std::mem::discriminant(t) {
                    continue;
                }
                let key = format!("cong {} {}", term_canonical_text(s), term_canonical_text(t));
                if fs.done.contains(&key) {
                    continue;
                }
                let Some((a, b, positions)) = congruent(s, t) else { continue };
                let eq = Formula::eq(a, b);
                // A failed attempt is retried once more facts are known.
                if !fs.done.insert(format!("{key} #{}", fs.lits.len())) {
                    continue;
                }
                if let Some(q) = Self::entail(fs, &eq) {
                    fs.done.insert(key);
                    let e = self.have(&eq, q);
                    let refl = rc(Pf::Refl(s.clone()));
                    self.add(fs, Formula::eq(s.clone(), t.clone()), rc(Pf::Rewrite(e, refl, positions)));
                    added = true;
                }
            }
        }
        for (a, s, p, pos) in &mems {
            if !pos {
                continue;
            }
            for (b, t, q, neg) in &mems {
                if *neg || s != t || a == b || occurs(a, s) {
                    continue;
                }
                let eq = Formula::eq(a.clone(), b.clone());
                if let Some(e) = Self::entail(fs, &eq) {
                    let e = self.have(&eq, e);
                    let moved = rc(Pf::Rewrite(e, p.clone(), vec![0]));
                    fs.conflict.get_or_insert_with(|| rc(Pf::ImpE(q.clone(), moved)));
                    return true;
                }
            }
        }
        added
    }

    // ---- refutation ------------------------------------------------

    /// `¬∀x. F` among the facts while `∀x. F` can be proved from them.
    fn negated_quantifier(&mut self, fs: &mut Facts) -> Option<P> {
        let negs: Vec<(Formula, P)> = fs
            .lits
            .iter()
            .filter_map(|(f, p)| match f {
                Formula::Not(g) if matches!(**g, Formula::Forall(..)) => Some(((**g).clone(), p.clone())),
                _ => None,
            })
            .collect();
        for (all, p) in negs {
            if !fs.done.insert(format!("goal {}", canonical_text(&all))) {
                continue;
            }
            let kept = self.residuals.len();
            let proof = self.goal(fs, &all);
            self.residuals.truncate(kept);
            if let Some(q) = proof {
                return Some(rc(Pf::ImpE(p, q)));
            }
        }
        None
    }

    /// `¬(a = b)` among the facts while linear arithmetic proves `a = b`.
    fn disequality_conflict(&mut self, fs: &Facts) -> Option<P> {
        for (f, p) in &fs.lits {
            if let Formula::Not(g) = f {
                if matches!(&**g, Formula::Eq(a, _) if is_int(a)) {
                    if let Some(q) = Self::entail(fs, g) {
                        return Some(rc(Pf::ImpE(p.clone(), q)));
                    }
                }
            }
        }
        None
    }

    /// A checkable proof of `false` from the facts.
    fn refute(&mut self, mut fs: Facts) -> Option<P> {
        self.saturate(&mut fs);
        loop {
            if let Some(c) = fs.conflict.clone() {
                return Some(c);
            }
            let (polys, certs, _) = Self::linear_premises(&fs);
            if let Some(coeffs) = farkas::refute(&polys) {
                return Some(rc(Pf::Lia(coeffs, certs)));
            }
            if let Some(c) = self.disequality_conflict(&fs) {
                return Some(c);
            }
            if !self.congruence(&mut fs) {
                break;
            }
            self.saturate(&mut fs);
        }
        if self.out_of_time() || fs.splits >= MAX_SPLITS {
            return None;
        }
        fs.splits += 1;
        if let Some(c) = self.negated_quantifier(&mut fs) {
            return Some(c);
        }
        if let Some((a, b, p)) = fs.ors.first().cloned() {
            fs.ors.remove(0);
            return self.split(fs, p, a, b);
        }
        if let Some(k) = fs.imps.iter().position(|i| i.live) {
            fs.imps[k].live = false;
            let Imp { a, b, p, .. } = fs.imps[k].clone();
            let d = self.lem(&a);
            let (i, j) = (self.id(), self.id());
            let mut left = fs.clone();
            self.assume(&mut left, a.clone(), rc(Pf::Hyp(i)));
            self.add(&mut left, b, rc(Pf::ImpE(p, rc(Pf::Hyp(i)))));
            let l = self.refute(left)?;
            let mut right = fs;
            self.assume(&mut right, Formula::not(a), rc(Pf::Hyp(j)));
            let r = self.refute(right)?;
            return Some(rc(Pf::OrE(d, i, l, j, r)));
        }
        let diseq = fs.lits.iter().find_map(|(f, _)| match f {
            Formula::Not(g) => match &**g {
                Formula::Eq(x, y) if is_int(x) => {
                    let key = format!("tri {} {}", term_canonical_text(x), term_canonical_text(y));
                    (!fs.done.contains(&key)).then(|| (key, x.clone(), y.clone()))
                }
                _ => None,
            },
            _ => None,
        });
        if let Some((key, x, y)) = diseq {
            fs.done.insert(key);
            let inst = vec![("a".to_string(), x), ("b".to_string(), y)];
            let f = axioms::instantiate("int_trichotomy", &inst).ok()?;
            let Formula::Or(l, r) = f else { return None };
            return self.split(fs, rc(Pf::Axiom("int_trichotomy".into(), inst)), *l, *r);
        }
        None
    }

    fn split(&mut self, fs: Facts, d: P, a: Formula, b: Formula) -> Option<P> {
        let (i, j) = (self.id(), self.id());
        let mut left = fs.clone();
        self.assume(&mut left, a, rc(Pf::Hyp(i)));
        let l = self.refute(left)?;
        let mut right = fs;
        self.assume(&mut right, b, rc(Pf::Hyp(j)));
        let r = self.refute(right)?;
        Some(rc(Pf::OrE(d, i, l, j, r)))
    }
}

fn occurrences(needle: &Term, hay: &Term) -> usize {
    let mut n = 0;
    hay.for_each_subterm(&mut |s| n += usize::from(s == needle));
    n
}

fn occurs(needle: &Term, hay: &Term) -> bool {
    occurrences(needle, hay) > 0
}

/// Terms linear arithmetic sees as atoms.
fn opaque(t: &Term) -> bool {
    match t {
        Term::Idx(..) | Term::Len(_) | Term::Card(_) | Term::Div(..) | Term::Mod(..) => true,
        Term::Mul(a, b) => !matches!(**a, Term::Int(_)) && !matches!(**b, Term::Int(_)),
        _ => false,
    }
}

fn differences<'a>(s: &'a Term, t: &'a Term, out: &mut Vec<(&'a Term, &'a Term)>) {
    if s == t {
        return;
    }
    let (cs, ct) = (s.children(), t.children());
    let leaf = matches!(s, Term::Var(..) | Term::Int(_)) || matches!(t, Term::Var(..) | Term::Int(_));
    if leaf || std::mem::discriminant(s) != std::mem::discriminant(t) || cs.len() != ct.len() {
        out.push((s, t));
        return;
    }
    for (a, b) in cs.into_iter().zip(ct) {
        differences(a, b, out);
    }
}

/// An equation `a = b` and rewrite positions turning `(eq s s)` into
/// `(eq s t)`, when `s` and `t` differ in one way only.
fn congruent(s: &Term, t: &Term) -> Option<(Term, Term, Vec<usize>)> {
    let mut diffs = Vec::new();
    differences(s, t, &mut diffs);
    let (a, b) = *diffs.first()?;
    if diffs.iter().any(|d| *d != (a, b)) {
        return None;
    }
    let m = occurrences(a, s);
    let whole = if let Term::Var(x, _) = a {
        let f = substitute(&Formula::eq(s.clone(), s.clone()), x, b.clone()).ok()?;
        matches!(&f, Formula::Eq(_, r) if r == t)
    } else {
        false
    };
    if whole {
        return Some((a.clone(), b.clone(), (m..2 * m).collect()));
    }
    // A single differing spot whose term occurs nowhere else.
    if diffs.len() == 1 && m == 1 && !occurs(a, b) {
        return Some((a.clone(), b.clone(), vec![1]));
    }
    None
}

/// Calls `visit` on every atom outside quantifiers.
fn visit_atoms(f: &Formula, visit: &mut impl FnMut(&Formula)) {
    match f {
        Formula::Not(g) => visit_atoms(g, visit),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            visit_atoms(a, visit);
            visit_atoms(b, visit);
        }
        Formula::Forall(..) | Formula::True | Formula::False => {}
        atom => visit(atom),
    }
}

type Instance = (&'static str, Vec<(String, Term)>);

fn inst(id: &'static str, pairs: &[(&str, &Term)]) -> Instance {
    (id, pairs.iter().map(|(m, t)| (m.to_string(), (*t).clone())).collect())
}

/// Axiom instances suggested by the terms and atoms of `f`.
fn triggers(f: &Formula, out: &mut Vec<Instance>) {
    visit_atoms(f, &mut |a| {
        match a {
            Formula::Mem(e, s) => match s {
                Term::Union(x, y) => out.push(inst("mem_union", &[("e", e), ("A", x), ("B", y)])),
                Term::Inter(x, y) => out.push(inst("mem_inter", &[("e", e), ("A", x), ("B", y)])),
                Term::Diff(x, y) => out.push(inst("mem_diff", &[("e", e), ("A", x), ("B", y)])),
                Term::EmptySet => out.push(inst("mem_empty", &[("e", e)])),
                Term::SetLit(es) if !es.is_empty() && es.len() <= 4 => {
                    let ids = ["mem_set1", "mem_set2", "mem_set3", "mem_set4"];
                    let names = ["a", "b", "c", "d"];
                    let mut pairs = vec![("e", e)];
                    pairs.extend(names.iter().copied().zip(es.iter()));
                    out.push(inst(ids[es.len() - 1], &pairs));
                }
                _ => {}
            },
            Formula::Subset(x, y) => out.push(inst("subset_def", &[("A", x), ("B", y)])),
            _ => {}
        }
        if let Some((x, y)) = a.atom_terms() {
            for t in [x, y] {
                t.for_each_subterm(&mut |s| term_triggers(s, out));
            }
        }
    });
}

fn term_triggers(t: &Term, out: &mut Vec<Instance>) {
    match t {
        Term::Card(a) => {
            out.push(inst("card_nonneg", &[("A", a)]));
            match &**a {
                Term::Union(x, y) => {
                    out.push(inst("card_union", &[("A", x), ("B", y)]));
                    let meet = Term::inter((**x).clone(), (**y).clone());
                    out.push(inst("card_nonneg", &[("A", &meet)]));
                }
                Term::EmptySet => out.push(inst("card_empty", &[])),
                Term::SetLit(es) if es.len() == 1 => out.push(inst("card_set1", &[("a", &es[0])])),
                _ => {}
            }
        }
        Term::Len(v) => {
            out.push(inst("len_nonneg", &[("v", v)]));
            match &**v {
                Term::Upd(w, i, e) => out.push(inst("len_upd", &[("v", w), ("i", i), ("e", e)])),
                Term::NewVec(n) => out.push(inst("len_newvec", &[("n", n)])),
                _ => {}
            }
        }
        Term::Idx(v, j) => match &**v {
            Term::Upd(w, i, e) => {
                let pairs = [("v", &**w), ("i", &**i), ("j", &**j), ("e", &**e)];
                out.push(inst("sel_upd_eq", &pairs));
                out.push(inst("sel_upd_ne", &pairs));
            }
            Term::NewVec(n) => out.push(inst("idx_newvec", &[("n", n), ("j", j)])),
            _ => {}
        },
        Term::Div(e, d) | Term::Mod(e, d) => {
            out.push(inst("divmod_pos", &[("e", e), ("d", d)]));
            out.push(inst("divmod_neg", &[("e", e), ("d", d)]));
        }
        _ => {}
    }
}
