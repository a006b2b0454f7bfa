// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::time::Duration;

use lissom_kernel::check_certificate;
use lissom_logic::{enumerate_with, parse_closed, EnumConfig, Formula, Term, Validity};
use lissom_prover::{prove, Outcome};
use proptest::prelude::*;

fn goal(text: &str) -> Formula {
    parse_closed(text).unwrap_or_else(|e| panic!("{text}: {e}")).1
}

fn proves(text: &str) {
    let g = goal(text);
    match prove(&g, Duration::from_secs(10)) {
        Outcome::Proved(c) => assert!(check_certificate(&g, &c).is_accept()),
        Outcome::GiveUp(r) => panic!("gave up on {text}: {r:?}"),
    }
}

#[test]
fn simple_linear_implication() {
    proves("(closed ((x int)) (imp (le 0 x) (le 1 (add x 1))))");
}

#[test]
fn false_goal_gives_up_with_residual() {
    let g = goal("(closed ((x int)) (lt x x))");
    match prove(&g, Duration::from_secs(2)) {
        Outcome::GiveUp(r) => assert!(!r.is_empty()),
        Outcome::Proved(_) => panic!("proved x < x"),
    }
}

#[test]
fn ill_sorted_goal_gives_up() {
    let g = Formula::le(Term::int_var("x"), Term::EmptySet);
    assert!(!prove(&g, Duration::from_secs(1)).is_proved());
}

#[test]
fn propositional_structure() {
    proves("(closed ((p bool) (q bool)) (imp (and p q) (and q p)))");
    proves("(closed ((p bool) (q bool)) (imp (or p q) (or q p)))");
    proves("(closed ((p bool)) (or p (not p)))");
    proves("(closed ((p bool) (q bool)) (imp (imp p q) (imp (not q) (not p))))");
    proves("(closed ((p bool) (q bool) (r bool)) (imp (and (imp p q) (imp q r)) (imp p r)))");
}

#[test]
fn integer_reasoning_needs_case_splits() {
    proves("(closed ((x int)) (imp (not (eq x 0)) (or (lt x 0) (lt 0 x))))");
    proves("(closed ((x int) (y int)) (imp (and (le x y) (not (eq x y))) (lt x y)))");
    proves("(closed ((x int)) (imp (and (le 0 x) (lt x 1)) (eq x 0)))");
}

#[test]
fn sum_loop_conditions() {
    proves("(closed ((n int)) (imp (le 0 n) (and (le 0 0) (le 0 n))))");
    proves(
        "(closed ((n int) (i int) (s int)) (imp (and (le 0 i) (le i n)) \
         (imp (lt i n) (and (le 0 (add i 1)) (le (add i 1) n)))))",
    );
}

#[test]
fn equal_variables_substitute_into_products() {
    proves(
        "(closed ((n int) (i int) (s int)) (imp (and (le n i) (and (le i n) \
         (eq (mul 2 s) (mul i (add i 1))))) (eq (mul 2 s) (mul n (add n 1)))))",
    );
}

#[test]
fn vector_max_invariant() {
    proves(
        "(closed ((v vec) (m int)) (imp (lt 0 (len v)) \
         (forall k (imp (and (le 0 k) (lt k 1)) (le (idx v k) (idx v 0))))))",
    );
    proves(
        "(closed ((v vec) (i int) (m int)) \
         (imp (and (lt i (len v)) (and (le 1 i) \
              (forall k (imp (and (le 0 k) (lt k i)) (le (idx v k) m))))) \
         (imp (lt m (idx v i)) \
              (forall k (imp (and (le 0 k) (lt k (add i 1))) (le (idx v k) (idx v i)))))))",
    );
}

#[test]
fn vector_updates() {
    proves(
        "(closed ((v vec) (i int) (e int)) (imp (and (le 0 i) (lt i (len v))) \
         (and (eq (len (upd v i e)) (len v)) (eq (idx (upd v i e) i) e))))",
    );
    proves(
        "(closed ((w vec) (i int) (x int)) \
         (imp (and (and (le 0 i) (lt i (len w))) \
                   (forall k (imp (and (le 0 k) (lt k i)) (eq (idx w k) 7)))) \
              (forall k (imp (and (le 0 k) (lt k (add i 1))) (eq (idx (upd w i 7) k) 7)))))",
    );
    proves("(closed ((n int)) (imp (le 0 n) (eq (len (newvec n)) n)))");
}

#[test]
fn sets() {
    proves("(closed ((s set) (t set)) (le (card (union s t)) (add (card s) (card t))))");
    proves("(closed ((s set) (x int)) (mem x (union s (set x))))");
    proves(
        "(closed ((r set) (s set) (x int)) (imp (and (subset r s) (mem x s)) \
         (subset (union r (set x)) s)))",
    );
    proves("(closed ((s set)) (subset (empty) s))");
    proves("(closed ((s set) (t set)) (subset (inter s t) s))");
}

#[test]
fn division() {
    proves(
        "(closed ((a int) (b int)) (imp (lt 0 b) (and (le 0 (mod a b)) (lt (mod a b) b))))",
    );
    proves(
        "(closed ((a int) (b int)) (imp (and (lt 0 a) (and (le 0 b) (not (eq b 0)))) \
         (and (lt 0 b) (le 0 (mod a b)))))",
    );
}

#[test]
fn negated_quantifiers_are_refuted_by_proving_them() {
    proves(
        "(closed ((v vec) (x int)) (or (and (eq -1 -1) \
         (forall k (imp (and (le 0 k) (lt k 0)) (not (eq (idx v k) x))))) (eq (idx v -1) x)))",
    );
}

#[test]
fn linear_search_postcondition() {
    proves(
        "(closed ((v vec) (x int) (i int) (r int)) \
         (imp (and (le (len v) i) \
                   (imp (eq r -1) (forall k (imp (and (le 0 k) (lt k i)) (not (eq (idx v k) x)))))) \
              (imp (eq r -1) (forall k (imp (and (le 0 k) (lt k (len v))) (not (eq (idx v k) x)))))))",
    );
}

#[derive(Clone, Debug)]
enum Lin {
    Le(Vec<i64>, i64),
    Lt(Vec<i64>, i64),
    Eq(Vec<i64>, i64),
}

fn lin_term(cs: &[i64], k: i64) -> Term {
    let mut t = Term::Int(k);
    for (i, c) in cs.iter().enumerate() {
        if *c != 0 {
            t = Term::add(t, Term::mul(Term::Int(*c), Term::int_var(format!("x{i}"))));
        }
    }
    t
}

fn lin_formula(l: &Lin) -> Formula {
    match l {
        Lin::Le(cs, k) => Formula::le(lin_term(cs, *k), Term::Int(0)),
        Lin::Lt(cs, k) => Formula::lt(lin_term(cs, *k), Term::Int(0)),
        Lin::Eq(cs, k) => Formula::eq(lin_term(cs, *k), Term::Int(0)),
    }
}

fn arb_lin(vars: usize) -> impl Strategy<Value = Lin> {
    let cs = prop::collection::vec(-3i64..=3, vars);
    (0..3u8, cs, -5i64..=5).prop_map(|(k, cs, c)| match k {
        0 => Lin::Le(cs, c),
        1 => Lin::Lt(cs, c),
        _ => Lin::Eq(cs, c),
    })
}

fn arb_goal() -> impl Strategy<Value = Formula> {
    (1usize..=3).prop_flat_map(|n| {
        (prop::collection::vec(arb_lin(n), 0..4), arb_lin(n), any::<bool>()).prop_map(
            |(hyps, g, negate)| {
                let g = lin_formula(&g);
                let g = if negate { Formula::not(g) } else { g };
                Formula::imp_chain(hyps.iter().map(lin_formula), g)
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn certified_linear_goals_are_valid(g in arb_goal()) {
        if let Outcome::Proved(c) = prove(&g, Duration::from_secs(2)) {
            prop_assert!(check_certificate(&g, &c).is_accept());
            let v = enumerate_with(&g, &EnumConfig::new(6, 0, 0)).unwrap();
            prop_assert!(!matches!(v, Validity::CounterModel(_)), "certified an invalid goal: {g}");
        }
    }

    #[test]
    fn hypothesis_goals_are_always_certified(l in arb_lin(2), m in arb_lin(2)) {
        let g = Formula::imp_chain([lin_formula(&l), lin_formula(&m)], lin_formula(&m));
        prop_assert!(prove(&g, Duration::from_secs(2)).is_proved());
    }
}
