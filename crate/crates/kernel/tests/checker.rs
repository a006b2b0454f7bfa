// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

mod common;

use lissom_kernel::{
    check_certificate, parse_certificate, parse_certificate_with, Certificate, Verdict,
};
use lissom_logic::{
    enumerate_with, parse_closed, parse_formula, EnumConfig, Formula, Term, Validity,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn goal(text: &str) -> Formula {
    parse_formula(text).unwrap()
}

fn verdict(goal_text: &str, cert_text: &str) -> Verdict {
    let g = goal(goal_text);
    let c = parse_certificate_with(cert_text, &g.free_vars()).unwrap();
    check_certificate(&g, &c)
}

fn reason(v: Verdict) -> String {
    match v {
        Verdict::Accept => panic!("expected a rejection"),
        Verdict::Reject(r) => r.to_string(),
    }
}

const SUM_GOAL: &str = "(imp (and (ge x 1) (ge y 2)) (ge (add x y) 3))";

#[test]
fn farkas_sum_of_hypotheses_is_accepted() {
    let c = "(impI (and (ge x 1) (ge y 2)) (lia (1 1) (andE1 (hyp 0)) (andE2 (hyp 0))))";
    assert_eq!(verdict(SUM_GOAL, c), Verdict::Accept);
}

#[test]
fn farkas_combination_that_misses_the_goal_is_rejected() {
    let c = "(impI (and (ge x 1) (ge y 2)) (lia (1 0) (andE1 (hyp 0)) (andE2 (hyp 0))))";
    let r = reason(verdict(SUM_GOAL, c));
    assert!(r.contains("Farkas combination mismatch"), "{r}");
    assert!(r.starts_with("at /0:"), "{r}");
}

#[test]
fn universal_reflexivity() {
    assert_eq!(
        verdict("(forall i (eq i i))", "(forallI j (refl j))"),
        Verdict::Accept
    );
}

#[test]
fn each_rule_reports_its_own_failure() {
    let cases = [
        ("(imp (le 0 x) (le 0 x))", "(impI (le 0 x) (hyp 1))", "no hypothesis 1"),
        ("(imp (le 0 x) (forall y (le 0 x)))", "(impI (le 0 x) (forallI x (hyp 0)))", "eigenvariable `x`"),
        ("(lt 3 2)", "(eval (lt 3 2))", "evaluates to false"),
        ("(lt x 2)", "(eval (lt x 2))", "ground"),
        ("(le 0 (card A))", "(axiom card_positive ((A A)))", "unknown axiom"),
        ("(le 0 x)", "(refl x)", "is required"),
        ("(eq (div 1 0) 0)", "(eval (eq (div 1 0) 0))", "does not evaluate"),
        ("(lt 0 1)", "(lia (1) (hyp 0))", "no hypothesis 0"),
        ("(le x y)", "(lia (-1 0) (refl x))", "negative"),
    ];
    for (g, c, expected) in cases {
        let g = goal(g);
        let r = match parse_certificate_with(c, &g.free_vars()) {
            Ok(c) => reason(check_certificate(&g, &c)),
            Err(e) => format!("syntax: {e}"),
        };
        assert!(r.contains(expected), "{c}: {r}");
    }
}

#[test]
fn negative_coefficients_are_rejected() {
    let g = goal("(imp (le x 0) (le 0 x))");
    let c = Certificate::imp_i(
        goal("(le x 0)"),
        Certificate::Lia(vec![num_rational::BigRational::from_integer((-1).into())], vec![Certificate::Hyp(0)]),
    );
    assert!(reason(check_certificate(&g, &c)).contains("negative"));
}

#[test]
fn case_analysis_and_classical_reasoning() {
    // Excluded middle: (p ∨ ¬p) by contradiction.
    let em = "(contra (notI (not (or (le x 0) (not (le x 0)))) \
              (impE (hyp 0) (orI2 (notI (le x 0) (impE (hyp 0) (orI1 (hyp 1) (not (le x 0))))) (le x 0)))))";
    assert_eq!(verdict("(or (le x 0) (not (le x 0)))", em), Verdict::Accept);
    let split = "(orE (axiom int_trichotomy ((a x) (b 0))) \
                 (orI1 (lia (1) (hyp 0)) (le 0 x)) \
                 (orE (hyp 0) (orI1 (lia (1 0) (hyp 1)) (le 0 x)) (orI2 (lia (1) (hyp 1)) (le x 0))))";
    assert_eq!(verdict("(or (le x 0) (le 0 x))", split), Verdict::Accept);
}

#[test]
fn rewriting_selects_occurrences() {
    let g = "(imp (eq x (add y 1)) (imp (le x 5) (le (add y 1) 5)))";
    let ok = "(impI (eq x (add y 1)) (impI (le x 5) (rewrite (hyp 0) (hyp 1) (0))))";
    assert_eq!(verdict(g, ok), Verdict::Accept);
    let out_of_range = "(impI (eq x (add y 1)) (impI (le x 5) (rewrite (hyp 0) (hyp 1) (1))))";
    assert!(reason(verdict(g, out_of_range)).contains("out of range"));
}

#[test]
fn rewriting_under_a_binder_cannot_capture() {
    // From k = 0 and ∀k. k ≤ k, rewriting the bound k would claim ∀k. 0 ≤ k.
    let g = goal("(imp (eq k 0) (imp (forall k (le k k)) (forall k (le 0 k))))");
    let c = Certificate::imp_i(
        goal("(eq k 0)"),
        Certificate::imp_i(
            goal("(forall k (le k k))"),
            Certificate::rewrite(Certificate::Hyp(0), Certificate::Hyp(1), vec![0]),
        ),
    );
    assert!(matches!(check_certificate(&g, &c), Verdict::Reject(_)));
}

#[test]
fn universal_elimination_substitutes() {
    let g = "(imp (forall k (le 0 (mul k k))) (le 0 (mul (add x 1) (add x 1))))";
    let c = "(impI (forall k (le 0 (mul k k))) (forallE (hyp 0) (add x 1)))";
    assert_eq!(verdict(g, c), Verdict::Accept);
}

#[test]
fn hypotheses_are_indexed_from_the_outside() {
    let g = "(imp (le 0 x) (imp (le 0 y) (le 0 x)))";
    assert_eq!(verdict(g, "(impI (le 0 x) (impI (le 0 y) (hyp 0)))"), Verdict::Accept);
    assert!(matches!(
        verdict(g, "(impI (le 0 x) (impI (le 0 y) (hyp 1)))"),
        Verdict::Reject(_)
    ));
}

#[test]
fn axioms_about_sets_and_vectors() {
    let (env, g) = parse_closed(
        "(closed ((A set) (B set)) (le (card (union A B)) (add (card A) (card B))))",
    )
    .unwrap();
    let c = parse_certificate_with(
        "(lia (1 0 1) (axiom card_union ((A A) (B B))) (axiom card_nonneg ((A (inter A B)))))",
        &env,
    )
    .unwrap();
    assert_eq!(check_certificate(&g, &c), Verdict::Accept);
}

#[test]
fn garbage_text_never_panics() {
    for text in ["", "(", ")", "(hyp", "(lia", "(lia ())", "(axiom x)", "((hyp 0))", "(impI)", "hyp 0"] {
        if let Ok(c) = parse_certificate(text) {
            assert!(matches!(check_certificate(&Formula::True, &c), Verdict::Reject(_)));
        }
    }
}

fn counter_model(g: &Formula) -> bool {
    matches!(
        enumerate_with(g, &EnumConfig::new(3, 2, 2)),
        Ok(Validity::CounterModel(_))
    )
}

#[test]
fn fuzzed_certificates_never_prove_falsifiable_goals() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut tried = 0;
    let mut accepted = 0;
    while tried < 1000 {
        let g = common::formula(&mut rng, 3);
        if !counter_model(&g) {
            continue;
        }
        let mut pool = Vec::new();
        common::subformulas(&g, &mut pool);
        let c = common::shaped_certificate(&mut rng, &g, &pool);
        tried += 1;
        if check_certificate(&g, &c).is_accept() {
            accepted += 1;
        }
        let text = c.to_string();
        let reparsed = parse_certificate_with(&text, &g.free_vars()).unwrap();
        assert_eq!(reparsed.to_string(), text);
    }
    assert_eq!(accepted, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn accepted_goals_have_no_counter_model(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::formula(&mut rng, 3);
        let mut pool = Vec::new();
        common::subformulas(&g, &mut pool);
        let c = common::shaped_certificate(&mut rng, &g, &pool);
        if check_certificate(&g, &c).is_accept() {
            prop_assert!(!counter_model(&g), "{} accepted for {}", c, g);
        }
    }

    #[test]
    fn weakening_the_context_preserves_acceptance(k in 0i64..5, extra in 0usize..3) {
        // Appending hypotheses never invalidates outer `hyp` indices.
        let mut inner = Certificate::Lia(
            vec![num_rational::BigRational::from_integer(1.into())],
            vec![Certificate::Hyp(0)],
        );
        let mut goal_inner = Formula::le(Term::Int(k - 1), Term::int_var("x"));
        for i in 0..extra {
            let h = Formula::le(Term::Int(i as i64), Term::int_var("y"));
            inner = Certificate::imp_i(h.clone(), inner);
            goal_inner = Formula::imp(h, goal_inner);
        }
        let g2 = Formula::imp(
            Formula::le(Term::Int(k), Term::int_var("x")),
            goal_inner,
        );
        let c = Certificate::imp_i(Formula::le(Term::Int(k), Term::int_var("x")), inner);
        prop_assert!(check_certificate(&g2, &c).is_accept());
    }
}
