// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::time::Duration;

use lissom::bundle::{run_verified, verify_bundle, RunRefusal};
use lissom::{produce_bundle, ProducerFailure, DEFAULT_BUDGET};
use lissom_vcgen::{SafetyKind, Site};

const SUM: &str = include_str!("../corpus/sum.liss");

#[test]
fn corpus_program_builds_verifies_and_runs() {
    let b = produce_bundle(SUM, DEFAULT_BUDGET).unwrap();
    assert!(verify_bundle(&b).is_accept());
    let out = run_verified(&b, &[4], 10_000).unwrap();
    assert_eq!(out.outputs, vec![10]);
}

#[test]
fn builds_are_byte_deterministic() {
    let a = produce_bundle(SUM, DEFAULT_BUDGET).unwrap().to_bytes();
    let b = produce_bundle(SUM, DEFAULT_BUDGET).unwrap().to_bytes();
    assert_eq!(a, b);
}

#[test]
fn wrong_invariant_names_the_preservation_obligation() {
    let wrong = SUM.replace("2 * s = i * (i + 1)", "2 * s = i * i");
    assert_ne!(wrong, SUM);
    let Err(ProducerFailure::Unproved(list)) = produce_bundle(&wrong, Duration::from_secs(2)) else {
        panic!("a wrong invariant must not build")
    };
    assert!(list.iter().any(|u| u.function == "sum" && u.site == Site::Preservation));
    assert!(list.iter().all(|u| u.function == "sum"));
    assert!(list.iter().any(|u| u.to_string().contains("preservation")));
}

#[test]
fn unguarded_index_is_reported_as_a_safety_failure() {
    let src = "fun first(v: vec): int { return v[0]; }\nfun main() { print first(newvec(0)); }\n";
    let Err(ProducerFailure::Unproved(list)) = produce_bundle(src, Duration::from_secs(2)) else {
        panic!("an unsafe index must not build")
    };
    assert!(list
        .iter()
        .any(|u| u.function == "first" && u.site == Site::Safety(SafetyKind::OutOfBounds)));
}

#[test]
fn source_errors_and_missing_entry_are_distinguished() {
    assert!(matches!(produce_bundle("fun main( {", DEFAULT_BUDGET), Err(ProducerFailure::Source(_))));
    assert!(matches!(
        produce_bundle("fun f(x: int): int { return x; }", DEFAULT_BUDGET),
        Err(ProducerFailure::NoEntry)
    ));
    assert!(matches!(
        produce_bundle("fun main(x: int) { print x; }", DEFAULT_BUDGET),
        Err(ProducerFailure::NoEntry)
    ));
}

#[test]
fn rejected_bundles_are_not_run() {
    let mut b = produce_bundle(SUM, DEFAULT_BUDGET).unwrap();
    let id = b.certificates.keys().next().unwrap().clone();
    b.certificates.insert(id, "(eval true)".into());
    b.rehash();
    assert!(matches!(run_verified(&b, &[4], 10_000), Err(RunRefusal::RefusedUnverified(_))));
}
