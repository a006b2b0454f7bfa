// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Proves a formula, prints its certificate and has the kernel check it,
//! then checks the same certificate against a slightly stronger goal.
//!
//! cargo run --example check_certificate -- "(imp (and (le 0 x) (lt x y)) (le 1 y))"

use std::time::Duration;

use lissom_kernel::{check_certificate, parse_certificate_with};
use lissom_logic::{canonical_text, parse_closed, Formula, Term};
use lissom_prover::{prove, Outcome};

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "(imp (and (le 0 x) (lt x y)) (le 1 y))".into());
    let (env, goal) = parse_closed(&text).unwrap_or_else(|e| panic!("{e}"));

    let cert = match prove(&goal, Duration::from_secs(5)) {
        Outcome::Proved(c) => c,
        Outcome::GiveUp(residuals) => {
            println!("no proof; open goals:");
            for r in residuals {
                println!("  {}", canonical_text(&r));
            }
            return;
        }
    };
    let printed = cert.to_string();
    println!("certificate: {printed}");

    let reparsed = parse_certificate_with(&printed, &env).expect("printed certificates parse");
    println!("kernel on goal: {:?}", check_certificate(&goal, &reparsed));

    let stronger = match &goal {
        Formula::Imp(h, c) => match &**c {
            Formula::Le(a, b) => Formula::imp((**h).clone(), Formula::le(Term::add(a.clone(), Term::Int(1)), b.clone())),
            _ => return,
        },
        _ => return,
    };
    println!(
        "kernel on {}: {:?}",
        canonical_text(&stronger),
        check_certificate(&stronger, &reparsed)
    );
}
