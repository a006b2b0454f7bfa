// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Generates the source obligations of a LISS file and runs the prover on
//! each, printing the outcome and certificate size.
//!
//! cargo run --example prove_obligations -- crates/lissom/corpus/gcd.liss

use std::time::{Duration, Instant};

use lissom::translated;
use lissom_lang::check_source;
use lissom_logic::closed_text;
use lissom_prover::{prove, Outcome};
use lissom_vcgen::source_obligations;

fn main() {
    let path = std::env::args().nth(1).expect("usage: prove_obligations FILE.liss [BUDGET_MS]");
    let budget = std::env::args().nth(2).map_or(5000, |b| b.parse().expect("budget in ms"));
    let text = std::fs::read_to_string(&path).expect("readable source");
    let p = check_source(&text).unwrap_or_else(|e| panic!("{e}"));
    for o in source_obligations(&p).expect("obligations") {
        let f = translated(&p, &o);
        let start = Instant::now();
        let outcome = prove(&f, Duration::from_millis(budget));
        let took = start.elapsed();
        let pv = &o.provenance;
        match outcome {
            Outcome::Proved(c) => {
                println!("proved   {} {} {}  size {} in {took:?}", pv.function, pv.site, pv.location, c.size())
            }
            Outcome::GiveUp(rest) => {
                println!("unproved {} {} {} in {took:?}", pv.function, pv.site, pv.location);
                println!("  goal: {}", closed_text(&f));
                for r in rest.iter().take(3) {
                    println!("  left: {}", closed_text(r));
                }
            }
        }
    }
}
