// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Builds a proof-carrying bundle from a corpus program, verifies it as a
//! consumer would and runs it.
//!
//! cargo run --example build_and_run -- crates/lissom/corpus/sum.liss 10

use std::time::Instant;

use lissom::bundle::{run_verified, verify_bytes, PccBundle};
use lissom::{produce_bundle, DEFAULT_BUDGET};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/sum.liss").into());
    let inputs: Vec<i64> = args.map(|a| a.parse().expect("integer input")).collect();
    let source = std::fs::read_to_string(&path).expect("readable source");

    let start = Instant::now();
    let bundle = produce_bundle(&source, DEFAULT_BUDGET).unwrap_or_else(|e| panic!("{e}"));
    let bytes = bundle.to_bytes();
    println!(
        "built {} bytes with {} certificates in {:?}",
        bytes.len(),
        bundle.certificates.len(),
        start.elapsed()
    );

    let report = verify_bytes(&bytes);
    print!("{}", report.to_text());

    let received = PccBundle::from_bytes(&bytes).expect("well-formed bundle");
    match run_verified(&received, &inputs, 10_000_000) {
        Ok(out) => println!("outputs {:?} ({:?})", out.outputs, out.status),
        Err(e) => println!("refused: {e:?}"),
    }
}
