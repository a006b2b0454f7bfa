// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Runs a LISS program on the reference interpreter and on the compiled
//! bytecode, printing both results.
//!
//! cargo run --example interpret -- crates/lissom/corpus/gcd.liss 12 18

use lissom_compiler::compile;
use lissom_lang::{check_source, interpret_source};
use lissom_vm::{check_module, run};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/gcd.liss").into());
    let inputs: Vec<i64> = args.map(|a| a.parse().expect("integer input")).collect();
    let text = std::fs::read_to_string(&path).expect("readable source");
    let program = check_source(&text).unwrap_or_else(|e| panic!("{e}"));

    let src = interpret_source(&program, &inputs).expect("main exists");
    println!("interpreter: {:?} {:?}", src.outputs, src.status);

    let (module, _) = compile(&program);
    let loaded = check_module(module).expect("compiled code loads");
    let vm = run(&loaded, "main", &inputs, 10_000_000).expect("main exists");
    println!("bytecode:    {:?} {:?} in {} steps", vm.outputs, vm.status, vm.steps);
}
