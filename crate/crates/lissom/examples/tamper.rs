// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Builds a bundle, then alters it the ways an attacker might and shows
//! the consumer's verdict for each.
//!
//! cargo run --example tamper

use lissom::bundle::{verify_bundle, verify_bytes, PccBundle};
use lissom::{produce_bundle, DEFAULT_BUDGET};
use lissom_vm::{decode_module, Instr};

fn main() {
    let source = include_str!("../corpus/sum.liss");
    let bundle = produce_bundle(source, DEFAULT_BUDGET).unwrap_or_else(|e| panic!("{e}"));
    println!("original: {:?}", verify_bundle(&bundle).overall);

    let mut bytes = bundle.to_bytes();
    let at = bytes.len() / 2;
    bytes[at] ^= 0x20;
    println!("one byte flipped: {:?}", verify_bytes(&bytes).overall);

    let mut module = decode_module(&bundle.bytecode).expect("bytecode decodes");
    let f = module.functions.iter_mut().find(|f| f.name == "sum").expect("sum");
    let add = f.code.iter().position(|i| *i == Instr::Add).expect("an ADD");
    f.code[add] = Instr::Sub;
    let forged = PccBundle::new(&module, "main", bundle.manifest.obligations as usize, bundle.certificates.clone());
    println!("ADD replaced by SUB, hash recomputed: {:?}", verify_bundle(&forged).overall);

    let mut swapped = bundle.clone();
    for text in swapped.certificates.values_mut() {
        *text = "(eval true)".into();
    }
    swapped.rehash();
    println!("certificates forged: {:?}", verify_bundle(&swapped).overall);
}
