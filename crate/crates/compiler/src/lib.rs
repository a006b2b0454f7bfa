// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Compiles typed LISS programs to annotated bytecode.
//!
//! Annotations are carried over by renaming only ([`translate_formula`]),
//! and code is laid out so that machine-level verification conditions
//! coincide with the renamed source-level ones.
//!
//! ```
//! use lissom_compiler::compile;
//! use lissom_lang::check_source;
//!
//! let p = check_source("fun main() { var x: int := 1 + 2; }").unwrap();
//! let (m, _) = compile(&p);
//! let text: Vec<String> = m.functions[0].code.iter().map(|i| i.to_string()).collect();
//! assert_eq!(text, ["PUSH 1", "PUSH 2", "ADD", "STORE 0", "RET"]);
//! ```

mod lower;
mod varmap;

pub use lower::{compile, FunctionTrace, LoweringTrace, StmtRange};
pub use varmap::{ghost_name, slot_name, translate_formula, UnmappedVariable, VarMap};

use lissom_lang::TypedProgram;

/// Compiles to `.lbc` text.
pub fn compile_to_lbc(p: &TypedProgram) -> String {
    lissom_vm::print_lbc(&compile(p).0)
}
