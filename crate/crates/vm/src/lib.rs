// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! A sequential stack machine for integers, finite integer sets and
//! integer vectors, with a per-function annotation table carrying the
//! machine-level specification.
//!
//! ```
//! use lissom_vm::{load_module, run, Status};
//!
//! let m = load_module("PUSH 2; PUSH 3; ADD; PRINT; HALT").unwrap();
//! let out = run(&m, "main", &[], 100).unwrap();
//! assert_eq!(out.outputs, vec![5]);
//! assert_eq!(out.status, Status::Halted);
//! ```

mod binary;
mod error;
mod exec;
mod isa;
mod lbc;
mod loader;
mod module;

pub use binary::{decode_module, encode_module, MAGIC};
pub use error::{Location, MalformedModule};
pub use exec::{
    run, run_monitored, Outcome, ReturnEvent, RunError, Status, Trap, TrapKind, MAX_VEC_LEN,
};
pub use isa::Instr;
pub use lbc::{parse_lbc, print_lbc};
pub use loader::{check_module, load_binary, load_module, LoadedModule, StackMap, MAX_STACK};
pub use module::{AnnotationTable, BytecodeFunction, BytecodeModule, RESULT};
