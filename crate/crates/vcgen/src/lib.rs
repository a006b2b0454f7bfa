// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Verification conditions for annotated bytecode and, with the `source`
//! feature, for typed LISS.
//!
//! Both generators produce one obligation per path between cut points:
//! an implication chain from the hypotheses met along the path to the
//! fact checked at its end. Safety guards (nonzero divisors, indices in
//! bounds, non-negative vector lengths) are checked where they are
//! evaluated and assumed afterwards.
//!
//! ```
//! use lissom_vcgen::bytecode_obligations;
//! use lissom_vm::load_module;
//!
//! let m = load_module(
//!     ".func f 0 1 int\n#var 0 x int\n#ensures (eq \\result 5)\nPUSH 2; PUSH 3; ADD; STORE 0; LOAD 0; RET\n.end",
//! )
//! .unwrap();
//! let obs = bytecode_obligations(&m).unwrap();
//! assert_eq!(obs.len(), 1);
//! assert_eq!(lissom_logic::canonical_text(&obs[0].formula), "(imp true (eq (add 2 3) 5))");
//! ```

mod bytecode;
mod common;
mod emit;
mod error;
mod obligation;
#[cfg(feature = "source")]
mod source;

pub use bytecode::{bytecode_obligations, check_cut_points, MAX_OBLIGATIONS, MAX_STEPS, MAX_TERM_SIZE};
pub use common::{call_var, read_var};
pub use emit::{obligations_tsv, write_vcs};
pub use error::VcError;
pub use obligation::{obligation_id, Level, Location, Obligation, Provenance, SafetyKind, Site};
#[cfg(feature = "source")]
pub use source::{function_obligations, source_obligations, wp_source, Goal, Wp};
