// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! The assertion logic shared by source annotations, verification
//! conditions and certificates.
//!
//! Terms range over three sorts (integers, finite integer sets and
//! integer vectors); formulas add a propositional layer, boolean
//! variables and universal quantification over integers.

mod enumerate;
mod error;
mod eval;
mod formula;
mod sexp;
mod subst;
mod text;

pub use enumerate::{enumerate_validity, enumerate_with, EnumConfig, Validity};
pub use error::{EvalError, LogicError};
pub use eval::{eval_ground, eval_term, eval_with_quantifiers, GroundState, Value};
pub use formula::{Formula, Sort, Term};
pub use sexp::{parse_sexp, Sexp, SexpError};
pub use subst::{substitute, substitute_many, Replacement};
pub use text::{
    canonical_text, closed_text, formula_from_sexp, parse_closed, parse_formula, parse_term,
    term_canonical_text, term_from_sexp, SortEnv,
};

/// Names of the form `q<digits>` are reserved for normalized binders.
pub fn is_reserved_binder_name(name: &str) -> bool {
    name.len() > 1 && name.starts_with('q') && name[1..].bytes().all(|b| b.is_ascii_digit())
}
