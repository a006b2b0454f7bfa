// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! LISS, a small language over integers, finite integer sets and
//! integer vectors, with JML-style annotations.
//!
//! ```
//! use lissom_lang::{check_source, interpret_source, Status};
//!
//! let p = check_source("fun main() { var x: int := 1 + 2; print x; }").unwrap();
//! let out = interpret_source(&p, &[]).unwrap();
//! assert_eq!(out.outputs, vec![3]);
//! assert_eq!(out.status, Status::Returned(None));
//! ```

pub mod ast;
mod error;
mod interp;
mod lexer;
mod parser;
mod pretty;
mod typeck;

pub use ast::{BinOp, Expr, ExprKind, FunctionDecl, Param, Pos, SourceProgram, Stmt, StmtKind, Type};
pub use error::{ParseError, SourceError, TypeError, TypeErrorKind};
pub use interp::{
    interpret, interpret_source, Outcome, RunError, Status, Trap, TrapKind, ASSERT_RANGE,
    DEFAULT_FUEL, MAX_VEC_LEN,
};
pub use parser::{parse_expr, parse_program};
pub use pretty::{print_expr, print_program};
pub use typeck::{
    annotation_formula, annotation_term, old_name, typecheck, TypedFunction, TypedProgram, RESULT,
};

/// Parses and type checks.
pub fn check_source(text: &str) -> Result<TypedProgram, SourceError> {
    let p = parse_program(text)?;
    typecheck(&p).map_err(SourceError::Type)
}
