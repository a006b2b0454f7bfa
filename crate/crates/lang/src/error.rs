// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use thiserror::Error;

use crate::ast::{Pos, Type};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub pos: Pos,
    /// The offending token, or a lexical complaint.
    pub found: String,
    /// Sorted and deduplicated; empty for lexical errors.
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn lexical(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError {
            pos,
            found: msg.into(),
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: ", self.pos)?;
        if self.expected.is_empty() {
            return f.write_str(&self.found);
        }
        write!(f, "found {}, expected {}", self.found, self.expected.join(" or "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    Mismatch { expected: Type, found: Type },
    UndefinedVariable(String),
    UndefinedFunction(String),
    ArityMismatch { function: String, expected: usize, found: usize },
    /// Any other static rule: scoping, annotation placement, returns,
    /// recursion.
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct TypeError {
    pub pos: Pos,
    pub kind: TypeErrorKind,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.pos)?;
        match &self.kind {
            TypeErrorKind::Mismatch { expected, found } => {
                write!(f, "type error: expected {expected}, found {found}")
            }
            TypeErrorKind::UndefinedVariable(v) => write!(f, "undefined variable `{v}`"),
            TypeErrorKind::UndefinedFunction(v) => write!(f, "undefined function `{v}`"),
            TypeErrorKind::ArityMismatch {
                function,
                expected,
                found,
            } => write!(f, "`{function}` takes {expected} arguments, given {found}"),
            TypeErrorKind::Invalid(m) => f.write_str(m),
        }
    }
}

/// Parse or type errors from [`crate::check_source`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
    Type(Vec<TypeError>),
}
