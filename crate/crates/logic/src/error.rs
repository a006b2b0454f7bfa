// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::formula::Sort;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("sort mismatch in `{context}`: expected {expected}, found {found}")]
    SortMismatch {
        expected: Sort,
        found: Sort,
        context: String,
    },
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("formula is not ground: {0}")]
    NonGround(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("state space of {size} states exceeds the ceiling of {ceiling}")]
    TooLarge { size: u128, ceiling: u128 },
}

/// Failure of a partial operation during ground evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivByZero,
    #[error("index out of bounds")]
    IdxOutOfBounds,
    #[error("arithmetic overflow")]
    Overflow,
}
