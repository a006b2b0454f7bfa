// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VcError {
    #[error("function `{function}`: the jump at pc {from} closes a cycle through pc {to}, which has no invariant")]
    UncoveredCycle { function: String, from: usize, to: usize },
    #[error("function `{function}`: symbolic stack mismatch at pc {pc}")]
    SymbolicStackMismatch { function: String, pc: usize },
    #[error("function `{function}`: too many {what}")]
    TooLarge { function: String, what: &'static str },
    #[error("function `{function}`: {message}")]
    Source { function: String, message: String },
}
