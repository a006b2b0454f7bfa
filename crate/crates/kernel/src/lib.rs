// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! The trusted certificate checker.
//!
//! A [`Certificate`] is a natural-deduction derivation extended with a
//! Farkas rule for linear integer arithmetic, ground evaluation, equality
//! rewriting and a closed catalog of theory axioms. [`check_certificate`]
//! validates one certificate against one goal formula. It performs no
//! proof search.
//!
//! This crate depends only on the logic crate; keep it that way.

pub mod axioms;
mod cert;
mod check;
pub mod linear;

pub use cert::{parse_certificate, parse_certificate_with, CertSyntaxError, Certificate};
pub use check::{check_certificate, Rejection, Verdict};
