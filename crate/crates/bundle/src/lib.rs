// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Proof-carrying bundles: the `.lpc` container and the consumer gate.
//!
//! The consumer trusts only the bytecode loader, the bytecode VC generator
//! and the certificate kernel. Obligations are regenerated from the shipped
//! bytecode and each one must have an accepted certificate.

mod format;
mod verify;

pub use format::{hex, sha256, FormatError, Manifest, PccBundle, FORMAT_VERSION, MAGIC};
pub use verify::{
    run_unverified, run_verified, verify_bundle, verify_bytes, ObligationVerdict, RunRefusal, Timings,
    VerificationReport, Verdict,
};
