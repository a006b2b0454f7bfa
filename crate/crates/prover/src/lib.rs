// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Untrusted proof search producing kernel certificates.
//!
//! ```
//! use std::time::Duration;
//! use lissom_logic::parse_closed;
//! use lissom_prover::{prove, Outcome};
//!
//! let (_, goal) = parse_closed("(closed ((x int)) (imp (le 0 x) (le 1 (add x 1))))").unwrap();
//! assert!(matches!(prove(&goal, Duration::from_secs(5)), Outcome::Proved(_)));
//! ```

use std::time::{Duration, Instant};

use lissom_kernel::{check_certificate, Certificate};
use lissom_logic::Formula;

pub mod farkas;
mod proof;
mod search;

/// Result of a proof attempt.
#[derive(Clone, Debug)]
pub enum Outcome {
    /// A certificate the kernel accepts for the goal.
    Proved(Certificate),
    /// Subgoals the search could not close, each closed over the
    /// hypotheses in scope.
    GiveUp(Vec<Formula>),
}

impl Outcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, Outcome::Proved(_))
    }
}

/// Searches for a certificate of `goal` within `budget`.
///
/// A returned certificate has already been accepted by the kernel.
pub fn prove(goal: &Formula, budget: Duration) -> Outcome {
    if goal.check_sorts().is_err() {
        return Outcome::GiveUp(vec![goal.clone()]);
    }
    let mut s = search::Search::new(goal, Instant::now() + budget);
    match s.goal(&search::Facts::default(), goal) {
        Some(pf) => {
            let cert = proof::render(&pf);
            if check_certificate(goal, &cert).is_accept() {
                Outcome::Proved(cert)
            } else {
                Outcome::GiveUp(vec![goal.clone()])
            }
        }
        None => {
            let mut left = s.residuals;
            if left.is_empty() {
                left.push(goal.clone());
            }
            left.truncate(8);
            Outcome::GiveUp(left)
        }
    }
}
