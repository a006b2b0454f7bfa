// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use lissom_logic::{closed_text, Formula};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Source,
    Bytecode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SafetyKind {
    DivByZero,
    OutOfBounds,
}

/// Why an obligation exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    /// A callee's precondition at a call.
    Precondition,
    Establishment,
    Preservation,
    Postcondition,
    Assert,
    Safety(SafetyKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Source { line: usize, col: usize },
    Pc(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub level: Level,
    pub function: String,
    pub site: Site,
    pub location: Location,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Obligation {
    /// Hex SHA-256 of the closed canonical text.
    pub id: String,
    pub formula: Formula,
    pub provenance: Provenance,
}

pub fn obligation_id(f: &Formula) -> String {
    let digest = Sha256::digest(closed_text(f).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Obligation {
    pub fn new(formula: Formula, provenance: Provenance) -> Obligation {
        Obligation {
            id: obligation_id(&formula),
            formula,
            provenance,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Source => "source",
            Level::Bytecode => "bytecode",
        })
    }
}

impl fmt::Display for SafetyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SafetyKind::DivByZero => "DivByZero",
            SafetyKind::OutOfBounds => "OutOfBounds",
        })
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Precondition => f.write_str("precondition"),
            Site::Establishment => f.write_str("establishment"),
            Site::Preservation => f.write_str("preservation"),
            Site::Postcondition => f.write_str("postcondition"),
            Site::Assert => f.write_str("assert"),
            Site::Safety(k) => write!(f, "safety({k})"),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Source { line, col } => write!(f, "{line}:{col}"),
            Location::Pc(pc) => write!(f, "pc {pc}"),
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} of `{}` at {}",
            self.level, self.site, self.function, self.location
        )
    }
}
