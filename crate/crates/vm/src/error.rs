// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    Pc(usize),
    Byte(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(l) => write!(f, "line {l}"),
            Location::Pc(p) => write!(f, "pc {p}"),
            Location::Byte(b) => write!(f, "byte {b}"),
        }
    }
}

/// Structural rejection of a module; the consumer treats it as failed
/// verification.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct MalformedModule {
    pub reason: String,
    pub function: Option<String>,
    pub location: Option<Location>,
}

impl MalformedModule {
    pub fn new(reason: impl Into<String>) -> Self {
        MalformedModule {
            reason: reason.into(),
            function: None,
            location: None,
        }
    }

    pub fn in_function(mut self, name: &str) -> Self {
        self.function.get_or_insert_with(|| name.to_string());
        self
    }

    pub fn at(mut self, loc: Location) -> Self {
        self.location.get_or_insert(loc);
        self
    }
}

impl fmt::Display for MalformedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("malformed module")?;
        if let Some(func) = &self.function {
            write!(f, " in `{func}`")?;
        }
        if let Some(loc) = &self.location {
            write!(f, " at {loc}")?;
        }
        write!(f, ": {}", self.reason)
    }
}
