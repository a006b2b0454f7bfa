// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Minimal s-expression reader shared by the formula and certificate
//! text formats. `;` starts a comment running to the end of the line.

use std::fmt;

use thiserror::Error;

/// Deepest nesting accepted by the reader.
pub const MAX_DEPTH: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("s-expression error at byte {pos}: {msg}")]
pub struct SexpError {
    pub pos: usize,
    pub msg: String,
}

impl Sexp {
    pub fn pos(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// Head symbol and arguments of a non-empty list whose head is an atom.
    pub fn head(&self) -> Option<(&str, &[Sexp])> {
        let items = self.as_list()?;
        let (h, rest) = items.split_first()?;
        Some((h.as_atom()?, rest))
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a, _) => f.write_str(a),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn is_delim(b: u8) -> bool {
    b.is_ascii_whitespace() || b == b'(' || b == b')' || b == b';'
}

/// Reads exactly one s-expression; trailing non-comment input is an error.
pub fn parse_sexp(text: &str) -> Result<Sexp, SexpError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut stack: Vec<(Vec<Sexp>, usize)> = Vec::new();
    let mut result: Option<Sexp> = None;
    let err = |pos, msg: &str| SexpError {
        pos,
        msg: msg.to_string(),
    };
    loop {
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else if bytes[pos] == b';' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        if pos >= bytes.len() {
            break;
        }
        if result.is_some() {
            return Err(err(pos, "trailing input"));
        }
        let item = match bytes[pos] {
            b'(' => {
                if stack.len() >= MAX_DEPTH {
                    return Err(err(pos, "nesting too deep"));
                }
                stack.push((Vec::new(), pos));
                pos += 1;
                continue;
            }
            b')' => {
                let Some((items, start)) = stack.pop() else {
                    return Err(err(pos, "unbalanced ')'"));
                };
                pos += 1;
                Sexp::List(items, start)
            }
            _ => {
                let start = pos;
                while pos < bytes.len() && !is_delim(bytes[pos]) {
                    pos += 1;
                }
                Sexp::Atom(text[start..pos].to_string(), start)
            }
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(item),
            None => result = Some(item),
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(err(*start, "unclosed '('"));
    }
    result.ok_or_else(|| err(pos, "empty input"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let s = parse_sexp("(a (b c) ; note\n d)").unwrap();
        assert_eq!(s.to_string(), "(a (b c) d)");
    }

    #[test]
    fn rejects_truncated_and_trailing_input() {
        assert!(parse_sexp("(a (b").is_err());
        assert!(parse_sexp("a b").is_err());
        assert!(parse_sexp(")").is_err());
        assert!(parse_sexp("").is_err());
    }

    #[test]
    fn depth_is_limited() {
        let deep = "(".repeat(MAX_DEPTH + 1);
        assert!(parse_sexp(&deep).unwrap_err().msg.contains("deep"));
    }
}
