// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use crate::ast::Pos;
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Unsigned; a leading minus is the parser's business.
    Int(u64),
    Ident(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Kw(s) | Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "and", "assert", "bool", "card", "diff", "div", "else", "ensures", "false", "forall", "fun",
    "if", "in", "int", "inter", "invariant", "len", "mod", "newvec", "not", "or", "print", "read",
    "requires", "return", "set", "subset", "true", "union", "var", "vec", "while",
];

// Longest first, so that prefixes lose.
const SYMBOLS: &[&str] = &[
    "<==>", "==>", "\\result", "\\old", ":=", "::", "!=", "<=", ">=", "(", ")", "{", "}", "[", "]",
    ",", ";", ":", "=", "<", ">", "+", "-", "*",
];

pub struct Lexed {
    pub toks: Vec<(Tok, Pos)>,
}

pub fn lex(src: &str) -> Result<Lexed, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < bytes.len() {
        let c = bytes[i];
        let pos = Pos { line, col };
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i]
                .parse::<u64>()
                .map_err(|_| ParseError::lexical(pos, "integer literal too large"))?;
            toks.push((Tok::Int(n), pos));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word.to_string()),
            };
            toks.push((tok, pos));
        } else if let Some(s) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            i += s.len();
            toks.push((Tok::Sym(s), pos));
        } else {
            let ch = src[i..].chars().next().expect("in bounds");
            return Err(ParseError::lexical(pos, format!("unexpected character `{ch}`")));
        }
        col += (i - start) as u32;
    }
    toks.push((Tok::Eof, Pos { line, col }));
    Ok(Lexed { toks })
}
