// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! The `.lpc` container. The layout is specified in `docs/formats.md`.

use std::collections::BTreeMap;

use lissom_kernel::axioms::CATALOG_VERSION;
use lissom_vm::{encode_module, BytecodeModule};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"LPC1";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub version: u64,
    pub entry: String,
    pub bytecode_sha256: [u8; 32],
    /// SHA-256 of the encoded certificate section.
    pub certificates_sha256: [u8; 32],
    /// Number of obligations the bytecode generates, duplicates included.
    pub obligations: u64,
    /// Axiom catalog the certificates were written against.
    pub axioms: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PccBundle {
    pub manifest: Manifest,
    /// Binary module, as produced by `encode_module`.
    pub bytecode: Vec<u8>,
    /// Certificate text keyed by obligation id.
    pub certificates: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("missing LPC1 magic")]
    BadMagic,
    #[error("truncated {0}")]
    Truncated(&'static str),
    #[error("trailing bytes after {0}")]
    Trailing(&'static str),
    #[error("{0} is not UTF-8")]
    BadUtf8(&'static str),
    #[error("certificate ids are not strictly increasing at `{0}`")]
    Unsorted(String),
    #[error("`{0}` is not an obligation id")]
    BadId(String),
}

pub fn sha256(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn is_id(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

struct Writer(Vec<u8>);

impl Writer {
    fn u64(&mut self, n: u64) {
        self.0.extend_from_slice(&n.to_le_bytes());
    }
    fn bytes(&mut self, b: &[u8]) {
        self.u64(b.len() as u64);
        self.0.extend_from_slice(b);
    }
}

pub(crate) fn encode_certificates(certs: &BTreeMap<String, String>) -> Vec<u8> {
    let mut c = Writer(Vec::new());
    c.u64(certs.len() as u64);
    for (id, text) in certs {
        c.bytes(id.as_bytes());
        c.bytes(text.as_bytes());
    }
    c.0
}

struct Reader<'a> {
    rest: &'a [u8],
    what: &'static str,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: u64) -> Result<&'a [u8], FormatError> {
        if n > self.rest.len() as u64 {
            return Err(FormatError::Truncated(self.what));
        }
        let (head, tail) = self.rest.split_at(n as usize);
        self.rest = tail;
        Ok(head)
    }
    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn bytes(&mut self) -> Result<&'a [u8], FormatError> {
        let n = self.u64()?;
        self.take(n)
    }
    fn str(&mut self) -> Result<&'a str, FormatError> {
        std::str::from_utf8(self.bytes()?).map_err(|_| FormatError::BadUtf8(self.what))
    }
    fn finish(&self) -> Result<(), FormatError> {
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(FormatError::Trailing(self.what))
        }
    }
}

impl PccBundle {
    /// Packages a module with its certificates.
    pub fn new(
        module: &BytecodeModule,
        entry: &str,
        obligations: usize,
        certificates: BTreeMap<String, String>,
    ) -> PccBundle {
        let bytecode = encode_module(module);
        PccBundle {
            manifest: Manifest {
                version: FORMAT_VERSION,
                entry: entry.to_string(),
                bytecode_sha256: sha256(&bytecode),
                certificates_sha256: sha256(&encode_certificates(&certificates)),
                obligations: obligations as u64,
                axioms: CATALOG_VERSION.to_string(),
            },
            bytecode,
            certificates,
        }
    }

    /// Recomputes both content hashes after an edit.
    pub fn rehash(&mut self) {
        self.manifest.bytecode_sha256 = sha256(&self.bytecode);
        self.manifest.certificates_sha256 = sha256(&encode_certificates(&self.certificates));
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut m = Writer(Vec::new());
        m.u64(self.manifest.version);
        m.bytes(self.manifest.entry.as_bytes());
        m.0.extend_from_slice(&self.manifest.bytecode_sha256);
        m.0.extend_from_slice(&self.manifest.certificates_sha256);
        m.u64(self.manifest.obligations);
        m.bytes(self.manifest.axioms.as_bytes());

        let mut out = Writer(MAGIC.to_vec());
        out.bytes(&m.0);
        out.bytes(&self.bytecode);
        out.bytes(&encode_certificates(&self.certificates));
        out.0
    }

    /// Parses a container. Only the framing is checked here; the contents
    /// are judged by verification.
    pub fn from_bytes(bytes: &[u8]) -> Result<PccBundle, FormatError> {
        let mut r = Reader { rest: bytes, what: "container" };
        if r.take(4).map_err(|_| FormatError::BadMagic)? != MAGIC {
            return Err(FormatError::BadMagic);
        }
        r.what = "manifest section";
        let manifest = r.bytes()?;
        r.what = "bytecode section";
        let bytecode = r.bytes()?.to_vec();
        r.what = "certificate section";
        let certs = r.bytes()?;
        r.what = "container";
        r.finish()?;

        let mut m = Reader { rest: manifest, what: "manifest" };
        let version = m.u64()?;
        let entry = m.str()?.to_string();
        let bytecode_sha256 = m.take(32)?.try_into().unwrap();
        let certificates_sha256 = m.take(32)?.try_into().unwrap();
        let obligations = m.u64()?;
        let axioms = m.str()?.to_string();
        m.finish()?;

        let mut c = Reader { rest: certs, what: "certificates" };
        let n = c.u64()?;
        let mut certificates = BTreeMap::new();
        let mut last: Option<&str> = None;
        for _ in 0..n {
            let id = c.str()?;
            if !is_id(id) {
                return Err(FormatError::BadId(id.to_string()));
            }
            if last.is_some_and(|l| l >= id) {
                return Err(FormatError::Unsorted(id.to_string()));
            }
            last = Some(id);
            certificates.insert(id.to_string(), c.str()?.to_string());
        }
        c.finish()?;

        Ok(PccBundle {
            manifest: Manifest { version, entry, bytecode_sha256, certificates_sha256, obligations, axioms },
            bytecode,
            certificates,
        })
    }
}
