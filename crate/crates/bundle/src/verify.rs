// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use lissom_kernel::axioms::CATALOG_VERSION;
use lissom_kernel::{check_certificate, parse_certificate_with, Verdict as KernelVerdict};
use lissom_vcgen::{bytecode_obligations, Location, Obligation, Site};
use lissom_vm::{load_binary, run, LoadedModule, Outcome, RunError};
use thiserror::Error;

use crate::format::{encode_certificates, hex, sha256, PccBundle, FORMAT_VERSION};

const CHECK_STACK: usize = 64 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(String),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        *self == Verdict::Accept
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept => write!(f, "accept"),
            Verdict::Reject(why) => write!(f, "reject: {why}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObligationVerdict {
    pub id: String,
    pub function: String,
    pub site: Site,
    pub location: Location,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    pub load: Duration,
    pub vcgen: Duration,
    pub check: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub overall: Verdict,
    /// One verdict per regenerated obligation, in generation order.
    pub obligations: Vec<ObligationVerdict>,
    pub timings: Timings,
}

impl VerificationReport {
    pub fn is_accept(&self) -> bool {
        self.overall.is_accept()
    }

    fn rejected(why: impl Into<String>, timings: Timings) -> Self {
        VerificationReport {
            overall: Verdict::Reject(why.into()),
            obligations: Vec::new(),
            timings,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for o in &self.obligations {
            out.push_str(&format!(
                "{}  {} {} {}  {}\n",
                &o.id[..12],
                o.function,
                o.site,
                o.location,
                o.verdict
            ));
        }
        out.push_str(&format!(
            "overall: {}\ntimings: load {:?}, vcgen {:?}, check {:?}\n",
            self.overall, self.timings.load, self.timings.vcgen, self.timings.check
        ));
        out
    }
}

fn check_one(o: &Obligation, bundle: &PccBundle) -> Verdict {
    let Some(text) = bundle.certificates.get(&o.id) else {
        return Verdict::Reject("missing certificate".into());
    };
    let cert = match parse_certificate_with(text, &o.formula.free_vars()) {
        Ok(c) => c,
        Err(e) => return Verdict::Reject(format!("certificate syntax: {e}")),
    };
    match check_certificate(&o.formula, &cert) {
        KernelVerdict::Accept => Verdict::Accept,
        KernelVerdict::Reject(r) => Verdict::Reject(r.to_string()),
    }
}

fn check_all(obs: &[Obligation], bundle: &PccBundle) -> Vec<Verdict> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(obs.len().max(1));
    let mut out = vec![None; obs.len()];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                std::thread::Builder::new()
                    .stack_size(CHECK_STACK)
                    .spawn_scoped(s, move || {
                        (w..obs.len())
                            .step_by(workers)
                            .map(|i| (i, check_one(&obs[i], bundle)))
                            .collect::<Vec<_>>()
                    })
                    .expect("spawn checker thread")
            })
            .collect();
        for h in handles {
            for (i, v) in h.join().unwrap_or_default() {
                out[i] = Some(v);
            }
        }
    });
    out.into_iter()
        .map(|v| v.unwrap_or_else(|| Verdict::Reject("checker failed".into())))
        .collect()
}

/// Loads the bundle's module after the hash and manifest checks.
fn load(bundle: &PccBundle) -> Result<LoadedModule, String> {
    let m = &bundle.manifest;
    if m.version != FORMAT_VERSION {
        return Err(format!("unsupported format version {}", m.version));
    }
    if m.axioms != CATALOG_VERSION {
        return Err(format!("unknown axiom catalog `{}`", m.axioms));
    }
    if sha256(&bundle.bytecode) != m.bytecode_sha256 {
        return Err(format!(
            "bytecode hash mismatch: manifest {}, section {}",
            hex(&m.bytecode_sha256),
            hex(&sha256(&bundle.bytecode))
        ));
    }
    if sha256(&encode_certificates(&bundle.certificates)) != m.certificates_sha256 {
        return Err("certificate section hash mismatch".into());
    }
    let loaded = load_binary(&bundle.bytecode).map_err(|e| format!("loader: {e}"))?;
    match loaded.module.function(&m.entry) {
        None => Err(format!("entry function `{}` not found", m.entry)),
        Some(f) if f.nparams != 0 => Err(format!("entry function `{}` takes parameters", m.entry)),
        Some(_) => Ok(loaded),
    }
}

/// Judges a bundle. Never fails: every problem is a rejection in the report.
pub fn verify_bundle(bundle: &PccBundle) -> VerificationReport {
    let mut timings = Timings::default();
    let t = Instant::now();
    let loaded = load(bundle);
    timings.load = t.elapsed();
    let loaded = match loaded {
        Ok(l) => l,
        Err(why) => return VerificationReport::rejected(why, timings),
    };

    let t = Instant::now();
    let obs = bytecode_obligations(&loaded);
    timings.vcgen = t.elapsed();
    let obs = match obs {
        Ok(o) => o,
        Err(e) => return VerificationReport::rejected(format!("vcgen: {e}"), timings),
    };

    let t = Instant::now();
    let verdicts = check_all(&obs, bundle);
    timings.check = t.elapsed();

    let obligations: Vec<ObligationVerdict> = obs
        .iter()
        .zip(verdicts)
        .map(|(o, verdict)| ObligationVerdict {
            id: o.id.clone(),
            function: o.provenance.function.clone(),
            site: o.provenance.site,
            location: o.provenance.location,
            verdict,
        })
        .collect();

    let used: BTreeSet<&str> = obs.iter().map(|o| o.id.as_str()).collect();
    let overall = if let Some(bad) = obligations.iter().find(|o| !o.verdict.is_accept()) {
        Verdict::Reject(format!("obligation {} ({} {}) not accepted", &bad.id[..12], bad.function, bad.site))
    } else if bundle.manifest.obligations != obs.len() as u64 {
        Verdict::Reject(format!(
            "manifest claims {} obligations, bytecode generates {}",
            bundle.manifest.obligations,
            obs.len()
        ))
    } else if let Some(extra) = bundle.certificates.keys().find(|k| !used.contains(k.as_str())) {
        Verdict::Reject(format!("certificate {} matches no obligation", &extra[..12]))
    } else {
        Verdict::Accept
    };
    VerificationReport { overall, obligations, timings }
}

/// Parses and judges a `.lpc` container.
pub fn verify_bytes(bytes: &[u8]) -> VerificationReport {
    match PccBundle::from_bytes(bytes) {
        Ok(b) => verify_bundle(&b),
        Err(e) => VerificationReport::rejected(format!("malformed bundle: {e}"), Timings::default()),
    }
}

#[derive(Debug, Error)]
pub enum RunRefusal {
    #[error("refused to run unverified code: {}", .0.overall)]
    RefusedUnverified(Box<VerificationReport>),
    #[error("{0}")]
    Run(#[from] RunError),
}

/// Runs the entry function only if the bundle verifies.
pub fn run_verified(bundle: &PccBundle, inputs: &[i64], fuel: u64) -> Result<Outcome, RunRefusal> {
    let report = verify_bundle(bundle);
    if !report.is_accept() {
        return Err(RunRefusal::RefusedUnverified(Box::new(report)));
    }
    let loaded = load(bundle).expect("verified bundle loads");
    Ok(run(&loaded, &bundle.manifest.entry, inputs, fuel)?)
}

/// Runs the entry function without checking any certificate. The module is
/// still hash-checked and loaded, so it is memory-safe at the VM level.
pub fn run_unverified(bundle: &PccBundle, inputs: &[i64], fuel: u64) -> Result<Outcome, String> {
    let loaded = load(bundle)?;
    run(&loaded, &bundle.manifest.entry, inputs, fuel).map_err(|e| e.to_string())
}
