// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! The producer side of the toolchain: from LISS source to a certified
//! bundle.
//!
//! Source obligations are proved after renaming them into bytecode
//! variables, so each certificate is already keyed by the id of the
//! bytecode obligation the consumer will regenerate.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use lissom_bundle::PccBundle;
use lissom_compiler::{compile, translate_formula, VarMap};
use lissom_lang::{check_source, SourceError, TypedProgram};
use lissom_logic::Formula;
use lissom_prover::{prove, Outcome};
use lissom_vcgen::{bytecode_obligations, obligation_id, source_obligations, Location, Obligation, Site, VcError};
use lissom_vm::{check_module, MalformedModule};
use thiserror::Error;

pub use lissom_bundle as bundle;

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(10);

/// A source obligation the prover could not discharge.
#[derive(Clone, Debug)]
pub struct Unproved {
    pub id: String,
    pub function: String,
    pub site: Site,
    pub location: Location,
    pub residuals: Vec<Formula>,
}

impl fmt::Display for Unproved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} at {} ({})", self.function, self.site, self.location, &self.id[..12])
    }
}

#[derive(Debug, Error)]
pub enum ProducerFailure {
    #[error("{0}")]
    Source(#[from] SourceError),
    #[error("{0}")]
    Vc(#[from] VcError),
    #[error("compiled module rejected: {0}")]
    Loader(#[from] MalformedModule),
    #[error("unproved obligations:\n{}", .0.iter().map(|u| format!("  {u}")).collect::<Vec<_>>().join("\n"))]
    Unproved(Vec<Unproved>),
    #[error("bytecode obligation {id} has no source counterpart")]
    Correspondence { id: String },
    #[error("no zero-argument `main`")]
    NoEntry,
}

/// A source obligation restated over bytecode variable names.
pub fn translated(p: &TypedProgram, o: &Obligation) -> Formula {
    let f = p.function(&o.provenance.function).expect("obligation of a known function");
    translate_formula(&o.formula, &VarMap::of(f)).expect("source obligations mention only mapped names")
}

fn prove_all(goals: &[(String, Formula)], budget: Duration) -> Vec<Outcome> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(goals.len().max(1));
    let mut out = vec![None; goals.len()];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                std::thread::Builder::new()
                    .stack_size(64 << 20)
                    .spawn_scoped(s, move || {
                        (w..goals.len())
                            .step_by(workers)
                            .map(|i| (i, prove(&goals[i].1, budget)))
                            .collect::<Vec<_>>()
                    })
                    .expect("spawn prover thread")
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("prover thread") {
                out[i] = Some(r);
            }
        }
    });
    out.into_iter().map(Option::unwrap).collect()
}

/// Parses, proves, compiles and packages a program. `budget` bounds the
/// search for each obligation.
pub fn produce_bundle(source: &str, budget: Duration) -> Result<PccBundle, ProducerFailure> {
    let p = check_source(source)?;
    if p.function("main").is_none_or(|f| !f.decl.params.is_empty()) {
        return Err(ProducerFailure::NoEntry);
    }
    let obs = source_obligations(&p)?;

    let mut goals: BTreeMap<String, (Formula, &Obligation)> = BTreeMap::new();
    for o in &obs {
        let f = translated(&p, o);
        goals.entry(obligation_id(&f)).or_insert((f, o));
    }
    let list: Vec<(String, Formula)> = goals.iter().map(|(id, (f, _))| (id.clone(), f.clone())).collect();
    let outcomes = prove_all(&list, budget);

    let mut certs = BTreeMap::new();
    let mut failed = Vec::new();
    for ((id, _), outcome) in list.iter().zip(outcomes) {
        match outcome {
            Outcome::Proved(c) => {
                certs.insert(id.clone(), c.to_string());
            }
            Outcome::GiveUp(residuals) => {
                let o = goals[id].1;
                failed.push(Unproved {
                    id: id.clone(),
                    function: o.provenance.function.clone(),
                    site: o.provenance.site,
                    location: o.provenance.location,
                    residuals,
                });
            }
        }
    }
    if !failed.is_empty() {
        failed.sort_by_key(|u| (u.function.clone(), format!("{}", u.location)));
        return Err(ProducerFailure::Unproved(failed));
    }

    let module = compile(&p).0;
    let loaded = check_module(module.clone())?;
    let bobs = bytecode_obligations(&loaded)?;
    if let Some(o) = bobs.iter().find(|o| !certs.contains_key(&o.id)) {
        return Err(ProducerFailure::Correspondence { id: o.id.clone() });
    }
    Ok(PccBundle::new(&module, "main", bobs.len(), certs))
}
