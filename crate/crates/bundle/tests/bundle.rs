// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use lissom_bundle::{run_verified, sha256, verify_bundle, verify_bytes, PccBundle, RunRefusal};
use lissom_prover::{prove, Outcome};
use lissom_vcgen::bytecode_obligations;
use lissom_vm::{check_module, parse_lbc, BytecodeModule, Instr, Status};
use proptest::prelude::*;

const SUM: &str = "
.func main 0 3 void
#var 0 n_s0 int
#var 1 i_s1 int
#var 2 s_s2 int
#invariant head (and (le 0 i_s1) (eq (mul 2 s_s2) (mul i_s1 (add i_s1 1))))
  READ; STORE 0
  PUSH 0; STORE 1
  PUSH 0; STORE 2
head:
  LOAD 1; LOAD 0; LT; JZ done
  LOAD 1; PUSH 1; ADD; STORE 1
  LOAD 2; LOAD 1; ADD; STORE 2
  JMP head
done:
  LOAD 2; PRINT
  RET
.end
";

const GET: &str = "
.func get 2 2 int
#var 0 v_s0 vec
#var 1 i_s1 int
#requires (and (le 0 i_s1) (lt i_s1 (len v_s0)))
  LOAD 0; LOAD 1; GETIDX; RET
.end
.func main 0 1 void
#var 0 v_s0 vec
  PUSH 3; NEWVEC; STORE 0
  LOAD 0; PUSH 2; PUSH 7; SETIDX; STORE 0
  LOAD 0; PUSH 2; CALL get; PRINT
  RET
.end
";

fn certify(m: &BytecodeModule) -> PccBundle {
    let loaded = check_module(m.clone()).unwrap();
    let obs = bytecode_obligations(&loaded).unwrap();
    let mut certs = BTreeMap::new();
    for o in &obs {
        match prove(&o.formula, Duration::from_secs(20)) {
            Outcome::Proved(c) => certs.insert(o.id.clone(), c.to_string()),
            Outcome::GiveUp(r) => panic!("unproved {}: {r:?}", o.formula),
        };
    }
    PccBundle::new(m, "main", obs.len(), certs)
}

fn module(text: &str) -> BytecodeModule {
    parse_lbc(text).unwrap()
}

fn sum_bundle() -> PccBundle {
    certify(&module(SUM))
}

#[test]
fn certified_bundle_verifies_and_runs() {
    let b = sum_bundle();
    let r = verify_bundle(&b);
    assert!(r.is_accept(), "{}", r.to_text());
    assert_eq!(r.obligations.len() as u64, b.manifest.obligations);
    let out = run_verified(&b, &[4], 10_000).unwrap();
    assert_eq!(out.outputs, vec![10]);
}

#[test]
fn verification_does_not_imply_termination() {
    let out = run_verified(&sum_bundle(), &[4], 1).unwrap();
    assert_eq!(out.status, Status::OutOfFuel);
}

#[test]
fn containers_round_trip_byte_for_byte() {
    let b = sum_bundle();
    let bytes = b.to_bytes();
    assert_eq!(&bytes[..4], b"LPC1");
    assert_eq!(PccBundle::from_bytes(&bytes).unwrap(), b);
    assert_eq!(sum_bundle().to_bytes(), bytes);
    assert!(verify_bytes(&bytes).is_accept());
}

#[test]
fn flipped_bytecode_byte_fails_the_hash_gate() {
    let mut b = sum_bundle();
    let n = b.bytecode.len();
    b.bytecode[n / 2] ^= 1;
    let r = verify_bundle(&b);
    assert!(matches!(&r.overall, lissom_bundle::Verdict::Reject(w) if w.contains("hash mismatch")));
    assert!(r.obligations.is_empty());
    assert!(matches!(run_verified(&b, &[4], 100), Err(RunRefusal::RefusedUnverified(_))));
}

fn rehashed(b: &PccBundle, m: &BytecodeModule) -> PccBundle {
    PccBundle::new(m, &b.manifest.entry, b.manifest.obligations as usize, b.certificates.clone())
}

/// Certificate edits made by someone who also fixes up the hashes.
fn edited(b: &PccBundle, edit: impl FnOnce(&mut PccBundle)) -> PccBundle {
    let mut out = b.clone();
    edit(&mut out);
    out.rehash();
    out
}

#[test]
fn semantic_mutation_with_recomputed_hash_loses_its_certificates() {
    let b = certify(&module(GET));
    assert!(verify_bundle(&b).is_accept());
    let mut m = module(GET);
    let main = m.functions.iter_mut().find(|f| f.name == "main").unwrap();
    let at = main.code.iter().rposition(|i| *i == Instr::Push(2)).unwrap();
    main.code[at] = Instr::Push(3);
    let r = verify_bundle(&rehashed(&b, &m));
    assert!(!r.is_accept());
    assert!(r.obligations.iter().any(|o| o.verdict == lissom_bundle::Verdict::Reject("missing certificate".into())));
}

#[test]
fn certificate_swaps_and_deletions_are_rejected() {
    let b = sum_bundle();
    let ids: Vec<String> = b.certificates.keys().cloned().collect();
    assert!(ids.len() >= 2);

    let (x, y) = (b.certificates[&ids[0]].clone(), b.certificates[&ids[1]].clone());
    let swapped = edited(&b, |s| {
        s.certificates.insert(ids[0].clone(), y);
        s.certificates.insert(ids[1].clone(), x);
    });
    assert!(!verify_bundle(&swapped).is_accept());

    let dropped = edited(&b, |d| {
        d.certificates.remove(&ids[0]);
    });
    assert!(!verify_bundle(&dropped).is_accept());

    let extra = edited(&b, |e| {
        e.certificates.insert("0".repeat(64), "(eval true)".into());
    });
    assert!(!verify_bundle(&extra).is_accept());

    let forged = edited(&b, |f| {
        for c in f.certificates.values_mut() {
            *c = "(eval true)".into();
        }
    });
    assert!(!verify_bundle(&forged).is_accept());

    let mut unhashed = b.clone();
    unhashed.certificates.insert(ids[0].clone(), b.certificates[&ids[0]].clone() + " ");
    let r = verify_bundle(&unhashed);
    assert!(matches!(&r.overall, lissom_bundle::Verdict::Reject(w) if w.contains("certificate section hash")));

    let mut miscounted = b.clone();
    miscounted.manifest.obligations += 1;
    assert!(!verify_bundle(&miscounted).is_accept());
}

#[test]
fn weakened_invariant_is_rejected() {
    let b = sum_bundle();
    let weak = SUM.replace("(and (le 0 i_s1) (eq (mul 2 s_s2) (mul i_s1 (add i_s1 1))))", "(le 0 i_s1)");
    assert!(!verify_bundle(&rehashed(&b, &module(&weak))).is_accept());
}

#[test]
fn unsafe_code_cannot_be_certified() {
    let bad = GET.replace("PUSH 2; CALL get", "PUSH 3; CALL get");
    let loaded = check_module(module(&bad)).unwrap();
    let obs = bytecode_obligations(&loaded).unwrap();
    assert!(obs.iter().any(|o| !prove(&o.formula, Duration::from_secs(2)).is_proved()));
}

#[test]
fn framing_errors_are_reported() {
    assert!(!verify_bytes(b"").is_accept());
    assert!(!verify_bytes(b"LPC0").is_accept());
    let mut bytes = sum_bundle().to_bytes();
    bytes.push(0);
    assert!(!verify_bytes(&bytes).is_accept());
    assert_eq!(sha256(b"").len(), 32);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_byte_corruptions_never_verify(at in any::<prop::sample::Index>(), delta in 1u8..=255) {
        let mut bytes = certify(&module(GET)).to_bytes();
        let i = at.index(bytes.len());
        bytes[i] = bytes[i].wrapping_add(delta);
        prop_assert!(!verify_bytes(&bytes).is_accept());
    }
}

fn path_deps(dir: &Path) -> Vec<(String, PathBuf)> {
    let text = std::fs::read_to_string(dir.join("Cargo.toml")).unwrap();
    let doc: toml::Table = text.parse().unwrap();
    let mut out = Vec::new();
    if let Some(deps) = doc.get("dependencies").and_then(|d| d.as_table()) {
        for (name, spec) in deps {
            let optional = spec.get("optional").and_then(|o| o.as_bool()).unwrap_or(false);
            if let (Some(p), false) = (spec.get("path").and_then(|p| p.as_str()), optional) {
                let features = spec.get("features").and_then(|f| f.as_array()).cloned().unwrap_or_default();
                assert!(features.is_empty(), "{name} pulled in with features {features:?}");
                out.push((name.clone(), dir.join(p)));
            }
        }
    }
    out
}

#[test]
fn consumer_does_not_depend_on_the_producer() {
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![PathBuf::from(env!("CARGO_MANIFEST_DIR"))];
    while let Some(dir) = stack.pop() {
        for (name, p) in path_deps(&dir) {
            if seen.insert(name) {
                stack.push(p);
            }
        }
    }
    let expected = ["lissom-kernel", "lissom-logic", "lissom-vcgen", "lissom-vm"];
    assert_eq!(seen.iter().map(String::as_str).collect::<Vec<_>>(), expected);
}

#[test]
fn resolved_build_excludes_the_producer() {
    let out = std::process::Command::new(env!("CARGO"))
        .args(["tree", "--offline", "-p", "lissom-bundle", "-e", "normal", "--prefix", "none"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let tree = String::from_utf8(out.stdout).unwrap();
    assert!(tree.contains("lissom-vcgen"));
    for producer in ["lissom-lang", "lissom-compiler", "lissom-prover"] {
        assert!(!tree.contains(producer), "{producer} reached:\n{tree}");
    }
}
