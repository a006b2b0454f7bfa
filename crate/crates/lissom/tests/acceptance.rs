// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance suite. Prints one line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lissom::{produce_bundle, translated};
use lissom_bundle::{verify_bundle, verify_bytes, PccBundle};
use lissom_kernel::{axioms, check_certificate, parse_certificate_with, Certificate};
use lissom_lang::{check_source, interpret, TypedProgram};
use lissom_logic::{
    canonical_text, enumerate_with, eval_with_quantifiers, parse_formula, EnumConfig, Formula,
    GroundState, Sort, Term, Validity,
};
use lissom_prover::{prove, Outcome};
use lissom_vcgen::{bytecode_obligations, source_obligations};
use lissom_vm::{
    decode_module, load_binary, run_monitored, BytecodeModule, Instr, ReturnEvent, Status,
    TrapKind, RESULT,
};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FUEL: u64 = 1_000_000;
const END_TO_END_LIMIT: Duration = Duration::from_secs(120);
const INPUT_RANGE: i64 = 3;
const MAX_COLLECTION: usize = 3;
const ORACLE_BOUND: i64 = 3;
const LINEAR_BOUND: i64 = 6;
const RANDOM_CORRUPTIONS: usize = 1000;
const FUZZED_CERTIFICATES: usize = 1000;
const LINEAR_GOALS: usize = 500;
const MIN_CURATED_TAMPERS: usize = 20;
const QUANTIFIER_RANGE: i64 = 64;

type Check = Result<String, String>;

#[derive(Clone, Copy)]
enum Shape {
    Int,
    Collection,
}

struct Program {
    name: String,
    source: String,
    typed: TypedProgram,
    inputs: Vec<Vec<i64>>,
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn workspace_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn shapes(source: &str) -> Vec<Shape> {
    let line = source
        .lines()
        .find_map(|l| l.trim().strip_prefix("// inputs:"))
        .expect("corpus program without an inputs header");
    line.split_whitespace()
        .map(|w| match w {
            "int" => Shape::Int,
            "vec" | "set" => Shape::Collection,
            other => panic!("unknown input shape {other}"),
        })
        .collect()
}

fn sequences(len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-INPUT_RANGE..=INPUT_RANGE).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Every input vector of the given shapes: integers in the input range,
/// collections as a length followed by that many elements.
fn input_space(shapes: &[Shape]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for s in shapes {
        let parts: Vec<Vec<i64>> = match s {
            Shape::Int => (-INPUT_RANGE..=INPUT_RANGE).map(|x| vec![x]).collect(),
            Shape::Collection => (0..=MAX_COLLECTION)
                .flat_map(|n| {
                    sequences(n).into_iter().map(move |mut e| {
                        e.insert(0, n as i64);
                        e
                    })
                })
                .collect(),
        };
        out = out
            .iter()
            .flat_map(|p| {
                parts.iter().map(move |q| {
                    let mut r = p.clone();
                    r.extend(q);
                    r
                })
            })
            .collect();
    }
    out
}

fn load_corpus() -> Vec<Program> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "liss"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let source = std::fs::read_to_string(&p).unwrap();
            let typed = check_source(&source).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            Program {
                name: p.file_stem().unwrap().to_string_lossy().into_owned(),
                inputs: input_space(&shapes(&source)),
                source,
                typed,
            }
        })
        .collect()
}

fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .iter()
            .map(|it| {
                let f = &f;
                std::thread::Builder::new()
                    .stack_size(64 << 20)
                    .spawn_scoped(s, move || f(it))
                    .unwrap()
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn ensures_holds(ev: &ReturnEvent<'_>) -> Result<bool, String> {
    let a = &ev.function.annotations;
    let mut state = GroundState::new();
    for (slot, (name, _)) in &a.vars {
        state.insert(name.clone(), ev.slots[*slot].clone());
    }
    for (slot, ghost) in &a.olds {
        state.insert(ghost.clone(), ev.args[*slot].clone());
    }
    if let Some(r) = ev.result {
        state.insert(RESULT.to_string(), r.clone());
    }
    eval_with_quantifiers(&a.ensures, &state, -QUANTIFIER_RANGE, QUANTIFIER_RANGE)
        .map_err(|e| e.to_string())
}

#[derive(Default)]
struct Execution {
    runs: usize,
    mismatches: Vec<String>,
    safety_traps: Vec<String>,
    ensures_checked: usize,
    ensures_violations: Vec<String>,
}

/// Runs the verified module and the reference interpreter on every input,
/// checking postconditions at each return.
fn execute(p: &Program, bundle: &PccBundle) -> Execution {
    let loaded = load_binary(&bundle.bytecode).expect("verified bytecode loads");
    let mut ex = Execution::default();
    for input in &p.inputs {
        let mut checked = 0;
        let mut violations = Vec::new();
        let vm = run_monitored(&loaded, "main", input, FUEL, &mut |ev| {
            if ev.function.annotations.ensures == Formula::True {
                return;
            }
            checked += 1;
            match ensures_holds(ev) {
                Ok(true) => {}
                Ok(false) => violations.push(format!("{} ensures false", ev.function.name)),
                Err(e) => violations.push(format!("{} ensures undefined: {e}", ev.function.name)),
            }
        })
        .expect("entry exists");
        ex.runs += 1;
        ex.ensures_checked += checked;
        for v in violations {
            ex.ensures_violations.push(format!("{} {input:?}: {v}", p.name));
        }
        if let Status::Trap(t) = &vm.status {
            if matches!(t.kind, TrapKind::DivByZero | TrapKind::OutOfBounds) {
                ex.safety_traps.push(format!("{} {input:?}: {t:?}", p.name));
            }
        }
        let src = interpret(&p.typed, "main", input, FUEL).expect("entry exists");
        let same_end = matches!(
            (&vm.status, &src.status),
            (Status::Returned(_) | Status::Halted, lissom_lang::Status::Returned(_))
        );
        if vm.outputs != src.outputs || !same_end {
            ex.mismatches.push(format!(
                "{} {input:?}: vm {:?} {:?}, interp {:?} {:?}",
                p.name, vm.outputs, vm.status, src.outputs, src.status
            ));
        }
    }
    ex
}

fn first<T: std::fmt::Display>(items: &[T]) -> String {
    items.first().map_or(String::new(), |x| format!("; first: {x}"))
}

fn criterion_1(corpus: &[Program], bundles: &[Result<PccBundle, String>], exec: &[Execution], elapsed: Duration) -> Check {
    let mut failures = Vec::new();
    for (p, b) in corpus.iter().zip(bundles) {
        match b {
            Err(e) => failures.push(format!("{}: build failed: {e}", p.name)),
            Ok(b) => {
                let r = verify_bundle(b);
                if !r.overall.is_accept() {
                    failures.push(format!("{}: verification rejected: {:?}", p.name, r.overall));
                }
            }
        }
    }
    let runs: usize = exec.iter().map(|e| e.runs).sum();
    let mismatches: Vec<&String> = exec.iter().flat_map(|e| &e.mismatches).collect();
    if !mismatches.is_empty() {
        failures.push(format!("{} output mismatches{}", mismatches.len(), first(&mismatches)));
    }
    if elapsed >= END_TO_END_LIMIT {
        failures.push(format!("took {:.1}s, limit {}s", elapsed.as_secs_f64(), END_TO_END_LIMIT.as_secs()));
    }
    if failures.is_empty() {
        Ok(format!(
            "{} programs built and verified, {runs} runs match the interpreter, {:.1}s (limit {}s)",
            corpus.len(),
            elapsed.as_secs_f64(),
            END_TO_END_LIMIT.as_secs()
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn oracle_valid(f: &Formula) -> Result<(), String> {
    let cfg = EnumConfig::new(ORACLE_BOUND, MAX_COLLECTION, MAX_COLLECTION);
    match enumerate_with(f, &cfg) {
        Ok(Validity::Valid) => Ok(()),
        Ok(Validity::CounterModel(s)) => Err(format!("counter-model {s:?}")),
        Ok(Validity::Undefined(s, e)) => Err(format!("undefined ({e}) at {s:?}")),
        Err(e) => Err(e.to_string()),
    }
}

fn criterion_2(corpus: &[Program], exec: &[Execution]) -> Check {
    let results = par_map(corpus, |p| {
        let mut formulas: Vec<(String, Formula)> = Vec::new();
        for o in source_obligations(&p.typed).map_err(|e| format!("{}: {e}", p.name))? {
            formulas.push((format!("source {} {}", o.provenance.function, o.provenance.location), o.formula));
        }
        let m = lissom_compiler::compile(&p.typed).0;
        let loaded = lissom_vm::check_module(m).map_err(|e| format!("{}: {e}", p.name))?;
        for o in bytecode_obligations(&loaded).map_err(|e| format!("{}: {e}", p.name))? {
            formulas.push((format!("bytecode {} {}", o.provenance.function, o.provenance.location), o.formula));
        }
        let mut bad = Vec::new();
        for (what, f) in &formulas {
            if let Err(e) = oracle_valid(f) {
                bad.push(format!("{}: {what}: {e}", p.name));
            }
        }
        Ok::<_, String>((formulas.len(), bad))
    });
    let mut total = 0;
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok((n, bad)) => {
                total += n;
                failures.extend(bad);
            }
            Err(e) => failures.push(e),
        }
    }
    let traps: Vec<&String> = exec.iter().flat_map(|e| &e.safety_traps).collect();
    let violations: Vec<&String> = exec.iter().flat_map(|e| &e.ensures_violations).collect();
    let checked: usize = exec.iter().map(|e| e.ensures_checked).sum();
    let runs: usize = exec.iter().map(|e| e.runs).sum();
    if !traps.is_empty() {
        failures.push(format!("{} safety traps{}", traps.len(), first(&traps)));
    }
    if !violations.is_empty() {
        failures.push(format!("{} ensures violations{}", violations.len(), first(&violations)));
    }
    if failures.is_empty() {
        Ok(format!(
            "{total} obligations valid at bound {ORACLE_BOUND}; {runs} runs, 0 safety traps, {checked} postconditions checked, 0 violated"
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_3(corpus: &[Program]) -> Check {
    let mut total = 0;
    let mut failures = Vec::new();
    for p in corpus {
        let src = source_obligations(&p.typed).map_err(|e| e.to_string())?;
        let mut a: Vec<String> = src.iter().map(|o| canonical_text(&translated(&p.typed, o))).collect();
        let m = lissom_compiler::compile(&p.typed).0;
        let loaded = lissom_vm::check_module(m).map_err(|e| e.to_string())?;
        let mut b: Vec<String> = bytecode_obligations(&loaded)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|o| canonical_text(&o.formula))
            .collect();
        a.sort();
        b.sort();
        total += a.len();
        if a != b {
            failures.push(format!("{}: {} source vs {} bytecode obligations differ", p.name, a.len(), b.len()));
        }
    }
    if failures.is_empty() {
        Ok(format!("{total} obligations identical as multisets across {} programs", corpus.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn with_module(b: &PccBundle, edit: impl FnOnce(&mut BytecodeModule)) -> Vec<u8> {
    let mut m = decode_module(&b.bytecode).expect("bundle bytecode decodes");
    edit(&mut m);
    PccBundle::new(&m, &b.manifest.entry, b.manifest.obligations as usize, b.certificates.clone()).to_bytes()
}

/// Replaces the first instruction of `func` satisfying `pick`, recomputing
/// the bytecode hash as a forger would.
fn patch(b: &PccBundle, func: &str, pick: impl Fn(&Instr) -> bool, new: Instr) -> Vec<u8> {
    with_module(b, |m| {
        let f = m.functions.iter_mut().find(|f| f.name == func).unwrap_or_else(|| panic!("no function {func}"));
        let at = f.code.iter().position(pick).unwrap_or_else(|| panic!("tamper target missing in {func}"));
        f.code[at] = new;
    })
}

fn with_certs(b: &PccBundle, edit: impl FnOnce(&mut BTreeMap<String, String>)) -> Vec<u8> {
    let mut out = b.clone();
    edit(&mut out.certificates);
    out.rehash();
    out.to_bytes()
}

fn with_manifest(b: &PccBundle, edit: impl FnOnce(&mut PccBundle)) -> Vec<u8> {
    let mut out = b.clone();
    edit(&mut out);
    out.to_bytes()
}

fn curated_tampers(by_name: &BTreeMap<&str, &PccBundle>) -> Vec<(&'static str, Vec<u8>)> {
    let b = |n: &str| *by_name.get(n).unwrap_or_else(|| panic!("corpus program {n} missing"));
    let (sum, gcd, vmax, rev, search, safediv) = (b("sum"), b("gcd"), b("vmax"), b("reverse"), b("search"), b("safediv"));
    let (clamp, abs, filter, union) = (b("clamp"), b("abs"), b("filter"), b("union"));
    vec![
        ("bytecode byte flipped", with_manifest(sum, |x| {
            let at = x.bytecode.len() / 2;
            x.bytecode[at] ^= 1;
        })),
        ("bytecode hash altered", with_manifest(sum, |x| x.manifest.bytecode_sha256[0] ^= 1)),
        ("certificate hash altered", with_manifest(gcd, |x| x.manifest.certificates_sha256[31] ^= 0x80)),
        ("sum: add became sub", patch(sum, "sum", |i| *i == Instr::Add, Instr::Sub)),
        ("sum: accumulator starts at 1", patch(sum, "sum", |i| *i == Instr::Push(0), Instr::Push(1))),
        ("gcd: mod became div", patch(gcd, "gcd", |i| *i == Instr::Mod, Instr::Div)),
        ("vmax: first read moved to index 1", patch(vmax, "vmax", |i| *i == Instr::Push(0), Instr::Push(1))),
        ("reverse: index arithmetic flipped", patch(rev, "reverse", |i| *i == Instr::Sub, Instr::Add)),
        ("search: sentinel changed", patch(search, "find", |i| *i == Instr::Push(-1), Instr::Push(0))),
        ("safediv: zero test weakened", patch(safediv, "safediv", |i| *i == Instr::Eq, Instr::Lt)),
        ("clamp: comparison changed", patch(clamp, "clamp", |i| *i == Instr::Lt, Instr::Eq)),
        ("abs: negation removed", patch(abs, "abs", |i| *i == Instr::Sub, Instr::Add)),
        ("filter: jump retargeted", patch(filter, "filter", |i| matches!(i, Instr::Jz(_)), Instr::Jz(0))),
        ("union: postcondition claims disjointness", with_module(union, |m| {
            let f = m.functions.iter_mut().find(|f| f.name == "ucard").unwrap();
            let bound = match &f.annotations.ensures {
                Formula::And(_, b) => (**b).clone(),
                other => panic!("unexpected ucard postcondition {other:?}"),
            };
            let Formula::Le(r, total) = bound else { panic!("unexpected ucard bound") };
            f.annotations.ensures = Formula::Eq(r, total);
        })),
        ("sum: invariant weakened to true", with_module(sum, |m| {
            let f = m.functions.iter_mut().find(|f| f.name == "sum").unwrap();
            for inv in f.annotations.invariants.values_mut() {
                *inv = Formula::True;
            }
        })),
        ("vmax: precondition deleted", with_module(vmax, |m| {
            m.functions.iter_mut().find(|f| f.name == "vmax").unwrap().annotations.requires = Formula::True;
        })),
        ("gcd: loop invariant deleted", with_module(gcd, |m| {
            m.functions.iter_mut().find(|f| f.name == "gcd").unwrap().annotations.invariants.clear();
        })),
        ("abs: postcondition replaced by false", with_module(abs, |m| {
            m.functions.iter_mut().find(|f| f.name == "abs").unwrap().annotations.ensures = Formula::False;
        })),
        ("search: certificates swapped", with_certs(search, |c| {
            let ids: Vec<String> = c.keys().cloned().collect();
            let (x, y) = (c[&ids[0]].clone(), c[&ids[1]].clone());
            c.insert(ids[0].clone(), y);
            c.insert(ids[1].clone(), x);
        })),
        ("filter: certificates forged as eval", with_certs(filter, |c| {
            for t in c.values_mut() {
                *t = "(eval true)".into();
            }
        })),
        ("union: certificate deleted", with_certs(union, |c| {
            let id = c.keys().next().unwrap().clone();
            c.remove(&id);
        })),
        ("gcd: certificate truncated", with_certs(gcd, |c| {
            let t = c.values_mut().last().unwrap();
            t.truncate(t.len() / 2);
        })),
        ("gcd: stray certificate added", with_certs(gcd, |c| {
            c.insert("f".repeat(64), "(eval true)".into());
        })),
        ("abs: obligation count lowered", with_manifest(abs, |x| x.manifest.obligations -= 1)),
        ("abs: entry moved to a function with parameters", with_manifest(abs, |x| x.manifest.entry = "abs".into())),
        ("clamp: axiom catalog renamed", with_manifest(clamp, |x| x.manifest.axioms = "lissom-axioms-0".into())),
        ("clamp: format version bumped", with_manifest(clamp, |x| x.manifest.version += 1)),
        ("safediv: trailing byte appended", {
            let mut v = safediv.to_bytes();
            v.push(0);
            v
        }),
        ("sum bytecode with gcd certificates", {
            let mut x = gcd.clone();
            x.bytecode = sum.bytecode.clone();
            x.rehash();
            x.to_bytes()
        }),
    ]
}

fn accepted(bytes: &[u8]) -> Result<bool, ()> {
    catch_unwind(AssertUnwindSafe(|| verify_bytes(bytes).overall.is_accept())).map_err(|_| ())
}

fn criterion_4(corpus: &[Program], bundles: &[Result<PccBundle, String>]) -> Check {
    let by_name: BTreeMap<&str, &PccBundle> = corpus
        .iter()
        .zip(bundles)
        .filter_map(|(p, b)| b.as_ref().ok().map(|b| (p.name.as_str(), b)))
        .collect();
    let mut failures = Vec::new();
    let tampers = curated_tampers(&by_name);
    for (what, bytes) in &tampers {
        match accepted(bytes) {
            Ok(false) => {}
            Ok(true) => failures.push(format!("tamper accepted: {what}")),
            Err(()) => failures.push(format!("verifier panicked: {what}")),
        }
    }
    if tampers.len() < MIN_CURATED_TAMPERS {
        failures.push(format!("only {} curated tampers", tampers.len()));
    }

    let originals: Vec<Vec<u8>> = by_name.values().map(|b| b.to_bytes()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0115_50e4);
    let (mut accepts, mut panics) = (0, 0);
    for i in 0..RANDOM_CORRUPTIONS {
        let mut bytes = originals[i % originals.len()].clone();
        let at = rng.gen_range(0..bytes.len());
        bytes[at] ^= rng.gen_range(1..=255u8);
        match accepted(&bytes) {
            Ok(true) => accepts += 1,
            Ok(false) => {}
            Err(()) => panics += 1,
        }
    }
    if accepts + panics > 0 {
        failures.push(format!("random corruptions: {accepts} accepted, {panics} panics"));
    }
    if failures.is_empty() {
        Ok(format!(
            "{} curated tampers rejected; {RANDOM_CORRUPTIONS} random corruptions: 0 accepted, 0 panics",
            tampers.len()
        ))
    } else {
        Err(failures.join("; "))
    }
}

/// Pairs of a valid goal and an invalid neighbour.
const GOAL_PAIRS: &[(&str, &str)] = &[
    ("(imp (le 0 x) (le 1 (add x 1)))", "(imp (le 0 x) (le 2 (add x 1)))"),
    ("(imp (and (le x y) (le y z)) (le x z))", "(imp (and (le x y) (le y z)) (lt x z))"),
    ("(or (le x 0) (lt 0 x))", "(or (lt x 0) (lt 0 x))"),
    ("(subset a (union a b))", "(subset (union a b) a)"),
    ("(imp (mem x a) (mem x (union a b)))", "(imp (mem x (union a b)) (mem x a))"),
    ("(imp (eq x y) (eq (mul x x) (mul y y)))", "(imp (le x y) (le (mul x x) (mul y y)))"),
    (
        "(forall k (imp (and (le 0 k) (lt k 3)) (lt k 4)))",
        "(forall k (imp (le 0 k) (lt k 4)))",
    ),
    (
        "(imp (and (le 0 i) (lt i (len v))) (eq (len (upd v i x)) (len v)))",
        "(imp (and (le 0 i) (lt i (len v))) (eq (idx (upd v i x) 0) x))",
    ),
];

fn cert_nodes(c: &Certificate) -> Vec<&Certificate> {
    use Certificate::*;
    match c {
        Hyp(_) | Refl(_) | Eval(_) | Axiom(..) => vec![],
        AndE1(a) | AndE2(a) | OrI1(a, _) | OrI2(a, _) | ImpI(_, a) | NotI(_, a) | Contra(a)
        | ForallI(_, a) | ForallE(a, _) => vec![a],
        AndI(a, b) | ImpE(a, b) | Rewrite(a, b, _) => vec![a, b],
        OrE(a, b, d) => vec![a, b, d],
        Lia(_, ps) => ps.iter().collect(),
    }
}

fn cert_size(c: &Certificate) -> usize {
    1 + cert_nodes(c).into_iter().map(cert_size).sum::<usize>()
}

fn atoms(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Not(a) | Formula::Forall(_, a) => atoms(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            atoms(a, out);
            atoms(b, out);
        }
        _ => out.push(f.clone()),
    }
}

fn terms_of(f: &Formula, sort: Sort) -> Vec<Term> {
    let mut out: Vec<Term> = f.free_vars().into_iter().filter(|(_, s)| *s == sort).map(|(n, s)| Term::var(n, s)).collect();
    if sort == Sort::Int {
        out.extend([Term::Int(0), Term::Int(1), Term::Int(-1)]);
    }
    out
}

fn random_ratio(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(rng.gen_range(0..5).into(), rng.gen_range(1..3).into())
}

fn random_cert(rng: &mut ChaCha8Rng, goal: &Formula, depth: u32) -> Certificate {
    let mut pool = Vec::new();
    atoms(goal, &mut pool);
    pool.push(goal.clone());
    pool.push(Formula::True);
    let pick = |rng: &mut ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_cert(rng, goal, depth.saturating_sub(1)));
    let choice = if depth == 0 { rng.gen_range(0..4) } else { rng.gen_range(0..12) };
    match choice {
        0 => Certificate::Hyp(rng.gen_range(0..3)),
        1 => Certificate::Eval(pick(rng)),
        2 => Certificate::Refl(Term::Int(rng.gen_range(-2..3))),
        3 => {
            let s = &axioms::catalog()[rng.gen_range(0..axioms::catalog().len())];
            let inst = s
                .metavars
                .iter()
                .map(|(n, sort)| {
                    let ts = terms_of(goal, *sort);
                    let t = if ts.is_empty() { Term::Int(0) } else { ts[rng.gen_range(0..ts.len())].clone() };
                    (n.to_string(), t)
                })
                .collect();
            Certificate::Axiom(s.id.to_string(), inst)
        }
        4 => match goal {
            Formula::Imp(a, b) => Certificate::ImpI((**a).clone(), Box::new(random_cert(rng, b, depth - 1))),
            _ => Certificate::ImpI(pick(rng), sub(rng)),
        },
        5 => Certificate::AndI(sub(rng), sub(rng)),
        6 => Certificate::ImpE(sub(rng), sub(rng)),
        7 => Certificate::Contra(sub(rng)),
        8 => Certificate::NotI(pick(rng), sub(rng)),
        9 => Certificate::OrI1(sub(rng), pick(rng)),
        10 => Certificate::OrE(sub(rng), sub(rng), sub(rng)),
        _ => {
            let n = rng.gen_range(1..4);
            let coeffs = (0..n).map(|_| random_ratio(rng)).collect();
            let premises = (0..n).map(|_| random_cert(rng, goal, depth - 1)).collect();
            Certificate::Lia(coeffs, premises)
        }
    }
}

/// Replaces or perturbs the `target`-th node in preorder.
fn mutate(c: &mut Certificate, target: &mut usize, rng: &mut ChaCha8Rng, goal: &Formula) {
    if *target == 0 {
        *target = usize::MAX;
        match c {
            Certificate::Hyp(n) if rng.gen_bool(0.5) => *n = (*n + rng.gen_range(1..3)) % 4,
            Certificate::Lia(qs, ps) if !qs.is_empty() && rng.gen_bool(0.7) => {
                if rng.gen_bool(0.5) {
                    let i = rng.gen_range(0..qs.len());
                    qs[i] = random_ratio(rng);
                } else {
                    qs.pop();
                    ps.pop();
                }
            }
            Certificate::Rewrite(_, _, ps) if rng.gen_bool(0.5) => {
                ps.push(ps.last().copied().unwrap_or(0) + 1);
            }
            _ => *c = random_cert(rng, goal, 2),
        }
        return;
    }
    *target -= 1;
    use Certificate::*;
    let kids: Vec<&mut Certificate> = match c {
        Hyp(_) | Refl(_) | Eval(_) | Axiom(..) => vec![],
        AndE1(a) | AndE2(a) | OrI1(a, _) | OrI2(a, _) | ImpI(_, a) | NotI(_, a) | Contra(a)
        | ForallI(_, a) | ForallE(a, _) => vec![&mut **a],
        AndI(a, b) | ImpE(a, b) | Rewrite(a, b, _) => vec![&mut **a, &mut **b],
        OrE(a, b, d) => vec![&mut **a, &mut **b, &mut **d],
        Lia(_, ps) => ps.iter_mut().collect(),
    };
    for k in kids {
        if *target == usize::MAX {
            return;
        }
        mutate(k, target, rng, goal);
    }
}

fn crate_closure(start: &str) -> Vec<String> {
    let mut seen = vec![start.to_string()];
    let mut i = 0;
    while i < seen.len() {
        let dir = seen[i].trim_start_matches("lissom-").to_string();
        let text = std::fs::read_to_string(workspace_dir().join("crates").join(&dir).join("Cargo.toml")).unwrap();
        let doc: toml::Table = text.parse().unwrap();
        if let Some(deps) = doc.get("dependencies").and_then(|d| d.as_table()) {
            for (name, spec) in deps {
                let optional = spec.get("optional").and_then(|o| o.as_bool()).unwrap_or(false);
                if name.starts_with("lissom-") && !optional && !seen.contains(name) {
                    seen.push(name.clone());
                }
            }
        }
        i += 1;
    }
    seen.sort();
    seen
}

fn resolved_tree(package: &str) -> Result<String, String> {
    let out = Command::new(env!("CARGO"))
        .args(["tree", "--offline", "-p", package, "-e", "normal", "--prefix", "none"])
        .current_dir(workspace_dir())
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn criterion_5(bundles: &[Result<PccBundle, String>]) -> Check {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xce47);

    let mut cases: Vec<(Formula, Certificate)> = Vec::new();
    for (valid, invalid) in GOAL_PAIRS {
        let v = parse_formula(valid).unwrap();
        let w = parse_formula(invalid).unwrap();
        let cfg = EnumConfig::new(LINEAR_BOUND, MAX_COLLECTION, MAX_COLLECTION);
        if !matches!(enumerate_with(&w, &cfg), Ok(Validity::CounterModel(_))) {
            failures.push(format!("no counter-model for {invalid}"));
        }
        match prove(&v, Duration::from_secs(5)) {
            Outcome::Proved(c) => cases.push((w, c)),
            Outcome::GiveUp(_) => failures.push(format!("valid twin unproved: {valid}")),
        }
    }
    let mut fuzzed = 0;
    let mut accepts = Vec::new();
    let mut unparsable = 0;
    for i in 0..FUZZED_CERTIFICATES {
        let (goal, proof) = &cases[i % cases.len()];
        let cert = match i % 4 {
            _ if i < cases.len() => Some(proof.clone()),
            0 | 1 => {
                let mut c = proof.clone();
                let mut target = rng.gen_range(0..cert_size(&c));
                mutate(&mut c, &mut target, &mut rng, goal);
                Some(c)
            }
            2 => {
                let mut text = proof.to_string().into_bytes();
                let at = rng.gen_range(0..text.len());
                text[at] = b"()0123456789 abceqlt"[rng.gen_range(0..20)];
                let parsed = String::from_utf8(text)
                    .ok()
                    .and_then(|t| parse_certificate_with(&t, &goal.free_vars()).ok());
                if parsed.is_none() {
                    unparsable += 1;
                }
                parsed
            }
            _ => Some(random_cert(&mut rng, goal, 4)),
        };
        fuzzed += 1;
        if let Some(c) = cert {
            if check_certificate(goal, &c).is_accept() {
                accepts.push(format!("{} accepted for {}", c, canonical_text(goal)));
            }
        }
    }
    if !accepts.is_empty() {
        failures.push(format!("{} fuzzed certificates accepted{}", accepts.len(), first(&accepts)));
    }

    let mut emitted = 0;
    for b in bundles.iter().flatten() {
        let r = verify_bundle(b);
        emitted += r.obligations.len();
        if let Some(o) = r.obligations.iter().find(|o| !o.verdict.is_accept()) {
            failures.push(format!("prover certificate rejected: {} {}", o.function, o.location));
        }
    }

    let closure = crate_closure("lissom-kernel");
    if closure != ["lissom-kernel", "lissom-logic"] {
        failures.push(format!("kernel depends on {closure:?}"));
    }
    let consumer = crate_closure("lissom-bundle");
    for forbidden in ["lissom-prover", "lissom-compiler", "lissom-lang"] {
        if consumer.iter().any(|c| c == forbidden) {
            failures.push(format!("consumer manifest reaches {forbidden}"));
        }
    }
    for package in ["lissom-kernel", "lissom-bundle"] {
        match resolved_tree(package) {
            Ok(tree) => {
                for forbidden in ["lissom-prover ", "lissom-compiler ", "lissom-lang "] {
                    if tree.lines().any(|l| l.starts_with(forbidden)) {
                        failures.push(format!("resolved {package} build contains {}", forbidden.trim()));
                    }
                }
            }
            Err(e) => failures.push(format!("cargo tree failed: {e}")),
        }
    }

    if failures.is_empty() {
        Ok(format!(
            "{fuzzed} fuzzed certificates rejected ({unparsable} unparsable); {emitted} prover certificates accepted; checker and consumer exclude prover and compiler"
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn linear_atom(rng: &mut ChaCha8Rng, vars: &[Term]) -> (Vec<i64>, i64, u8) {
    let coeffs = vars.iter().map(|_| rng.gen_range(-5..=5)).collect();
    (coeffs, rng.gen_range(-5..=5), rng.gen_range(0..3))
}

fn atom_formula(vars: &[Term], (coeffs, k, rel): &(Vec<i64>, i64, u8)) -> Formula {
    let mut lhs = Term::Int(0);
    for (c, v) in coeffs.iter().zip(vars) {
        if *c != 0 {
            lhs = Term::add(lhs, Term::mul(Term::Int(*c), v.clone()));
        }
    }
    let rhs = Term::Int(*k);
    match rel {
        0 => Formula::le(lhs, rhs),
        1 => Formula::lt(lhs, rhs),
        _ => Formula::eq(lhs, rhs),
    }
}

/// Random linear implication. Every other goal is a non-negative
/// combination of its hypotheses loosened by a slack, so roughly half
/// are valid.
fn linear_goal(rng: &mut ChaCha8Rng, constructed: bool) -> Formula {
    let n = rng.gen_range(1..=4);
    let vars: Vec<Term> = (0..n).map(|i| Term::int_var(format!("x{i}"))).collect();
    let hyps: Vec<(Vec<i64>, i64, u8)> = (0..rng.gen_range(0..=3)).map(|_| linear_atom(rng, &vars)).collect();
    let goal = if constructed && !hyps.is_empty() {
        let mut coeffs = vec![0; n];
        let mut k = rng.gen_range(0..=2);
        for (cs, hk, _) in &hyps {
            let w = rng.gen_range(0..=2);
            for (a, c) in coeffs.iter_mut().zip(cs) {
                *a += w * c;
            }
            k += w * hk;
        }
        let coeffs = coeffs.into_iter().map(|c: i64| c.clamp(-5, 5)).collect();
        (coeffs, k, 0)
    } else {
        linear_atom(rng, &vars)
    };
    Formula::imp_chain(hyps.iter().map(|h| atom_formula(&vars, h)), atom_formula(&vars, &goal))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x11ea);
    let goals: Vec<Formula> = (0..LINEAR_GOALS).map(|i| linear_goal(&mut rng, i % 2 == 0)).collect();
    let chunks: Vec<&[Formula]> = goals.chunks(LINEAR_GOALS.div_ceil(8)).collect();
    let results = par_map(&chunks, |chunk| {
        let mut certified = 0;
        let mut bad = Vec::new();
        for g in chunk.iter() {
            if let Outcome::Proved(c) = prove(g, Duration::from_secs(2)) {
                certified += 1;
                if !check_certificate(g, &c).is_accept() {
                    bad.push(format!("certificate rejected for {}", canonical_text(g)));
                }
                if let Err(e) = oracle_valid_at(g, LINEAR_BOUND) {
                    bad.push(format!("certified but {e}: {}", canonical_text(g)));
                }
            }
        }
        (certified, bad)
    });
    let certified: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    if bad.is_empty() {
        Ok(format!("{certified}/{LINEAR_GOALS} random linear goals certified, all valid at bound {LINEAR_BOUND}"))
    } else {
        Err(format!("{} unsound certificates{}", bad.len(), first(&bad)))
    }
}

fn oracle_valid_at(f: &Formula, bound: i64) -> Result<(), String> {
    match enumerate_with(f, &EnumConfig::new(bound, 0, 0)) {
        Ok(Validity::Valid) => Ok(()),
        Ok(other) => Err(format!("{other:?}")),
        Err(e) => Err(e.to_string()),
    }
}

fn report(n: usize, title: &str, r: &Check) -> bool {
    match r {
        Ok(detail) => println!("criterion {n} PASS  {title}: {detail}"),
        Err(why) => println!("criterion {n} FAIL  {title}: {why}"),
    }
    r.is_ok()
}

fn main() -> ExitCode {
    let corpus = load_corpus();

    let start = Instant::now();
    let bundles: Vec<Result<PccBundle, String>> =
        par_map(&corpus, |p| produce_bundle(&p.source, lissom::DEFAULT_BUDGET).map_err(|e| e.to_string()));
    let exec: Vec<Execution> = par_map(&corpus.iter().zip(&bundles).collect::<Vec<_>>(), |(p, b)| match b {
        Ok(b) if verify_bundle(b).overall.is_accept() => execute(p, b),
        _ => Execution::default(),
    });
    let elapsed = start.elapsed();

    let results = [
        report(1, "corpus builds, verifies and agrees with the interpreter", &criterion_1(&corpus, &bundles, &exec, elapsed)),
        report(2, "obligations and executions are sound", &criterion_2(&corpus, &exec)),
        report(3, "source and bytecode obligations correspond", &criterion_3(&corpus)),
        report(4, "tampered bundles are rejected", &criterion_4(&corpus, &bundles)),
        report(5, "the checker rejects forged certificates", &criterion_5(&bundles)),
        report(6, "certified linear goals are valid", &criterion_6()),
    ];
    if results.iter().all(|ok| *ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
