// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use lissom::bundle::{run_unverified, run_verified, verify_bundle, PccBundle, RunRefusal, VerificationReport};
use lissom::{produce_bundle, ProducerFailure};
use lissom_kernel::{check_certificate, parse_certificate_with, Verdict};
use lissom_lang::check_source;
use lissom_logic::{closed_text, parse_closed};
use lissom_vcgen::{bytecode_obligations, source_obligations, write_vcs, Obligation};
use lissom_vm::{load_module, Status};
use serde_json::json;

#[derive(Parser)]
#[command(name = "lissom", version, about = "Proof-carrying code for LISS programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prove, compile and package a program.
    Build {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write each bytecode obligation and its certificate here.
        #[arg(long, value_name = "DIR")]
        emit_vcs: Option<PathBuf>,
        /// Search budget per obligation.
        #[arg(long, value_name = "N", default_value_t = 10_000)]
        prove_budget_ms: u64,
    },
    /// Check a bundle's certificates against regenerated obligations.
    Verify {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        report: Report,
    },
    /// Run a bundle's entry function once it verifies.
    Run {
        input: PathBuf,
        #[arg(long = "input", value_name = "n", num_args = 1.., allow_negative_numbers = true)]
        inputs: Vec<i64>,
        #[arg(long, default_value_t = 10_000_000)]
        fuel: u64,
        /// Skip certificate checking.
        #[arg(long = "unsafe")]
        skip_verification: bool,
    },
    /// Print the obligations of a source (.liss) or bytecode (.lbc) file.
    Vcgen { input: PathBuf },
    /// Check one certificate against one closed formula.
    CheckCert { vc: PathBuf, cert: PathBuf },
    /// Run a source program on the reference interpreter.
    Interp {
        input: PathBuf,
        #[arg(long = "input", value_name = "n", num_args = 1.., allow_negative_numbers = true)]
        inputs: Vec<i64>,
        #[arg(long, default_value_t = 10_000_000)]
        fuel: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Text,
    Json,
}

enum Fail {
    Rejected(String),
    Usage(String),
}

type Res = Result<(), Fail>;

fn read(p: &Path) -> Result<String, Fail> {
    fs::read_to_string(p).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))
}

fn read_bundle(p: &Path) -> Result<Result<PccBundle, String>, Fail> {
    let bytes = fs::read(p).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?;
    Ok(PccBundle::from_bytes(&bytes).map_err(|e| format!("malformed bundle: {e}")))
}

fn report_json(r: &VerificationReport) -> serde_json::Value {
    let verdict = |v: &lissom::bundle::Verdict| match v {
        lissom::bundle::Verdict::Accept => json!({ "verdict": "accept" }),
        lissom::bundle::Verdict::Reject(why) => json!({ "verdict": "reject", "reason": why }),
    };
    json!({
        "overall": verdict(&r.overall),
        "obligations": r.obligations.iter().map(|o| {
            let mut v = verdict(&o.verdict);
            v["id"] = json!(o.id);
            v["function"] = json!(o.function);
            v["site"] = json!(o.site.to_string());
            v["location"] = json!(o.location.to_string());
            v
        }).collect::<Vec<_>>(),
        "timings_us": {
            "load": r.timings.load.as_micros() as u64,
            "vcgen": r.timings.vcgen.as_micros() as u64,
            "check": r.timings.check.as_micros() as u64,
        },
    })
}

fn print_run(outputs: &[i64], status: &Status) -> Res {
    for n in outputs {
        println!("{n}");
    }
    match status {
        Status::Returned(_) | Status::Halted => Ok(()),
        Status::Trap(t) => Err(Fail::Rejected(format!("trap {} in {} at pc {}", t.kind, t.function, t.pc))),
        Status::OutOfFuel => Err(Fail::Rejected("out of fuel".into())),
    }
}

fn print_obligations(obs: &[Obligation]) {
    for o in obs {
        let p = &o.provenance;
        println!("{}\t{}\t{}\t{}\t{}", o.id, p.level, p.function, p.site, p.location);
        println!("  {}", closed_text(&o.formula));
    }
}

fn build(input: &Path, output: &Path, emit: Option<&Path>, budget: u64) -> Res {
    let src = read(input)?;
    let bundle = produce_bundle(&src, Duration::from_millis(budget)).map_err(|e| match e {
        ProducerFailure::Source(e) => Fail::Usage(format!("{}: {e}", input.display())),
        e => Fail::Rejected(e.to_string()),
    })?;
    fs::write(output, bundle.to_bytes()).map_err(|e| Fail::Usage(format!("{}: {e}", output.display())))?;
    if let Some(dir) = emit {
        let module = lissom_vm::load_binary(&bundle.bytecode).map_err(|e| Fail::Rejected(e.to_string()))?;
        let obs = bytecode_obligations(&module).map_err(|e| Fail::Rejected(e.to_string()))?;
        let io = |e: std::io::Error| Fail::Usage(format!("{}: {e}", dir.display()));
        write_vcs(dir, &obs).map_err(io)?;
        for (id, cert) in &bundle.certificates {
            fs::write(dir.join(format!("{id}.prf")), format!("{cert}\n")).map_err(io)?;
        }
    }
    eprintln!(
        "wrote {} ({} obligations, {} certificates)",
        output.display(),
        bundle.manifest.obligations,
        bundle.certificates.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result: Res = match cli.cmd {
        Cmd::Build { input, output, emit_vcs, prove_budget_ms } => {
            build(&input, &output, emit_vcs.as_deref(), prove_budget_ms)
        }
        Cmd::Verify { input, report } => (|| {
            let r = match read_bundle(&input)? {
                Ok(b) => verify_bundle(&b),
                Err(why) => return Err(Fail::Rejected(why)),
            };
            match report {
                Report::Text => print!("{}", r.to_text()),
                Report::Json => println!("{}", serde_json::to_string_pretty(&report_json(&r)).unwrap()),
            }
            if r.is_accept() {
                Ok(())
            } else {
                Err(Fail::Rejected("bundle rejected".into()))
            }
        })(),
        Cmd::Run { input, inputs, fuel, skip_verification } => (|| {
            let b = read_bundle(&input)?.map_err(Fail::Rejected)?;
            if skip_verification {
                eprintln!("WARNING: --unsafe: running WITHOUT checking any certificate");
                let out = run_unverified(&b, &inputs, fuel).map_err(Fail::Rejected)?;
                return print_run(&out.outputs, &out.status);
            }
            match run_verified(&b, &inputs, fuel) {
                Ok(out) => print_run(&out.outputs, &out.status),
                Err(RunRefusal::RefusedUnverified(r)) => {
                    eprint!("{}", r.to_text());
                    Err(Fail::Rejected("refused to run unverified code".into()))
                }
                Err(e) => Err(Fail::Usage(e.to_string())),
            }
        })(),
        Cmd::Vcgen { input } => (|| {
            let text = read(&input)?;
            let obs = if input.extension().is_some_and(|e| e == "lbc") {
                let m = load_module(&text).map_err(|e| Fail::Rejected(e.to_string()))?;
                bytecode_obligations(&m)
            } else {
                let p = check_source(&text).map_err(|e| Fail::Usage(format!("{}: {e}", input.display())))?;
                source_obligations(&p)
            }
            .map_err(|e| Fail::Rejected(e.to_string()))?;
            print_obligations(&obs);
            Ok(())
        })(),
        Cmd::CheckCert { vc, cert } => (|| {
            let (env, goal) = parse_closed(&read(&vc)?).map_err(|e| Fail::Usage(format!("{}: {e}", vc.display())))?;
            let c = parse_certificate_with(&read(&cert)?, &env)
                .map_err(|e| Fail::Rejected(format!("reject: {}: {e}", cert.display())))?;
            match check_certificate(&goal, &c) {
                Verdict::Accept => {
                    println!("accept");
                    Ok(())
                }
                Verdict::Reject(r) => Err(Fail::Rejected(format!("reject: {r}"))),
            }
        })(),
        Cmd::Interp { input, inputs, fuel } => (|| {
            let p = check_source(&read(&input)?).map_err(|e| Fail::Usage(format!("{}: {e}", input.display())))?;
            let out = lissom_lang::interpret(&p, "main", &inputs, fuel).map_err(|e| Fail::Usage(e.to_string()))?;
            for n in &out.outputs {
                println!("{n}");
            }
            match out.status {
                lissom_lang::Status::Returned(_) => Ok(()),
                lissom_lang::Status::Trap(t) => Err(Fail::Rejected(format!(
                    "trap {} in {} at {}:{}",
                    t.kind, t.function, t.pos.line, t.pos.col
                ))),
                lissom_lang::Status::OutOfFuel => Err(Fail::Rejected("out of fuel".into())),
            }
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Rejected(why)) => {
            eprintln!("{why}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(why)) => {
            eprintln!("error: {why}");
            ExitCode::from(2)
        }
    }
}
