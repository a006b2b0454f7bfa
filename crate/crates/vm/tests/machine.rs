// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

use lissom_logic::Value;
use lissom_vm::{
    decode_module, encode_module, load_binary, load_module, parse_lbc, print_lbc, run, Instr,
    Location, Status, Trap, TrapKind,
};
use proptest::prelude::*;

fn outputs(text: &str, inputs: &[i64]) -> (Vec<i64>, Status) {
    let m = load_module(text).unwrap();
    let o = run(&m, "main", inputs, 10_000).unwrap();
    (o.outputs, o.status)
}

#[test]
fn adds_and_prints() {
    assert_eq!(
        outputs("PUSH 2; PUSH 3; ADD; PRINT; HALT", &[]),
        (vec![5], Status::Halted)
    );
}

#[test]
fn division_by_zero_traps() {
    let (_, status) = outputs("PUSH 1; PUSH 0; DIV", &[]);
    assert_eq!(
        status,
        Status::Trap(Trap {
            kind: TrapKind::DivByZero,
            function: "main".into(),
            pc: 2
        })
    );
}

#[test]
fn euclidean_division() {
    let cases = [(7, 2, 3, 1), (-7, 2, -4, 1), (7, -2, -3, 1), (-7, -2, 4, 1), (-6, 3, -2, 0)];
    for (a, b, q, r) in cases {
        let text = format!("PUSH {a}; PUSH {b}; DIV; PRINT; PUSH {a}; PUSH {b}; MOD; PRINT");
        assert_eq!(outputs(&text, &[]).0, vec![q, r], "{a} / {b}");
    }
}

#[test]
fn undefined_label_is_malformed() {
    let e = load_module("PUSH true; JZ nowhere; HALT").unwrap_err();
    assert!(e.reason.contains("undefined label"), "{e}");
}

#[test]
fn underflow_on_one_path_is_malformed() {
    // pc0 [] -> [bool]; pc1 pops, reaching pc2 and pc4 with [];
    // pc2 -> [bool]; pc3 pops to pc4 with []; pc4 JZ underflows.
    let e = load_module("PUSH true; JZ L; PUSH true; JZ L; L: JZ M; M: HALT").unwrap_err();
    assert_eq!(e.location, Some(Location::Pc(4)));
    assert!(e.reason.contains("underflow"), "{e}");
}

#[test]
fn joins_must_agree() {
    let e = load_module("PUSH true; JZ L; PUSH 1; L: HALT").unwrap_err();
    assert!(e.reason.contains("inconsistent"), "{e}");
}

#[test]
fn sorts_are_checked() {
    assert!(load_module("PUSH 1; PUSH true; ADD; PRINT").is_err());
    assert!(load_module("NEWSET; PRINT").is_err());
    assert!(load_module("PUSH 1; NOT; HALT").is_err());
}

const SUM: &str = "
.func main 0 3 void
#var 0 n_s0 int
#var 1 i_s1 int
#var 2 s_s2 int
#invariant head (and (le i_s1 n_s0) (eq (mul 2 s_s2) (mul i_s1 (add i_s1 1))))
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

#[test]
fn sum_loop() {
    assert_eq!(outputs(SUM, &[4]), (vec![10], Status::Returned(None)));
    assert_eq!(outputs(SUM, &[0]).0, vec![0]);
    let (_, status) = outputs(SUM, &[]);
    assert!(matches!(status, Status::Trap(Trap { kind: TrapKind::InputExhausted, .. })));
}

#[test]
fn out_of_fuel_is_a_status() {
    let m = load_module(SUM).unwrap();
    assert_eq!(run(&m, "main", &[4], 1).unwrap().status, Status::OutOfFuel);
}

const CALLS: &str = "
.func dbl 1 1 int
#var 0 x_s0 int
#old 0 old_x_s0
#ensures (eq \\result (mul 2 old_x_s0))
  LOAD 0; LOAD 0; ADD; RET
.end
.func main 0 1 void
#var 0 v_s0 vec
  PUSH 3; NEWVEC; STORE 0
  LOAD 0; PUSH 1; PUSH 21; CALL dbl; SETIDX; STORE 0
  LOAD 0; PUSH 1; GETIDX; PRINT
  LOAD 0; VLEN; PRINT
  NEWSET; PUSH 4; SINS; PUSH 4; SINS; PUSH 5; SINS; SCARD; PRINT
  LOAD 0; PUSH 3; GETIDX; PRINT
  RET
.end
";

#[test]
fn calls_vectors_and_sets() {
    let (out, status) = outputs(CALLS, &[]);
    assert_eq!(out, vec![42, 3, 2]);
    assert!(matches!(status, Status::Trap(Trap { kind: TrapKind::OutOfBounds, pc: 27, .. })));
}

#[test]
fn recursion_is_rejected() {
    let text = ".func f 0 0 void\n CALL g; RET\n.end\n.func g 0 0 void\n CALL f; RET\n.end\n";
    assert!(load_module(text).unwrap_err().reason.contains("recursive"));
}

#[test]
fn annotations_must_use_declared_names() {
    let text = ".func main 0 1 void\n#var 0 x_s0 int\n#ensures (le 0 y)\n RET\n.end\n";
    assert!(load_module(text).unwrap_err().reason.contains("undeclared"));
    let local = ".func f 0 1 int\n#var 0 x_s0 int\n#ensures (le 0 x_s0)\n PUSH 1; RET\n.end\n";
    assert!(load_module(local).unwrap_err().reason.contains("undeclared"));
}

#[test]
fn ensures_may_not_read_assigned_parameters() {
    let head = ".func f 1 1 int\n#var 0 x_s0 int\n#old 0 old_x_s0\n";
    let bad = format!("{head}#ensures (le x_s0 \\result)\n PUSH 0; STORE 0; LOAD 0; RET\n.end\n");
    assert!(load_module(&bad).unwrap_err().reason.contains("assigns"));
    let good = format!("{head}#ensures (le old_x_s0 \\result)\n PUSH 0; STORE 0; LOAD 0; RET\n.end\n");
    assert!(load_module(&good).is_ok());
}

#[test]
fn monitor_sees_returns() {
    let m = load_module(CALLS).unwrap();
    let mut seen = Vec::new();
    lissom_vm::run_monitored(&m, "main", &[], 1000, &mut |e| {
        seen.push((e.function.name.clone(), e.args.to_vec(), e.result.cloned()));
    })
    .unwrap();
    assert_eq!(seen, vec![("dbl".to_string(), vec![Value::Int(21)], Some(Value::Int(42)))]);
}

#[test]
fn text_and_binary_round_trip() {
    for text in [SUM, CALLS] {
        let m = parse_lbc(text).unwrap();
        let printed = print_lbc(&m);
        assert_eq!(print_lbc(&parse_lbc(&printed).unwrap()), printed);
        let bytes = encode_module(&m);
        let back = decode_module(&bytes).unwrap();
        assert_eq!(encode_module(&back), bytes);
        assert_eq!(print_lbc(&back), printed);
        assert!(load_binary(&bytes).is_ok());
    }
}

fn instr() -> impl Strategy<Value = Instr> {
    prop_oneof![
        (-3i64..4).prop_map(Instr::Push),
        any::<bool>().prop_map(Instr::PushBool),
        (0usize..3).prop_map(Instr::Load),
        (0usize..3).prop_map(Instr::Store),
        Just(Instr::Add),
        Just(Instr::Div),
        Just(Instr::Lt),
        Just(Instr::Eq),
        Just(Instr::Not),
        (0usize..12).prop_map(Instr::Jmp),
        (0usize..12).prop_map(Instr::Jz),
        Just(Instr::NewVec),
        Just(Instr::GetIdx),
        Just(Instr::VLen),
        Just(Instr::NewSet),
        Just(Instr::SIns),
        Just(Instr::Read),
        Just(Instr::Print),
        Just(Instr::Halt),
    ]
}

fn module_text(code: &[Instr]) -> String {
    let mut text = String::from(".func main 0 3 void\n#var 0 a int\n#var 1 b int\n#var 2 v vec\n");
    for (pc, i) in code.iter().enumerate() {
        text.push_str(&format!("L{pc}: {i}\n"));
    }
    text.push_str(&format!("L{}: HALT\n.end\n", code.len()));
    text
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3000))]

    #[test]
    fn loaded_modules_never_misuse_the_stack(
        code in prop::collection::vec(instr(), 1..12),
        inputs in prop::collection::vec(-3i64..4, 0..3),
    ) {
        if let Ok(m) = load_module(&module_text(&code)) {
            let o = run(&m, "main", &inputs, 200).unwrap();
            if let Status::Trap(t) = &o.status {
                prop_assert!(!matches!(t.kind, TrapKind::StackUnderflow | TrapKind::TypeMismatch));
            }
            // Determinism and fuel monotonicity.
            prop_assert_eq!(&run(&m, "main", &inputs, 200).unwrap(), &o);
            if o.status != Status::OutOfFuel {
                prop_assert_eq!(run(&m, "main", &inputs, 400).unwrap(), o);
            }
        }
    }

    #[test]
    fn decoding_arbitrary_bytes_is_total(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = decode_module(&bytes);
        let mut framed = b"LBC1".to_vec();
        framed.extend(bytes);
        let _ = load_binary(&framed);
    }

    #[test]
    fn corrupting_an_encoding_never_panics(idx in any::<prop::sample::Index>(), byte in any::<u8>()) {
        let mut bytes = encode_module(&parse_lbc(CALLS).unwrap());
        let i = idx.index(bytes.len());
        bytes[i] = byte;
        let _ = load_binary(&bytes);
    }
}
