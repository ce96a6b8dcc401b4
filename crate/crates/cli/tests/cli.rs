use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qtv_core::passes::{coupling_compliant, oracle_equal};
use qtv_core::semantics::{Convention, EqualityMode, TOL};
use qtv_core::device::CouplingMap;
use qtv_core::qasm;
use qtv_core::suite::fixtures::{crossed_cx, crossed_cx_reduced};
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn qtv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn transpile_ghz_onto_chain() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.qasm");
    let o = qtv(&["transpile", s(&data("ghz.qasm")), "--passes", "basic_swap", "--cmap", s(&data("chain3.json")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("PASS basic_swap gates_in=3 gates_out=3 swaps=0 time="));
    let routed = qasm::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let input = qasm::parse(&std::fs::read_to_string(data("ghz.qasm")).unwrap()).unwrap();
    assert!(coupling_compliant(&routed, &CouplingMap::line(3)));
    assert!(oracle_equal(&input, &routed, Convention::Diagram, EqualityMode::Exact, TOL).unwrap());
}

#[test]
fn routed_far_cx_validates_and_tampering_is_caught() {
    let dir = TempDir::new().unwrap();
    let (out, l, f) = (dir.path().join("o.qasm"), dir.path().join("l.json"), dir.path().join("f.json"));
    let o = qtv(&[
        "transpile",
        s(&data("far_cx.qasm")),
        "--passes",
        "basic_swap",
        "--cmap",
        s(&data("chain5.json")),
        "--out",
        s(&out),
        "--layout-out",
        s(&l),
        "--final-layout-out",
        s(&f),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let far = data("far_cx.qasm");
    let args = ["validate", s(&far), s(&out), "--layout", s(&l), "--final-layout", s(&f)];
    let v = qtv(&args);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert!(stdout(&v).starts_with("VALID"));

    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("swap q["));
    std::fs::write(&out, text.replacen("swap q[", "cx q[", 1)).unwrap();
    let v = qtv(&args);
    assert_eq!(v.status.code(), Some(1), "{}", stdout(&v));
    assert!(stdout(&v).starts_with("INVALID"));
}

#[test]
fn cancellation_log_round_trips_through_validate() {
    let dir = TempDir::new().unwrap();
    let (input, out, log) = (dir.path().join("in.qasm"), dir.path().join("o.qasm"), dir.path().join("log.json"));
    std::fs::write(&input, qasm::print(&crossed_cx())).unwrap();
    let o = qtv(&[
        "transpile",
        s(&input),
        "--passes",
        "commutation_analysis,commutative_cancellation",
        "--out",
        s(&out),
        "--log",
        s(&log),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let reduced = qasm::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(reduced.dag_equivalent(&crossed_cx_reduced()));
    let v = qtv(&["validate", s(&input), s(&out), "--log", s(&log)]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn unknown_pass_is_rejected_before_running() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.qasm");
    let o = qtv(&["transpile", s(&data("ghz.qasm")), "--passes", "basic_swap,nope", "--cmap", s(&data("chain3.json")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown pass nope"));
    assert!(stdout(&o).is_empty());
    assert!(!out.exists());
}

#[test]
fn ladder_stall_report_lists_the_four_cx() {
    let o = qtv(&["check-pass", "lookahead_swap", "--suite", "ladder-stall", "--no-timings"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("MONO lookahead_swap -gates_remaining.size STALL"));
    assert!(text.contains("gates: CX(Q0,Q8) CX(Q7,Q14) CX(Q8,Q7) CX(Q0,Q14)"));
    assert!(text.ends_with("RESULT ladder-stall PASS\n"));
}

#[test]
fn prove_exit_codes() {
    let dir = TempDir::new().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n{body}")).unwrap();
        p
    };
    let (x, z, hzh) = (write("x.qasm", "x q[0];\n"), write("z.qasm", "z q[0];\n"), write("hzh.qasm", "h q[0];\nz q[0];\nh q[0];\n"));
    assert_eq!(qtv(&["prove", s(&x), s(&z)]).status.code(), Some(1));
    let o = qtv(&["prove", s(&hzh), s(&x)]);
    assert!(matches!(o.status.code(), Some(0 | 2)), "{}", stdout(&o));
}

#[test]
fn parse_errors_carry_a_position() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.qasm");
    std::fs::write(&p, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncx q[0];\n").unwrap();
    let o = qtv(&["prove", s(&p), s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4, column"), "{err}");
}

#[test]
fn reports_are_byte_identical_without_timings() {
    let args = ["suite", "--section", "chains", "--section", "crossed-cx", "--no-timings"];
    let (a, b) = (qtv(&args), qtv(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("RESULT crossed-cx PASS"));
}

#[test]
fn seed_changes_random_campaigns() {
    let run = |seed: &str| stdout(&qtv(&["suite", "--section", "blocks", "--no-timings", "--seed", seed]));
    assert_eq!(run("0xCE871"), run("845937"));
    assert_ne!(run("1"), run("2"));
}

#[test]
fn refine_check_rejects_unknown_representation() {
    let o = qtv(&["refine-check", "matrix"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qtv(&["refine-check", "bloch", "--no-timings"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("REFINE bloch/rotations PASS"));
}
