use std::path::PathBuf;

use clap::Parser;
use lfhh::cli::{run, Cli, EXIT_INPUT, EXIT_OK, EXIT_RESOURCE};
use lfhh::hhf_logic::parse_clauses;

const QUERY: &str = "append (cons z nil) (cons (s z) nil) L";

fn golden(file: &str) -> String {
    golden_path(file).to_str().unwrap().to_string()
}

fn golden_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(file)
}

fn scratch_file(file: &str, text: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(file);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn lfhh(args: &[&str]) -> (i32, String, String) {
    let parsed = Cli::try_parse_from(std::iter::once("lfhh").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&parsed, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn check_counts_declarations() {
    assert_eq!(lfhh(&["check", &golden("append.lf")]), (EXIT_OK, "ok (9 declarations)\n".into(), String::new()));
    let empty = scratch_file("empty.lf", "");
    assert_eq!(lfhh(&["check", &empty]).1, "ok (0 declarations)\n");
}

#[test]
fn check_reports_location_of_bad_declaration() {
    let f = scratch_file("unbound.lf", "nat : type.\nz : nt.\n");
    let (code, out, err) = lfhh(&["check", &f]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.starts_with(&format!("{}:2:", f)), "{}", err);
    assert!(err.contains("unbound constant nt"), "{}", err);

    let f = scratch_file("syntax.lf", "nat : type.\nz : nat\n");
    let (code, _, err) = lfhh(&["check", &f]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.starts_with(&format!("{}:", f)), "{}", err);
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, err) = lfhh(&["check", "/nonexistent/sig.lf"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("cannot read"), "{}", err);
}

#[test]
fn analyze_append() {
    let (code, out, _) = lfhh(&["analyze", &golden("append.lf")]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.contains(&"appNil: K=rigid"));
    assert!(lines.contains(&"appCons: X=rigid, L=rigid, K=rigid, M=rigid, arg5=guarded (non-rigid)"));
    assert!(lines.contains(&"s: arg1=guarded (non-rigid)"));
}

#[test]
fn analyze_flags_argument_applied_to_constant() {
    let (_, out, _) = lfhh(&["analyze", &golden("non_rigid.lf")]);
    assert!(out.lines().any(|l| l == "bad: X=guarded (non-rigid)"), "{}", out);
    assert!(out.lines().any(|l| l == "num_n: n=rigid"), "{}", out);
}

#[test]
fn translate_matches_golden_clauses() {
    for (mode, file) in [("naive", "append_naive.hh"), ("optimized", "append_optimized.hh")] {
        let (code, out, _) = lfhh(&["translate", &golden("append.lf"), "--mode", mode]);
        assert_eq!(code, EXIT_OK);
        let want = parse_clauses(&std::fs::read_to_string(golden_path(file)).unwrap()).unwrap();
        assert_eq!(parse_clauses(&out).unwrap(), want, "{}", mode);
    }
}

#[test]
fn solve_trace_matches_golden() {
    for mode in ["naive", "optimized"] {
        let (code, out, _) = lfhh(&["solve", &golden("append.lf"), "--query", QUERY, "--mode", mode, "--trace"]);
        assert_eq!(code, EXIT_OK);
        let want = std::fs::read_to_string(golden_path(&format!("append_{}.trace", mode))).unwrap();
        assert_eq!(out, want, "{}", mode);
    }
}

#[test]
fn solve_nat_gives_zero() {
    let (code, out, _) = lfhh(&["solve", &golden("append.lf"), "--query", "nat"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("proof : nat = z.\n% certified\n"), "{}", out);
}

#[test]
fn finite_failure_is_not_an_error() {
    let (code, out, _) = lfhh(&["solve", &golden("append.lf"), "--query", "append nil nil (cons z nil)"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("no solution within depth 512\n"), "{}", out);
}

#[test]
fn depth_cutoff_is_a_resource_error() {
    let (code, out, _) = lfhh(&["solve", &golden("append.lf"), "--query", QUERY, "--depth", "1"]);
    assert_eq!(code, EXIT_RESOURCE);
    assert!(out.starts_with("no solution within depth 1 (depth limit reached)"), "{}", out);
}

#[test]
fn ill_typed_query_is_an_input_error() {
    let (code, _, err) = lfhh(&["solve", &golden("append.lf"), "--query", "append nil foo L"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("unbound constant foo"), "{}", err);
}

#[test]
fn solve_all_enumerates_splits() {
    let (code, out, _) = lfhh(&["solve", &golden("append.lf"), "--query", "append L K (cons z nil)", "--all"]);
    assert_eq!(code, EXIT_OK);
    let ls: Vec<&str> = out.lines().filter(|l| l.starts_with("L = ")).collect();
    assert_eq!(ls, ["L = nil.", "L = cons z nil."]);
}

#[test]
fn bench_counts() {
    let (code, out, _) = lfhh(&["bench", "--sizes", "4"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(out.lines().next(), Some("n,mode,backchain_steps,unify_calls,wall_ns"));
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][..3], ["4", "optimized", "5"]);
    // 2.5n² + 3.5n + 2 at n = 4
    assert_eq!(&rows[0][..3], ["4", "naive", "56"]);
}

#[test]
fn compare_reports_agreement() {
    let (code, out, _) = lfhh(&["compare", &golden("append.lf"), "--query", QUERY]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with("agreement: yes\n"), "{}", out);
}

#[test]
fn compare_generated_signatures() {
    let (code, out, _) = lfhh(&["compare", "--seed", "3", "--count", "4"]);
    assert_eq!(code, EXIT_OK, "{}", out);
    assert!(out.lines().last().unwrap().starts_with("total: "), "{}", out);
}
