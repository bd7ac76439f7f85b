use lfhh::corpus::APPEND_LF;
use lfhh::hhf_logic::{parse_clauses, print_clauses, translate_optimized, translate_simple, ClauseSet, Formula};
use lfhh::lf_syntax::parse_signature;

fn golden(file: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{}", env!("CARGO_MANIFEST_DIR"), file)).unwrap()
}

fn formulas(cs: &ClauseSet) -> Vec<Formula> {
    cs.clauses.iter().map(|c| c.formula.clone()).collect()
}

#[test]
fn golden_signature_matches_builtin() {
    assert_eq!(parse_signature(&golden("append.lf")).unwrap(), parse_signature(APPEND_LF).unwrap());
}

#[test]
fn naive_translation_matches_golden() {
    let sig = parse_signature(&golden("append.lf")).unwrap();
    let want = parse_clauses(&golden("append_naive.hh")).unwrap();
    assert_eq!(formulas(&translate_simple(&sig)), want);
}

#[test]
fn optimized_translation_matches_golden() {
    let sig = parse_signature(&golden("append.lf")).unwrap();
    let want = parse_clauses(&golden("append_optimized.hh")).unwrap();
    assert_eq!(formulas(&translate_optimized(&sig)), want);
}

#[test]
fn printed_text_is_stable() {
    let sig = parse_signature(APPEND_LF).unwrap();
    let text = print_clauses(&translate_optimized(&sig));
    assert_eq!(
        text.lines().last().unwrap(),
        "forall x1:tm. top => forall x2:tm. top => forall x3:tm. top => forall x4:tm. top => \
         forall x5:tm. hastype x5 (append x2 x3 x4) => \
         hastype (appCons x1 x2 x3 x4 x5) (append (cons x1 x2) x3 (cons x1 x4))."
    );
}
