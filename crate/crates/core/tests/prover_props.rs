use lfhh::corpus::{list_text, APPEND_LF};
use lfhh::hhf_logic::{translate, Mode};
use lfhh::hhf_prover::{Limits, Strategy as Search};
use lfhh::lf_syntax::parse_signature;
use lfhh::lf_typecheck::check_object;
use lfhh::reconstruct::{check_skipped_guards, prepare_query, run_query};
use proptest::prelude::*;

fn elems(max: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0usize..3, 0..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn optimized_ground_check_takes_one_step_per_element(a in elems(6), b in elems(6)) {
        let sig = parse_signature(APPEND_LF).unwrap();
        let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
        let q = format!("append {} {} {}", list_text(&a), list_text(&b), list_text(&ab));
        let pq = prepare_query(&sig, &q).unwrap();
        let opt = run_query(&sig, &translate(&sig, Mode::Optimized), &pq, &Limits::default());
        let naive = run_query(&sig, &translate(&sig, Mode::Naive), &pq, &Limits::default());
        prop_assert_eq!(opt.report.counters.backchain_steps, a.len() as u64 + 1);
        prop_assert!(naive.report.counters.backchain_steps > opt.report.counters.backchain_steps);
        for run in [&opt, &naive] {
            let ans = run.answers[0].as_ref().unwrap();
            prop_assert!(ans.is_certified());
            prop_assert!(check_object(&sig, &ans.lf_proof, &ans.lf_type).is_ok());
        }
    }

    #[test]
    fn forward_append_agrees_across_modes(a in elems(2), b in elems(3)) {
        let sig = parse_signature(APPEND_LF).unwrap();
        let q = format!("append {} {} L", list_text(&a), list_text(&b));
        let pq = prepare_query(&sig, &q).unwrap();
        let limits = Limits { strategy: Search::IterativeDeepening, depth: 64, ..Limits::default() };
        let opt = run_query(&sig, &translate(&sig, Mode::Optimized), &pq, &limits);
        let naive = run_query(&sig, &translate(&sig, Mode::Naive), &pq, &limits);
        let (o, n) = (opt.answers[0].as_ref().unwrap(), naive.answers[0].as_ref().unwrap());
        let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
        prop_assert!(o.is_certified() && n.is_certified());
        prop_assert_eq!(&o.lf_proof, &n.lf_proof);
        prop_assert_eq!(&o.bindings, &n.bindings);
        let want = list_text(&ab);
        prop_assert_eq!(lfhh::lf_syntax::pretty_print(&o.bindings[0].1), want.strip_prefix('(').and_then(|w| w.strip_suffix(')')).unwrap_or(&want));
        // Binders the optimized clauses leave unguarded still receive
        // well-typed instantiations.
        prop_assert!(check_skipped_guards(&sig, &opt.report.solutions[0]).is_ok());
    }
}
