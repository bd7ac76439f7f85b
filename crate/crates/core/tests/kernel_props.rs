use lfhh::corpus::APPEND_LF;
use lfhh::lf_syntax::{parse_expr, parse_signature, pretty_print, substitute, Expr, Subst};
use lfhh::lf_typecheck::{check_object, check_object_in, check_type};
use proptest::prelude::*;

fn nat_term(max: u32) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![Just(Expr::konst("z")), Just(Expr::free("x"))];
    leaf.prop_recursive(max, 16, 1, |inner| inner.prop_map(|n| Expr::app(Expr::konst("s"), n)))
}

fn closed_nat(max: u32) -> impl Strategy<Value = Expr> {
    Just(Expr::konst("z")).prop_recursive(max, 16, 1, |inner| inner.prop_map(|n| Expr::app(Expr::konst("s"), n)))
}

fn list_of(nats: Vec<Expr>) -> Expr {
    nats.into_iter()
        .rev()
        .fold(Expr::konst("nil"), |acc, n| Expr::apps(Expr::konst("cons"), [n, acc]))
}

/// Proof of `append l k (l ++ k)` built by structural recursion on `l`.
fn append_proof(l: &[Expr], k: &Expr) -> (Expr, Expr) {
    match l.split_first() {
        None => (Expr::app(Expr::konst("appNil"), k.clone()), k.clone()),
        Some((x, rest)) => {
            let (p, m) = append_proof(rest, k);
            let rest_l = list_of(rest.to_vec());
            let out = Expr::apps(Expr::konst("cons"), [x.clone(), m.clone()]);
            let proof = Expr::apps(Expr::konst("appCons"), [x.clone(), rest_l, k.clone(), m, p]);
            (proof, out)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn append_proofs_are_accepted_deterministically(
        l in proptest::collection::vec(closed_nat(4), 0..5),
        k in proptest::collection::vec(closed_nat(4), 0..5),
    ) {
        let sig = parse_signature(APPEND_LF).unwrap();
        let kk = list_of(k);
        let (proof, out) = append_proof(&l, &kk);
        let ty = Expr::apps(Expr::konst("append"), [list_of(l.clone()), kk, out]);
        prop_assert!(check_type(&sig, &ty).is_ok());
        let d1 = check_object(&sig, &proof, &ty).unwrap();
        let d2 = check_object(&sig, &proof, &ty).unwrap();
        prop_assert_eq!(&d1, &d2);
        let mut n = 0;
        d1.walk(&mut |_| n += 1);
        prop_assert_eq!(n, d1.size());
    }

    #[test]
    fn weakening_preserves_acceptance(l in proptest::collection::vec(closed_nat(3), 0..4)) {
        let sig = parse_signature(APPEND_LF).unwrap();
        let wide = parse_signature(&format!("{}\nextra : type.\nunused : extra -> nat.", APPEND_LF)).unwrap();
        let (proof, out) = append_proof(&l, &Expr::konst("nil"));
        let ty = Expr::apps(Expr::konst("append"), [list_of(l), Expr::konst("nil"), out]);
        let d = check_object(&sig, &proof, &ty).unwrap();
        let dw = check_object(&wide, &proof, &ty).unwrap();
        prop_assert_eq!(d.size(), dw.size());
    }

    #[test]
    fn substitution_lemma(m in nat_term(5), n in closed_nat(4)) {
        let sig = parse_signature(APPEND_LF).unwrap();
        let nat = Expr::konst("nat");
        prop_assert!(check_object_in(&sig, &[(lfhh::lf_syntax::name("x"), nat.clone())], &m, &nat).is_ok());
        let inst = substitute(&m, &Subst::single("x", n));
        prop_assert!(check_object(&sig, &inst, &nat).is_ok(), "{}", pretty_print(&inst));
    }
}

#[test]
fn abstraction_over_local() {
    let sig = parse_signature(APPEND_LF).unwrap();
    let m = parse_expr(&sig, "[l:list] appNil l").unwrap();
    let a = parse_expr(&sig, "{l:list} append nil l l").unwrap();
    assert_eq!(check_object(&sig, &m, &a).unwrap().size(), 4);
}
