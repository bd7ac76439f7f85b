use lfhh::hhf_logic::{encode_term, Term};
use lfhh::lf_syntax::{substitute, Expr, Subst};
use proptest::prelude::*;

fn object() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![Just(Expr::konst("z")), Just(Expr::konst("nil")), Just(Expr::free("x")), Just(Expr::free("y"))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|n| Expr::app(Expr::konst("s"), n)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::apps(Expr::konst("cons"), [a, b])),
            inner.prop_map(|b| Expr::lam_named("y", Expr::konst("nat"), b)),
        ]
    })
}

proptest! {
    #[test]
    fn encoding_commutes_with_substitution(m in object(), n in object()) {
        // Closed replacement keeps the substitution capture-free on both sides.
        let n = substitute(&n, &{ let mut s = Subst::new(); s.insert("x", Expr::konst("z")); s.insert("y", Expr::konst("z")); s });
        let lhs = encode_term(&substitute(&m, &Subst::single("x", n.clone())), &[]);
        let en = encode_term(&n, &[]);
        let rhs = encode_term(&m, &[]).map_leaves(&|t| match t {
            Term::Var(v) if &**v == "x" => Some(en.clone()),
            _ => None,
        });
        prop_assert_eq!(lhs, rhs);
    }
}
