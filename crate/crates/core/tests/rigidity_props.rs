use lfhh::lf_syntax::{name, Expr};
use lfhh::rigidity::{rigid_in_object, RigidCtx};
use proptest::prelude::*;

fn object() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::konst("z")),
        Just(Expr::free("x")),
        Just(Expr::free("t")),
        Just(Expr::free("y1")),
        Just(Expr::free("y2")),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::app(Expr::konst("s"), a)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::apps(Expr::konst("pair"), [a, b])),
            proptest::collection::vec(prop_oneof![Just(Expr::free("y1")), Just(Expr::free("y2")), Just(Expr::konst("z"))], 0..3)
                .prop_map(|args| Expr::apps(Expr::free("x"), args)),
            proptest::collection::vec(inner.clone(), 1..3).prop_map(|args| Expr::apps(Expr::free("t"), args)),
            inner.prop_map(|b| Expr::lam_named("y2", Expr::konst("nat"), b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn monotone_in_delta(m in object()) {
        let mut small = RigidCtx::new([name("x"), name("t")]);
        small.delta = vec![name("y1")];
        let mut big = small.clone();
        big.delta.push(name("y2"));
        if rigid_in_object(&small, "x", &m) {
            prop_assert!(rigid_in_object(&big, "x", &m));
        }
    }

    #[test]
    fn rebound_candidate_is_invisible(m in object()) {
        let ctx = RigidCtx::new([name("x"), name("t")]);
        let shadowed = Expr::lam_named("x", Expr::konst("nat"), m);
        prop_assert!(!rigid_in_object(&ctx, "x", &shadowed));
    }
}
