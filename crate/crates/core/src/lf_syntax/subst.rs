use std::collections::BTreeMap;

use super::expr::{Expr, Name};

/// Simultaneous substitution for free variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Name, Expr>,
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(x: &str, value: Expr) -> Self {
        let mut s = Self::new();
        s.insert(x, value);
        s
    }

    pub fn insert(&mut self, x: &str, value: Expr) {
        self.map.insert(Name::from(x), value);
    }

    pub fn get(&self, x: &str) -> Option<&Expr> {
        self.map.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Replaces every free occurrence of the substitution's domain at once.
///
/// Bound variables are indices, so substituted values (which are expected to
/// be locally closed) can never be captured. The result is not normalized.
pub fn substitute(e: &Expr, s: &Subst) -> Expr {
    if s.is_empty() {
        return e.clone();
    }
    e.map_leaves(&|leaf| match leaf {
        Expr::Free(x) => s.get(x).cloned(),
        _ => None,
    })
}

/// Replaces meta-variables by their bindings.
pub fn substitute_metas(e: &Expr, bindings: &BTreeMap<Name, Expr>) -> Expr {
    if bindings.is_empty() {
        return e.clone();
    }
    e.map_leaves(&|leaf| match leaf {
        Expr::Meta(x) => bindings.get(x).cloned(),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lf_syntax::print::pretty_print;

    fn c(s: &str) -> Expr {
        Expr::konst(s)
    }

    #[test]
    fn instance_of_app_nil_head() {
        let e = Expr::apps(c("append"), [c("nil"), Expr::free("K"), Expr::free("K")]);
        let v = Expr::apps(c("cons"), [c("z"), c("nil")]);
        let r = substitute(&e, &Subst::single("K", v.clone()));
        assert_eq!(r, Expr::apps(c("append"), [c("nil"), v.clone(), v]));
    }

    #[test]
    fn disjoint_variable_untouched() {
        let r = substitute(&Expr::free("x"), &Subst::single("y", c("z")));
        assert_eq!(r, Expr::free("x"));
    }

    #[test]
    fn capture_is_avoided() {
        // (lam y:nat. x)[y/x]
        let e = Expr::lam_named("y", c("nat"), Expr::free("x"));
        let r = substitute(&e, &Subst::single("x", Expr::free("y")));
        assert_eq!(r, Expr::lam("y", c("nat"), Expr::free("y")));
        assert_eq!(pretty_print(&r), "[y':nat] y");
    }
}
