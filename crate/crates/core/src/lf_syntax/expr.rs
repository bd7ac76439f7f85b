use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Binder name kept only for printing. Compares equal to every other hint,
/// which makes derived equality on [`Expr`] coincide with α-equivalence.
#[derive(Clone)]
pub struct Hint(pub Name);

impl Hint {
    pub fn new(s: &str) -> Self {
        Hint(name(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Hint {}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// LF kinds, type families and objects in one tree.
///
/// Bound variables are de Bruijn indices; free local variables, signature
/// constants and query meta-variables are named.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    Type,
    Pi(Hint, Arc<Expr>, Arc<Expr>),
    Lam(Hint, Arc<Expr>, Arc<Expr>),
    App(Arc<Expr>, Arc<Expr>),
    Bound(u32),
    Free(Name),
    Const(Name),
    Meta(Name),
}

impl Expr {
    pub fn konst(s: &str) -> Expr {
        Expr::Const(name(s))
    }

    pub fn free(s: &str) -> Expr {
        Expr::Free(name(s))
    }

    pub fn meta(s: &str) -> Expr {
        Expr::Meta(name(s))
    }

    pub fn pi(hint: &str, dom: Expr, body: Expr) -> Expr {
        Expr::Pi(Hint::new(hint), Arc::new(dom), Arc::new(body))
    }

    pub fn lam(hint: &str, dom: Expr, body: Expr) -> Expr {
        Expr::Lam(Hint::new(hint), Arc::new(dom), Arc::new(body))
    }

    /// Non-dependent arrow `dom -> cod`.
    pub fn arrow(dom: Expr, cod: Expr) -> Expr {
        Expr::pi("_", dom, cod.shift(1, 0))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(head: Expr, args: impl IntoIterator<Item = Expr>) -> Expr {
        args.into_iter().fold(head, Expr::app)
    }

    /// Π-binder whose body is expressed with a named free variable.
    pub fn pi_named(x: &str, dom: Expr, body: Expr) -> Expr {
        Expr::Pi(Hint::new(x), Arc::new(dom), Arc::new(body.close(x)))
    }

    pub fn lam_named(x: &str, dom: Expr, body: Expr) -> Expr {
        Expr::Lam(Hint::new(x), Arc::new(dom), Arc::new(body.close(x)))
    }

    /// Splits `h a1 … an` into its head and arguments.
    pub fn spine(&self) -> (&Expr, Vec<&Expr>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Expr::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    /// Shifts loose bound indices `>= cutoff` by `d`.
    pub fn shift(&self, d: i64, cutoff: u32) -> Expr {
        if d == 0 || !self.has_loose_bound_from(cutoff) {
            return self.clone();
        }
        match self {
            Expr::Bound(i) if *i >= cutoff => Expr::Bound((*i as i64 + d) as u32),
            Expr::Pi(h, a, b) => {
                Expr::Pi(h.clone(), Arc::new(a.shift(d, cutoff)), Arc::new(b.shift(d, cutoff + 1)))
            }
            Expr::Lam(h, a, b) => {
                Expr::Lam(h.clone(), Arc::new(a.shift(d, cutoff)), Arc::new(b.shift(d, cutoff + 1)))
            }
            Expr::App(f, a) => Expr::App(Arc::new(f.shift(d, cutoff)), Arc::new(a.shift(d, cutoff))),
            _ => self.clone(),
        }
    }

    fn has_loose_bound_from(&self, cutoff: u32) -> bool {
        match self {
            Expr::Bound(i) => *i >= cutoff,
            Expr::Pi(_, a, b) | Expr::Lam(_, a, b) => {
                a.has_loose_bound_from(cutoff) || b.has_loose_bound_from(cutoff + 1)
            }
            Expr::App(f, a) => f.has_loose_bound_from(cutoff) || a.has_loose_bound_from(cutoff),
            _ => false,
        }
    }

    /// True when no de Bruijn index escapes its binder.
    pub fn is_locally_closed(&self) -> bool {
        !self.has_loose_bound_from(0)
    }

    /// Does index `k` (relative to this node) occur?
    pub fn mentions_bound(&self, k: u32) -> bool {
        match self {
            Expr::Bound(i) => *i == k,
            Expr::Pi(_, a, b) | Expr::Lam(_, a, b) => a.mentions_bound(k) || b.mentions_bound(k + 1),
            Expr::App(f, a) => f.mentions_bound(k) || a.mentions_bound(k),
            _ => false,
        }
    }

    /// Substitutes `value` for index 0 of a binder body, lowering the other
    /// loose indices. `value` may itself contain loose indices.
    pub fn instantiate(&self, value: &Expr) -> Expr {
        self.subst_at(0, value)
    }

    fn subst_at(&self, depth: u32, value: &Expr) -> Expr {
        if !self.has_loose_bound_from(depth) {
            return self.clone();
        }
        match self {
            Expr::Bound(i) if *i == depth => value.shift(depth as i64, 0),
            Expr::Bound(i) if *i > depth => Expr::Bound(i - 1),
            Expr::Pi(h, a, b) => Expr::Pi(
                h.clone(),
                Arc::new(a.subst_at(depth, value)),
                Arc::new(b.subst_at(depth + 1, value)),
            ),
            Expr::Lam(h, a, b) => Expr::Lam(
                h.clone(),
                Arc::new(a.subst_at(depth, value)),
                Arc::new(b.subst_at(depth + 1, value)),
            ),
            Expr::App(f, a) => {
                Expr::App(Arc::new(f.subst_at(depth, value)), Arc::new(a.subst_at(depth, value)))
            }
            _ => self.clone(),
        }
    }

    /// Opens a binder body with a free variable.
    pub fn open(&self, x: &str) -> Expr {
        self.instantiate(&Expr::Free(name(x)))
    }

    /// Abstracts free variable `x` into index 0, producing a binder body.
    pub fn close(&self, x: &str) -> Expr {
        self.shift(1, 0).close_at(x, 0)
    }

    fn close_at(&self, x: &str, depth: u32) -> Expr {
        match self {
            Expr::Free(y) if &**y == x => Expr::Bound(depth),
            Expr::Pi(h, a, b) => {
                Expr::Pi(h.clone(), Arc::new(a.close_at(x, depth)), Arc::new(b.close_at(x, depth + 1)))
            }
            Expr::Lam(h, a, b) => {
                Expr::Lam(h.clone(), Arc::new(a.close_at(x, depth)), Arc::new(b.close_at(x, depth + 1)))
            }
            Expr::App(f, a) => {
                Expr::App(Arc::new(f.close_at(x, depth)), Arc::new(a.close_at(x, depth)))
            }
            _ => self.clone(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect(&mut |e| {
            if let Expr::Free(x) = e {
                out.insert(x.clone());
            }
        });
        out
    }

    pub fn metas(&self) -> Vec<Name> {
        let mut out: Vec<Name> = Vec::new();
        self.collect(&mut |e| {
            if let Expr::Meta(x) = e {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
        });
        out
    }

    pub fn has_metas(&self) -> bool {
        !self.metas().is_empty()
    }

    pub fn constants(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect(&mut |e| {
            if let Expr::Const(c) = e {
                out.insert(c.clone());
            }
        });
        out
    }

    /// Pre-order walk, left to right.
    pub fn collect(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Pi(_, a, b) | Expr::Lam(_, a, b) => {
                a.collect(f);
                b.collect(f);
            }
            Expr::App(g, a) => {
                g.collect(f);
                a.collect(f);
            }
            _ => {}
        }
    }

    /// Replaces named leaves (free variables or metas) bottom-up.
    pub fn map_leaves(&self, f: &impl Fn(&Expr) -> Option<Expr>) -> Expr {
        match self {
            Expr::Pi(h, a, b) => Expr::Pi(h.clone(), Arc::new(a.map_leaves(f)), Arc::new(b.map_leaves(f))),
            Expr::Lam(h, a, b) => Expr::Lam(h.clone(), Arc::new(a.map_leaves(f)), Arc::new(b.map_leaves(f))),
            Expr::App(g, a) => Expr::App(Arc::new(g.map_leaves(f)), Arc::new(a.map_leaves(f))),
            leaf => f(leaf).unwrap_or_else(|| leaf.clone()),
        }
    }

    /// Peels the outer Π-prefix: returns `(binders, target)` where binder `i`'s
    /// domain and the target refer to earlier binders through de Bruijn indices.
    pub fn pi_prefix(&self) -> (Vec<(Hint, Expr)>, Expr) {
        let mut binders = Vec::new();
        let mut cur = self;
        while let Expr::Pi(h, a, b) = cur {
            binders.push((h.clone(), a.as_ref().clone()));
            cur = b;
        }
        (binders, cur.clone())
    }

    pub fn is_kind(&self) -> bool {
        match self {
            Expr::Type => true,
            Expr::Pi(_, _, b) => b.is_kind(),
            _ => false,
        }
    }
}

/// α-equivalence. Binder names are ignored by construction.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renamed_identity_is_alpha_equal() {
        let nat = Expr::konst("nat");
        let a = Expr::lam_named("x", nat.clone(), Expr::free("x"));
        let b = Expr::lam_named("y", nat, Expr::free("y"));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&Expr::app(Expr::konst("s"), Expr::konst("z")), &Expr::konst("z")));
    }

    #[test]
    fn open_close_roundtrip() {
        let body = Expr::apps(Expr::konst("f"), [Expr::Bound(0), Expr::Bound(1)]);
        let opened = body.open("x");
        assert_eq!(opened, Expr::apps(Expr::konst("f"), [Expr::free("x"), Expr::Bound(0)]));
        assert_eq!(opened.close("x"), body);
    }

    #[test]
    fn instantiate_shifts_value_under_binders() {
        // (λy. #1) [#0 / 0]  ==> λy. #1 (the loose variable is shifted past y)
        let body = Expr::lam("y", Expr::Type, Expr::Bound(1));
        let r = body.instantiate(&Expr::Bound(0));
        assert_eq!(r, Expr::lam("y", Expr::Type, Expr::Bound(1)));
    }
}
