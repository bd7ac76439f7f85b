use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::lf_syntax::{Hint, Name};

/// Sorts of the target language. `Tm` classifies encoded objects and `Ty`
/// encoded base types; `O` is the sort of formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SimpleType {
    Tm,
    Ty,
    O,
    Arrow(Arc<SimpleType>, Arc<SimpleType>),
}

impl SimpleType {
    pub fn arrow(a: SimpleType, b: SimpleType) -> Self {
        SimpleType::Arrow(Arc::new(a), Arc::new(b))
    }

    /// Argument sorts and final target.
    pub fn uncurry(&self) -> (Vec<SimpleType>, SimpleType) {
        let mut args = Vec::new();
        let mut cur = self;
        while let SimpleType::Arrow(a, b) = cur {
            args.push(a.as_ref().clone());
            cur = b;
        }
        (args, cur.clone())
    }

    pub fn arity(&self) -> usize {
        self.uncurry().0.len()
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Tm => f.write_str("tm"),
            SimpleType::Ty => f.write_str("ty"),
            SimpleType::O => f.write_str("o"),
            SimpleType::Arrow(a, b) => {
                if matches!(**a, SimpleType::Arrow(..)) {
                    write!(f, "({}) -> {}", a, b)
                } else {
                    write!(f, "{} -> {}", a, b)
                }
            }
        }
    }
}

/// Simply typed λ-terms. Bound variables are de Bruijn indices counted
/// across both term λs and formula quantifiers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Name),
    /// Free variable used while building clauses.
    Var(Name),
    Bound(u32),
    Eigen(u32),
    Meta(u32),
    Lam(Hint, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn konst(c: &str) -> Self {
        Term::Const(Name::from(c))
    }

    pub fn var(x: &str) -> Self {
        Term::Var(Name::from(x))
    }

    pub fn app(f: Term, a: Term) -> Self {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps<I: IntoIterator<Item = Term>>(f: Term, args: I) -> Self {
        args.into_iter().fold(f, Term::app)
    }

    pub fn lam(hint: Hint, body: Term) -> Self {
        Term::Lam(hint, Arc::new(body))
    }

    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    /// Largest `k + 1` such that index `k` escapes, or 0 when locally closed.
    pub fn loose_bound(&self) -> u32 {
        match self {
            Term::Bound(i) => i + 1,
            Term::Lam(_, b) => b.loose_bound().saturating_sub(1),
            Term::App(f, a) => f.loose_bound().max(a.loose_bound()),
            _ => 0,
        }
    }

    pub fn shift(&self, d: i64, cutoff: u32) -> Term {
        match self {
            Term::Bound(i) if *i >= cutoff => Term::Bound((*i as i64 + d) as u32),
            Term::Lam(h, b) => Term::Lam(h.clone(), Arc::new(b.shift(d, cutoff + 1))),
            Term::App(f, a) => Term::app(f.shift(d, cutoff), a.shift(d, cutoff)),
            _ => self.clone(),
        }
    }

    /// Replaces index `depth` by `value` (shifted under binders) and lowers
    /// the indices above it.
    pub(crate) fn subst_at(&self, depth: u32, value: &Term, value_open: bool) -> Term {
        match self {
            Term::Bound(i) if *i == depth => {
                if value_open && depth > 0 {
                    value.shift(depth as i64, 0)
                } else {
                    value.clone()
                }
            }
            Term::Bound(i) if *i > depth => Term::Bound(i - 1),
            Term::Lam(h, b) => Term::Lam(h.clone(), Arc::new(b.subst_at(depth + 1, value, value_open))),
            Term::App(f, a) => Term::app(f.subst_at(depth, value, value_open), a.subst_at(depth, value, value_open)),
            _ => self.clone(),
        }
    }

    /// Body of a binder with index 0 replaced by `value`.
    pub fn instantiate(&self, value: &Term) -> Term {
        self.subst_at(0, value, value.loose_bound() > 0)
    }

    /// Abstracts the free variable `x` as index `depth`.
    pub(crate) fn close_var_at(&self, x: &Name, depth: u32) -> Term {
        match self {
            Term::Var(y) if y == x => Term::Bound(depth),
            Term::Lam(h, b) => Term::Lam(h.clone(), Arc::new(b.close_var_at(x, depth + 1))),
            Term::App(f, a) => Term::app(f.close_var_at(x, depth), a.close_var_at(x, depth)),
            _ => self.clone(),
        }
    }

    pub fn close_var(&self, x: &Name) -> Term {
        self.close_var_at(x, 0)
    }

    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Lam(_, b) => b.visit(f),
            Term::App(g, a) => {
                g.visit(f);
                a.visit(f);
            }
            _ => {}
        }
    }

    pub fn metas(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let Term::Meta(m) = t {
                if !out.contains(m) {
                    out.push(*m);
                }
            }
        });
        out
    }

    pub fn has_metas(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= matches!(t, Term::Meta(_)));
        found
    }

    /// Bottom-up replacement of leaves.
    pub fn map_leaves(&self, f: &impl Fn(&Term) -> Option<Term>) -> Term {
        match self {
            Term::Lam(h, b) => Term::Lam(h.clone(), Arc::new(b.map_leaves(f))),
            Term::App(g, a) => Term::app(g.map_leaves(f), a.map_leaves(f)),
            leaf => f(leaf).unwrap_or_else(|| leaf.clone()),
        }
    }

    /// Normal-order β-normalization.
    pub fn beta(&self) -> Term {
        match self {
            Term::Lam(h, b) => Term::Lam(h.clone(), Arc::new(b.beta())),
            Term::App(..) => {
                let (head, args) = self.spine();
                let head = head.beta();
                let mut cur = head;
                for a in args {
                    cur = match cur {
                        Term::Lam(_, body) => body.instantiate(a).beta(),
                        other => Term::app(other, a.beta()),
                    };
                }
                cur
            }
            _ => self.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `hastype subject classifier`
    Atom(Term, Term),
    Top,
    Implies(Arc<Formula>, Arc<Formula>),
    Forall(Hint, SimpleType, Arc<Formula>),
}

impl Formula {
    pub fn atom(subject: Term, classifier: Term) -> Self {
        Formula::Atom(subject, classifier)
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    /// `∀x:τ. body` where `x` is free in `body` as [`Term::Var`].
    pub fn forall_var(x: &Name, hint: Hint, ty: SimpleType, body: Formula) -> Self {
        Formula::Forall(hint, ty, Arc::new(body.close_var_at(x, 0)))
    }

    fn close_var_at(&self, x: &Name, depth: u32) -> Formula {
        match self {
            Formula::Atom(s, c) => Formula::Atom(s.close_var_at(x, depth), c.close_var_at(x, depth)),
            Formula::Top => Formula::Top,
            Formula::Implies(a, b) => Formula::implies(a.close_var_at(x, depth), b.close_var_at(x, depth)),
            Formula::Forall(h, t, b) => Formula::Forall(h.clone(), t.clone(), Arc::new(b.close_var_at(x, depth + 1))),
        }
    }

    fn subst_at(&self, depth: u32, value: &Term, open: bool) -> Formula {
        match self {
            Formula::Atom(s, c) => Formula::Atom(s.subst_at(depth, value, open), c.subst_at(depth, value, open)),
            Formula::Top => Formula::Top,
            Formula::Implies(a, b) => Formula::implies(a.subst_at(depth, value, open), b.subst_at(depth, value, open)),
            Formula::Forall(h, t, b) => Formula::Forall(h.clone(), t.clone(), Arc::new(b.subst_at(depth + 1, value, open))),
        }
    }

    /// Body of a quantifier instantiated with `value`.
    pub fn instantiate(&self, value: &Term) -> Formula {
        self.subst_at(0, value, value.loose_bound() > 0)
    }

    pub fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Atom(s, c) => Formula::Atom(f(s), f(c)),
            Formula::Top => Formula::Top,
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::Forall(h, t, b) => Formula::Forall(h.clone(), t.clone(), Arc::new(b.map_terms(f))),
        }
    }

    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Atom(s, c) => {
                f(s);
                f(c);
            }
            Formula::Top => {}
            Formula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            Formula::Forall(_, _, b) => b.visit_terms(f),
        }
    }

    /// Number of `⊤` occurrences.
    pub fn count_tops(&self) -> usize {
        match self {
            Formula::Top => 1,
            Formula::Atom(..) => 0,
            Formula::Implies(a, b) => a.count_tops() + b.count_tops(),
            Formula::Forall(_, _, b) => b.count_tops(),
        }
    }

    pub fn is_closed(&self) -> bool {
        fn go(f: &Formula, depth: u32) -> bool {
            match f {
                Formula::Atom(s, c) => s.loose_bound() <= depth && c.loose_bound() <= depth && no_vars(s) && no_vars(c),
                Formula::Top => true,
                Formula::Implies(a, b) => go(a, depth) && go(b, depth),
                Formula::Forall(_, _, b) => go(b, depth + 1),
            }
        }
        fn no_vars(t: &Term) -> bool {
            let mut ok = true;
            t.visit(&mut |u| ok &= !matches!(u, Term::Var(_)));
            ok
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ill-sorted: {0}")]
pub struct SortError(pub String);

/// Sort environment for terms.
pub struct SortEnv<'a> {
    pub consts: &'a BTreeMap<Name, SimpleType>,
    pub metas: &'a BTreeMap<u32, SimpleType>,
    pub eigens: &'a BTreeMap<u32, SimpleType>,
}

impl SortEnv<'_> {
    /// Infers the sort of a term in β-normal form; λs need an expected sort,
    /// so this checks against `want`.
    pub fn check(&self, bound: &mut Vec<SimpleType>, t: &Term, want: &SimpleType) -> Result<(), SortError> {
        match t {
            Term::Lam(_, b) => match want {
                SimpleType::Arrow(a, r) => {
                    bound.push(a.as_ref().clone());
                    let res = self.check(bound, b, r);
                    bound.pop();
                    res
                }
                _ => Err(SortError(format!("λ-term at sort {}", want))),
            },
            _ => {
                let got = self.infer(bound, t)?;
                if &got == want {
                    Ok(())
                } else {
                    Err(SortError(format!("expected {}, found {}", want, got)))
                }
            }
        }
    }

    fn infer(&self, bound: &mut Vec<SimpleType>, t: &Term) -> Result<SimpleType, SortError> {
        match t {
            Term::Const(c) => self.consts.get(c).cloned().ok_or_else(|| SortError(format!("unknown constant {}", c))),
            Term::Var(x) => Err(SortError(format!("unexpected free variable {}", x))),
            Term::Bound(i) => {
                let i = *i as usize;
                if i < bound.len() {
                    Ok(bound[bound.len() - 1 - i].clone())
                } else {
                    Err(SortError(format!("unbound index {}", i)))
                }
            }
            Term::Eigen(e) => self.eigens.get(e).cloned().ok_or_else(|| SortError(format!("unknown eigenvariable {}", e))),
            Term::Meta(m) => self.metas.get(m).cloned().ok_or_else(|| SortError(format!("unknown meta {}", m))),
            Term::Lam(..) => Err(SortError("cannot infer the sort of a λ-term".into())),
            Term::App(f, a) => match self.infer(bound, f)? {
                SimpleType::Arrow(d, r) => {
                    self.check(bound, a, &d)?;
                    Ok(r.as_ref().clone())
                }
                other => Err(SortError(format!("application of a term of sort {}", other))),
            },
        }
    }

    /// Checks that a formula is well-sorted at `o`.
    pub fn check_formula(&self, bound: &mut Vec<SimpleType>, f: &Formula) -> Result<(), SortError> {
        match f {
            Formula::Atom(s, c) => {
                self.check(bound, s, &SimpleType::Tm)?;
                self.check(bound, c, &SimpleType::Ty)
            }
            Formula::Top => Ok(()),
            Formula::Implies(a, b) => {
                self.check_formula(bound, a)?;
                self.check_formula(bound, b)
            }
            Formula::Forall(_, t, b) => {
                if t.uncurry().1 == SimpleType::O {
                    return Err(SortError("quantification over a predicate sort".into()));
                }
                bound.push(t.clone());
                let r = self.check_formula(bound, b);
                bound.pop();
                r
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instantiate_and_beta() {
        // ([x] s x) z
        let t = Term::app(Term::lam(Hint::new("x"), Term::app(Term::konst("s"), Term::Bound(0))), Term::konst("z"));
        assert_eq!(t.beta(), Term::app(Term::konst("s"), Term::konst("z")));
        let f = Formula::Forall(
            Hint::new("l"),
            SimpleType::Tm,
            Arc::new(Formula::atom(Term::Bound(0), Term::konst("list"))),
        );
        let Formula::Forall(_, _, body) = &f else { unreachable!() };
        assert_eq!(body.instantiate(&Term::Meta(3)), Formula::atom(Term::Meta(3), Term::konst("list")));
    }

    #[test]
    fn open_value_is_shifted_under_binders() {
        // [y] #1 with #0 := #0 gives [y] #1 (the outer variable, shifted)
        let t = Term::lam(Hint::new("y"), Term::Bound(1));
        assert_eq!(t.subst_at(0, &Term::Bound(5), true), Term::lam(Hint::new("y"), Term::Bound(6)));
    }

    #[test]
    fn sort_display() {
        let t = SimpleType::arrow(SimpleType::arrow(SimpleType::Tm, SimpleType::Tm), SimpleType::Tm);
        assert_eq!(t.to_string(), "(tm -> tm) -> tm");
    }
}
