//! Binding store and higher-order pattern unification.
//!
//! Terms handed to the unifier are locally closed; λ-bodies are opened with
//! local eigenvariables whose level is above every meta, so they can only
//! enter a binding through a pattern argument.

use std::fmt;

use crate::hhf_logic::{SimpleType, Term};
use crate::lf_syntax::{Hint, Name};

/// Level given to eigenvariables that stand for λ-bound variables during
/// unification.
pub const LOCAL_LEVEL: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct MetaInfo {
    pub sort: SimpleType,
    /// Eigenvariables of level at most this may occur in the binding.
    pub level: u32,
    pub hint: Option<Name>,
}

#[derive(Clone, Debug)]
pub struct EigenInfo {
    pub level: u32,
    pub sort: Option<SimpleType>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnifyError {
    Clash,
    Occurs,
    Scope,
    /// A meta-variable applied to something other than distinct variables
    /// that are out of its scope.
    NonPattern,
    Budget,
}

impl fmt::Display for UnifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnifyError::Clash => "clash",
            UnifyError::Occurs => "occurs check",
            UnifyError::Scope => "scope check",
            UnifyError::NonPattern => "non-pattern unification problem",
            UnifyError::Budget => "budget exceeded",
        })
    }
}

/// Position in the store that can be returned to.
#[derive(Clone, Copy, Debug)]
pub struct Mark {
    trail: usize,
    metas: usize,
    eigens: usize,
}

#[derive(Clone, Debug)]
pub struct Store {
    metas: Vec<MetaInfo>,
    bindings: Vec<Option<Term>>,
    trail: Vec<u32>,
    eigens: Vec<EigenInfo>,
    pub unify_calls: u64,
    pub budget: u64,
}

impl Default for Store {
    fn default() -> Self {
        Store::new(u64::MAX)
    }
}

type UResult = Result<(), UnifyError>;

impl Store {
    pub fn new(budget: u64) -> Self {
        Store { metas: Vec::new(), bindings: Vec::new(), trail: Vec::new(), eigens: Vec::new(), unify_calls: 0, budget }
    }

    pub fn new_meta(&mut self, sort: SimpleType, level: u32, hint: Option<Name>) -> u32 {
        self.metas.push(MetaInfo { sort, level, hint });
        self.bindings.push(None);
        (self.metas.len() - 1) as u32
    }

    pub fn new_eigen(&mut self, level: u32, sort: Option<SimpleType>) -> u32 {
        self.eigens.push(EigenInfo { level, sort });
        (self.eigens.len() - 1) as u32
    }

    pub fn meta(&self, m: u32) -> &MetaInfo {
        &self.metas[m as usize]
    }

    pub fn eigen(&self, e: u32) -> &EigenInfo {
        &self.eigens[e as usize]
    }

    pub fn meta_count(&self) -> usize {
        self.metas.len()
    }

    pub fn binding(&self, m: u32) -> Option<&Term> {
        self.bindings.get(m as usize).and_then(|b| b.as_ref())
    }

    pub fn bind(&mut self, m: u32, t: Term) {
        debug_assert!(self.bindings[m as usize].is_none(), "meta bound twice");
        debug_assert_eq!(t.loose_bound(), 0, "bindings are closed");
        self.bindings[m as usize] = Some(t);
        self.trail.push(m);
    }

    pub fn mark(&self) -> Mark {
        Mark { trail: self.trail.len(), metas: self.metas.len(), eigens: self.eigens.len() }
    }

    pub fn undo(&mut self, mark: Mark) {
        while self.trail.len() > mark.trail {
            let m = self.trail.pop().unwrap() as usize;
            if m < self.bindings.len() {
                self.bindings[m] = None;
            }
        }
        self.metas.truncate(mark.metas);
        self.bindings.truncate(mark.metas);
        self.eigens.truncate(mark.eigens);
    }

    /// Weak head normal form: bound meta heads are replaced and head
    /// β-redexes contracted.
    pub fn whnf(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        loop {
            let (head, args) = cur.spine();
            let next = match head {
                Term::Meta(m) => match self.binding(*m) {
                    Some(b) => Term::apps(b.clone(), args.into_iter().cloned()),
                    None => return cur,
                },
                Term::Lam(_, body) if !args.is_empty() => {
                    let reduced = body.instantiate(args[0]);
                    Term::apps(reduced, args[1..].iter().map(|a| (*a).clone()))
                }
                _ => return cur,
            };
            cur = next;
        }
    }

    /// All bound metas replaced, β-normal.
    pub fn resolve(&self, t: &Term) -> Term {
        let w = self.whnf(t);
        match &w {
            Term::Lam(h, b) => Term::lam(h.clone(), self.resolve(b)),
            Term::App(..) => {
                let (head, args) = w.spine();
                let head = head.clone();
                Term::apps(head, args.into_iter().map(|a| self.resolve(a)).collect::<Vec<_>>())
            }
            _ => w,
        }
    }

    fn tick(&mut self) -> UResult {
        self.unify_calls += 1;
        if self.unify_calls > self.budget {
            Err(UnifyError::Budget)
        } else {
            Ok(())
        }
    }

    /// Unifies two locally closed terms of the same sort. On failure the
    /// caller is expected to undo to a mark taken before the call.
    pub fn unify(&mut self, a: &Term, b: &Term) -> UResult {
        let mark = self.eigens.len();
        let r = self.unify_rec(a, b);
        // Locals cannot escape into bindings, so their slots can be reused.
        self.eigens.truncate(mark);
        r
    }

    fn local(&mut self) -> Term {
        Term::Eigen(self.new_eigen(LOCAL_LEVEL, None))
    }

    fn unify_rec(&mut self, a: &Term, b: &Term) -> UResult {
        self.tick()?;
        let a = self.whnf(a);
        let b = self.whnf(b);
        match (&a, &b) {
            (Term::Lam(_, x), Term::Lam(_, y)) => {
                let e = self.local();
                self.unify_rec(&x.instantiate(&e), &y.instantiate(&e))
            }
            (Term::Lam(_, x), other) | (other, Term::Lam(_, x)) => {
                let e = self.local();
                let body = x.instantiate(&e);
                let expanded = Term::app(other.clone(), e);
                self.unify_rec(&body, &expanded)
            }
            _ => {
                let (ha, aa) = a.spine();
                let (hb, ab) = b.spine();
                match (ha, hb) {
                    (Term::Meta(f), Term::Meta(g)) if f == g => {
                        let (f, aa, ab) = (*f, own(aa), own(ab));
                        self.flex_same(f, &aa, &ab)
                    }
                    (Term::Meta(f), _) => {
                        let (f, aa) = (*f, own(aa));
                        let mark = self.mark();
                        match self.flex_rigid(f, &aa, &b) {
                            Err(UnifyError::NonPattern) if matches!(hb, Term::Meta(_)) => {
                                self.undo(mark);
                                let Term::Meta(g) = hb else { unreachable!() };
                                let (g, ab) = (*g, own(ab));
                                self.flex_rigid(g, &ab, &a)
                            }
                            r => r,
                        }
                    }
                    (_, Term::Meta(g)) => {
                        let (g, ab) = (*g, own(ab));
                        self.flex_rigid(g, &ab, &a)
                    }
                    _ => {
                        if ha != hb || aa.len() != ab.len() {
                            return Err(UnifyError::Clash);
                        }
                        let (aa, ab) = (own(aa), own(ab));
                        for (x, y) in aa.iter().zip(&ab) {
                            self.unify_rec(x, y)?;
                        }
                        Ok(())
                    }
                }
            }
        }
    }

    /// η-contracted, resolved form of a spine argument if it is an
    /// eigenvariable.
    fn as_eigen(&self, t: &Term) -> Option<u32> {
        match eta_contract(&self.resolve(t)) {
            Term::Eigen(e) => Some(e),
            _ => None,
        }
    }

    /// Checks that `args` are distinct eigenvariables out of `f`'s scope.
    fn pattern_args(&self, f: u32, args: &[Term]) -> Result<Vec<u32>, UnifyError> {
        let level = self.meta(f).level;
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            match self.as_eigen(a) {
                Some(e) if self.eigen(e).level > level && !out.contains(&e) => out.push(e),
                _ => return Err(UnifyError::NonPattern),
            }
        }
        Ok(out)
    }

    /// Sort of `f` after `n` arguments, and the sorts of those arguments.
    fn split_sort(&self, f: u32, n: usize) -> (Vec<SimpleType>, SimpleType) {
        let mut args = Vec::with_capacity(n);
        let mut cur = self.meta(f).sort.clone();
        for _ in 0..n {
            match cur {
                SimpleType::Arrow(a, b) => {
                    args.push(a.as_ref().clone());
                    cur = b.as_ref().clone();
                }
                other => panic!("meta applied beyond its sort {}", other),
            }
        }
        (args, cur)
    }

    /// Binds `f := λx1…xn. h x_{i1} … x_{ik}` for a fresh `h` at `level`,
    /// keeping the positions in `keep`.
    fn restrict(&mut self, f: u32, n: usize, keep: &[usize], level: u32) -> Term {
        let (arg_sorts, target) = self.split_sort(f, n);
        let sort = keep.iter().rev().fold(target, |acc, &i| SimpleType::arrow(arg_sorts[i].clone(), acc));
        let hint = self.meta(f).hint.clone();
        let h = self.new_meta(sort, level, hint);
        let body = Term::apps(Term::Meta(h), keep.iter().map(|&i| Term::Bound((n - 1 - i) as u32)));
        let binding = lambdas(n, body);
        self.bind(f, binding.clone());
        binding
    }

    fn flex_same(&mut self, f: u32, xs: &[Term], ys: &[Term]) -> UResult {
        let ex = self.pattern_args(f, xs)?;
        let ey = self.pattern_args(f, ys)?;
        if ex == ey {
            return Ok(());
        }
        let keep: Vec<usize> = (0..ex.len()).filter(|&i| ex[i] == ey[i]).collect();
        let level = self.meta(f).level;
        self.restrict(f, ex.len(), &keep, level);
        Ok(())
    }

    fn flex_rigid(&mut self, f: u32, args: &[Term], t: &Term) -> UResult {
        let xs = self.pattern_args(f, args)?;
        if is_ground(t) {
            // Nothing to abstract, prune or scope-check.
            self.bind(f, lambdas(xs.len(), t.clone()));
            return Ok(());
        }
        let level = self.meta(f).level;
        let body = self.invert(f, level, &xs, t, 0)?;
        self.bind(f, lambdas(xs.len(), body));
        Ok(())
    }

    /// Abstracts `t` over the eigenvariables `xs` for a binding of `f`.
    /// `depth` counts λs of `t` crossed so far.
    fn invert(&mut self, f: u32, level: u32, xs: &[u32], t: &Term, depth: u32) -> Result<Term, UnifyError> {
        let w = self.whnf(t);
        match &w {
            Term::Lam(h, b) => Ok(Term::lam(h.clone(), self.invert(f, level, xs, b, depth + 1)?)),
            _ => {
                let (head, args) = w.spine();
                let args = own(args);
                let n = xs.len() as u32;
                let new_head = match head {
                    Term::Const(_) => head.clone(),
                    Term::Bound(i) if *i < depth => head.clone(),
                    Term::Bound(_) | Term::Var(_) => panic!("unexpected open term in unification"),
                    Term::Eigen(e) => match xs.iter().position(|x| x == e) {
                        Some(i) => Term::Bound(depth + n - 1 - i as u32),
                        None if self.eigen(*e).level <= level => head.clone(),
                        None => return Err(UnifyError::Scope),
                    },
                    Term::Meta(g) if *g == f => return Err(UnifyError::Occurs),
                    Term::Meta(g) => {
                        let g = *g;
                        return self.invert_flex(f, level, xs, g, &args, depth);
                    }
                    Term::Lam(..) | Term::App(..) => unreachable!("spine head after whnf"),
                };
                let mut out = new_head;
                for a in &args {
                    out = Term::app(out, self.invert(f, level, xs, a, depth)?);
                }
                Ok(out)
            }
        }
    }

    /// An unbound meta `g` inside the right-hand side: prune arguments that
    /// cannot be expressed and lower its level to `level`.
    fn invert_flex(&mut self, f: u32, level: u32, xs: &[u32], g: u32, args: &[Term], depth: u32) -> Result<Term, UnifyError> {
        // Decide for each argument whether it survives.
        let mut keep = Vec::new();
        let mut needs_restrict = self.meta(g).level > level;
        let mut pattern = true;
        let mut seen = Vec::new();
        for (i, a) in args.iter().enumerate() {
            let r = eta_contract(&self.resolve(a));
            let ok = match &r {
                Term::Eigen(e) => {
                    if seen.contains(e) {
                        pattern = false;
                    }
                    seen.push(*e);
                    xs.contains(e) || self.eigen(*e).level <= level
                }
                Term::Bound(k) if *k < depth => true,
                _ => {
                    pattern = false;
                    true
                }
            };
            if ok {
                keep.push(i);
            } else {
                needs_restrict = true;
            }
        }
        let mut head = Term::Meta(g);
        let mut kept_args: Vec<&Term> = args.iter().collect();
        if needs_restrict {
            if !pattern {
                return Err(UnifyError::NonPattern);
            }
            let new_level = level.min(self.meta(g).level);
            self.restrict(g, args.len(), &keep, new_level);
            // The restricted meta is the last one created.
            head = Term::Meta((self.meta_count() - 1) as u32);
            kept_args = keep.iter().map(|&i| &args[i]).collect();
        }
        let mut out = head;
        for a in kept_args {
            out = Term::app(out, self.invert(f, level, xs, a, depth)?);
        }
        Ok(out)
    }
}

/// Built from constants only.
fn is_ground(t: &Term) -> bool {
    match t {
        Term::Const(_) => true,
        Term::App(f, a) => is_ground(f) && is_ground(a),
        _ => false,
    }
}

fn own(v: Vec<&Term>) -> Vec<Term> {
    v.into_iter().cloned().collect()
}

fn lambdas(n: usize, body: Term) -> Term {
    (0..n).fold(body, |acc, _| Term::lam(Hint::new("_"), acc))
}

/// Removes η-redexes `λx. t x` (x not free in t), innermost first.
pub fn eta_contract(t: &Term) -> Term {
    match t {
        Term::Lam(h, b) => {
            let b = eta_contract(b);
            if let Term::App(f, a) = &b {
                if **a == Term::Bound(0) && !mentions(f, 0) {
                    return f.shift(-1, 0);
                }
            }
            Term::lam(h.clone(), b)
        }
        Term::App(f, a) => Term::app(eta_contract(f), eta_contract(a)),
        _ => t.clone(),
    }
}

fn mentions(t: &Term, k: u32) -> bool {
    match t {
        Term::Bound(i) => *i == k,
        Term::Lam(_, b) => mentions(b, k + 1),
        Term::App(f, a) => mentions(f, k) || mentions(a, k),
        _ => false,
    }
}
