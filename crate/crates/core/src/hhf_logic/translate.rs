use std::collections::BTreeMap;
use std::fmt;

use crate::lf_syntax::{name, Expr, Hint, Name, Signature, Sort};
use crate::rigidity::rigidity_flags;

use super::term::{Formula, SimpleType, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Naive,
    Optimized,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Naive => "naive",
            Mode::Optimized => "optimized",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(Mode::Naive),
            "optimized" => Ok(Mode::Optimized),
            other => Err(format!("unknown mode {}", other)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    /// Declaration the clause was generated from.
    pub origin: Name,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseSet {
    pub mode: Mode,
    pub clauses: Vec<Clause>,
}

/// `Π ↦ →`, `type ↦ ty`, any other base ↦ `tm`.
pub fn erase_type(e: &Expr) -> SimpleType {
    match e {
        Expr::Type => SimpleType::Ty,
        Expr::Pi(_, a, b) => SimpleType::arrow(erase_type(a), erase_type(b)),
        _ => SimpleType::Tm,
    }
}

/// Sorts of all signature constants after erasure.
pub fn erased_signature(sig: &Signature) -> BTreeMap<Name, SimpleType> {
    sig.entries().iter().map(|e| (e.name.clone(), erase_type(&e.classifier))).collect()
}

/// Drops λ-annotations. Meta-variables are mapped through `metas`.
///
/// Panics on `type` or a Π, which never occur inside canonical objects or
/// base types.
pub fn encode_term_with(e: &Expr, metas: &dyn Fn(&Name) -> Term) -> Term {
    match e {
        Expr::Const(c) => Term::Const(c.clone()),
        Expr::Free(x) => Term::Var(x.clone()),
        Expr::Meta(m) => metas(m),
        Expr::Bound(i) => Term::Bound(*i),
        Expr::Lam(h, _, b) => Term::lam(h.clone(), encode_term_with(b, metas)),
        Expr::App(f, a) => Term::app(encode_term_with(f, metas), encode_term_with(a, metas)),
        Expr::Type | Expr::Pi(..) => panic!("encode_term: {:?} is not an object or base type", e),
    }
}

/// [`encode_term_with`] where meta-variables are named by first occurrence
/// in `order`.
pub fn encode_term(e: &Expr, order: &[Name]) -> Term {
    encode_term_with(e, &|m| {
        let i = order.iter().position(|n| n == m).expect("meta-variable not in order list");
        Term::Meta(i as u32)
    })
}

struct Builder<'a> {
    fresh: usize,
    metas: &'a dyn Fn(&Name) -> Term,
}

impl Builder<'_> {
    fn fresh(&mut self, h: &Hint) -> Name {
        self.fresh += 1;
        name(&format!("{}#h{}", h.as_str(), self.fresh))
    }

    fn encode(&self, e: &Expr) -> Term {
        encode_term_with(e, self.metas)
    }

    /// Naive translation: every binder is guarded by the full typing formula.
    fn naive(&mut self, a: &Expr, m: Term) -> Formula {
        match a {
            Expr::Pi(h, dom, body) => {
                let x = self.fresh(h);
                let guard = self.naive(dom, Term::Var(x.clone()));
                let rest = self.naive(&body.open(&x), Term::app(m, Term::Var(x.clone())));
                Formula::forall_var(&x, h.clone(), erase_type(dom), Formula::implies(guard, rest))
            }
            _ => Formula::atom(m, self.encode(a)),
        }
    }

    /// Positive (clause) position; `flags` gives rigidity of the outer binders.
    fn pos_with(&mut self, a: &Expr, m: Term, flags: &[bool]) -> Formula {
        match a {
            Expr::Pi(h, dom, body) => {
                let x = self.fresh(h);
                let guard = if flags.first().copied().unwrap_or(false) {
                    Formula::Top
                } else {
                    self.neg(dom, Term::Var(x.clone()))
                };
                let rest = self.pos_with(&body.open(&x), Term::app(m, Term::Var(x.clone())), flags.get(1..).unwrap_or(&[]));
                Formula::forall_var(&x, h.clone(), erase_type(dom), Formula::implies(guard, rest))
            }
            _ => Formula::atom(m, self.encode(a)),
        }
    }

    fn pos(&mut self, a: &Expr, m: Term) -> Formula {
        let flags = rigidity_flags(a);
        self.pos_with(a, m, &flags)
    }

    /// Negative (goal) position.
    fn neg(&mut self, a: &Expr, m: Term) -> Formula {
        match a {
            Expr::Pi(h, dom, body) => {
                let x = self.fresh(h);
                let hyp = self.pos(dom, Term::Var(x.clone()));
                let rest = self.neg(&body.open(&x), Term::app(m, Term::Var(x.clone())));
                Formula::forall_var(&x, h.clone(), erase_type(dom), Formula::implies(hyp, rest))
            }
            _ => Formula::atom(m, self.encode(a)),
        }
    }
}

fn no_metas(m: &Name) -> Term {
    panic!("unexpected meta-variable {} in a signature", m)
}

/// Clause for one object-level declaration `c : A` in the given mode.
pub fn translate_decl(c: &str, a: &Expr, mode: Mode) -> Formula {
    let mut b = Builder { fresh: 0, metas: &no_metas };
    match mode {
        Mode::Naive => b.naive(a, Term::konst(c)),
        Mode::Optimized => b.pos(a, Term::konst(c)),
    }
}

/// Optimized clause with an explicit per-binder plan instead of the
/// computed one. Used to show what an unsound plan would admit.
pub fn translate_decl_with_plan(c: &str, a: &Expr, rigid: &[bool]) -> Formula {
    let mut b = Builder { fresh: 0, metas: &no_metas };
    b.pos_with(a, Term::konst(c), rigid)
}

pub fn translate_optimized_decl(c: &str, a: &Expr) -> Formula {
    translate_decl(c, a, Mode::Optimized)
}

pub fn translate(sig: &Signature, mode: Mode) -> ClauseSet {
    let clauses = sig
        .entries()
        .iter()
        .filter(|e| e.sort == Sort::Type)
        .map(|e| Clause { origin: e.name.clone(), formula: translate_decl(&e.name, &e.classifier, mode) })
        .collect();
    ClauseSet { mode, clauses }
}

pub fn translate_simple(sig: &Signature) -> ClauseSet {
    translate(sig, Mode::Naive)
}

pub fn translate_optimized(sig: &Signature) -> ClauseSet {
    translate(sig, Mode::Optimized)
}

/// A query `A` as a goal about a fresh proof meta.
#[derive(Clone, Debug)]
pub struct QueryGoal {
    pub goal: Formula,
    /// Query meta-variables in first-occurrence order; meta `i` is `Meta(i)`.
    pub metas: Vec<(Name, SimpleType)>,
    /// The proof meta is `Meta(metas.len())`.
    pub proof_meta: u32,
    pub proof_sort: SimpleType,
}

/// `⟨A⟩−(M)` (or its naive counterpart) for a fresh proof meta `M`.
/// `meta_sorts` gives the erased sort of each query meta, in the order of
/// `a.metas()`.
pub fn translate_query(a: &Expr, meta_sorts: &[SimpleType], mode: Mode) -> QueryGoal {
    let order = a.metas();
    assert_eq!(order.len(), meta_sorts.len(), "one sort per query meta-variable");
    let lookup = |m: &Name| Term::Meta(order.iter().position(|n| n == m).expect("query meta") as u32);
    let proof_meta = order.len() as u32;
    let mut b = Builder { fresh: 0, metas: &lookup };
    let goal = match mode {
        Mode::Naive => b.naive(a, Term::Meta(proof_meta)),
        Mode::Optimized => b.neg(a, Term::Meta(proof_meta)),
    };
    QueryGoal {
        goal,
        metas: order.into_iter().zip(meta_sorts.iter().cloned()).collect(),
        proof_meta,
        proof_sort: erase_type(a),
    }
}

/// Replaces every `⊤` guard of an optimized clause by the naive guard at
/// the same position. Both formulas must come from the same declaration.
pub fn fill_top_guards(optimized: &Formula, naive: &Formula) -> Option<Formula> {
    match (optimized, naive) {
        (Formula::Top, n) => Some(n.clone()),
        (Formula::Atom(s1, c1), Formula::Atom(s2, c2)) if s1 == s2 && c1 == c2 => Some(optimized.clone()),
        (Formula::Implies(a1, b1), Formula::Implies(a2, b2)) => {
            Some(Formula::implies(fill_top_guards(a1, a2)?, fill_top_guards(b1, b2)?))
        }
        (Formula::Forall(h, t1, b1), Formula::Forall(_, t2, b2)) if t1 == t2 => {
            Some(Formula::Forall(h.clone(), t1.clone(), std::sync::Arc::new(fill_top_guards(b1, b2)?)))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hhf_logic::term::SortEnv;
    use crate::lf_syntax::{parse_expr, parse_signature};
    use crate::test_support::APPEND_LF;

    #[test]
    fn erasure() {
        let sig = parse_signature(APPEND_LF).unwrap();
        let tm = SimpleType::Tm;
        assert_eq!(erase_type(sig.classifier("nat").unwrap()), SimpleType::Ty);
        assert_eq!(
            erase_type(sig.classifier("cons").unwrap()),
            SimpleType::arrow(tm.clone(), SimpleType::arrow(tm.clone(), tm.clone()))
        );
        assert_eq!(erase_type(sig.classifier("append").unwrap()).to_string(), "tm -> tm -> tm -> ty");
        assert_eq!(erase_type(&Expr::Type), SimpleType::Ty);
    }

    #[test]
    fn encoding_drops_annotations() {
        let sig = parse_signature(APPEND_LF).unwrap();
        let e = parse_expr(&sig, "[x:nat] s x").unwrap();
        let want = Term::lam(Hint::new("x"), Term::app(Term::konst("s"), Term::Bound(0)));
        assert_eq!(encode_term(&e, &[]), want);
        let k = Expr::meta("K");
        let a = Expr::apps(Expr::konst("append"), [Expr::konst("nil"), k.clone(), k]);
        let t = encode_term(&a, &[name("K")]);
        assert_eq!(t, Term::apps(Term::konst("append"), [Term::konst("nil"), Term::Meta(0), Term::Meta(0)]));
    }

    #[test]
    fn clause_counts_and_sorts() {
        let sig = parse_signature(APPEND_LF).unwrap();
        let consts = erased_signature(&sig);
        let empty = BTreeMap::new();
        let env = SortEnv { consts: &consts, metas: &empty, eigens: &empty };
        for mode in [Mode::Naive, Mode::Optimized] {
            let cs = translate(&sig, mode);
            assert_eq!(cs.clauses.len(), 6);
            for c in &cs.clauses {
                assert!(c.formula.is_closed());
                env.check_formula(&mut Vec::new(), &c.formula).unwrap();
            }
        }
        let opt = translate_optimized(&sig);
        let tops: Vec<usize> = opt.clauses.iter().map(|c| c.formula.count_tops()).collect();
        assert_eq!(tops, vec![0, 0, 0, 0, 1, 4]);
    }

    #[test]
    fn top_guards_refill_to_naive() {
        let sig = parse_signature(APPEND_LF).unwrap();
        let naive = translate_simple(&sig);
        let opt = translate_optimized(&sig);
        for (o, n) in opt.clauses.iter().zip(&naive.clauses) {
            assert_eq!(fill_top_guards(&o.formula, &n.formula).as_ref(), Some(&n.formula));
        }
    }

    #[test]
    fn pi_query() {
        let sig = parse_signature(APPEND_LF).unwrap();
        let a = parse_expr(&sig, "{x:nat} nat").unwrap();
        let q = translate_query(&a, &[], Mode::Optimized);
        let want = Formula::Forall(
            Hint::new("x"),
            SimpleType::Tm,
            std::sync::Arc::new(Formula::implies(
                Formula::atom(Term::Bound(0), Term::konst("nat")),
                Formula::atom(Term::app(Term::Meta(0), Term::Bound(0)), Term::konst("nat")),
            )),
        );
        assert_eq!(q.goal, want);
        assert_eq!(q.proof_sort.to_string(), "tm -> tm");
    }
}
