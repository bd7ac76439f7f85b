//! Turning solver answers back into LF objects and re-checking them with
//! the kernel.
//!
//! A solved query goes through three stages: the bindings are decoded
//! against their LF types ([`decode_term`]), meta-variables left open by the
//! search are filled by auxiliary inhabitation searches
//! ([`finalize_metavars`]), and the closed result is handed to the kernel
//! ([`certify`]).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use crate::hhf_logic::{translate_query, ClauseSet, QueryGoal, SimpleType, Term};
use crate::hhf_prover::{solve, Counters, Limits, SearchReport, Solution};
use crate::lf_syntax::{
    beta_normalize, name, parse_query, pretty_print, substitute_metas, Classifier, Expr, Hint, Name, Normalizer,
    ParseError, SigView, Signature, Sort,
};
use crate::lf_typecheck::{check_object, check_type, check_type_in, Derivation, TypeError};
use crate::rigidity::rigidity_flags;

/// Nesting bound for inhabitation searches started while filling residual
/// meta-variables.
const MAX_RESIDUAL_NESTING: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not an encoding: {0}")]
pub struct DecodeError(pub String);

fn fail<T>(msg: impl Into<String>) -> Result<T, DecodeError> {
    Err(DecodeError(msg.into()))
}

fn beta(e: &Expr) -> Result<Expr, DecodeError> {
    beta_normalize(e).map_err(|err| DecodeError(err.to_string()))
}

struct Decoder<'a> {
    sig: &'a Signature,
    locals: Vec<(Name, Expr)>,
    fresh: usize,
    allow_residual: bool,
    /// Unbound solver metas met so far, with their LF names and types.
    residual: Vec<(u32, Name, Expr)>,
}

impl<'a> Decoder<'a> {
    fn new(sig: &'a Signature, allow_residual: bool) -> Self {
        Decoder { sig, locals: Vec::new(), fresh: 0, allow_residual, residual: Vec::new() }
    }

    fn fresh_name(&mut self, h: &Hint) -> Name {
        self.fresh += 1;
        name(&format!("{}#y{}", h.as_str(), self.fresh))
    }

    fn obj(&mut self, t: &Term, expected: &Expr) -> Result<Expr, DecodeError> {
        if let Expr::Pi(h, dom, cod) = expected {
            let x = self.fresh_name(h);
            let (hint, body) = match t {
                Term::Lam(lh, b) => (lh.clone(), b.instantiate(&Term::Var(x.clone()))),
                _ => (h.clone(), Term::app(t.clone(), Term::Var(x.clone()))),
            };
            self.locals.push((x.clone(), (**dom).clone()));
            let body = self.obj(&body, &cod.open(&x));
            self.locals.pop();
            return Ok(Expr::Lam(hint, dom.clone(), Arc::new(body?.close(&x))));
        }
        let (head, args) = t.spine();
        let mut cls = match head {
            Term::Const(c) => match self.sig.get(c) {
                Some(e) if e.sort == Sort::Type => e.classifier.clone(),
                Some(_) => return fail(format!("{} is a type family", c)),
                None => return fail(format!("unknown constant {}", c)),
            },
            Term::Var(x) => match self.locals.iter().rev().find(|(y, _)| y == x) {
                Some((_, a)) => a.clone(),
                None => return fail(format!("variable {} out of scope", x)),
            },
            Term::Meta(m) => return self.residual_meta(*m, &args, expected),
            Term::Lam(..) => return fail(format!("λ-abstraction at base type {}", pretty_print(expected))),
            Term::Bound(_) | Term::Eigen(_) => return fail(format!("unexpected {:?}", head)),
            Term::App(..) => unreachable!("spine head is never an application"),
        };
        let mut out = match head {
            Term::Const(c) => Expr::Const(c.clone()),
            Term::Var(x) => Expr::Free(x.clone()),
            _ => unreachable!(),
        };
        for a in args {
            let Expr::Pi(_, dom, cod) = &cls else {
                return fail(format!("too many arguments for {}", pretty_print(&out)));
            };
            let v = self.obj(a, dom)?;
            cls = beta(&cod.instantiate(&v))?;
            out = Expr::app(out, v);
        }
        Ok(out)
    }

    /// `?F y1 … yk` with distinct locals `yi` becomes an LF meta-variable of
    /// type `Πy1:B1 … Πyk:Bk. expected`.
    fn residual_meta(&mut self, m: u32, args: &[&Term], expected: &Expr) -> Result<Expr, DecodeError> {
        if !self.allow_residual {
            return fail(format!("unbound meta-variable ?M{}", m));
        }
        let mut vars = Vec::new();
        for a in args {
            match a {
                Term::Var(y) if !vars.contains(y) => vars.push(y.clone()),
                _ => return fail(format!("meta-variable ?M{} applied to a non-pattern", m)),
            }
        }
        let mut ty = expected.clone();
        let mut lf_args = Vec::new();
        for y in vars.iter().rev() {
            let (_, b) = self.locals.iter().rev().find(|(z, _)| z == y).expect("checked in scope").clone();
            ty = Expr::Pi(Hint(y.clone()), Arc::new(b), Arc::new(ty.close(y)));
        }
        if !ty.free_vars().is_empty() {
            return fail(format!("type of ?M{} escapes its scope", m));
        }
        for y in &vars {
            let (_, b) = self.locals.iter().rev().find(|(z, _)| z == y).expect("checked in scope").clone();
            lf_args.push(self.obj(&Term::Var(y.clone()), &b)?);
        }
        let lf_name = match self.residual.iter().find(|(r, _, _)| *r == m) {
            Some((_, n, _)) => n.clone(),
            None => {
                let n = name(&format!("R{}", m));
                self.residual.push((m, n.clone(), ty));
                n
            }
        };
        Ok(Expr::apps(Expr::Meta(lf_name), lf_args))
    }
}

/// Decodes a closed, βη-long solver term as an LF object of type `expected`,
/// restoring λ-annotations from the Π-domains met on the way.
pub fn decode_term(sig: &Signature, t: &Term, expected: &Expr) -> Result<Expr, DecodeError> {
    Decoder::new(sig, false).obj(t, expected)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Meta(String),
    #[error("ill-typed query: {0}")]
    Type(#[from] TypeError),
}

/// A parsed, normalized and checked query type.
#[derive(Clone, Debug)]
pub struct PreparedQuery {
    pub ty: Expr,
    /// Query meta-variables in first-occurrence order, with LF types.
    pub metas: Vec<(Name, Expr)>,
}

impl PreparedQuery {
    /// The goal formula and the sorts of all initial solver metas (query
    /// metas first, then the proof meta).
    pub fn goal(&self, mode: crate::hhf_logic::Mode) -> (QueryGoal, Vec<SimpleType>) {
        let qg = translate_query(&self.ty, &vec![SimpleType::Tm; self.metas.len()], mode);
        let mut sorts: Vec<SimpleType> = qg.metas.iter().map(|(_, s)| s.clone()).collect();
        sorts.push(qg.proof_sort.clone());
        (qg, sorts)
    }
}

struct MetaTyper<'a> {
    sig: &'a Signature,
    locals: Vec<(Name, Expr)>,
    types: BTreeMap<Name, Expr>,
    fresh: usize,
}

impl MetaTyper<'_> {
    fn bind(&mut self, h: &Hint, dom: &Expr) -> Name {
        self.fresh += 1;
        let x = name(&format!("{}#q{}", h.as_str(), self.fresh));
        self.locals.push((x.clone(), dom.clone()));
        x
    }

    fn ty(&mut self, a: &Expr) -> Result<(), QueryError> {
        match a {
            Expr::Pi(h, d, b) => {
                self.ty(d)?;
                let x = self.bind(h, d);
                self.ty(&b.open(&x))?;
                self.locals.pop();
                Ok(())
            }
            Expr::Type => Err(QueryError::Meta("a query must be a type, not a kind".into())),
            _ => self.spine(a),
        }
    }

    fn spine(&mut self, e: &Expr) -> Result<(), QueryError> {
        let (head, args) = e.spine();
        let mut cls = match head {
            Expr::Const(c) => match self.sig.classifier(c) {
                Some(k) => k.clone(),
                None => return Ok(()),
            },
            Expr::Free(x) => match self.locals.iter().rev().find(|(y, _)| y == x) {
                Some((_, a)) => a.clone(),
                None => return Ok(()),
            },
            Expr::Meta(x) if !args.is_empty() => {
                return Err(QueryError::Meta(format!("meta-variable {} must not be applied", x)))
            }
            _ => return Ok(()),
        };
        for a in args {
            let Expr::Pi(_, dom, cod) = &cls else { return Ok(()) };
            self.obj(a, dom)?;
            cls = beta_normalize(&cod.instantiate(a)).map_err(|err| QueryError::Meta(err.to_string()))?;
        }
        Ok(())
    }

    fn obj(&mut self, m: &Expr, expected: &Expr) -> Result<(), QueryError> {
        match (m, expected) {
            (Expr::Meta(x), _) => {
                if self.types.contains_key(x) {
                    return Ok(());
                }
                if matches!(expected, Expr::Pi(..)) {
                    return Err(QueryError::Meta(format!("meta-variable {} must have a base type", x)));
                }
                let locals: Vec<&Name> = self.locals.iter().map(|(y, _)| y).collect();
                if expected.free_vars().iter().any(|v| locals.contains(&v)) {
                    return Err(QueryError::Meta(format!("type of meta-variable {} depends on a bound variable", x)));
                }
                self.types.insert(x.clone(), expected.clone());
                Ok(())
            }
            (Expr::Lam(h, d, body), Expr::Pi(_, _, cod)) => {
                let x = self.bind(h, d);
                let r = self.obj(&body.open(&x), &cod.open(&x));
                self.locals.pop();
                r
            }
            _ => self.spine(m),
        }
    }
}

fn hide_metas(e: &Expr) -> Expr {
    e.map_leaves(&|l| match l {
        Expr::Meta(x) => Some(Expr::Free(name(&format!("?{}", x)))),
        _ => None,
    })
}

fn reveal_metas(e: &Expr) -> Expr {
    e.map_leaves(&|l| match l {
        Expr::Free(x) if x.starts_with('?') => Some(Expr::Meta(name(&x[1..]))),
        _ => None,
    })
}

/// Parses a query, infers the types of its meta-variables from the
/// positions they occupy, and checks it with the metas as local objects.
///
/// Meta-variables must stand unapplied at base types that do not depend on
/// variables bound inside the query.
pub fn prepare_query(sig: &Signature, text: &str) -> Result<PreparedQuery, QueryError> {
    let (a, _) = parse_query(sig, text)?;
    let a = beta_normalize(&a).map_err(|err| QueryError::Meta(err.to_string()))?;
    let mut typer = MetaTyper { sig, locals: Vec::new(), types: BTreeMap::new(), fresh: 0 };
    typer.ty(&a)?;
    let mut locals: Vec<(Name, Expr)> = Vec::new();
    let mut metas = Vec::new();
    for x in a.metas() {
        let Some(t) = typer.types.get(&x) else {
            return Err(QueryError::Meta(format!("cannot infer the type of meta-variable {}", x)));
        };
        let t = Normalizer::new(SigView::full(sig))
            .with_locals(locals.clone())
            .normalize(&hide_metas(t), &Classifier::Of(Expr::Type))
            .map_err(|err| QueryError::Meta(format!("type of meta-variable {}: {}", x, err)))?;
        check_type_in(sig, &locals, &t)?;
        locals.push((name(&format!("?{}", x)), t.clone()));
        metas.push((x, reveal_metas(&t)));
    }
    let hidden = hide_metas(&a);
    let ty = Normalizer::new(SigView::full(sig))
        .with_locals(locals.clone())
        .normalize(&hidden, &Classifier::Of(Expr::Type))
        .map_err(|err| match check_type_in(sig, &locals, &hidden) {
            Err(e) => QueryError::Type(e),
            Ok(_) => QueryError::Meta(err.to_string()),
        })?;
    check_type_in(sig, &locals, &ty)?;
    Ok(PreparedQuery { ty: reveal_metas(&ty), metas })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinalizeError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("uninhabited residual type {0}")]
    Uninhabited(String),
    #[error("ill-typed binding: {0}")]
    IllTyped(TypeError),
}

/// A solution with every meta-variable instantiated, in LF form.
#[derive(Clone, Debug)]
pub struct Finalized {
    pub ty: Expr,
    pub proof: Expr,
    /// Values of the query meta-variables.
    pub bindings: Vec<(Name, Expr)>,
    /// Inhabitants chosen for meta-variables the search left open.
    pub filled: Vec<(Name, Expr)>,
    pub counters: Counters,
}

fn close_up(e: &Expr, fills: &BTreeMap<Name, Expr>) -> Result<Expr, DecodeError> {
    if fills.is_empty() {
        Ok(e.clone())
    } else {
        beta(&substitute_metas(e, fills))
    }
}

/// Decodes a solution, fills residual meta-variables with the first
/// inhabitant found under the same limits, and re-checks the instantiated
/// query type.
pub fn finalize_metavars(
    sig: &Signature,
    program: &ClauseSet,
    query: &PreparedQuery,
    sol: &Solution,
    limits: &Limits,
) -> Result<Finalized, FinalizeError> {
    finalize_nested(sig, program, query, sol, limits, 0)
}

fn finalize_nested(
    sig: &Signature,
    program: &ClauseSet,
    query: &PreparedQuery,
    sol: &Solution,
    limits: &Limits,
    nesting: usize,
) -> Result<Finalized, FinalizeError> {
    let mut dec = Decoder::new(sig, true);
    let mut vals: BTreeMap<Name, Expr> = BTreeMap::new();
    for (i, (x, xty)) in query.metas.iter().enumerate() {
        let ty = close_up(xty, &vals)?;
        let v = dec.obj(&sol.bindings[i], &ty)?;
        vals.insert(x.clone(), v);
    }
    let ty = close_up(&query.ty, &vals)?;
    let proof = dec.obj(&sol.bindings[query.metas.len()], &ty)?;

    let mut fills: BTreeMap<Name, Expr> = BTreeMap::new();
    let mut filled = Vec::new();
    for (_, r, rty) in &dec.residual {
        let rty = close_up(rty, &fills)?;
        let v = inhabit(sig, program, &rty, limits, nesting)?;
        fills.insert(r.clone(), v.clone());
        filled.push((r.clone(), v));
    }
    let ty = close_up(&ty, &fills)?;
    let proof = close_up(&proof, &fills)?;
    let mut bindings = Vec::new();
    for (x, _) in &query.metas {
        bindings.push((x.clone(), close_up(&vals[x], &fills)?));
    }
    check_type(sig, &ty).map_err(FinalizeError::IllTyped)?;
    Ok(Finalized { ty, proof, bindings, filled, counters: sol.counters })
}

fn inhabit(
    sig: &Signature,
    program: &ClauseSet,
    ty: &Expr,
    limits: &Limits,
    nesting: usize,
) -> Result<Expr, FinalizeError> {
    let uninhabited = || FinalizeError::Uninhabited(pretty_print(ty));
    if nesting >= MAX_RESIDUAL_NESTING || ty.has_metas() {
        return Err(uninhabited());
    }
    let q = PreparedQuery { ty: ty.clone(), metas: Vec::new() };
    let (qg, sorts) = q.goal(program.mode);
    let aux = Limits { max_solutions: 1, trace: false, ..limits.clone() };
    let report = solve(program, &qg.goal, &sorts, &aux);
    let sol = report.solutions.first().ok_or_else(uninhabited)?;
    Ok(finalize_nested(sig, program, &q, sol, limits, nesting + 1)?.proof)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertStatus {
    Certified,
    Rejected(String),
}

impl fmt::Display for CertStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertStatus::Certified => f.write_str("certified"),
            CertStatus::Rejected(r) => write!(f, "rejected ({})", r),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifiedAnswer {
    pub bindings: Vec<(Name, Expr)>,
    pub filled: Vec<(Name, Expr)>,
    pub lf_proof: Expr,
    pub lf_type: Expr,
    pub kernel_derivation: Option<Derivation>,
    pub counters: Counters,
    pub status: CertStatus,
}

impl CertifiedAnswer {
    pub fn is_certified(&self) -> bool {
        self.status == CertStatus::Certified
    }

    /// Bindings and proof in `.lf` syntax, followed by the kernel derivation
    /// as `%` comment lines.
    pub fn to_lf(&self, with_derivation: bool) -> String {
        let mut out = String::new();
        for (x, v) in &self.bindings {
            let _ = writeln!(out, "{} = {}.", x, pretty_print(v));
        }
        for (x, v) in &self.filled {
            let _ = writeln!(out, "% residual {} = {}.", x, pretty_print(v));
        }
        let _ = writeln!(out, "proof : {} = {}.", pretty_print(&self.lf_type), pretty_print(&self.lf_proof));
        let _ = writeln!(out, "% {}", self.status);
        if let (true, Some(d)) = (with_derivation, &self.kernel_derivation) {
            write_derivation(d, 0, &mut out);
        }
        out
    }
}

fn write_derivation(d: &Derivation, indent: usize, out: &mut String) {
    let head = d.head.as_ref().map(|h| format!(" {}", h)).unwrap_or_default();
    let _ = writeln!(out, "% {:w$}{}{}  {}", "", d.rule, head, d.conclusion, w = indent * 2);
    for p in &d.premises {
        write_derivation(p, indent + 1, out);
    }
}

/// Runs the kernel on a finalized answer: `check_type` on the instantiated
/// query, then `check_object` on the proof.
pub fn certify(sig: &Signature, fin: &Finalized) -> CertifiedAnswer {
    let (status, derivation) = match check_type(sig, &fin.ty) {
        Err(e) => (CertStatus::Rejected(format!("check_type: {}", e)), None),
        Ok(_) => match check_object(sig, &fin.proof, &fin.ty) {
            Ok(d) => (CertStatus::Certified, Some(d)),
            Err(e) => (CertStatus::Rejected(format!("check_object: {}", e)), None),
        },
    };
    CertifiedAnswer {
        bindings: fin.bindings.clone(),
        filled: fin.filled.clone(),
        lf_proof: fin.proof.clone(),
        lf_type: fin.ty.clone(),
        kernel_derivation: derivation,
        counters: fin.counters,
        status,
    }
}

/// A search together with the fate of each solution it produced.
#[derive(Clone, Debug)]
pub struct QueryRun {
    pub report: SearchReport,
    pub answers: Vec<Result<CertifiedAnswer, FinalizeError>>,
}

/// Solves a prepared query against `program` and certifies every solution.
pub fn run_query(sig: &Signature, program: &ClauseSet, query: &PreparedQuery, limits: &Limits) -> QueryRun {
    let (qg, sorts) = query.goal(program.mode);
    let report = solve(program, &qg.goal, &sorts, limits);
    let answers = report
        .solutions
        .iter()
        .map(|sol| finalize_metavars(sig, program, query, sol, limits).map(|fin| certify(sig, &fin)))
        .collect();
    QueryRun { report, answers }
}

/// Re-checks the instantiation of every binder that the optimized
/// translation left unguarded, for each program-clause step of `sol`.
/// Steps whose instantiation mentions eigenvariables or open metas are
/// skipped. Returns the number of instantiations checked.
pub fn check_skipped_guards(sig: &Signature, sol: &Solution) -> Result<usize, String> {
    let mut checked = 0;
    for step in &sol.steps {
        if step.instantiation.iter().any(|t| t.has_metas() || mentions_eigen(t)) {
            continue;
        }
        let Some(cls) = sig.classifier(&step.origin) else { continue };
        let flags = rigidity_flags(cls);
        if flags.len() != step.instantiation.len() {
            return Err(format!("{}: {} binders but {} instantiations", step.origin, flags.len(), step.instantiation.len()));
        }
        let mut c = cls.clone();
        let mut dec = Decoder::new(sig, false);
        for (t, rigid) in step.instantiation.iter().zip(flags) {
            let Expr::Pi(_, dom, cod) = &c else { unreachable!("one flag per binder") };
            let v = dec.obj(t, dom).map_err(|e| format!("{}: {}", step.origin, e))?;
            if rigid {
                check_object(sig, &v, dom).map_err(|e| format!("{}: {}", step.origin, e))?;
                checked += 1;
            }
            c = beta(&cod.instantiate(&v)).map_err(|e| e.to_string())?;
        }
    }
    Ok(checked)
}

fn mentions_eigen(t: &Term) -> bool {
    let mut found = false;
    t.visit(&mut |s| found |= matches!(s, Term::Eigen(_)));
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hhf_logic::{encode_term, translate, Mode};
    use crate::hhf_prover::Strategy;
    use crate::lf_syntax::{parse_expr, parse_signature};
    use crate::lf_typecheck::derivation_size;
    use crate::test_support::APPEND_LF;

    fn sig() -> Signature {
        parse_signature(APPEND_LF).unwrap()
    }

    fn first(mode: Mode, q: &str) -> CertifiedAnswer {
        let sig = sig();
        let prog = translate(&sig, mode);
        let q = prepare_query(&sig, q).unwrap();
        let limits = Limits { strategy: Strategy::IterativeDeepening, ..Limits::default() };
        let run = run_query(&sig, &prog, &q, &limits);
        run.answers.into_iter().next().expect("a solution").unwrap()
    }

    #[test]
    fn decode_restores_annotations() {
        let sig = sig();
        let a = parse_expr(&sig, "{x:nat} nat").unwrap();
        let t = Term::lam(Hint::new("x"), Term::app(Term::konst("s"), Term::Bound(0)));
        let m = decode_term(&sig, &t, &a).unwrap();
        assert_eq!(m, parse_expr(&sig, "[x:nat] s x").unwrap());
        assert_eq!(encode_term(&m, &[]), t);
        assert_eq!(decode_term(&sig, &Term::konst("z"), &Expr::konst("nat")).unwrap(), Expr::konst("z"));
    }

    #[test]
    fn decode_eta_expands() {
        let sig = sig();
        let a = parse_expr(&sig, "{x:nat} nat").unwrap();
        let m = decode_term(&sig, &Term::konst("s"), &a).unwrap();
        assert_eq!(m, parse_expr(&sig, "[x:nat] s x").unwrap());
    }

    #[test]
    fn decode_rejects_misaligned() {
        let sig = sig();
        let lam = Term::lam(Hint::new("x"), Term::Bound(0));
        assert!(decode_term(&sig, &lam, &Expr::konst("nat")).is_err());
        assert!(decode_term(&sig, &Term::app(Term::konst("z"), Term::konst("z")), &Expr::konst("nat")).is_err());
        assert!(decode_term(&sig, &Term::Meta(0), &Expr::konst("nat")).is_err());
    }

    #[test]
    fn append_answer_certified_in_both_modes() {
        for mode in [Mode::Optimized, Mode::Naive] {
            let ans = first(mode, "append (cons z nil) (cons (s z) nil) L");
            assert!(ans.is_certified(), "{}", ans.status);
            assert_eq!(pretty_print(&ans.bindings[0].1), "cons z (cons (s z) nil)");
            assert_eq!(
                pretty_print(&ans.lf_proof),
                "appCons z nil (cons (s z) nil) (cons (s z) nil) (appNil (cons (s z) nil))"
            );
        }
    }

    #[test]
    fn trivial_nat_query() {
        let ans = first(Mode::Optimized, "nat");
        assert_eq!(ans.lf_proof, Expr::konst("z"));
        assert_eq!(derivation_size(ans.kernel_derivation.as_ref().unwrap()), 1);
    }

    #[test]
    fn mutation_rejected() {
        let sig = sig();
        let prog = translate(&sig, Mode::Optimized);
        let q = prepare_query(&sig, "append (cons z nil) (cons (s z) nil) L").unwrap();
        let run = run_query(&sig, &prog, &q, &Limits::default());
        let fin = finalize_metavars(&sig, &prog, &q, &run.report.solutions[0], &Limits::default()).unwrap();
        let swapped = fin.proof.map_leaves(&|e| match e {
            Expr::Const(c) if &**c == "z" => Some(Expr::konst("nil")),
            _ => None,
        });
        let bad = Finalized { proof: swapped, ..fin };
        let ans = certify(&sig, &bad);
        match &ans.status {
            CertStatus::Rejected(r) => assert!(r.starts_with("check_object:"), "{}", r),
            CertStatus::Certified => panic!("mutated proof accepted"),
        }
    }

    #[test]
    fn residual_meta_filled() {
        // appNil leaves its list argument unconstrained.
        let ans = first(Mode::Optimized, "append nil L L");
        assert!(ans.is_certified());
        assert_eq!(pretty_print(&ans.bindings[0].1), "nil");
        assert_eq!(ans.filled.len(), 1);
    }

    #[test]
    fn function_query() {
        let ans = first(Mode::Optimized, "{x:nat} nat");
        assert!(ans.is_certified());
        assert_eq!(pretty_print(&ans.lf_proof), "[x:nat] x");
    }

    #[test]
    fn query_meta_restrictions() {
        let sig = sig();
        assert!(prepare_query(&sig, "append nil (cons X nil) L").is_ok());
        assert!(matches!(prepare_query(&sig, "append nil nil z"), Err(QueryError::Type(_))));
        let sig2 = parse_signature("nat : type. z : nat. p : (nat -> nat) -> type.").unwrap();
        assert!(matches!(prepare_query(&sig2, "p F"), Err(QueryError::Meta(_))));
    }

    #[test]
    fn finalize_is_idempotent_on_closed_solutions() {
        let sig = sig();
        let prog = translate(&sig, Mode::Optimized);
        let q = prepare_query(&sig, "append (cons z nil) nil L").unwrap();
        let run = run_query(&sig, &prog, &q, &Limits::default());
        let sol = &run.report.solutions[0];
        let a = finalize_metavars(&sig, &prog, &q, sol, &Limits::default()).unwrap();
        let closed = PreparedQuery { ty: a.ty.clone(), metas: Vec::new() };
        let mut sol2 = sol.clone();
        sol2.bindings = vec![sol.bindings[1].clone()];
        let b = finalize_metavars(&sig, &prog, &closed, &sol2, &Limits::default()).unwrap();
        assert_eq!((a.ty, a.proof), (b.ty, b.proof));
        assert_eq!(check_skipped_guards(&sig, sol), Ok(5));
    }
}
