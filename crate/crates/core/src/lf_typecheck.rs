//! Canonical LF kernel.
//!
//! Decides the four LF assertions (context, kind, type family, object) with
//! the application rules replaced by big-step backchaining: a constant or
//! local `y : Π x1:B1 … Π xn:Bn. A` proves `y N1 … Nn : A[N/x]` from one
//! premise per binder, `Ni : Bi[N1/x1 … Ni-1/xi-1]`, checked left to right.
//!
//! Inputs are normalized once at the boundary; inside the kernel every
//! expression is βη-long and only instantiated classifiers are re-normalized
//! (β only). Meta-variables are rejected: this module is the trusted oracle
//! that certifies solver answers.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::lf_syntax::{
    name, pretty_print, Classifier, Expr, Hint, Name, NormalizeError, Normalizer, SigView, Signature, Sort,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    NullCtx,
    KindCtx,
    TypeCtx,
    TypeKind,
    PiKind,
    PiFam,
    AbsFam,
    AbsObj,
    BackchainObj,
    BackchainFam,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::NullCtx => "nullctx",
            Rule::KindCtx => "kindctx",
            Rule::TypeCtx => "typectx",
            Rule::TypeKind => "typekind",
            Rule::PiKind => "pikind",
            Rule::PiFam => "pifam",
            Rule::AbsFam => "absfam",
            Rule::AbsObj => "absobj",
            Rule::BackchainObj => "backchain-obj",
            Rule::BackchainFam => "backchain-fam",
        };
        f.write_str(s)
    }
}

/// Conclusion of a rule: `⊢ Γ ctx`, `Γ ⊢ K kind`, `Γ ⊢ A : K` or `Γ ⊢ M : A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    /// Hash of the signature prefix length and the local context.
    pub context: u64,
    pub subject: Option<Expr>,
    pub classifier: Option<Expr>,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.subject, &self.classifier) {
            (None, _) => write!(f, "|- G{:04x} ctx", self.context & 0xffff),
            (Some(k), None) => write!(f, "G{:04x} |- {} kind", self.context & 0xffff, pretty_print(k)),
            (Some(s), Some(c)) => {
                write!(f, "G{:04x} |- {} : {}", self.context & 0xffff, pretty_print(s), pretty_print(c))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub conclusion: Judgment,
    /// Head constant or local for backchaining rules.
    pub head: Option<Name>,
    /// Arguments the head was instantiated with, for backchaining rules.
    pub instantiation: Vec<Expr>,
    pub premises: Vec<Derivation>,
    size: usize,
}

impl Derivation {
    fn new(rule: Rule, conclusion: Judgment, premises: Vec<Derivation>) -> Self {
        let size = 1 + premises.iter().map(|p| p.size).sum::<usize>();
        Derivation { rule, conclusion, head: None, instantiation: Vec::new(), premises, size }
    }

    fn backchain(rule: Rule, conclusion: Judgment, head: Name, args: Vec<Expr>, premises: Vec<Derivation>) -> Self {
        let mut d = Derivation::new(rule, conclusion, premises);
        d.head = Some(head);
        d.instantiation = args;
        d
    }

    /// Number of rule nodes.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `(rule conclusion (premises…))`
    pub fn to_sexp(&self) -> String {
        let mut out = String::new();
        self.write_sexp(&mut out);
        out
    }

    fn write_sexp(&self, out: &mut String) {
        out.push('(');
        out.push_str(&self.rule.to_string());
        if let Some(h) = &self.head {
            out.push(' ');
            out.push_str(h);
        }
        out.push_str(" \"");
        out.push_str(&self.conclusion.to_string());
        out.push_str("\" (");
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            p.write_sexp(out);
        }
        out.push_str("))");
    }

    pub fn walk(&self, f: &mut impl FnMut(&Derivation)) {
        f(self);
        for p in &self.premises {
            p.walk(f);
        }
    }
}

/// Returns the cached node count.
pub fn derivation_size(d: &Derivation) -> usize {
    d.size()
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{rule}: {judgment}: {message}{}", fmt_path(.path))]
pub struct TypeError {
    pub rule: Rule,
    pub judgment: String,
    pub message: String,
    /// Premise indices from the outermost derivation down to the failure.
    pub path: Vec<usize>,
}

fn fmt_path(p: &[usize]) -> String {
    if p.is_empty() {
        String::new()
    } else {
        format!(" (premise path {:?})", p.iter().map(|i| i + 1).collect::<Vec<_>>())
    }
}

impl TypeError {
    fn at(mut self, premise: usize) -> Self {
        self.path.insert(0, premise);
        self
    }
}

type Result<T> = std::result::Result<T, TypeError>;

struct Kernel<'a> {
    sig: SigView<'a>,
    locals: Vec<(Name, Expr)>,
    fresh: usize,
}

impl<'a> Kernel<'a> {
    fn new(sig: SigView<'a>) -> Self {
        Kernel { sig, locals: Vec::new(), fresh: 0 }
    }

    fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.sig.limit.hash(&mut h);
        self.locals.hash(&mut h);
        h.finish()
    }

    fn judgment(&self, subject: Option<&Expr>, classifier: Option<&Expr>) -> Judgment {
        Judgment { context: self.fingerprint(), subject: subject.cloned(), classifier: classifier.cloned() }
    }

    fn fail<T>(&self, rule: Rule, subject: &Expr, classifier: Option<&Expr>, message: impl Into<String>) -> Result<T> {
        Err(TypeError {
            rule,
            judgment: self.judgment(Some(subject), classifier).to_string(),
            message: message.into(),
            path: Vec::new(),
        })
    }

    fn fresh(&mut self, h: &Hint) -> Name {
        self.fresh += 1;
        let base = if h.as_str() == "_" { "x" } else { h.as_str() };
        name(&format!("{}#k{}", base, self.fresh))
    }

    fn under<T>(&mut self, x: Name, ty: Expr, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.locals.push((x, ty));
        let r = f(self);
        self.locals.pop();
        r
    }

    fn beta(&self, e: &Expr) -> std::result::Result<Expr, NormalizeError> {
        Normalizer::new(self.sig).beta(e)
    }

    fn kind(&mut self, k: &Expr) -> Result<Derivation> {
        match k {
            Expr::Type => Ok(Derivation::new(Rule::TypeKind, self.judgment(Some(k), None), vec![])),
            Expr::Pi(h, a, body) => {
                let da = self.ty(a).map_err(|e| e.at(0))?;
                let x = self.fresh(h);
                let dk = self.under(x.clone(), a.as_ref().clone(), |s| s.kind(&body.open(&x))).map_err(|e| e.at(1))?;
                Ok(Derivation::new(Rule::PiKind, self.judgment(Some(k), None), vec![da, dk]))
            }
            _ => self.fail(Rule::PiKind, k, None, "kind expected"),
        }
    }

    fn ty(&mut self, a: &Expr) -> Result<Derivation> {
        self.family(a, &Expr::Type)
    }

    fn family(&mut self, a: &Expr, k: &Expr) -> Result<Derivation> {
        match (a, k) {
            (Expr::Pi(h, dom, body), Expr::Type) => {
                let d1 = self.ty(dom).map_err(|e| e.at(0))?;
                let x = self.fresh(h);
                let d2 = self.under(x.clone(), dom.as_ref().clone(), |s| s.ty(&body.open(&x))).map_err(|e| e.at(1))?;
                Ok(Derivation::new(Rule::PiFam, self.judgment(Some(a), Some(k)), vec![d1, d2]))
            }
            (Expr::Lam(h, ann, body), Expr::Pi(_, dom, kbody)) => {
                if ann != dom {
                    return self.fail(Rule::AbsFam, a, Some(k), "annotation differs from the Π-domain");
                }
                let d1 = self.ty(dom).map_err(|e| e.at(0))?;
                let x = self.fresh(h);
                let d2 = self
                    .under(x.clone(), dom.as_ref().clone(), |s| s.family(&body.open(&x), &kbody.open(&x)))
                    .map_err(|e| e.at(1))?;
                Ok(Derivation::new(Rule::AbsFam, self.judgment(Some(a), Some(k)), vec![d1, d2]))
            }
            (_, Expr::Pi(..)) => self.fail(Rule::AbsFam, a, Some(k), "λ-abstraction expected at a Π-kind"),
            (Expr::Lam(..), _) => self.fail(Rule::BackchainFam, a, Some(k), "λ-abstraction at kind type"),
            _ => self.backchain(Rule::BackchainFam, a, k),
        }
    }

    fn obj(&mut self, m: &Expr, a: &Expr) -> Result<Derivation> {
        match (m, a) {
            (Expr::Lam(h, ann, body), Expr::Pi(_, dom, cod)) => {
                if ann != dom {
                    return self.fail(
                        Rule::AbsObj,
                        m,
                        Some(a),
                        format!("annotation {} differs from Π-domain {}", pretty_print(ann), pretty_print(dom)),
                    );
                }
                let d1 = self.ty(dom).map_err(|e| e.at(0))?;
                let x = self.fresh(h);
                let d2 = self
                    .under(x.clone(), dom.as_ref().clone(), |s| s.obj(&body.open(&x), &cod.open(&x)))
                    .map_err(|e| e.at(1))?;
                Ok(Derivation::new(Rule::AbsObj, self.judgment(Some(m), Some(a)), vec![d1, d2]))
            }
            (_, Expr::Pi(..)) => self.fail(Rule::AbsObj, m, Some(a), "application against Π-type (λ expected)"),
            (Expr::Lam(..), _) => self.fail(Rule::BackchainObj, m, Some(a), "λ-abstraction against base type"),
            _ => self.backchain(Rule::BackchainObj, m, a),
        }
    }

    fn head_classifier(&self, rule: Rule, subject: &Expr, head: &Expr, target: &Expr) -> Result<(Name, Expr)> {
        match head {
            Expr::Const(c) => match self.sig.lookup(c) {
                Some(entry) => {
                    let want = if rule == Rule::BackchainObj { Sort::Type } else { Sort::Kind };
                    if entry.sort != want {
                        let what = if want == Sort::Type { "object" } else { "type family" };
                        return self.fail(rule, subject, Some(target), format!("{} is not an {}", c, what));
                    }
                    Ok((c.clone(), entry.classifier.clone()))
                }
                None => self.fail(rule, subject, Some(target), format!("unbound constant {}", c)),
            },
            Expr::Free(x) if rule == Rule::BackchainObj => match self.locals.iter().rev().find(|(y, _)| y == x) {
                Some((_, t)) => Ok((x.clone(), t.clone())),
                None => self.fail(rule, subject, Some(target), format!("unbound variable {}", x)),
            },
            Expr::Meta(x) => {
                self.fail(rule, subject, Some(target), format!("meta-variable {} is not accepted by the kernel", x))
            }
            other => self.fail(rule, subject, Some(target), format!("{} cannot head a base term", pretty_print(other))),
        }
    }

    /// Big-step application rule.
    fn backchain(&mut self, rule: Rule, subject: &Expr, target: &Expr) -> Result<Derivation> {
        let (head, args) = subject.spine();
        let (head_name, mut cls) = self.head_classifier(rule, subject, head, target)?;
        let mut premises = Vec::with_capacity(args.len());
        for (i, arg) in args.iter().enumerate() {
            let Expr::Pi(_, dom, cod) = &cls else {
                return self.fail(rule, subject, Some(target), format!("{} is applied to too many arguments", head_name));
            };
            let d = self.obj(arg, dom).map_err(|e| e.at(i))?;
            premises.push(d);
            cls = match self.beta(&cod.instantiate(arg)) {
                Ok(c) => c,
                Err(e) => return self.fail(rule, subject, Some(target), e.to_string()),
            };
        }
        if matches!(cls, Expr::Pi(..)) {
            return self.fail(rule, subject, Some(target), format!("{} is not fully applied", head_name));
        }
        if &cls != target {
            return self.fail(
                rule,
                subject,
                Some(target),
                format!("type mismatch: expected {}, found {}", pretty_print(target), pretty_print(&cls)),
            );
        }
        let inst = args.into_iter().cloned().collect();
        Ok(Derivation::backchain(rule, self.judgment(Some(subject), Some(target)), head_name, inst, premises))
    }
}

fn boundary_error(rule: Rule, subject: &Expr, message: String) -> TypeError {
    TypeError { rule, judgment: pretty_print(subject), message, path: Vec::new() }
}

fn reject_metas(rule: Rule, e: &Expr) -> Result<()> {
    match e.metas().first() {
        Some(m) => Err(boundary_error(rule, e, format!("meta-variable {} is not accepted by the kernel", m))),
        None => Ok(()),
    }
}

fn normalize_at(sig: SigView<'_>, rule: Rule, e: &Expr, cls: &Classifier) -> Result<Expr> {
    Normalizer::new(sig).normalize(e, cls).map_err(|err| boundary_error(rule, e, err.to_string()))
}

/// Checks every entry under the entries before it and returns the signature
/// with each classifier in βη-long form.
pub fn canonicalize_signature(sig: &Signature) -> Result<(Signature, Derivation)> {
    let mut out = sig.clone();
    let mut seen = std::collections::HashSet::new();
    let mut deriv = Derivation::new(
        Rule::NullCtx,
        Judgment { context: Kernel::new(SigView::prefix(&out, 0)).fingerprint(), subject: None, classifier: None },
        vec![],
    );
    for i in 0..sig.len() {
        let entry = &sig.entries()[i];
        let rule = if entry.sort == Sort::Kind { Rule::KindCtx } else { Rule::TypeCtx };
        if !seen.insert(entry.name.clone()) {
            return Err(boundary_error(rule, &Expr::Const(entry.name.clone()), format!("duplicate name {}", entry.name)));
        }
        reject_metas(rule, &entry.classifier)?;
        let view = SigView::prefix(&out, i);
        let cls = if entry.sort == Sort::Kind { Classifier::Kind } else { Classifier::Of(Expr::Type) };
        let canonical = normalize_at(view, rule, &entry.classifier, &cls).map_err(|mut e| {
            e.message = format!("in declaration of {}: {}", entry.name, e.message);
            e
        })?;
        let mut k = Kernel::new(view);
        let d = match entry.sort {
            Sort::Kind => k.kind(&canonical),
            Sort::Type => k.ty(&canonical),
        }
        .map_err(|mut e| {
            e.message = format!("in declaration of {}: {}", entry.name, e.message);
            e
        })?;
        out.set_classifier(i, canonical);
        let concl = Judgment { context: Kernel::new(SigView::prefix(&out, i + 1)).fingerprint(), subject: None, classifier: None };
        deriv = Derivation::new(rule, concl, vec![d, deriv]);
    }
    Ok((out, deriv))
}

/// `⊢ Γ ctx`
pub fn check_context(sig: &Signature) -> Result<Derivation> {
    canonicalize_signature(sig).map(|(_, d)| d)
}

/// `Γ ⊢ K kind`
pub fn check_kind(sig: &Signature, k: &Expr) -> Result<Derivation> {
    reject_metas(Rule::PiKind, k)?;
    let view = SigView::full(sig);
    let k = normalize_at(view, Rule::PiKind, k, &Classifier::Kind)?;
    Kernel::new(view).kind(&k)
}

/// `Γ ⊢ A : type`
pub fn check_type(sig: &Signature, a: &Expr) -> Result<Derivation> {
    reject_metas(Rule::BackchainFam, a)?;
    let view = SigView::full(sig);
    let a = normalize_at(view, Rule::BackchainFam, a, &Classifier::Of(Expr::Type))
        .map_err(|e| Kernel::new(view).ty(a).err().unwrap_or(e))?;
    Kernel::new(view).ty(&a)
}

/// `Γ ⊢ A : K` for a type family at an arbitrary kind.
pub fn check_family(sig: &Signature, a: &Expr, k: &Expr) -> Result<Derivation> {
    reject_metas(Rule::BackchainFam, a)?;
    reject_metas(Rule::BackchainFam, k)?;
    let view = SigView::full(sig);
    let k = normalize_at(view, Rule::PiKind, k, &Classifier::Kind)?;
    let a = normalize_at(view, Rule::BackchainFam, a, &Classifier::Of(k.clone()))?;
    let mut kern = Kernel::new(view);
    kern.kind(&k)?;
    kern.family(&a, &k)
}

/// `Γ ⊢ M : A`. The type is assumed valid; callers that cannot guarantee
/// this should run [`check_type`] first.
pub fn check_object(sig: &Signature, m: &Expr, a: &Expr) -> Result<Derivation> {
    reject_metas(Rule::BackchainObj, m)?;
    reject_metas(Rule::BackchainObj, a)?;
    let view = SigView::full(sig);
    let a = normalize_at(view, Rule::BackchainFam, a, &Classifier::Of(Expr::Type))
        .map_err(|e| Kernel::new(view).ty(a).err().unwrap_or(e))?;
    let m = normalize_at(view, Rule::BackchainObj, m, &Classifier::Of(a.clone()))
        .map_err(|e| Kernel::new(view).obj(m, &a).err().unwrap_or(e))?;
    Kernel::new(view).obj(&m, &a)
}

/// Type check under extra local assumptions `x : B` (given as free names).
pub fn check_type_in(sig: &Signature, locals: &[(Name, Expr)], a: &Expr) -> Result<Derivation> {
    reject_metas(Rule::BackchainFam, a)?;
    let view = SigView::full(sig);
    let a = Normalizer::new(view)
        .with_locals(locals.to_vec())
        .normalize(a, &Classifier::Of(Expr::Type))
        .map_err(|err| {
            let mut k = Kernel::new(view);
            k.locals = locals.to_vec();
            k.ty(a).err().unwrap_or_else(|| boundary_error(Rule::BackchainFam, a, err.to_string()))
        })?;
    let mut k = Kernel::new(view);
    k.locals = locals.to_vec();
    k.ty(&a)
}

/// Object check under extra local assumptions `x : B` (given as free names).
pub fn check_object_in(sig: &Signature, locals: &[(Name, Expr)], m: &Expr, a: &Expr) -> Result<Derivation> {
    reject_metas(Rule::BackchainObj, m)?;
    reject_metas(Rule::BackchainObj, a)?;
    let view = SigView::full(sig);
    let norm = |e: &Expr, c: &Classifier, rule| {
        Normalizer::new(view)
            .with_locals(locals.to_vec())
            .normalize(e, c)
            .map_err(|err| boundary_error(rule, e, err.to_string()))
    };
    let a = norm(a, &Classifier::Of(Expr::Type), Rule::BackchainFam)?;
    let m = norm(m, &Classifier::Of(a.clone()), Rule::BackchainObj)?;
    let mut k = Kernel::new(view);
    k.locals = locals.to_vec();
    k.obj(&m, &a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lf_syntax::{normalize, parse_expr, parse_signature};
    use crate::test_support::APPEND_LF;

    fn sig() -> Signature {
        canonicalize_signature(&parse_signature(APPEND_LF).unwrap()).unwrap().0
    }

    fn e(sig: &Signature, s: &str) -> Expr {
        parse_expr(sig, s).unwrap()
    }

    /// Independent node count.
    fn recount(d: &Derivation) -> usize {
        let mut n = 0;
        d.walk(&mut |_| n += 1);
        n
    }

    #[test]
    fn append_context_accepted() {
        let d = check_context(&parse_signature(APPEND_LF).unwrap()).unwrap();
        assert_eq!(d.rule, Rule::TypeCtx);
        assert_eq!(recount(&d), d.size());
        assert!(check_context(&Signature::new()).unwrap().rule == Rule::NullCtx);
    }

    #[test]
    fn unbound_constant_in_context() {
        let err = check_context(&parse_signature("c : d.").unwrap()).unwrap_err();
        assert!(err.to_string().contains("unbound constant d"), "{}", err);
    }

    #[test]
    fn kinds() {
        let s = sig();
        assert_eq!(check_kind(&s, &Expr::Type).unwrap().rule, Rule::TypeKind);
        let d = check_kind(&s, &e(&s, "{n:nat} type")).unwrap();
        assert_eq!((d.rule, d.size()), (Rule::PiKind, 3));
        let err = check_kind(&s, &e(&s, "{n:nat} nat")).unwrap_err();
        assert!(err.message.contains("kind expected"));
    }

    #[test]
    fn types() {
        let s = sig();
        let d = check_type(&s, &e(&s, "append nil nil nil")).unwrap();
        assert_eq!((d.rule, d.premises.len()), (Rule::BackchainFam, 3));
        assert!(check_type(&s, &e(&s, "{K:list} append nil K K")).is_ok());
        let err = check_type(&s, &e(&s, "append z nil nil")).unwrap_err();
        assert!(err.message.contains("expected list, found nat"), "{}", err);
        assert_eq!(err.path, vec![0]);
    }

    #[test]
    fn objects_and_sizes() {
        let s = sig();
        let d = check_object(&s, &e(&s, "appNil nil"), &e(&s, "append nil nil nil")).unwrap();
        assert_eq!(d.rule, Rule::BackchainObj);
        assert_eq!(d.head.as_deref(), Some("appNil"));
        assert_eq!((d.size(), recount(&d)), (2, 2));

        let d = check_object(&s, &e(&s, "[x:nat] x"), &e(&s, "{x:nat} nat")).unwrap();
        assert_eq!(d.rule, Rule::AbsObj);
        assert_eq!((d.size(), recount(&d)), (3, 3));

        let m = e(&s, "appCons z nil (cons (s z) nil) (cons (s z) nil) (appNil (cons (s z) nil))");
        let a = e(&s, "append (cons z nil) (cons (s z) nil) (cons z (cons (s z) nil))");
        let d = check_object(&s, &m, &a).unwrap();
        assert_eq!(d.instantiation.len(), 5);
        assert_eq!((d.size(), recount(&d)), (16, 16));
    }

    #[test]
    fn object_errors() {
        let s = sig();
        let err = check_object(&s, &e(&s, "appNil nil"), &e(&s, "append nil nil (cons z nil)")).unwrap_err();
        assert!(err.message.contains("type mismatch"));
        let err = check_object(&s, &e(&s, "[x:nat] x"), &e(&s, "nat")).unwrap_err();
        assert!(err.message.contains("base type"));
        let err = check_object(&s, &e(&s, "s (s nil)"), &e(&s, "nat")).unwrap_err();
        assert_eq!(err.path, vec![0, 0]);
        assert!(check_object(&s, &Expr::meta("M"), &e(&s, "nat")).is_err());
    }

    #[test]
    fn deterministic_and_canonical() {
        let s = sig();
        let m = e(&s, "[f:nat -> nat] f z");
        let a = e(&s, "(nat -> nat) -> nat");
        let d1 = check_object(&s, &m, &a).unwrap();
        let d2 = check_object(&s, &m, &a).unwrap();
        assert_eq!(d1, d2);
        d1.walk(&mut |d| {
            if let (Some(subj), Some(cls)) = (&d.conclusion.subject, &d.conclusion.classifier) {
                if d.rule == Rule::BackchainObj && subj.free_vars().is_empty() {
                    assert_eq!(&normalize(&s, subj, &Classifier::Of(cls.clone())).unwrap(), subj);
                }
            }
        });
    }

    #[test]
    fn type_level_lambda() {
        let s = sig();
        let d = check_family(&s, &e(&s, "[l:list] append nil l l"), &e(&s, "list -> type")).unwrap();
        assert_eq!(d.rule, Rule::AbsFam);
    }

    #[test]
    fn sexp_shape() {
        let s = sig();
        let d = check_object(&s, &e(&s, "z"), &e(&s, "nat")).unwrap();
        let sx = d.to_sexp();
        assert!(sx.starts_with("(backchain-obj z \"G"), "{}", sx);
        assert!(sx.ends_with("|- z : nat\" ())"), "{}", sx);
    }
}
