use std::collections::BTreeMap;

use thiserror::Error;

use super::expr::{name, Expr, Hint, Name};
use super::signature::{SigView, Signature};

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("normalization budget exceeded")]
    BudgetExceeded,
    #[error("cannot eta-expand: {0}")]
    CannotEtaExpand(String),
    #[error("unbound constant {0}")]
    Unbound(String),
    #[error("kind expected")]
    KindExpected,
}

/// What an expression is classified by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classifier {
    /// The expression is itself a kind.
    Kind,
    /// The expression is a type family or object of the given kind or type.
    Of(Expr),
}

impl Classifier {
    pub fn of(e: Expr) -> Self {
        Classifier::Of(e)
    }
}

/// β-normalizes and then η-expands against classifiers.
pub struct Normalizer<'a> {
    sig: SigView<'a>,
    locals: Vec<(Name, Expr)>,
    metas: BTreeMap<Name, Expr>,
    budget: u64,
    steps: u64,
    fresh: usize,
}

impl<'a> Normalizer<'a> {
    pub fn new(sig: SigView<'a>) -> Self {
        Normalizer {
            sig,
            locals: Vec::new(),
            metas: BTreeMap::new(),
            budget: DEFAULT_STEP_BUDGET,
            steps: 0,
            fresh: 0,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_locals(mut self, locals: Vec<(Name, Expr)>) -> Self {
        self.locals = locals;
        self
    }

    /// Types of meta-variables, needed only when a meta sits in a position
    /// that calls for η-expansion.
    pub fn with_metas(mut self, metas: BTreeMap<Name, Expr>) -> Self {
        self.metas = metas;
        self
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn fresh(&mut self, hint: &Hint) -> Name {
        self.fresh += 1;
        let base = if hint.as_str() == "_" { "x" } else { hint.as_str() };
        name(&format!("{}#n{}", base, self.fresh))
    }

    fn tick(&mut self) -> Result<(), NormalizeError> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(NormalizeError::BudgetExceeded)
        } else {
            Ok(())
        }
    }

    fn whnf(&mut self, e: &Expr) -> Result<Expr, NormalizeError> {
        let mut cur = e.clone();
        loop {
            let (head, args) = cur.spine();
            match head {
                Expr::Lam(_, _, body) if !args.is_empty() => {
                    self.tick()?;
                    let mut next = body.instantiate(args[0]);
                    for a in &args[1..] {
                        next = Expr::app(next, (*a).clone());
                    }
                    cur = next;
                }
                _ => return Ok(cur),
            }
        }
    }

    /// Normal-order β-normalization.
    pub fn beta(&mut self, e: &Expr) -> Result<Expr, NormalizeError> {
        let w = self.whnf(e)?;
        Ok(match &w {
            Expr::Pi(h, a, b) => Expr::Pi(h.clone(), self.beta(a)?.into(), self.beta(b)?.into()),
            Expr::Lam(h, a, b) => Expr::Lam(h.clone(), self.beta(a)?.into(), self.beta(b)?.into()),
            Expr::App(..) => {
                let (head, args) = w.spine();
                let mut out = head.clone();
                for a in args {
                    out = Expr::app(out, self.beta(a)?);
                }
                out
            }
            _ => w,
        })
    }

    /// Full βη-long normalization of `e` at `cls`.
    pub fn normalize(&mut self, e: &Expr, cls: &Classifier) -> Result<Expr, NormalizeError> {
        let cls = match cls {
            Classifier::Kind => Classifier::Kind,
            Classifier::Of(c) => {
                let cc = if c.is_kind() { Classifier::Kind } else { Classifier::Of(Expr::Type) };
                let c = self.beta(c)?;
                Classifier::Of(self.eta(&c, &cc)?)
            }
        };
        let b = self.beta(e)?;
        self.eta(&b, &cls)
    }

    fn under<T>(
        &mut self,
        x: Name,
        ty: Expr,
        f: impl FnOnce(&mut Self) -> Result<T, NormalizeError>,
    ) -> Result<T, NormalizeError> {
        self.locals.push((x, ty));
        let r = f(self);
        self.locals.pop();
        r
    }

    fn eta(&mut self, e: &Expr, cls: &Classifier) -> Result<Expr, NormalizeError> {
        match cls {
            Classifier::Kind => match e {
                Expr::Type => Ok(Expr::Type),
                Expr::Pi(h, a, k) => {
                    let a2 = self.eta(a, &Classifier::Of(Expr::Type))?;
                    let x = self.fresh(h);
                    let k2 = self.under(x.clone(), a2.clone(), |n| n.eta(&k.open(&x), &Classifier::Kind))?;
                    Ok(Expr::Pi(h.clone(), a2.into(), k2.close(&x).into()))
                }
                _ => Err(NormalizeError::KindExpected),
            },
            Classifier::Of(Expr::Pi(ch, a, b)) => {
                let x = self.fresh(ch);
                let target = b.open(&x);
                match e {
                    Expr::Lam(h, ann, body) => {
                        let ann2 = self.eta(ann, &Classifier::Of(Expr::Type))?;
                        let body2 = self.under(x.clone(), a.as_ref().clone(), |n| {
                            n.eta(&body.open(&x), &Classifier::Of(target))
                        })?;
                        Ok(Expr::Lam(h.clone(), ann2.into(), body2.close(&x).into()))
                    }
                    Expr::Pi(..) | Expr::Type => {
                        Err(NormalizeError::CannotEtaExpand(format!("{:?} at a Π classifier", e)))
                    }
                    _ => {
                        let expanded = Expr::app(e.clone(), Expr::Free(x.clone()));
                        let body2 = self.under(x.clone(), a.as_ref().clone(), |n| {
                            n.eta(&expanded, &Classifier::Of(target))
                        })?;
                        Ok(Expr::Lam(ch.clone(), a.clone(), body2.close(&x).into()))
                    }
                }
            }
            Classifier::Of(Expr::Type) => match e {
                Expr::Pi(h, a, b) => {
                    let a2 = self.eta(a, &Classifier::Of(Expr::Type))?;
                    let x = self.fresh(h);
                    let b2 = self.under(x.clone(), a2.clone(), |n| {
                        n.eta(&b.open(&x), &Classifier::Of(Expr::Type))
                    })?;
                    Ok(Expr::Pi(h.clone(), a2.into(), b2.close(&x).into()))
                }
                _ => self.eta_spine(e),
            },
            Classifier::Of(_) => self.eta_spine(e),
        }
    }

    fn head_classifier(&self, head: &Expr) -> Result<Option<Expr>, NormalizeError> {
        match head {
            Expr::Const(c) => match self.sig.lookup(c) {
                Some(entry) => Ok(Some(entry.classifier.clone())),
                None => Err(NormalizeError::Unbound(c.to_string())),
            },
            Expr::Free(x) => match self.locals.iter().rev().find(|(y, _)| y == x) {
                Some((_, t)) => Ok(Some(t.clone())),
                None => Err(NormalizeError::Unbound(x.to_string())),
            },
            Expr::Meta(m) => Ok(self.metas.get(m).cloned()),
            other => Err(NormalizeError::CannotEtaExpand(format!("unexpected head {:?}", other))),
        }
    }

    /// Expands the arguments of a base-shaped expression `h a1 … an`.
    fn eta_spine(&mut self, e: &Expr) -> Result<Expr, NormalizeError> {
        let (head, args) = e.spine();
        let Some(mut ty) = self.head_classifier(head)? else {
            if args.is_empty() {
                // Unapplied meta of unknown type: already atomic.
                return Ok(e.clone());
            }
            return Err(NormalizeError::CannotEtaExpand(format!("meta {:?} has no known type", head)));
        };
        let mut out = head.clone();
        for a in args {
            let Expr::Pi(_, dom, cod) = ty else {
                return Err(NormalizeError::CannotEtaExpand(format!(
                    "{} is applied to too many arguments",
                    crate::lf_syntax::pretty_print(head)
                )));
            };
            let a2 = self.eta(a, &Classifier::Of(dom.as_ref().clone()))?;
            ty = self.beta(&cod.instantiate(&a2))?;
            out = Expr::app(out, a2);
        }
        if matches!(ty, Expr::Pi(..)) {
            return Err(NormalizeError::CannotEtaExpand(format!(
                "{} is not fully applied at a base classifier",
                crate::lf_syntax::pretty_print(e)
            )));
        }
        Ok(out)
    }
}

/// βη-long normal form of `e` at `cls` under the full signature.
pub fn normalize(sig: &Signature, e: &Expr, cls: &Classifier) -> Result<Expr, NormalizeError> {
    Normalizer::new(SigView::full(sig)).normalize(e, cls)
}

/// β-normal form only.
pub fn beta_normalize(e: &Expr) -> Result<Expr, NormalizeError> {
    let empty = Signature::new();
    Normalizer::new(SigView::full(&empty)).beta(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lf_syntax::parse::{parse_expr, parse_signature};
    use crate::test_support::APPEND_LF;

    fn setup() -> Signature {
        parse_signature(APPEND_LF).unwrap()
    }

    fn norm(sig: &Signature, e: &str, ty: &str) -> Result<Expr, NormalizeError> {
        let e = parse_expr(sig, e).unwrap();
        let ty = parse_expr(sig, ty).unwrap();
        normalize(sig, &e, &Classifier::Of(ty))
    }

    #[test]
    fn canonical_is_unchanged() {
        let sig = setup();
        let e = parse_expr(&sig, "[x:nat] s x").unwrap();
        assert_eq!(norm(&sig, "[x:nat] s x", "nat -> nat").unwrap(), e);
    }

    #[test]
    fn eta_expands_constant() {
        let sig = setup();
        let want = parse_expr(&sig, "[x:nat] s x").unwrap();
        assert_eq!(norm(&sig, "s", "nat -> nat").unwrap(), want);
        let want = parse_expr(&sig, "[a:nat][b:list] cons a b").unwrap();
        assert_eq!(norm(&sig, "cons", "nat -> list -> list").unwrap(), want);
    }

    #[test]
    fn single_beta_step() {
        let sig = setup();
        assert_eq!(norm(&sig, "([x:nat] s x) z", "nat").unwrap(), parse_expr(&sig, "s z").unwrap());
    }

    #[test]
    fn kinds_and_types() {
        let sig = setup();
        let k = parse_expr(&sig, "list -> list -> list -> type").unwrap();
        assert_eq!(normalize(&sig, &k, &Classifier::Kind).unwrap(), k);
        let t = parse_expr(&sig, "{K:list} append nil K K").unwrap();
        assert_eq!(normalize(&sig, &t, &Classifier::Of(Expr::Type)).unwrap(), t);
    }

    #[test]
    fn errors() {
        let sig = setup();
        assert!(matches!(norm(&sig, "s z z", "nat"), Err(NormalizeError::CannotEtaExpand(_))));
        assert!(matches!(norm(&sig, "s", "nat"), Err(NormalizeError::CannotEtaExpand(_))));
        assert!(matches!(norm(&sig, "q", "nat"), Err(NormalizeError::Unbound(_))));
        // (λx. x x)(λx. x x) loops; the budget stops it.
        let w = Expr::lam("x", Expr::Type, Expr::app(Expr::Bound(0), Expr::Bound(0)));
        let omega = Expr::app(w.clone(), w);
        let r = Normalizer::new(SigView::full(&sig)).with_budget(1000).beta(&omega);
        assert_eq!(r, Err(NormalizeError::BudgetExceeded));
    }
}
