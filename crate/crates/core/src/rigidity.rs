//! Rigid occurrences of declaration binders.
//!
//! A binder `x` occurs rigidly in an object when every well-typed instance
//! of the object determines `x` (up to βη) and, with it, a derivation that
//! `x` is well typed. Such binders do not need a typing guard in the
//! optimized translation.

use std::collections::BTreeSet;

use crate::lf_syntax::{name, Expr, Name};

/// `gamma` holds the candidates; `delta` the binders crossed inside the
/// object under analysis.
#[derive(Clone, Debug, Default)]
pub struct RigidCtx {
    pub gamma: BTreeSet<Name>,
    pub delta: Vec<Name>,
}

impl RigidCtx {
    pub fn new<I: IntoIterator<Item = Name>>(gamma: I) -> Self {
        RigidCtx { gamma: gamma.into_iter().collect(), delta: Vec::new() }
    }
}

struct Fresh(usize);

impl Fresh {
    fn next(&mut self, taken: &RigidCtx) -> Name {
        loop {
            self.0 += 1;
            let n = name(&format!("#d{}", self.0));
            if !taken.gamma.contains(&n) && !taken.delta.contains(&n) {
                return n;
            }
        }
    }
}

/// If `m` is a local of `delta`, possibly η-expanded (`[z1]…[zk] y z1 … zk`),
/// returns it.
fn as_delta_var(m: &Expr, delta: &[Name]) -> Option<Name> {
    let mut body = m;
    let mut k = 0u32;
    while let Expr::Lam(_, _, b) = body {
        body = b;
        k += 1;
    }
    let (head, args) = body.spine();
    if args.len() != k as usize {
        return None;
    }
    for (i, a) in args.iter().enumerate() {
        if **a != Expr::Bound(k - 1 - i as u32) {
            return None;
        }
    }
    match head {
        Expr::Free(y) if delta.contains(y) => Some(y.clone()),
        _ => None,
    }
}

fn object(ctx: &mut RigidCtx, fresh: &mut Fresh, x: &Name, m: &Expr) -> bool {
    match m {
        Expr::Lam(_, _, body) => {
            let y = fresh.next(ctx);
            ctx.delta.push(y.clone());
            let r = object(ctx, fresh, x, &body.open(&y));
            ctx.delta.pop();
            r
        }
        _ => {
            let (head, args) = m.spine();
            if let Expr::Free(h) = head {
                if h == x {
                    let mut seen = BTreeSet::new();
                    let pattern = args
                        .iter()
                        .all(|a| as_delta_var(a, &ctx.delta).map(|y| seen.insert(y)).unwrap_or(false));
                    if pattern {
                        return true;
                    }
                }
                if ctx.gamma.contains(h) {
                    return false;
                }
            }
            if !matches!(head, Expr::Free(_) | Expr::Const(_)) {
                return false;
            }
            args.iter().any(|a| object(ctx, fresh, x, a))
        }
    }
}

/// `Γ; δ; x ⊢ M` for a canonical object `M` whose candidates and locals
/// appear as free names.
pub fn rigid_in_object(ctx: &RigidCtx, x: &str, m: &Expr) -> bool {
    let mut ctx = ctx.clone();
    object(&mut ctx, &mut Fresh(0), &name(x), m)
}

/// `formulaUV(Γ; x) ⊢ A`: Π-binders of `A` join the candidates; at the base
/// some argument of the head family must be rigid for `x`.
pub fn rigid_in_type(candidates: &BTreeSet<Name>, x: &str, a: &Expr) -> bool {
    let mut ctx = RigidCtx::new(candidates.iter().cloned());
    let mut fresh = Fresh(0);
    let x = name(x);
    let mut cur = a.clone();
    while let Expr::Pi(_, _, body) = &cur {
        let y = fresh.next(&ctx);
        ctx.gamma.insert(y.clone());
        cur = body.open(&y);
    }
    let (_, args) = cur.spine();
    args.iter().any(|m| object(&mut ctx, &mut fresh, &x, m))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardPlan {
    pub decl: Name,
    /// Outer Π-binders in order with their rigidity.
    pub binders: Vec<(Name, bool)>,
}

impl GuardPlan {
    pub fn rigid(&self) -> Vec<bool> {
        self.binders.iter().map(|(_, r)| *r).collect()
    }

    /// `name: K=rigid, a=guarded (non-rigid)`
    pub fn report(&self) -> String {
        let parts: Vec<String> = self
            .binders
            .iter()
            .map(|(b, r)| format!("{}={}", b, if *r { "rigid" } else { "guarded (non-rigid)" }))
            .collect();
        if parts.is_empty() {
            format!("{}:", self.decl)
        } else {
            format!("{}: {}", self.decl, parts.join(", "))
        }
    }
}

/// Display names for the outer binders of a classifier; anonymous ones
/// become `arg1`, `arg2`, … by position.
pub fn binder_names(classifier: &Expr) -> Vec<Name> {
    let (binders, _) = classifier.pi_prefix();
    binders
        .iter()
        .enumerate()
        .map(|(i, (h, _))| if h.as_str() == "_" { name(&format!("arg{}", i + 1)) } else { h.0.clone() })
        .collect()
}

/// Rigidity of each outer binder of `classifier` in the rest of the type
/// (the later binders join the candidates).
pub fn rigidity_flags(classifier: &Expr) -> Vec<bool> {
    let mut names = Vec::new();
    let mut cur = classifier.clone();
    let mut suffixes = Vec::new();
    while let Expr::Pi(_, _, body) = &cur {
        let x = name(&format!("#r{}", names.len()));
        names.push(x.clone());
        cur = body.open(&x);
        suffixes.push(cur.clone());
    }
    (0..names.len())
        .map(|i| {
            let gamma: BTreeSet<Name> = names[..=i].iter().cloned().collect();
            rigid_in_type(&gamma, &names[i], &suffixes[i])
        })
        .collect()
}

pub fn guard_plan(decl: &str, classifier: &Expr) -> GuardPlan {
    let names = binder_names(classifier);
    let flags = rigidity_flags(classifier);
    GuardPlan { decl: name(decl), binders: names.into_iter().zip(flags).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lf_syntax::{parse_signature, Signature};
    use crate::test_support::APPEND_LF;

    fn plan(sig: &Signature, n: &str) -> GuardPlan {
        guard_plan(n, sig.classifier(n).unwrap())
    }

    fn set(xs: &[&str]) -> BTreeSet<Name> {
        xs.iter().map(|x| name(x)).collect()
    }

    #[test]
    fn append_plans() {
        let sig = parse_signature(APPEND_LF).unwrap();
        assert_eq!(plan(&sig, "appNil").report(), "appNil: K=rigid");
        assert_eq!(plan(&sig, "appCons").rigid(), vec![true, true, true, true, false]);
        assert_eq!(plan(&sig, "s").report(), "s: arg1=guarded (non-rigid)");
        assert_eq!(plan(&sig, "cons").rigid(), vec![false, false]);
        assert_eq!(plan(&sig, "append").rigid(), vec![false, false, false]);
        assert_eq!(plan(&sig, "nat").report(), "nat:");
    }

    #[test]
    fn object_rules() {
        let nat = Expr::konst("nat");
        let ctx = RigidCtx::new([name("x")]);
        assert!(rigid_in_object(&ctx, "x", &Expr::free("x")));
        let m = Expr::lam_named("y", nat.clone(), Expr::app(Expr::free("x"), Expr::free("y")));
        assert!(rigid_in_object(&ctx, "x", &m));
        let ctx2 = RigidCtx::new([name("x"), name("t")]);
        assert!(!rigid_in_object(&ctx2, "x", &Expr::app(Expr::free("x"), Expr::konst("z"))));
        // Repeated δ-variable is not a pattern.
        let yy = Expr::lam_named("y", nat.clone(), Expr::apps(Expr::free("x"), [Expr::free("y"), Expr::free("y")]));
        assert!(!rigid_in_object(&ctx, "x", &yy));
        // Under a constant head.
        assert!(rigid_in_object(&ctx, "x", &Expr::app(Expr::konst("s"), Expr::free("x"))));
        // Under another candidate's head.
        let under_t = Expr::app(Expr::free("t"), Expr::free("x"));
        assert!(!rigid_in_object(&ctx2, "x", &under_t));
    }

    #[test]
    fn eta_expanded_local_counts_as_variable() {
        let nat = Expr::konst("nat");
        let ctx = RigidCtx::new([name("x")]);
        // [f:nat -> nat] x ([w:nat] f w)
        let f_eta = Expr::lam("w", nat.clone(), Expr::app(Expr::Bound(1), Expr::Bound(0)));
        let m = Expr::lam("f", Expr::arrow(nat.clone(), nat.clone()), Expr::app(Expr::free("x"), f_eta));
        assert!(rigid_in_object(&ctx, "x", &m));
    }

    #[test]
    fn type_rules() {
        let k = Expr::free("K");
        let a = Expr::apps(Expr::konst("append"), [Expr::konst("nil"), k.clone(), k]);
        assert!(rigid_in_type(&set(&["K"]), "K", &a));
        assert!(!rigid_in_type(&set(&["A"]), "A", &a));
    }

    #[test]
    fn unsound_shape_is_not_rigid() {
        let sig = parse_signature(
            "nat:type. z:nat. num: nat -> type. num_n: {n:nat} num n. fam: num z -> type. bad: {X: nat -> num z} fam (X z).",
        )
        .unwrap();
        assert_eq!(plan(&sig, "bad").report(), "bad: X=guarded (non-rigid)");
        assert_eq!(plan(&sig, "num_n").report(), "num_n: n=rigid");
    }

    #[test]
    fn shadowing() {
        let nat = Expr::konst("nat");
        let ctx = RigidCtx::new([name("x")]);
        // [x:nat] s x : the inner x is a different variable.
        let m = Expr::lam("x", nat, Expr::app(Expr::konst("s"), Expr::Bound(0)));
        assert!(!rigid_in_object(&ctx, "x", &m));
    }
}
