use std::collections::BTreeSet;

use super::expr::Expr;
use super::signature::Signature;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Expr,
    App,
    Atom,
}

/// Renders an expression in the `.lf` surface syntax.
pub fn pretty_print(e: &Expr) -> String {
    let mut out = String::new();
    let mut scope = Vec::new();
    go(e, &mut scope, Prec::Expr, &mut out);
    out
}

pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::new();
    for entry in sig.entries() {
        out.push_str(&entry.name);
        out.push_str(" : ");
        out.push_str(&pretty_print(&entry.classifier));
        out.push_str(".\n");
    }
    out
}

fn named_leaves(e: &Expr, scope: &[String], depth: u32, out: &mut BTreeSet<String>) {
    match e {
        Expr::Free(x) | Expr::Const(x) | Expr::Meta(x) => {
            out.insert(x.to_string());
        }
        Expr::Bound(i) if *i >= depth => {
            // Refers to an enclosing binder that is already named.
            let k = (*i - depth) as usize;
            if k < scope.len() {
                out.insert(scope[scope.len() - 1 - k].clone());
            }
        }
        Expr::Pi(_, a, b) | Expr::Lam(_, a, b) => {
            named_leaves(a, scope, depth, out);
            named_leaves(b, scope, depth + 1, out);
        }
        Expr::App(f, a) => {
            named_leaves(f, scope, depth, out);
            named_leaves(a, scope, depth, out);
        }
        _ => {}
    }
}

fn pick_name(hint: &str, body: &Expr, scope: &[String]) -> String {
    let mut avoid = BTreeSet::new();
    // The body sees the new binder at index 0 and the scope above it.
    named_leaves(body, scope, 1, &mut avoid);
    let mut n = if hint == "_" || hint.is_empty() { "x".to_string() } else { hint.to_string() };
    while avoid.contains(&n) || n == "type" {
        n.push('\'');
    }
    n
}

fn go(e: &Expr, scope: &mut Vec<String>, prec: Prec, out: &mut String) {
    match e {
        Expr::Type => out.push_str("type"),
        Expr::Bound(i) => {
            let k = *i as usize;
            if k < scope.len() {
                out.push_str(&scope[scope.len() - 1 - k]);
            } else {
                out.push_str(&format!("#{}", i));
            }
        }
        Expr::Free(x) | Expr::Const(x) | Expr::Meta(x) => out.push_str(x),
        Expr::Pi(_, a, b) if !b.mentions_bound(0) => {
            let paren = prec > Prec::Expr;
            if paren {
                out.push('(');
            }
            go(a, scope, Prec::App, out);
            out.push_str(" -> ");
            scope.push(String::from("_"));
            go(b, scope, Prec::Expr, out);
            scope.pop();
            if paren {
                out.push(')');
            }
        }
        Expr::Pi(h, a, b) | Expr::Lam(h, a, b) => {
            let (open, close) = if matches!(e, Expr::Pi(..)) { ('{', '}') } else { ('[', ']') };
            let paren = prec > Prec::Expr;
            if paren {
                out.push('(');
            }
            let x = pick_name(h.as_str(), b, scope);
            out.push(open);
            out.push_str(&x);
            out.push(':');
            go(a, scope, Prec::Expr, out);
            out.push(close);
            out.push(' ');
            scope.push(x);
            go(b, scope, Prec::Expr, out);
            scope.pop();
            if paren {
                out.push(')');
            }
        }
        Expr::App(..) => {
            let (head, args) = e.spine();
            let paren = prec > Prec::App;
            if paren {
                out.push('(');
            }
            go(head, scope, Prec::Atom, out);
            for a in args {
                out.push(' ');
                go(a, scope, Prec::Atom, out);
            }
            if paren {
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_and_binders() {
        let nat = Expr::konst("nat");
        let s_ty = Expr::arrow(nat.clone(), nat.clone());
        assert_eq!(pretty_print(&s_ty), "nat -> nat");
        let ho = Expr::arrow(s_ty.clone(), nat.clone());
        assert_eq!(pretty_print(&ho), "(nat -> nat) -> nat");
        let k = Expr::pi_named("K", Expr::konst("list"), Expr::apps(Expr::konst("append"), [Expr::konst("nil"), Expr::free("K"), Expr::free("K")]));
        assert_eq!(pretty_print(&k), "{K:list} append nil K K");
        let l = Expr::lam_named("x", nat.clone(), Expr::app(Expr::konst("s"), Expr::free("x")));
        assert_eq!(pretty_print(&Expr::app(l, Expr::konst("z"))), "([x:nat] s x) z");
    }
}
