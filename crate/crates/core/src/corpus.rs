//! Built-in signatures and seeded query generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const APPEND_LF: &str = "\
nat : type.
z : nat.
s : nat -> nat.
list : type.
nil : list.
cons : nat -> list -> list.
append : list -> list -> list -> type.
appNil : {K:list} append nil K K.
appCons : {X:nat} {L:list} {K:list} {M:list}
          append L K M -> append (cons X L) K (cons X M).
";

/// The signature of the rigidity counter-example: `X` occurs in the target
/// only applied to a constant, so its guard must stay.
pub const NON_RIGID_LF: &str = "\
nat : type.
z : nat.
num : nat -> type.
num_n : {n:nat} num n.
fam : num z -> type.
bad : {X:nat -> num z} fam (X z).
";

/// `s^k z`.
pub fn nat_text(k: usize) -> String {
    let mut out = "z".to_string();
    for _ in 0..k {
        out = format!("(s {})", out);
    }
    out
}

/// A list literal over `s^k z` elements.
pub fn list_text(elems: &[usize]) -> String {
    let mut out = "nil".to_string();
    for &k in elems.iter().rev() {
        out = format!("(cons {} {})", nat_text(k), out);
    }
    out
}

/// Ground `append l1 nil l1` with `l1` of length `n` and elements
/// alternating `z`, `s z`. With `search`, the third list is left as `L`.
pub fn bench_query(n: usize, search: bool) -> String {
    let elems: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let l = list_text(&elems);
    if search {
        format!("append {} nil L", l)
    } else {
        format!("append {} nil {}", l, l)
    }
}

/// Queries against [`APPEND_LF`]: ground checks (true and false), forward
/// and backward `append` with output meta-variables, and inhabitation of
/// simple and functional types.
pub fn append_queries(seed: u64, count: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let list = |rng: &mut ChaCha8Rng, max: usize| -> Vec<usize> {
        let n = rng.gen_range(0..=max);
        (0..n).map(|_| rng.gen_range(0..=2)).collect()
    };
    let fixed = [
        "nat",
        "list",
        "{x:nat} nat",
        "{x:nat} {l:list} list",
        "{l:list} append nil l l",
        "append nil L L",
        "append nil (cons X nil) L",
    ];
    let mut out: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
    while out.len() < count {
        let a = list(&mut rng, 2);
        let b = list(&mut rng, 2);
        let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
        let q = match rng.gen_range(0..6) {
            0 => format!("append {} {} {}", list_text(&a), list_text(&b), list_text(&ab)),
            1 => {
                let mut wrong = ab.clone();
                match wrong.choose_mut(&mut rng) {
                    Some(x) => *x = (*x + 1) % 3,
                    None => wrong.push(0),
                }
                format!("append {} {} {}", list_text(&a), list_text(&b), list_text(&wrong))
            }
            2 => format!("append {} {} L", list_text(&a), list_text(&b)),
            3 => format!("append L {} {}", list_text(&b), list_text(&ab)),
            4 => format!("append {} L {}", list_text(&a), list_text(&ab)),
            _ => format!("append L K {}", list_text(&ab)),
        };
        out.push(q);
    }
    out
}

/// A small generated signature with queries over it.
#[derive(Clone, Debug)]
pub struct GeneratedSig {
    pub text: String,
    pub queries: Vec<String>,
}

struct Datatype {
    name: String,
    /// Constructor name and argument datatypes (indices).
    ctors: Vec<(String, Vec<usize>)>,
}

/// Random ground term of datatype `d`, at most `depth` constructors deep.
fn ground_term(rng: &mut ChaCha8Rng, dts: &[Datatype], d: usize, depth: usize) -> String {
    let ctors = &dts[d].ctors;
    let (c, args) = if depth == 0 { &ctors[0] } else { ctors.choose(rng).expect("nonempty") };
    if args.is_empty() {
        return c.clone();
    }
    let parts: Vec<String> = args.iter().map(|&a| ground_term(rng, dts, a, depth.saturating_sub(1))).collect();
    format!("({} {})", c, parts.join(" "))
}

/// Random term of datatype `d` over variables `vars` (name, datatype).
fn open_term(rng: &mut ChaCha8Rng, dts: &[Datatype], vars: &[(String, usize)], d: usize, depth: usize) -> String {
    let fitting: Vec<&String> = vars.iter().filter(|(_, t)| *t == d).map(|(x, _)| x).collect();
    if !fitting.is_empty() && (depth == 0 || rng.gen_bool(0.6)) {
        return fitting.choose(rng).expect("nonempty").to_string();
    }
    let ctors = &dts[d].ctors;
    let (c, args) = if depth == 0 { &ctors[0] } else { ctors.choose(rng).expect("nonempty") };
    if args.is_empty() {
        return c.clone();
    }
    let parts: Vec<String> = args.iter().map(|&a| open_term(rng, dts, vars, a, depth - 1)).collect();
    format!("({} {})", c, parts.join(" "))
}

/// Datatypes with a nullary first constructor, binary relations whose rules
/// take their arguments apart (so some binders are rigid and some are not),
/// an optional higher-order constructor, and queries for inhabitation,
/// ground checks and relations with an output meta-variable.
pub fn random_signature(rng: &mut ChaCha8Rng, index: usize) -> GeneratedSig {
    let n_types = rng.gen_range(1..=3);
    let mut dts: Vec<Datatype> = Vec::new();
    for d in 0..n_types {
        let name = format!("d{}_{}", index, d);
        let mut ctors = vec![(format!("c{}_{}_0", index, d), Vec::new())];
        for k in 1..rng.gen_range(2..=3) {
            // At most one recursive argument keeps the number of terms of a
            // given depth small.
            let arity = if d == 0 { 1 } else { rng.gen_range(1..=2) };
            let mut args: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..d.max(1))).collect();
            if d == 0 || rng.gen_bool(0.5) {
                args[0] = d;
            }
            ctors.push((format!("c{}_{}_{}", index, d, k), args));
        }
        dts.push(Datatype { name, ctors });
    }
    let mut text = String::new();
    for d in &dts {
        text.push_str(&format!("{} : type.\n", d.name));
        for (c, args) in &d.ctors {
            let mut ty = d.name.clone();
            for &a in args.iter().rev() {
                ty = format!("{} -> {}", dts[a].name, ty);
            }
            text.push_str(&format!("{} : {}.\n", c, ty));
        }
    }
    let hoas = rng.gen_bool(0.3);
    if hoas {
        let d = &dts[0].name;
        text.push_str(&format!("lam{} : ({} -> {}) -> {}.\n", index, d, d, d));
    }

    let n_rels = rng.gen_range(1..=2);
    let mut rels = Vec::new();
    // Outputs range over types without binary constructors: the naive
    // program enumerates an unknown output before checking it, and the
    // number of terms of a binary type grows doubly exponentially in depth.
    let unary: Vec<usize> = (0..n_types).filter(|&d| dts[d].ctors.iter().all(|(_, args)| args.len() <= 1)).collect();
    for r in 0..n_rels {
        let (a, b) = (rng.gen_range(0..n_types), *unary.choose(rng).expect("d0 is unary"));
        let name = format!("p{}_{}", index, r);
        text.push_str(&format!("{} : {} -> {} -> type.\n", name, dts[a].name, dts[b].name));
        rels.push((name, a, b));
    }
    for (r, (pname, a, b)) in rels.iter().enumerate() {
        for (k, (c, args)) in dts[*a].ctors.iter().enumerate() {
            // One rule per constructor of the input type: the input is taken
            // apart, recursive premises run on the parts of matching type.
            let xs: Vec<(String, usize)> = args.iter().enumerate().map(|(i, &t)| (format!("X{}", i), t)).collect();
            let mut binders: Vec<(String, usize)> = xs.clone();
            let mut premises = Vec::new();
            let mut outs: Vec<(String, usize)> = Vec::new();
            for (x, t) in &xs {
                if *t == *a && rng.gen_bool(0.8) {
                    let y = format!("Y{}", premises.len());
                    premises.push(format!("{} {} {}", pname, x, y));
                    binders.push((y.clone(), *b));
                    outs.push((y, *b));
                }
            }
            // An extra output-typed binder that occurs only in a premise
            // stays guarded. Premises always recur on parts of the input.
            let recursive: Vec<&String> = xs.iter().filter(|(_, t)| *t == *a).map(|(x, _)| x).collect();
            if !recursive.is_empty() && rng.gen_bool(0.25) {
                let w = "W".to_string();
                premises.push(format!("{} {} {}", pname, recursive.choose(rng).expect("nonempty"), w));
                binders.push((w, *b));
            }
            let mut scope = outs.clone();
            scope.extend(xs.iter().filter(|(_, t)| *t == *b).cloned());
            let out = open_term(rng, &dts, &scope, *b, 2);
            let input = if args.is_empty() {
                c.clone()
            } else {
                format!("({} {})", c, xs.iter().map(|(x, _)| x.as_str()).collect::<Vec<_>>().join(" "))
            };
            let mut ty = format!("{} {} {}", pname, input, out);
            for p in premises.iter().rev() {
                ty = format!("{} -> {}", p, ty);
            }
            let prefix: String = binders.iter().map(|(x, t)| format!("{{{}:{}}} ", x, dts[*t].name)).collect();
            text.push_str(&format!("r{}_{}_{} : {}{}.\n", index, r, k, prefix, ty));
        }
    }

    let mut queries: Vec<String> = dts.iter().map(|d| d.name.clone()).collect();
    queries.push(format!("{{x:{}}} {}", dts[0].name, dts[n_types - 1].name));
    for (pname, a, b) in &rels {
        for _ in 0..2 {
            queries.push(format!("{} {} O", pname, ground_term(rng, &dts, *a, 1)));
        }
        queries.push(format!("{} {} {}", pname, ground_term(rng, &dts, *a, 1), ground_term(rng, &dts, *b, 1)));
    }
    GeneratedSig { text, queries }
}

/// `count` generated signatures from one seed.
pub fn random_signatures(seed: u64, count: usize) -> Vec<GeneratedSig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_signature(&mut rng, i)).collect()
}
