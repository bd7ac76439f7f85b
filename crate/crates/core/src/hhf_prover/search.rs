//! Depth-first search with chronological backtracking.
//!
//! The machine keeps an explicit continuation (a persistent list of goal
//! frames) and a stack of choice points, so deep derivations do not grow
//! the native stack.

use std::fmt;
use std::rc::Rc;

use crate::hhf_logic::{print_formula, print_term, ClauseSet, Formula, SimpleType, Term};
use crate::lf_syntax::{name, Name};

use super::unify::{Mark, Store, UnifyError};

pub const DEFAULT_DEPTH: u32 = 512;
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    DepthFirst,
    /// Repeats depth-first search with limits 1, 2, … up to the depth limit.
    IterativeDeepening,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dfs" => Ok(Strategy::DepthFirst),
            "id" => Ok(Strategy::IterativeDeepening),
            other => Err(format!("unknown strategy {}", other)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Limits {
    /// Maximum number of backchaining steps on one branch.
    pub depth: u32,
    /// Maximum number of unification steps overall.
    pub budget: u64,
    pub strategy: Strategy,
    pub max_solutions: usize,
    pub trace: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            depth: DEFAULT_DEPTH,
            budget: DEFAULT_BUDGET,
            strategy: Strategy::DepthFirst,
            max_solutions: 1,
            trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub backchain_steps: u64,
    pub unify_calls: u64,
    pub top_steps: u64,
}

impl Counters {
    fn add(&mut self, o: Counters) {
        self.backchain_steps += o.backchain_steps;
        self.unify_calls += o.unify_calls;
        self.top_steps += o.top_steps;
    }
}

/// One use of a program clause on the solution branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub origin: Name,
    /// Values of the clause's quantified variables, resolved.
    pub instantiation: Vec<Term>,
    /// Sorts of those variables.
    pub sorts: Vec<SimpleType>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// Resolved value of every initial meta, in order.
    pub bindings: Vec<Term>,
    /// Unbound metas that occur in `bindings`, with their sorts.
    pub residual: Vec<(u32, SimpleType)>,
    pub counters: Counters,
    pub trace: Vec<String>,
    pub steps: Vec<Step>,
    /// Largest backchaining depth on the solution branch.
    pub depth: u32,
}

impl Solution {
    pub fn is_open(&self) -> bool {
        !self.residual.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// The search space was explored completely.
    Exhausted,
    /// Some branch was cut by the depth limit.
    DepthCutoff,
    BudgetExceeded,
    /// Stopped after the requested number of solutions.
    Stopped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exhausted => "exhausted",
            Status::DepthCutoff => "depth exceeded",
            Status::BudgetExceeded => "budget exceeded",
            Status::Stopped => "stopped",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub solutions: Vec<Solution>,
    pub status: Status,
    pub counters: Counters,
    /// Some branch failed on a non-pattern unification problem.
    pub non_pattern: bool,
}

type Env = Option<Rc<Hyp>>;

struct Hyp {
    clause: Formula,
    next: Env,
}

#[derive(Clone)]
struct Frame {
    goal: Formula,
    env: Env,
    level: u32,
    depth: u32,
}

type Cont = Option<Rc<ContNode>>;

struct ContNode {
    frame: Frame,
    next: Cont,
}

fn push(frame: Frame, next: Cont) -> Cont {
    Some(Rc::new(ContNode { frame, next }))
}

#[derive(Clone)]
enum Cand {
    Hyp(Formula),
    Prog(usize),
}

struct Choice {
    frame: Frame,
    rest: Cont,
    cands: Rc<Vec<Cand>>,
    next: usize,
    mark: Mark,
    events: usize,
    max_depth: u32,
}

#[derive(Clone)]
enum Event {
    Bc { origin: Name, metas: Vec<u32>, program: bool },
    Top,
    All(u32),
    Imp(Formula),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Key {
    Const(Name),
    Eigen(u32),
}

fn term_key(t: &Term) -> Option<Key> {
    match t.spine().0 {
        Term::Const(c) => Some(Key::Const(c.clone())),
        Term::Eigen(e) => Some(Key::Eigen(*e)),
        _ => None,
    }
}

fn clause_keys(f: &Formula) -> (Option<Key>, Option<Key>) {
    let mut cur = f;
    loop {
        match cur {
            Formula::Forall(_, _, b) => cur = b,
            Formula::Implies(_, b) => cur = b,
            Formula::Atom(s, c) => return (term_key(s), term_key(c)),
            Formula::Top => return (None, None),
        }
    }
}

fn compatible(clause: &(Option<Key>, Option<Key>), goal: &(Option<Key>, Option<Key>)) -> bool {
    let ok = |a: &Option<Key>, b: &Option<Key>| match (a, b) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    };
    ok(&clause.0, &goal.0) && ok(&clause.1, &goal.1)
}

enum Flow {
    Continue,
    Fail,
    Abort,
}

/// One depth-first search; solutions are produced on demand.
pub struct Search<'p> {
    program: &'p ClauseSet,
    keys: Vec<(Option<Key>, Option<Key>)>,
    pub store: Store,
    initial: usize,
    depth_limit: u32,
    trace: bool,
    cont: Cont,
    choices: Vec<Choice>,
    events: Vec<Event>,
    max_depth: u32,
    counters: Counters,
    pub cutoff: bool,
    pub non_pattern: bool,
    pub budget_hit: bool,
    resume: bool,
    done: bool,
}

impl<'p> Search<'p> {
    /// `metas` are created at level 0 as metas `0..metas.len()`.
    pub fn new(program: &'p ClauseSet, goal: &Formula, metas: &[SimpleType], depth_limit: u32, budget: u64, trace: bool) -> Self {
        let mut store = Store::new(budget);
        for s in metas {
            store.new_meta(s.clone(), 0, None);
        }
        let keys = program.clauses.iter().map(|c| clause_keys(&c.formula)).collect();
        let frame = Frame { goal: goal.clone(), env: None, level: 0, depth: 0 };
        Search {
            program,
            keys,
            store,
            initial: metas.len(),
            depth_limit,
            trace,
            cont: push(frame, None),
            choices: Vec::new(),
            events: Vec::new(),
            max_depth: 0,
            counters: Counters::default(),
            cutoff: false,
            non_pattern: false,
            budget_hit: false,
            resume: false,
            done: false,
        }
    }

    pub fn counters(&self) -> Counters {
        Counters { unify_calls: self.store.unify_calls, ..self.counters }
    }

    pub fn next_solution(&mut self) -> Option<Solution> {
        if self.done {
            return None;
        }
        if self.resume {
            self.resume = false;
            if !self.backtrack() {
                self.done = true;
                return None;
            }
        }
        loop {
            let Some(node) = self.cont.take() else {
                self.resume = true;
                return Some(self.solution());
            };
            self.cont = node.next.clone();
            let flow = self.step(node.frame.clone());
            match flow {
                Flow::Continue => {}
                Flow::Fail => {
                    if !self.backtrack() {
                        self.done = true;
                        return None;
                    }
                }
                Flow::Abort => {
                    self.budget_hit = true;
                    self.done = true;
                    return None;
                }
            }
        }
    }

    fn step(&mut self, frame: Frame) -> Flow {
        match &frame.goal {
            Formula::Top => {
                self.counters.top_steps += 1;
                self.events.push(Event::Top);
                Flow::Continue
            }
            Formula::Forall(_, sort, body) => {
                let e = self.store.new_eigen(frame.level + 1, Some(sort.clone()));
                self.events.push(Event::All(e));
                let goal = body.instantiate(&Term::Eigen(e));
                let next = Frame { goal, env: frame.env.clone(), level: frame.level + 1, depth: frame.depth };
                self.cont = push(next, self.cont.take());
                Flow::Continue
            }
            Formula::Implies(hyp, body) => {
                self.events.push(Event::Imp(hyp.as_ref().clone()));
                let env = Some(Rc::new(Hyp { clause: hyp.as_ref().clone(), next: frame.env.clone() }));
                let next = Frame { goal: body.as_ref().clone(), env, level: frame.level, depth: frame.depth };
                self.cont = push(next, self.cont.take());
                Flow::Continue
            }
            Formula::Atom(s, c) => {
                if frame.depth >= self.depth_limit {
                    self.cutoff = true;
                    return Flow::Fail;
                }
                let goal_key = (term_key(&self.store.whnf(s)), term_key(&self.store.whnf(c)));
                let mut cands = Vec::new();
                let mut env = frame.env.clone();
                while let Some(h) = env {
                    if compatible(&clause_keys(&h.clause), &goal_key) {
                        cands.push(Cand::Hyp(h.clause.clone()));
                    }
                    env = h.next.clone();
                }
                for (i, k) in self.keys.iter().enumerate() {
                    if compatible(k, &goal_key) {
                        cands.push(Cand::Prog(i));
                    }
                }
                let rest = self.cont.take();
                self.try_cands(frame, rest, Rc::new(cands), 0)
            }
        }
    }

    fn try_cands(&mut self, frame: Frame, rest: Cont, cands: Rc<Vec<Cand>>, start: usize) -> Flow {
        for j in start..cands.len() {
            let mark = self.store.mark();
            let events = self.events.len();
            let max_depth = self.max_depth;
            match self.attempt(&frame, &cands[j]) {
                Ok(guards) => {
                    if j + 1 < cands.len() {
                        self.choices.push(Choice {
                            frame: frame.clone(),
                            rest: rest.clone(),
                            cands: cands.clone(),
                            next: j + 1,
                            mark,
                            events,
                            max_depth,
                        });
                    }
                    self.counters.backchain_steps += 1;
                    self.max_depth = self.max_depth.max(frame.depth + 1);
                    let mut cont = rest;
                    for g in guards.into_iter().rev() {
                        let f = Frame { goal: g, env: frame.env.clone(), level: frame.level, depth: frame.depth + 1 };
                        cont = push(f, cont);
                    }
                    self.cont = cont;
                    return Flow::Continue;
                }
                Err(UnifyError::Budget) => return Flow::Abort,
                Err(e) => {
                    if e == UnifyError::NonPattern {
                        self.non_pattern = true;
                    }
                    self.store.undo(mark);
                    self.events.truncate(events);
                }
            }
        }
        Flow::Fail
    }

    fn attempt(&mut self, frame: &Frame, cand: &Cand) -> Result<Vec<Formula>, UnifyError> {
        let Formula::Atom(gs, gc) = &frame.goal else { unreachable!() };
        let (mut f, origin, program) = match cand {
            Cand::Hyp(h) => {
                let origin = match clause_keys(h).0 {
                    Some(Key::Eigen(e)) => name(&format!("hyp!e{}", e)),
                    _ => name("hyp"),
                };
                (h.clone(), origin, false)
            }
            Cand::Prog(i) => {
                let c = &self.program.clauses[*i];
                (c.formula.clone(), c.origin.clone(), true)
            }
        };
        let mut metas = Vec::new();
        let mut guards = Vec::new();
        loop {
            match f {
                Formula::Forall(h, sort, body) => {
                    let m = self.store.new_meta(sort, frame.level, Some(h.0.clone()));
                    metas.push(m);
                    f = body.instantiate(&Term::Meta(m));
                }
                Formula::Implies(g, rest) => {
                    guards.push(g.as_ref().clone());
                    f = rest.as_ref().clone();
                }
                Formula::Atom(s, c) => {
                    self.store.unify(gs, &s)?;
                    self.store.unify(gc, &c)?;
                    break;
                }
                Formula::Top => return Err(UnifyError::Clash),
            }
        }
        self.events.push(Event::Bc { origin, metas, program });
        Ok(guards)
    }

    fn backtrack(&mut self) -> bool {
        while let Some(ch) = self.choices.pop() {
            self.store.undo(ch.mark);
            self.events.truncate(ch.events);
            self.max_depth = ch.max_depth;
            match self.try_cands(ch.frame, ch.rest, ch.cands, ch.next) {
                Flow::Continue => return true,
                Flow::Fail => continue,
                Flow::Abort => {
                    self.budget_hit = true;
                    return false;
                }
            }
        }
        false
    }

    fn render(&self, t: &Term) -> String {
        let s = print_term(&self.store.resolve(t));
        if s.contains(' ') {
            format!("({})", s)
        } else {
            s
        }
    }

    fn solution(&self) -> Solution {
        let bindings: Vec<Term> = (0..self.initial as u32).map(|m| self.store.resolve(&Term::Meta(m))).collect();
        let mut residual = Vec::new();
        for b in &bindings {
            for m in b.metas() {
                if !residual.iter().any(|(r, _)| *r == m) {
                    residual.push((m, self.store.meta(m).sort.clone()));
                }
            }
        }
        let mut steps = Vec::new();
        let mut trace = Vec::new();
        for ev in &self.events {
            if let Event::Bc { origin, metas, program: true } = ev {
                steps.push(Step {
                    origin: origin.clone(),
                    instantiation: metas.iter().map(|m| self.store.resolve(&Term::Meta(*m))).collect(),
                    sorts: metas.iter().map(|m| self.store.meta(*m).sort.clone()).collect(),
                });
            }
            if self.trace {
                trace.push(match ev {
                    Event::Bc { origin, metas, .. } => {
                        let mut line = format!("bc {}", origin);
                        for m in metas {
                            line.push(' ');
                            line.push_str(&self.render(&Term::Meta(*m)));
                        }
                        line
                    }
                    Event::Top => "top".to_string(),
                    Event::All(e) => format!("all !e{}", e),
                    Event::Imp(f) => format!("imp+ {}", print_formula(&f.map_terms(&|t| self.store.resolve(t)))),
                });
            }
        }
        Solution { bindings, residual, counters: self.counters(), trace, steps, depth: self.max_depth }
    }
}

/// Runs the search according to `limits` and collects solutions.
pub fn solve(program: &ClauseSet, goal: &Formula, metas: &[SimpleType], limits: &Limits) -> SearchReport {
    match limits.strategy {
        Strategy::DepthFirst => {
            let mut s = Search::new(program, goal, metas, limits.depth, limits.budget, limits.trace);
            let mut solutions = Vec::new();
            while solutions.len() < limits.max_solutions {
                match s.next_solution() {
                    Some(sol) => solutions.push(sol),
                    None => break,
                }
            }
            let status = if s.budget_hit {
                Status::BudgetExceeded
            } else if solutions.len() >= limits.max_solutions && !s.done {
                Status::Stopped
            } else if s.cutoff {
                Status::DepthCutoff
            } else {
                Status::Exhausted
            };
            SearchReport { solutions, status, counters: s.counters(), non_pattern: s.non_pattern }
        }
        Strategy::IterativeDeepening => {
            let mut total = Counters::default();
            let mut solutions = Vec::new();
            let mut non_pattern = false;
            let mut status = Status::DepthCutoff;
            for d in 1..=limits.depth.max(1) {
                let remaining = limits.budget.saturating_sub(total.unify_calls);
                let mut s = Search::new(program, goal, metas, d, remaining, limits.trace);
                let mut stopped = false;
                while let Some(mut sol) = s.next_solution() {
                    if sol.depth == d {
                        let mut c = total;
                        c.add(sol.counters);
                        sol.counters = c;
                        solutions.push(sol);
                        if solutions.len() >= limits.max_solutions {
                            stopped = true;
                            break;
                        }
                    }
                }
                total.add(s.counters());
                non_pattern |= s.non_pattern;
                if s.budget_hit {
                    status = Status::BudgetExceeded;
                    break;
                }
                if stopped {
                    status = Status::Stopped;
                    break;
                }
                if !s.cutoff {
                    status = Status::Exhausted;
                    break;
                }
            }
            SearchReport { solutions, status, counters: total, non_pattern }
        }
    }
}

/// Agreement of two programs on one goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthEquivalence {
    pub first_succeeds: bool,
    pub second_succeeds: bool,
    pub first_depth: Option<u32>,
    pub second_depth: Option<u32>,
    /// First-solution bindings are equal up to α (only when both succeed).
    pub bindings_agree: bool,
}

impl DepthEquivalence {
    pub fn agree(&self) -> bool {
        self.first_succeeds == self.second_succeeds && (!self.first_succeeds || self.bindings_agree)
    }
}

pub fn check_depth_equivalence(
    a: &ClauseSet,
    b: &ClauseSet,
    goal_a: &Formula,
    goal_b: &Formula,
    metas: &[SimpleType],
    limits: &Limits,
) -> DepthEquivalence {
    let ra = solve(a, goal_a, metas, limits);
    let rb = solve(b, goal_b, metas, limits);
    let sa = ra.solutions.first();
    let sb = rb.solutions.first();
    DepthEquivalence {
        first_succeeds: sa.is_some(),
        second_succeeds: sb.is_some(),
        first_depth: sa.map(|s| s.depth),
        second_depth: sb.map(|s| s.depth),
        bindings_agree: match (sa, sb) {
            (Some(x), Some(y)) => x.bindings == y.bindings,
            _ => false,
        },
    }
}
