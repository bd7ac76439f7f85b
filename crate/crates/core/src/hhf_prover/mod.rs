//! Goal-directed search over translated clauses.

mod search;
mod unify;

pub use search::{
    check_depth_equivalence, solve, Counters, DepthEquivalence, Limits, Search, SearchReport, Solution, Status, Step,
    Strategy, DEFAULT_BUDGET, DEFAULT_DEPTH,
};
pub use unify::{eta_contract, EigenInfo, Mark, MetaInfo, Store, UnifyError, LOCAL_LEVEL};
