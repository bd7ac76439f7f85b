//! Target logic: simply typed terms, hereditary Harrop formulas over the
//! single predicate `hastype`, and the two translations from LF.

mod term;
mod text;
mod translate;

pub use term::{Formula, SimpleType, SortEnv, SortError, Term};
pub use text::{parse_clauses, print_clauses, print_formula, print_term, ClauseParseError};
pub use translate::{
    encode_term, encode_term_with, erase_type, erased_signature, fill_top_guards, translate, translate_decl,
    translate_decl_with_plan, translate_optimized, translate_optimized_decl, translate_query, translate_simple, Clause,
    ClauseSet, Mode, QueryGoal,
};
