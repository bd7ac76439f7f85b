//! LF kinds, types and objects: representation, concrete syntax,
//! substitution and βη-long normalization.

mod expr;
mod normalize;
mod parse;
mod print;
mod signature;
mod subst;

pub use expr::{alpha_eq, name, Expr, Hint, Name};
pub use normalize::{beta_normalize, normalize, Classifier, NormalizeError, Normalizer, DEFAULT_STEP_BUDGET};
pub use parse::{parse_expr, parse_query, parse_signature, ParseError};
pub(crate) use parse::{is_ident_char, is_ident_start};
pub use print::{pretty_print, print_signature};
pub use signature::{Entry, SigView, Signature, Sort};
pub use subst::{substitute, substitute_metas, Subst};
