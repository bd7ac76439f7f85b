pub mod cli;
pub mod corpus;
pub mod hhf_logic;
pub mod hhf_prover;
pub mod lf_syntax;
pub mod lf_typecheck;
pub mod reconstruct;
pub mod rigidity;
