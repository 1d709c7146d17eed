//! Surjective constraint satisfaction toolkit.
//!
//! Decides whether the polymorphism clone of a finite structure `B` is
//! diagonal-cautious, builds the quantifier-free gadget that pins a
//! surjective copy of the universe, and reduces `CSP(B⁺)` to `SCSP(B)`.
//! Exact backtracking oracles check the reduction end to end.

pub mod cli;
pub mod clone;
pub mod corpus;
pub mod error;
pub mod formula;
pub mod gadget;
pub mod oracles;
pub mod random;
mod search;
pub mod structure;
pub mod text;
pub mod verify;

pub use clone::{
    canonical_g, exists_polymorphism, find_violation, is_diagonal_cautious, is_polymorphism,
    unary_polymorphisms, CautionVerdict, GMap, OperationTable, UnaryMonoid, Violation,
};
pub use error::{Error, Result};
pub use formula::{
    eliminate_equalities, evaluate, Assignment, Atom, CspInstance, QfppFormula, ScspInstance,
    VarEquality, Variable,
};
pub use gadget::{
    build_gadget, reduce, reduce_with_gadget, verify_gadget, ColumnIndexing, Gadget, GadgetReport,
    Premise, Reduction,
};
pub use oracles::{enumerate_solutions, solve_csp, solve_scsp, SolveResult, Verdict};
pub use structure::{
    expand_with_constants, power_structure, validate_structure, Diagnostic, Element, Relation,
    Signature, Structure, StructureDef, Symbol, Tuple,
};
pub use verify::{verify_reduction, VerificationReport, VerifyConfig};

/// Default `n^n` cell cap, matching universes of size at most 4.
pub const DEFAULT_CAP: usize = 256;
