//! First-order syntax: signatures, terms, formulas, their text grammar, the
//! double-negation translation, and bounded exhaustive enumeration.

mod enumerate;
mod parser;
mod syntax;

pub use enumerate::{
    count_formulas, enumerate_formulas, enumerate_terms, stream_formulas, FormulaStream,
};
pub(crate) use enumerate::atoms_at_depth;
pub use parser::{parse_formula, parse_signature, ParseError};
pub use syntax::{
    free_variables, godel_translate, is_negation_free, is_positive, is_quantifier_free, Formula,
    Signature, SignatureError, Term,
};
