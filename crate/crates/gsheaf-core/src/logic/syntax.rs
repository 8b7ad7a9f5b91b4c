//! Terms, formulas, and signatures.
//!
//! Variables are indexed names `v0, v1, ...`. Quantifiers store the index they
//! bind; enumeration and parsing never rebind an index that is already in
//! scope, so capture never arises and substitution is not needed anywhere in
//! the crate.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A finite relational-functional signature.
///
/// Names live in one namespace and must be distinct. Function and relation
/// arities are at least 1; nullary operations are declared as constants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    functions: Vec<(String, usize)>,
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
}

/// Rejected signature declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignatureError {
    DuplicateName(String),
    ZeroArity(String),
    /// Names must be identifiers (`[A-Za-z_][A-Za-z0-9_]*`) and must not
    /// collide with the variable spelling `v<digits>` or a grammar keyword.
    ReservedName(String),
}

impl fmt::Display for SignatureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureError::DuplicateName(n) => write!(f, "duplicate symbol name '{n}'"),
            SignatureError::ZeroArity(n) => write!(f, "symbol '{n}' must have arity at least 1"),
            SignatureError::ReservedName(n) => write!(f, "'{n}' is not usable as a symbol name"),
        }
    }
}

const KEYWORDS: [&str; 5] = ["fun", "rel", "const", "forall", "exists"];

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `v` followed only by digits is always lexed as a variable.
pub(crate) fn is_variable_spelling(name: &str) -> bool {
    name.starts_with('v') && {
        let rest = &name[1..];
        !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
    }
}

fn usable_name(name: &str) -> bool {
    is_identifier(name) && !is_variable_spelling(name) && !KEYWORDS.contains(&name)
}

impl Signature {
    pub fn new(
        functions: Vec<(String, usize)>,
        relations: Vec<(String, usize)>,
        constants: Vec<String>,
    ) -> Result<Self, SignatureError> {
        let mut seen = BTreeSet::new();
        let names = functions
            .iter()
            .map(|(n, _)| n)
            .chain(relations.iter().map(|(n, _)| n))
            .chain(constants.iter());
        for name in names {
            if !usable_name(name) {
                return Err(SignatureError::ReservedName(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(SignatureError::DuplicateName(name.clone()));
            }
        }
        for (name, arity) in functions.iter().chain(relations.iter()) {
            if *arity == 0 {
                return Err(SignatureError::ZeroArity(name.clone()));
            }
        }
        Ok(Signature { functions, relations, constants })
    }

    /// Signature with no symbols at all.
    pub fn empty() -> Self {
        Signature { functions: Vec::new(), relations: Vec::new(), constants: Vec::new() }
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }
}

/// A first-order term over some signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(usize),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    /// Nesting depth: variables and constants are 0, an application is one
    /// more than its deepest argument.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Const(_) => {}
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "v{v}"),
            Term::Const(c) => f.write_str(c),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A first-order formula. Implication is a primitive connective, not sugar.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(usize, Box<Formula>),
    Forall(usize, Box<Formula>),
}

impl Formula {
    /// AST depth. Atoms count the nesting of their terms, so `R(f(v0))` has
    /// depth 1; connectives and quantifiers add one level each.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Eq(t, s) => t.depth().max(s.depth()),
            Formula::Rel(_, args) => args.iter().map(Term::depth).max().unwrap_or(0),
            Formula::Not(x) => 1 + x.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Formula::Exists(_, x) | Formula::Forall(_, x) => 1 + x.depth(),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Eq(..) | Formula::Rel(..))
    }
}

/// Free variables of `phi`, in ascending index order.
pub fn free_variables(phi: &Formula) -> BTreeSet<usize> {
    fn go(phi: &Formula, out: &mut BTreeSet<usize>) {
        match phi {
            Formula::Eq(t, s) => {
                t.collect_vars(out);
                s.collect_vars(out);
            }
            Formula::Rel(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            Formula::Not(x) => go(x, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                go(a, out);
                go(b, out);
            }
            Formula::Exists(v, x) | Formula::Forall(v, x) => {
                let mut inner = BTreeSet::new();
                go(x, &mut inner);
                inner.remove(v);
                out.extend(inner);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(phi, &mut out);
    out
}

/// A formula is positive when it contains no negation, no implication, and no
/// universal quantifier.
pub fn is_positive(phi: &Formula) -> bool {
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => true,
        Formula::And(a, b) | Formula::Or(a, b) => is_positive(a) && is_positive(b),
        Formula::Exists(_, x) => is_positive(x),
        Formula::Not(_) | Formula::Implies(..) | Formula::Forall(..) => false,
    }
}

/// No negation anywhere, counting implication as a hidden negation; the
/// positive fragment plus universal quantification.
pub fn is_negation_free(phi: &Formula) -> bool {
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => true,
        Formula::And(a, b) | Formula::Or(a, b) => is_negation_free(a) && is_negation_free(b),
        Formula::Exists(_, x) | Formula::Forall(_, x) => is_negation_free(x),
        Formula::Not(_) | Formula::Implies(..) => false,
    }
}

/// No quantifiers anywhere; negation and implication are allowed.
pub fn is_quantifier_free(phi: &Formula) -> bool {
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => true,
        Formula::Not(x) => is_quantifier_free(x),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            is_quantifier_free(a) && is_quantifier_free(b)
        }
        Formula::Exists(..) | Formula::Forall(..) => false,
    }
}

/// The double-negation translation.
///
/// Atoms gain a double negation; `∨` and `∃` are rewritten through `¬` and
/// `∧` / `∀`; the other connectives translate structurally. The result never
/// contains `Or` or `Exists`, and has the same free variables as the input.
pub fn godel_translate(phi: &Formula) -> Formula {
    fn neg(x: Formula) -> Formula {
        Formula::Not(Box::new(x))
    }
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => neg(neg(phi.clone())),
        Formula::And(a, b) => {
            Formula::And(Box::new(godel_translate(a)), Box::new(godel_translate(b)))
        }
        Formula::Or(a, b) => neg(Formula::And(
            Box::new(neg(godel_translate(a))),
            Box::new(neg(godel_translate(b))),
        )),
        Formula::Not(x) => neg(godel_translate(x)),
        Formula::Implies(a, b) => {
            Formula::Implies(Box::new(godel_translate(a)), Box::new(godel_translate(b)))
        }
        Formula::Forall(v, x) => Formula::Forall(*v, Box::new(godel_translate(x))),
        Formula::Exists(v, x) => neg(Formula::Forall(*v, Box::new(neg(godel_translate(x))))),
    }
}

/// Binding strength used by the printer; parentheses are inserted whenever a
/// child binds no tighter than its context requires.
fn prec(phi: &Formula) -> u8 {
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => 5,
        Formula::Not(_) => 4,
        Formula::And(..) => 3,
        Formula::Or(..) => 2,
        Formula::Implies(..) => 1,
        Formula::Exists(..) | Formula::Forall(..) => 0,
    }
}

fn write_formula(phi: &Formula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(phi) < min {
        f.write_str("(")?;
        write_formula(phi, 0, f)?;
        return f.write_str(")");
    }
    match phi {
        Formula::Eq(t, s) => write!(f, "{t} = {s}"),
        Formula::Rel(name, args) => {
            write!(f, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")
        }
        Formula::Not(x) => {
            f.write_str("!")?;
            write_formula(x, 4, f)
        }
        Formula::And(a, b) => {
            write_formula(a, 3, f)?;
            f.write_str(" & ")?;
            write_formula(b, 4, f)
        }
        Formula::Or(a, b) => {
            write_formula(a, 2, f)?;
            f.write_str(" | ")?;
            write_formula(b, 3, f)
        }
        Formula::Implies(a, b) => {
            write_formula(a, 2, f)?;
            f.write_str(" -> ")?;
            write_formula(b, 1, f)
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let word = if matches!(phi, Formula::Exists(..)) { "exists" } else { "forall" };
            write!(f, "{word} v{v} ")?;
            match **body {
                // A quantified body keeps maximal scope without parentheses.
                Formula::Exists(..) | Formula::Forall(..) => write_formula(body, 0, f),
                _ => write_formula(body, 4, f),
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, 0, f)
    }
}
