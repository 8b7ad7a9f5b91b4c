//! Finite structures carrying a group action that commutes with the
//! interpreted symbols.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::group::FiniteGroup;
use crate::logic::{Formula, Signature, Term};
use crate::report::CheckReport;

/// How relation invariance under the action is read.
///
/// `Componentwise` moves each coordinate of a related tuple by its own
/// group element; `Diagonal` moves the whole tuple by a single element.
/// Componentwise is the stricter law and the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum InvarianceMode {
    #[default]
    Componentwise,
    Diagonal,
}

impl InvarianceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            InvarianceMode::Componentwise => "componentwise",
            InvarianceMode::Diagonal => "diagonal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    UnassignedVariable(usize),
    UnknownSymbol(String),
    OutOfUniverse { element: usize, universe_size: usize },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnassignedVariable(v) => write!(f, "variable v{v} has no assigned value"),
            EvalError::UnknownSymbol(name) => write!(f, "symbol '{name}' is not interpreted"),
            EvalError::OutOfUniverse { element, universe_size } => {
                write!(f, "element {element} is outside the universe 0..{universe_size}")
            }
        }
    }
}

/// A finite structure over elements `0..universe_size`, together with a
/// group action. Fields are public for direct construction; nothing is
/// trusted until [`validate`](GStructure::validate) passes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GStructure {
    pub sig: Signature,
    pub group: FiniteGroup,
    pub universe_size: usize,
    /// Flat tables indexed mixed-radix, first argument most significant.
    pub functions: BTreeMap<String, Vec<usize>>,
    pub relations: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub constants: BTreeMap<String, usize>,
    /// `action[g][x]` is g applied to x.
    pub action: Vec<Vec<usize>>,
    pub mode: InvarianceMode,
}

/// Calls `f` on every tuple in `0..n` of the given length, in
/// lexicographic order with the first position most significant.
pub(crate) fn each_tuple(n: usize, len: usize, mut f: impl FnMut(&[usize])) {
    if len == 0 {
        f(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

impl GStructure {
    /// A structure with no symbols interpreted yet, over the trivial
    /// group acting trivially.
    pub fn plain(sig: Signature, universe_size: usize) -> GStructure {
        GStructure {
            sig,
            group: FiniteGroup::trivial(),
            universe_size,
            functions: BTreeMap::new(),
            relations: BTreeMap::new(),
            constants: BTreeMap::new(),
            action: vec![(0..universe_size).collect()],
            mode: InvarianceMode::Componentwise,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.universe_size
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g][x]
    }

    fn table_index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.universe_size + a)
    }

    pub fn apply_function(&self, name: &str, args: &[usize]) -> Result<usize, EvalError> {
        let table = self
            .functions
            .get(name)
            .ok_or_else(|| EvalError::UnknownSymbol(String::from(name)))?;
        Ok(table[self.table_index(args)])
    }

    pub fn relation_holds(&self, name: &str, args: &[usize]) -> Result<bool, EvalError> {
        let tuples = self
            .relations
            .get(name)
            .ok_or_else(|| EvalError::UnknownSymbol(String::from(name)))?;
        Ok(tuples.contains(args))
    }

    pub fn constant(&self, name: &str) -> Result<usize, EvalError> {
        self.constants
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::UnknownSymbol(String::from(name)))
    }

    /// Checks shapes, the action axioms, and the commutation of the
    /// action with constants, relations (per `mode`), and functions.
    pub fn validate(&self) -> CheckReport {
        let n = self.universe_size;
        let mut report = CheckReport::new("structure")
            .bound("universe", n.to_string())
            .bound("group-order", self.group.order().to_string())
            .bound("mode", self.mode.as_str());
        if n == 0 {
            report.push("universe-nonempty", String::from("the universe is empty"));
        }
        if self.action.len() != self.group.order() {
            report.push(
                "action-shape",
                format!("{} action rows for a group of order {}", self.action.len(), self.group.order()),
            );
        }
        for (g, row) in self.action.iter().enumerate() {
            if row.len() != n {
                report.push("action-shape", format!("row {g} has {} entries, wanted {n}", row.len()));
            } else if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                report.push("action-range", format!("group element {g} sends something to {bad}"));
            }
        }
        for (name, arity) in self.sig.functions() {
            match self.functions.get(name) {
                None => report.push("functions-interpreted", format!("'{name}' has no table")),
                Some(table) => {
                    let want = n.checked_pow(*arity as u32).unwrap_or(usize::MAX);
                    if table.len() != want {
                        report.push(
                            "functions-interpreted",
                            format!("'{name}' has {} entries, wanted {want}", table.len()),
                        );
                    } else if let Some(&bad) = table.iter().find(|&&x| x >= n) {
                        report.push("functions-interpreted", format!("'{name}' produces {bad}"));
                    }
                }
            }
        }
        for (name, arity) in self.sig.relations() {
            match self.relations.get(name) {
                None => report.push("relations-interpreted", format!("'{name}' has no tuple set")),
                Some(tuples) => {
                    for t in tuples {
                        if t.len() != *arity || t.iter().any(|&x| x >= n) {
                            report.push(
                                "relations-interpreted",
                                format!("'{name}' holds the malformed tuple {t:?}"),
                            );
                        }
                    }
                }
            }
        }
        for name in self.sig.constants() {
            match self.constants.get(name) {
                None => report.push("constants-interpreted", format!("'{name}' has no value")),
                Some(&c) if c >= n => {
                    report.push("constants-interpreted", format!("'{name}' is {c}, out of range"))
                }
                Some(_) => {}
            }
        }
        for name in self.functions.keys() {
            if self.sig.function_arity(name).is_none() {
                report.push("interpretation-matches-signature", format!("stray function '{name}'"));
            }
        }
        for name in self.relations.keys() {
            if self.sig.relation_arity(name).is_none() {
                report.push("interpretation-matches-signature", format!("stray relation '{name}'"));
            }
        }
        for name in self.constants.keys() {
            if !self.sig.has_constant(name) {
                report.push("interpretation-matches-signature", format!("stray constant '{name}'"));
            }
        }
        if !report.is_ok() {
            return report;
        }

        let e = self.group.identity;
        for x in self.elements() {
            if self.act(e, x) != x {
                report.push("action-identity", format!("identity moves {x}"));
            }
        }
        for g in self.group.elements() {
            for h in self.group.elements() {
                let gh = self.group.mul(g, h);
                for x in self.elements() {
                    if self.act(gh, x) != self.act(g, self.act(h, x)) {
                        report.push("action-composition", format!("({g} * {h}) acts wrong on {x}"));
                    }
                }
            }
        }

        let constant_values: BTreeSet<usize> = self.constants.values().copied().collect();
        for g in self.group.elements() {
            for (name, &c) in &self.constants {
                if !constant_values.contains(&self.act(g, c)) {
                    report.push(
                        "constants-invariant",
                        format!("{g} moves '{name}' = {c} outside the constant set"),
                    );
                }
            }
        }

        let order = self.group.order();
        for (name, tuples) in &self.relations {
            for t in tuples {
                match self.mode {
                    InvarianceMode::Componentwise => {
                        each_tuple(order, t.len(), |gs| {
                            let moved: Vec<usize> =
                                t.iter().zip(gs).map(|(&x, &g)| self.act(g, x)).collect();
                            if !tuples.contains(&moved) {
                                report.push(
                                    "relations-invariant",
                                    format!("'{name}'{t:?} moved by {gs:?} gives {moved:?}"),
                                );
                            }
                        });
                    }
                    InvarianceMode::Diagonal => {
                        for g in self.group.elements() {
                            let moved: Vec<usize> = t.iter().map(|&x| self.act(g, x)).collect();
                            if !tuples.contains(&moved) {
                                report.push(
                                    "relations-invariant",
                                    format!("'{name}'{t:?} moved by {g} gives {moved:?}"),
                                );
                            }
                        }
                    }
                }
            }
        }

        for (name, table) in &self.functions {
            let arity = self.sig.function_arity(name).unwrap_or(0);
            each_tuple(n, arity, |args| {
                let value = table[self.table_index(args)];
                for g in self.group.elements() {
                    let moved: Vec<usize> = args.iter().map(|&x| self.act(g, x)).collect();
                    if table[self.table_index(&moved)] != self.act(g, value) {
                        report.push(
                            "functions-equivariant",
                            format!("'{name}'{args:?} under {g}"),
                        );
                    }
                }
            });
        }
        report
    }

    /// The coordinatewise equivariance law for every function symbol:
    /// moving the i-th argument by g_i multiplies the value by the
    /// product of all the g_i. Needed before orbits can interpret
    /// function symbols.
    pub fn check_strong_equivariance(&self) -> CheckReport {
        let mut report = CheckReport::new("strong-equivariance")
            .bound("group-order", self.group.order().to_string());
        let order = self.group.order();
        for (name, table) in &self.functions {
            let arity = self.sig.function_arity(name).unwrap_or(0);
            each_tuple(self.universe_size, arity, |args| {
                let value = table[self.table_index(args)];
                each_tuple(order, arity, |gs| {
                    let moved: Vec<usize> =
                        args.iter().zip(gs).map(|(&x, &g)| self.act(g, x)).collect();
                    let combined = gs.iter().fold(self.group.identity, |acc, &g| self.group.mul(acc, g));
                    if table[self.table_index(&moved)] != self.act(combined, value) {
                        report.push(
                            "coordinatewise-equivariance",
                            format!("'{name}'{args:?} moved by {gs:?}"),
                        );
                    }
                });
            });
        }
        report
    }

    pub fn eval_term(
        &self,
        term: &Term,
        assignment: &BTreeMap<usize, usize>,
    ) -> Result<usize, EvalError> {
        self.check_assignment(assignment)?;
        let env = Bindings { base: assignment, stack: Vec::new() };
        self.eval_term_env(term, &env)
    }

    /// Classical satisfaction; quantifiers range over the universe.
    pub fn satisfies(
        &self,
        phi: &Formula,
        assignment: &BTreeMap<usize, usize>,
    ) -> Result<bool, EvalError> {
        self.check_assignment(assignment)?;
        let mut env = Bindings { base: assignment, stack: Vec::new() };
        self.satisfies_env(phi, &mut env)
    }

    fn check_assignment(&self, assignment: &BTreeMap<usize, usize>) -> Result<(), EvalError> {
        for &value in assignment.values() {
            if value >= self.universe_size {
                return Err(EvalError::OutOfUniverse {
                    element: value,
                    universe_size: self.universe_size,
                });
            }
        }
        Ok(())
    }

    fn eval_term_env(&self, term: &Term, env: &Bindings<'_>) -> Result<usize, EvalError> {
        match term {
            Term::Var(v) => env.lookup(*v).ok_or(EvalError::UnassignedVariable(*v)),
            Term::Const(name) => self.constant(name),
            Term::App(name, args) => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.eval_term_env(a, env)?);
                }
                self.apply_function(name, &values)
            }
        }
    }

    fn satisfies_env(&self, phi: &Formula, env: &mut Bindings<'_>) -> Result<bool, EvalError> {
        match phi {
            Formula::Eq(t, s) => Ok(self.eval_term_env(t, env)? == self.eval_term_env(s, env)?),
            Formula::Rel(name, args) => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.eval_term_env(a, env)?);
                }
                self.relation_holds(name, &values)
            }
            Formula::And(a, b) => {
                let va = self.satisfies_env(a, env)?;
                let vb = self.satisfies_env(b, env)?;
                Ok(va && vb)
            }
            Formula::Or(a, b) => {
                let va = self.satisfies_env(a, env)?;
                let vb = self.satisfies_env(b, env)?;
                Ok(va || vb)
            }
            Formula::Not(x) => Ok(!self.satisfies_env(x, env)?),
            Formula::Implies(a, b) => {
                let va = self.satisfies_env(a, env)?;
                let vb = self.satisfies_env(b, env)?;
                Ok(!va || vb)
            }
            Formula::Exists(v, body) => {
                for u in self.elements() {
                    env.stack.push((*v, u));
                    let holds = self.satisfies_env(body, env);
                    env.stack.pop();
                    if holds? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(v, body) => {
                for u in self.elements() {
                    env.stack.push((*v, u));
                    let holds = self.satisfies_env(body, env);
                    env.stack.pop();
                    if !holds? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

struct Bindings<'a> {
    base: &'a BTreeMap<usize, usize>,
    stack: Vec<(usize, usize)>,
}

impl Bindings<'_> {
    fn lookup(&self, var: usize) -> Option<usize> {
        self.stack
            .iter()
            .rev()
            .find(|(v, _)| *v == var)
            .map(|(_, value)| *value)
            .or_else(|| self.base.get(&var).copied())
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::{simplex_boundary, two_points_swapped};
    use super::*;
    use crate::logic::{parse_formula, parse_signature};

    #[test]
    fn simplex_boundary_is_invariant_diagonally_but_not_componentwise() {
        let diagonal = simplex_boundary(InvarianceMode::Diagonal);
        assert!(diagonal.validate().is_ok());
        let componentwise = simplex_boundary(InvarianceMode::Componentwise);
        let report = componentwise.validate();
        assert!(report.violations.iter().any(|v| v.rule == "relations-invariant"));
    }

    #[test]
    fn swapped_relation_must_cover_the_orbit() {
        assert!(two_points_swapped(&[0, 1]).validate().is_ok());
        assert!(two_points_swapped(&[]).validate().is_ok());
        let half = two_points_swapped(&[1]);
        assert!(half.validate().violations.iter().any(|v| v.rule == "relations-invariant"));
    }

    #[test]
    fn constants_must_stay_inside_the_constant_set() {
        let sig = parse_signature("const c const d").unwrap();
        let mut m = GStructure::plain(sig, 2);
        m.group = FiniteGroup::cyclic(2);
        m.action = vec![vec![0, 1], vec![1, 0]];
        m.constants.insert(String::from("c"), 0);
        m.constants.insert(String::from("d"), 1);
        assert!(m.validate().is_ok(), "the swap permutes the constant set");
        m.constants.insert(String::from("d"), 0);
        let report = m.validate();
        assert!(report.violations.iter().any(|v| v.rule == "constants-invariant"));
    }

    #[test]
    fn broken_action_tables_are_reported() {
        let sig = parse_signature("rel R/1").unwrap();
        let mut m = GStructure::plain(sig, 2);
        m.relations.insert(String::from("R"), BTreeSet::new());
        m.group = FiniteGroup::cyclic(2);
        m.action = vec![vec![0, 1], vec![1, 1]];
        let report = m.validate();
        assert!(report.violations.iter().any(|v| v.rule == "action-composition"));
    }

    #[test]
    fn equivariant_functions_pass_and_others_fail() {
        let sig = parse_signature("fun f/1").unwrap();
        let mut m = GStructure::plain(sig, 2);
        m.group = FiniteGroup::cyclic(2);
        m.action = vec![vec![0, 1], vec![1, 0]];
        m.functions.insert(String::from("f"), vec![1, 0]);
        assert!(m.validate().is_ok(), "the swap commutes with itself");
        m.functions.insert(String::from("f"), vec![0, 0]);
        let report = m.validate();
        assert!(report.violations.iter().any(|v| v.rule == "functions-equivariant"));
    }

    #[test]
    fn tarski_satisfaction_on_tiny_structures() {
        let m = two_points_swapped(&[0, 1]);
        let sig = m.sig.clone();
        let empty = BTreeMap::new();
        let tauto = parse_formula("forall v0 v0 = v0", &sig).unwrap();
        assert_eq!(m.satisfies(&tauto, &empty), Ok(true));

        let half = two_points_swapped(&[1]);
        let some = parse_formula("exists v0 R(v0)", &sig).unwrap();
        let every = parse_formula("forall v0 R(v0)", &sig).unwrap();
        assert_eq!(half.satisfies(&some, &empty), Ok(true));
        assert_eq!(half.satisfies(&every, &empty), Ok(false));

        let boundary = simplex_boundary(InvarianceMode::Diagonal);
        let proper = parse_formula(
            "exists v0 exists v1 (sub(v0, v1) & !v0 = v1)",
            &boundary.sig,
        )
        .unwrap();
        assert_eq!(boundary.satisfies(&proper, &empty), Ok(true));
    }

    #[test]
    fn term_evaluation_and_its_errors() {
        let sig = parse_signature("fun f/1 const c").unwrap();
        let mut m = GStructure::plain(sig.clone(), 2);
        m.functions.insert(String::from("f"), vec![1, 0]);
        m.constants.insert(String::from("c"), 1);
        assert!(m.validate().is_ok());

        let nested = parse_formula("f(f(v0)) = v0", &sig).unwrap();
        let assignment: BTreeMap<usize, usize> = [(0, 0)].into_iter().collect();
        assert_eq!(m.satisfies(&nested, &assignment), Ok(true));

        let c = Term::Const(String::from("c"));
        assert_eq!(m.eval_term(&c, &BTreeMap::new()), Ok(1));
        let v = Term::Var(3);
        assert_eq!(m.eval_term(&v, &BTreeMap::new()), Err(EvalError::UnassignedVariable(3)));
        let stray = Term::Const(String::from("q"));
        assert_eq!(
            m.eval_term(&stray, &BTreeMap::new()),
            Err(EvalError::UnknownSymbol(String::from("q")))
        );
        let out: BTreeMap<usize, usize> = [(0, 9)].into_iter().collect();
        assert!(matches!(m.eval_term(&v, &out), Err(EvalError::OutOfUniverse { .. })));
    }

    #[test]
    fn missing_interpretations_are_shape_violations() {
        let sig = parse_signature("rel R/1 fun f/2 const c").unwrap();
        let m = GStructure::plain(sig, 2);
        let report = m.validate();
        assert!(report.violations.iter().any(|v| v.rule == "relations-interpreted"));
        assert!(report.violations.iter().any(|v| v.rule == "functions-interpreted"));
        assert!(report.violations.iter().any(|v| v.rule == "constants-interpreted"));

        let mut stray = GStructure::plain(Signature::empty(), 1);
        stray.constants.insert(String::from("ghost"), 0);
        let report = stray.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.rule == "interpretation-matches-signature"));
    }

    #[test]
    fn the_two_function_laws_are_incomparable_on_binary_symbols() {
        let sig = parse_signature("fun m/2").unwrap();
        let c2 = FiniteGroup::cyclic(2);
        let mut xor = GStructure::plain(sig.clone(), 2);
        xor.group = c2.clone();
        xor.action = vec![vec![0, 1], vec![1, 0]];
        xor.functions.insert(String::from("m"), vec![0, 1, 1, 0]);
        let report = xor.validate();
        assert!(!report.is_ok(), "applying the swap to both arguments cancels out");
        assert!(report.violations.iter().all(|v| v.rule == "functions-equivariant"));
        assert!(xor.check_strong_equivariance().is_ok());

        let mut first = GStructure::plain(sig, 2);
        first.group = c2;
        first.action = vec![vec![0, 1], vec![1, 0]];
        first.functions.insert(String::from("m"), vec![0, 0, 1, 1]);
        assert!(first.validate().is_ok(), "projection commutes with a single g");
        let report = first.check_strong_equivariance();
        assert!(report.violations.iter().any(|v| v.rule == "coordinatewise-equivariance"));
    }
}
