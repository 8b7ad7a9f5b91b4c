//! Point and open forcing over presheaves of structures.
//!
//! `forces_at` evaluates the clause-by-clause semantics: an atom holds at
//! a point when some neighbourhood satisfies it outright, a negation when
//! some neighbourhood refutes the body everywhere, and so on. Every
//! existential search over neighbourhoods runs through the opens between
//! the minimal neighbourhood of the point and the section's domain,
//! largest first, and keeps the first witness, so witness trails are
//! deterministic. Universal quantifiers come in two readings: `literal`
//! draws counterexample elements only from the chosen neighbourhood,
//! `local` (the default) from every smaller open as well.

mod engine;
mod generic;
mod properties;

pub use engine::{sweep_theorem, SweepDivergence, SweepOutcome};
pub use generic::{
    check_double_negation, check_double_negation_with, check_generic_model_theorem, generic_model,
    is_generic_filter, GenericModel, GenericityFailure, GenericityReport,
};
pub use properties::{
    check_classical_points, check_covering, check_existential_covering, check_fast_path,
    check_forcing_sets_open, check_germ_invariance, check_local_semantics,
    check_maximal_filters_generic, check_positive_collapse, check_restriction_monotonicity,
};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::logic::{free_variables, Formula, Signature, Term};
use crate::presheaf::{GPresheaf, Section};
use crate::report::CheckReport;
use crate::topology::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum SemanticsMode {
    /// Universal quantifiers range over the chosen neighbourhood only.
    Literal,
    /// Universal quantifiers also range over every smaller open.
    #[default]
    Local,
}

impl SemanticsMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SemanticsMode::Literal => "literal",
            SemanticsMode::Local => "local",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForcingError {
    /// The section's domain is not a nonempty open of the space.
    UnknownOpen(PointSet),
    PointOutsideDomain { point: usize, domain: PointSet },
    SectionOutOfRange { position: usize, value: usize, universe_size: usize },
    /// A free variable with no section component.
    UnboundVariable(usize),
    UnknownSymbol(String),
    PositivityRequired,
}

impl fmt::Display for ForcingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingError::UnknownOpen(u) => write!(f, "{u} is not a nonempty open of the space"),
            ForcingError::PointOutsideDomain { point, domain } => {
                write!(f, "point {point} lies outside the section domain {domain}")
            }
            ForcingError::SectionOutOfRange { position, value, universe_size } => write!(
                f,
                "section component {position} is {value} in a universe of {universe_size}"
            ),
            ForcingError::UnboundVariable(v) => {
                write!(f, "v{v} is free but the section has no component for it")
            }
            ForcingError::UnknownSymbol(name) => {
                write!(f, "symbol {name} is not in the signature")
            }
            ForcingError::PositivityRequired => {
                write!(f, "this check is only defined for positive formulas")
            }
        }
    }
}

type Env = BTreeMap<usize, usize>;

/// Forcing evaluator for one presheaf.
///
/// Verdicts inside a single query are memoized per (subformula, domain,
/// point, relevant bindings); the cache is dropped at the start of the
/// next query.
pub struct Evaluator<'a> {
    pub presheaf: &'a GPresheaf,
    pub mode: SemanticsMode,
    /// Check only the minimal neighbourhood in the clauses where the
    /// neighbourhood condition is antitone.
    pub fast_path: bool,
    derived: BTreeMap<(PointSet, PointSet), Vec<usize>>,
    opens_desc: Vec<PointSet>,
    memo: BTreeMap<(usize, u32, usize, Vec<(usize, usize)>), bool>,
    fv: BTreeMap<usize, Vec<usize>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(presheaf: &'a GPresheaf, mode: SemanticsMode) -> Evaluator<'a> {
        let mut opens_desc: Vec<PointSet> = presheaf.space.nonempty_opens().collect();
        opens_desc.sort_by_key(|u| (usize::MAX - u.len(), u.bits()));
        Evaluator {
            presheaf,
            mode,
            fast_path: false,
            derived: presheaf.derived_restrictions(),
            opens_desc,
            memo: BTreeMap::new(),
            fv: BTreeMap::new(),
        }
    }

    pub fn with_fast_path(presheaf: &'a GPresheaf, mode: SemanticsMode) -> Evaluator<'a> {
        let mut ev = Evaluator::new(presheaf, mode);
        ev.fast_path = true;
        ev
    }

    pub fn forces_at(&mut self, x: usize, phi: &Formula, s: &Section) -> Result<bool, ForcingError> {
        self.check_query(phi, s)?;
        if !s.domain.contains(x) {
            return Err(ForcingError::PointOutsideDomain { point: x, domain: s.domain });
        }
        self.begin_query();
        Ok(self.force(x, phi, s.domain, &positional_env(s)))
    }

    /// Forcing on an open: at every one of its points.
    pub fn forces_on(&mut self, u: PointSet, phi: &Formula, s: &Section) -> Result<bool, ForcingError> {
        Ok(self.forcing_set(u, phi, s)? == u)
    }

    /// The points of `u` at which the formula is forced.
    pub fn forcing_set(
        &mut self,
        u: PointSet,
        phi: &Formula,
        s: &Section,
    ) -> Result<PointSet, ForcingError> {
        self.check_query(phi, s)?;
        if !self.presheaf.space.is_open(u) {
            return Err(ForcingError::UnknownOpen(u));
        }
        if !u.is_subset(s.domain) {
            return Err(ForcingError::PointOutsideDomain {
                point: u.difference(s.domain).iter().next().expect("the difference is inhabited"),
                domain: s.domain,
            });
        }
        self.begin_query();
        let env = positional_env(s);
        Ok(PointSet::from_points(u.iter().filter(|&x| self.force(x, phi, s.domain, &env))))
    }

    fn begin_query(&mut self) {
        self.memo.clear();
        self.fv.clear();
    }

    fn check_query(&self, phi: &Formula, s: &Section) -> Result<(), ForcingError> {
        let m = self.presheaf.objects.get(&s.domain).ok_or(ForcingError::UnknownOpen(s.domain))?;
        for (position, &value) in s.values.iter().enumerate() {
            if value >= m.universe_size {
                return Err(ForcingError::SectionOutOfRange {
                    position,
                    value,
                    universe_size: m.universe_size,
                });
            }
        }
        if let Some(&v) = free_variables(phi).iter().find(|&&v| v >= s.values.len()) {
            return Err(ForcingError::UnboundVariable(v));
        }
        check_symbols(&m.sig, phi)
    }

    fn force(&mut self, x: usize, phi: &Formula, domain: PointSet, env: &Env) -> bool {
        let ptr = phi as *const Formula as usize;
        let relevant = self.fv.entry(ptr).or_insert_with(|| {
            free_variables(phi).into_iter().collect()
        });
        let key: Vec<(usize, usize)> = relevant.iter().map(|&v| (v, env[&v])).collect();
        let memo_key = (ptr, domain.bits(), x, key);
        if let Some(&verdict) = self.memo.get(&memo_key) {
            return verdict;
        }
        let verdict = match phi {
            Formula::Eq(..) | Formula::Rel(..) => {
                self.neighbourhood_search(x, domain, env, true, |ev, v, env_v| {
                    ev.classically_satisfies(v, phi, env_v)
                })
            }
            Formula::And(a, b) => {
                self.force(x, a, domain, env) && self.force(x, b, domain, env)
            }
            Formula::Or(a, b) => {
                self.force(x, a, domain, env) || self.force(x, b, domain, env)
            }
            Formula::Not(inner) => {
                self.neighbourhood_search(x, domain, env, true, |ev, v, env_v| {
                    v.iter().all(|y| !ev.force(y, inner, v, env_v))
                })
            }
            Formula::Implies(a, b) => {
                self.neighbourhood_search(x, domain, env, true, |ev, v, env_v| {
                    v.iter().all(|y| !ev.force(y, a, v, env_v) || ev.force(y, b, v, env_v))
                })
            }
            Formula::Exists(w, body) => {
                self.neighbourhood_search(x, domain, env, false, |ev, v, env_v| {
                    let size = ev.presheaf.objects[&v].universe_size;
                    (0..size).any(|b| {
                        let mut ext = env_v.clone();
                        ext.insert(*w, b);
                        ev.force(x, body, v, &ext)
                    })
                })
            }
            Formula::Forall(w, body) => match self.mode {
                SemanticsMode::Literal => {
                    self.neighbourhood_search(x, domain, env, false, |ev, v, env_v| {
                        let size = ev.presheaf.objects[&v].universe_size;
                        v.iter().all(|y| {
                            (0..size).all(|b| {
                                let mut ext = env_v.clone();
                                ext.insert(*w, b);
                                ev.force(y, body, v, &ext)
                            })
                        })
                    })
                }
                SemanticsMode::Local => {
                    self.neighbourhood_search(x, domain, env, true, |ev, v, env_v| {
                        let smaller: Vec<PointSet> =
                            ev.opens_desc.iter().copied().filter(|w2| w2.is_subset(v)).collect();
                        smaller.into_iter().all(|w2| {
                            let env_w = ev.restrict_env(env_v, v, w2);
                            let size = ev.presheaf.objects[&w2].universe_size;
                            w2.iter().all(|y| {
                                (0..size).all(|b| {
                                    let mut ext = env_w.clone();
                                    ext.insert(*w, b);
                                    ev.force(y, body, w2, &ext)
                                })
                            })
                        })
                    })
                }
            },
        };
        self.memo.insert(memo_key, verdict);
        verdict
    }

    /// Tries the opens between the minimal neighbourhood of `x` and
    /// `domain`, largest first, accepting the first one the condition
    /// holds on. With the fast path, antitone conditions are checked on
    /// the minimal neighbourhood only.
    fn neighbourhood_search(
        &mut self,
        x: usize,
        domain: PointSet,
        env: &Env,
        antitone: bool,
        mut condition: impl FnMut(&mut Self, PointSet, &Env) -> bool,
    ) -> bool {
        if self.fast_path && antitone {
            let v = self
                .presheaf
                .space
                .min_open_nbhd(x)
                .expect("the query entry checked the point");
            let env_v = self.restrict_env(env, domain, v);
            return condition(self, v, &env_v);
        }
        let candidates: Vec<PointSet> = self
            .opens_desc
            .iter()
            .copied()
            .filter(|v| v.contains(x) && v.is_subset(domain))
            .collect();
        for v in candidates {
            let env_v = self.restrict_env(env, domain, v);
            if condition(self, v, &env_v) {
                return true;
            }
        }
        false
    }

    fn restrict_env(&self, env: &Env, from: PointSet, to: PointSet) -> Env {
        if to == from {
            return env.clone();
        }
        let map = &self.derived[&(to, from)];
        env.iter().map(|(&var, &value)| (var, map[value])).collect()
    }

    fn classically_satisfies(&self, v: PointSet, phi: &Formula, env: &Env) -> bool {
        self.presheaf.objects[&v]
            .satisfies(phi, env)
            .expect("symbols and bindings checked at the query entry")
    }
}

fn positional_env(s: &Section) -> Env {
    s.values.iter().enumerate().map(|(i, &value)| (i, value)).collect()
}

fn check_symbols(sig: &Signature, phi: &Formula) -> Result<(), ForcingError> {
    fn term(sig: &Signature, t: &Term) -> Result<(), ForcingError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) => {
                if sig.constants().contains(c) {
                    Ok(())
                } else {
                    Err(ForcingError::UnknownSymbol(c.clone()))
                }
            }
            Term::App(f, args) => {
                if sig.function_arity(f) != Some(args.len()) {
                    return Err(ForcingError::UnknownSymbol(f.clone()));
                }
                args.iter().try_for_each(|a| term(sig, a))
            }
        }
    }
    match phi {
        Formula::Eq(t, s) => {
            term(sig, t)?;
            term(sig, s)
        }
        Formula::Rel(name, args) => {
            if sig.relation_arity(name) != Some(args.len()) {
                return Err(ForcingError::UnknownSymbol(name.clone()));
            }
            args.iter().try_for_each(|a| term(sig, a))
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            check_symbols(sig, a)?;
            check_symbols(sig, b)
        }
        Formula::Not(inner) | Formula::Exists(_, inner) | Formula::Forall(_, inner) => {
            check_symbols(sig, inner)
        }
    }
}

pub fn forces_at(
    p: &GPresheaf,
    mode: SemanticsMode,
    x: usize,
    phi: &Formula,
    s: &Section,
) -> Result<bool, ForcingError> {
    Evaluator::new(p, mode).forces_at(x, phi, s)
}

pub fn forces_on(
    p: &GPresheaf,
    mode: SemanticsMode,
    u: PointSet,
    phi: &Formula,
    s: &Section,
) -> Result<bool, ForcingError> {
    Evaluator::new(p, mode).forces_on(u, phi, s)
}

pub fn forcing_set(
    p: &GPresheaf,
    mode: SemanticsMode,
    u: PointSet,
    phi: &Formula,
    s: &Section,
) -> Result<PointSet, ForcingError> {
    Evaluator::new(p, mode).forcing_set(u, phi, s)
}

/// One clause choice along the successful branch of a forcing query:
/// which neighbourhood was picked, and for an existential, which element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub clause: String,
    pub point: usize,
    pub domain: PointSet,
    pub open: PointSet,
    pub element: Option<usize>,
    pub subformula: String,
    pub bindings: Vec<(usize, usize)>,
}

/// A forcing verdict together with the trail of clause choices that
/// produced it. The trail is empty when the formula is not forced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcingVerdict {
    pub mode: SemanticsMode,
    pub point: usize,
    pub formula: Formula,
    pub section: Section,
    pub forced: bool,
    pub witnesses: Vec<WitnessStep>,
}

/// Evaluates and, when the formula is forced, records which open (and
/// element, for existentials) each decided clause used.
pub fn explain_at(
    p: &GPresheaf,
    mode: SemanticsMode,
    x: usize,
    phi: &Formula,
    s: &Section,
) -> Result<ForcingVerdict, ForcingError> {
    let mut ev = Evaluator::new(p, mode);
    let forced = ev.forces_at(x, phi, s)?;
    let mut witnesses = Vec::new();
    if forced {
        trail(&mut ev, x, phi, s.domain, &positional_env(s), &mut witnesses);
    }
    Ok(ForcingVerdict { mode, point: x, formula: phi.clone(), section: s.clone(), forced, witnesses })
}

impl ForcingVerdict {
    /// Recomputes the verdict and replays the recorded trail against the
    /// clause definitions. True when both survive.
    pub fn reverify(&self, p: &GPresheaf) -> Result<bool, ForcingError> {
        let mut ev = Evaluator::new(p, self.mode);
        let forced = ev.forces_at(self.point, &self.formula, &self.section)?;
        if forced != self.forced {
            return Ok(false);
        }
        if !self.forced {
            return Ok(self.witnesses.is_empty());
        }
        let mut cursor = 0;
        let good = check_trail(
            &mut ev,
            self.point,
            &self.formula,
            self.section.domain,
            &positional_env(&self.section),
            &self.witnesses,
            &mut cursor,
        );
        Ok(good && cursor == self.witnesses.len())
    }
}

fn record(
    steps: &mut Vec<WitnessStep>,
    clause: &str,
    point: usize,
    domain: PointSet,
    open: PointSet,
    element: Option<usize>,
    phi: &Formula,
    env: &Env,
) {
    steps.push(WitnessStep {
        clause: clause.to_string(),
        point,
        domain,
        open,
        element,
        subformula: phi.to_string(),
        bindings: env.iter().map(|(&v, &a)| (v, a)).collect(),
    });
}

/// Walks the successful branch of a true verdict, recording the first
/// neighbourhood each clause accepts. Precondition: the formula is
/// forced at `x` under `env`.
fn trail(
    ev: &mut Evaluator, x: usize, phi: &Formula, domain: PointSet, env: &Env,
    steps: &mut Vec<WitnessStep>,
) {
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => {
            let (v, env_v) = first_open(ev, x, domain, env, true, |ev, v, env_v| {
                ev.classically_satisfies(v, phi, env_v)
            });
            record(steps, "atomic", x, domain, v, None, phi, &env_v);
        }
        Formula::And(a, b) => {
            trail(ev, x, a, domain, env, steps);
            trail(ev, x, b, domain, env, steps);
        }
        Formula::Or(a, b) => {
            if ev.force(x, a, domain, env) {
                record(steps, "or-left", x, domain, domain, None, phi, env);
                trail(ev, x, a, domain, env, steps);
            } else {
                record(steps, "or-right", x, domain, domain, None, phi, env);
                trail(ev, x, b, domain, env, steps);
            }
        }
        Formula::Not(inner) => {
            let (v, env_v) = first_open(ev, x, domain, env, true, |ev, v, env_v| {
                v.iter().all(|y| !ev.force(y, inner, v, env_v))
            });
            record(steps, "negation", x, domain, v, None, phi, &env_v);
        }
        Formula::Implies(a, b) => {
            let (v, env_v) = first_open(ev, x, domain, env, true, |ev, v, env_v| {
                v.iter().all(|y| !ev.force(y, a, v, env_v) || ev.force(y, b, v, env_v))
            });
            record(steps, "implication", x, domain, v, None, phi, &env_v);
        }
        Formula::Exists(w, body) => {
            let (v, env_v) = first_open(ev, x, domain, env, false, |ev, v, env_v| {
                let size = ev.presheaf.objects[&v].universe_size;
                (0..size).any(|b| {
                    let mut ext = env_v.clone();
                    ext.insert(*w, b);
                    ev.force(x, body, v, &ext)
                })
            });
            let size = ev.presheaf.objects[&v].universe_size;
            let chosen = (0..size)
                .find(|&b| {
                    let mut ext = env_v.clone();
                    ext.insert(*w, b);
                    ev.force(x, body, v, &ext)
                })
                .expect("the accepted neighbourhood has a witness");
            let mut ext = env_v.clone();
            ext.insert(*w, chosen);
            record(steps, "exists", x, domain, v, Some(chosen), phi, &ext);
            trail(ev, x, body, v, &ext, steps);
        }
        Formula::Forall(w, body) => match ev.mode {
            SemanticsMode::Literal => {
                let (v, env_v) = first_open(ev, x, domain, env, false, |ev, v, env_v| {
                    let size = ev.presheaf.objects[&v].universe_size;
                    v.iter().all(|y| {
                        (0..size).all(|b| {
                            let mut ext = env_v.clone();
                            ext.insert(*w, b);
                            ev.force(y, body, v, &ext)
                        })
                    })
                });
                record(steps, "forall", x, domain, v, None, phi, &env_v);
            }
            SemanticsMode::Local => {
                let (v, env_v) = first_open(ev, x, domain, env, true, |ev, v, env_v| {
                    local_forall_holds(ev, v, env_v, *w, body)
                });
                record(steps, "forall-local", x, domain, v, None, phi, &env_v);
            }
        },
    }
}

fn first_open(
    ev: &mut Evaluator,
    x: usize,
    domain: PointSet,
    env: &Env,
    antitone: bool,
    mut condition: impl FnMut(&mut Evaluator, PointSet, &Env) -> bool,
) -> (PointSet, Env) {
    if ev.fast_path && antitone {
        let v = ev.presheaf.space.min_open_nbhd(x).expect("point was checked");
        let env_v = ev.restrict_env(env, domain, v);
        assert!(condition(ev, v, &env_v), "the verdict was already established");
        return (v, env_v);
    }
    let candidates: Vec<PointSet> = ev
        .opens_desc
        .iter()
        .copied()
        .filter(|v| v.contains(x) && v.is_subset(domain))
        .collect();
    for v in candidates {
        let env_v = ev.restrict_env(env, domain, v);
        if condition(ev, v, &env_v) {
            return (v, env_v);
        }
    }
    unreachable!("the verdict was already established")
}

fn local_forall_holds(ev: &mut Evaluator, v: PointSet, env_v: &Env, w: usize, body: &Formula) -> bool {
    let smaller: Vec<PointSet> = ev.opens_desc.iter().copied().filter(|u| u.is_subset(v)).collect();
    smaller.into_iter().all(|u| {
        let env_u = ev.restrict_env(env_v, v, u);
        let size = ev.presheaf.objects[&u].universe_size;
        u.iter().all(|y| {
            (0..size).all(|b| {
                let mut ext = env_u.clone();
                ext.insert(w, b);
                ev.force(y, body, u, &ext)
            })
        })
    })
}

fn check_trail(
    ev: &mut Evaluator, x: usize, phi: &Formula, domain: PointSet, env: &Env,
    steps: &[WitnessStep], cursor: &mut usize,
) -> bool {
    let take = |cursor: &mut usize| -> Option<usize> {
        let i = *cursor;
        *cursor += 1;
        (i < steps.len()).then_some(i)
    };
    let open_ok = |step: &WitnessStep| step.open.contains(x) && step.open.is_subset(domain);
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => {
            let Some(i) = take(cursor) else { return false };
            let step = &steps[i];
            let env_v = ev.restrict_env(env, domain, step.open);
            step.clause == "atomic" && open_ok(step) && ev.classically_satisfies(step.open, phi, &env_v)
        }
        Formula::And(a, b) => {
            check_trail(ev, x, a, domain, env, steps, cursor)
                && check_trail(ev, x, b, domain, env, steps, cursor)
        }
        Formula::Or(a, b) => {
            let Some(i) = take(cursor) else { return false };
            let side = match steps[i].clause.as_str() {
                "or-left" => a,
                "or-right" => b,
                _ => return false,
            };
            ev.begin_query();
            ev.force(x, side, domain, env) && check_trail(ev, x, side, domain, env, steps, cursor)
        }
        Formula::Not(inner) => {
            let Some(i) = take(cursor) else { return false };
            let step = &steps[i];
            if step.clause != "negation" || !open_ok(step) {
                return false;
            }
            let env_v = ev.restrict_env(env, domain, step.open);
            ev.begin_query();
            step.open.iter().all(|y| !ev.force(y, inner, step.open, &env_v))
        }
        Formula::Implies(a, b) => {
            let Some(i) = take(cursor) else { return false };
            let step = &steps[i];
            if step.clause != "implication" || !open_ok(step) {
                return false;
            }
            let env_v = ev.restrict_env(env, domain, step.open);
            ev.begin_query();
            step.open
                .iter()
                .all(|y| !ev.force(y, a, step.open, &env_v) || ev.force(y, b, step.open, &env_v))
        }
        Formula::Exists(w, body) => {
            let Some(i) = take(cursor) else { return false };
            let step = &steps[i];
            let Some(b) = step.element else { return false };
            if step.clause != "exists" || !open_ok(step) {
                return false;
            }
            if b >= ev.presheaf.objects[&step.open].universe_size {
                return false;
            }
            let mut ext = ev.restrict_env(env, domain, step.open);
            ext.insert(*w, b);
            let open = step.open;
            check_trail(ev, x, body, open, &ext, steps, cursor)
        }
        Formula::Forall(w, body) => {
            let Some(i) = take(cursor) else { return false };
            let step = &steps[i];
            if !open_ok(step) {
                return false;
            }
            let env_v = ev.restrict_env(env, domain, step.open);
            ev.begin_query();
            match ev.mode {
                SemanticsMode::Literal => {
                    if step.clause != "forall" {
                        return false;
                    }
                    let size = ev.presheaf.objects[&step.open].universe_size;
                    let open = step.open;
                    open.iter().all(|y| {
                        (0..size).all(|b| {
                            let mut ext = env_v.clone();
                            ext.insert(*w, b);
                            ev.force(y, body, open, &ext)
                        })
                    })
                }
                SemanticsMode::Local => {
                    step.clause == "forall-local" && local_forall_holds(ev, step.open, &env_v, *w, body)
                }
            }
        }
    }
}

/// Greedy maximal extension for an existential forced on an open: climbs
/// the poset of (open, witness) pairs, where (V, b) precedes (W, b') when
/// V is contained in W and b' restricts to b, and returns the section the
/// climb stops at. On an exact presheaf the resulting open is dense in
/// the query open; a failure of either postcondition is reported rather
/// than returned.
pub fn maximum_principle_witness(
    p: &GPresheaf,
    mode: SemanticsMode,
    u: PointSet,
    phi: &Formula,
    s: &Section,
) -> Result<Section, CheckReport> {
    let mut report = CheckReport::new("maximum-principle")
        .bound("open", u.to_string())
        .bound("mode", alloc::string::String::from(mode.as_str()));
    if s.domain != u {
        report.push("section-domain", alloc::format!("section over {}, query on {u}", s.domain));
        return Err(report);
    }
    let exactness = crate::presheaf::is_exact(p);
    if !exactness.is_ok() {
        report.absorb("exactness", exactness);
        return Err(report);
    }
    let fresh = s.values.len();
    let premise = Formula::Exists(fresh, alloc::boxed::Box::new(phi.clone()));
    let mut ev = Evaluator::new(p, mode);
    match ev.forces_on(u, &premise, s) {
        Ok(true) => {}
        Ok(false) => {
            report.push("premise", alloc::format!("{premise} is not forced on {u}"));
            return Err(report);
        }
        Err(e) => {
            report.push("query", e.to_string());
            return Err(report);
        }
    }
    let derived = p.derived_restrictions();
    let holds = |v: PointSet, b: usize, ev: &mut Evaluator| -> bool {
        let mut values = p.restrict_section(s, v).expect("v is an open inside u").values;
        values.push(b);
        ev.forces_on(v, phi, &Section { domain: v, values }).unwrap_or(false)
    };
    let mut opens_asc: Vec<PointSet> =
        p.space.nonempty_opens().filter(|v| v.is_subset(u)).collect();
    opens_asc.sort_by_key(|v| (v.len(), v.bits()));
    let mut current: Option<(PointSet, usize)> = None;
    'start: for &v in &opens_asc {
        for b in 0..p.objects[&v].universe_size {
            if holds(v, b, &mut ev) {
                current = Some((v, b));
                break 'start;
            }
        }
    }
    let (mut v, mut b) = current.expect("the forced existential has a first witness");
    'climb: loop {
        for &w in &opens_asc {
            if w.len() <= v.len() || !v.is_subset(w) {
                continue;
            }
            let map = &derived[&(v, w)];
            for b2 in 0..p.objects[&w].universe_size {
                if map[b2] == b && holds(w, b2, &mut ev) {
                    v = w;
                    b = b2;
                    continue 'climb;
                }
            }
        }
        break;
    }
    if !p.space.is_dense(v, u).unwrap_or(false) {
        report.push(
            "density",
            alloc::format!("the maximal witness ({v}, {b}) is not dense in {u}"),
        );
        return Err(report);
    }
    let mut values = p.restrict_section(s, v).expect("v is an open inside u").values;
    values.push(b);
    Ok(Section { domain: v, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::presheaf::fixtures::sierpinski_collapse;
    use alloc::vec;

    fn rel_sig() -> Signature {
        crate::logic::parse_signature("rel R/1").unwrap()
    }

    fn global_section(value: usize) -> Section {
        Section { domain: PointSet::from_bits(0b11), values: vec![value] }
    }

    #[test]
    fn the_worked_example_verdicts() {
        let p = sierpinski_collapse();
        let sig = rel_sig();
        let r = parse_formula("R(v0)", &sig).unwrap();
        let not_r = parse_formula("!R(v0)", &sig).unwrap();
        let not_not_r = parse_formula("!!R(v0)", &sig).unwrap();
        let s = global_section(0);
        let open_point = 0;
        let closed_point = 1;
        let mode = SemanticsMode::Local;

        assert!(forces_at(&p, mode, open_point, &r, &s).unwrap());
        assert!(!forces_at(&p, mode, closed_point, &r, &s).unwrap());
        assert!(!forces_at(&p, mode, closed_point, &not_r, &s).unwrap());
        assert!(forces_at(&p, mode, closed_point, &not_not_r, &s).unwrap());

        let x = p.space.full_set();
        assert!(forces_on(&p, mode, x, &not_not_r, &s).unwrap());
        assert!(!forces_on(&p, mode, x, &r, &s).unwrap());
        assert_eq!(forcing_set(&p, mode, x, &r, &s).unwrap(), PointSet::singleton(0));
        assert_eq!(forcing_set(&p, mode, x, &not_not_r, &s).unwrap(), x);
    }

    #[test]
    fn tautologies_are_forced_everywhere() {
        let p = sierpinski_collapse();
        let sig = rel_sig();
        let taut = parse_formula("forall v0 v0 = v0", &sig).unwrap();
        let empty = Section { domain: p.space.full_set(), values: vec![] };
        for mode in [SemanticsMode::Literal, SemanticsMode::Local] {
            for x in 0..2 {
                assert!(forces_at(&p, mode, x, &taut, &empty).unwrap());
            }
            for u in p.space.nonempty_opens() {
                let s = Section { domain: u, values: vec![] };
                assert!(forces_on(&p, mode, u, &taut, &s).unwrap());
            }
        }
        let vacuous = parse_formula("R(v0) & !R(v0)", &sig).unwrap();
        let s = global_section(1);
        assert_eq!(
            forcing_set(&p, SemanticsMode::Local, p.space.full_set(), &vacuous, &s).unwrap(),
            PointSet::from_bits(0)
        );
    }

    #[test]
    fn query_errors_are_reported() {
        let p = sierpinski_collapse();
        let sig = rel_sig();
        let r = parse_formula("R(v0)", &sig).unwrap();
        let s = global_section(0);
        let mode = SemanticsMode::Local;
        assert_eq!(
            forces_at(&p, mode, 0, &r, &Section { domain: PointSet::singleton(1), values: vec![0] }),
            Err(ForcingError::UnknownOpen(PointSet::singleton(1)))
        );
        let local = Section { domain: PointSet::singleton(0), values: vec![0] };
        assert_eq!(
            forces_at(&p, mode, 1, &r, &local),
            Err(ForcingError::PointOutsideDomain { point: 1, domain: PointSet::singleton(0) })
        );
        assert_eq!(
            forces_at(&p, mode, 0, &r, &Section { domain: s.domain, values: vec![7] }),
            Err(ForcingError::SectionOutOfRange { position: 0, value: 7, universe_size: 2 })
        );
        let unbound = parse_formula("R(v3)", &sig).unwrap();
        assert_eq!(forces_at(&p, mode, 0, &unbound, &s), Err(ForcingError::UnboundVariable(3)));
        let foreign = parse_formula("v0 = v0", &sig).unwrap();
        let bad = Formula::Rel(alloc::string::String::from("Q"), vec![crate::logic::Term::Var(0)]);
        assert!(forces_at(&p, mode, 0, &foreign, &s).is_ok());
        assert_eq!(
            forces_at(&p, mode, 0, &bad, &s),
            Err(ForcingError::UnknownSymbol(alloc::string::String::from("Q")))
        );
    }

    #[test]
    fn fast_path_agrees_on_the_worked_example() {
        let p = sierpinski_collapse();
        let sig = rel_sig();
        let formulas = [
            "R(v0)", "!R(v0)", "!!R(v0)", "R(v0) -> R(v0)", "!R(v0) -> R(v0)",
            "forall v1 R(v1)", "forall v1 v1 = v0", "exists v1 R(v1)",
        ];
        for mode in [SemanticsMode::Literal, SemanticsMode::Local] {
            let mut slow = Evaluator::new(&p, mode);
            let mut fast = Evaluator::with_fast_path(&p, mode);
            for text in formulas {
                let phi = parse_formula(text, &sig).unwrap();
                for value in 0..2 {
                    let s = global_section(value);
                    for x in 0..2 {
                        assert_eq!(
                            slow.forces_at(x, &phi, &s).unwrap(),
                            fast.forces_at(x, &phi, &s).unwrap(),
                            "{text} at {x} with section {value} in {} mode",
                            mode.as_str()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn witness_trails_replay() {
        let p = sierpinski_collapse();
        let sig = rel_sig();
        let s = global_section(0);
        for text in [
            "R(v0)", "!!R(v0)", "exists v1 R(v1)", "R(v0) | !R(v0)",
            "exists v1 (R(v1) & v1 = v1)", "forall v1 v1 = v1", "R(v0) -> R(v0)",
        ] {
            let phi = parse_formula(text, &sig).unwrap();
            for x in 0..2 {
                let verdict = explain_at(&p, SemanticsMode::Local, x, &phi, &s).unwrap();
                assert!(verdict.reverify(&p).unwrap(), "{text} at {x}");
                if verdict.forced {
                    assert!(!verdict.witnesses.is_empty(), "{text} at {x} should leave a trail");
                }
            }
        }
        let r = parse_formula("R(v0)", &sig).unwrap();
        let verdict = explain_at(&p, SemanticsMode::Local, 0, &r, &s).unwrap();
        assert_eq!(verdict.witnesses.len(), 1);
        assert_eq!(verdict.witnesses[0].open, PointSet::singleton(0));

        let mut tampered = verdict.clone();
        tampered.witnesses[0].open = p.space.full_set();
        assert!(!tampered.reverify(&p).unwrap(), "the full space does not satisfy R(0)");
    }

    #[test]
    fn the_maximum_principle_on_the_worked_example() {
        let p = sierpinski_collapse();
        let sig = rel_sig();
        let phi = parse_formula("R(v0)", &sig).unwrap();
        let x = p.space.full_set();
        let s = Section { domain: x, values: vec![] };
        let witness = maximum_principle_witness(&p, SemanticsMode::Local, x, &phi, &s).unwrap();
        assert_eq!(witness.domain, x);
        assert_eq!(witness.values, vec![1]);

        let q = PointSet::singleton(0);
        let s_q = Section { domain: q, values: vec![] };
        let witness = maximum_principle_witness(&p, SemanticsMode::Local, q, &phi, &s_q).unwrap();
        assert_eq!(witness.domain, q);
        assert_eq!(witness.values, vec![0]);

        let never = parse_formula("!v0 = v0", &sig).unwrap();
        let err = maximum_principle_witness(&p, SemanticsMode::Local, x, &never, &s).unwrap_err();
        assert!(err.violations.iter().any(|v| v.rule == "premise"));
    }
}
