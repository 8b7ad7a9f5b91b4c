//! Generic filters, the model they induce, and the equivalences that
//! make it a model of the double-negation translation.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Evaluator, ForcingError, SemanticsMode};
use crate::logic::{free_variables, godel_translate, is_positive, stream_formulas, Formula};
use crate::presheaf::{is_sheaf, system_over_opens, GPresheaf, Section};
use crate::report::CheckReport;
use crate::structures::{colimit, Colimit, DirectedSystem, Germ, GStructure};
use crate::topology::{validate_filter, Filter, PointSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericityFailure {
    /// 1 = no member decides the formula, 2 = a forced existential has
    /// no witness on any member.
    pub condition: u8,
    pub member: PointSet,
    pub formula: String,
    pub parameters: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericityReport {
    pub depth: usize,
    pub mode: SemanticsMode,
    pub free_variable_bound: usize,
    pub generic: bool,
    pub failures: Vec<GenericityFailure>,
}

/// Checks the two genericity conditions for every formula up to the
/// depth bound, with parameters drawn one at a time: (1) some member
/// inside each member decides each formula, and (2) every existential
/// forced on a member has a witness on some member.
pub fn is_generic_filter(
    p: &GPresheaf,
    f: &Filter,
    depth: usize,
    mode: SemanticsMode,
) -> Result<GenericityReport, CheckReport> {
    let mut gate = CheckReport::new("genericity");
    if !f.is_nontrivial() {
        gate.push("nontrivial", "the filter contains the empty set");
        return Err(gate);
    }
    let axioms = validate_filter(&p.space, f.members());
    if !axioms.is_ok() {
        gate.absorb("filter", axioms);
        return Err(gate);
    }
    let sig = p.objects.values().next().expect("validated presheaves are inhabited").sig.clone();
    let mut ev = Evaluator::new(p, mode);
    let mut failures = Vec::new();
    for phi in stream_formulas(&sig, depth, 1) {
        let negated = Formula::Not(Box::new(phi.clone()));
        for &u in f.members() {
            let size = p.objects[&u].universe_size;
            let params: Vec<Vec<usize>> = if free_variables(&phi).is_empty() {
                alloc::vec![Vec::new()]
            } else {
                (0..size).map(|a| alloc::vec![a]).collect()
            };
            for values in params {
                let s = Section { domain: u, values: values.clone() };
                let decided = f.members().iter().any(|&v| {
                    v.is_subset(u)
                        && {
                            let rho = p.restrict_section(&s, v).expect("members are opens");
                            ev.forces_on(v, &phi, &rho).unwrap_or(false)
                                || ev.forces_on(v, &negated, &rho).unwrap_or(false)
                        }
                });
                if !decided {
                    failures.push(GenericityFailure {
                        condition: 1,
                        member: u,
                        formula: phi.to_string(),
                        parameters: values.clone(),
                    });
                }
                if let Formula::Exists(w, body) = &phi {
                    let premise = ev.forces_on(u, &phi, &s).unwrap_or(false);
                    if premise {
                        let witnessed = f.members().iter().any(|&v| {
                            v.is_subset(u) && {
                                let rho = p.restrict_section(&s, v).expect("members are opens");
                                let witnesses = p.objects[&v].universe_size;
                                (0..witnesses).any(|b| {
                                    let mut ext = rho.values.clone();
                                    ext.resize(*w, 0);
                                    ext.push(b);
                                    ev.forces_on(v, body, &Section { domain: v, values: ext })
                                        .unwrap_or(false)
                                })
                            }
                        });
                        if !witnessed {
                            failures.push(GenericityFailure {
                                condition: 2,
                                member: u,
                                formula: phi.to_string(),
                                parameters: values.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(GenericityReport {
        depth,
        mode,
        free_variable_bound: 1,
        generic: failures.is_empty(),
        failures,
    })
}

/// The colimit of the structures on a filter's members, smallest member
/// first, so the structure coincides with the one on the core.
#[derive(Debug, Clone)]
pub struct GenericModel {
    pub members: Vec<PointSet>,
    pub system: DirectedSystem,
    pub colimit: Colimit,
}

impl GenericModel {
    pub fn structure(&self) -> &GStructure {
        &self.colimit.structure
    }

    pub fn index_of(&self, u: PointSet) -> Option<usize> {
        self.members.iter().position(|&v| v == u)
    }

    /// The class of an element of the structure on one member.
    pub fn germ(&self, u: PointSet, element: usize) -> Option<Germ> {
        let i = self.index_of(u)?;
        if element >= self.system.objects[i].universe_size {
            return None;
        }
        Some(self.colimit.germ(i, element))
    }

    pub fn germ_of_section(&self, s: &Section) -> Option<Vec<Germ>> {
        s.values.iter().map(|&value| self.germ(s.domain, value)).collect()
    }
}

pub fn generic_model(p: &GPresheaf, f: &Filter) -> Result<GenericModel, CheckReport> {
    let mut gate = CheckReport::new("generic-model");
    if !f.is_nontrivial() {
        gate.push("nontrivial", "the filter contains the empty set");
        return Err(gate);
    }
    let axioms = validate_filter(&p.space, f.members());
    if !axioms.is_ok() {
        gate.absorb("filter", axioms);
        return Err(gate);
    }
    let mut members: Vec<PointSet> = f.members().to_vec();
    members.sort_by_key(|u| (u.len(), u.bits()));
    let system = system_over_opens(p, &members);
    match colimit(&system) {
        Ok(colim) => Ok(GenericModel { members, system, colimit: colim }),
        Err(sub) => {
            gate.absorb("diagram", sub);
            Err(gate)
        }
    }
}

/// Compares, formula by formula, the three readings of truth in the
/// generic model: classical satisfaction of germs in the colimit,
/// forcing of the double-negation translation on some member, and
/// membership of the translation's forcing set in the filter.
/// Precondition failures (not a sheaf, not generic at this depth) are
/// recorded in the report and the sweep still runs.
pub fn check_generic_model_theorem(
    p: &GPresheaf,
    f: &Filter,
    depth: usize,
    mode: SemanticsMode,
) -> CheckReport {
    let mut report = CheckReport::new("generic-model-theorem")
        .bound("depth", depth.to_string())
        .bound("mode", String::from(mode.as_str()))
        .bound("free-variables", "1");
    let sheaf = is_sheaf(p);
    if !sheaf.is_ok() {
        report.absorb("precondition-sheaf", sheaf);
    }
    match is_generic_filter(p, f, depth, mode) {
        Ok(generic) => {
            for failure in &generic.failures {
                report.push(
                    "precondition-generic",
                    format!(
                        "condition {} fails for {} on {} at {:?}",
                        failure.condition, failure.formula, failure.member, failure.parameters
                    ),
                );
            }
        }
        Err(sub) => {
            report.absorb("precondition-generic", sub);
            return report;
        }
    }
    let gm = match generic_model(p, f) {
        Ok(gm) => gm,
        Err(sub) => {
            report.absorb("model", sub);
            return report;
        }
    };
    let sig = p.objects.values().next().expect("validated presheaves are inhabited").sig.clone();
    let mut ev = Evaluator::new(p, mode);
    let mut compared = 0u64;
    for phi in stream_formulas(&sig, depth, 1) {
        let translated = godel_translate(&phi);
        let closed = free_variables(&phi).is_empty();
        for &u in f.members() {
            let size = p.objects[&u].universe_size;
            let params: Vec<Vec<usize>> = if closed {
                alloc::vec![Vec::new()]
            } else {
                (0..size).map(|a| alloc::vec![a]).collect()
            };
            for values in params {
                let s = Section { domain: u, values: values.clone() };
                let germs: BTreeMap<usize, usize> = values
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| (i, gm.germ(u, a).expect("parameters are in range").class))
                    .collect();
                let classical = gm
                    .structure()
                    .satisfies(&phi, &germs)
                    .expect("the colimit carries the same signature");
                let on_member = f.members().iter().any(|&v| {
                    v.is_subset(u) && {
                        let rho = p.restrict_section(&s, v).expect("members are opens");
                        ev.forces_on(v, &translated, &rho).unwrap_or(false)
                    }
                });
                let set = ev
                    .forcing_set(u, &translated, &s)
                    .expect("query inputs were validated");
                let set_in_filter = f.contains(set);
                compared += 1;
                if classical != on_member || on_member != set_in_filter {
                    report.push(
                        "statements-diverge",
                        format!(
                            "{phi} on {u} at {values:?}: classical {classical}, \
                             member forcing {on_member}, forcing set {set} in filter {set_in_filter}"
                        ),
                    );
                }
            }
        }
    }
    report.bounds.push((String::from("comparisons"), compared.to_string()));
    report
}

/// The double-negation collapse for positive formulas: forcing the
/// double negation on an open is the same as forcing the formula on a
/// dense open inside it. Checked by exhaustive search over opens.
pub fn check_double_negation(
    p: &GPresheaf,
    mode: SemanticsMode,
    u: PointSet,
    phi: &Formula,
    s: &Section,
) -> Result<CheckReport, ForcingError> {
    let mut ev = Evaluator::new(p, mode);
    check_double_negation_with(&mut ev, u, phi, s)
}

/// Same check against an existing evaluator, so sweeps over many
/// formulas pay for the derived restriction maps once.
pub fn check_double_negation_with(
    ev: &mut Evaluator<'_>,
    u: PointSet,
    phi: &Formula,
    s: &Section,
) -> Result<CheckReport, ForcingError> {
    if !is_positive(phi) {
        return Err(ForcingError::PositivityRequired);
    }
    let p = ev.presheaf;
    let mut report = CheckReport::new("double-negation")
        .bound("open", u.to_string())
        .bound("mode", String::from(ev.mode.as_str()));
    let doubled = Formula::Not(Box::new(Formula::Not(Box::new(phi.clone()))));
    let lhs = ev.forces_on(u, &doubled, s)?;
    let mut witness: Option<PointSet> = None;
    let mut candidates: Vec<PointSet> =
        p.space.nonempty_opens().filter(|v| v.is_subset(u)).collect();
    candidates.sort_by_key(|v| (usize::MAX - v.len(), v.bits()));
    for v in candidates {
        if !p.space.is_dense(v, u).expect("u is open") {
            continue;
        }
        let rho = p.restrict_section(s, v).expect("v is an open inside u");
        if ev.forces_on(v, phi, &rho)? {
            witness = Some(v);
            break;
        }
    }
    report.bounds.push((String::from("doubly-negated"), lhs.to_string()));
    report.bounds.push((
        String::from("dense-witness"),
        witness.map(|v| v.to_string()).unwrap_or_else(|| String::from("none")),
    ));
    if lhs != witness.is_some() {
        report.push(
            "dense-forcing",
            format!(
                "{doubled} forced on {u}: {lhs}, dense open forcing {phi}: {:?}",
                witness
            ),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, parse_signature};
    use crate::presheaf::fixtures::sierpinski_collapse;
    use crate::structures::find_isomorphism;
    use crate::topology::maximal_filters;
    use alloc::vec;

    #[test]
    fn the_maximal_filter_is_generic_and_the_whole_space_alone_is_not() {
        let p = sierpinski_collapse();
        let filters = maximal_filters(&p.space);
        assert_eq!(filters.len(), 1);
        let report = is_generic_filter(&p, &filters[0], 2, SemanticsMode::Local).unwrap();
        assert!(report.generic, "{:?}", report.failures);
        assert_eq!(report.free_variable_bound, 1);

        let coarse = Filter::principal(&p.space, p.space.full_set());
        let report = is_generic_filter(&p, &coarse, 1, SemanticsMode::Local).unwrap();
        assert!(!report.generic);
        assert!(report
            .failures
            .iter()
            .any(|f| f.condition == 1 && f.formula == "R(v0)" && f.parameters == vec![0]));
    }

    #[test]
    fn generic_models_collapse_to_the_least_member() {
        let p = sierpinski_collapse();
        let x = p.space.full_set();
        let coarse = Filter::principal(&p.space, x);
        let gm = generic_model(&p, &coarse).unwrap();
        assert_eq!(gm.structure(), &p.objects[&x]);

        let fine = Filter::principal(&p.space, PointSet::singleton(0));
        let gm = generic_model(&p, &fine).unwrap();
        assert_eq!(gm.structure(), &p.objects[&PointSet::singleton(0)]);
        assert!(find_isomorphism(gm.structure(), &p.objects[&PointSet::singleton(0)]).is_some());
        assert_eq!(gm.germ(x, 0), gm.germ(x, 1), "both global elements collapse");
        assert_eq!(gm.germ(x, 0).unwrap().class, gm.germ(PointSet::singleton(0), 0).unwrap().class);
        assert!(gm.germ(x, 7).is_none());
    }

    #[test]
    fn the_theorem_holds_on_the_worked_example() {
        let p = sierpinski_collapse();
        let filter = maximal_filters(&p.space).pop().unwrap();
        let report = check_generic_model_theorem(&p, &filter, 2, SemanticsMode::Local);
        assert!(report.is_ok(), "{report:?}");

        let gm = generic_model(&p, &filter).unwrap();
        let sig = parse_signature("rel R/1").unwrap();
        let r = parse_formula("R(v0)", &sig).unwrap();
        let x = p.space.full_set();
        let class = gm.germ(x, 0).unwrap().class;
        let assignment = [(0, class)].into_iter().collect();
        assert!(gm.structure().satisfies(&r, &assignment).unwrap());
        let s = Section { domain: x, values: vec![0] };
        let set = super::super::forcing_set(&p, SemanticsMode::Local, x, &godel_translate(&r), &s)
            .unwrap();
        assert_eq!(set, x);
        assert!(filter.contains(set));

        let never = parse_formula("!R(v0)", &sig).unwrap();
        assert!(!gm.structure().satisfies(&never, &assignment).unwrap());
        let set = super::super::forcing_set(
            &p, SemanticsMode::Local, x, &godel_translate(&never), &s,
        )
        .unwrap();
        assert!(!filter.contains(set));
    }

    #[test]
    fn divergences_would_be_reported_not_hidden() {
        let p = sierpinski_collapse();
        let coarse = Filter::principal(&p.space, p.space.full_set());
        let report = check_generic_model_theorem(&p, &coarse, 1, SemanticsMode::Local);
        assert!(
            report.violations.iter().any(|v| v.rule == "precondition-generic"),
            "a non-generic filter is flagged before the sweep"
        );
    }

    #[test]
    fn double_negation_matches_dense_forcing() {
        let p = sierpinski_collapse();
        let sig = parse_signature("rel R/1").unwrap();
        let r = parse_formula("R(v0)", &sig).unwrap();
        let x = p.space.full_set();
        let s = Section { domain: x, values: vec![0] };
        let report = check_double_negation(&p, SemanticsMode::Local, x, &r, &s).unwrap();
        assert!(report.is_ok());
        assert!(report
            .bounds
            .iter()
            .any(|(k, v)| k == "dense-witness" && v == &PointSet::singleton(0).to_string()));

        let negated = parse_formula("!R(v0)", &sig).unwrap();
        assert_eq!(
            check_double_negation(&p, SemanticsMode::Local, x, &negated, &s),
            Err(ForcingError::PositivityRequired)
        );

        let space = crate::topology::FiniteSpace::sierpinski();
        let mut full = crate::structures::GStructure::plain(sig.clone(), 2);
        full.relations
            .insert(String::from("R"), [vec![0], vec![1]].into_iter().collect());
        let everywhere = GPresheaf::constant(space.clone(), full);
        let s2 = Section { domain: space.full_set(), values: vec![0] };
        let report =
            check_double_negation(&everywhere, SemanticsMode::Local, space.full_set(), &r, &s2)
                .unwrap();
        assert!(report.is_ok());
        assert!(report
            .bounds
            .iter()
            .any(|(k, v)| k == "dense-witness" && v == &space.full_set().to_string()));

        let mut empty = crate::structures::GStructure::plain(sig, 2);
        empty.relations.insert(String::from("R"), Default::default());
        let nowhere = GPresheaf::constant(space.clone(), empty);
        let report =
            check_double_negation(&nowhere, SemanticsMode::Local, space.full_set(), &r, &s2)
                .unwrap();
        assert!(report.is_ok());
        assert!(report.bounds.iter().any(|(k, v)| k == "doubly-negated" && v == "false"));
    }
}
