//! Exhaustive checkers for the laws the forcing relation obeys on a
//! fixed presheaf: each sweeps every enumerated formula, every open,
//! every section, and reports the instances that break the law.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{is_generic_filter, Evaluator, SemanticsMode};
use crate::logic::{is_positive, stream_formulas, Formula, FormulaStream};
use crate::presheaf::{irredundant_covers, is_exact, stalk, GPresheaf, Section, Stalk};
use crate::report::CheckReport;
use crate::structures::gstructure::each_tuple;
use crate::topology::{maximal_filters, PointSet};

fn sweep_report(name: &str, p: &GPresheaf, mode: SemanticsMode, depth: usize, max_free: usize) -> CheckReport {
    let _ = p;
    CheckReport::new(name)
        .bound("depth", depth.to_string())
        .bound("free-variables", max_free.to_string())
        .bound("mode", String::from(mode.as_str()))
}

fn formulas(p: &GPresheaf, depth: usize, max_free: usize) -> FormulaStream {
    let sig = &p.objects.values().next().expect("validated presheaves are inhabited").sig;
    stream_formulas(sig, depth, max_free)
}

fn sections_over(p: &GPresheaf, u: PointSet, len: usize) -> Vec<Section> {
    let size = p.objects[&u].universe_size;
    let mut out = Vec::new();
    if len == 0 {
        out.push(Section { domain: u, values: Vec::new() });
        return out;
    }
    each_tuple(size, len, |values| {
        out.push(Section { domain: u, values: values.to_vec() });
    });
    out
}

/// Forcing at a point is forcing on some neighbourhood of it.
pub fn check_local_semantics(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
    max_free: usize,
) -> CheckReport {
    let mut report = sweep_report("local-semantics", p, mode, depth, max_free);
    let mut ev = Evaluator::new(p, mode);
    for phi in formulas(p, depth, max_free) {
        for u in p.space.nonempty_opens().collect::<Vec<_>>() {
            for s in sections_over(p, u, max_free) {
                let set = ev.forcing_set(u, &phi, &s).expect("inputs are well-formed");
                for x in u.iter() {
                    let at_point = set.contains(x);
                    let on_neighbourhood = p
                        .space
                        .nonempty_opens()
                        .any(|v| v.contains(x) && v.is_subset(u) && v.is_subset(set));
                    if at_point != on_neighbourhood {
                        report.push(
                            "local-semantics",
                            format!("{phi} at {x} with {s:?}: point {at_point}, neighbourhood {on_neighbourhood}"),
                        );
                    }
                }
            }
        }
    }
    report
}

/// At an isolated point forcing is classical satisfaction in the stalk.
pub fn check_classical_points(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
    max_free: usize,
) -> CheckReport {
    let mut report = sweep_report("classical-points", p, mode, depth, max_free);
    let isolated: Vec<(usize, Stalk)> = p
        .space
        .points()
        .filter(|&x| p.space.is_open(PointSet::singleton(x)))
        .map(|x| (x, stalk(p, x).expect("points of a validated presheaf have stalks")))
        .collect();
    report.bounds.push((String::from("isolated-points"), isolated.len().to_string()));
    let mut ev = Evaluator::new(p, mode);
    for phi in formulas(p, depth, max_free) {
        for &(x, ref st) in &isolated {
            for u in p.space.nonempty_opens().filter(|u| u.contains(x)).collect::<Vec<_>>() {
                for s in sections_over(p, u, max_free) {
                    let forced = ev.forces_at(x, &phi, &s).expect("inputs are well-formed");
                    let germs: BTreeMap<usize, usize> = s
                        .values
                        .iter()
                        .enumerate()
                        .map(|(i, &value)| {
                            (i, st.germ(u, value).expect("section values are in range").class)
                        })
                        .collect();
                    let classical = st
                        .structure()
                        .satisfies(&phi, &germs)
                        .expect("the stalk shares the signature");
                    if forced != classical {
                        report.push(
                            "classical-points",
                            format!("{phi} at isolated {x} with {s:?}: forced {forced}, stalk {classical}"),
                        );
                    }
                }
            }
        }
    }
    report
}

/// For positive formulas the three evaluation routes coincide: the
/// recursive clauses, outright satisfaction on some neighbourhood, and
/// satisfaction of germs in the stalk.
pub fn check_positive_collapse(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
    max_free: usize,
) -> CheckReport {
    let mut report = sweep_report("positive-collapse", p, mode, depth, max_free);
    let stalks: BTreeMap<usize, Stalk> = p
        .space
        .points()
        .map(|x| (x, stalk(p, x).expect("points of a validated presheaf have stalks")))
        .collect();
    let derived = p.derived_restrictions();
    let mut ev = Evaluator::new(p, mode);
    let mut positives = 0usize;
    for phi in formulas(p, depth, max_free).into_iter().filter(is_positive) {
        positives += 1;
        for u in p.space.nonempty_opens().collect::<Vec<_>>() {
            for s in sections_over(p, u, max_free) {
                for x in u.iter() {
                    let recursive = ev.forces_at(x, &phi, &s).expect("inputs are well-formed");
                    let outright = p
                        .space
                        .nonempty_opens()
                        .filter(|v| v.contains(x) && v.is_subset(u))
                        .any(|v| {
                            let map = &derived[&(v, u)];
                            let env: BTreeMap<usize, usize> = s
                                .values
                                .iter()
                                .enumerate()
                                .map(|(i, &value)| (i, map[value]))
                                .collect();
                            p.objects[&v].satisfies(&phi, &env).expect("same signature")
                        });
                    let st = &stalks[&x];
                    let germs: BTreeMap<usize, usize> = s
                        .values
                        .iter()
                        .enumerate()
                        .map(|(i, &value)| {
                            (i, st.germ(u, value).expect("section values are in range").class)
                        })
                        .collect();
                    let in_stalk =
                        st.structure().satisfies(&phi, &germs).expect("same signature");
                    if recursive != outright || outright != in_stalk {
                        report.push(
                            "positive-collapse",
                            format!(
                                "{phi} at {x} with {s:?}: recursive {recursive}, outright {outright}, stalk {in_stalk}"
                            ),
                        );
                    }
                }
            }
        }
    }
    report.bounds.push((String::from("positive-formulas"), positives.to_string()));
    report
}

/// Forcing restricts: forced on an open, forced on every smaller open.
pub fn check_restriction_monotonicity(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
    max_free: usize,
) -> CheckReport {
    let mut report = sweep_report("restriction-monotonicity", p, mode, depth, max_free);
    let mut ev = Evaluator::new(p, mode);
    for phi in formulas(p, depth, max_free) {
        for v in p.space.nonempty_opens().collect::<Vec<_>>() {
            for s in sections_over(p, v, max_free) {
                if !ev.forces_on(v, &phi, &s).expect("inputs are well-formed") {
                    continue;
                }
                for smaller in p.space.nonempty_opens().filter(|w| w.is_subset(v)).collect::<Vec<_>>() {
                    let rho = p.restrict_section(&s, smaller).expect("smaller is open");
                    if !ev.forces_on(smaller, &phi, &rho).expect("inputs are well-formed") {
                        report.push(
                            "restriction-monotonicity",
                            format!("{phi} forced on {v} with {s:?} but not on {smaller}"),
                        );
                    }
                }
            }
        }
    }
    report
}

/// Forcing glues: forced on every member of a cover, forced on the union.
pub fn check_covering(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
    max_free: usize,
) -> CheckReport {
    let mut report = sweep_report("covering", p, mode, depth, max_free);
    let mut ev = Evaluator::new(p, mode);
    for phi in formulas(p, depth, max_free) {
        for u in p.space.nonempty_opens().collect::<Vec<_>>() {
            let covers = irredundant_covers(&p.space, u);
            for s in sections_over(p, u, max_free) {
                for cover in &covers {
                    let everywhere = cover.iter().all(|&v| {
                        let rho = p.restrict_section(&s, v).expect("members are open");
                        ev.forces_on(v, &phi, &rho).expect("inputs are well-formed")
                    });
                    if everywhere && !ev.forces_on(u, &phi, &s).expect("inputs are well-formed") {
                        report.push(
                            "covering",
                            format!("{phi} forced on every member of {cover:?} but not on {u}"),
                        );
                    }
                }
            }
        }
    }
    report
}

/// An existential is forced on an open exactly when some cover carries a
/// member-wise witness.
pub fn check_existential_covering(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
    max_free: usize,
) -> CheckReport {
    let mut report = sweep_report("existential-covering", p, mode, depth, max_free);
    let mut ev = Evaluator::new(p, mode);
    for phi in formulas(p, depth, max_free) {
        let Formula::Exists(w, body) = &phi else { continue };
        for u in p.space.nonempty_opens().collect::<Vec<_>>() {
            let covers = irredundant_covers(&p.space, u);
            for s in sections_over(p, u, max_free) {
                let forced = ev.forces_on(u, &phi, &s).expect("inputs are well-formed");
                let witnessed = covers.iter().any(|cover| {
                    cover.iter().all(|&v| {
                        let rho = p.restrict_section(&s, v).expect("members are open");
                        let size = p.objects[&v].universe_size;
                        (0..size).any(|b| {
                            let mut values = rho.values.clone();
                            values.resize(*w, 0);
                            values.push(b);
                            ev.forces_on(v, body, &Section { domain: v, values })
                                .expect("inputs are well-formed")
                        })
                    })
                });
                if forced != witnessed {
                    report.push(
                        "existential-covering",
                        format!("{phi} on {u} with {s:?}: forced {forced}, covered witness {witnessed}"),
                    );
                }
            }
        }
    }
    report
}

/// The minimal-neighbourhood shortcut agrees with the full search.
pub fn check_fast_path(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
    max_free: usize,
) -> CheckReport {
    let mut report = sweep_report("fast-path", p, mode, depth, max_free);
    let mut slow = Evaluator::new(p, mode);
    let mut fast = Evaluator::with_fast_path(p, mode);
    for phi in formulas(p, depth, max_free) {
        for u in p.space.nonempty_opens().collect::<Vec<_>>() {
            for s in sections_over(p, u, max_free) {
                for x in u.iter() {
                    let full = slow.forces_at(x, &phi, &s).expect("inputs are well-formed");
                    let short = fast.forces_at(x, &phi, &s).expect("inputs are well-formed");
                    if full != short {
                        report.push(
                            "fast-path",
                            format!("{phi} at {x} with {s:?}: full search {full}, fast path {short}"),
                        );
                    }
                }
            }
        }
    }
    report
}

fn mentions_forall(phi: &Formula) -> bool {
    match phi {
        Formula::Eq(..) | Formula::Rel(..) => false,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            mentions_forall(a) || mentions_forall(b)
        }
        Formula::Not(inner) | Formula::Exists(_, inner) => mentions_forall(inner),
        Formula::Forall(..) => true,
    }
}

/// Forcing at a point only sees the germ of the section: restricting the
/// section to a smaller neighbourhood does not change the verdict. In
/// literal mode formulas containing a universal quantifier are excluded;
/// there the law is an experiment, not an invariant.
pub fn check_germ_invariance(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
    max_free: usize,
) -> CheckReport {
    let mut report = sweep_report("germ-invariance", p, mode, depth, max_free);
    let mut skipped = 0usize;
    let mut ev = Evaluator::new(p, mode);
    for phi in formulas(p, depth, max_free) {
        if mode == SemanticsMode::Literal && mentions_forall(&phi) {
            skipped += 1;
            continue;
        }
        for v in p.space.nonempty_opens().collect::<Vec<_>>() {
            for s in sections_over(p, v, max_free) {
                for smaller in p.space.nonempty_opens().filter(|w| w.is_subset(v)).collect::<Vec<_>>() {
                    let rho = p.restrict_section(&s, smaller).expect("smaller is open");
                    for x in smaller.iter() {
                        let wide = ev.forces_at(x, &phi, &s).expect("inputs are well-formed");
                        let narrow = ev.forces_at(x, &phi, &rho).expect("inputs are well-formed");
                        if wide != narrow {
                            report.push(
                                "germ-invariance",
                                format!(
                                    "{phi} at {x}: {wide} over {v} but {narrow} over {smaller} with {s:?}"
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
    report.bounds.push((String::from("universal-formulas-skipped"), skipped.to_string()));
    report
}

/// Forcing sets are open.
pub fn check_forcing_sets_open(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
    max_free: usize,
) -> CheckReport {
    let mut report = sweep_report("forcing-set-open", p, mode, depth, max_free);
    let mut ev = Evaluator::new(p, mode);
    for phi in formulas(p, depth, max_free) {
        for u in p.space.nonempty_opens().collect::<Vec<_>>() {
            for s in sections_over(p, u, max_free) {
                let set = ev.forcing_set(u, &phi, &s).expect("inputs are well-formed");
                if !p.space.is_open(set) {
                    report.push(
                        "forcing-set-open",
                        format!("{phi} over {u} with {s:?} has forcing set {set}"),
                    );
                }
            }
        }
    }
    report
}

/// On an exact presheaf every maximal filter is generic at the tried
/// depth. Exactness failures are recorded as precondition violations.
pub fn check_maximal_filters_generic(
    p: &GPresheaf,
    mode: SemanticsMode,
    depth: usize,
) -> CheckReport {
    let mut report = CheckReport::new("maximal-filters-generic")
        .bound("depth", depth.to_string())
        .bound("mode", String::from(mode.as_str()));
    let exactness = is_exact(p);
    if !exactness.is_ok() {
        report.absorb("precondition-exact", exactness);
        return report;
    }
    let filters = maximal_filters(&p.space);
    report.bounds.push((String::from("maximal-filters"), filters.len().to_string()));
    for filter in &filters {
        match is_generic_filter(p, filter, depth, mode) {
            Ok(generic) => {
                for failure in &generic.failures {
                    report.push(
                        "maximal-generic",
                        format!(
                            "filter of {:?}: condition {} fails for {} on {} at {:?}",
                            filter.members(),
                            failure.condition,
                            failure.formula,
                            failure.member,
                            failure.parameters
                        ),
                    );
                }
            }
            Err(sub) => report.absorb("maximal-generic", sub),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::fixtures::sierpinski_collapse;
    use crate::structures::GStructure;
    use crate::topology::FiniteSpace;
    use alloc::vec;

    fn constant_two_points() -> GPresheaf {
        let sig = crate::logic::parse_signature("rel R/1").unwrap();
        let mut m = GStructure::plain(sig, 2);
        m.relations.insert(String::from("R"), [vec![1]].into_iter().collect());
        GPresheaf::constant(FiniteSpace::discrete(2), m)
    }

    #[test]
    fn every_law_holds_on_the_worked_example() {
        let p = sierpinski_collapse();
        for mode in [SemanticsMode::Local, SemanticsMode::Literal] {
            assert!(check_local_semantics(&p, mode, 2, 1).is_ok());
            assert!(check_classical_points(&p, mode, 2, 1).is_ok());
            assert!(check_positive_collapse(&p, mode, 2, 1).is_ok());
            assert!(check_restriction_monotonicity(&p, mode, 2, 1).is_ok());
            assert!(check_covering(&p, mode, 2, 1).is_ok());
            assert!(check_existential_covering(&p, mode, 2, 1).is_ok());
            assert!(check_fast_path(&p, mode, 2, 1).is_ok());
            assert!(check_germ_invariance(&p, mode, 2, 1).is_ok());
            assert!(check_forcing_sets_open(&p, mode, 2, 1).is_ok());
        }
        assert!(check_maximal_filters_generic(&p, SemanticsMode::Local, 2).is_ok());
    }

    #[test]
    fn the_laws_survive_a_disconnected_space() {
        let p = constant_two_points();
        let mode = SemanticsMode::Local;
        assert!(check_local_semantics(&p, mode, 1, 1).is_ok());
        assert!(check_classical_points(&p, mode, 1, 1).is_ok());
        assert!(check_positive_collapse(&p, mode, 1, 1).is_ok());
        assert!(check_restriction_monotonicity(&p, mode, 1, 1).is_ok());
        assert!(check_covering(&p, mode, 1, 1).is_ok());
        assert!(check_existential_covering(&p, mode, 1, 1).is_ok());
        assert!(check_fast_path(&p, mode, 1, 1).is_ok());
        assert!(check_germ_invariance(&p, mode, 1, 1).is_ok());
        assert!(check_forcing_sets_open(&p, mode, 1, 1).is_ok());
    }

    #[test]
    fn literal_mode_skips_universals_in_the_germ_sweep() {
        let p = sierpinski_collapse();
        let report = check_germ_invariance(&p, SemanticsMode::Literal, 1, 1);
        assert!(report.is_ok());
        let skipped = report
            .bounds
            .iter()
            .find(|(k, _)| k == "universal-formulas-skipped")
            .map(|(_, v)| v.clone())
            .unwrap();
        assert_ne!(skipped, "0");
    }
}
