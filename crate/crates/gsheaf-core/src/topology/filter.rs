//! Filters of open sets.
//!
//! A filter is a nonempty family of opens closed under pairwise
//! intersection and under open supersets. It is nontrivial when it
//! avoids the empty set. On a finite space every nontrivial filter is
//! the up-set of the intersection of its members, which makes the
//! maximal ones exactly the up-sets of minimal nonempty opens; that
//! shortcut is what [`maximal_filters`] implements, and the tests check
//! it against the brute-force enumeration.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::points::PointSet;
use super::space::FiniteSpace;
use crate::report::CheckReport;

/// A family of opens closed under intersection and open supersets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Filter {
    members: Vec<PointSet>,
}

impl Filter {
    /// The up-set of `base`: every open containing it. `base` itself
    /// must be open so the result is intersection-closed.
    pub fn principal(space: &FiniteSpace, base: PointSet) -> Filter {
        assert!(space.is_open(base), "a principal filter needs an open generator");
        let members = space.opens().iter().copied().filter(|o| base.is_subset(*o)).collect();
        Filter { members }
    }

    /// Builds a filter from an explicit member list, validating the
    /// axioms first.
    pub fn from_members(
        space: &FiniteSpace,
        members: impl IntoIterator<Item = PointSet>,
    ) -> Result<Filter, CheckReport> {
        let mut members: Vec<PointSet> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        let report = validate_filter(space, &members);
        if report.is_ok() {
            Ok(Filter { members })
        } else {
            Err(report)
        }
    }

    /// Members sorted ascending by bitmask.
    pub fn members(&self) -> &[PointSet] {
        &self.members
    }

    pub fn contains(&self, open: PointSet) -> bool {
        self.members.binary_search(&open).is_ok()
    }

    /// Whether the filter avoids the empty set.
    pub fn is_nontrivial(&self) -> bool {
        !self.contains(PointSet::EMPTY)
    }

    /// The intersection of all members; on a finite space the filter is
    /// exactly the up-set of this open.
    pub fn core(&self) -> PointSet {
        self.members.iter().copied().fold(
            self.members.first().copied().unwrap_or(PointSet::EMPTY),
            PointSet::intersection,
        )
    }
}

/// Checks the filter axioms for an explicit family of opens.
pub fn validate_filter(space: &FiniteSpace, members: &[PointSet]) -> CheckReport {
    let mut report = CheckReport::new("filter")
        .bound("members", members.len().to_string());
    if members.is_empty() {
        report.push("nonempty", String::from("a filter must contain at least one open"));
    }
    for &m in members {
        if !space.is_open(m) {
            report.push("members-open", format!("{m} is not an open of the space"));
        }
    }
    let contains = |s: PointSet| members.contains(&s);
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            let w = a.intersection(b);
            if !contains(w) {
                report.push(
                    "intersection-closed",
                    format!("{a} intersect {b} = {w} is missing"),
                );
            }
        }
    }
    for &m in members {
        for o in space.opens() {
            if m.is_subset(*o) && !contains(*o) {
                report.push("superset-closed", format!("{o} contains the member {m} but is missing"));
            }
        }
    }
    report
}

/// All filters on the space by brute force over subfamilies of opens,
/// optionally dropping the trivial ones (those containing the empty
/// set). Only practical for spaces with few opens.
pub fn enumerate_filters(space: &FiniteSpace, nontrivial_only: bool) -> Vec<Filter> {
    let opens = space.opens();
    assert!(opens.len() <= 16, "filter enumeration is exponential in the number of opens");
    let mut out = Vec::new();
    for mask in 1..1u64 << opens.len() {
        let members: Vec<PointSet> = opens
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &o)| o)
            .collect();
        if nontrivial_only && members.iter().any(|m| m.is_empty()) {
            continue;
        }
        if validate_filter(space, &members).is_ok() {
            out.push(Filter { members });
        }
    }
    out
}

/// The inclusion-maximal nontrivial filters: one principal filter per
/// minimal nonempty open.
pub fn maximal_filters(space: &FiniteSpace) -> Vec<Filter> {
    let minimal: Vec<PointSet> = space
        .nonempty_opens()
        .filter(|&m| !space.nonempty_opens().any(|o| o != m && o.is_subset(m)))
        .collect();
    minimal.into_iter().map(|m| Filter::principal(space, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::space::enumerate_topologies;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    #[test]
    fn sierpinski_filters_by_hand() {
        let s = FiniteSpace::sierpinski();
        let x = PointSet::full(2);
        let p = PointSet::singleton(0);
        let all = enumerate_filters(&s, false);
        assert_eq!(all.len(), 3);
        let nontrivial = enumerate_filters(&s, true);
        assert_eq!(
            nontrivial,
            vec![
                Filter { members: vec![x] },
                Filter { members: vec![p, x] },
            ]
        );
        assert_eq!(maximal_filters(&s), vec![Filter { members: vec![p, x] }]);
    }

    #[test]
    fn discrete_and_one_point_filters_by_hand() {
        let one = FiniteSpace::discrete(1);
        let nontrivial = enumerate_filters(&one, true);
        assert_eq!(nontrivial.len(), 1);
        assert_eq!(nontrivial[0].members(), [PointSet::full(1)]);
        assert_eq!(maximal_filters(&one), nontrivial);

        let two = FiniteSpace::discrete(2);
        let nontrivial = enumerate_filters(&two, true);
        assert_eq!(nontrivial.len(), 3);
        let maximal = maximal_filters(&two);
        assert_eq!(maximal.len(), 2);
        assert!(maximal.iter().all(|f| nontrivial.contains(f)));
    }

    #[test]
    fn filter_validation_names_the_broken_axiom() {
        let s = FiniteSpace::sierpinski();
        let x = PointSet::full(2);
        let p = PointSet::singleton(0);
        let report = validate_filter(&s, &[p]);
        assert!(report.violations.iter().any(|v| v.rule == "superset-closed"));
        let report = validate_filter(&s, &[]);
        assert!(report.violations.iter().any(|v| v.rule == "nonempty"));
        let report = validate_filter(&s, &[PointSet::singleton(1), x]);
        assert!(report.violations.iter().any(|v| v.rule == "members-open"));
        assert!(Filter::from_members(&s, [x, p]).is_ok());
    }

    #[test]
    fn nontrivial_filters_are_principal_over_their_core() {
        for space in enumerate_topologies(3) {
            for filter in enumerate_filters(&space, true) {
                let core = filter.core();
                assert!(space.is_open(core), "core of a filter is open");
                assert!(!core.is_empty());
                assert_eq!(filter, Filter::principal(&space, core));
            }
        }
    }

    #[test]
    fn maximal_filters_agree_with_brute_force_maximality() {
        for space in enumerate_topologies(3) {
            let nontrivial = enumerate_filters(&space, true);
            let brute: Vec<&Filter> = nontrivial
                .iter()
                .filter(|f| {
                    !nontrivial.iter().any(|g| {
                        g != *f && f.members().iter().all(|m| g.contains(*m))
                    })
                })
                .collect();
            let fast = maximal_filters(&space);
            let fast_set: BTreeSet<&Filter> = fast.iter().collect();
            let brute_set: BTreeSet<&Filter> = brute.into_iter().collect();
            assert_eq!(fast_set, brute_set, "space {:?}", space.opens());
        }
    }

    #[test]
    fn dense_opens_of_members_stay_in_maximal_filters() {
        for space in enumerate_topologies(3) {
            for filter in maximal_filters(&space) {
                for &u in filter.members() {
                    for v in space.open_subsets_of(u) {
                        if space.is_dense(v, u).unwrap() {
                            assert!(
                                filter.contains(v),
                                "dense {v} below {u} escaped a maximal filter on {:?}",
                                space.opens()
                            );
                        }
                    }
                }
            }
        }
    }
}
