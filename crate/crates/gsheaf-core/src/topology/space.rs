//! Finite topological spaces given by explicit open-set families.
//!
//! Nothing is completed automatically: a space holds exactly the opens
//! it was given (deduplicated and sorted), and [`FiniteSpace::validate`]
//! reports every missing union, intersection, or endpoint instead of
//! fixing it. Use [`FiniteSpace::completed`] for the convenience closure.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::points::{PointSet, MAX_POINTS};
use crate::report::CheckReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyError {
    UnknownPoint { point: usize, num_points: usize },
    NotInside { smaller: PointSet, larger: PointSet },
}

impl core::fmt::Display for TopologyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TopologyError::UnknownPoint { point, num_points } => {
                write!(f, "point {point} does not exist in a space with {num_points} points")
            }
            TopologyError::NotInside { smaller, larger } => {
                write!(f, "{smaller} is not contained in {larger}")
            }
        }
    }
}

/// A finite topological space with points `0..num_points`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    num_points: usize,
    opens: Vec<PointSet>,
}

impl FiniteSpace {
    /// Builds a space from an arbitrary family of opens. The family is
    /// deduplicated and sorted but otherwise taken literally; call
    /// [`validate`](FiniteSpace::validate) to check the axioms.
    pub fn new(num_points: usize, opens: impl IntoIterator<Item = PointSet>) -> FiniteSpace {
        assert!(num_points <= MAX_POINTS, "spaces are capped at {MAX_POINTS} points");
        let set: BTreeSet<PointSet> = opens.into_iter().collect();
        FiniteSpace { num_points, opens: set.into_iter().collect() }
    }

    /// Two points, with `{0}` open and `{1}` not.
    pub fn sierpinski() -> FiniteSpace {
        FiniteSpace::new(2, [PointSet::EMPTY, PointSet::singleton(0), PointSet::full(2)])
    }

    pub fn discrete(num_points: usize) -> FiniteSpace {
        assert!(num_points <= 16, "discrete spaces this large are never useful here");
        let subsets = (0..1u64 << num_points).map(|bits| PointSet::from_bits(bits as u32));
        FiniteSpace::new(num_points, subsets)
    }

    pub fn indiscrete(num_points: usize) -> FiniteSpace {
        FiniteSpace::new(num_points, [PointSet::EMPTY, PointSet::full(num_points)])
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn points(&self) -> impl Iterator<Item = usize> {
        0..self.num_points
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.num_points)
    }

    /// The opens, sorted ascending by bitmask.
    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn is_open(&self, set: PointSet) -> bool {
        self.opens.binary_search(&set).is_ok()
    }

    pub fn nonempty_opens(&self) -> impl Iterator<Item = PointSet> + '_ {
        self.opens.iter().copied().filter(|o| !o.is_empty())
    }

    pub fn open_subsets_of(&self, u: PointSet) -> impl Iterator<Item = PointSet> + '_ {
        self.opens.iter().copied().filter(move |o| o.is_subset(u))
    }

    /// Checks the open-family axioms, reporting each violation with the
    /// witnessing pair of opens.
    pub fn validate(&self) -> CheckReport {
        let full = self.full_set();
        let mut report = CheckReport::new("space")
            .bound("points", self.num_points.to_string())
            .bound("opens", self.opens.len().to_string());
        for &o in &self.opens {
            if !o.is_subset(full) {
                report.push("opens-within-points", format!("{o} is not a subset of {full}"));
            }
        }
        if !self.is_open(PointSet::EMPTY) {
            report.push("empty-set-open", String::from("the empty set is not in the family"));
        }
        if !self.is_open(full) {
            report.push("whole-space-open", format!("the whole space {full} is not in the family"));
        }
        for (i, &a) in self.opens.iter().enumerate() {
            for &b in &self.opens[i + 1..] {
                let u = a.union(b);
                if !self.is_open(u) {
                    report.push("union-closed", format!("{a} union {b} = {u} is not open"));
                }
                let w = a.intersection(b);
                if !self.is_open(w) {
                    report.push(
                        "intersection-closed",
                        format!("{a} intersect {b} = {w} is not open"),
                    );
                }
            }
        }
        report
    }

    /// The same point set with the family closed under union and
    /// intersection and the two endpoints added.
    pub fn completed(&self) -> FiniteSpace {
        let full = self.full_set();
        let mut set: BTreeSet<PointSet> =
            self.opens.iter().map(|o| o.intersection(full)).collect();
        set.insert(PointSet::EMPTY);
        set.insert(full);
        loop {
            let mut fresh: Vec<PointSet> = Vec::new();
            for &a in &set {
                for &b in &set {
                    let u = a.union(b);
                    if !set.contains(&u) {
                        fresh.push(u);
                    }
                    let w = a.intersection(b);
                    if !set.contains(&w) {
                        fresh.push(w);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            set.extend(fresh);
        }
        FiniteSpace { num_points: self.num_points, opens: set.into_iter().collect() }
    }

    /// The intersection of all opens containing `point`; open in any
    /// valid space because the family is intersection-closed.
    pub fn min_open_nbhd(&self, point: usize) -> Result<PointSet, TopologyError> {
        if point >= self.num_points {
            return Err(TopologyError::UnknownPoint { point, num_points: self.num_points });
        }
        Ok(self
            .opens
            .iter()
            .copied()
            .filter(|o| o.contains(point))
            .fold(self.full_set(), PointSet::intersection))
    }

    /// Complement of the largest open disjoint from `set`.
    pub fn closure(&self, set: PointSet) -> PointSet {
        let mut avoid = PointSet::EMPTY;
        for &o in &self.opens {
            if o.intersection(set).is_empty() {
                avoid = avoid.union(o);
            }
        }
        self.full_set().difference(avoid)
    }

    /// Whether the open `v` is dense in the open `u`, i.e. `u` lies in
    /// the closure of `v`. Errors when `v` is not contained in `u`.
    pub fn is_dense(&self, v: PointSet, u: PointSet) -> Result<bool, TopologyError> {
        if !v.is_subset(u) {
            return Err(TopologyError::NotInside { smaller: v, larger: u });
        }
        Ok(u.is_subset(self.closure(v)))
    }
}

/// Every topology on `num_points` labeled points. Exhaustive search
/// over candidate families, so only tiny point counts are allowed.
pub fn enumerate_topologies(num_points: usize) -> Vec<FiniteSpace> {
    assert!(num_points <= 4, "exhaustive topology listing is only for tiny spaces");
    let full = PointSet::full(num_points);
    let mids: Vec<PointSet> = (1..full.bits()).map(PointSet::from_bits).collect();
    let mut out = Vec::new();
    for mask in 0..1u64 << mids.len() {
        let mut opens = alloc::vec![PointSet::EMPTY, full];
        for (i, &m) in mids.iter().enumerate() {
            if mask & (1 << i) != 0 {
                opens.push(m);
            }
        }
        let space = FiniteSpace::new(num_points, opens);
        if space.validate().is_ok() {
            out.push(space);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sierpinski_basics() {
        let s = FiniteSpace::sierpinski();
        assert!(s.validate().is_ok());
        assert_eq!(s.opens().len(), 3);
        assert_eq!(s.min_open_nbhd(0).unwrap(), PointSet::singleton(0));
        assert_eq!(s.min_open_nbhd(1).unwrap(), PointSet::full(2));
        assert!(matches!(s.min_open_nbhd(2), Err(TopologyError::UnknownPoint { .. })));
        assert_eq!(s.closure(PointSet::singleton(1)), PointSet::singleton(1));
        assert_eq!(s.closure(PointSet::singleton(0)), PointSet::full(2));
        assert_eq!(s.closure(PointSet::EMPTY), PointSet::EMPTY);
    }

    #[test]
    fn density_follows_closure() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(s.is_dense(PointSet::singleton(0), PointSet::full(2)), Ok(true));
        assert_eq!(s.is_dense(PointSet::full(2), PointSet::full(2)), Ok(true));
        assert_eq!(s.is_dense(PointSet::EMPTY, PointSet::EMPTY), Ok(true));
        let d = FiniteSpace::discrete(2);
        assert_eq!(d.is_dense(PointSet::singleton(0), PointSet::full(2)), Ok(false));
        assert!(matches!(
            d.is_dense(PointSet::singleton(0), PointSet::singleton(1)),
            Err(TopologyError::NotInside { .. })
        ));
    }

    #[test]
    fn discrete_space_is_its_own_closure() {
        let d = FiniteSpace::discrete(3);
        assert!(d.validate().is_ok());
        assert_eq!(d.opens().len(), 8);
        for p in d.points() {
            assert_eq!(d.min_open_nbhd(p).unwrap(), PointSet::singleton(p));
        }
        let s = PointSet::from_points([0, 2]);
        assert_eq!(d.closure(s), s);
    }

    #[test]
    fn validator_reports_each_missing_set() {
        let missing_union = FiniteSpace::new(
            2,
            [PointSet::EMPTY, PointSet::singleton(0), PointSet::singleton(1)],
        );
        let report = missing_union.validate();
        assert!(!report.is_ok());
        assert!(report.violations.iter().any(|v| v.rule == "whole-space-open"));
        assert!(report.violations.iter().any(|v| v.rule == "union-closed"));

        let missing_meet = FiniteSpace::new(
            3,
            [
                PointSet::EMPTY,
                PointSet::from_points([0, 1]),
                PointSet::from_points([1, 2]),
                PointSet::full(3),
            ],
        );
        let report = missing_meet.validate();
        assert!(report.violations.iter().any(|v| v.rule == "intersection-closed"));
        assert!(report.violations.iter().all(|v| v.rule != "union-closed"));

        let stray = FiniteSpace::new(1, [PointSet::EMPTY, PointSet::full(1), PointSet::full(2)]);
        assert!(stray.validate().violations.iter().any(|v| v.rule == "opens-within-points"));
    }

    #[test]
    fn completion_fixes_what_the_validator_flags() {
        let broken = FiniteSpace::new(3, [PointSet::from_points([0, 1]), PointSet::from_points([1, 2])]);
        assert!(!broken.validate().is_ok());
        let fixed = broken.completed();
        assert!(fixed.validate().is_ok());
        assert!(fixed.is_open(PointSet::singleton(1)));
        assert_eq!(fixed.opens().len(), 5);
    }

    #[test]
    fn min_open_nbhd_is_least_among_opens_containing_the_point() {
        for space in enumerate_topologies(3) {
            for p in space.points() {
                let m = space.min_open_nbhd(p).unwrap();
                assert!(space.is_open(m));
                assert!(m.contains(p));
                for o in space.opens() {
                    if o.contains(p) {
                        assert!(m.is_subset(*o));
                    }
                }
            }
        }
    }

    #[test]
    fn topology_counts_on_tiny_point_sets() {
        assert_eq!(enumerate_topologies(0).len(), 1);
        assert_eq!(enumerate_topologies(1).len(), 1);
        assert_eq!(enumerate_topologies(2).len(), 4);
        assert_eq!(enumerate_topologies(3).len(), 29);
    }
}
