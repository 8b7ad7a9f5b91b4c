//! The two halves of the sheaf condition, checked by brute force.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::GPresheaf;
use crate::report::CheckReport;
use crate::structures::gstructure::each_tuple;
use crate::topology::{FiniteSpace, PointSet};

fn check_cover(p: &GPresheaf, u: PointSet, cover: &[PointSet]) -> Result<(), CheckReport> {
    let mut report = CheckReport::new("cover");
    if p.object(u).is_none() {
        report.push("cover", format!("{u} carries no structure"));
        return Err(report);
    }
    let mut union = PointSet::EMPTY;
    for &v in cover {
        if v.is_empty() || !p.space.is_open(v) {
            report.push("cover", format!("{v} is not a nonempty open"));
            return Err(report);
        }
        union = union.union(v);
    }
    if union != u {
        report.push("cover", format!("the members cover {union}, wanted {u}"));
        return Err(report);
    }
    Ok(())
}

fn describe(cover: &[PointSet]) -> String {
    let mut out = String::new();
    for (i, v) in cover.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&v.to_string());
    }
    out
}

/// Whether two distinct elements over u can hide behind equal
/// restrictions to every member of the cover.
pub fn check_coherence(
    p: &GPresheaf,
    u: PointSet,
    cover: &[PointSet],
) -> Result<CheckReport, CheckReport> {
    check_cover(p, u, cover)?;
    let mut report = CheckReport::new("coherence")
        .bound("open", u.to_string())
        .bound("cover", describe(cover));
    let derived = p.derived_restrictions();
    let n = p.objects[&u].universe_size;
    for x in 0..n {
        for y in x + 1..n {
            let indistinct = cover.iter().all(|v| {
                let map = &derived[&(*v, u)];
                map[x] == map[y]
            });
            if indistinct {
                report.push(
                    "coherence",
                    format!("elements {x} and {y} over {u} restrict equally to every member"),
                );
            }
        }
    }
    Ok(report)
}

/// Whether every compatible family over the cover glues to an element
/// over u. Compatibility only constrains pairs of members that
/// actually meet.
pub fn check_exactness(
    p: &GPresheaf,
    u: PointSet,
    cover: &[PointSet],
) -> Result<CheckReport, CheckReport> {
    check_cover(p, u, cover)?;
    let mut report = CheckReport::new("exactness")
        .bound("open", u.to_string())
        .bound("cover", describe(cover));
    let derived = p.derived_restrictions();
    let sizes: Vec<usize> = cover.iter().map(|v| p.objects[v].universe_size).collect();
    let max = sizes.iter().max().copied().unwrap_or(0);
    let n = p.objects[&u].universe_size;

    each_tuple(max, cover.len(), |family| {
        if family.iter().zip(&sizes).any(|(&s, &size)| s >= size) {
            return;
        }
        let compatible = (0..cover.len()).all(|i| {
            (i + 1..cover.len()).all(|j| {
                let meet = cover[i].intersection(cover[j]);
                if meet.is_empty() {
                    return true;
                }
                derived[&(meet, cover[i])][family[i]] == derived[&(meet, cover[j])][family[j]]
            })
        });
        if !compatible {
            return;
        }
        let glues = (0..n)
            .any(|s| cover.iter().zip(family).all(|(v, &sv)| derived[&(*v, u)][s] == sv));
        if !glues {
            report.push(
                "exactness",
                format!("the compatible family {family:?} over [{}] has no element over {u}", describe(cover)),
            );
        }
    });
    Ok(report)
}

/// Every cover of u by nonempty opens in which no member is swallowed
/// by the union of the others. Checking these suffices: a redundant
/// member changes neither coherence nor exactness verdicts.
pub fn irredundant_covers(space: &FiniteSpace, u: PointSet) -> Vec<Vec<PointSet>> {
    let candidates: Vec<PointSet> = space
        .open_subsets_of(u)
        .filter(|v| !v.is_empty())
        .collect();
    assert!(candidates.len() <= 20, "too many opens below {u} to scan covers");
    let mut covers = Vec::new();
    for mask in 1u32..(1 << candidates.len()) {
        let cover: Vec<PointSet> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let union = cover.iter().fold(PointSet::EMPTY, |acc, &v| acc.union(v));
        if union != u {
            continue;
        }
        let irredundant = (0..cover.len()).all(|i| {
            let rest = cover
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(PointSet::EMPTY, |acc, (_, &v)| acc.union(v));
            !cover[i].is_subset(rest)
        });
        if irredundant {
            covers.push(cover);
        }
    }
    covers
}

fn scan(p: &GPresheaf, with_coherence: bool) -> CheckReport {
    let name = if with_coherence { "sheaf" } else { "exact" };
    let mut covers_checked = 0usize;
    let mut report = CheckReport::new(name);
    for u in p.space.nonempty_opens() {
        for cover in irredundant_covers(&p.space, u) {
            covers_checked += 1;
            if with_coherence {
                let sub = check_coherence(p, u, &cover).expect("enumerated covers are covers");
                for v in sub.violations {
                    report.push(v.rule, v.witness);
                }
            }
            let sub = check_exactness(p, u, &cover).expect("enumerated covers are covers");
            for v in sub.violations {
                report.push(v.rule, v.witness);
            }
        }
    }
    report.bound("covers-checked", covers_checked.to_string())
}

/// Runs coherence and exactness over every irredundant cover of every
/// nonempty open.
pub fn is_sheaf(p: &GPresheaf) -> CheckReport {
    scan(p, true)
}

/// Exactness alone, over the same covers.
pub fn is_exact(p: &GPresheaf) -> CheckReport {
    scan(p, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Signature;
    use crate::presheaf::fixtures::{discrete_unglueable, sierpinski_collapse};
    use crate::structures::GStructure;
    use alloc::vec;

    #[test]
    fn irredundant_covers_of_tiny_spaces() {
        let space = FiniteSpace::sierpinski();
        let covers = irredundant_covers(&space, space.full_set());
        assert_eq!(covers, vec![vec![space.full_set()]]);

        let discrete = FiniteSpace::discrete(2);
        let covers = irredundant_covers(&discrete, discrete.full_set());
        assert_eq!(covers.len(), 2, "either the two points or the whole space");
        assert!(covers.contains(&vec![discrete.full_set()]));
        assert!(covers
            .contains(&vec![PointSet::singleton(0), PointSet::singleton(1)]));
    }

    #[test]
    fn constant_presheaves_are_sheaves_until_the_space_disconnects() {
        for space in [FiniteSpace::sierpinski(), FiniteSpace::indiscrete(3)] {
            let p = GPresheaf::constant(space, GStructure::plain(Signature::empty(), 2));
            assert!(is_sheaf(&p).is_ok());
        }
        let p = GPresheaf::constant(
            FiniteSpace::discrete(2),
            GStructure::plain(Signature::empty(), 2),
        );
        assert!(is_sheaf(&p).violations.iter().all(|v| v.rule == "exactness"));
        assert!(
            !is_exact(&p).is_ok(),
            "a mixed pair over the two isolated points never glues"
        );
    }

    #[test]
    fn collapsing_restrictions_break_coherence() {
        let space = FiniteSpace::discrete(2);
        let sig = Signature::empty();
        let big = GStructure::plain(sig.clone(), 2);
        let small = GStructure::plain(sig, 1);
        let p = PointSet::singleton(0);
        let q = PointSet::singleton(1);
        let x = space.full_set();
        let presheaf = GPresheaf {
            space,
            objects: [(p, small.clone()), (q, small), (x, big)].into_iter().collect(),
            restrictions: [((p, x), vec![0, 0]), ((q, x), vec![0, 0])].into_iter().collect(),
        };
        assert!(presheaf.validate().is_ok());
        let verdict = check_coherence(&presheaf, x, &[p, q]).unwrap();
        assert_eq!(verdict.violations.len(), 1);
        assert!(verdict.violations[0].witness.contains("0 and 1"));
        assert!(check_coherence(&presheaf, x, &[x]).unwrap().is_ok());
        assert!(!is_sheaf(&presheaf).is_ok());
    }

    #[test]
    fn disjoint_compatible_families_can_fail_to_glue() {
        let p = discrete_unglueable();
        let space = p.space.clone();
        let cover = [PointSet::singleton(0), PointSet::singleton(1)];
        let verdict = check_exactness(&p, space.full_set(), &cover).unwrap();
        assert!(!verdict.is_ok());
        assert!(verdict.violations.iter().any(|v| v.witness.contains("[1, 1]")));
        let whole = is_exact(&p);
        assert_eq!(whole.violations.len(), 3, "families (0,1), (1,0), (1,1) all fail");
    }

    #[test]
    fn the_collapse_presheaf_is_a_sheaf() {
        let p = sierpinski_collapse();
        assert!(is_sheaf(&p).is_ok());
    }

    #[test]
    fn bad_covers_are_refused() {
        let p = sierpinski_collapse();
        let full = p.space.full_set();
        let err = check_coherence(&p, full, &[PointSet::singleton(0)]).unwrap_err();
        assert!(err.violations.iter().any(|v| v.rule == "cover"));
        let err = check_exactness(&p, full, &[PointSet::EMPTY, full]).unwrap_err();
        assert!(err.violations.iter().any(|v| v.rule == "cover"));
    }
}
