//! Presheaves of structures over a finite space.
//!
//! A presheaf assigns a structure to every nonempty open and a
//! restriction morphism to every inclusion. Only the restrictions
//! along covering inclusions are stored; all other composites are
//! derived from them, and functoriality of the result is validated
//! rather than assumed.

mod sheaf;
mod stalk;

pub use sheaf::{check_coherence, check_exactness, irredundant_covers, is_exact, is_sheaf};
pub use stalk::{germ_at, orbit_presheaf, stalk, Stalk};
pub(crate) use stalk::system_over_opens;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::report::CheckReport;
use crate::structures::{GMorphism, GStructure};
use crate::topology::{FiniteSpace, PointSet};

/// A tuple of elements of the structure on one open.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Section {
    pub domain: PointSet,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GPresheaf {
    pub space: FiniteSpace,
    /// One structure per nonempty open.
    pub objects: BTreeMap<PointSet, GStructure>,
    /// Restriction maps, keyed `(smaller, larger)`, one per covering
    /// inclusion of nonempty opens. `restrictions[(u, v)][x]` is the
    /// restriction to u of element x of the structure on v.
    pub restrictions: BTreeMap<(PointSet, PointSet), Vec<usize>>,
}

/// The covering inclusions u ⊂ v of the nonempty opens: those with no
/// third open strictly between.
pub fn covering_inclusions(space: &FiniteSpace) -> Vec<(PointSet, PointSet)> {
    let opens: Vec<PointSet> = space.nonempty_opens().collect();
    let mut edges = Vec::new();
    for &u in &opens {
        for &v in &opens {
            if u == v || !u.is_subset(v) {
                continue;
            }
            let direct = !opens
                .iter()
                .any(|&w| w != u && w != v && u.is_subset(w) && w.is_subset(v));
            if direct {
                edges.push((u, v));
            }
        }
    }
    edges
}

impl GPresheaf {
    /// The same structure on every open, with identity restrictions.
    pub fn constant(space: FiniteSpace, m: GStructure) -> GPresheaf {
        let identity: Vec<usize> = (0..m.universe_size).collect();
        let restrictions = covering_inclusions(&space)
            .into_iter()
            .map(|edge| (edge, identity.clone()))
            .collect();
        let objects = space.nonempty_opens().map(|u| (u, m.clone())).collect();
        GPresheaf { space, objects, restrictions }
    }

    pub fn object(&self, u: PointSet) -> Option<&GStructure> {
        self.objects.get(&u)
    }

    /// All derived restriction maps, keyed `(smaller, larger)` over
    /// every inclusion of nonempty opens, identities included. When
    /// two composition routes disagree the first one found is kept;
    /// [`validate`](GPresheaf::validate) is what reports that.
    pub fn derived_restrictions(&self) -> BTreeMap<(PointSet, PointSet), Vec<usize>> {
        self.closure().0
    }

    fn closure(
        &self,
    ) -> (BTreeMap<(PointSet, PointSet), Vec<usize>>, Vec<(String, String)>) {
        let mut derived: BTreeMap<(PointSet, PointSet), Vec<usize>> = BTreeMap::new();
        let mut conflicts = Vec::new();
        let mut reported: BTreeSet<(PointSet, PointSet)> = BTreeSet::new();
        for (&u, m) in &self.objects {
            derived.insert((u, u), (0..m.universe_size).collect());
        }
        loop {
            let mut grew = false;
            let keys: Vec<(PointSet, PointSet)> = derived.keys().copied().collect();
            for (mid, top) in keys {
                for (&(low, edge_mid), map) in &self.restrictions {
                    if edge_mid != mid {
                        continue;
                    }
                    let via: Vec<usize> = derived[&(mid, top)].iter().map(|&x| map[x]).collect();
                    match derived.get(&(low, top)) {
                        None => {
                            derived.insert((low, top), via);
                            grew = true;
                        }
                        Some(existing) if *existing != via && reported.insert((low, top)) => {
                            conflicts.push((
                                String::from("functoriality"),
                                format!("two restriction routes from {top} to {low} disagree"),
                            ));
                        }
                        Some(_) => {}
                    }
                }
            }
            if !grew {
                return (derived, conflicts);
            }
        }
    }

    /// The derived restriction from the structure on v down to the one
    /// on u, packaged as a morphism.
    pub fn restriction_morphism(&self, u: PointSet, v: PointSet) -> Option<GMorphism> {
        let map = self.derived_restrictions().get(&(u, v))?.clone();
        Some(GMorphism {
            source: self.objects.get(&v)?.clone(),
            target: self.objects.get(&u)?.clone(),
            map,
        })
    }

    pub fn restrict_section(&self, s: &Section, to: PointSet) -> Option<Section> {
        let derived = self.derived_restrictions();
        let map = derived.get(&(to, s.domain))?;
        Some(Section { domain: to, values: s.values.iter().map(|&x| map[x]).collect() })
    }

    pub fn validate(&self) -> CheckReport {
        let mut report = CheckReport::new("presheaf")
            .bound("opens", self.objects.len().to_string());
        report.absorb("space", self.space.validate());
        if !report.is_ok() {
            return report;
        }
        for u in self.space.nonempty_opens() {
            if !self.objects.contains_key(&u) {
                report.push("objects-cover-opens", format!("no structure on {u}"));
            }
        }
        for &u in self.objects.keys() {
            if u.is_empty() || !self.space.is_open(u) {
                report.push("objects-match-opens", format!("{u} is not a nonempty open"));
            }
        }
        if !report.is_ok() {
            return report;
        }
        for (&u, m) in &self.objects {
            report.absorb(&format!("object-{u}"), m.validate());
        }
        if let Some(first) = self.objects.values().next() {
            for (&u, m) in &self.objects {
                if m.sig != first.sig {
                    report.push("shared-signature", format!("the structure on {u} differs"));
                }
                if m.group != first.group {
                    report.push("shared-group", format!("the structure on {u} differs"));
                }
                if m.mode != first.mode {
                    report.push("shared-mode", format!("the structure on {u} differs"));
                }
            }
        }
        let edges = covering_inclusions(&self.space);
        for edge in &edges {
            if !self.restrictions.contains_key(edge) {
                report.push(
                    "restrictions-match-inclusions",
                    format!("no restriction from {} to {}", edge.1, edge.0),
                );
            }
        }
        for key in self.restrictions.keys() {
            if !edges.contains(key) {
                report.push(
                    "restrictions-match-inclusions",
                    format!("({}, {}) is not a covering inclusion", key.0, key.1),
                );
            }
        }
        if !report.is_ok() {
            return report;
        }
        for (&(u, v), map) in &self.restrictions {
            let arrow = GMorphism {
                source: self.objects[&v].clone(),
                target: self.objects[&u].clone(),
                map: map.clone(),
            };
            report.absorb(&format!("restriction-{v}-to-{u}"), arrow.validate());
        }
        if !report.is_ok() {
            return report;
        }
        let (_, conflicts) = self.closure();
        for (rule, witness) in conflicts {
            report.push(rule, witness);
        }
        report
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::logic::parse_signature;
    use alloc::vec;

    /// The two-point space with one open point, carrying a two-element
    /// structure globally and its one-point collapse on the open
    /// point; the relation holds only after restriction.
    pub fn sierpinski_collapse() -> GPresheaf {
        let space = FiniteSpace::sierpinski();
        let sig = parse_signature("rel R/1").unwrap();
        let mut global = GStructure::plain(sig.clone(), 2);
        global.relations.insert(String::from("R"), [vec![1]].into_iter().collect());
        let mut local = GStructure::plain(sig, 1);
        local.relations.insert(String::from("R"), [vec![0]].into_iter().collect());
        let p = PointSet::singleton(0);
        let x = space.full_set();
        let objects = [(p, local), (x, global)].into_iter().collect();
        let restrictions = [((p, x), vec![0, 0])].into_iter().collect();
        GPresheaf { space, objects, restrictions }
    }

    /// Discrete two-point space with a singleton global structure and
    /// two-element structures on the points: compatible families need
    /// not glue.
    pub fn discrete_unglueable() -> GPresheaf {
        let space = FiniteSpace::discrete(2);
        let sig = parse_signature("").unwrap();
        let small = GStructure::plain(sig.clone(), 1);
        let big = GStructure::plain(sig, 2);
        let p = PointSet::singleton(0);
        let q = PointSet::singleton(1);
        let x = space.full_set();
        let objects = [(p, big.clone()), (q, big), (x, small)].into_iter().collect();
        let restrictions = [((p, x), vec![0]), ((q, x), vec![0])].into_iter().collect();
        GPresheaf { space, objects, restrictions }
    }
}
