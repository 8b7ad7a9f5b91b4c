//! Stalks as colimits over the opens containing a point.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::{covering_inclusions, GPresheaf, Section};
use crate::report::CheckReport;
use crate::structures::{colimit, orbit_structure, Colimit, DirectedSystem, Germ, GStructure, SystemEdge};
use crate::topology::PointSet;

/// The colimit of the structures on all opens containing one point.
/// Opens are indexed smallest first, so the minimal neighbourhood is
/// index 0 and the colimit coincides with the structure living on it.
#[derive(Debug, Clone)]
pub struct Stalk {
    pub point: usize,
    pub opens: Vec<PointSet>,
    pub system: DirectedSystem,
    pub colimit: Colimit,
}

impl Stalk {
    pub fn structure(&self) -> &GStructure {
        &self.colimit.structure
    }

    pub fn index_of(&self, u: PointSet) -> Option<usize> {
        self.opens.iter().position(|&v| v == u)
    }

    /// The class of an element of the structure on an open containing
    /// the base point.
    pub fn germ(&self, u: PointSet, element: usize) -> Option<Germ> {
        let i = self.index_of(u)?;
        if element >= self.system.objects[i].universe_size {
            return None;
        }
        Some(self.colimit.germ(i, element))
    }

    pub fn germ_of_section(&self, s: &Section) -> Option<Vec<Germ>> {
        s.values.iter().map(|&x| self.germ(s.domain, x)).collect()
    }
}

/// Builds the restriction system on a family of opens.  The family must
/// be an interval in the inclusion order (everything between its minimum
/// and the whole space), so the covering inclusions of the space restrict
/// to exactly the covering inclusions of the family.
pub(crate) fn system_over_opens(p: &GPresheaf, opens: &[PointSet]) -> DirectedSystem {
    let objects: Vec<GStructure> = opens.iter().map(|u| p.objects[u].clone()).collect();
    let edges = covering_inclusions(&p.space)
        .into_iter()
        .filter_map(|(u, v)| {
            let lower = opens.iter().position(|&w| w == u)?;
            let upper = opens.iter().position(|&w| w == v)?;
            Some(SystemEdge { lower, upper, map: p.restrictions[&(u, v)].clone() })
        })
        .collect();
    DirectedSystem { objects, edges }
}

pub fn stalk(p: &GPresheaf, x: usize) -> Result<Stalk, CheckReport> {
    let mut report = CheckReport::new("stalk").bound("point", x.to_string());
    if x >= p.space.num_points() {
        report.push(
            "unknown-point",
            format!("point {x} in a space of {} points", p.space.num_points()),
        );
        return Err(report);
    }
    let mut opens: Vec<PointSet> = p.space.nonempty_opens().filter(|u| u.contains(x)).collect();
    opens.sort_by_key(|u| (u.len(), u.bits()));
    let system = system_over_opens(p, &opens);
    let colim = colimit(&system)?;
    Ok(Stalk { point: x, opens, system, colimit: colim })
}

/// The germs of a section's components at a point of its domain.
pub fn germ_at(p: &GPresheaf, x: usize, s: &Section) -> Option<Vec<Germ>> {
    if !s.domain.contains(x) {
        return None;
    }
    stalk(p, x).ok()?.germ_of_section(s)
}

/// Collapses every structure of the presheaf to its orbit structure.
/// The restrictions descend because they are equivariant; the result
/// lives over the trivial group.
pub fn orbit_presheaf(p: &GPresheaf) -> Result<GPresheaf, CheckReport> {
    let mut objects = BTreeMap::new();
    let mut class_maps: BTreeMap<PointSet, Vec<usize>> = BTreeMap::new();
    for (&u, m) in &p.objects {
        match orbit_structure(m) {
            Ok(orbit) => {
                objects.insert(u, orbit.structure);
                class_maps.insert(u, orbit.class_of);
            }
            Err(sub) => {
                let mut report = CheckReport::new("orbit-presheaf");
                report.absorb(&format!("object-{u}"), sub);
                return Err(report);
            }
        }
    }
    let mut restrictions = BTreeMap::new();
    for (&(u, v), map) in &p.restrictions {
        let classes_v = &class_maps[&v];
        let classes_u = &class_maps[&u];
        let orbit_count = objects[&v].universe_size;
        let mut descended = alloc::vec![usize::MAX; orbit_count];
        for (x, &y) in map.iter().enumerate() {
            descended[classes_v[x]] = classes_u[y];
        }
        restrictions.insert((u, v), descended);
    }
    Ok(GPresheaf { space: p.space.clone(), objects, restrictions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Signature;
    use crate::presheaf::fixtures::sierpinski_collapse;
    use crate::structures::{FiniteGroup, GMorphism};
    use crate::topology::FiniteSpace;
    use alloc::string::String;
    use alloc::vec;

    #[test]
    fn stalks_live_on_the_minimal_neighbourhood() {
        let p = sierpinski_collapse();
        let open_point = stalk(&p, 0).unwrap();
        assert_eq!(open_point.structure(), &p.objects[&PointSet::singleton(0)]);
        let closed_point = stalk(&p, 1).unwrap();
        assert_eq!(closed_point.structure(), &p.objects[&p.space.full_set()]);

        for x in 0..2 {
            let s = stalk(&p, x).unwrap();
            let min = p.space.min_open_nbhd(x).unwrap();
            let i = s.index_of(min).unwrap();
            let arrow = s.colimit.cocone_morphism(&s.system, i);
            assert!(arrow.classify(1).isomorphism);
        }
    }

    #[test]
    fn unknown_points_are_refused() {
        let p = sierpinski_collapse();
        let err = stalk(&p, 5).unwrap_err();
        assert!(err.violations.iter().any(|v| v.rule == "unknown-point"));
    }

    #[test]
    fn germs_factor_through_restriction() {
        let p = sierpinski_collapse();
        let full = p.space.full_set();
        let s = Section { domain: full, values: vec![1] };
        let restricted = p.restrict_section(&s, PointSet::singleton(0)).unwrap();
        assert_eq!(germ_at(&p, 0, &s), germ_at(&p, 0, &restricted));
        assert!(germ_at(&p, 1, &restricted).is_none(), "the domain misses the point");

        let other = Section { domain: full, values: vec![0] };
        assert_eq!(germ_at(&p, 0, &s), germ_at(&p, 0, &other), "both collapse at the open point");
        assert_ne!(germ_at(&p, 1, &s), germ_at(&p, 1, &other));
    }

    #[test]
    fn orbit_presheaves_descend_the_restrictions() {
        let space = FiniteSpace::sierpinski();
        let sig = Signature::empty();
        let mut global = GStructure::plain(sig.clone(), 3);
        global.group = FiniteGroup::cyclic(2);
        global.action = vec![vec![0, 1, 2], vec![1, 0, 2]];
        let mut local = GStructure::plain(sig, 1);
        local.group = FiniteGroup::cyclic(2);
        local.action = vec![vec![0], vec![0]];
        let q = PointSet::singleton(0);
        let x = space.full_set();
        let p = GPresheaf {
            space,
            objects: [(q, local), (x, global)].into_iter().collect(),
            restrictions: [((q, x), vec![0, 0, 0])].into_iter().collect(),
        };
        assert!(p.validate().is_ok());
        let orbits = orbit_presheaf(&p).unwrap();
        assert!(orbits.validate().is_ok());
        assert_eq!(orbits.objects[&q].universe_size, 1);
        assert_eq!(orbits.objects[&x].universe_size, 2, "the swapped pair collapses");
        assert_eq!(orbits.restrictions[&(q, x)], vec![0, 0]);
        assert_eq!(orbits.objects[&x].group.order(), 1);
    }

    #[test]
    fn stalks_of_equivariant_presheaves_keep_the_action() {
        let space = FiniteSpace::sierpinski();
        let sig = crate::logic::parse_signature("rel R/1").unwrap();
        let mut m = GStructure::plain(sig, 2);
        m.group = FiniteGroup::cyclic(2);
        m.action = vec![vec![0, 1], vec![1, 0]];
        m.relations.insert(String::from("R"), [vec![0], vec![1]].into_iter().collect());
        let p = GPresheaf::constant(space, m.clone());
        assert!(p.validate().is_ok());
        let s = stalk(&p, 1).unwrap();
        assert_eq!(s.structure(), &m);
        assert!(s.structure().validate().is_ok());
        let id = GMorphism::identity(&m);
        assert_eq!(s.colimit.cocone_morphism(&s.system, 0).map, id.map);
    }
}
