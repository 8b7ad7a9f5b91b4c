//! Colimits of downward-directed systems of structures.
//!
//! A system stores one structure per index and explicit arrows only
//! for the covering relation of the preorder; composite arrows are
//! derived and checked for coherence. Arrows point from an index to a
//! smaller one, the way restriction maps do.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};

use alloc::vec::Vec;

use super::gstructure::{each_tuple, GStructure};
use super::morphism::{index_of, GMorphism};
use crate::report::CheckReport;

/// An arrow of the system: `map` carries elements of `objects[upper]`
/// to elements of `objects[lower]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemEdge {
    pub lower: usize,
    pub upper: usize,
    pub map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedSystem {
    pub objects: Vec<GStructure>,
    pub edges: Vec<SystemEdge>,
}

/// One element of a colimit: its class id together with the first
/// (index, element) pair that lands in the class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Germ {
    pub class: usize,
    pub representative: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct Colimit {
    pub structure: GStructure,
    /// `cocone[i][x]` is the class of element x of the i-th object.
    pub cocone: Vec<Vec<usize>>,
    pub reps: Vec<(usize, usize)>,
}

impl Colimit {
    pub fn germ(&self, index: usize, element: usize) -> Germ {
        let class = self.cocone[index][element];
        Germ { class, representative: self.reps[class] }
    }

    pub fn cocone_morphism(&self, sys: &DirectedSystem, index: usize) -> GMorphism {
        GMorphism {
            source: sys.objects[index].clone(),
            target: self.structure.clone(),
            map: self.cocone[index].clone(),
        }
    }
}

impl DirectedSystem {
    /// All arrow composites, keyed by `(lower, upper)`, including the
    /// identity at each index. Conflicting composites keep the first
    /// one found; `validate` is what reports them.
    pub fn derived_maps(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        self.closure().0
    }

    fn closure(&self) -> (BTreeMap<(usize, usize), Vec<usize>>, Vec<(String, String)>) {
        let mut derived: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut conflicts = Vec::new();
        let mut reported: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (i, m) in self.objects.iter().enumerate() {
            derived.insert((i, i), (0..m.universe_size).collect());
        }
        loop {
            let mut grew = false;
            let keys: Vec<(usize, usize)> = derived.keys().copied().collect();
            for (mid, upper) in keys {
                for e in &self.edges {
                    if e.upper != mid {
                        continue;
                    }
                    let via: Vec<usize> =
                        derived[&(mid, upper)].iter().map(|&x| e.map[x]).collect();
                    match derived.get(&(e.lower, upper)) {
                        None => {
                            derived.insert((e.lower, upper), via);
                            grew = true;
                        }
                        Some(existing) if *existing != via && reported.insert((e.lower, upper)) => {
                            conflicts.push((
                                String::from("coherence"),
                                format!(
                                    "two arrow composites from {upper} to {} disagree",
                                    e.lower
                                ),
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

    pub fn validate(&self) -> CheckReport {
        let mut report = CheckReport::new("directed-system")
            .bound("objects", self.objects.len().to_string())
            .bound("edges", self.edges.len().to_string());
        if self.objects.is_empty() {
            report.push("nonempty", String::from("the system has no objects"));
            return report;
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.lower >= self.objects.len() || e.upper >= self.objects.len() {
                report.push("edge-range", format!("edge {k} mentions a missing index"));
            } else if e.lower == e.upper {
                report.push("edge-range", format!("edge {k} loops at index {}", e.lower));
            }
        }
        let first = &self.objects[0];
        for (i, m) in self.objects.iter().enumerate() {
            if m.sig != first.sig {
                report.push("shared-signature", format!("object {i} differs from object 0"));
            }
            if m.group != first.group {
                report.push("shared-group", format!("object {i} differs from object 0"));
            }
            if m.mode != first.mode {
                report.push("shared-mode", format!("object {i} differs from object 0"));
            }
        }
        if !report.is_ok() {
            return report;
        }
        for e in &self.edges {
            let arrow = GMorphism {
                source: self.objects[e.upper].clone(),
                target: self.objects[e.lower].clone(),
                map: e.map.clone(),
            };
            report.absorb(&format!("arrow-{}-to-{}", e.upper, e.lower), arrow.validate());
        }
        if !report.is_ok() {
            return report;
        }
        let (derived, conflicts) = self.closure();
        for (rule, witness) in conflicts {
            report.push(rule, witness);
        }
        for i in 0..self.objects.len() {
            for j in i + 1..self.objects.len() {
                let bounded = (0..self.objects.len())
                    .any(|k| derived.contains_key(&(k, i)) && derived.contains_key(&(k, j)));
                if !bounded {
                    report.push("directed", format!("indices {i} and {j} have no common lower bound"));
                }
            }
        }
        report
    }
}

/// Glues the system into one structure: the disjoint union of the
/// objects, merging two elements whenever some arrows carry them to
/// the same place. Class ids follow the first (index, element) pair
/// of each class.
pub fn colimit(sys: &DirectedSystem) -> Result<Colimit, CheckReport> {
    let report = sys.validate();
    if !report.is_ok() {
        return Err(report);
    }
    let derived = sys.derived_maps();

    let mut offset = Vec::with_capacity(sys.objects.len());
    let mut total = 0usize;
    for m in &sys.objects {
        offset.push(total);
        total += m.universe_size;
    }

    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &sys.edges {
        for (x, &y) in e.map.iter().enumerate() {
            let a = find(&mut parent, offset[e.upper] + x);
            let b = find(&mut parent, offset[e.lower] + y);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }

    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut reps: Vec<(usize, usize)> = Vec::new();
    let mut cocone: Vec<Vec<usize>> = Vec::new();
    for (i, m) in sys.objects.iter().enumerate() {
        let mut row = Vec::with_capacity(m.universe_size);
        for x in 0..m.universe_size {
            let root = find(&mut parent, offset[i] + x);
            let next = reps.len();
            let class = *class_of_root.entry(root).or_insert(next);
            if class == reps.len() {
                reps.push((i, x));
            }
            row.push(class);
        }
        cocone.push(row);
    }
    let num_classes = reps.len();

    let shared = &sys.objects[0];
    let common_lower_bound = |indices: &[usize]| -> usize {
        (0..sys.objects.len())
            .find(|&j| indices.iter().all(|&i| derived.contains_key(&(j, i))))
            .expect("a validated system has common lower bounds")
    };

    let mut functions = BTreeMap::new();
    for (name, _) in shared.sig.functions() {
        let arity = shared.sig.function_arity(name).unwrap_or(0);
        let mut table = Vec::new();
        each_tuple(num_classes, arity, |classes| {
            let indices: Vec<usize> = classes.iter().map(|&c| reps[c].0).collect();
            let j = common_lower_bound(&indices);
            let args: Vec<usize> = classes
                .iter()
                .map(|&c| {
                    let (i, x) = reps[c];
                    derived[&(j, i)][x]
                })
                .collect();
            let low = &sys.objects[j];
            let value = low.functions[name.as_str()][index_of(&args, low.universe_size)];
            table.push(cocone[j][value]);
        });
        functions.insert(name.clone(), table);
    }

    let mut relations: BTreeMap<String, BTreeSet<Vec<usize>>> = BTreeMap::new();
    for (name, _) in shared.sig.relations() {
        let mut glued = BTreeSet::new();
        for (i, m) in sys.objects.iter().enumerate() {
            for t in &m.relations[name.as_str()] {
                glued.insert(t.iter().map(|&x| cocone[i][x]).collect());
            }
        }
        relations.insert(name.clone(), glued);
    }

    let constants = shared
        .constants
        .keys()
        .map(|name| (name.clone(), cocone[0][sys.objects[0].constants[name]]))
        .collect();

    let action = shared
        .group
        .elements()
        .map(|g| {
            (0..num_classes)
                .map(|c| {
                    let (i, x) = reps[c];
                    cocone[i][sys.objects[i].act(g, x)]
                })
                .collect()
        })
        .collect();

    let structure = GStructure {
        sig: shared.sig.clone(),
        group: shared.group.clone(),
        universe_size: num_classes,
        functions,
        relations,
        constants,
        action,
        mode: shared.mode,
    };
    Ok(Colimit { structure, cocone, reps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{enumerate_formulas, is_positive, parse_signature, Signature};
    use crate::structures::group::FiniteGroup;
    use crate::structures::gstructure::fixtures::two_points_swapped;

    fn plain_system(sizes: &[usize], edges: Vec<SystemEdge>) -> DirectedSystem {
        let objects =
            sizes.iter().map(|&n| GStructure::plain(Signature::empty(), n)).collect();
        DirectedSystem { objects, edges }
    }

    #[test]
    fn a_single_object_is_its_own_colimit() {
        let m = two_points_swapped(&[0, 1]);
        let sys = DirectedSystem { objects: vec![m.clone()], edges: vec![] };
        let colim = colimit(&sys).unwrap();
        assert_eq!(colim.structure, m);
        assert_eq!(colim.cocone, vec![vec![0, 1]]);
        assert!(colim.cocone_morphism(&sys, 0).classify(1).isomorphism);
    }

    #[test]
    fn a_collapsing_arrow_merges_the_upper_object() {
        let sys = plain_system(
            &[1, 2],
            vec![SystemEdge { lower: 0, upper: 1, map: vec![0, 0] }],
        );
        let colim = colimit(&sys).unwrap();
        assert_eq!(colim.structure.universe_size, 1);
        assert_eq!(colim.germ(1, 0), colim.germ(1, 1));
        assert_eq!(colim.germ(1, 0).representative, (0, 0));
    }

    #[test]
    fn identity_chains_change_nothing() {
        let m = two_points_swapped(&[0, 1]);
        let id = |lower, upper| SystemEdge { lower, upper, map: vec![0, 1] };
        let sys = DirectedSystem {
            objects: vec![m.clone(), m.clone(), m.clone()],
            edges: vec![id(0, 1), id(1, 2)],
        };
        let colim = colimit(&sys).unwrap();
        assert_eq!(colim.structure, m);
        for i in 0..3 {
            let arrow = colim.cocone_morphism(&sys, i);
            assert!(arrow.validate().is_ok());
            assert!(arrow.classify(1).isomorphism);
        }
    }

    #[test]
    fn v_shapes_merge_through_the_bottom() {
        let sys = plain_system(
            &[1, 1, 1],
            vec![
                SystemEdge { lower: 0, upper: 1, map: vec![0] },
                SystemEdge { lower: 0, upper: 2, map: vec![0] },
            ],
        );
        let colim = colimit(&sys).unwrap();
        assert_eq!(colim.structure.universe_size, 1);
        assert_eq!(colim.germ(1, 0).class, colim.germ(2, 0).class);
    }

    #[test]
    fn inconsistent_composites_are_a_coherence_violation() {
        let sys = plain_system(
            &[2, 2, 2, 2],
            vec![
                SystemEdge { lower: 1, upper: 3, map: vec![0, 1] },
                SystemEdge { lower: 2, upper: 3, map: vec![0, 1] },
                SystemEdge { lower: 0, upper: 1, map: vec![0, 1] },
                SystemEdge { lower: 0, upper: 2, map: vec![1, 0] },
            ],
        );
        let report = sys.validate();
        assert!(report.violations.iter().any(|v| v.rule == "coherence"));
        assert!(colimit(&sys).is_err());
    }

    #[test]
    fn unrelated_indices_are_rejected() {
        let sys = plain_system(&[1, 1], vec![]);
        let report = sys.validate();
        assert!(report.violations.iter().any(|v| v.rule == "directed"));
    }

    #[test]
    fn germs_satisfy_a_positive_formula_exactly_when_some_restriction_does() {
        let sig = parse_signature("rel R/1").unwrap();
        let mut top = GStructure::plain(sig.clone(), 2);
        top.relations.insert(String::from("R"), [vec![1]].into_iter().collect());
        let mut bottom = GStructure::plain(sig.clone(), 2);
        bottom
            .relations
            .insert(String::from("R"), [vec![0], vec![1]].into_iter().collect());
        let sys = DirectedSystem {
            objects: vec![bottom, top],
            edges: vec![SystemEdge { lower: 0, upper: 1, map: vec![0, 1] }],
        };
        let colim = colimit(&sys).unwrap();
        let derived = sys.derived_maps();

        for phi in enumerate_formulas(&sig, 2, 2) {
            if !is_positive(&phi) {
                continue;
            }
            let vars: Vec<usize> = crate::logic::free_variables(&phi).into_iter().collect();
            for (i, m) in sys.objects.iter().enumerate() {
                each_tuple(m.universe_size, vars.len(), |values| {
                    let at_colimit: BTreeMap<usize, usize> = vars
                        .iter()
                        .copied()
                        .zip(values.iter().map(|&x| colim.cocone[i][x]))
                        .collect();
                    let lhs = colim.structure.satisfies(&phi, &at_colimit).unwrap();
                    let rhs = (0..sys.objects.len()).any(|j| {
                        let Some(map) = derived.get(&(j, i)) else { return false };
                        let pushed: BTreeMap<usize, usize> = vars
                            .iter()
                            .copied()
                            .zip(values.iter().map(|&x| map[x]))
                            .collect();
                        sys.objects[j].satisfies(&phi, &pushed).unwrap()
                    });
                    assert_eq!(lhs, rhs, "mismatch for {phi} at index {i}");
                });
            }
        }
    }

    #[test]
    fn colimits_keep_the_group_action_lawful() {
        let top = two_points_swapped(&[0, 1]);
        let sig = top.sig.clone();
        let mut bottom = GStructure::plain(sig, 1);
        bottom.group = FiniteGroup::cyclic(2);
        bottom.action = vec![vec![0], vec![0]];
        bottom.relations.insert(String::from("R"), [vec![0]].into_iter().collect());
        let sys = DirectedSystem {
            objects: vec![bottom, top],
            edges: vec![SystemEdge { lower: 0, upper: 1, map: vec![0, 0] }],
        };
        let colim = colimit(&sys).unwrap();
        assert_eq!(colim.structure.universe_size, 1);
        assert!(colim.structure.validate().is_ok());
        for i in 0..2 {
            assert!(colim.cocone_morphism(&sys, i).validate().is_ok());
        }
    }
}
