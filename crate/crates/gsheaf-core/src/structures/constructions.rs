//! Images, quotients, and orbit structures.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::group::FiniteGroup;
use super::gstructure::{each_tuple, GStructure};
use super::morphism::{index_of, GMorphism};
use crate::report::CheckReport;

#[derive(Debug, Clone)]
pub struct ImageFactorization {
    pub image: GStructure,
    pub corestriction: GMorphism,
    pub inclusion: GMorphism,
}

/// The substructure of the target carried by the image of a saturated
/// morphism, with the two maps that factor the original through it.
/// The corestriction comes out surjective and saturated, the inclusion
/// injective and saturated.
pub fn image_substructure(f: &GMorphism) -> Result<ImageFactorization, CheckReport> {
    let mut report = CheckReport::new("image");
    report.absorb("morphism", f.validate());
    if report.is_ok() && !f.is_saturated() {
        report.push("saturated", String::from("the map is not saturated"));
    }
    if !report.is_ok() {
        return Err(report);
    }

    let mut elements: Vec<usize> = f.map.clone();
    elements.sort_unstable();
    elements.dedup();
    let back: BTreeMap<usize, usize> =
        elements.iter().enumerate().map(|(i, &y)| (y, i)).collect();
    let n = elements.len();

    let mut functions = BTreeMap::new();
    for (name, table) in &f.target.functions {
        let arity = f.target.sig.function_arity(name).unwrap_or(0);
        let mut restricted = Vec::new();
        each_tuple(n, arity, |idx| {
            let args: Vec<usize> = idx.iter().map(|&i| elements[i]).collect();
            let value = table[index_of(&args, f.target.universe_size)];
            restricted.push(back[&value]);
        });
        functions.insert(name.clone(), restricted);
    }
    let mut relations = BTreeMap::new();
    for (name, tuples) in &f.target.relations {
        let restricted = tuples
            .iter()
            .filter(|t| t.iter().all(|x| back.contains_key(x)))
            .map(|t| t.iter().map(|x| back[x]).collect())
            .collect();
        relations.insert(name.clone(), restricted);
    }
    let constants = f
        .target
        .constants
        .iter()
        .map(|(name, c)| (name.clone(), back[c]))
        .collect();
    let action = f
        .target
        .action
        .iter()
        .map(|row| elements.iter().map(|&y| back[&row[y]]).collect())
        .collect();

    let image = GStructure {
        sig: f.target.sig.clone(),
        group: f.target.group.clone(),
        universe_size: n,
        functions,
        relations,
        constants,
        action,
        mode: f.target.mode,
    };
    let corestriction = GMorphism {
        source: f.source.clone(),
        target: image.clone(),
        map: f.map.iter().map(|y| back[y]).collect(),
    };
    let inclusion = GMorphism { source: image.clone(), target: f.target.clone(), map: elements };
    Ok(ImageFactorization { image, corestriction, inclusion })
}

/// Quotients a structure by an explicit partition, checking that the
/// functions and the action descend to it; the relations become the
/// projection images. The same signature, group, and invariance mode
/// carry over.
pub fn quotient_by_partition(
    m: &GStructure,
    class_of: &[usize],
    num_classes: usize,
) -> Result<(GStructure, GMorphism), CheckReport> {
    let n = m.universe_size;
    let mut report =
        CheckReport::new("quotient").bound("classes", num_classes.to_string());
    if class_of.len() != n {
        report.push(
            "partition-shape",
            format!("{} class assignments for {n} elements", class_of.len()),
        );
        return Err(report);
    }
    let mut representative = vec![usize::MAX; num_classes];
    for (x, &c) in class_of.iter().enumerate() {
        if c >= num_classes {
            report.push("partition-shape", format!("element {x} assigned to class {c}"));
            return Err(report);
        }
        if representative[c] == usize::MAX {
            representative[c] = x;
        }
    }
    if let Some(empty) = representative.iter().position(|&r| r == usize::MAX) {
        report.push("classes-inhabited", format!("class {empty} has no elements"));
        return Err(report);
    }

    let mut functions = BTreeMap::new();
    for (name, table) in &m.functions {
        let arity = m.sig.function_arity(name).unwrap_or(0);
        let mut descended = Vec::new();
        each_tuple(num_classes, arity, |cs| {
            let reps: Vec<usize> = cs.iter().map(|&c| representative[c]).collect();
            descended.push(class_of[table[index_of(&reps, n)]]);
        });
        each_tuple(n, arity, |args| {
            let cs: Vec<usize> = args.iter().map(|&x| class_of[x]).collect();
            let through_quotient = descended[index_of(&cs, num_classes)];
            let direct = class_of[table[index_of(args, n)]];
            if through_quotient != direct {
                report.push("functions-respect-partition", format!("'{name}'{args:?}"));
            }
        });
        functions.insert(name.clone(), descended);
    }

    let mut action = Vec::new();
    for g in m.group.elements() {
        let row: Vec<usize> =
            (0..num_classes).map(|c| class_of[m.act(g, representative[c])]).collect();
        for x in 0..n {
            if class_of[m.act(g, x)] != row[class_of[x]] {
                report.push("action-respects-partition", format!("{g} applied to {x}"));
            }
        }
        action.push(row);
    }
    if !report.is_ok() {
        return Err(report);
    }

    let relations = m
        .relations
        .iter()
        .map(|(name, tuples)| {
            let projected = tuples
                .iter()
                .map(|t| t.iter().map(|&x| class_of[x]).collect())
                .collect();
            (name.clone(), projected)
        })
        .collect();
    let constants =
        m.constants.iter().map(|(name, &c)| (name.clone(), class_of[c])).collect();

    let quotient = GStructure {
        sig: m.sig.clone(),
        group: m.group.clone(),
        universe_size: num_classes,
        functions,
        relations,
        constants,
        action,
        mode: m.mode,
    };
    let projection =
        GMorphism { source: m.clone(), target: quotient.clone(), map: class_of.to_vec() };
    Ok((quotient, projection))
}

#[derive(Debug, Clone)]
pub struct QuotientFactorization {
    pub quotient: GStructure,
    pub projection: GMorphism,
    pub induced_iso: GMorphism,
}

/// Quotients the source of a saturated morphism by its kernel
/// equivalence. The projection is a submersion, and the induced map
/// onto the image substructure is an isomorphism.
pub fn quotient_structure(f: &GMorphism) -> Result<QuotientFactorization, CheckReport> {
    let factor = image_substructure(f).map_err(|mut r| {
        r.check = String::from("kernel-quotient");
        r
    })?;

    let mut class_of = Vec::with_capacity(f.source.universe_size);
    let mut class_of_value: BTreeMap<usize, usize> = BTreeMap::new();
    for &y in &f.map {
        let next = class_of_value.len();
        let class = *class_of_value.entry(y).or_insert(next);
        class_of.push(class);
    }
    let num_classes = class_of_value.len();
    let (quotient, projection) = quotient_by_partition(&f.source, &class_of, num_classes)?;

    let mut value_of_class = vec![0usize; num_classes];
    for (&value, &class) in &class_of_value {
        value_of_class[class] = value;
    }
    let induced_iso = GMorphism {
        source: quotient.clone(),
        target: factor.image.clone(),
        map: value_of_class
            .iter()
            .map(|y| factor.inclusion.map.iter().position(|z| z == y).unwrap())
            .collect(),
    };
    Ok(QuotientFactorization { quotient, projection, induced_iso })
}

#[derive(Debug, Clone)]
pub struct OrbitQuotient {
    /// The induced structure on the orbit set, over the trivial group.
    pub structure: GStructure,
    /// Which orbit each original element belongs to.
    pub class_of: Vec<usize>,
}

/// Collapses a structure to its set of orbits. Function symbols only
/// descend when they are coordinatewise equivariant, so that check is
/// a precondition; it stands in for the usual single-g function law,
/// which is neither implied by it nor needed here.
pub fn orbit_structure(m: &GStructure) -> Result<OrbitQuotient, CheckReport> {
    let mut report = CheckReport::new("orbit");
    let mut base = m.validate();
    base.violations.retain(|v| v.rule != "functions-equivariant");
    report.absorb("structure", base);
    if report.is_ok() {
        report.absorb("strong", m.check_strong_equivariance());
    }
    if !report.is_ok() {
        return Err(report);
    }

    let n = m.universe_size;
    let mut class_of = vec![usize::MAX; n];
    let mut num_orbits = 0;
    for start in 0..n {
        if class_of[start] != usize::MAX {
            continue;
        }
        let orbit = num_orbits;
        num_orbits += 1;
        let mut queue = vec![start];
        class_of[start] = orbit;
        while let Some(x) = queue.pop() {
            for g in m.group.elements() {
                let y = m.act(g, x);
                if class_of[y] == usize::MAX {
                    class_of[y] = orbit;
                    queue.push(y);
                }
            }
        }
    }

    let (mut structure, _) = quotient_by_partition(m, &class_of, num_orbits)?;
    structure.group = FiniteGroup::trivial();
    structure.action = vec![(0..num_orbits).collect()];
    Ok(OrbitQuotient { structure, class_of })
}
