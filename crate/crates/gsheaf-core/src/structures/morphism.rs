//! Maps between structures that commute with the symbols and the
//! group action, and what they preserve.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::gstructure::{each_tuple, EvalError, GStructure};
use crate::logic::{enumerate_formulas, free_variables, Formula};
use crate::report::CheckReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GMorphism {
    pub source: GStructure,
    pub target: GStructure,
    /// `map[x]` is where source element x goes.
    pub map: Vec<usize>,
}

/// What a morphism turned out to be, as far as finite checking can
/// tell. `elementary_up_to_depth` means every formula of at most the
/// recorded depth, in at most two free variables, transfers in both
/// directions along the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorphismClass {
    pub injective: bool,
    pub surjective: bool,
    pub saturated: bool,
    pub embedding: bool,
    pub submersion: bool,
    pub isomorphism: bool,
    pub elementary_up_to_depth: bool,
    pub depth: usize,
}

impl GMorphism {
    pub fn identity(m: &GStructure) -> GMorphism {
        GMorphism {
            source: m.clone(),
            target: m.clone(),
            map: (0..m.universe_size).collect(),
        }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn apply_tuple(&self, xs: &[usize]) -> Vec<usize> {
        xs.iter().map(|&x| self.map[x]).collect()
    }

    /// Composition, this morphism first.
    pub fn then(&self, next: &GMorphism) -> GMorphism {
        GMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|&x| next.map[x]).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let seen: BTreeSet<usize> = self.map.iter().copied().collect();
        seen.len() == self.map.len()
    }

    pub fn is_surjective(&self) -> bool {
        let seen: BTreeSet<usize> = self.map.iter().copied().collect();
        seen.len() == self.target.universe_size
    }

    /// Whether every target tuple inside the image that satisfies a
    /// relation already comes from a source tuple satisfying it.
    pub fn is_saturated(&self) -> bool {
        for (name, tuples) in &self.source.relations {
            let Some(target_tuples) = self.target.relations.get(name) else {
                return false;
            };
            let arity = match self.source.sig.relation_arity(name) {
                Some(a) => a,
                None => continue,
            };
            let mut bad = false;
            each_tuple(self.source.universe_size, arity, |xs| {
                if !bad && target_tuples.contains(&self.apply_tuple(xs)) && !tuples.contains(xs) {
                    bad = true;
                }
            });
            if bad {
                return false;
            }
        }
        true
    }

    /// Checks the structure-map laws: totality, commutation with every
    /// function, constant, and the group action, and preservation of
    /// relations forward.
    pub fn validate(&self) -> CheckReport {
        let mut report = CheckReport::new("morphism")
            .bound("source", self.source.universe_size.to_string())
            .bound("target", self.target.universe_size.to_string());
        if self.source.sig != self.target.sig {
            report.push("same-signature", String::from("source and target disagree"));
        }
        if self.source.group != self.target.group {
            report.push("same-group", String::from("source and target disagree"));
        }
        if self.map.len() != self.source.universe_size {
            report.push(
                "map-total",
                format!("{} entries for {} elements", self.map.len(), self.source.universe_size),
            );
        } else if let Some(&bad) = self.map.iter().find(|&&y| y >= self.target.universe_size) {
            report.push("map-total", format!("maps into {bad}, outside the target"));
        }
        if !report.is_ok() {
            return report;
        }

        for (name, &c) in &self.source.constants {
            match self.target.constants.get(name) {
                Some(&d) if self.map[c] == d => {}
                _ => report.push("constants-preserved", format!("'{name}' is not sent to itself")),
            }
        }
        for (name, table) in &self.source.functions {
            let arity = self.source.sig.function_arity(name).unwrap_or(0);
            let Some(target_table) = self.target.functions.get(name) else {
                report.push("functions-commute", format!("'{name}' missing in the target"));
                continue;
            };
            each_tuple(self.source.universe_size, arity, |args| {
                let through_source = self.map[table[index_of(args, self.source.universe_size)]];
                let moved = self.apply_tuple(args);
                let through_target = target_table[index_of(&moved, self.target.universe_size)];
                if through_source != through_target {
                    report.push("functions-commute", format!("'{name}'{args:?}"));
                }
            });
        }
        for (name, tuples) in &self.source.relations {
            let Some(target_tuples) = self.target.relations.get(name) else {
                report.push("relations-preserved", format!("'{name}' missing in the target"));
                continue;
            };
            for t in tuples {
                if !target_tuples.contains(&self.apply_tuple(t)) {
                    report.push("relations-preserved", format!("'{name}'{t:?} is dropped"));
                }
            }
        }
        for g in self.source.group.elements() {
            for x in self.source.elements() {
                if self.map[self.source.act(g, x)] != self.target.act(g, self.map[x]) {
                    report.push("equivariant", format!("{g} applied to {x}"));
                }
            }
        }
        report
    }

    /// Whether satisfaction of `phi` transfers along the map: every
    /// source assignment satisfying it lands on a target assignment
    /// satisfying it.
    pub fn preserves_formula(&self, phi: &Formula) -> Result<bool, EvalError> {
        let vars: Vec<usize> = free_variables(phi).into_iter().collect();
        let mut preserved = true;
        let mut err = None;
        each_tuple(self.source.universe_size, vars.len(), |values| {
            if !preserved || err.is_some() {
                return;
            }
            let assignment: BTreeMap<usize, usize> =
                vars.iter().copied().zip(values.iter().copied()).collect();
            match self.source.satisfies(phi, &assignment) {
                Err(e) => err = Some(e),
                Ok(false) => {}
                Ok(true) => {
                    let moved: BTreeMap<usize, usize> = vars
                        .iter()
                        .copied()
                        .zip(values.iter().map(|&x| self.map[x]))
                        .collect();
                    match self.target.satisfies(phi, &moved) {
                        Err(e) => err = Some(e),
                        Ok(true) => {}
                        Ok(false) => preserved = false,
                    }
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(preserved),
        }
    }

    /// Like [`preserves_formula`](GMorphism::preserves_formula) but
    /// demanding transfer in both directions.
    pub fn reflects_and_preserves(&self, phi: &Formula) -> Result<bool, EvalError> {
        let vars: Vec<usize> = free_variables(phi).into_iter().collect();
        let mut agrees = true;
        let mut err = None;
        each_tuple(self.source.universe_size, vars.len(), |values| {
            if !agrees || err.is_some() {
                return;
            }
            let assignment: BTreeMap<usize, usize> =
                vars.iter().copied().zip(values.iter().copied()).collect();
            let moved: BTreeMap<usize, usize> =
                vars.iter().copied().zip(values.iter().map(|&x| self.map[x])).collect();
            match (self.source.satisfies(phi, &assignment), self.target.satisfies(phi, &moved)) {
                (Err(e), _) | (_, Err(e)) => err = Some(e),
                (Ok(a), Ok(b)) => agrees = a == b,
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(agrees),
        }
    }

    /// Classifies the map, checking elementarity over every formula of
    /// depth at most `depth` with free variables among v0, v1.
    pub fn classify(&self, depth: usize) -> MorphismClass {
        let injective = self.is_injective();
        let surjective = self.is_surjective();
        let saturated = self.is_saturated();
        let mut elementary = true;
        for phi in enumerate_formulas(&self.source.sig, depth, 2) {
            if !self.reflects_and_preserves(&phi).unwrap_or(false) {
                elementary = false;
                break;
            }
        }
        MorphismClass {
            injective,
            surjective,
            saturated,
            embedding: injective && saturated,
            submersion: surjective && saturated,
            isomorphism: injective && surjective && saturated,
            elementary_up_to_depth: elementary,
            depth,
        }
    }

    /// The inverse of a bijective morphism, if the inverse is itself
    /// a morphism.
    pub fn inverse(&self) -> Option<GMorphism> {
        if !self.is_injective() || !self.is_surjective() {
            return None;
        }
        let mut back = vec![0usize; self.target.universe_size];
        for (x, &y) in self.map.iter().enumerate() {
            back[y] = x;
        }
        let candidate = GMorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            map: back,
        };
        candidate.validate().is_ok().then_some(candidate)
    }
}

pub(crate) fn index_of(args: &[usize], universe_size: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * universe_size + a)
}

/// Searches every bijection for one that is a morphism in both
/// directions.  Only meant for small universes.
pub fn find_isomorphism(a: &GStructure, b: &GStructure) -> Option<GMorphism> {
    if a.universe_size != b.universe_size {
        return None;
    }
    for perm in super::permutations(a.universe_size) {
        let candidate = GMorphism { source: a.clone(), target: b.clone(), map: perm };
        if candidate.validate().is_ok() && candidate.inverse().is_some() {
            return Some(candidate);
        }
    }
    None
}
