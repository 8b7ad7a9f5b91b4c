//! The JSON document format for presheaves of G-structures.
//!
//! A document is a single UTF-8 JSON file with top-level keys
//! `format`, `signature`, `group`, `space`, `structures`,
//! `restrictions`, and `options`. Points, opens, group elements, and
//! universe elements are referred to by name everywhere; the loader
//! resolves the names to the index-based core types and runs the full
//! validator stack before handing the presheaf out.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use gsheaf_core::forcing::SemanticsMode;
use gsheaf_core::logic::Signature;
use gsheaf_core::presheaf::{covering_inclusions, GPresheaf, Section};
use gsheaf_core::structures::{FiniteGroup, GStructure, InvarianceMode};
use gsheaf_core::topology::{FiniteSpace, PointSet, MAX_POINTS};
use gsheaf_core::CheckReport;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format: u32,
    pub signature: SignatureDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDoc>,
    pub space: SpaceDoc,
    pub structures: BTreeMap<String, StructureDoc>,
    #[serde(default)]
    pub restrictions: Vec<RestrictionDoc>,
    #[serde(default)]
    pub options: OptionsDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SignatureDoc {
    #[serde(default)]
    pub functions: BTreeMap<String, usize>,
    #[serde(default)]
    pub relations: BTreeMap<String, usize>,
    #[serde(default)]
    pub constants: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub elements: Vec<String>,
    pub identity: String,
    /// `product[g][h]` is the name of g * h.
    pub product: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    /// Nonempty opens by name; the empty set is implicit.
    pub opens: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub universe: Vec<String>,
    /// One row of element names per group element. May be omitted only
    /// when the group is trivial; the identity action is assumed then.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<BTreeMap<String, Vec<String>>>,
    /// One value per argument tuple, tuples in lexicographic order with
    /// the first argument most significant.
    #[serde(default)]
    pub functions: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub constants: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionDoc {
    /// The larger open.
    pub from: String,
    /// The smaller open; the pair must be a covering inclusion.
    pub to: String,
    /// Element names of `to`, one per element of `from` in universe order.
    pub map: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    /// "componentwise" (default) or "diagonal".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariance: Option<String>,
    /// "local" (default) or "literal".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantics: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("cannot read the document: {0}")]
    Io(#[from] std::io::Error),
    #[error("the document does not parse: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error("the document fails validation:\n{0}")]
    Invalid(CheckReport),
}

/// Name tables mapping document names to core indices and back.
#[derive(Debug, Clone)]
pub struct Names {
    pub points: Vec<String>,
    pub opens: BTreeMap<String, PointSet>,
    pub open_names: BTreeMap<PointSet, String>,
    pub elements: BTreeMap<PointSet, Vec<String>>,
    pub group: Vec<String>,
}

impl Names {
    pub fn point(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    pub fn point_name(&self, x: usize) -> String {
        self.points.get(x).cloned().unwrap_or_else(|| format!("p{x}"))
    }

    pub fn open(&self, name: &str) -> Option<PointSet> {
        self.opens.get(name).copied()
    }

    pub fn open_name(&self, u: PointSet) -> String {
        if let Some(name) = self.open_names.get(&u) {
            return name.clone();
        }
        let inside: Vec<String> = u.iter().map(|x| self.point_name(x)).collect();
        format!("{{{}}}", inside.join(","))
    }

    pub fn element(&self, u: PointSet, name: &str) -> Option<usize> {
        self.elements.get(&u)?.iter().position(|e| e == name)
    }

    pub fn element_name(&self, u: PointSet, x: usize) -> String {
        match self.elements.get(&u).and_then(|es| es.get(x)) {
            Some(name) => name.clone(),
            None => format!("#{x}"),
        }
    }

    pub fn section_names(&self, s: &Section) -> String {
        let parts: Vec<String> =
            s.values.iter().map(|&x| self.element_name(s.domain, x)).collect();
        parts.join(",")
    }
}

/// A loaded and fully validated document.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub presheaf: GPresheaf,
    pub names: Names,
    pub semantics: SemanticsMode,
}

pub fn load_document(path: &Path) -> Result<LoadedModel, DocError> {
    let text = fs::read_to_string(path)?;
    let doc: ModelDocument = serde_json::from_str(&text)?;
    interpret(&doc)
}

fn schema(msg: impl Into<String>) -> DocError {
    DocError::Schema(msg.into())
}

fn resolve<'a>(names: &'a [String], name: &str, what: &str) -> Result<usize, DocError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| schema(format!("{what}: unknown name '{name}'")))
}

pub fn interpret(doc: &ModelDocument) -> Result<LoadedModel, DocError> {
    if doc.format != FORMAT_VERSION {
        return Err(schema(format!(
            "format: this reader understands version {FORMAT_VERSION}, found {}",
            doc.format
        )));
    }

    let points = &doc.space.points;
    if points.is_empty() {
        return Err(schema("space: at least one point is required"));
    }
    if points.len() > MAX_POINTS {
        return Err(schema(format!("space: at most {MAX_POINTS} points are supported")));
    }
    check_distinct(points, "space.points")?;

    let mut opens: BTreeMap<String, PointSet> = BTreeMap::new();
    let mut open_names: BTreeMap<PointSet, String> = BTreeMap::new();
    for (name, members) in &doc.space.opens {
        let mut set = PointSet::EMPTY;
        for p in members {
            let i = resolve(points, p, &format!("open '{name}'"))?;
            if set.contains(i) {
                return Err(schema(format!("open '{name}': point '{p}' appears twice")));
            }
            set = set.union(PointSet::singleton(i));
        }
        if set.is_empty() {
            return Err(schema(format!(
                "open '{name}': opens must be nonempty; the empty set is implicit"
            )));
        }
        if let Some(other) = open_names.get(&set) {
            return Err(schema(format!("open '{name}': same point set as open '{other}'")));
        }
        opens.insert(name.clone(), set);
        open_names.insert(set, name.clone());
    }
    let space = FiniteSpace::new(
        points.len(),
        opens.values().copied().chain([PointSet::EMPTY]),
    );
    let space_report = space.validate();
    if !space_report.is_ok() {
        return Err(DocError::Invalid(space_report));
    }

    let (group, group_names) = match &doc.group {
        None => (FiniteGroup::trivial(), vec![String::from("e")]),
        Some(g) => {
            check_distinct(&g.elements, "group.elements")?;
            if g.elements.is_empty() {
                return Err(schema("group: at least the identity is required"));
            }
            let identity = resolve(&g.elements, &g.identity, "group.identity")?;
            if g.product.len() != g.elements.len() {
                return Err(schema(format!(
                    "group.product: {} rows for {} elements",
                    g.product.len(),
                    g.elements.len()
                )));
            }
            let mut product = Vec::new();
            for (i, row) in g.product.iter().enumerate() {
                if row.len() != g.elements.len() {
                    return Err(schema(format!(
                        "group.product: row {i} has {} entries for {} elements",
                        row.len(),
                        g.elements.len()
                    )));
                }
                let mut out = Vec::new();
                for name in row {
                    out.push(resolve(&g.elements, name, "group.product")?);
                }
                product.push(out);
            }
            let group = FiniteGroup { identity, product };
            let report = group.validate();
            if !report.is_ok() {
                return Err(DocError::Invalid(report));
            }
            (group, g.elements.clone())
        }
    };

    let sig = Signature::new(
        doc.signature.functions.iter().map(|(n, &a)| (n.clone(), a)).collect(),
        doc.signature.relations.iter().map(|(n, &a)| (n.clone(), a)).collect(),
        doc.signature.constants.clone(),
    )
    .map_err(|e| schema(format!("signature: {e}")))?;

    let invariance = match doc.options.invariance.as_deref() {
        None | Some("componentwise") => InvarianceMode::Componentwise,
        Some("diagonal") => InvarianceMode::Diagonal,
        Some(other) => {
            return Err(schema(format!(
                "options.invariance: expected 'componentwise' or 'diagonal', found '{other}'"
            )))
        }
    };
    let semantics = match doc.options.semantics.as_deref() {
        None | Some("local") => SemanticsMode::Local,
        Some("literal") => SemanticsMode::Literal,
        Some(other) => {
            return Err(schema(format!(
                "options.semantics: expected 'local' or 'literal', found '{other}'"
            )))
        }
    };

    for name in doc.structures.keys() {
        if !opens.contains_key(name) {
            return Err(schema(format!("structures: '{name}' is not a declared open")));
        }
    }
    for name in opens.keys() {
        if !doc.structures.contains_key(name) {
            return Err(schema(format!("structures: no entry for open '{name}'")));
        }
    }

    let mut objects = BTreeMap::new();
    let mut elements: BTreeMap<PointSet, Vec<String>> = BTreeMap::new();
    for (open_name, st) in &doc.structures {
        let at = format!("structure '{open_name}'");
        let set = opens[open_name];
        check_distinct(&st.universe, &format!("{at}.universe"))?;
        if st.universe.is_empty() {
            return Err(schema(format!("{at}: the universe must be inhabited")));
        }
        let universe = &st.universe;
        let n = universe.len();

        let action = match &st.action {
            None => {
                if group.order() != 1 {
                    return Err(schema(format!(
                        "{at}: the action table is required for a nontrivial group"
                    )));
                }
                vec![(0..n).collect()]
            }
            Some(rows) => {
                for g in rows.keys() {
                    if !group_names.contains(g) {
                        return Err(schema(format!(
                            "{at}.action: '{g}' is not a group element"
                        )));
                    }
                }
                let mut action = Vec::new();
                for g in &group_names {
                    let row = rows.get(g).ok_or_else(|| {
                        schema(format!("{at}.action: no row for group element '{g}'"))
                    })?;
                    if row.len() != n {
                        return Err(schema(format!(
                            "{at}.action: row '{g}' has {} entries for {n} elements",
                            row.len()
                        )));
                    }
                    let mut out = Vec::new();
                    for e in row {
                        out.push(resolve(universe, e, &format!("{at}.action row '{g}'"))?);
                    }
                    action.push(out);
                }
                action
            }
        };

        let mut functions = BTreeMap::new();
        for (fname, arity) in sig.functions() {
            let table = st.functions.get(fname).ok_or_else(|| {
                schema(format!("{at}: no table for function '{fname}'"))
            })?;
            let expected = n.pow(*arity as u32);
            if table.len() != expected {
                return Err(schema(format!(
                    "{at}.functions.{fname}: {} entries, expected {expected}",
                    table.len()
                )));
            }
            let mut out = Vec::new();
            for e in table {
                out.push(resolve(universe, e, &format!("{at}.functions.{fname}"))?);
            }
            functions.insert(fname.clone(), out);
        }
        for fname in st.functions.keys() {
            if sig.function_arity(fname).is_none() {
                return Err(schema(format!(
                    "{at}: function '{fname}' is not in the signature"
                )));
            }
        }

        let mut relations = BTreeMap::new();
        for (rname, arity) in sig.relations() {
            let tuples = st.relations.get(rname).ok_or_else(|| {
                schema(format!("{at}: no tuple list for relation '{rname}'"))
            })?;
            let mut out = std::collections::BTreeSet::new();
            for t in tuples {
                if t.len() != *arity {
                    return Err(schema(format!(
                        "{at}.relations.{rname}: tuple of length {}, expected {arity}",
                        t.len()
                    )));
                }
                let mut tuple = Vec::new();
                for e in t {
                    tuple.push(resolve(universe, e, &format!("{at}.relations.{rname}"))?);
                }
                out.insert(tuple);
            }
            relations.insert(rname.clone(), out);
        }
        for rname in st.relations.keys() {
            if sig.relation_arity(rname).is_none() {
                return Err(schema(format!(
                    "{at}: relation '{rname}' is not in the signature"
                )));
            }
        }

        let mut constants = BTreeMap::new();
        for cname in sig.constants() {
            let value = st.constants.get(cname).ok_or_else(|| {
                schema(format!("{at}: no assignment for constant '{cname}'"))
            })?;
            constants.insert(
                cname.clone(),
                resolve(universe, value, &format!("{at}.constants.{cname}"))?,
            );
        }
        for cname in st.constants.keys() {
            if !sig.constants().contains(cname) {
                return Err(schema(format!(
                    "{at}: constant '{cname}' is not in the signature"
                )));
            }
        }

        let m = GStructure {
            sig: sig.clone(),
            group: group.clone(),
            universe_size: n,
            functions,
            relations,
            constants,
            action,
            mode: invariance,
        };
        objects.insert(set, m);
        elements.insert(set, universe.clone());
    }

    let edges = covering_inclusions(&space);
    let mut restrictions = BTreeMap::new();
    for r in &doc.restrictions {
        let at = format!("restriction {}->{}", r.from, r.to);
        let from = opens
            .get(&r.from)
            .copied()
            .ok_or_else(|| schema(format!("{at}: unknown open '{}'", r.from)))?;
        let to = opens
            .get(&r.to)
            .copied()
            .ok_or_else(|| schema(format!("{at}: unknown open '{}'", r.to)))?;
        if !edges.contains(&(to, from)) {
            return Err(schema(format!("{at}: not a covering inclusion")));
        }
        if restrictions.contains_key(&(to, from)) {
            return Err(schema(format!("{at}: declared twice")));
        }
        let source = &elements[&from];
        let target = &elements[&to];
        if r.map.len() != source.len() {
            return Err(schema(format!(
                "{at}: {} entries for a universe of {}",
                r.map.len(),
                source.len()
            )));
        }
        let mut map = Vec::new();
        for e in &r.map {
            map.push(resolve(target, e, &at)?);
        }
        restrictions.insert((to, from), map);
    }

    let presheaf = GPresheaf { space, objects, restrictions };
    let report = presheaf.validate();
    if !report.is_ok() {
        return Err(DocError::Invalid(report));
    }

    let names = Names {
        points: points.clone(),
        opens,
        open_names,
        elements,
        group: group_names,
    };
    Ok(LoadedModel { presheaf, names, semantics })
}

fn check_distinct(names: &[String], what: &str) -> Result<(), DocError> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(schema(format!("{what}: '{n}' appears twice")));
        }
    }
    Ok(())
}

/// Default name tables for a presheaf built in memory: points `p0..`,
/// opens `U0..` by size with the full space called `X`, elements
/// `a0..`, group elements `e, g1, g2..`.
pub fn auto_names(p: &GPresheaf) -> Names {
    let points: Vec<String> = (0..p.space.num_points()).map(|i| format!("p{i}")).collect();
    let mut sorted: Vec<PointSet> = p.space.nonempty_opens().collect();
    sorted.sort_by_key(|u| (u.len(), u.bits()));
    let full = p.space.full_set();
    let mut opens = BTreeMap::new();
    let mut open_names = BTreeMap::new();
    for (i, &u) in sorted.iter().enumerate() {
        let name = if u == full { String::from("X") } else { format!("U{i}") };
        opens.insert(name.clone(), u);
        open_names.insert(u, name);
    }
    let elements = p
        .objects
        .iter()
        .map(|(&u, m)| (u, (0..m.universe_size).map(|i| format!("a{i}")).collect()))
        .collect();
    let order = p.objects.values().next().map_or(1, |m| m.group.order());
    let group = (0..order)
        .map(|g| if g == 0 { String::from("e") } else { format!("g{g}") })
        .collect();
    Names { points, opens, open_names, elements, group }
}

/// Renders a presheaf back into document form under the given name
/// tables. Inverse to [`interpret`] up to key order.
pub fn render_document(p: &GPresheaf, names: &Names, semantics: SemanticsMode) -> ModelDocument {
    let first = p.objects.values().next().expect("presheaves carry at least one structure");
    let sig = &first.sig;
    let signature = SignatureDoc {
        functions: sig.functions().iter().cloned().collect(),
        relations: sig.relations().iter().cloned().collect(),
        constants: sig.constants().to_vec(),
    };
    let group = GroupDoc {
        elements: names.group.clone(),
        identity: names.group[first.group.identity].clone(),
        product: first
            .group
            .product
            .iter()
            .map(|row| row.iter().map(|&k| names.group[k].clone()).collect())
            .collect(),
    };
    let space = SpaceDoc {
        points: names.points.clone(),
        opens: names
            .opens
            .iter()
            .map(|(name, &u)| {
                (name.clone(), u.iter().map(|x| names.points[x].clone()).collect())
            })
            .collect(),
    };
    let structures = p
        .objects
        .iter()
        .map(|(&u, m)| {
            let universe = names.elements[&u].clone();
            let name_of = |x: usize| universe[x].clone();
            let action = names
                .group
                .iter()
                .enumerate()
                .map(|(g, gname)| {
                    (gname.clone(), m.action[g].iter().map(|&x| name_of(x)).collect())
                })
                .collect();
            let functions = m
                .functions
                .iter()
                .map(|(f, table)| {
                    (f.clone(), table.iter().map(|&x| name_of(x)).collect())
                })
                .collect();
            let relations = m
                .relations
                .iter()
                .map(|(r, tuples)| {
                    (
                        r.clone(),
                        tuples
                            .iter()
                            .map(|t| t.iter().map(|&x| name_of(x)).collect())
                            .collect(),
                    )
                })
                .collect();
            let constants =
                m.constants.iter().map(|(c, &x)| (c.clone(), name_of(x))).collect();
            let st = StructureDoc {
                universe,
                action: Some(action),
                functions,
                relations,
                constants,
            };
            (names.open_names[&u].clone(), st)
        })
        .collect();
    let restrictions = p
        .restrictions
        .iter()
        .map(|(&(to, from), map)| RestrictionDoc {
            from: names.open_names[&from].clone(),
            to: names.open_names[&to].clone(),
            map: map.iter().map(|&x| names.elements[&to][x].clone()).collect(),
        })
        .collect();
    let options = OptionsDoc {
        invariance: Some(String::from(first.mode.as_str())),
        semantics: Some(String::from(semantics.as_str())),
    };
    ModelDocument {
        format: FORMAT_VERSION,
        signature,
        group: Some(group),
        space,
        structures,
        restrictions,
        options,
    }
}

pub fn document_string(doc: &ModelDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use gsheaf_core::presheaf::is_sheaf;

    fn sierpinski_text() -> String {
        fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/sierpinski.json"))
            .expect("the bundled fixture exists")
    }

    #[test]
    fn the_bundled_fixture_loads_and_is_a_sheaf() {
        let doc: ModelDocument = serde_json::from_str(&sierpinski_text()).unwrap();
        let model = interpret(&doc).unwrap();
        assert!(is_sheaf(&model.presheaf).is_ok());
        assert_eq!(model.semantics, SemanticsMode::Local);
        assert_eq!(model.names.point("q"), Some(1));
        let full = model.presheaf.space.full_set();
        assert_eq!(model.names.open("X"), Some(full));
        assert_eq!(model.names.element(full, "1"), Some(1));
    }

    #[test]
    fn loading_round_trips_through_render() {
        let doc: ModelDocument = serde_json::from_str(&sierpinski_text()).unwrap();
        let model = interpret(&doc).unwrap();
        let back = render_document(&model.presheaf, &model.names, model.semantics);
        let again = interpret(&back).unwrap();
        assert_eq!(again.presheaf.objects, model.presheaf.objects);
        assert_eq!(again.presheaf.restrictions, model.presheaf.restrictions);
        assert_eq!(document_string(&back), document_string(&back));
    }

    #[test]
    fn missing_action_tables_need_a_trivial_group() {
        let mut doc: ModelDocument = serde_json::from_str(&sierpinski_text()).unwrap();
        doc.group = Some(GroupDoc {
            elements: vec![String::from("e"), String::from("s")],
            identity: String::from("e"),
            product: vec![
                vec![String::from("e"), String::from("s")],
                vec![String::from("s"), String::from("e")],
            ],
        });
        let err = interpret(&doc).unwrap_err();
        match err {
            DocError::Schema(msg) => assert!(msg.contains("action table is required"), "{msg}"),
            other => panic!("expected a schema error, got {other}"),
        }
    }

    #[test]
    fn unknown_names_are_schema_errors() {
        let mut doc: ModelDocument = serde_json::from_str(&sierpinski_text()).unwrap();
        doc.restrictions[0].map[0] = String::from("nope");
        match interpret(&doc).unwrap_err() {
            DocError::Schema(msg) => assert!(msg.contains("nope"), "{msg}"),
            other => panic!("expected a schema error, got {other}"),
        }
    }

    #[test]
    fn wrong_format_versions_are_refused() {
        let mut doc: ModelDocument = serde_json::from_str(&sierpinski_text()).unwrap();
        doc.format = 2;
        assert!(matches!(interpret(&doc).unwrap_err(), DocError::Schema(_)));
    }
}
