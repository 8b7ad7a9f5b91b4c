//! Named semantic checks over a loaded presheaf, the counterexample
//! fuzzer, and greedy shrinking of violating instances.
//!
//! Every check here sweeps a bounded space of formulas, opens, and
//! sections and reports violations with replayable witnesses. The
//! fuzzer draws one instance per round from a stream derived from the
//! master seed and the round index alone, so rounds are independent
//! and the schedule never changes the output.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use gsheaf_core::forcing::{
    check_classical_points, check_covering, check_double_negation, check_existential_covering,
    check_fast_path, check_forcing_sets_open, check_germ_invariance, check_local_semantics,
    check_maximal_filters_generic, check_positive_collapse, check_restriction_monotonicity,
    maximum_principle_witness, sweep_theorem, Evaluator, SemanticsMode,
};
use gsheaf_core::logic::{
    enumerate_formulas, enumerate_terms, free_variables, is_negation_free, is_positive,
    is_quantifier_free, Formula,
};
use gsheaf_core::presheaf::{is_exact, stalk, GPresheaf, Section};
use gsheaf_core::structures::{colimit, DirectedSystem, GMorphism};
use gsheaf_core::topology::{maximal_filters, FiniteSpace, PointSet};
use gsheaf_core::CheckReport;

use crate::document::{auto_names, document_string, ModelDocument};
use crate::generate::{
    generated_document, pad_minimal_object, random_morphism, random_presheaf, rng_for, Limits,
};

/// The checks `check --theorem` and the fuzzer understand, besides
/// [`EXPERIMENT_ID`].
pub const CHECK_IDS: &[&str] = &[
    "gmt",
    "maximal-generic",
    "double-negation",
    "dense-membership",
    "max-principle",
    "colimit-satisfaction",
    "term-commutation",
    "positive-preservation",
    "submersion-preservation",
    "iso-equivalence",
    "local-semantics",
    "classical-points",
    "positive-collapse",
    "restriction-monotonicity",
    "covering",
    "existential-covering",
    "fast-path",
    "germ-invariance",
    "forcing-sets-open",
];

/// The literal-versus-local universal-quantifier sweep. Divergences
/// found under it are reported as findings, not failures.
pub const EXPERIMENT_ID: &str = "forall-modes";

/// Runs one named check; `None` for an unknown id.
pub fn run_check(
    p: &GPresheaf,
    mode: SemanticsMode,
    id: &str,
    depth: usize,
) -> Option<CheckReport> {
    let report = match id {
        "gmt" => gmt_sweep(p, depth),
        "maximal-generic" => check_maximal_filters_generic(p, mode, depth),
        "double-negation" => double_negation_sweep(p, mode, depth),
        "dense-membership" => check_dense_membership(&p.space),
        "max-principle" => max_principle_sweep(p, mode, depth),
        "colimit-satisfaction" => stalk_satisfaction_sweep(p, depth),
        "term-commutation" => over_restrictions(p, |a| check_term_commutation(a, depth)),
        "positive-preservation" => {
            over_restrictions(p, |a| check_positive_preservation(a, depth))
        }
        "submersion-preservation" => {
            over_restrictions(p, |a| check_submersion_preservation(a, depth))
        }
        "iso-equivalence" => over_restrictions(p, |a| check_iso_equivalence(a, depth)),
        "local-semantics" => check_local_semantics(p, mode, depth, 1),
        "classical-points" => check_classical_points(p, mode, depth, 1),
        "positive-collapse" => check_positive_collapse(p, mode, depth, 1),
        "restriction-monotonicity" => check_restriction_monotonicity(p, mode, depth, 1),
        "covering" => check_covering(p, mode, depth, 1),
        "existential-covering" => check_existential_covering(p, mode, depth, 1),
        "fast-path" => check_fast_path(p, mode, depth, 1),
        "germ-invariance" => check_germ_invariance(p, mode, depth, 1),
        "forcing-sets-open" => check_forcing_sets_open(p, mode, depth, 1),
        _ => return None,
    };
    Some(report)
}

pub fn run_all(p: &GPresheaf, mode: SemanticsMode, depth: usize) -> Vec<(String, CheckReport)> {
    CHECK_IDS
        .iter()
        .map(|id| {
            let report =
                run_check(p, mode, id, depth).expect("every listed id dispatches");
            (String::from(*id), report)
        })
        .collect()
}

fn presheaf_signature(p: &GPresheaf) -> gsheaf_core::logic::Signature {
    p.objects.values().next().expect("validated presheaves are inhabited").sig.clone()
}

fn assignments(size: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut tuple = vec![0usize; len];
    loop {
        out.push(tuple.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < size {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// Three ways of reading truth in the generic model of each maximal
/// filter, compared classwise by the layered sweep.
fn gmt_sweep(p: &GPresheaf, depth: usize) -> CheckReport {
    let filters = maximal_filters(&p.space);
    let mut report = CheckReport::new("generic-model-theorem")
        .bound("depth", depth.to_string())
        .bound("free-variables", "1")
        .bound("maximal-filters", filters.len().to_string());
    for (i, f) in filters.iter().enumerate() {
        match sweep_theorem(p, f, depth, 1) {
            Ok(outcome) => {
                for d in outcome.divergences {
                    report.push(
                        "three-statements-agree",
                        format!(
                            "filter {i}: {} with parameters {:?} on {}: classical {}, forced on a member {}, forcing set in the filter {}",
                            d.formula, d.parameters, d.member, d.classical, d.on_member,
                            d.set_in_filter
                        ),
                    );
                }
            }
            Err(sub) => report.absorb(&format!("filter-{i}"), sub),
        }
    }
    report
}

/// Double negation forced at an open exactly when the formula is
/// forced on a dense open inside it, for every positive formula.
fn double_negation_sweep(p: &GPresheaf, mode: SemanticsMode, depth: usize) -> CheckReport {
    let sig = presheaf_signature(p);
    let mut report = CheckReport::new("double-negation-sweep")
        .bound("depth", depth.to_string())
        .bound("free-variables", "1")
        .bound("mode", mode.as_str());
    for phi in enumerate_formulas(&sig, depth, 1) {
        if !is_positive(&phi) {
            continue;
        }
        for u in p.space.nonempty_opens() {
            let size = p.objects[&u].universe_size;
            for values in assignments(size, 1) {
                let s = Section { domain: u, values };
                match check_double_negation(p, mode, u, &phi, &s) {
                    Ok(sub) => {
                        if !sub.is_ok() {
                            report.absorb(&format!("{phi}@{u}"), sub);
                        }
                    }
                    Err(e) => report.push("query", format!("{phi}@{u}: {e}")),
                }
            }
        }
    }
    report
}

/// Dense opens of members of a maximal filter belong to the filter.
pub fn check_dense_membership(space: &FiniteSpace) -> CheckReport {
    let filters = maximal_filters(space);
    let mut report = CheckReport::new("dense-membership")
        .bound("maximal-filters", filters.len().to_string());
    for (i, f) in filters.iter().enumerate() {
        for &u in f.members() {
            for v in space.open_subsets_of(u) {
                if v.is_empty() {
                    continue;
                }
                let dense = space.is_dense(v, u).unwrap_or(false);
                if dense && !f.contains(v) {
                    report.push(
                        "dense-members",
                        format!("filter {i}: {v} is dense in its member {u} but missing"),
                    );
                }
            }
        }
    }
    report
}

/// A forced existential on an exact presheaf has a witness on a dense
/// open, and the returned witness re-verifies.
fn max_principle_sweep(p: &GPresheaf, mode: SemanticsMode, depth: usize) -> CheckReport {
    let mut report = CheckReport::new("maximum-principle-sweep")
        .bound("depth", depth.to_string())
        .bound("free-variables", "1")
        .bound("mode", mode.as_str());
    let exact = is_exact(p);
    if !exact.is_ok() {
        report.absorb("precondition-exact", exact);
        return report;
    }
    if depth == 0 {
        return report;
    }
    let sig = presheaf_signature(p);
    let mut ev = Evaluator::new(p, mode);
    for body in enumerate_formulas(&sig, depth - 1, 2) {
        let phi = Formula::Exists(1, Box::new(body.clone()));
        for u in p.space.nonempty_opens() {
            let size = p.objects[&u].universe_size;
            for values in assignments(size, 1) {
                let s = Section { domain: u, values };
                let premise = ev.forces_on(u, &phi, &s).unwrap_or(false);
                if !premise {
                    continue;
                }
                match maximum_principle_witness(p, mode, u, &body, &s) {
                    Err(sub) => {
                        report.push(
                            "witness-found",
                            format!("{phi}@{u}: no witness ({})", sub.check),
                        );
                    }
                    Ok(witness) => {
                        let dense =
                            p.space.is_dense(witness.domain, u).unwrap_or(false);
                        if !dense {
                            report.push(
                                "witness-dense",
                                format!("{phi}@{u}: witness domain {} is not dense", witness.domain),
                            );
                        }
                        let holds =
                            ev.forces_on(witness.domain, &body, &witness).unwrap_or(false);
                        if !holds {
                            report.push(
                                "witness-forces",
                                format!(
                                    "{phi}@{u}: body not forced on {} at {:?}",
                                    witness.domain, witness.values
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
    report
}

/// Positive satisfaction of germs in a colimit happens exactly when
/// some object below already satisfies the formula.
pub fn check_system_satisfaction(sys: &DirectedSystem, depth: usize) -> CheckReport {
    let mut report = CheckReport::new("colimit-satisfaction")
        .bound("depth", depth.to_string())
        .bound("free-variables", "2")
        .bound("objects", sys.objects.len().to_string());
    let colim = match colimit(sys) {
        Ok(c) => c,
        Err(sub) => {
            report.absorb("diagram", sub);
            return report;
        }
    };
    let derived = sys.derived_maps();
    let sig = &sys.objects[0].sig;
    for phi in enumerate_formulas(sig, depth, 2) {
        if !is_positive(&phi) {
            continue;
        }
        let vars: Vec<usize> = free_variables(&phi).into_iter().collect();
        for (i, m) in sys.objects.iter().enumerate() {
            for values in assignments(m.universe_size, vars.len()) {
                let lifted: BTreeMap<usize, usize> = vars
                    .iter()
                    .copied()
                    .zip(values.iter().map(|&x| colim.cocone[i][x]))
                    .collect();
                let in_colimit = colim
                    .structure
                    .satisfies(&phi, &lifted)
                    .expect("the colimit interprets the shared signature");
                let below = (0..sys.objects.len()).any(|j| {
                    let Some(map) = derived.get(&(j, i)) else { return false };
                    let pushed: BTreeMap<usize, usize> = vars
                        .iter()
                        .copied()
                        .zip(values.iter().map(|&x| map[x]))
                        .collect();
                    sys.objects[j]
                        .satisfies(&phi, &pushed)
                        .expect("objects interpret the shared signature")
                });
                if in_colimit != below {
                    report.push(
                        "germ-satisfaction",
                        format!(
                            "{phi} at index {i}, elements {values:?}: colimit {in_colimit}, below {below}"
                        ),
                    );
                }
            }
        }
    }
    report
}

fn stalk_satisfaction_sweep(p: &GPresheaf, depth: usize) -> CheckReport {
    let mut report =
        CheckReport::new("stalk-satisfaction").bound("depth", depth.to_string());
    for x in p.space.points() {
        match stalk(p, x) {
            Ok(st) => {
                report.absorb(
                    &format!("point-{x}"),
                    check_system_satisfaction(&st.system, depth),
                );
            }
            Err(sub) => report.absorb(&format!("point-{x}"), sub),
        }
    }
    report
}

fn over_restrictions(
    p: &GPresheaf,
    mut check: impl FnMut(&GMorphism) -> CheckReport,
) -> CheckReport {
    let mut report = CheckReport::new("restriction-arrows");
    let opens: Vec<PointSet> = p.space.nonempty_opens().collect();
    for &u in &opens {
        for &v in &opens {
            if u == v || !u.is_subset(v) {
                continue;
            }
            let arrow = p
                .restriction_morphism(u, v)
                .expect("derived restrictions exist for every inclusion");
            report.absorb(&format!("{v}-to-{u}"), check(&arrow));
        }
    }
    report
}

/// Terms commute with the morphism.
pub fn check_term_commutation(arrow: &GMorphism, depth: usize) -> CheckReport {
    let mut report = CheckReport::new("term-commutation")
        .bound("depth", depth.to_string())
        .bound("variables", "2");
    let terms = enumerate_terms(&arrow.source.sig, depth, 2);
    for values in assignments(arrow.source.universe_size, 2) {
        let env: BTreeMap<usize, usize> = values.iter().copied().enumerate().collect();
        let mapped: BTreeMap<usize, usize> =
            values.iter().map(|&x| arrow.apply(x)).enumerate().collect();
        for t in &terms {
            let through = arrow.apply(
                arrow.source.eval_term(t, &env).expect("terms fit the signature"),
            );
            let direct =
                arrow.target.eval_term(t, &mapped).expect("terms fit the signature");
            if through != direct {
                report.push("commutes", format!("{t} at {values:?}"));
            }
        }
    }
    report
}

/// Positive formulas carry over along any morphism.
pub fn check_positive_preservation(arrow: &GMorphism, depth: usize) -> CheckReport {
    let mut report = CheckReport::new("positive-preservation")
        .bound("depth", depth.to_string())
        .bound("variables", "2");
    sweep_preservation(arrow, depth, &mut report, "preserves", |phi| is_positive(phi), false);
    report
}

/// Surjective saturated morphisms carry negation-free formulas over.
pub fn check_submersion_preservation(arrow: &GMorphism, depth: usize) -> CheckReport {
    let mut report = CheckReport::new("submersion-preservation")
        .bound("depth", depth.to_string())
        .bound("variables", "2");
    if !(arrow.is_surjective() && arrow.is_saturated()) {
        return report.bound("applicable", "false");
    }
    sweep_preservation(arrow, depth, &mut report, "preserves", |phi| is_negation_free(phi), false);
    report
}

/// Isomorphisms transport every formula; embeddings transport the
/// quantifier-free ones in both directions.
pub fn check_iso_equivalence(arrow: &GMorphism, depth: usize) -> CheckReport {
    let mut report = CheckReport::new("iso-equivalence")
        .bound("depth", depth.to_string())
        .bound("variables", "2");
    let class = arrow.classify(0);
    if class.isomorphism {
        sweep_preservation(arrow, depth, &mut report, "equivalent", |_| true, true);
    } else if class.embedding {
        sweep_preservation(
            arrow,
            depth,
            &mut report,
            "quantifier-free-equivalent",
            |phi| is_quantifier_free(phi),
            true,
        );
    } else {
        return report.bound("applicable", "false");
    }
    report
}

fn sweep_preservation(
    arrow: &GMorphism,
    depth: usize,
    report: &mut CheckReport,
    rule: &str,
    keep: impl Fn(&Formula) -> bool,
    both_ways: bool,
) {
    for phi in enumerate_formulas(&arrow.source.sig, depth, 2) {
        if !keep(&phi) {
            continue;
        }
        for values in assignments(arrow.source.universe_size, 2) {
            let env: BTreeMap<usize, usize> = values.iter().copied().enumerate().collect();
            let mapped: BTreeMap<usize, usize> =
                values.iter().map(|&x| arrow.apply(x)).enumerate().collect();
            let before =
                arrow.source.satisfies(&phi, &env).expect("formulas fit the signature");
            let after =
                arrow.target.satisfies(&phi, &mapped).expect("formulas fit the signature");
            let broken = if both_ways { before != after } else { before && !after };
            if broken {
                report.push(rule, format!("{phi} at {values:?}: {before} became {after}"));
            }
        }
    }
}

fn mentions_forall(phi: &Formula) -> bool {
    match phi {
        Formula::Forall(..) => true,
        Formula::Eq(..) | Formula::Rel(..) => false,
        Formula::Not(x) | Formula::Exists(_, x) => mentions_forall(x),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            mentions_forall(a) || mentions_forall(b)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeDivergence {
    pub formula: String,
    pub point: usize,
    pub values: Vec<usize>,
    pub literal: bool,
    pub local: bool,
}

/// Compares the two readings of the universal quantifier point by
/// point on sections over the whole space.
pub fn forall_mode_divergences(p: &GPresheaf, depth: usize) -> Vec<ModeDivergence> {
    let sig = presheaf_signature(p);
    let full = p.space.full_set();
    let size = p.objects[&full].universe_size;
    let mut literal = Evaluator::new(p, SemanticsMode::Literal);
    let mut local = Evaluator::new(p, SemanticsMode::Local);
    let mut out = Vec::new();
    for phi in enumerate_formulas(&sig, depth, 1) {
        if !mentions_forall(&phi) {
            continue;
        }
        for values in assignments(size, 1) {
            let s = Section { domain: full, values: values.clone() };
            for x in full.iter() {
                let lit = literal.forces_at(x, &phi, &s).expect("the query is well-formed");
                let loc = local.forces_at(x, &phi, &s).expect("the query is well-formed");
                if lit != loc {
                    out.push(ModeDivergence {
                        formula: phi.to_string(),
                        point: x,
                        values: values.clone(),
                        literal: lit,
                        local: loc,
                    });
                }
            }
        }
    }
    out
}

/// Greedy minimization: keeps applying the first simplification move
/// that preserves the violation until none applies.
pub fn shrink_presheaf(
    start: &GPresheaf,
    still_violates: &dyn Fn(&GPresheaf) -> bool,
) -> GPresheaf {
    let mut current = start.clone();
    loop {
        let mut improved = false;
        for candidate in shrink_candidates(&current) {
            if candidate.validate().is_ok() && still_violates(&candidate) {
                current = candidate;
                improved = true;
                break;
            }
        }
        if !improved {
            return current;
        }
    }
}

fn shrink_candidates(p: &GPresheaf) -> Vec<GPresheaf> {
    let mut out = Vec::new();
    let full = p.space.full_set();
    let mut proper: Vec<PointSet> =
        p.space.nonempty_opens().filter(|&u| u != full).collect();
    proper.sort_by_key(|u| (u.len(), u.bits()));
    for &u in &proper {
        out.push(subspace_presheaf(p, u));
    }
    for &w in &proper {
        out.extend(without_open(p, w));
    }
    out.extend(trivial_group(p));
    out.extend(drop_symbols(p));
    out
}

fn rebuild_restrictions(
    p: &GPresheaf,
    space: &FiniteSpace,
    original_of: &BTreeMap<PointSet, PointSet>,
) -> BTreeMap<(PointSet, PointSet), Vec<usize>> {
    let derived = p.derived_restrictions();
    gsheaf_core::presheaf::covering_inclusions(space)
        .into_iter()
        .map(|(u, v)| {
            let map = derived[&(original_of[&u], original_of[&v])].clone();
            ((u, v), map)
        })
        .collect()
}

/// The restriction of the whole presheaf to the opens inside `u0`,
/// with points renumbered.
fn subspace_presheaf(p: &GPresheaf, u0: PointSet) -> GPresheaf {
    let keep: Vec<usize> = u0.iter().collect();
    let renumber: BTreeMap<usize, usize> =
        keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let remap =
        |v: PointSet| PointSet::from_points(v.iter().map(|x| renumber[&x]));
    let inside: Vec<PointSet> =
        p.space.nonempty_opens().filter(|v| v.is_subset(u0)).collect();
    let space = FiniteSpace::new(
        keep.len(),
        inside.iter().map(|&v| remap(v)).chain([PointSet::EMPTY]),
    );
    let original_of: BTreeMap<PointSet, PointSet> =
        inside.iter().map(|&v| (remap(v), v)).collect();
    let objects =
        inside.iter().map(|&v| (remap(v), p.objects[&v].clone())).collect();
    let restrictions = rebuild_restrictions(p, &space, &original_of);
    GPresheaf { space, objects, restrictions }
}

/// Drops one nonempty open, if the rest is still a topology.
fn without_open(p: &GPresheaf, w: PointSet) -> Option<GPresheaf> {
    let rest: Vec<PointSet> = p.space.nonempty_opens().filter(|&v| v != w).collect();
    let closed = rest.iter().all(|&a| {
        rest.iter().all(|&b| {
            let join = a.union(b);
            let meet = a.intersection(b);
            rest.contains(&join) && (meet.is_empty() || rest.contains(&meet))
        })
    });
    if !closed {
        return None;
    }
    let space =
        FiniteSpace::new(p.space.num_points(), rest.iter().copied().chain([PointSet::EMPTY]));
    let original_of: BTreeMap<PointSet, PointSet> =
        rest.iter().map(|&v| (v, v)).collect();
    let objects = rest.iter().map(|&v| (v, p.objects[&v].clone())).collect();
    let restrictions = rebuild_restrictions(p, &space, &original_of);
    Some(GPresheaf { space, objects, restrictions })
}

fn trivial_group(p: &GPresheaf) -> Option<GPresheaf> {
    let first = p.objects.values().next()?;
    if first.group.order() == 1 {
        return None;
    }
    let mut q = p.clone();
    for m in q.objects.values_mut() {
        m.group = gsheaf_core::structures::FiniteGroup::trivial();
        m.action = vec![(0..m.universe_size).collect()];
    }
    Some(q)
}

fn drop_symbols(p: &GPresheaf) -> Vec<GPresheaf> {
    use gsheaf_core::logic::Signature;
    let first = match p.objects.values().next() {
        Some(m) => m,
        None => return Vec::new(),
    };
    let sig = &first.sig;
    let mut out = Vec::new();
    let relations = sig.relations().to_vec();
    let functions = sig.functions().to_vec();
    let constants = sig.constants().to_vec();
    let drop = |f: &Vec<(String, usize)>,
                    r: &Vec<(String, usize)>,
                    c: &Vec<String>,
                    gone: &str| {
        let smaller =
            Signature::new(f.clone(), r.clone(), c.clone()).expect("subsignatures stay valid");
        let mut q = p.clone();
        for m in q.objects.values_mut() {
            m.sig = smaller.clone();
            m.functions.remove(gone);
            m.relations.remove(gone);
            m.constants.remove(gone);
        }
        q
    };
    for (name, _) in &relations {
        let rest: Vec<(String, usize)> =
            relations.iter().filter(|(n, _)| n != name).cloned().collect();
        out.push(drop(&functions, &rest, &constants, name));
    }
    for (name, _) in &functions {
        let rest: Vec<(String, usize)> =
            functions.iter().filter(|(n, _)| n != name).cloned().collect();
        out.push(drop(&rest, &relations, &constants, name));
    }
    for name in &constants {
        let rest: Vec<String> = constants.iter().filter(|n| *n != name).cloned().collect();
        out.push(drop(&functions, &relations, &rest, name));
    }
    out
}

pub const DOC_SLOT: &str = "<document>";

#[derive(Debug, Clone, Serialize)]
pub struct ReplayQuery {
    /// Command-line arguments, with [`DOC_SLOT`] standing in for the
    /// document path.
    pub argv: Vec<String>,
    pub exit: i32,
    pub output: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub target: String,
    pub round: usize,
    /// True for experimental sweeps whose divergences are reported
    /// rather than counted as failures.
    pub experiment: bool,
    pub document: ModelDocument,
    pub queries: Vec<ReplayQuery>,
    pub details: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzOutcome {
    pub seed: u64,
    pub rounds: usize,
    pub targets: Vec<String>,
    pub violations: Vec<Finding>,
    pub findings: Vec<Finding>,
}

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub seed: u64,
    pub budget: usize,
    /// Empty means every check plus the mode experiment.
    pub targets: Vec<String>,
    pub limits: Limits,
    pub depth: usize,
}

impl Default for FuzzConfig {
    fn default() -> FuzzConfig {
        FuzzConfig {
            seed: 0,
            budget: 100,
            targets: Vec::new(),
            limits: Limits::default(),
            depth: 1,
        }
    }
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes the document to a scratch file for the duration of `f`.
pub fn with_temp_document<T>(doc: &ModelDocument, f: impl FnOnce(&Path) -> T) -> T {
    let name = format!(
        "gsheaf-{}-{}.json",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    );
    let path = std::env::temp_dir().join(name);
    std::fs::write(&path, document_string(doc)).expect("the scratch directory is writable");
    let out = f(&path);
    let _ = std::fs::remove_file(&path);
    out
}

/// Re-runs every recorded query of a finding against its document and
/// compares exit codes and output bytes.
pub fn replay(finding: &Finding) -> bool {
    with_temp_document(&finding.document, |path| {
        finding.queries.iter().all(|q| {
            let argv: Vec<String> = q
                .argv
                .iter()
                .map(|a| {
                    if a == DOC_SLOT {
                        path.display().to_string()
                    } else {
                        a.clone()
                    }
                })
                .collect();
            let (exit, output) = crate::cli::execute_args(&argv);
            exit == q.exit && output == q.output
        })
    })
}

fn capture(argv: &[String], doc: &ModelDocument) -> ReplayQuery {
    let (exit, output) = with_temp_document(doc, |path| {
        let concrete: Vec<String> = argv
            .iter()
            .map(|a| {
                if a == DOC_SLOT {
                    path.display().to_string()
                } else {
                    a.clone()
                }
            })
            .collect();
        crate::cli::execute_args(&concrete)
    });
    ReplayQuery { argv: argv.to_vec(), exit, output }
}

fn fuzz_instance(rng: &mut ChaCha8Rng, target: &str, limits: &Limits) -> GPresheaf {
    match target {
        "term-commutation" | "positive-preservation" | "submersion-preservation"
        | "iso-equivalence" => morphism_presheaf(rng, limits),
        "gmt" | "maximal-generic" | "max-principle" => {
            let forced = Limits { force_sheaf: true, ..limits.clone() };
            random_presheaf(rng, &forced)
        }
        _ => random_presheaf(rng, limits),
    }
}

/// Wraps a random morphism as the restriction map of a two-point
/// presheaf, so morphism checks replay through documents.
pub fn morphism_presheaf(rng: &mut ChaCha8Rng, limits: &Limits) -> GPresheaf {
    let arrow = random_morphism(rng, limits);
    let space = FiniteSpace::sierpinski();
    let open_point = PointSet::singleton(0);
    let full = space.full_set();
    let objects = [(open_point, arrow.target.clone()), (full, arrow.source.clone())]
        .into_iter()
        .collect();
    let restrictions = [((open_point, full), arrow.map.clone())].into_iter().collect();
    let p = GPresheaf { space, objects, restrictions };
    let report = p.validate();
    assert!(report.is_ok(), "wrapped morphisms must validate:\n{report}");
    p
}

/// Runs the seeded sweep. Real violations are shrunk and recorded in
/// `violations`; mode-experiment divergences land in `findings`. Every
/// recorded query has been executed once and stores the exact output
/// it expects on replay.
pub fn fuzz(config: &FuzzConfig) -> Result<FuzzOutcome, String> {
    let targets: Vec<String> = if config.targets.is_empty() {
        CHECK_IDS
            .iter()
            .map(|s| String::from(*s))
            .chain([String::from(EXPERIMENT_ID)])
            .collect()
    } else {
        for t in &config.targets {
            if t != EXPERIMENT_ID && !CHECK_IDS.contains(&t.as_str()) {
                return Err(format!(
                    "unknown fuzz target '{t}'; known targets: {}, {EXPERIMENT_ID}",
                    CHECK_IDS.join(", ")
                ));
            }
        }
        config.targets.clone()
    };
    let mut outcome = FuzzOutcome {
        seed: config.seed,
        rounds: config.budget,
        targets: targets.clone(),
        violations: Vec::new(),
        findings: Vec::new(),
    };
    for round in 0..config.budget {
        let target = &targets[round % targets.len()];
        let mut rng = rng_for(config.seed, round as u64);
        if target == EXPERIMENT_ID {
            let base = random_presheaf(&mut rng, &config.limits);
            let p = pad_minimal_object(&mut rng, &base);
            let divergences = forall_mode_divergences(&p, config.depth);
            if divergences.is_empty() {
                continue;
            }
            let doc = generated_document(&p);
            let names = auto_names(&p);
            let full = p.space.full_set();
            let queries: Vec<ReplayQuery> = divergences
                .iter()
                .take(3)
                .flat_map(|d| {
                    ["literal", "local"].map(|mode| {
                        let argv = vec![
                            String::from("force"),
                            String::from(DOC_SLOT),
                            String::from("--point"),
                            names.point_name(d.point),
                            String::from("--formula"),
                            d.formula.clone(),
                            String::from("--section"),
                            names.section_names(&Section {
                                domain: full,
                                values: d.values.clone(),
                            }),
                            String::from("--mode"),
                            String::from(mode),
                            String::from("--json"),
                        ];
                        capture(&argv, &doc)
                    })
                })
                .collect();
            outcome.findings.push(Finding {
                target: target.clone(),
                round,
                experiment: true,
                document: doc,
                queries,
                details: format!(
                    "{} point/formula pairs read differently under the two quantifier modes",
                    divergences.len()
                ),
            });
        } else {
            let p = fuzz_instance(&mut rng, target, &config.limits);
            let report = run_check(&p, SemanticsMode::Local, target, config.depth)
                .expect("targets were screened above");
            if report.is_ok() {
                continue;
            }
            let shrunk = shrink_presheaf(&p, &|q| {
                run_check(q, SemanticsMode::Local, target, config.depth)
                    .is_some_and(|r| !r.is_ok())
            });
            let final_report =
                run_check(&shrunk, SemanticsMode::Local, target, config.depth)
                    .expect("the id was already dispatched");
            let doc = generated_document(&shrunk);
            let argv = vec![
                String::from("check"),
                String::from(DOC_SLOT),
                String::from("--theorem"),
                target.clone(),
                String::from("--depth"),
                config.depth.to_string(),
                String::from("--json"),
            ];
            let query = capture(&argv, &doc);
            let details = final_report
                .violations
                .iter()
                .take(3)
                .map(|v| format!("{}: {}", v.rule, v.witness))
                .collect::<Vec<_>>()
                .join("; ");
            outcome.violations.push(Finding {
                target: target.clone(),
                round,
                experiment: false,
                document: doc,
                queries: vec![query],
                details,
            });
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gsheaf_core::logic::parse_signature;
    use gsheaf_core::structures::GStructure;

    fn collapse_with_tuple_on_top() -> GPresheaf {
        let space = FiniteSpace::sierpinski();
        let sig = parse_signature("rel R/1").unwrap();
        let mut global = GStructure::plain(sig.clone(), 2);
        global.relations.insert(String::from("R"), [vec![1]].into_iter().collect());
        let mut local = GStructure::plain(sig, 1);
        local.relations.insert(String::from("R"), [vec![0]].into_iter().collect());
        let open_point = PointSet::singleton(0);
        let full = space.full_set();
        GPresheaf {
            space,
            objects: [(open_point, local), (full, global)].into_iter().collect(),
            restrictions: [((open_point, full), vec![0, 0])].into_iter().collect(),
        }
    }

    #[test]
    fn every_listed_check_dispatches_cleanly_on_the_worked_example() {
        let p = collapse_with_tuple_on_top();
        for id in CHECK_IDS {
            let report = run_check(&p, SemanticsMode::Local, id, 1)
                .expect("listed ids dispatch");
            assert!(report.is_ok(), "{id} failed:\n{report}");
        }
        assert!(run_check(&p, SemanticsMode::Local, "no-such-check", 1).is_none());
    }

    #[test]
    fn a_flipped_relation_tuple_is_caught_by_the_preservation_check() {
        let mut p = collapse_with_tuple_on_top();
        let open_point = PointSet::singleton(0);
        p.objects.get_mut(&open_point).unwrap().relations.get_mut("R").unwrap().clear();
        let report =
            run_check(&p, SemanticsMode::Local, "positive-preservation", 1).unwrap();
        assert!(!report.is_ok(), "the mutation should break preservation");
        assert!(report.violations.iter().any(|v| v.witness.contains("R(")));
    }

    #[test]
    fn shrinking_keeps_the_violation_and_reduces_the_space() {
        let mut p = collapse_with_tuple_on_top();
        p.objects
            .get_mut(&PointSet::singleton(0))
            .unwrap()
            .relations
            .get_mut("R")
            .unwrap()
            .clear();
        let violates = |q: &GPresheaf| {
            run_check(q, SemanticsMode::Local, "positive-preservation", 1)
                .is_some_and(|r| !r.is_ok())
        };
        assert!(violates(&p));
        let small = shrink_presheaf(&p, &violates);
        assert!(violates(&small));
        assert!(
            small.space.nonempty_opens().count() <= p.space.nonempty_opens().count()
        );
    }

    #[test]
    fn the_fuzzer_is_quiet_on_lawful_instances_and_deterministic() {
        let config = FuzzConfig { seed: 41, budget: 20, ..FuzzConfig::default() };
        let once = fuzz(&config).unwrap();
        assert!(once.violations.is_empty(), "unexpected violations: {:?}", once.violations);
        let twice = fuzz(&config).unwrap();
        assert_eq!(
            serde_json::to_string(&once).unwrap(),
            serde_json::to_string(&twice).unwrap()
        );
    }

    #[test]
    fn non_surjective_restrictions_separate_the_quantifier_readings() {
        let space = FiniteSpace::sierpinski();
        let sig = parse_signature("rel R/1").unwrap();
        let mut above = GStructure::plain(sig.clone(), 1);
        above.relations.insert(String::from("R"), [vec![0]].into_iter().collect());
        let mut below = GStructure::plain(sig, 2);
        below.relations.insert(String::from("R"), [vec![0]].into_iter().collect());
        let open_point = PointSet::singleton(0);
        let full = space.full_set();
        let p = GPresheaf {
            space,
            objects: [(open_point, below), (full, above)].into_iter().collect(),
            restrictions: [((open_point, full), vec![0])].into_iter().collect(),
        };
        assert!(p.validate().is_ok());
        let divergences = forall_mode_divergences(&p, 1);
        assert!(
            divergences
                .iter()
                .any(|d| d.formula == "forall v1 R(v1)" && d.literal && !d.local),
            "expected the padded element to break the literal reading: {divergences:?}"
        );
    }

    #[test]
    fn experiment_findings_replay_byte_for_byte() {
        let config = FuzzConfig {
            seed: 5,
            budget: 8,
            targets: vec![String::from(EXPERIMENT_ID)],
            ..FuzzConfig::default()
        };
        let outcome = fuzz(&config).unwrap();
        assert!(outcome.violations.is_empty());
        assert!(
            !outcome.findings.is_empty(),
            "this seed is expected to surface at least one mode divergence"
        );
        for finding in &outcome.findings {
            assert!(!finding.queries.is_empty());
            assert!(replay(finding), "finding from round {} must replay", finding.round);
        }
    }

    #[test]
    fn unknown_fuzz_targets_are_refused() {
        let config = FuzzConfig {
            targets: vec![String::from("nope")],
            budget: 1,
            ..FuzzConfig::default()
        };
        assert!(fuzz(&config).is_err());
    }
}
