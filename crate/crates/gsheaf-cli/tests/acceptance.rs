//! The acceptance sweep: eleven numbered criteria, one test each.
//! Every test prints a single `criterion N: pass` line with its corpus
//! size and elapsed time; a failing criterion panics with the offending
//! report instead.

use std::sync::OnceLock;
use std::time::Instant;

use gsheaf_cli::generate::{
    random_morphism, random_presheaf, random_presheaf_on, random_system, rng_for, Limits,
};
use gsheaf_cli::search::{
    check_dense_membership, check_iso_equivalence, check_positive_preservation,
    check_submersion_preservation, check_system_satisfaction, check_term_commutation, fuzz,
    replay, run_check, FuzzConfig,
};
use gsheaf_core::forcing::{generic_model, is_generic_filter, sweep_theorem, SemanticsMode};
use gsheaf_core::logic::parse_signature;
use gsheaf_core::presheaf::{is_exact, is_sheaf, orbit_presheaf, stalk, GPresheaf};
use gsheaf_core::structures::{
    colimit, find_isomorphism, orbit_structure, DirectedSystem, GStructure, InvarianceMode,
};
use gsheaf_core::topology::{enumerate_topologies, maximal_filters, FiniteSpace, PointSet};

const CORPUS_SEED: u64 = 7;
const SYSTEM_SEED: u64 = 11;
const MORPHISM_SEED: u64 = 13;
const SPACE_SWEEP_SEED: u64 = 17;
const ORBIT_SEED: u64 = 19;
const FUZZ_SEED: u64 = 23;

fn sheaf_limits() -> Limits {
    Limits { force_sheaf: true, ..Limits::default() }
}

/// 500 sheaves within the randomized-criterion bounds: at most 4
/// points, 6 opens, universes of 3, groups of order 6, both invariance
/// modes.
fn corpus() -> &'static [GPresheaf] {
    static CORPUS: OnceLock<Vec<GPresheaf>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let limits = sheaf_limits();
        (0..500).map(|i| random_presheaf(&mut rng_for(CORPUS_SEED, i), &limits)).collect()
    })
}

fn systems() -> &'static [DirectedSystem] {
    static SYSTEMS: OnceLock<Vec<DirectedSystem>> = OnceLock::new();
    SYSTEMS.get_or_init(|| {
        let limits = Limits::default();
        (0..200).map(|i| random_system(&mut rng_for(SYSTEM_SEED, i), &limits)).collect()
    })
}

fn exact_corpus() -> Vec<&'static GPresheaf> {
    corpus().iter().filter(|p| is_exact(p).is_ok()).collect()
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0..1u32 << n)
        .map(|bits| (0..n).filter(|&i| bits >> i & 1 == 1).collect())
        .collect()
}

fn all_maps(from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..from {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..to).map(move |y| {
                    let mut next = prefix.clone();
                    next.push(y);
                    next
                })
            })
            .collect();
    }
    out
}

/// Every valid sheaf on the two-point space with one open point, over
/// the signature of a single unary relation, with universes of size 1
/// or 2 and the trivial group.  Restriction maps must carry the
/// relation forward, which gives 3 + 12 + 5 + 38 = 58 presheaves over
/// the four universe-size pairs, all of them sheaves.
fn two_point_family() -> Vec<GPresheaf> {
    let sig = parse_signature("rel R/1").expect("one unary relation parses");
    let space = FiniteSpace::sierpinski();
    let open_point = PointSet::singleton(0);
    let full = space.full_set();
    let mut family = Vec::new();
    for n_full in 1..=2usize {
        for n_open in 1..=2usize {
            for map in all_maps(n_full, n_open) {
                for r_full in subsets(n_full) {
                    for r_open in subsets(n_open) {
                        let mut top = GStructure::plain(sig.clone(), n_full);
                        top.relations.insert(
                            String::from("R"),
                            r_full.iter().map(|&x| vec![x]).collect(),
                        );
                        let mut bottom = GStructure::plain(sig.clone(), n_open);
                        bottom.relations.insert(
                            String::from("R"),
                            r_open.iter().map(|&x| vec![x]).collect(),
                        );
                        let candidate = GPresheaf {
                            space: space.clone(),
                            objects: [(open_point, bottom), (full, top)]
                                .into_iter()
                                .collect(),
                            restrictions: [((open_point, full), map.clone())]
                                .into_iter()
                                .collect(),
                        };
                        if candidate.validate().is_ok() && is_sheaf(&candidate).is_ok() {
                            family.push(candidate);
                        }
                    }
                }
            }
        }
    }
    family
}

#[test]
fn criterion_01_generic_model_theorem_exhaustive_on_the_two_point_space() {
    let start = Instant::now();
    let family = two_point_family();
    assert_eq!(family.len(), 58, "the exhaustive family has a fixed size");
    let mut formulas: u128 = 0;
    for p in &family {
        let filters = maximal_filters(&p.space);
        assert_eq!(filters.len(), 1, "one maximal filter on this space");
        for f in &filters {
            let outcome = sweep_theorem(p, f, 3, 1)
                .unwrap_or_else(|gate| panic!("the sweep must run:\n{gate}"));
            assert!(
                outcome.divergences.is_empty(),
                "the three statements diverge: {:?}",
                outcome.divergences
            );
            formulas += outcome.formulas;
        }
    }
    println!(
        "criterion 1: pass — 58 sheaves, depth 3, {formulas} formulas, 0 divergences ({:.1?})",
        start.elapsed()
    );
}

#[test]
fn criterion_02_generic_model_theorem_randomized() {
    let start = Instant::now();
    let mut filters_checked = 0usize;
    let mut modes = [0usize; 2];
    for p in corpus() {
        let mode = p.objects.values().next().expect("inhabited").mode;
        modes[(mode == InvarianceMode::Diagonal) as usize] += 1;
        for f in maximal_filters(&p.space) {
            let outcome = sweep_theorem(p, &f, 2, 1)
                .unwrap_or_else(|gate| panic!("the sweep must run:\n{gate}"));
            assert!(
                outcome.divergences.is_empty(),
                "the three statements diverge: {:?}",
                outcome.divergences
            );
            filters_checked += 1;
        }
    }
    println!(
        "criterion 2: pass — 500 sheaves ({} componentwise, {} diagonal), {filters_checked} maximal filters, depth 2, 0 divergences ({:.1?})",
        modes[0],
        modes[1],
        start.elapsed()
    );
}

#[test]
fn criterion_03_colimit_satisfaction_matches_the_objects_below() {
    let start = Instant::now();
    let mut chains = 0usize;
    let mut vees = 0usize;
    for sys in systems() {
        if sys.edges.len() == 2 && sys.edges[0].lower == sys.edges[1].lower {
            vees += 1;
        } else {
            chains += 1;
        }
        let report = check_system_satisfaction(sys, 2);
        assert!(report.is_ok(), "a germ diverged from its system:\n{report}");
    }
    println!(
        "criterion 3: pass — 200 systems ({chains} chains, {vees} vees), positive depth 2, 0 failures ({:.1?})",
        start.elapsed()
    );
}

#[test]
fn criterion_04_morphisms_preserve_what_their_kind_promises() {
    let start = Instant::now();
    let limits = Limits::default();
    let mut submersions = 0usize;
    let mut isos_or_embeddings = 0usize;
    for i in 0..200 {
        let arrow = random_morphism(&mut rng_for(MORPHISM_SEED, i), &limits);
        let terms = check_term_commutation(&arrow, 2);
        assert!(terms.is_ok(), "a term failed to commute:\n{terms}");
        let positive = check_positive_preservation(&arrow, 2);
        assert!(positive.is_ok(), "a positive formula was dropped:\n{positive}");
        let submersion = check_submersion_preservation(&arrow, 2);
        assert!(submersion.is_ok(), "a negation-free formula was dropped:\n{submersion}");
        if !submersion.bounds.iter().any(|(k, v)| k == "applicable" && v == "false") {
            submersions += 1;
        }
        let iso = check_iso_equivalence(&arrow, 2);
        assert!(iso.is_ok(), "an equivalence failed:\n{iso}");
        if !iso.bounds.iter().any(|(k, v)| k == "applicable" && v == "false") {
            isos_or_embeddings += 1;
        }
    }
    println!(
        "criterion 4: pass — 200 morphisms ({submersions} surjective saturated, {isos_or_embeddings} iso/embedding), depth 2, 0 failures ({:.1?})",
        start.elapsed()
    );
}

#[test]
fn criterion_05_maximal_filters_on_exact_presheaves_are_generic() {
    let start = Instant::now();
    let exact = exact_corpus();
    assert!(!exact.is_empty(), "the corpus contains exact presheaves");
    let mut filters_checked = 0usize;
    for p in &exact {
        for f in maximal_filters(&p.space) {
            let report = is_generic_filter(p, &f, 2, SemanticsMode::Local)
                .unwrap_or_else(|gate| panic!("genericity must be decidable:\n{gate}"));
            assert!(
                report.generic,
                "a maximal filter failed genericity: {:?}",
                report.failures
            );
            filters_checked += 1;
        }
    }
    println!(
        "criterion 5: pass — {} exact sheaves, {filters_checked} maximal filters generic at depth 2 ({:.1?})",
        exact.len(),
        start.elapsed()
    );
}

#[test]
fn criterion_06_forced_existentials_have_dense_reverifiable_witnesses() {
    let start = Instant::now();
    let exact = exact_corpus();
    for p in &exact {
        let report = run_check(p, SemanticsMode::Local, "max-principle", 3)
            .expect("the check is registered");
        assert!(report.is_ok(), "a witness failed:\n{report}");
    }
    println!(
        "criterion 6: pass — {} exact sheaves, existential bodies of depth 2, 0 failures ({:.1?})",
        exact.len(),
        start.elapsed()
    );
}

#[test]
fn criterion_07_double_negation_and_dense_opens_on_all_small_spaces() {
    let start = Instant::now();
    let mut spaces = Vec::new();
    for n in 1..=3 {
        spaces.extend(enumerate_topologies(n));
    }
    assert_eq!(spaces.len(), 1 + 4 + 29, "the topology counts on 1..=3 points");
    let limits = Limits {
        max_universe: 2,
        max_group: 2,
        force_sheaf: false,
        ..Limits::default()
    };
    let mut presheaves = 0usize;
    for (s, space) in spaces.iter().enumerate() {
        let dense = check_dense_membership(space);
        assert!(dense.is_ok(), "a dense open escaped a maximal filter:\n{dense}");
        for draw in 0..3 {
            let mut rng = rng_for(SPACE_SWEEP_SEED, (s * 3 + draw) as u64);
            let p = random_presheaf_on(&mut rng, space, &limits);
            let report = run_check(&p, SemanticsMode::Local, "double-negation", 2)
                .expect("the check is registered");
            assert!(report.is_ok(), "double negation failed:\n{report}");
            presheaves += 1;
        }
    }
    println!(
        "criterion 7: pass — 34 spaces, {presheaves} presheaves, positive depth 2, 0 failures ({:.1?})",
        start.elapsed()
    );
}

#[test]
fn criterion_08_forcing_internal_consistency_over_the_corpus() {
    let start = Instant::now();
    let ids = [
        "positive-collapse",
        "fast-path",
        "forcing-sets-open",
        "local-semantics",
        "restriction-monotonicity",
        "covering",
        "existential-covering",
    ];
    for p in corpus() {
        for id in ids {
            let report =
                run_check(p, SemanticsMode::Local, id, 1).expect("the check is registered");
            assert!(report.is_ok(), "{id} failed:\n{report}");
        }
    }
    println!(
        "criterion 8: pass — 500 sheaves x {} checks at depth 1, 0 failures ({:.1?})",
        ids.len(),
        start.elapsed()
    );
}

#[test]
fn criterion_09_every_constructed_colimit_is_a_valid_structure() {
    let start = Instant::now();
    let mut validated = 0usize;
    for p in &two_point_family() {
        for f in maximal_filters(&p.space) {
            let gm = generic_model(p, &f)
                .unwrap_or_else(|gate| panic!("the model must build:\n{gate}"));
            let report = gm.structure().validate();
            assert!(report.is_ok(), "an invalid colimit:\n{report}");
            validated += 1;
        }
    }
    for p in corpus() {
        for x in p.space.points() {
            let st =
                stalk(p, x).unwrap_or_else(|gate| panic!("the stalk must build:\n{gate}"));
            let report = st.structure().validate();
            assert!(report.is_ok(), "an invalid stalk colimit:\n{report}");
            validated += 1;
        }
        for f in maximal_filters(&p.space) {
            let gm = generic_model(p, &f)
                .unwrap_or_else(|gate| panic!("the model must build:\n{gate}"));
            let report = gm.structure().validate();
            assert!(report.is_ok(), "an invalid colimit:\n{report}");
            validated += 1;
        }
    }
    for sys in systems() {
        let c = colimit(sys).unwrap_or_else(|gate| panic!("the colimit must build:\n{gate}"));
        let report = c.structure.validate();
        assert!(report.is_ok(), "an invalid system colimit:\n{report}");
        validated += 1;
    }
    println!(
        "criterion 9: pass — {validated} colimits validated, 0 failures ({:.1?})",
        start.elapsed()
    );
}

#[test]
fn criterion_10_orbits_commute_with_taking_the_generic_model() {
    let start = Instant::now();
    let limits = sheaf_limits();
    let mut pairs = 0usize;
    let mut nontrivial = 0usize;
    for i in 0..50 {
        let p = random_presheaf(&mut rng_for(ORBIT_SEED, i), &limits);
        if p.objects.values().next().expect("inhabited").group.order() > 1 {
            nontrivial += 1;
        }
        let quotiented = orbit_presheaf(&p)
            .unwrap_or_else(|gate| panic!("the orbit presheaf must build:\n{gate}"));
        for f in maximal_filters(&p.space) {
            let gm = generic_model(&p, &f)
                .unwrap_or_else(|gate| panic!("the model must build:\n{gate}"));
            let orbits = orbit_structure(gm.structure())
                .unwrap_or_else(|gate| panic!("the orbit structure must build:\n{gate}"));
            let gm_of_orbits = generic_model(&quotiented, &f)
                .unwrap_or_else(|gate| panic!("the quotient model must build:\n{gate}"));
            assert!(
                find_isomorphism(&orbits.structure, gm_of_orbits.structure()).is_some(),
                "no isomorphism between the orbit of the model and the model of the orbits"
            );
            pairs += 1;
        }
    }
    println!(
        "criterion 10: pass — 50 sheaves ({nontrivial} with nontrivial groups), {pairs} filter pairs isomorphic ({:.1?})",
        start.elapsed()
    );
}

#[test]
fn criterion_11_the_quantifier_mode_sweep_completes_and_replays() {
    let start = Instant::now();
    let config = FuzzConfig {
        seed: FUZZ_SEED,
        budget: 40,
        targets: vec![String::from("forall-modes")],
        limits: Limits::default(),
        depth: 1,
    };
    let outcome = fuzz(&config).expect("the sweep accepts its own target");
    assert_eq!(outcome.rounds, 40, "the sweep runs its whole budget");
    let rendered = serde_json::to_string(&outcome).expect("the report serializes");
    assert!(!rendered.is_empty());
    for finding in &outcome.findings {
        assert!(replay(finding), "a finding failed to replay byte for byte");
    }
    println!(
        "criterion 11: pass — 40 rounds, {} findings, all replayed ({:.1?})",
        outcome.findings.len(),
        start.elapsed()
    );
}
