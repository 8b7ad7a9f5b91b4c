//! Seeded random generation of groups, structures, presheaves,
//! directed systems, and morphisms.
//!
//! Everything is built valid by construction: universes are disjoint
//! unions of coset orbits, functions send orbit representatives to
//! fixed points of their stabilizers, relations are closures of random
//! seed tuples, and presheaves arise as pointwise-congruence quotients
//! of a master structure, which makes the restriction maps functorial
//! for free. Each value is re-validated before it is returned, and the
//! same seed always produces the same output.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gsheaf_core::forcing::SemanticsMode;
use gsheaf_core::logic::Signature;
use gsheaf_core::presheaf::{covering_inclusions, is_sheaf, GPresheaf};
use gsheaf_core::structures::{
    quotient_by_partition, DirectedSystem, FiniteGroup, GMorphism, GStructure, InvarianceMode,
    SystemEdge,
};
use gsheaf_core::topology::{FiniteSpace, PointSet};

use crate::document::{auto_names, render_document, ModelDocument};

#[derive(Debug, Clone)]
pub struct Limits {
    pub max_points: usize,
    /// Nonempty opens; the empty set is not counted.
    pub max_opens: usize,
    pub max_universe: usize,
    pub max_group: usize,
    pub force_sheaf: bool,
    /// `None` picks an invariance mode at random per instance.
    pub invariance: Option<InvarianceMode>,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            max_points: 4,
            max_opens: 6,
            max_universe: 3,
            max_group: 6,
            force_sheaf: false,
            invariance: None,
        }
    }
}

/// The generator stream for one task index under a master seed.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn each_tuple(size: usize, arity: usize, mut f: impl FnMut(&[usize])) {
    let mut tuple = vec![0usize; arity];
    loop {
        f(&tuple);
        let mut i = arity;
        loop {
            if i == 0 {
                return;
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

fn tuple_index(args: &[usize], size: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

pub fn random_space(rng: &mut ChaCha8Rng, limits: &Limits) -> FiniteSpace {
    let n = rng.random_range(1..=limits.max_points.max(1));
    if !rng.random_bool(0.5) {
        for _ in 0..24 {
            let full = PointSet::from_points(0..n);
            let count = rng.random_range(1..=limits.max_opens);
            let mut opens = vec![PointSet::EMPTY, full];
            for _ in 0..count {
                let set = PointSet::from_points(
                    (0..n).filter(|_| rng.random_bool(0.5)),
                );
                if !set.is_empty() {
                    opens.push(set);
                }
            }
            let space = FiniteSpace::new(n, opens).completed();
            if space.nonempty_opens().count() <= limits.max_opens {
                return space;
            }
        }
    }
    chain_space(rng, n, limits.max_opens)
}

/// A topology whose nonempty opens are nested prefixes of a shuffled
/// point order. Every presheaf on such a space is a sheaf, because the
/// only irredundant cover of an open is the open itself.
pub fn chain_space(rng: &mut ChaCha8Rng, n: usize, max_opens: usize) -> FiniteSpace {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut cuts: BTreeSet<usize> = [n].into_iter().collect();
    for cut in 1..n {
        if cuts.len() < max_opens && rng.random_bool(0.5) {
            cuts.insert(cut);
        }
    }
    let opens = cuts
        .into_iter()
        .map(|cut| PointSet::from_points(order[..cut].iter().copied()))
        .chain([PointSet::EMPTY]);
    FiniteSpace::new(n, opens)
}

pub fn random_group(rng: &mut ChaCha8Rng, max_order: usize) -> FiniteGroup {
    let mut pool = vec![FiniteGroup::trivial()];
    for k in 2..=max_order.min(6) {
        pool.push(FiniteGroup::cyclic(k));
    }
    if max_order >= 4 {
        pool.push(FiniteGroup::direct_product(
            &FiniteGroup::cyclic(2),
            &FiniteGroup::cyclic(2),
        ));
    }
    if max_order >= 6 {
        pool.push(FiniteGroup::symmetric(3));
    }
    pool.choose(rng).expect("the pool is never empty").clone()
}

pub fn random_signature(rng: &mut ChaCha8Rng) -> Signature {
    let relation_names = ["R", "S"];
    let relations: Vec<(String, usize)> = (0..rng.random_range(1..=2))
        .map(|i| (String::from(relation_names[i]), rng.random_range(1..=2)))
        .collect();
    let functions = if rng.random_bool(0.5) {
        vec![(String::from("f"), 1)]
    } else {
        Vec::new()
    };
    let constants =
        if rng.random_bool(0.3) { vec![String::from("c")] } else { Vec::new() };
    Signature::new(functions, relations, constants).expect("the fixed names are usable")
}

fn subgroups(group: &FiniteGroup) -> Vec<Vec<usize>> {
    let order = group.order();
    let mut out = Vec::new();
    for mask in 0u64..(1 << order) {
        if mask >> group.identity & 1 == 0 {
            continue;
        }
        let elems: Vec<usize> = (0..order).filter(|&x| mask >> x & 1 == 1).collect();
        let closed = elems
            .iter()
            .all(|&a| elems.iter().all(|&b| elems.contains(&group.mul(a, b))));
        if closed {
            out.push(elems);
        }
    }
    out
}

/// Appends the coset space G/H to an action table under construction.
fn push_coset_orbit(group: &FiniteGroup, subgroup: &[usize], action: &mut Vec<Vec<usize>>) {
    let order = group.order();
    let base = action[0].len();
    let mut coset_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut reps = Vec::new();
    for g in 0..order {
        if coset_of.contains_key(&g) {
            continue;
        }
        let id = reps.len();
        reps.push(g);
        for &h in subgroup {
            coset_of.insert(group.mul(g, h), id);
        }
    }
    for (g, row) in action.iter_mut().enumerate() {
        for &rep in &reps {
            row.push(base + coset_of[&group.mul(g, rep)]);
        }
    }
}

/// An action of the group on `1..=max_universe` elements as a disjoint
/// union of coset orbits. With `need_fixed_point` the first orbit is a
/// single fixed element.
fn random_action(
    rng: &mut ChaCha8Rng,
    group: &FiniteGroup,
    max_universe: usize,
    need_fixed_point: bool,
) -> Vec<Vec<usize>> {
    let subs = subgroups(group);
    let order = group.order();
    let target = rng.random_range(1..=max_universe);
    let mut action: Vec<Vec<usize>> = vec![Vec::new(); order];
    if need_fixed_point {
        push_coset_orbit(group, &(0..order).collect::<Vec<_>>(), &mut action);
    }
    while action[0].len() < target {
        let room = target - action[0].len();
        let candidates: Vec<&Vec<usize>> =
            subs.iter().filter(|h| order / h.len() <= room).collect();
        let h = candidates.choose(rng).expect("the full subgroup always fits");
        push_coset_orbit(group, h, &mut action);
    }
    action
}

fn orbit_of(action: &[Vec<usize>], x: usize) -> BTreeSet<usize> {
    action.iter().map(|row| row[x]).collect()
}

fn stabilizer(action: &[Vec<usize>], x: usize) -> Vec<usize> {
    (0..action.len()).filter(|&g| action[g][x] == x).collect()
}

fn fixed_by(action: &[Vec<usize>], gs: &[usize], size: usize) -> Vec<usize> {
    (0..size).filter(|&y| gs.iter().all(|&g| action[g][y] == y)).collect()
}

pub fn random_structure(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    group: &FiniteGroup,
    mode: InvarianceMode,
    max_universe: usize,
) -> GStructure {
    let need_fixed_point = !sig.constants().is_empty();
    let action = random_action(rng, group, max_universe, need_fixed_point);
    let n = action[0].len();

    let mut functions = BTreeMap::new();
    for (name, arity) in sig.functions() {
        let table = if *arity == 1 {
            equivariant_unary(rng, &action, n)
        } else {
            let mut t = Vec::new();
            each_tuple(n, *arity, |args| t.push(args[0]));
            t
        };
        functions.insert(name.clone(), table);
    }

    let mut relations = BTreeMap::new();
    for (name, arity) in sig.relations() {
        let mut tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
        for _ in 0..rng.random_range(0..=2) {
            let seed: Vec<usize> =
                (0..*arity).map(|_| rng.random_range(0..n)).collect();
            match mode {
                InvarianceMode::Componentwise => {
                    let orbits: Vec<Vec<usize>> = seed
                        .iter()
                        .map(|&a| orbit_of(&action, a).into_iter().collect())
                        .collect();
                    each_product(&orbits, &mut |t| {
                        tuples.insert(t.to_vec());
                    });
                }
                InvarianceMode::Diagonal => {
                    for g in 0..group.order() {
                        tuples.insert(seed.iter().map(|&a| action[g][a]).collect());
                    }
                }
            }
        }
        relations.insert(name.clone(), tuples);
    }

    let mut constants = BTreeMap::new();
    if need_fixed_point {
        let all: Vec<usize> = (0..group.order()).collect();
        let fixed = fixed_by(&action, &all, n);
        for name in sig.constants() {
            constants.insert(
                name.clone(),
                *fixed.choose(rng).expect("a fixed point was reserved"),
            );
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
        mode,
    };
    let report = m.validate();
    assert!(report.is_ok(), "generated structures must validate:\n{report}");
    m
}

/// An equivariant unary table: each orbit representative is sent to a
/// fixed point of its stabilizer and the rest of the orbit follows.
fn equivariant_unary(rng: &mut ChaCha8Rng, action: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut table = vec![usize::MAX; n];
    for x0 in 0..n {
        if table[x0] != usize::MAX {
            continue;
        }
        let stab = stabilizer(action, x0);
        let candidates = fixed_by(action, &stab, n);
        let y0 = *candidates.choose(rng).expect("x0 is fixed by its own stabilizer");
        for g in 0..action.len() {
            table[action[g][x0]] = action[g][y0];
        }
    }
    table
}

fn each_product(axes: &[Vec<usize>], f: &mut impl FnMut(&[usize])) {
    fn go(axes: &[Vec<usize>], prefix: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        match axes.split_first() {
            None => f(prefix),
            Some((axis, rest)) => {
                for &a in axis {
                    prefix.push(a);
                    go(rest, prefix, f);
                    prefix.pop();
                }
            }
        }
    }
    go(axes, &mut Vec::new(), f);
}

/// The finest congruence containing the given pairs: closed under the
/// action, the function tables, and transitivity. Returns the class of
/// each element (classes numbered by first occurrence) and one
/// representative per class.
pub fn close_congruence(m: &GStructure, pairs: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let n = m.universe_size;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    fn union(parent: &mut [usize], a: usize, b: usize) -> bool {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra == rb {
            return false;
        }
        parent[ra.max(rb)] = ra.min(rb);
        true
    }
    for &(a, b) in pairs {
        union(&mut parent, a, b);
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in x + 1..n {
                if find(&mut parent, x) != find(&mut parent, y) {
                    continue;
                }
                for g in m.group.elements() {
                    changed |= union(&mut parent, m.act(g, x), m.act(g, y));
                }
            }
        }
        for (name, table) in &m.functions {
            let arity = m.sig.function_arity(name).unwrap_or(1);
            let mut tuples = Vec::new();
            each_tuple(n, arity, |t| tuples.push(t.to_vec()));
            for s in &tuples {
                for t in &tuples {
                    let pointwise = s
                        .iter()
                        .zip(t)
                        .all(|(&a, &b)| find(&mut parent, a) == find(&mut parent, b));
                    if pointwise {
                        changed |= union(
                            &mut parent,
                            table[tuple_index(s, n)],
                            table[tuple_index(t, n)],
                        );
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        let root = find(&mut parent, x);
        if class_of[root] == usize::MAX {
            class_of[root] = reps.len();
            reps.push(x);
        }
        class_of[x] = class_of[root];
    }
    (class_of, reps)
}

fn random_pairs(rng: &mut ChaCha8Rng, n: usize, most: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    if n < 2 {
        return pairs;
    }
    for _ in 0..rng.random_range(0..=most) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            pairs.push((a, b));
        }
    }
    pairs
}

/// A presheaf built by collapsing a master structure pointwise: each
/// point contributes a congruence, and the structure on an open is the
/// master modulo the congruences of the points outside it. Restriction
/// maps are the induced projections, so functoriality holds by
/// construction. With `force_sheaf` the sampler retries until the
/// sheaf checks pass, falling back to chain topologies, where they
/// always do.
pub fn random_presheaf(rng: &mut ChaCha8Rng, limits: &Limits) -> GPresheaf {
    let mut attempt = 0;
    loop {
        attempt += 1;
        let space = if limits.force_sheaf && attempt > 20 {
            let n = rng.random_range(1..=limits.max_points.max(1));
            chain_space(rng, n, limits.max_opens)
        } else {
            random_space(rng, limits)
        };
        let p = random_presheaf_on(rng, &space, limits);
        if limits.force_sheaf && !is_sheaf(&p).is_ok() {
            continue;
        }
        return p;
    }
}

/// One quotient-chain presheaf over the given space: structures are
/// quotients of a master structure by congruences that grow as opens
/// shrink, so restriction maps are the induced projections.
pub fn random_presheaf_on(
    rng: &mut ChaCha8Rng,
    space: &FiniteSpace,
    limits: &Limits,
) -> GPresheaf {
    let group = random_group(rng, limits.max_group);
    let sig = random_signature(rng);
    let mode = limits.invariance.unwrap_or_else(|| {
        if rng.random_bool(0.5) {
            InvarianceMode::Componentwise
        } else {
            InvarianceMode::Diagonal
        }
    });
    let master = random_structure(rng, &sig, &group, mode, limits.max_universe);
    let n = space.num_points();
    let point_pairs: Vec<Vec<(usize, usize)>> =
        (0..n).map(|_| random_pairs(rng, master.universe_size, 2)).collect();

    let mut objects = BTreeMap::new();
    let mut class_maps: BTreeMap<PointSet, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for u in space.nonempty_opens() {
        let pairs: Vec<(usize, usize)> = (0..n)
            .filter(|&x| !u.contains(x))
            .flat_map(|x| point_pairs[x].iter().copied())
            .collect();
        let (class_of, reps) = close_congruence(&master, &pairs);
        let classes = reps.len();
        let (quotient, _) = quotient_by_partition(&master, &class_of, classes)
            .expect("congruence closures descend");
        objects.insert(u, quotient);
        class_maps.insert(u, (class_of, reps));
    }
    let restrictions = covering_inclusions(space)
        .into_iter()
        .map(|(u, v)| {
            let (class_u, _) = &class_maps[&u];
            let (_, reps_v) = &class_maps[&v];
            let map: Vec<usize> = reps_v.iter().map(|&r| class_u[r]).collect();
            ((u, v), map)
        })
        .collect();
    let p = GPresheaf { space: space.clone(), objects, restrictions };
    let report = p.validate();
    assert!(report.is_ok(), "generated presheaves must validate:\n{report}");
    p
}

/// A directed system shaped like a chain or a V: quotients of one
/// master structure along nested congruences, arrows pointing from the
/// finer object to the coarser one.
pub fn random_system(rng: &mut ChaCha8Rng, limits: &Limits) -> DirectedSystem {
    let group = random_group(rng, limits.max_group);
    let sig = random_signature(rng);
    let mode = limits.invariance.unwrap_or_else(|| {
        if rng.random_bool(0.5) {
            InvarianceMode::Componentwise
        } else {
            InvarianceMode::Diagonal
        }
    });
    let master = random_structure(rng, &sig, &group, mode, limits.max_universe);
    let n = master.universe_size;

    let quotient_of = |pairs: &[(usize, usize)]| {
        let (class_of, reps) = close_congruence(&master, pairs);
        let classes = reps.len();
        let (q, _) = quotient_by_partition(&master, &class_of, classes)
            .expect("congruence closures descend");
        (q, class_of, reps)
    };

    let fine_pairs = random_pairs(rng, n, 1);
    let mut coarse_pairs = fine_pairs.clone();
    coarse_pairs.extend(random_pairs(rng, n, 2));
    let (coarse, coarse_class, _) = quotient_of(&coarse_pairs);
    let (fine, fine_class, fine_reps) = quotient_of(&fine_pairs);
    let fine_to_coarse: Vec<usize> =
        fine_reps.iter().map(|&r| coarse_class[r]).collect();

    let shape = rng.random_range(0..3);
    let sys = match shape {
        0 => DirectedSystem {
            objects: vec![coarse, master.clone()],
            edges: vec![SystemEdge { lower: 0, upper: 1, map: coarse_class }],
        },
        1 => DirectedSystem {
            objects: vec![coarse, fine, master.clone()],
            edges: vec![
                SystemEdge { lower: 0, upper: 1, map: fine_to_coarse },
                SystemEdge { lower: 1, upper: 2, map: fine_class },
            ],
        },
        _ => DirectedSystem {
            objects: vec![coarse, fine, master.clone()],
            edges: vec![
                SystemEdge { lower: 0, upper: 1, map: fine_to_coarse },
                SystemEdge { lower: 0, upper: 2, map: coarse_class },
            ],
        },
    };
    let report = sys.validate();
    assert!(report.is_ok(), "generated systems must validate:\n{report}");
    sys
}

/// A valid morphism: a congruence projection (a submersion after
/// saturating the source relations), a transported isomorphism, an
/// orbit-padded embedding, or a projection followed by an embedding.
pub fn random_morphism(rng: &mut ChaCha8Rng, limits: &Limits) -> GMorphism {
    let group = random_group(rng, limits.max_group);
    let sig = random_signature(rng);
    let mode = limits.invariance.unwrap_or_else(|| {
        if rng.random_bool(0.5) {
            InvarianceMode::Componentwise
        } else {
            InvarianceMode::Diagonal
        }
    });
    let kind = rng.random_range(0..4);
    let arrow = match kind {
        0 => {
            let a = random_structure(rng, &sig, &group, mode, limits.max_universe);
            submersion_of(rng, &a)
        }
        1 => {
            let a = random_structure(rng, &sig, &group, mode, limits.max_universe);
            transported_iso(rng, &a)
        }
        2 => {
            let inner = limits.max_universe.saturating_sub(1).max(1);
            let a = random_structure(rng, &sig, &group, mode, inner);
            padded_embedding(rng, &a, limits.max_universe)
        }
        _ => {
            let a = random_structure(rng, &sig, &group, mode, limits.max_universe);
            let proj = submersion_of(rng, &a);
            let include =
                padded_embedding(rng, &proj.target, proj.target.universe_size + 1);
            proj.then(&include)
        }
    };
    let report = arrow.validate();
    assert!(report.is_ok(), "generated morphisms must validate:\n{report}");
    arrow
}

/// Saturates the relations of a copy of `m` under a random congruence
/// and projects: the result is a surjective saturated morphism.
fn submersion_of(rng: &mut ChaCha8Rng, m: &GStructure) -> GMorphism {
    let pairs = random_pairs(rng, m.universe_size, 2);
    let (class_of, reps) = close_congruence(m, &pairs);
    let mut saturated = m.clone();
    for (name, tuples) in &mut saturated.relations {
        let arity = m.sig.relation_arity(name).unwrap_or(1);
        let mut grown = tuples.clone();
        each_tuple(m.universe_size, arity, |t| {
            let matches = tuples.iter().any(|have| {
                have.iter().zip(t).all(|(&a, &b)| class_of[a] == class_of[b])
            });
            if matches {
                grown.insert(t.to_vec());
            }
        });
        *tuples = grown;
    }
    let (_, projection) = quotient_by_partition(&saturated, &class_of, reps.len())
        .expect("congruence closures descend");
    projection
}

/// Transports `m` along a random permutation of its universe.
fn transported_iso(rng: &mut ChaCha8Rng, m: &GStructure) -> GMorphism {
    let n = m.universe_size;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut action = Vec::new();
    for row in &m.action {
        let mut out = vec![0usize; n];
        for (x, &gx) in row.iter().enumerate() {
            out[perm[x]] = perm[gx];
        }
        action.push(out);
    }
    let mut functions = BTreeMap::new();
    for (name, table) in &m.functions {
        let arity = m.sig.function_arity(name).unwrap_or(1);
        let mut out = vec![0usize; table.len()];
        each_tuple(n, arity, |args| {
            let image: Vec<usize> = args.iter().map(|&a| perm[a]).collect();
            out[tuple_index(&image, n)] = perm[table[tuple_index(args, n)]];
        });
        functions.insert(name.clone(), out);
    }
    let relations = m
        .relations
        .iter()
        .map(|(name, tuples)| {
            let moved =
                tuples.iter().map(|t| t.iter().map(|&a| perm[a]).collect()).collect();
            (name.clone(), moved)
        })
        .collect();
    let constants =
        m.constants.iter().map(|(name, &c)| (name.clone(), perm[c])).collect();
    let target = GStructure {
        sig: m.sig.clone(),
        group: m.group.clone(),
        universe_size: n,
        functions,
        relations,
        constants,
        action,
        mode: m.mode,
    };
    GMorphism { source: m.clone(), target, map: perm }
}

/// Extends `m` by fresh orbits and includes it: every relation tuple
/// added by the padding touches a padded element, so the inclusion is
/// an embedding.
fn padded_embedding(rng: &mut ChaCha8Rng, m: &GStructure, max_universe: usize) -> GMorphism {
    let n = m.universe_size;
    let room = max_universe.saturating_sub(n).max(1);
    let pad = random_action(rng, &m.group, room, false);
    let extra = pad[0].len();
    let total = n + extra;
    let mut action = Vec::new();
    for (g, row) in m.action.iter().enumerate() {
        let mut out = row.clone();
        out.extend(pad[g].iter().map(|&x| n + x));
        action.push(out);
    }
    let mut functions = BTreeMap::new();
    for (name, table) in &m.functions {
        let arity = m.sig.function_arity(name).unwrap_or(1);
        if arity == 1 {
            let mut out = table.clone();
            out.extend(vec![usize::MAX; extra]);
            for x0 in n..total {
                if out[x0] != usize::MAX {
                    continue;
                }
                let stab = stabilizer(&action, x0);
                let candidates = fixed_by(&action, &stab, total);
                let y0 =
                    *candidates.choose(rng).expect("x0 is fixed by its own stabilizer");
                for g in 0..action.len() {
                    out[action[g][x0]] = action[g][y0];
                }
            }
            functions.insert(name.clone(), out);
        } else {
            let mut out = Vec::new();
            each_tuple(total, arity, |args| {
                if args.iter().all(|&a| a < n) {
                    out.push(table[tuple_index(args, n)]);
                } else {
                    out.push(args[0]);
                }
            });
            functions.insert(name.clone(), out);
        }
    }
    let mut relations = m.relations.clone();
    for (name, tuples) in &mut relations {
        let arity = m.sig.relation_arity(name).unwrap_or(1);
        if extra > 0 && rng.random_bool(0.5) {
            let seed: Vec<usize> = (0..arity)
                .map(|i| {
                    if i == 0 {
                        rng.random_range(n..total)
                    } else {
                        rng.random_range(0..total)
                    }
                })
                .collect();
            match m.mode {
                InvarianceMode::Componentwise => {
                    let orbits: Vec<Vec<usize>> = seed
                        .iter()
                        .map(|&a| orbit_of(&action, a).into_iter().collect())
                        .collect();
                    each_product(&orbits, &mut |t| {
                        tuples.insert(t.to_vec());
                    });
                }
                InvarianceMode::Diagonal => {
                    for g in 0..action.len() {
                        tuples.insert(seed.iter().map(|&a| action[g][a]).collect());
                    }
                }
            }
        }
    }
    let target = GStructure {
        sig: m.sig.clone(),
        group: m.group.clone(),
        universe_size: total,
        functions,
        relations,
        constants: m.constants.clone(),
        action,
        mode: m.mode,
    };
    GMorphism { source: m.clone(), target, map: (0..n).collect() }
}

/// Pads the structure on one minimal nonempty open with fresh orbits,
/// so the incoming restriction maps stop being surjective. The small
/// open then carries elements with no preimage above it, which is the
/// shape that can separate the two readings of the universal
/// quantifier.
pub fn pad_minimal_object(rng: &mut ChaCha8Rng, p: &GPresheaf) -> GPresheaf {
    let opens: Vec<PointSet> = p.space.nonempty_opens().collect();
    let minimal: Vec<PointSet> = opens
        .iter()
        .copied()
        .filter(|&u| !opens.iter().any(|&v| v != u && v.is_subset(u)))
        .collect();
    let w = *minimal.choose(rng).expect("every space has a minimal nonempty open");
    let mut q = p.clone();
    let old = &p.objects[&w];
    let include = padded_embedding(rng, old, old.universe_size + 2);
    q.objects.insert(w, include.target);
    let report = q.validate();
    assert!(report.is_ok(), "padded presheaves must validate:\n{report}");
    q
}

/// Renders a generated presheaf as a document under the automatic
/// name tables.
pub fn generated_document(p: &GPresheaf) -> ModelDocument {
    render_document(p, &auto_names(p), SemanticsMode::Local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::{document_string, interpret};

    #[test]
    fn the_same_seed_yields_the_same_document_bytes() {
        let limits = Limits::default();
        let mut first = rng_for(11, 0);
        let mut second = rng_for(11, 0);
        let a = document_string(&generated_document(&random_presheaf(&mut first, &limits)));
        let b = document_string(&generated_document(&random_presheaf(&mut second, &limits)));
        assert_eq!(a, b);
        let mut third = rng_for(12, 0);
        let c = document_string(&generated_document(&random_presheaf(&mut third, &limits)));
        assert_ne!(a, c, "different seeds should explore different instances");
    }

    #[test]
    fn a_thousand_samples_validate_and_reload() {
        let limits = Limits {
            max_points: 4,
            max_opens: 5,
            max_universe: 4,
            max_group: 6,
            force_sheaf: false,
            invariance: None,
        };
        let mut rng = rng_for(5, 0);
        for i in 0..1000 {
            let p = random_presheaf(&mut rng, &limits);
            assert!(p.validate().is_ok());
            if i % 97 == 0 {
                let doc = generated_document(&p);
                let back = interpret(&doc).expect("generated documents reload");
                assert_eq!(back.presheaf.objects, p.objects);
            }
        }
    }

    #[test]
    fn forced_sheaves_pass_the_sheaf_checks() {
        let limits = Limits { force_sheaf: true, ..Limits::default() };
        let mut rng = rng_for(6, 0);
        for _ in 0..200 {
            let p = random_presheaf(&mut rng, &limits);
            assert!(is_sheaf(&p).is_ok());
        }
    }

    #[test]
    fn systems_and_morphisms_come_out_valid() {
        let limits = Limits::default();
        let mut rng = rng_for(7, 0);
        let mut shapes = BTreeSet::new();
        for _ in 0..120 {
            let sys = random_system(&mut rng, &limits);
            assert!(sys.validate().is_ok());
            shapes.insert((sys.objects.len(), sys.edges.len()));
            let arrow = random_morphism(&mut rng, &limits);
            assert!(arrow.validate().is_ok());
        }
        assert!(shapes.contains(&(3, 2)), "three-object shapes should appear");
    }

    #[test]
    fn morphism_kinds_cover_the_classification() {
        let limits = Limits::default();
        let mut rng = rng_for(8, 0);
        let mut iso = false;
        let mut submersion = false;
        let mut embedding = false;
        for _ in 0..80 {
            let arrow = random_morphism(&mut rng, &limits);
            let class = arrow.classify(0);
            iso |= class.isomorphism;
            submersion |= class.submersion;
            embedding |= class.embedding && !class.isomorphism;
        }
        assert!(iso && submersion && embedding);
    }
}
