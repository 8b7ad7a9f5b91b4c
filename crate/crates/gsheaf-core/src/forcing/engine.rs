//! A class-based sweep of the generic model theorem over every formula
//! up to a depth bound.
//!
//! Most formulas of a given depth are semantically interchangeable, so
//! the sweep works with semantic profiles instead of formulas: the
//! forcing table of the double-negation translation over every open,
//! parameter code and point, paired with the classical truth table over
//! the generic model. Every connective acts on profiles directly, which
//! lets each depth layer be processed as counted classes that mirror
//! the enumeration's layer structure pair by pair. The resulting class
//! counts must reproduce the closed-form formula count exactly, and one
//! representative per class is replayed against the direct evaluator
//! before the three readings of truth are compared once per class.
//! Universal quantifiers are evaluated in local mode throughout.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{generic_model, Evaluator, SemanticsMode};
use crate::logic::{atoms_at_depth, count_formulas, godel_translate, Formula};
use crate::presheaf::{GPresheaf, Section};
use crate::report::CheckReport;
use crate::topology::{Filter, PointSet};

/// One disagreement between the three readings of truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepDivergence {
    /// A representative of the class that diverges.
    pub formula: String,
    pub member: PointSet,
    pub parameters: Vec<usize>,
    pub classical: bool,
    pub on_member: bool,
    pub set_in_filter: bool,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub depth: usize,
    pub free_variables: usize,
    /// How many formulas the classes account for; always equal to the
    /// size of the enumeration at the same bounds.
    pub formulas: u128,
    /// Distinct semantic classes among them.
    pub classes: usize,
    pub divergences: Vec<SweepDivergence>,
}

struct Topo {
    opens: Vec<PointSet>,
    index: BTreeMap<PointSet, usize>,
    sizes: Vec<usize>,
    points: Vec<Vec<usize>>,
    within: Vec<Vec<usize>>,
    maps: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Topo {
    fn new(p: &GPresheaf) -> Topo {
        let opens: Vec<PointSet> = p.space.nonempty_opens().collect();
        let index: BTreeMap<PointSet, usize> =
            opens.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let sizes: Vec<usize> = opens.iter().map(|u| p.objects[u].universe_size).collect();
        let points: Vec<Vec<usize>> = opens.iter().map(|u| u.iter().collect()).collect();
        let within: Vec<Vec<usize>> = opens
            .iter()
            .map(|&u| (0..opens.len()).filter(|&v| opens[v].is_subset(u)).collect())
            .collect();
        let maps = p
            .derived_restrictions()
            .into_iter()
            .filter_map(|((sub, sup), map)| {
                Some(((*index.get(&sub)?, *index.get(&sup)?), map))
            })
            .collect();
        Topo { opens, index, sizes, points, within, maps }
    }
}

fn decode(code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0usize; len];
    let mut c = code;
    for slot in out.iter_mut().rev() {
        *slot = c % base;
        c /= base;
    }
    out
}

fn encode(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * base + d)
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1 << (i % 64);
}

/// Per-context layout: parameter tuples over an open are coded in base
/// `universe size` with the first variable most significant, and a
/// quantified variable appends one least-significant digit.
struct CtxTables {
    m: usize,
    codes: Vec<usize>,
    offsets: Vec<usize>,
    bits: usize,
    code_maps: BTreeMap<(usize, usize), Vec<usize>>,
    s_base: usize,
    s_codes: usize,
}

impl CtxTables {
    fn new(topo: &Topo, m: usize, g: usize) -> CtxTables {
        let codes: Vec<usize> = topo.sizes.iter().map(|&n| n.pow(m as u32)).collect();
        let mut offsets = Vec::with_capacity(codes.len());
        let mut bits = 0usize;
        for (o, &c) in codes.iter().enumerate() {
            offsets.push(bits);
            bits += c * topo.points[o].len();
        }
        let code_maps = topo
            .maps
            .iter()
            .map(|(&(sub, sup), map)| {
                let table: Vec<usize> = (0..codes[sup])
                    .map(|code| {
                        let digits = decode(code, topo.sizes[sup], m);
                        let mapped: Vec<usize> = digits.iter().map(|&d| map[d]).collect();
                        encode(&mapped, topo.sizes[sub])
                    })
                    .collect();
                ((sub, sup), table)
            })
            .collect();
        CtxTables { m, codes, offsets, bits, code_maps, s_base: g, s_codes: g.pow(m as u32) }
    }

    fn slot(&self, topo: &Topo, o: usize, code: usize, ppos: usize) -> usize {
        self.offsets[o] + code * topo.points[o].len() + ppos
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Profile {
    forcing: Vec<u64>,
    classical: Vec<u64>,
}

fn not_table(topo: &Topo, ct: &CtxTables, t: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(ct.bits)];
    for o in 0..topo.opens.len() {
        for code in 0..ct.codes[o] {
            for (ppos, &x) in topo.points[o].iter().enumerate() {
                let hit = topo.within[o].iter().any(|&v| {
                    topo.opens[v].contains(x) && {
                        let rc = ct.code_maps[&(v, o)][code];
                        topo.points[v]
                            .iter()
                            .enumerate()
                            .all(|(ypos, _)| !get_bit(t, ct.slot(topo, v, rc, ypos)))
                    }
                });
                if hit {
                    set_bit(&mut out, ct.slot(topo, o, code, ppos));
                }
            }
        }
    }
    out
}

fn imp_table(topo: &Topo, ct: &CtxTables, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(ct.bits)];
    for o in 0..topo.opens.len() {
        for code in 0..ct.codes[o] {
            for (ppos, &x) in topo.points[o].iter().enumerate() {
                let hit = topo.within[o].iter().any(|&v| {
                    topo.opens[v].contains(x) && {
                        let rc = ct.code_maps[&(v, o)][code];
                        topo.points[v].iter().enumerate().all(|(ypos, _)| {
                            let s = ct.slot(topo, v, rc, ypos);
                            !get_bit(a, s) || get_bit(b, s)
                        })
                    }
                });
                if hit {
                    set_bit(&mut out, ct.slot(topo, o, code, ppos));
                }
            }
        }
    }
    out
}

fn forall_table(topo: &Topo, outer: &CtxTables, inner: &CtxTables, t: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(outer.bits)];
    for o in 0..topo.opens.len() {
        for code in 0..outer.codes[o] {
            for (ppos, &x) in topo.points[o].iter().enumerate() {
                let hit = topo.within[o].iter().any(|&v| {
                    topo.opens[v].contains(x)
                        && topo.within[v].iter().all(|&w| {
                            let rcw = outer.code_maps[&(w, o)][code];
                            let n = topo.sizes[w];
                            (0..n).all(|b| {
                                let ic = rcw * n + b;
                                topo.points[w]
                                    .iter()
                                    .enumerate()
                                    .all(|(ypos, _)| get_bit(t, inner.slot(topo, w, ic, ypos)))
                            })
                        })
                });
                if hit {
                    set_bit(&mut out, outer.slot(topo, o, code, ppos));
                }
            }
        }
    }
    out
}

fn and_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn or_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x | y).collect()
}

fn complement(a: &[u64], nbits: usize) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().map(|x| !x).collect();
    let spare = out.len() * 64 - nbits;
    if spare > 0 {
        if let Some(last) = out.last_mut() {
            *last &= u64::MAX >> spare;
        }
    }
    out
}

fn project_classical(inner: &[u64], g: usize, out_codes: usize, any: bool) -> Vec<u64> {
    let mut out = vec![0u64; words_for(out_codes)];
    for c in 0..out_codes {
        let verdict = if any {
            (0..g).any(|b| get_bit(inner, c * g + b))
        } else {
            (0..g).all(|b| get_bit(inner, c * g + b))
        };
        if verdict {
            set_bit(&mut out, c);
        }
    }
    out
}

fn op_not(topo: &Topo, ct: &CtxTables, p: &Profile) -> Profile {
    Profile {
        forcing: not_table(topo, ct, &p.forcing),
        classical: complement(&p.classical, ct.s_codes),
    }
}

fn op_and(a: &Profile, b: &Profile) -> Profile {
    Profile {
        forcing: and_words(&a.forcing, &b.forcing),
        classical: and_words(&a.classical, &b.classical),
    }
}

fn op_or(topo: &Topo, ct: &CtxTables, a: &Profile, b: &Profile) -> Profile {
    let na = not_table(topo, ct, &a.forcing);
    let nb = not_table(topo, ct, &b.forcing);
    Profile {
        forcing: not_table(topo, ct, &and_words(&na, &nb)),
        classical: or_words(&a.classical, &b.classical),
    }
}

fn op_imp(topo: &Topo, ct: &CtxTables, a: &Profile, b: &Profile) -> Profile {
    Profile {
        forcing: imp_table(topo, ct, &a.forcing, &b.forcing),
        classical: or_words(&complement(&a.classical, ct.s_codes), &b.classical),
    }
}

fn op_forall(topo: &Topo, outer: &CtxTables, inner: &CtxTables, p: &Profile) -> Profile {
    Profile {
        forcing: forall_table(topo, outer, inner, &p.forcing),
        classical: project_classical(&p.classical, inner.s_base, outer.s_codes, false),
    }
}

fn op_exists(topo: &Topo, outer: &CtxTables, inner: &CtxTables, p: &Profile) -> Profile {
    let negated = not_table(topo, inner, &p.forcing);
    let all = forall_table(topo, outer, inner, &negated);
    Profile {
        forcing: not_table(topo, outer, &all),
        classical: project_classical(&p.classical, inner.s_base, outer.s_codes, true),
    }
}

fn atom_profile(
    topo: &Topo,
    ct: &CtxTables,
    p: &GPresheaf,
    gm: &crate::structures::GStructure,
    alpha: &Formula,
) -> Profile {
    let outright: Vec<Vec<bool>> = topo
        .opens
        .iter()
        .enumerate()
        .map(|(o, u)| {
            (0..ct.codes[o])
                .map(|code| {
                    let env: BTreeMap<usize, usize> =
                        decode(code, topo.sizes[o], ct.m).into_iter().enumerate().collect();
                    p.objects[u]
                        .satisfies(alpha, &env)
                        .expect("enumerated atoms use the signature's symbols")
                })
                .collect()
        })
        .collect();
    let mut bare = vec![0u64; words_for(ct.bits)];
    for o in 0..topo.opens.len() {
        for code in 0..ct.codes[o] {
            for (ppos, &x) in topo.points[o].iter().enumerate() {
                let hit = topo.within[o].iter().any(|&v| {
                    topo.opens[v].contains(x) && outright[v][ct.code_maps[&(v, o)][code]]
                });
                if hit {
                    set_bit(&mut bare, ct.slot(topo, o, code, ppos));
                }
            }
        }
    }
    let forcing = not_table(topo, ct, &not_table(topo, ct, &bare));
    let mut classical = vec![0u64; words_for(ct.s_codes)];
    for c in 0..ct.s_codes {
        let env: BTreeMap<usize, usize> =
            decode(c, ct.s_base, ct.m).into_iter().enumerate().collect();
        if gm.satisfies(alpha, &env).expect("the colimit keeps the signature") {
            set_bit(&mut classical, c);
        }
    }
    Profile { forcing, classical }
}

struct CtxState {
    tables: CtxTables,
    profiles: Vec<Profile>,
    reps: Vec<Formula>,
    by_profile: BTreeMap<Profile, usize>,
    cum_by_depth: Vec<Vec<u128>>,
    memo_not: BTreeMap<usize, usize>,
    memo_bin: [BTreeMap<(usize, usize), usize>; 3],
    memo_quant: [BTreeMap<usize, usize>; 2],
}

impl CtxState {
    fn new(topo: &Topo, m: usize, g: usize) -> CtxState {
        CtxState {
            tables: CtxTables::new(topo, m, g),
            profiles: Vec::new(),
            reps: Vec::new(),
            by_profile: BTreeMap::new(),
            cum_by_depth: Vec::new(),
            memo_not: BTreeMap::new(),
            memo_bin: [BTreeMap::new(), BTreeMap::new(), BTreeMap::new()],
            memo_quant: [BTreeMap::new(), BTreeMap::new()],
        }
    }

    fn intern(&mut self, profile: Profile, rep: impl FnOnce() -> Formula) -> usize {
        if let Some(&c) = self.by_profile.get(&profile) {
            return c;
        }
        let c = self.profiles.len();
        self.by_profile.insert(profile.clone(), c);
        self.profiles.push(profile);
        self.reps.push(rep());
        c
    }

    fn classes_at(&self, d: usize) -> usize {
        self.cum_by_depth[d].len()
    }

    fn cum_at(&self, d: isize, c: usize) -> u128 {
        if d < 0 {
            return 0;
        }
        self.cum_by_depth[d as usize].get(c).copied().unwrap_or(0)
    }

    fn new_at(&self, d: usize, c: usize) -> u128 {
        self.cum_at(d as isize, c) - self.cum_at(d as isize - 1, c)
    }
}

fn class_not(topo: &Topo, ctx: &mut CtxState, c: usize) -> usize {
    if let Some(&hit) = ctx.memo_not.get(&c) {
        return hit;
    }
    let profile = op_not(topo, &ctx.tables, &ctx.profiles[c]);
    let inner = ctx.reps[c].clone();
    let cls = ctx.intern(profile, || Formula::Not(Box::new(inner)));
    ctx.memo_not.insert(c, cls);
    cls
}

fn class_bin(topo: &Topo, ctx: &mut CtxState, which: usize, ca: usize, cb: usize) -> usize {
    if let Some(&hit) = ctx.memo_bin[which].get(&(ca, cb)) {
        return hit;
    }
    let a = &ctx.profiles[ca];
    let b = &ctx.profiles[cb];
    let profile = match which {
        0 => op_and(a, b),
        1 => op_or(topo, &ctx.tables, a, b),
        _ => op_imp(topo, &ctx.tables, a, b),
    };
    let left = ctx.reps[ca].clone();
    let right = ctx.reps[cb].clone();
    let cls = ctx.intern(profile, || match which {
        0 => Formula::And(Box::new(left), Box::new(right)),
        1 => Formula::Or(Box::new(left), Box::new(right)),
        _ => Formula::Implies(Box::new(left), Box::new(right)),
    });
    ctx.memo_bin[which].insert((ca, cb), cls);
    cls
}

fn class_quant(topo: &Topo, ctxs: &mut [CtxState], j: usize, which: usize, ci: usize) -> usize {
    if let Some(&hit) = ctxs[j].memo_quant[which].get(&ci) {
        return hit;
    }
    let (left, right) = ctxs.split_at_mut(j + 1);
    let outer = &mut left[j];
    let inner = &right[0];
    let profile = if which == 0 {
        op_exists(topo, &outer.tables, &inner.tables, &inner.profiles[ci])
    } else {
        op_forall(topo, &outer.tables, &inner.tables, &inner.profiles[ci])
    };
    let body = inner.reps[ci].clone();
    let bind = outer.tables.m;
    let cls = outer.intern(profile, || {
        if which == 0 {
            Formula::Exists(bind, Box::new(body))
        } else {
            Formula::Forall(bind, Box::new(body))
        }
    });
    outer.memo_quant[which].insert(ci, cls);
    cls
}

/// Compares the three readings of truth in the generic model over every
/// formula of depth at most `depth` with free variables among
/// `v0..v{top_free-1}`, working class by class. Fails outright when the
/// model cannot be built, when the class counts miss the enumeration
/// count, or when a replayed representative disagrees with the direct
/// evaluator; disagreements between the three readings themselves are
/// returned as data.
pub fn sweep_theorem(
    p: &GPresheaf,
    f: &Filter,
    depth: usize,
    top_free: usize,
) -> Result<SweepOutcome, CheckReport> {
    let mut gate = CheckReport::new("theorem-sweep")
        .bound("depth", depth.to_string())
        .bound("free-variables", top_free.to_string())
        .bound("mode", String::from(SemanticsMode::Local.as_str()));
    let gm = match generic_model(p, f) {
        Ok(gm) => gm,
        Err(sub) => {
            gate.absorb("model", sub);
            return Err(gate);
        }
    };
    let sig = p.objects.values().next().expect("validated presheaves are inhabited").sig.clone();
    let topo = Topo::new(p);
    let g = gm.structure().universe_size;
    let mut ctxs: Vec<CtxState> =
        (0..=depth).map(|j| CtxState::new(&topo, top_free + j, g)).collect();
    let mut total: u128 = 0;
    for d in 0..=depth {
        for j in 0..=depth - d {
            let m = top_free + j;
            let mut newly: BTreeMap<usize, u128> = BTreeMap::new();
            for alpha in atoms_at_depth(&sig, d, m) {
                let profile = atom_profile(&topo, &ctxs[j].tables, p, gm.structure(), &alpha);
                let cls = ctxs[j].intern(profile, || alpha.clone());
                *newly.entry(cls).or_insert(0) += 1;
            }
            if d >= 1 {
                let k_prev = ctxs[j].classes_at(d - 1);
                for c in 0..k_prev {
                    let n1 = ctxs[j].new_at(d - 1, c);
                    if n1 == 0 {
                        continue;
                    }
                    let cls = class_not(&topo, &mut ctxs[j], c);
                    *newly.entry(cls).or_insert(0) += n1;
                }
                for which in 0..3 {
                    for ca in 0..k_prev {
                        let ca_new = ctxs[j].cum_at(d as isize - 1, ca);
                        if ca_new == 0 {
                            continue;
                        }
                        let ca_old = ctxs[j].cum_at(d as isize - 2, ca);
                        for cb in 0..k_prev {
                            let cb_new = ctxs[j].cum_at(d as isize - 1, cb);
                            if cb_new == 0 {
                                continue;
                            }
                            let cb_old = ctxs[j].cum_at(d as isize - 2, cb);
                            let contrib = ca_new
                                .saturating_mul(cb_new)
                                .saturating_sub(ca_old.saturating_mul(cb_old));
                            if contrib == 0 {
                                continue;
                            }
                            let cls = class_bin(&topo, &mut ctxs[j], which, ca, cb);
                            *newly.entry(cls).or_insert(0) += contrib;
                        }
                    }
                }
                let inner_k = ctxs[j + 1].classes_at(d - 1);
                for ci in 0..inner_k {
                    let n1 = ctxs[j + 1].new_at(d - 1, ci);
                    if n1 == 0 {
                        continue;
                    }
                    for which in 0..2 {
                        let cls = class_quant(&topo, &mut ctxs, j, which, ci);
                        *newly.entry(cls).or_insert(0) += n1;
                    }
                }
            }
            let mut cum: Vec<u128> = if d == 0 {
                Vec::new()
            } else {
                ctxs[j].cum_by_depth[d - 1].clone()
            };
            cum.resize(ctxs[j].profiles.len(), 0);
            for (c, n) in newly {
                cum[c] = cum[c].saturating_add(n);
                if j == 0 {
                    total = total.saturating_add(n);
                }
            }
            ctxs[j].cum_by_depth.push(cum);
        }
    }
    let expected = count_formulas(&sig, depth, top_free);
    if total != expected {
        gate.push(
            "count",
            format!("classes account for {total} formulas, the enumeration has {expected}"),
        );
        return Err(gate);
    }

    let top = &ctxs[0];
    let ct = &top.tables;
    let mut ev = Evaluator::new(p, SemanticsMode::Local);
    for (c, rep) in top.reps.iter().enumerate() {
        let translated = godel_translate(rep);
        for o in 0..topo.opens.len() {
            for code in 0..ct.codes[o] {
                let s = Section {
                    domain: topo.opens[o],
                    values: decode(code, topo.sizes[o], top_free),
                };
                let fs = ev
                    .forcing_set(topo.opens[o], &translated, &s)
                    .expect("replayed queries are well-formed");
                for (ppos, &x) in topo.points[o].iter().enumerate() {
                    let tabulated =
                        get_bit(&top.profiles[c].forcing, ct.slot(&topo, o, code, ppos));
                    if tabulated != fs.contains(x) {
                        gate.push(
                            "replay",
                            format!(
                                "class {c} representative {rep} disagrees with the evaluator at point {x} over {} with {:?}",
                                topo.opens[o], s.values
                            ),
                        );
                    }
                }
            }
        }
        for code in 0..ct.s_codes {
            let env: BTreeMap<usize, usize> =
                decode(code, g, top_free).into_iter().enumerate().collect();
            let sat = gm
                .structure()
                .satisfies(rep, &env)
                .expect("the colimit keeps the signature");
            if sat != get_bit(&top.profiles[c].classical, code) {
                gate.push(
                    "replay",
                    format!(
                        "class {c} representative {rep} disagrees with the generic model at {:?}",
                        env.values().collect::<Vec<_>>()
                    ),
                );
            }
        }
    }
    if !gate.is_ok() {
        return Err(gate);
    }

    let member_ids: Vec<usize> = gm.members.iter().map(|&u| topo.index[&u]).collect();
    let mut divergences = Vec::new();
    for (c, profile) in top.profiles.iter().enumerate() {
        for &o in &member_ids {
            let u = topo.opens[o];
            for code in 0..ct.codes[o] {
                let values = decode(code, topo.sizes[o], top_free);
                let germs: Vec<usize> = values
                    .iter()
                    .map(|&a| gm.germ(u, a).expect("member elements have germs").class)
                    .collect();
                let classical = get_bit(&profile.classical, encode(&germs, g));
                let on_member = member_ids.iter().any(|&v| {
                    topo.opens[v].is_subset(u) && {
                        let rc = ct.code_maps[&(v, o)][code];
                        topo.points[v]
                            .iter()
                            .enumerate()
                            .all(|(ypos, _)| get_bit(&profile.forcing, ct.slot(&topo, v, rc, ypos)))
                    }
                });
                let forced_set = PointSet::from_points(
                    topo.points[o]
                        .iter()
                        .enumerate()
                        .filter(|&(ppos, _)| get_bit(&profile.forcing, ct.slot(&topo, o, code, ppos)))
                        .map(|(_, &x)| x),
                );
                let set_in_filter = f.contains(forced_set);
                if classical != on_member || on_member != set_in_filter {
                    divergences.push(SweepDivergence {
                        formula: top.reps[c].to_string(),
                        member: u,
                        parameters: values,
                        classical,
                        on_member,
                        set_in_filter,
                    });
                }
            }
        }
    }

    Ok(SweepOutcome {
        depth,
        free_variables: top_free,
        formulas: total,
        classes: top.profiles.len(),
        divergences,
    })
}
