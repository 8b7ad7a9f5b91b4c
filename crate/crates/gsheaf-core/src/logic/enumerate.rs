//! Exhaustive generation of terms and formulas in a canonical order.
//!
//! Both terms and formulas are produced in layers of exact depth,
//! shallowest first. Within one formula layer the order is: atoms
//! (equalities first, then relations in declaration order), negations,
//! conjunctions, disjunctions, implications, existentials, universals.
//! Binary nodes pair children from the earlier layers in enumeration
//! order, keeping only pairs deep enough for the current layer, so each
//! formula appears exactly once. A quantifier in a context whose free
//! variables range over `v0..v{m-1}` always binds `vm`; enumeration
//! never produces two alpha-variants of the same shape.
//!
//! `stream_formulas` yields the same sequence lazily, materializing
//! only the layers below the deepest one. That keeps memory use at the
//! size of the second-deepest cumulative layer while the deepest layer,
//! which dominates the count, is generated on demand.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::syntax::{Formula, Signature, Term};

/// All terms of depth at most `max_depth` over `v0..v{num_vars-1}`.
pub fn enumerate_terms(sig: &Signature, max_depth: usize, num_vars: usize) -> Vec<Term> {
    term_layers(sig, max_depth, num_vars).concat()
}

/// All formulas of depth at most `max_depth` whose free variables lie
/// among `v0..v{max_free_vars-1}`, in canonical order.
pub fn enumerate_formulas(sig: &Signature, max_depth: usize, max_free_vars: usize) -> Vec<Formula> {
    stream_formulas(sig, max_depth, max_free_vars).collect()
}

/// How many formulas `enumerate_formulas` would produce, without
/// building them. Saturates at `u128::MAX`.
pub fn count_formulas(sig: &Signature, max_depth: usize, max_free_vars: usize) -> u128 {
    let offsets = max_depth + 1;
    let mut tcum: Vec<Vec<u128>> = Vec::with_capacity(offsets);
    for j in 0..offsets {
        let leaves = (max_free_vars + j + sig.constants().len()) as u128;
        let mut cum = vec![leaves];
        for d in 1..=(max_depth - j) {
            let before2 = if d >= 2 { cum[d - 2] } else { 0 };
            let mut fresh = 0u128;
            for (_, arity) in sig.functions() {
                fresh = fresh
                    .saturating_add(powu(cum[d - 1], *arity).saturating_sub(powu(before2, *arity)));
            }
            cum.push(cum[d - 1].saturating_add(fresh));
        }
        tcum.push(cum);
    }
    let atom_count = |j: usize, d: usize| -> u128 {
        let cum = &tcum[j];
        let now = cum[d.min(cum.len() - 1)];
        let before = if d == 0 { 0 } else { cum[(d - 1).min(cum.len() - 1)] };
        let mut total = powu(now, 2).saturating_sub(powu(before, 2));
        for (_, arity) in sig.relations() {
            total = total.saturating_add(powu(now, *arity).saturating_sub(powu(before, *arity)));
        }
        total
    };
    let mut f: Vec<Vec<u128>> = vec![Vec::new(); offsets];
    for d in 0..=max_depth {
        for j in 0..offsets {
            if d > max_depth - j {
                continue;
            }
            let mut total = atom_count(j, d);
            if d >= 1 {
                total = total.saturating_add(f[j][d - 1]);
                let c1: u128 = f[j][..d].iter().fold(0, |a, &b| a.saturating_add(b));
                let c2 = c1.saturating_sub(f[j][d - 1]);
                total = total
                    .saturating_add(3u128.saturating_mul(powu(c1, 2).saturating_sub(powu(c2, 2))));
                total = total.saturating_add(2u128.saturating_mul(f[j + 1][d - 1]));
            }
            f[j].push(total);
        }
    }
    f[0].iter().fold(0, |a, &b| a.saturating_add(b))
}

/// Lazy version of [`enumerate_formulas`], same order.
pub fn stream_formulas(sig: &Signature, max_depth: usize, max_free_vars: usize) -> FormulaStream {
    let m = max_free_vars;
    let remaining = count_formulas(sig, max_depth, m);
    let (below, prev_len, inner_top) = if max_depth == 0 {
        (Vec::new(), 0, Vec::new())
    } else {
        let budgets: Vec<usize> = (0..=max_depth)
            .map(|j| if j == 0 { max_depth - 1 } else { max_depth - j })
            .collect();
        let mut table = build_layer_table(sig, &budgets, m);
        let inner_top = table[1].pop().expect("layer budgets cover the inner context");
        let offset0 = core::mem::take(&mut table[0]);
        let top_len = offset0.last().map(|layer| layer.len()).unwrap_or(0);
        let below = offset0.concat();
        let prev_len = below.len() - top_len;
        (below, prev_len, inner_top)
    };
    let top_atoms = atom_layer(sig, &term_layers(sig, max_depth, m), max_depth);
    FormulaStream {
        below,
        top_atoms,
        inner_top,
        prev_len,
        bind_var: m,
        phase: Phase::Below,
        i: 0,
        j: 0,
        remaining,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Below,
    Atoms,
    Nots,
    Binary(u8),
    Quantifier(u8),
    Done,
}

/// Iterator over formulas in canonical order; see [`stream_formulas`].
#[derive(Debug, Clone)]
pub struct FormulaStream {
    below: Vec<Formula>,
    top_atoms: Vec<Formula>,
    inner_top: Vec<Formula>,
    prev_len: usize,
    bind_var: usize,
    phase: Phase,
    i: usize,
    j: usize,
    remaining: u128,
}

impl FormulaStream {
    fn emit(&mut self, phi: Formula) -> Option<Formula> {
        self.remaining = self.remaining.saturating_sub(1);
        Some(phi)
    }
}

impl Iterator for FormulaStream {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        loop {
            match self.phase {
                Phase::Below => {
                    if self.i < self.below.len() {
                        let phi = self.below[self.i].clone();
                        self.i += 1;
                        return self.emit(phi);
                    }
                    self.phase = Phase::Atoms;
                    self.i = 0;
                }
                Phase::Atoms => {
                    if self.i < self.top_atoms.len() {
                        let phi = self.top_atoms[self.i].clone();
                        self.i += 1;
                        return self.emit(phi);
                    }
                    self.phase = Phase::Nots;
                    self.i = self.prev_len;
                }
                Phase::Nots => {
                    if self.i < self.below.len() {
                        let phi = Formula::Not(Box::new(self.below[self.i].clone()));
                        self.i += 1;
                        return self.emit(phi);
                    }
                    self.phase = Phase::Binary(0);
                    self.i = 0;
                    self.j = 0;
                }
                Phase::Binary(which) => {
                    let n = self.below.len();
                    if self.i >= n {
                        self.phase =
                            if which < 2 { Phase::Binary(which + 1) } else { Phase::Quantifier(0) };
                        self.i = 0;
                        self.j = 0;
                        continue;
                    }
                    if self.i < self.prev_len && self.j < self.prev_len {
                        self.j = self.prev_len;
                    }
                    if self.j >= n {
                        self.i += 1;
                        self.j = 0;
                        continue;
                    }
                    let a = Box::new(self.below[self.i].clone());
                    let b = Box::new(self.below[self.j].clone());
                    self.j += 1;
                    let phi = match which {
                        0 => Formula::And(a, b),
                        1 => Formula::Or(a, b),
                        _ => Formula::Implies(a, b),
                    };
                    return self.emit(phi);
                }
                Phase::Quantifier(which) => {
                    if self.i < self.inner_top.len() {
                        let body = Box::new(self.inner_top[self.i].clone());
                        self.i += 1;
                        let phi = if which == 0 {
                            Formula::Exists(self.bind_var, body)
                        } else {
                            Formula::Forall(self.bind_var, body)
                        };
                        return self.emit(phi);
                    }
                    if which == 0 {
                        self.phase = Phase::Quantifier(1);
                        self.i = 0;
                    } else {
                        self.phase = Phase::Done;
                    }
                }
                Phase::Done => return None,
            }
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        if self.remaining <= usize::MAX as u128 {
            (self.remaining as usize, Some(self.remaining as usize))
        } else {
            (usize::MAX, None)
        }
    }
}

/// Atomic formulas of exact depth `depth` over `v0..v{num_vars-1}`, in
/// the order the enumeration emits them within a layer.
pub(crate) fn atoms_at_depth(sig: &Signature, depth: usize, num_vars: usize) -> Vec<Formula> {
    atom_layer(sig, &term_layers(sig, depth, num_vars), depth)
}

fn term_layers(sig: &Signature, max_depth: usize, num_vars: usize) -> Vec<Vec<Term>> {
    let mut first = Vec::new();
    for v in 0..num_vars {
        first.push(Term::Var(v));
    }
    for c in sig.constants() {
        first.push(Term::Const(c.clone()));
    }
    let mut cum = first.clone();
    let mut layers = vec![first];
    for d in 1..=max_depth {
        let fresh_from = cum.len() - layers[d - 1].len();
        let mut layer = Vec::new();
        for (name, arity) in sig.functions() {
            for_each_tuple(cum.len(), fresh_from, *arity, |idx| {
                let args = idx.iter().map(|&i| cum[i].clone()).collect();
                layer.push(Term::App(name.clone(), args));
            });
        }
        cum.extend(layer.iter().cloned());
        layers.push(layer);
    }
    layers
}

fn atom_layer(sig: &Signature, tlayers: &[Vec<Term>], depth: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    if depth >= tlayers.len() {
        return out;
    }
    let cum: Vec<&Term> = tlayers[..=depth].iter().flatten().collect();
    let fresh_from = cum.len() - tlayers[depth].len();
    for i in 0..cum.len() {
        for j in 0..cum.len() {
            if i < fresh_from && j < fresh_from {
                continue;
            }
            out.push(Formula::Eq(cum[i].clone(), cum[j].clone()));
        }
    }
    for (name, arity) in sig.relations() {
        for_each_tuple(cum.len(), fresh_from, *arity, |idx| {
            let args = idx.iter().map(|&i| cum[i].clone()).collect();
            out.push(Formula::Rel(name.clone(), args));
        });
    }
    out
}

/// `table[j][d]` = formulas of exact depth `d` in the context with
/// `base + j` free variable slots, built for every `d <= budgets[j]`.
/// Callers must ensure `budgets[j + 1] >= budgets[j] - 1` wherever a
/// nonzero budget needs quantifier bodies from the next context.
fn build_layer_table(sig: &Signature, budgets: &[usize], base: usize) -> Vec<Vec<Vec<Formula>>> {
    let tcache: Vec<Vec<Vec<Term>>> = budgets
        .iter()
        .enumerate()
        .map(|(j, &budget)| term_layers(sig, budget, base + j))
        .collect();
    let mut table: Vec<Vec<Vec<Formula>>> = budgets.iter().map(|_| Vec::new()).collect();
    let max_budget = budgets.iter().copied().max().unwrap_or(0);
    for d in 0..=max_budget {
        for j in 0..budgets.len() {
            if budgets[j] < d {
                continue;
            }
            let mut layer = atom_layer(sig, &tcache[j], d);
            if d >= 1 {
                let own = &table[j];
                for phi in &own[d - 1] {
                    layer.push(Formula::Not(Box::new(phi.clone())));
                }
                let cum: Vec<&Formula> = own[..d].iter().flatten().collect();
                let fresh_from = cum.len() - own[d - 1].len();
                let ctors: [fn(Box<Formula>, Box<Formula>) -> Formula; 3] =
                    [Formula::And, Formula::Or, Formula::Implies];
                for ctor in ctors {
                    for i in 0..cum.len() {
                        for k in 0..cum.len() {
                            if i < fresh_from && k < fresh_from {
                                continue;
                            }
                            layer.push(ctor(Box::new(cum[i].clone()), Box::new(cum[k].clone())));
                        }
                    }
                }
                let inner = &table[j + 1][d - 1];
                for phi in inner {
                    layer.push(Formula::Exists(base + j, Box::new(phi.clone())));
                }
                for phi in inner {
                    layer.push(Formula::Forall(base + j, Box::new(phi.clone())));
                }
            }
            table[j].push(layer);
        }
    }
    table
}

fn for_each_tuple(n: usize, fresh_from: usize, arity: usize, mut f: impl FnMut(&[usize])) {
    if n == 0 || arity == 0 {
        return;
    }
    let mut idx = vec![0usize; arity];
    loop {
        if idx.iter().any(|&i| i >= fresh_from) {
            f(&idx);
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn powu(base: u128, exp: usize) -> u128 {
    let mut out = 1u128;
    for _ in 0..exp {
        out = out.saturating_mul(base);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{free_variables, parse_formula, parse_signature};
    use alloc::collections::BTreeSet;
    use alloc::string::{String, ToString};

    fn unary_sig() -> Signature {
        parse_signature("rel R/1").unwrap()
    }

    fn printed(formulas: &[Formula]) -> Vec<String> {
        formulas.iter().map(|phi| phi.to_string()).collect()
    }

    #[test]
    fn depth_one_enumeration_is_exactly_the_hand_list() {
        let sig = unary_sig();
        let got = printed(&enumerate_formulas(&sig, 1, 1));
        let want = [
            "v0 = v0",
            "R(v0)",
            "!v0 = v0",
            "!R(v0)",
            "v0 = v0 & v0 = v0",
            "v0 = v0 & R(v0)",
            "R(v0) & v0 = v0",
            "R(v0) & R(v0)",
            "v0 = v0 | v0 = v0",
            "v0 = v0 | R(v0)",
            "R(v0) | v0 = v0",
            "R(v0) | R(v0)",
            "v0 = v0 -> v0 = v0",
            "v0 = v0 -> R(v0)",
            "R(v0) -> v0 = v0",
            "R(v0) -> R(v0)",
            "exists v1 v0 = v0",
            "exists v1 v0 = v1",
            "exists v1 v1 = v0",
            "exists v1 v1 = v1",
            "exists v1 R(v0)",
            "exists v1 R(v1)",
            "forall v1 v0 = v0",
            "forall v1 v0 = v1",
            "forall v1 v1 = v0",
            "forall v1 v1 = v1",
            "forall v1 R(v0)",
            "forall v1 R(v1)",
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn sizes_match_independently_computed_counts() {
        let sig = unary_sig();
        assert_eq!(enumerate_formulas(&sig, 0, 1).len(), 2);
        assert_eq!(enumerate_formulas(&sig, 1, 1).len(), 28);
        assert_eq!(enumerate_formulas(&sig, 2, 1).len(), 2670);
        assert_eq!(count_formulas(&sig, 0, 1), 2);
        assert_eq!(count_formulas(&sig, 1, 1), 28);
        assert_eq!(count_formulas(&sig, 2, 1), 2670);
        assert_eq!(count_formulas(&sig, 3, 1), 21_516_072);
    }

    #[test]
    fn sentences_bind_v0_first() {
        let sig = unary_sig();
        let got = printed(&enumerate_formulas(&sig, 1, 0));
        assert_eq!(
            got,
            ["exists v0 v0 = v0", "exists v0 R(v0)", "forall v0 v0 = v0", "forall v0 R(v0)"]
        );
    }

    #[test]
    fn terms_come_out_shallowest_first() {
        let sig = parse_signature("fun f/1 fun g/2 const c").unwrap();
        let got: Vec<String> =
            enumerate_terms(&sig, 1, 1).iter().map(|t| t.to_string()).collect();
        assert_eq!(got, ["v0", "c", "f(v0)", "f(c)", "g(v0,v0)", "g(v0,c)", "g(c,v0)", "g(c,c)"]);
        assert_eq!(enumerate_terms(&sig, 2, 1).len(), 74);
    }

    #[test]
    fn deeper_terms_enter_atoms_at_their_own_depth() {
        let sig = parse_signature("fun f/1 rel R/1").unwrap();
        let got = printed(&enumerate_formulas(&sig, 1, 1));
        assert_eq!(got.len(), 32);
        assert_eq!(&got[..2], ["v0 = v0", "R(v0)"]);
        assert_eq!(&got[2..6], ["v0 = f(v0)", "f(v0) = v0", "f(v0) = f(v0)", "R(f(v0))"]);
    }

    #[test]
    fn stream_agrees_with_materialized_enumeration() {
        let sig = unary_sig();
        let mut stream = stream_formulas(&sig, 2, 1);
        assert_eq!(stream.size_hint(), (2670, Some(2670)));
        let streamed: Vec<Formula> = stream.by_ref().collect();
        assert_eq!(streamed, enumerate_formulas(&sig, 2, 1));
        assert_eq!(stream.size_hint(), (0, Some(0)));
        let empty_sig = Signature::empty();
        assert_eq!(
            stream_formulas(&empty_sig, 2, 0).collect::<Vec<_>>(),
            enumerate_formulas(&empty_sig, 2, 0)
        );
    }

    #[test]
    fn no_formula_appears_twice() {
        let sig = unary_sig();
        let all = enumerate_formulas(&sig, 2, 1);
        let distinct: BTreeSet<Formula> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn enumerated_formulas_respect_depth_and_context() {
        let sig = unary_sig();
        for phi in enumerate_formulas(&sig, 2, 1) {
            assert!(phi.depth() <= 2, "{phi}");
            assert!(free_variables(&phi).into_iter().all(|v| v < 1), "{phi}");
        }
    }

    #[test]
    fn printing_then_parsing_is_identity() {
        let sig = parse_signature("rel R/1 fun f/1 const c").unwrap();
        for phi in enumerate_formulas(&sig, 2, 1) {
            let text = phi.to_string();
            let back = parse_formula(&text, &sig).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(back, phi, "{text}");
        }
    }
}
