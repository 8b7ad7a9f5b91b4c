//! Finite groups as explicit multiplication tables.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::report::CheckReport;

/// A finite group on elements `0..order` with an explicit product table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    pub identity: usize,
    /// `product[g][h]` is g * h.
    pub product: Vec<Vec<usize>>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.product.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.order()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.product[g][h]
    }

    /// Panics on an invalid table; run [`validate`](Self::validate) first.
    pub fn inverse(&self, g: usize) -> usize {
        self.elements()
            .find(|&h| self.mul(g, h) == self.identity && self.mul(h, g) == self.identity)
            .expect("every element of a valid group has an inverse")
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup { identity: 0, product: vec![vec![0]] }
    }

    pub fn cyclic(order: usize) -> FiniteGroup {
        assert!(order >= 1, "a group has at least one element");
        let product =
            (0..order).map(|g| (0..order).map(|h| (g + h) % order).collect()).collect();
        FiniteGroup { identity: 0, product }
    }

    /// Direct product; the pair `(a, b)` is encoded as `a * rhs.order() + b`.
    pub fn direct_product(lhs: &FiniteGroup, rhs: &FiniteGroup) -> FiniteGroup {
        let (na, nb) = (lhs.order(), rhs.order());
        let mut product = vec![vec![0; na * nb]; na * nb];
        for ga in 0..na {
            for gb in 0..nb {
                for ha in 0..na {
                    for hb in 0..nb {
                        product[ga * nb + gb][ha * nb + hb] =
                            lhs.mul(ga, ha) * nb + rhs.mul(gb, hb);
                    }
                }
            }
        }
        FiniteGroup { identity: lhs.identity * nb + rhs.identity, product }
    }

    /// The symmetric group on `degree` letters. Element `g` denotes the
    /// permutation `permutations(degree)[g]`; the product is composition,
    /// `(g * h)(i) = g(h(i))`.
    pub fn symmetric(degree: usize) -> FiniteGroup {
        let perms = permutations(degree);
        let index = |p: &[usize]| {
            perms.iter().position(|q| q == p).expect("composition of permutations is one of them")
        };
        let product = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| {
                        let composed: Vec<usize> = (0..degree).map(|i| g[h[i]]).collect();
                        index(&composed)
                    })
                    .collect()
            })
            .collect();
        let identity: Vec<usize> = (0..degree).collect();
        FiniteGroup { identity: index(&identity), product }
    }

    /// Checks every group axiom by table scan.
    pub fn validate(&self) -> CheckReport {
        let n = self.order();
        let mut report = CheckReport::new("group").bound("order", n.to_string());
        if n == 0 {
            report.push("nonempty", String::from("a group needs at least one element"));
            return report;
        }
        if self.identity >= n {
            report.push("identity-in-range", format!("identity {} is out of range", self.identity));
        }
        for (g, row) in self.product.iter().enumerate() {
            if row.len() != n {
                report.push("product-shape", format!("row {g} has {} entries, wanted {n}", row.len()));
            }
            for (h, &v) in row.iter().enumerate() {
                if v >= n {
                    report.push("product-range", format!("{g} * {h} = {v} is out of range"));
                }
            }
        }
        if !report.is_ok() {
            return report;
        }
        let e = self.identity;
        for g in self.elements() {
            if self.mul(e, g) != g || self.mul(g, e) != g {
                report.push("identity-law", format!("identity fails on {g}"));
            }
        }
        for g in self.elements() {
            for h in self.elements() {
                for k in self.elements() {
                    if self.mul(self.mul(g, h), k) != self.mul(g, self.mul(h, k)) {
                        report.push("associativity", format!("({g} * {h}) * {k} != {g} * ({h} * {k})"));
                    }
                }
            }
        }
        for g in self.elements() {
            let ok = self.elements().any(|h| self.mul(g, h) == e && self.mul(h, g) == e);
            if !ok {
                report.push("inverses", format!("{g} has no inverse"));
            }
        }
        report
    }
}

/// The permutations of `0..degree` in lexicographic order, the element
/// numbering used by [`FiniteGroup::symmetric`].
pub fn permutations(degree: usize) -> Vec<Vec<usize>> {
    assert!(degree <= 5, "the symmetric group table grows factorially");
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut used = vec![false; degree];
    fn go(
        degree: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == degree {
            out.push(current.clone());
            return;
        }
        for i in 0..degree {
            if !used[i] {
                used[i] = true;
                current.push(i);
                go(degree, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    go(degree, &mut current, &mut used, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_groups_are_valid() {
        for group in [
            FiniteGroup::trivial(),
            FiniteGroup::cyclic(2),
            FiniteGroup::cyclic(3),
            FiniteGroup::cyclic(4),
            FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)),
            FiniteGroup::symmetric(3),
        ] {
            assert!(group.validate().is_ok(), "{group:?}");
        }
    }

    #[test]
    fn symmetric_three_has_order_six_and_is_noncommutative() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert!(s3
            .elements()
            .any(|g| s3.elements().any(|h| s3.mul(g, h) != s3.mul(h, g))));
        for g in s3.elements() {
            let inv = s3.inverse(g);
            assert_eq!(s3.mul(g, inv), s3.identity);
        }
    }

    #[test]
    fn klein_four_is_all_involutions() {
        let c2 = FiniteGroup::cyclic(2);
        let k4 = FiniteGroup::direct_product(&c2, &c2);
        assert_eq!(k4.order(), 4);
        for g in k4.elements() {
            assert_eq!(k4.mul(g, g), k4.identity);
        }
    }

    #[test]
    fn validator_pinpoints_broken_axioms() {
        let mut broken = FiniteGroup::cyclic(3);
        broken.product[1][1] = 0;
        let report = broken.validate();
        assert!(report.violations.iter().any(|v| v.rule == "associativity"));

        let misshapen = FiniteGroup { identity: 0, product: vec![vec![0, 0], vec![0]] };
        let report = misshapen.validate();
        assert!(report.violations.iter().any(|v| v.rule == "product-shape"));

        let empty = FiniteGroup { identity: 0, product: vec![] };
        assert!(empty.validate().violations.iter().any(|v| v.rule == "nonempty"));
    }

    #[test]
    fn permutation_numbering_matches_the_product_table() {
        let s3 = FiniteGroup::symmetric(3);
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms[s3.identity], [0, 1, 2]);
        for g in s3.elements() {
            for h in s3.elements() {
                let composed: Vec<usize> = (0..3).map(|i| perms[g][perms[h][i]]).collect();
                assert_eq!(perms[s3.mul(g, h)], composed);
            }
        }
    }
}
