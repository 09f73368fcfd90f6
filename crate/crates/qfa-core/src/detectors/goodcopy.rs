//! Good copies of bipartite patterns in a reduced pair.
//!
//! The reduced pair is given as two disjoint subsets of the label space:
//! `in1` (atoms almost inside `A`) and `in0` (atoms almost outside `A`).
//! A good copy sends every edge of the pattern into `in1` and every
//! non-edge into `in0`, so no sum may land in an error atom.

use super::bits::{self, ShiftTable};
use super::search::Bipartite;
use super::{tree_node_on_path, Meter, SearchBudget, SearchOutcome, Witness, WitnessKind};
use crate::error::{invalid, QfaError, Result};
use crate::fp::GroupSubset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CopyPattern {
    /// `a_i b_j` is an edge iff `i <= j`; the right side is `b`.
    Half(usize),
    /// `a_i b_S` is an edge iff `i` is in `S`; the right side is `b`, indexed by mask.
    Power(usize),
    /// `T(d)` as a graph: leaf `e` and node `s` are adjacent iff `e`
    /// continues `s` with a 1. Off-branch pairs are non-edges. The right
    /// side is the leaves.
    Tree(usize),
}

impl CopyPattern {
    /// Role names (left, right) and sizes.
    fn shape(self) -> (&'static str, usize, &'static str, usize) {
        match self {
            CopyPattern::Half(k) => ("a", k, "b", k),
            CopyPattern::Power(k) => ("a", k, "b_sets", 1 << k),
            CopyPattern::Tree(d) => ("nodes", (1 << d) - 1, "leaves", 1 << d),
        }
    }

    fn size(self) -> usize {
        match self {
            CopyPattern::Half(k) | CopyPattern::Power(k) | CopyPattern::Tree(k) => k,
        }
    }

    fn edge(self, left: usize, right: usize) -> bool {
        match self {
            CopyPattern::Half(_) => left <= right,
            CopyPattern::Power(_) => right >> left & 1 == 1,
            CopyPattern::Tree(d) => {
                // node `left` sits at depth t; adjacent iff on the branch with a 1-step
                let t = (usize::BITS - 1 - (left + 1).leading_zeros()) as usize;
                tree_node_on_path(right, d, t) == left && right >> (d - 1 - t) & 1 == 1
            }
        }
    }

    fn from_roles(w: &Witness) -> Result<Self> {
        let has = |r: &str| w.roles.contains_key(r);
        if has("b_sets") {
            Ok(CopyPattern::Power(w.k))
        } else if has("leaves") {
            Ok(CopyPattern::Tree(w.k))
        } else if has("b") {
            Ok(CopyPattern::Half(w.k))
        } else {
            Err(invalid("unrecognised good-copy roles"))
        }
    }
}

/// Search the label space for a good copy of `pattern` with its right side in `side`.
///
/// The left side is chosen depth-first; right-side labels are then free
/// and each is the least survivor of its own candidate set.
pub fn find_good_copy(
    in1: &GroupSubset,
    in0: &GroupSubset,
    pattern: CopyPattern,
    side: Option<&GroupSubset>,
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    let spec = in1.spec();
    if pattern.size() == 0 || matches!(pattern, CopyPattern::Tree(d) if d > 6) || matches!(pattern, CopyPattern::Power(k) if k > 8)
    {
        return Err(invalid("good-copy pattern size out of range"));
    }
    if spec.order() > 1 << 15 {
        return Err(QfaError::Budget(format!("label space of order {}", spec.order())));
    }
    if in1.intersection_len(in0) != 0 {
        return Err(invalid("near-1 and near-0 label sets overlap"));
    }
    let (in_t, out_t) = (ShiftTable::new(in1), ShiftTable::new(in0));
    let (lname, nl, rname, nr) = pattern.shape();
    let right_init = side.map_or_else(|| bits::full(spec.order()), |s| s.words().to_vec());
    // engine "right" = our left side (searched), engine "left" = our right side (free)
    let engine = Bipartite {
        in_t: &in_t,
        out_t: &out_t,
        right_cands: bits::full(spec.order()),
        left_init: right_init,
        pattern: (0..nr).map(|r| (0..nl).map(|l| pattern.edge(l, r)).collect()).collect(),
        k_right: nl,
        pin_first: false,
    };
    let meter = Meter::new(budget);
    let found = engine
        .run(&meter)
        .map(|(right, left)| Witness::new(WitnessKind::GoodCopy, pattern.size(), spec, vec![(lname, left), (rname, right)]));
    Ok(meter.finish(found))
}

/// Check a good-copy witness against the near-1 / near-0 label sets.
pub fn revalidate_good_copy(w: &Witness, in1: &GroupSubset, in0: &GroupSubset, side: Option<&GroupSubset>) -> Result<()> {
    if w.kind != WitnessKind::GoodCopy {
        return Err(invalid("not a good-copy witness"));
    }
    let spec = in1.spec();
    if spec.p() != w.p || spec.n() != w.n {
        return Err(invalid("witness and label space differ"));
    }
    let pattern = CopyPattern::from_roles(w)?;
    let (lname, nl, rname, nr) = pattern.shape();
    let (left, right) = (w.role(lname), w.role(rname));
    if left.len() != nl || right.len() != nr {
        return Err(invalid("good-copy role sizes do not match the pattern"));
    }
    if left.iter().chain(right).any(|&x| x >= spec.order()) {
        return Err(invalid("label out of range"));
    }
    if let Some(s) = side {
        if let Some(&b) = right.iter().find(|&&b| !s.contains(b)) {
            return Err(invalid(format!("right-side label {b} is outside the side subgroup")));
        }
    }
    for (l, &a) in left.iter().enumerate() {
        for (r, &b) in right.iter().enumerate() {
            let s = spec.add(a, b);
            let ok = if pattern.edge(l, r) { in1.contains(s) } else { in0.contains(s) };
            if !ok {
                return Err(invalid(format!("sum of {lname}{l} and {rname}{r} lands in the wrong class")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::GroupSpec;

    #[test]
    fn empty_near_one_has_no_copy() {
        let spec = GroupSpec::new(3, 2).unwrap();
        let e = GroupSubset::empty(&spec);
        let f = GroupSubset::full(&spec);
        for pat in [CopyPattern::Half(1), CopyPattern::Power(1), CopyPattern::Tree(1)] {
            assert!(find_good_copy(&e, &f, pat, None, &SearchBudget::default()).unwrap().is_none());
        }
    }

    #[test]
    fn coset_label_sets() {
        // in1 = {x : x_1 = 1}, in0 = {x : x_1 = 0}; the pair (x_1 = 2) is error.
        let spec = GroupSpec::new(3, 3).unwrap();
        let in1 = GroupSubset::from_fn(&spec, |i| spec.coords(i)[0] == 1);
        let in0 = GroupSubset::from_fn(&spec, |i| spec.coords(i)[0] == 0);
        let side = GroupSubset::from_fn(&spec, |i| spec.coords(i)[1] == 0);
        for pat in [CopyPattern::Half(1), CopyPattern::Power(1), CopyPattern::Tree(1)] {
            let out = find_good_copy(&in1, &in0, pat, Some(&side), &SearchBudget::default()).unwrap();
            let w = out.witness().expect("a copy exists");
            revalidate_good_copy(w, &in1, &in0, Some(&side)).unwrap();
        }
        // H(2) needs a_2 + b_1 in in0 and a_1 + b_1, a_2 + b_2 in in1, forcing
        // first coordinates a2+b1=0, a1+b1=1, a2+b2=1, a1+b2=1: inconsistent.
        let out = find_good_copy(&in1, &in0, CopyPattern::Half(2), None, &SearchBudget::default()).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn tree_edges() {
        let p = CopyPattern::Tree(2);
        // root (0) adjacent to leaves 10, 11; node 2 (branch 1) adjacent to leaf 11
        let adj: Vec<(usize, usize)> = (0..3).flat_map(|l| (0..4).map(move |r| (l, r))).filter(|&(l, r)| p.edge(l, r)).collect();
        assert_eq!(adj, vec![(0, 2), (0, 3), (1, 1), (2, 3)]);
    }
}
