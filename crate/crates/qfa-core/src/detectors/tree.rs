//! Encodings of the binary tree pattern `T(d)` and extraction of order
//! configurations from them.
//!
//! An encoding has a node `h_s` for every branch word `s` of length `< d`
//! and a leaf `g_e` for every word `e` of length `d`. Along each branch,
//! `g_e + h_s` lies in `A` when `e` continues `s` with a 1 and outside `A`
//! when it continues with a 0. Off-branch sums are unconstrained.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::bits::{self, Bits, ShiftTable};
use super::search::tables;
use super::{tree_node_on_path, Meter, SearchBudget, SearchOutcome, Witness, WitnessKind};
use crate::error::{invalid, QfaError, Result};
use crate::fp::{GroupSpec, GroupSubset};

const MAX_DEPTH: usize = 3;

/// Depth that guarantees an order configuration of size `k` in any encoding.
pub fn hodges_depth(k: usize) -> usize {
    (1 << (k + 2)) - 2
}

fn check_depth(d: usize, nodes: usize) -> Result<()> {
    if d == 0 || d > MAX_DEPTH {
        return Err(invalid(format!("tree depth must be in 1..={MAX_DEPTH}")));
    }
    let cost = (nodes as f64).powi((1 << d) - 1);
    if cost > 1e11 {
        return Err(QfaError::Budget(format!("{nodes}^{} node tuples", (1 << d) - 1)));
    }
    Ok(())
}

fn count_rec(t: usize, d: usize, c: &[u64], nodes: &[usize], in_t: &ShiftTable, out_t: &ShiftTable) -> u128 {
    if t == d {
        return bits::count(c) as u128;
    }
    nodes
        .iter()
        .map(|&h| {
            let zero = bits::and(c, out_t.row(h));
            let l = count_rec(t + 1, d, &zero, nodes, in_t, out_t);
            if l == 0 {
                return 0;
            }
            let one = bits::and(c, in_t.row(h));
            l * count_rec(t + 1, d, &one, nodes, in_t, out_t)
        })
        .sum()
}

/// Number of encodings of `T(d)` with leaves in `leaves_in` and nodes in `nodes_in`.
///
/// Given the nodes, the leaves are independent, so the count factors over
/// the two subtrees below each node.
pub fn count_tree_encodings(a: &GroupSubset, d: usize, leaves_in: &GroupSubset, nodes_in: &GroupSubset) -> Result<u128> {
    check_depth(d, nodes_in.len())?;
    let (in_t, out_t) = tables(a)?;
    let nodes = nodes_in.members();
    let c: Bits = leaves_in.words().to_vec();
    Ok(nodes
        .par_iter()
        .map(|&h| {
            let zero = bits::and(&c, out_t.row(h));
            let l = count_rec(1, d, &zero, &nodes, &in_t, &out_t);
            if l == 0 {
                return 0;
            }
            let one = bits::and(&c, in_t.row(h));
            l * count_rec(1, d, &one, &nodes, &in_t, &out_t)
        })
        .sum())
}

/// Direct enumeration of every node and leaf tuple; test oracle for `d <= 2`.
pub fn count_tree_encodings_naive(
    a: &GroupSubset,
    d: usize,
    leaves_in: &GroupSubset,
    nodes_in: &GroupSubset,
) -> Result<u128> {
    if d == 0 || d > 2 {
        return Err(invalid("naive tree counting supports d in 1..=2"));
    }
    let spec = a.spec();
    let nodes = nodes_in.members();
    let leaves = leaves_in.members();
    let (nn, nl) = ((1usize << d) - 1, 1usize << d);
    let mut count = 0u128;
    let mut hs = vec![0usize; nn];
    let mut gs = vec![0usize; nl];
    let total_h = (nodes.len() as u64).pow(nn as u32);
    let total_g = (leaves.len() as u64).pow(nl as u32);
    for hc in 0..total_h {
        let mut c = hc;
        for h in hs.iter_mut() {
            *h = nodes[(c % nodes.len() as u64) as usize];
            c /= nodes.len() as u64;
        }
        for gc in 0..total_g {
            let mut c = gc;
            for g in gs.iter_mut() {
                *g = leaves[(c % leaves.len() as u64) as usize];
                c /= leaves.len() as u64;
            }
            let ok = (0..nl).all(|eta| {
                (0..d).all(|t| {
                    let node = tree_node_on_path(eta, d, t);
                    let branch = eta >> (d - 1 - t) & 1 == 1;
                    a.contains(spec.add(gs[eta], hs[node])) == branch
                })
            });
            count += ok as u128;
        }
    }
    Ok(count)
}

/// Encodings whose every leaf-node sum, on or off branch, lands in
/// `in1` or `in0`, with the on-branch sums in `in1` (for a 1-step) or `in0`.
///
/// Off-branch constraints couple the subtrees, so node tuples are
/// enumerated outright and each leaf is counted against a feasibility set.
pub fn count_good_tree_encodings(
    in1: &GroupSubset,
    in0: &GroupSubset,
    d: usize,
    leaves_in: &GroupSubset,
    nodes_in: &GroupSubset,
) -> Result<u128> {
    check_depth(d, nodes_in.len())?;
    let (t1, _) = tables(in1)?;
    let (t0, _) = tables(in0)?;
    let (tany, _) = tables(&in1.union(in0))?;
    let nodes = nodes_in.members();
    let (nn, nl) = ((1usize << d) - 1, 1usize << d);
    if nodes.is_empty() {
        return Ok(0);
    }
    let total = (nodes.len() as u64).pow(nn as u32);
    let base: Bits = leaves_in.words().to_vec();
    Ok((0..total)
        .into_par_iter()
        .map(|code| {
            let mut c = code;
            let hs: Vec<usize> = (0..nn)
                .map(|_| {
                    let h = nodes[(c % nodes.len() as u64) as usize];
                    c /= nodes.len() as u64;
                    h
                })
                .collect();
            let mut prod = 1u128;
            for eta in 0..nl {
                let mut set = base.clone();
                let path: Vec<usize> = (0..d).map(|t| tree_node_on_path(eta, d, t)).collect();
                for (node, &h) in hs.iter().enumerate() {
                    match path.iter().position(|&x| x == node) {
                        Some(t) if eta >> (d - 1 - t) & 1 == 1 => bits::and_assign(&mut set, t1.row(h)),
                        Some(_) => bits::and_assign(&mut set, t0.row(h)),
                        None => bits::and_assign(&mut set, tany.row(h)),
                    }
                }
                prod *= bits::count(&set) as u128;
                if prod == 0 {
                    break;
                }
            }
            prod
        })
        .sum())
}

fn find_rec(
    meter: &Meter,
    t: usize,
    d: usize,
    c: &[u64],
    nodes: &[usize],
    in_t: &ShiftTable,
    out_t: &ShiftTable,
) -> Option<(Vec<Vec<usize>>, Vec<usize>)> {
    // Returns subtree nodes grouped by depth and the leaves left to right.
    if t == d {
        return bits::first(c).map(|g| (vec![], vec![g]));
    }
    for &h in nodes {
        if !meter.tick() {
            return None;
        }
        let Some((lz, gz)) = find_rec(meter, t + 1, d, &bits::and(c, out_t.row(h)), nodes, in_t, out_t) else {
            continue;
        };
        let Some((lo, go)) = find_rec(meter, t + 1, d, &bits::and(c, in_t.row(h)), nodes, in_t, out_t) else {
            continue;
        };
        let mut levels = vec![vec![h]];
        for (a, b) in lz.into_iter().zip(lo) {
            let mut row = a;
            row.extend(b);
            levels.push(row);
        }
        let mut leaves = gz;
        leaves.extend(go);
        return Some((levels, leaves));
    }
    None
}

/// Some encoding of `T(d)` with leaves in `leaves_in` and nodes in `nodes_in`.
pub fn find_tree_encoding(
    a: &GroupSubset,
    d: usize,
    leaves_in: &GroupSubset,
    nodes_in: &GroupSubset,
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    if d == 0 || d > 16 {
        return Err(invalid("tree depth must be in 1..=16"));
    }
    let (in_t, out_t) = tables(a)?;
    let nodes = nodes_in.members();
    let meter = Meter::new(budget);
    let found = find_rec(&meter, 0, d, leaves_in.words(), &nodes, &in_t, &out_t).map(|(levels, leaves)| {
        let nodes: Vec<usize> = levels.into_iter().flatten().collect();
        Witness::new(WitnessKind::Tree, d, a.spec(), vec![("nodes", nodes), ("leaves", leaves)])
    });
    Ok(meter.finish(found))
}

/// A planted encoding of `T(d)` on random vectors, with `A` the set of
/// exactly the on-branch sums that must lie in `A`. Resamples until no
/// required-inside sum coincides with a required-outside sum.
pub fn planted_tree(spec: &GroupSpec, d: usize, seed: u64) -> Result<(Witness, GroupSubset)> {
    if d == 0 || d > 16 {
        return Err(invalid("tree depth must be in 1..=16"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let nodes: Vec<usize> = (0..(1 << d) - 1).map(|_| rng.gen_range(0..spec.order())).collect();
        let leaves: Vec<usize> = (0..1 << d).map(|_| rng.gen_range(0..spec.order())).collect();
        let mut set = GroupSubset::empty(spec);
        let mut outside = Vec::new();
        for (eta, &g) in leaves.iter().enumerate() {
            for t in 0..d {
                let s = spec.add(g, nodes[tree_node_on_path(eta, d, t)]);
                if eta >> (d - 1 - t) & 1 == 1 {
                    set.insert(s);
                } else {
                    outside.push(s);
                }
            }
        }
        if outside.iter().all(|&s| !set.contains(s)) {
            let w = Witness::new(WitnessKind::Tree, d, spec, vec![("nodes", nodes), ("leaves", leaves)]);
            return Ok((w, set));
        }
    }
    Err(invalid("could not plant a tree; the group is too small"))
}

/// Nodes `c_i` and leaves `b_j` of a `T(d)` encoding with `c_i + b_j in A`
/// iff `i <= j`, returned as an OP witness (`a = c`, `b = b`).
///
/// Found by exhaustive search over the encoding's own elements, and
/// revalidated before returning.
pub fn hodges_extract(encoding: &Witness, a: &GroupSubset, k: usize) -> Result<Witness> {
    if encoding.kind != WitnessKind::Tree {
        return Err(invalid("hodges_extract needs a tree encoding"));
    }
    encoding.revalidate(a)?;
    if k == 0 || encoding.k < hodges_depth(k) {
        return Err(invalid(format!("depth {} is below {} for k = {k}", encoding.k, hodges_depth(k))));
    }
    let w = order_among(a, k, encoding.role("nodes"), encoding.role("leaves"))
        .ok_or_else(|| invalid("no order configuration among the encoding's elements"))?;
    w.revalidate(a)?;
    Ok(w)
}

/// Exhaustive search for `c_i` in `nodes` and `b_j` in `leaves` with
/// `c_i + b_j in A` iff `i <= j`.
pub fn order_among(a: &GroupSubset, k: usize, nodes: &[usize], leaves: &[usize]) -> Option<Witness> {
    let spec = a.spec();
    let mut cs = nodes.to_vec();
    let mut bs = leaves.to_vec();
    cs.sort_unstable();
    cs.dedup();
    bs.sort_unstable();
    bs.dedup();
    let fits = |i: usize, c: usize, upto: &[usize]| {
        upto.iter().enumerate().all(|(j, &b)| a.contains(spec.add(c, b)) == (i <= j))
    };
    fn dfs(
        k: usize,
        cs: &[usize],
        bs: &[usize],
        chosen: &mut Vec<usize>,
        fits: &dyn Fn(usize, usize, &[usize]) -> bool,
    ) -> Option<Vec<usize>> {
        if chosen.len() == k {
            return (0..k).map(|i| cs.iter().copied().find(|&c| fits(i, c, chosen))).collect();
        }
        for &b in bs {
            chosen.push(b);
            if (0..k).all(|i| cs.iter().any(|&c| fits(i, c, chosen))) {
                if let Some(c) = dfs(k, cs, bs, chosen, fits) {
                    return Some(c);
                }
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = Vec::new();
    let c = dfs(k, &cs, &bs, &mut chosen, &fits)?;
    Some(Witness::new(WitnessKind::Op, k, spec, vec![("a", c), ("b", chosen)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_set(spec: &GroupSpec, rng: &mut ChaCha8Rng, p: f64) -> GroupSubset {
        (0..spec.order()).fold(GroupSubset::empty(spec), |mut s, i| {
            if rng.gen_bool(p) {
                s.insert(i);
            }
            s
        })
    }

    #[test]
    fn trivial_counts() {
        let spec = GroupSpec::new(3, 2).unwrap();
        let all = GroupSubset::full(&spec);
        assert_eq!(count_tree_encodings(&GroupSubset::empty(&spec), 1, &all, &all).unwrap(), 0);
        assert_eq!(count_tree_encodings(&all, 1, &all, &all).unwrap(), 0);
    }

    #[test]
    fn dp_matches_naive() {
        let spec = GroupSpec::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..4 {
            let a = random_set(&spec, &mut rng, 0.5);
            let all = GroupSubset::full(&spec);
            assert_eq!(
                count_tree_encodings(&a, 1, &all, &all).unwrap(),
                count_tree_encodings_naive(&a, 1, &all, &all).unwrap()
            );
            let leaves = random_set(&spec, &mut rng, 0.6);
            let nodes = random_set(&spec, &mut rng, 0.5);
            assert_eq!(
                count_tree_encodings(&a, 2, &leaves, &nodes).unwrap(),
                count_tree_encodings_naive(&a, 2, &leaves, &nodes).unwrap()
            );
        }
    }

    #[test]
    fn good_count_with_total_sets_is_plain_count() {
        let spec = GroupSpec::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_set(&spec, &mut rng, 0.5);
        let all = GroupSubset::full(&spec);
        for d in 1..=2 {
            assert_eq!(
                count_good_tree_encodings(&a, &a.complement(), d, &all, &all).unwrap(),
                count_tree_encodings(&a, d, &all, &all).unwrap()
            );
        }
    }

    #[test]
    fn found_encodings_revalidate() {
        let spec = GroupSpec::new(3, 3).unwrap();
        let a = crate::constructions::gs_in(&spec);
        let all = GroupSubset::full(&spec);
        for d in 1..=3 {
            let out = find_tree_encoding(&a, d, &all, &all, &SearchBudget::default()).unwrap();
            out.witness().unwrap().revalidate(&a).unwrap();
        }
    }

    #[test]
    fn hodges_on_planted_trees() {
        let spec = GroupSpec::new(3, 12).unwrap();
        let (w, a) = planted_tree(&spec, 6, 1).unwrap();
        w.revalidate(&a).unwrap();
        hodges_extract(&w, &a, 1).unwrap();
        // the extraction only looks at the sets of nodes and leaves
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut nodes = w.role("nodes").to_vec();
        let mut leaves = w.role("leaves").to_vec();
        for i in (1..nodes.len()).rev() {
            nodes.swap(i, rng.gen_range(0..=i));
        }
        for i in (1..leaves.len()).rev() {
            leaves.swap(i, rng.gen_range(0..=i));
        }
        order_among(&a, 1, &nodes, &leaves).unwrap().revalidate(&a).unwrap();
        // extra members off the branches do not matter
        let mut b = a.clone();
        for _ in 0..5000 {
            let g = w.role("leaves")[rng.gen_range(0..64)];
            let h = w.role("nodes")[rng.gen_range(0..63)];
            let s = spec.add(g, h);
            if w.revalidate(&{
                let mut t = b.clone();
                t.insert(s);
                t
            })
            .is_ok()
            {
                b.insert(s);
            }
        }
        hodges_extract(&w, &b, 1).unwrap();
        assert!(hodges_extract(&w, &a, 2).is_err());
    }
}
