//! Turning a good copy in a reduced pair into an actual `FOP_2` witness, and
//! the counting bound on encodings that touch error atoms.

use std::time::Instant;

use serde::Serialize;

use crate::detectors::{count_good_tree_encodings, count_tree_encodings, fop2_function, revalidate_good_copy, SearchBudget, Witness, WitnessKind};
use crate::error::{invalid, shape, Result};
use crate::factors::{decode, Factor, QuadraticFactor};
use crate::linalg::inv_mod;
use crate::uniformity::{BilinearTable, ReducedPair};
use crate::fp::GroupSubset;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Extraction {
    Found(Witness),
    NotFound {
        reason: String,
        /// Sizes of the zero atom and of the atoms of the left labels.
        atom_sizes: Vec<usize>,
        tuples_tried: u64,
    },
}

impl Extraction {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Extraction::Found(w) => Some(w),
            Extraction::NotFound { .. } => None,
        }
    }
}

/// Search for a `k`-`FOP_2` witness guided by a good copy of `H(k)` with right side in `H_B`.
///
/// With left labels `u_s` and right labels `(0, c_v)`, the witness takes
/// `x_i`, `y^f_j` in the zero atom and `z_s` in the atom of `u_s`, with
/// `beta(x_i, y^f_j) = c_f(i,j) / 2` and the other bilinear values zero, so
/// that `x_i + y^f_j + z_s` lands in the atom of `u_s + w_f(i,j)`. Since
/// `y^f_j` depends only on the column `(f(1,j), ..., f(k,j))`, one element per
/// column pattern is searched. Every candidate is checked against `A` itself.
/// When the prescribed bilinear values admit no solution (small `n` leaves
/// too few elements per atom), the search repeats over the same atoms on
/// membership alone.
pub fn fop2_guided_extraction(
    set: &GroupSubset,
    b: &QuadraticFactor,
    reduced: &ReducedPair,
    copy: &Witness,
    budget: &SearchBudget,
) -> Result<Extraction> {
    let spec = set.spec();
    let p = spec.p();
    if copy.kind != WitnessKind::GoodCopy || !copy.roles.contains_key("a") || !copy.roles.contains_key("b") {
        return Err(invalid("fop2 extraction needs a good copy of H(k)"));
    }
    let k = copy.k;
    if !(1..=3).contains(&k) {
        return Err(invalid("fop2 extraction is limited to k <= 3"));
    }
    let in1 = reduced.near_one()?;
    if in1.is_empty() {
        return Ok(Extraction::NotFound { reason: "no near-one labels".into(), atom_sizes: vec![], tuples_tried: 0 });
    }
    revalidate_good_copy(copy, &in1, &reduced.near_zero()?, Some(&reduced.h_b()?))?;
    let table = BilinearTable::new(spec, b)?;
    let (ell, q) = (b.ell(), b.q());
    if reduced.ell != ell || reduced.q != q || reduced.p != p {
        return Err(shape("reduced pair and factor differ"));
    }
    let lin = (p as usize).pow(ell as u32);
    let half = inv_mod(2, p);
    // target bilinear codes beta(x, y) = c_v / 2 for each right label
    let targets: Vec<usize> = copy
        .role("b")
        .iter()
        .map(|&w| {
            let c = decode(w / lin, p, q);
            c.iter().enumerate().map(|(i, &v)| (v * half % p) as usize * (p as usize).pow(i as u32)).sum()
        })
        .collect();
    let zero_atom = table.atom(0);
    let z_atoms: Vec<Vec<usize>> = copy.role("a").iter().map(|&u| table.atom(u)).collect();
    let mut atom_sizes = vec![zero_atom.len()];
    atom_sizes.extend(z_atoms.iter().map(Vec::len));
    if zero_atom.is_empty() || z_atoms.iter().any(Vec::is_empty) {
        return Ok(Extraction::NotFound { reason: "a required atom is empty".into(), atom_sizes, tuples_tried: 0 });
    }

    let start = Instant::now();
    let columns = k.pow(k as u32);
    let mut tried = 0u64;
    let mut found: Option<(Vec<usize>, Vec<usize>, Vec<usize>)> = None;
    let mut exhausted = false;
    // first with the bilinear values the copy prescribes, then on membership alone
    for strict in [true, false] {
        let mut xs = vec![0usize; k];
        let mut zs = vec![0usize; k];
        let mut visit = |xs: &[usize], zs: &[usize]| -> Option<bool> {
            tried += 1;
            if tried > budget.node_limit || budget.time_limit.is_some_and(|t| start.elapsed() > t) {
                return Some(false);
            }
            let mut per_column = Vec::with_capacity(columns);
            for col in 0..columns {
                // column values v_i = f(i, j) in 1..=k, most significant first
                let v: Vec<usize> = (0..k).map(|i| col / k.pow((k - 1 - i) as u32) % k + 1).collect();
                let y = zero_atom.iter().copied().find(|&y| {
                    (!strict
                        || (0..k).all(|i| table.beta_code(xs[i], y) == targets[v[i] - 1]) && zs.iter().all(|&z| table.beta_code(y, z) == 0))
                        && (0..k).all(|i| (0..k).all(|s| set.contains(spec.add(spec.add(xs[i], y), zs[s])) == (s < v[i])))
                });
                per_column.push(y?);
            }
            found = Some((xs.to_vec(), zs.to_vec(), per_column));
            Some(true)
        };
        let outcome = odometer(0, k, strict, &zero_atom, &z_atoms, &mut xs, &mut zs, &table, &mut visit);
        if outcome == Some(false) {
            exhausted = true;
        }
        if outcome.is_some() {
            break;
        }
    }
    let Some((xs, zs, per_column)) = found else {
        let reason = if exhausted { "budget exhausted" } else { "search space exhausted" };
        return Ok(Extraction::NotFound { reason: reason.into(), atom_sizes, tuples_tried: tried });
    };
    let nf = k.pow((k * k) as u32);
    let mut ys = Vec::with_capacity(nf * k);
    for code in 0..nf {
        let f = fop2_function(code, k);
        for j in 0..k {
            let col = (0..k).fold(0, |acc, i| acc * k + (f[i * k + j] - 1));
            ys.push(per_column[col]);
        }
    }
    let w = Witness::new(WitnessKind::Fop2, k, spec, vec![("x", xs), ("y", ys), ("z", zs)]);
    w.revalidate(set)?;
    Ok(Extraction::Found(w))
}

/// Runs over `x` tuples, then `z` tuples; in strict mode `beta(x_i, z_s) = 0` prunes.
#[allow(clippy::too_many_arguments)]
fn odometer(
    depth: usize,
    k: usize,
    strict: bool,
    zero_atom: &[usize],
    z_atoms: &[Vec<usize>],
    xs: &mut Vec<usize>,
    zs: &mut Vec<usize>,
    table: &BilinearTable,
    visit: &mut dyn FnMut(&[usize], &[usize]) -> Option<bool>,
) -> Option<bool> {
    if depth == 2 * k {
        return visit(xs, zs);
    }
    if depth < k {
        for &x in zero_atom {
            xs[depth] = x;
            if let Some(stop) = odometer(depth + 1, k, strict, zero_atom, z_atoms, xs, zs, table, visit) {
                return Some(stop);
            }
        }
    } else {
        let s = depth - k;
        for &z in &z_atoms[s] {
            if strict && xs.iter().any(|&x| table.beta_code(x, z) != 0) {
                continue;
            }
            zs[s] = z;
            if let Some(stop) = odometer(depth + 1, k, strict, zero_atom, z_atoms, xs, zs, table, visit) {
                return Some(stop);
            }
        }
    }
    None
}

/// Encodings of `T(d)` in the reduced pair with leaves in `H_B`, against the
/// union bound `2^d (2^d - 1) |Sigma| |H_B|^(2^d) |G'|^(2^d - 2)` on those that
/// send some leaf-node sum into an error label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScarcityCheck {
    pub depth: usize,
    pub encodings: u128,
    pub good_encodings: u128,
    /// Encodings with some sum in an error label.
    pub touching_error: u128,
    pub error_labels: u128,
    pub bound: u128,
    pub holds: bool,
}

pub fn scarcity_check(reduced: &ReducedPair, depth: usize) -> Result<ScarcityCheck> {
    if depth != 1 && depth != 2 {
        return Err(invalid("scarcity check supports depth 1 or 2"));
    }
    let in1 = reduced.near_one()?;
    let in0 = reduced.near_zero()?;
    let hb = reduced.h_b()?;
    let all = GroupSubset::full(in1.spec());
    let encodings = count_tree_encodings(&in1, depth, &hb, &all)?;
    let good = count_good_tree_encodings(&in1, &in0, depth, &hb, &all)?;
    let (leaves, nodes) = (1u32 << depth, (1u32 << depth) - 1);
    let sigma = reduced.error_labels() as u128;
    let g = all.len() as u128;
    let bound = (leaves as u128) * (nodes as u128) * sigma * (hb.len() as u128).pow(leaves) * g.pow(nodes - 1);
    let touching = encodings - good;
    Ok(ScarcityCheck { depth, encodings, good_encodings: good, touching_error: touching, error_labels: sigma, bound, holds: touching <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{qgs, standard_quadric, trace_sym_space};
    use crate::detectors::find_fop2;
    use crate::fp::GroupSpec;
    use crate::uniformity::reduced_pair;

    fn qgs_setup(n: usize, q: usize) -> (GroupSubset, QuadraticFactor, ReducedPair) {
        let (a, _) = qgs(n, 3).unwrap();
        let mats = trace_sym_space(n, 3).unwrap();
        let b = QuadraticFactor::purely_quadratic(3, n, mats[..q].to_vec()).unwrap();
        let r = reduced_pair(&a, &b, 0.1).unwrap();
        (a, b, r)
    }

    fn corollary_copy(r: &ReducedPair, k: usize) -> Witness {
        let ls = r.label_spec().unwrap();
        let left: Vec<usize> = (0..k).map(|i| ls.add(ls.basis(i), ls.basis(i + 1))).collect();
        let right: Vec<usize> = (0..k).map(|j| ls.scale(2, ls.basis(j))).collect();
        Witness::new(WitnessKind::GoodCopy, k, &ls, vec![("a", left), ("b", right)])
    }

    #[test]
    fn qgs_copy_extracts_fop2() {
        let (a, b, r) = qgs_setup(6, 3);
        let w = corollary_copy(&r, 2);
        let out = fop2_guided_extraction(&a, &b, &r, &w, &SearchBudget::nodes(1_000_000)).unwrap();
        let fop = out.witness().expect("witness");
        fop.revalidate(&a).unwrap();
    }

    #[test]
    fn planted_union_of_sum_atoms() {
        // A is exactly the union of the atoms the copy asks to be inside
        let n = 7;
        let mats = trace_sym_space(n, 3).unwrap();
        let b = QuadraticFactor::purely_quadratic(3, n, mats[..3].to_vec()).unwrap();
        let spec = GroupSpec::new(3, n).unwrap();
        let ls = GroupSpec::new(3, 3).unwrap();
        let left: Vec<usize> = (0..2).map(|i| ls.add(ls.basis(i), ls.basis(i + 1))).collect();
        let right: Vec<usize> = (0..2).map(|j| ls.scale(2, ls.basis(j))).collect();
        let inside: Vec<usize> = (0..2).flat_map(|i| (i..2).map(move |j| (i, j))).map(|(i, j)| ls.add(left[i], right[j])).collect();
        let table = BilinearTable::new(&spec, &b).unwrap();
        let a = GroupSubset::from_fn(&spec, |x| inside.contains(&table.label_code(x)));
        let r = reduced_pair(&a, &b, 0.0).unwrap();
        let w = Witness::new(WitnessKind::GoodCopy, 2, &ls, vec![("a", left), ("b", right)]);
        let out = fop2_guided_extraction(&a, &b, &r, &w, &SearchBudget::nodes(1_000_000)).unwrap();
        out.witness().expect("witness").revalidate(&a).unwrap();
    }

    #[test]
    fn empty_near_one_side_is_not_found() {
        let (_, b, _) = qgs_setup(4, 3);
        let spec = GroupSpec::new(3, 4).unwrap();
        let empty = GroupSubset::empty(&spec);
        let r = reduced_pair(&empty, &b, 0.1).unwrap();
        let w = corollary_copy(&r, 2);
        let out = fop2_guided_extraction(&empty, &b, &r, &w, &SearchBudget::default()).unwrap();
        assert!(matches!(out, Extraction::NotFound { tuples_tried: 0, .. }));
    }

    #[test]
    fn scarcity_counts_are_consistent() {
        let a = standard_quadric(2, 3, 0).unwrap();
        assert!(find_fop2(&a, 2, &SearchBudget::default()).unwrap().is_none());
        let ident = crate::fp::FpSymMatrix::identity(3, 2);
        let b = QuadraticFactor::new(crate::factors::LinearFactor::standard(3, 2, 1), vec![ident]).unwrap();
        let r = reduced_pair(&a, &b, 0.2).unwrap();
        let s = scarcity_check(&r, 1).unwrap();
        assert!(s.holds);
        assert_eq!(s.encodings, s.good_encodings + s.touching_error);
    }
}
