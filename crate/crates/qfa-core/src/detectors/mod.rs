//! Witness-producing searches for order-type and independence-type patterns.
//!
//! Every search returns either a [`Witness`] that re-checks itself from
//! scratch, an exhaustive `None`, or `BoundOnly` when the budget ran out.

pub(crate) mod bits;
mod embed;
mod goodcopy;
mod search;
mod transforms;
mod tree;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fp::{format_digits, GroupSpec, GroupSubset};

pub use embed::{affine_embedding_exists, AffineMap};
pub use goodcopy::{find_good_copy, revalidate_good_copy, CopyPattern};
pub use search::{cap2_check, find_fop2, find_hop2, find_op, vc2_dim, vc_dim, Cap2Outcome, Cube, DimResult};
pub use transforms::{
    fop2_complement, fop2_to_shattering, hop2_complement, hop2_from_reindexed, hop2_to_op, vc2_to_fop2,
};
pub use tree::{
    count_good_tree_encodings, count_tree_encodings, count_tree_encodings_naive, find_tree_encoding, hodges_extract,
    hodges_depth, order_among, planted_tree,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WitnessKind {
    Op,
    Hop2,
    Fop2,
    Vc,
    Vc2,
    Tree,
    GoodCopy,
}

/// Group elements grouped by role.
///
/// Roles per kind (all 1-based indices in the formulas are stored 0-based):
/// * `Op`: `a`, `b` with `a_i + b_j in A` iff `i <= j`.
/// * `Hop2`: `x`, `y`, `z` with `x_u + y_v + z_w in A` iff `u < v + w`.
/// * `Fop2`: `x`, `z`, and `y` flattened as `f * k + j`, where `f` is the
///   base-`k` code of `(f(i,j) - 1)` listed row-major, most significant first.
/// * `Vc`: `points` and `translates[mask]` with `points_i + translates_S in A` iff bit `i` of `S` is set.
/// * `Vc2`: `b`, `c`, `a[mask]` with `a_S + b_i + c_j in A` iff bit `i*k + j` of `S` is set.
/// * `Tree`: `nodes` in heap order and `leaves` indexed by their branch word.
/// * `GoodCopy`: label codes, see [`find_good_copy`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub k: usize,
    pub p: u32,
    pub n: usize,
    pub roles: BTreeMap<String, Vec<usize>>,
}

impl Witness {
    pub fn new(kind: WitnessKind, k: usize, spec: &GroupSpec, roles: Vec<(&str, Vec<usize>)>) -> Self {
        Self {
            kind,
            k,
            p: spec.p(),
            n: spec.n(),
            roles: roles.into_iter().map(|(r, v)| (r.to_string(), v)).collect(),
        }
    }

    pub fn role(&self, name: &str) -> &[usize] {
        self.roles.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Role-tagged digit strings, first coordinate first.
    pub fn vectors(&self) -> BTreeMap<String, Vec<String>> {
        let spec = GroupSpec::new(self.p, self.n).expect("witness group was valid when built");
        self.roles
            .iter()
            .map(|(r, v)| (r.clone(), v.iter().map(|&i| format_digits(&spec.coords(i), self.p)).collect()))
            .collect()
    }

    fn check_role(&self, name: &str, len: usize, order: usize) -> Result<&[usize]> {
        let v = self.role(name);
        if v.len() != len {
            return Err(invalid(format!("role {name} has {} elements, expected {len}", v.len())));
        }
        if let Some(&bad) = v.iter().find(|&&i| i >= order) {
            return Err(invalid(format!("role {name} holds out-of-range element {bad}")));
        }
        Ok(v)
    }

    /// Re-test every membership constraint against `a`.
    ///
    /// Good copies live in a label space and are checked by
    /// [`revalidate_good_copy`] instead.
    pub fn revalidate(&self, a: &GroupSubset) -> Result<()> {
        let spec = a.spec();
        if spec.p() != self.p || spec.n() != self.n {
            return Err(invalid("witness and set live in different groups"));
        }
        let k = self.k;
        let ord = spec.order();
        let fail = |what: String| Err(invalid(format!("{:?} witness violated at {what}", self.kind)));
        match self.kind {
            WitnessKind::Op => {
                let (xa, xb) = (self.check_role("a", k, ord)?, self.check_role("b", k, ord)?);
                for i in 0..k {
                    for j in 0..k {
                        if a.contains(spec.add(xa[i], xb[j])) != (i <= j) {
                            return fail(format!("a{} + b{}", i + 1, j + 1));
                        }
                    }
                }
            }
            WitnessKind::Hop2 => {
                let x = self.check_role("x", k, ord)?;
                let y = self.check_role("y", k, ord)?;
                let z = self.check_role("z", k, ord)?;
                for u in 0..k {
                    for v in 0..k {
                        for w in 0..k {
                            let s = spec.add(spec.add(x[u], y[v]), z[w]);
                            // 1-based u < v + w  <=>  0-based u < v + w + 1
                            if a.contains(s) != (u < v + w + 1) {
                                return fail(format!("x{} + y{} + z{}", u + 1, v + 1, w + 1));
                            }
                        }
                    }
                }
            }
            WitnessKind::Fop2 => {
                let x = self.check_role("x", k, ord)?;
                let z = self.check_role("z", k, ord)?;
                let nf = k.pow((k * k) as u32);
                let y = self.check_role("y", nf * k, ord)?;
                for f in 0..nf {
                    let table = fop2_function(f, k);
                    for j in 0..k {
                        for i in 0..k {
                            for s in 0..k {
                                let sum = spec.add(spec.add(x[i], y[f * k + j]), z[s]);
                                if a.contains(sum) != (s < table[i * k + j]) {
                                    return fail(format!("f#{f}, x{} + y{} + z{}", i + 1, j + 1, s + 1));
                                }
                            }
                        }
                    }
                }
            }
            WitnessKind::Vc => {
                let pts = self.check_role("points", k, ord)?;
                let tr = self.check_role("translates", 1 << k, ord)?;
                for (mask, &t) in tr.iter().enumerate() {
                    for (i, &z) in pts.iter().enumerate() {
                        if a.contains(spec.add(z, t)) != (mask >> i & 1 == 1) {
                            return fail(format!("point {} with translate {mask:b}", i + 1));
                        }
                    }
                }
                for i in 0..k {
                    for j in 0..i {
                        if pts[i] == pts[j] {
                            return fail("repeated point".into());
                        }
                    }
                }
            }
            WitnessKind::Vc2 => {
                let b = self.check_role("b", k, ord)?;
                let c = self.check_role("c", k, ord)?;
                let av = self.check_role("a", 1 << (k * k), ord)?;
                for (mask, &x) in av.iter().enumerate() {
                    for i in 0..k {
                        for j in 0..k {
                            let s = spec.add(spec.add(x, b[i]), c[j]);
                            if a.contains(s) != (mask >> (i * k + j) & 1 == 1) {
                                return fail(format!("a[{mask:b}] + b{} + c{}", i + 1, j + 1));
                            }
                        }
                    }
                }
                for i in 0..k {
                    for j in 0..i {
                        if b[i] == b[j] || c[i] == c[j] {
                            return fail("repeated b or c".into());
                        }
                    }
                }
            }
            WitnessKind::Tree => {
                let d = k;
                let nodes = self.check_role("nodes", (1 << d) - 1, ord)?;
                let leaves = self.check_role("leaves", 1 << d, ord)?;
                for (eta, &g) in leaves.iter().enumerate() {
                    for t in 0..d {
                        let node = tree_node_on_path(eta, d, t);
                        let branch = eta >> (d - 1 - t) & 1 == 1;
                        if a.contains(spec.add(g, nodes[node])) != branch {
                            return fail(format!("leaf {eta:0d$b} with node at depth {t}"));
                        }
                    }
                }
            }
            WitnessKind::GoodCopy => return Err(invalid("good copies are checked against a reduced pair")),
        }
        Ok(())
    }
}

/// Values `f(i,j)` (1-based, stored row-major at `i*k + j`) of the `code`-th function `[k]^2 -> [k]`.
pub fn fop2_function(code: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k * k];
    let mut c = code;
    for slot in (0..k * k).rev() {
        out[slot] = c % k + 1;
        c /= k;
    }
    out
}

/// Inverse of [`fop2_function`].
pub fn fop2_code(values: &[usize], k: usize) -> usize {
    values.iter().fold(0, |acc, &v| acc * k + (v - 1))
}

/// Heap index of the node at depth `t` on the branch to leaf `eta` of a depth-`d` tree.
pub fn tree_node_on_path(eta: usize, d: usize, t: usize) -> usize {
    (1 << t) - 1 + (eta >> (d - t))
}

/// Limits for a search. `None` is reported only when the search finished
/// inside these limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    /// Pin the first element of translation-invariant roles to zero.
    pub symmetry: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { node_limit: 50_000_000_000, time_limit: None, symmetry: true }
    }
}

impl SearchBudget {
    pub fn nodes(node_limit: u64) -> Self {
        Self { node_limit, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Witness),
    /// Exhaustive search found nothing.
    None,
    /// The budget ran out first; nothing can be concluded.
    BoundOnly { nodes: u64 },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, SearchOutcome::None)
    }

    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found(_) => "FOUND",
            SearchOutcome::None => "NONE",
            SearchOutcome::BoundOnly { .. } => "BOUND-ONLY",
        }
    }
}

/// Shared node counter; searches poll [`Meter::tick`] and unwind when it returns false.
pub(crate) struct Meter {
    limit: u64,
    deadline: Option<Instant>,
    nodes: AtomicU64,
    stopped: AtomicBool,
}

impl Meter {
    pub(crate) fn new(b: &SearchBudget) -> Self {
        Self {
            limit: b.node_limit,
            deadline: b.time_limit.map(|t| Instant::now() + t),
            nodes: AtomicU64::new(0),
            stopped: AtomicBool::new(false),
        }
    }

    #[inline]
    pub(crate) fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n >= self.limit {
            self.stopped.store(true, Ordering::Relaxed);
        } else if n & 0xFFF == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.stopped.store(true, Ordering::Relaxed);
                }
            }
        }
        !self.stopped.load(Ordering::Relaxed)
    }

    pub(crate) fn stopped(&self) -> bool {
        self.stopped.load(Ordering::Relaxed)
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub(crate) fn finish(&self, found: Option<Witness>) -> SearchOutcome {
        match found {
            Some(w) => SearchOutcome::Found(w),
            None if self.stopped() => SearchOutcome::BoundOnly { nodes: self.nodes() },
            None => SearchOutcome::None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fop2_codes_roundtrip() {
        for k in 1usize..=3 {
            for c in 0..k.pow((k * k) as u32) {
                assert_eq!(fop2_code(&fop2_function(c, k), k), c);
            }
        }
        assert_eq!(fop2_function(1, 2), vec![1, 1, 1, 2]);
    }

    #[test]
    fn tree_paths() {
        // depth 2: root 0, children 1 (branch 0) and 2 (branch 1)
        assert_eq!(tree_node_on_path(0b10, 2, 0), 0);
        assert_eq!(tree_node_on_path(0b10, 2, 1), 2);
        assert_eq!(tree_node_on_path(0b01, 2, 1), 1);
    }
}
