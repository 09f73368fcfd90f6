//! Exhaustive searches for OP, HOP2, FOP2, VC, VC2 and CAP2 configurations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bits::{self, Bits, ShiftTable};
use super::{Meter, SearchBudget, SearchOutcome, Witness, WitnessKind};
use crate::error::{invalid, QfaError, Result};
use crate::fp::{GroupSpec, GroupSubset};

/// Shift tables cost `|G|^2 / 8` bytes each.
const MAX_TABLE_ORDER: usize = 1 << 15;

pub(crate) fn tables(a: &GroupSubset) -> Result<(ShiftTable, ShiftTable)> {
    let order = a.spec().order();
    if order > MAX_TABLE_ORDER {
        return Err(QfaError::Budget(format!("searches need |G| <= {MAX_TABLE_ORDER}, got {order}")));
    }
    Ok((ShiftTable::new(a), ShiftTable::new(&a.complement())))
}

/// Search for `left`, `right` tuples with `left_i + right_j` in `in_set` when
/// `pattern[i][j]` and in `out_set` otherwise.
///
/// The right tuple is chosen depth-first; each left element is then free
/// and taken as the least survivor of its candidate set.
pub(crate) struct Bipartite<'a> {
    pub in_t: &'a ShiftTable,
    pub out_t: &'a ShiftTable,
    pub right_cands: Bits,
    pub left_init: Bits,
    pub pattern: Vec<Vec<bool>>,
    pub k_right: usize,
    pub pin_first: bool,
}

impl Bipartite<'_> {
    fn extend(&self, sets: &[Bits], j: usize, b: usize) -> Option<Vec<Bits>> {
        let mut out = Vec::with_capacity(sets.len());
        for (i, s) in sets.iter().enumerate() {
            let row = if self.pattern[i][j] { self.in_t.row(b) } else { self.out_t.row(b) };
            let next = bits::and(s, row);
            if bits::is_zero(&next) {
                return None;
            }
            out.push(next);
        }
        Some(out)
    }

    fn dfs(&self, meter: &Meter, right: &mut Vec<usize>, sets: &[Bits]) -> Option<(Vec<usize>, Vec<usize>)> {
        let j = right.len();
        if j == self.k_right {
            let left = sets.iter().map(|s| bits::first(s).unwrap()).collect();
            return Some((left, right.clone()));
        }
        for b in bits::ones(&self.right_cands) {
            if !meter.tick() {
                return None;
            }
            if let Some(next) = self.extend(sets, j, b) {
                right.push(b);
                if let Some(w) = self.dfs(meter, right, &next) {
                    return Some(w);
                }
                right.pop();
            }
        }
        None
    }

    pub(crate) fn run(&self, meter: &Meter) -> Option<(Vec<usize>, Vec<usize>)> {
        let init: Vec<Bits> = vec![self.left_init.clone(); self.pattern.len()];
        if self.k_right == 0 {
            return init.iter().map(|s| bits::first(s)).collect::<Option<Vec<_>>>().map(|l| (l, vec![]));
        }
        let (prefix, sets) = if self.pin_first {
            if !bits::get(&self.right_cands, 0) {
                return None;
            }
            match self.extend(&init, 0, 0) {
                Some(s) => (vec![0usize], s),
                None => return None,
            }
        } else {
            (vec![], init)
        };
        if prefix.len() == self.k_right {
            let left = sets.iter().map(|s| bits::first(s).unwrap()).collect();
            return Some((left, prefix));
        }
        let j = prefix.len();
        let cands: Vec<usize> = bits::ones(&self.right_cands).collect();
        cands.par_iter().find_map_first(|&b| {
            if !meter.tick() {
                return None;
            }
            let next = self.extend(&sets, j, b)?;
            let mut right = prefix.clone();
            right.push(b);
            self.dfs(meter, &mut right, &next)
        })
    }
}

fn need_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("pattern size k must be at least 1"));
    }
    Ok(())
}

/// `a_i + b_j in A` iff `i <= j`, for `i, j` in `1..=k`.
pub fn find_op(a: &GroupSubset, k: usize, budget: &SearchBudget) -> Result<SearchOutcome> {
    need_k(k)?;
    let spec = a.spec();
    let (in_t, out_t) = tables(a)?;
    let order = spec.order();
    let engine = Bipartite {
        in_t: &in_t,
        out_t: &out_t,
        right_cands: bits::full(order),
        left_init: bits::full(order),
        pattern: (0..k).map(|i| (0..k).map(|j| i <= j).collect()).collect(),
        k_right: k,
        pin_first: budget.symmetry,
    };
    let meter = Meter::new(budget);
    let found = engine.run(&meter).map(|(l, r)| Witness::new(WitnessKind::Op, k, spec, vec![("a", l), ("b", r)]));
    Ok(meter.finish(found))
}

struct Hop2Search<'a> {
    spec: &'a GroupSpec,
    in_t: &'a ShiftTable,
    out_t: &'a ShiftTable,
    k: usize,
}

impl Hop2Search<'_> {
    /// `sets[m]` holds the sums `s` with `x_u + s in A` iff `u <= m + 1`
    /// (1-based `u`), i.e. the required column for `v + w = m + 2`.
    fn extend_x(&self, sets: &[Bits], u: usize, x: usize) -> Option<Vec<Bits>> {
        let mut out = Vec::with_capacity(self.k);
        for (m, s) in sets.iter().enumerate() {
            let row = if u <= m { self.in_t.row(x) } else { self.out_t.row(x) };
            let next = bits::and(s, row);
            if bits::is_zero(&next) {
                return None;
            }
            out.push(next);
        }
        Some(out)
    }

    fn column(&self, v: usize, w: usize) -> usize {
        (v + w).min(self.k - 1)
    }

    fn x_dfs(&self, meter: &Meter, xs: &mut Vec<usize>, sets: &[Bits], y1s: &[usize]) -> Option<Witness> {
        if xs.len() == self.k {
            for &y1 in y1s {
                if !meter.tick() {
                    return None;
                }
                let mut zs = Vec::new();
                let ys = vec![bits::full(self.spec.order()); self.k - 1];
                if let Some((ys, zs)) = self.z_dfs(meter, sets, y1, &mut zs, &ys) {
                    let mut yv = vec![y1];
                    yv.extend(ys);
                    return Some(Witness::new(
                        WitnessKind::Hop2,
                        self.k,
                        self.spec,
                        vec![("x", xs.clone()), ("y", yv), ("z", zs)],
                    ));
                }
            }
            return None;
        }
        for x in 0..self.spec.order() {
            if !meter.tick() {
                return None;
            }
            if let Some(next) = self.extend_x(sets, xs.len(), x) {
                xs.push(x);
                if let Some(w) = self.x_dfs(meter, xs, &next, y1s) {
                    return Some(w);
                }
                xs.pop();
            }
        }
        None
    }

    /// Choose `z_w` with `y_1 + z_w` in the right column, tracking the
    /// surviving candidates for `y_2..y_k`.
    fn z_dfs(
        &self,
        meter: &Meter,
        sets: &[Bits],
        y1: usize,
        zs: &mut Vec<usize>,
        ys: &[Bits],
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let w = zs.len();
        if w == self.k {
            return Some((ys.iter().map(|s| bits::first(s).unwrap()).collect(), zs.clone()));
        }
        let cands = bits::shift_down(self.spec, &sets[self.column(0, w)], y1);
        for z in bits::ones(&cands) {
            if !meter.tick() {
                return None;
            }
            let mut next = Vec::with_capacity(ys.len());
            let mut ok = true;
            for (v1, s) in ys.iter().enumerate() {
                let col = bits::shift_down(self.spec, &sets[self.column(v1 + 1, w)], z);
                let t = bits::and(s, &col);
                if bits::is_zero(&t) {
                    ok = false;
                    break;
                }
                next.push(t);
            }
            if ok {
                zs.push(z);
                if let Some(r) = self.z_dfs(meter, sets, y1, zs, &next) {
                    return Some(r);
                }
                zs.pop();
            }
        }
        None
    }
}

/// `x_u + y_v + z_w in A` iff `u < v + w`, for `u, v, w` in `1..=k`.
///
/// With symmetry on, `x_1 = y_1 = 0`; both pins are free by the two
/// translation symmetries of the pattern.
pub fn find_hop2(a: &GroupSubset, k: usize, budget: &SearchBudget) -> Result<SearchOutcome> {
    need_k(k)?;
    let spec = a.spec();
    let (in_t, out_t) = tables(a)?;
    let order = spec.order();
    let s = Hop2Search { spec, in_t: &in_t, out_t: &out_t, k };
    let meter = Meter::new(budget);
    let y1s: Vec<usize> = if budget.symmetry { vec![0] } else { (0..order).collect() };
    let init = vec![bits::full(order); k];
    let x1s: Vec<usize> = if budget.symmetry { vec![0] } else { (0..order).collect() };
    let found = x1s.par_iter().find_map_first(|&x1| {
        let sets = s.extend_x(&init, 0, x1)?;
        if k == 1 {
            return s.x_dfs(&meter, &mut vec![x1], &sets, &y1s);
        }
        (0..order).into_par_iter().find_map_first(|x2| {
            if !meter.tick() {
                return None;
            }
            let next = s.extend_x(&sets, 1, x2)?;
            s.x_dfs(&meter, &mut vec![x1, x2], &next, &y1s)
        })
    });
    Ok(meter.finish(found))
}

/// `x_i + y^f_j + z_s in A` iff `s <= f(i,j)` for every `f : [k]^2 -> [k]`.
///
/// Only the threshold vectors `(f(1,j), .., f(k,j))` matter, so the search
/// asks that each of the `k^k` of them is realised by some `y`.
pub fn find_fop2(a: &GroupSubset, k: usize, budget: &SearchBudget) -> Result<SearchOutcome> {
    need_k(k)?;
    if k * k > 16 {
        return Err(invalid("find_fop2 supports k <= 4"));
    }
    let spec = a.spec();
    let order = spec.order();
    let free = if budget.symmetry { 2 * k - 2 } else { 2 * k };
    let total = (order as u128).pow(free as u32);
    if total > u64::MAX as u128 {
        return Err(QfaError::Budget(format!("{order}^{free} (x, z) tuples")));
    }
    // needed[v] = pattern with bit i*k+s set iff s < v_i (0-based)
    let thresholds: Vec<Vec<usize>> = (0..k.pow(k as u32))
        .map(|c| {
            let mut v = vec![0; k];
            let mut c = c;
            for slot in (0..k).rev() {
                v[slot] = c % k + 1;
                c /= k;
            }
            v
        })
        .collect();
    let pattern_of = |v: &[usize]| -> usize {
        let mut pat = 0usize;
        for (i, &vi) in v.iter().enumerate() {
            for s in 0..vi {
                pat |= 1 << (i * k + s);
            }
        }
        pat
    };
    let needed: Vec<usize> = thresholds.iter().map(|v| pattern_of(v)).collect();
    let meter = Meter::new(budget);
    let found = (0..total as u64).into_par_iter().find_map_first(|code| {
        if !meter.tick() {
            return None;
        }
        let mut c = code;
        let mut digits = vec![0usize; free];
        for d in digits.iter_mut().rev() {
            *d = (c % order as u64) as usize;
            c /= order as u64;
        }
        let (xs, zs): (Vec<usize>, Vec<usize>) = if budget.symmetry {
            let mut xs = vec![0];
            xs.extend(&digits[..k - 1]);
            let mut zs = vec![0];
            zs.extend(&digits[k - 1..]);
            (xs, zs)
        } else {
            (digits[..k].to_vec(), digits[k..].to_vec())
        };
        let sums: Vec<usize> = (0..k * k).map(|t| spec.add(xs[t / k], zs[t % k])).collect();
        let mut realiser = vec![usize::MAX; 1 << (k * k)];
        for y in 0..order {
            let mut pat = 0usize;
            for (t, &w) in sums.iter().enumerate() {
                if a.contains(spec.add(y, w)) {
                    pat |= 1 << t;
                }
            }
            if realiser[pat] == usize::MAX {
                realiser[pat] = y;
            }
        }
        if needed.iter().any(|&pat| realiser[pat] == usize::MAX) {
            return None;
        }
        let nf = k.pow((k * k) as u32);
        let mut ys = Vec::with_capacity(nf * k);
        for f in 0..nf {
            let table = super::fop2_function(f, k);
            for j in 0..k {
                let v: Vec<usize> = (0..k).map(|i| table[i * k + j]).collect();
                ys.push(realiser[pattern_of(&v)]);
            }
        }
        Some(Witness::new(WitnessKind::Fop2, k, spec, vec![("x", xs), ("y", ys), ("z", zs)]))
    });
    Ok(meter.finish(found))
}

/// Largest dimension reached, with the witness for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimResult {
    pub dim: usize,
    pub witness: Option<Witness>,
    /// False when the budget stopped the search at `dim + 1`, so `dim` is only a lower bound.
    pub exact: bool,
    /// True when `dim == kmax` and larger sizes were not tried.
    pub capped: bool,
}

fn shatter_dfs(
    spec: &GroupSpec,
    a: &GroupSubset,
    meter: &Meter,
    d: usize,
    pts: &mut Vec<usize>,
    pats: &[u32],
) -> Option<Vec<usize>> {
    if pts.len() == d {
        return Some(pts.clone());
    }
    let start = pts.last().map_or(1, |&l| l + 1);
    let bit = pts.len();
    for z in start..spec.order() {
        if !meter.tick() {
            return None;
        }
        let next: Vec<u32> =
            (0..spec.order()).map(|t| pats[t] | (a.contains(spec.add(z, t)) as u32) << bit).collect();
        let size = 1usize << (bit + 1);
        let mut seen = vec![false; size];
        let mut distinct = 0;
        for &pt in &next {
            if !seen[pt as usize] {
                seen[pt as usize] = true;
                distinct += 1;
            }
        }
        if distinct < size {
            continue;
        }
        pts.push(z);
        if let Some(w) = shatter_dfs(spec, a, meter, d, pts, &next) {
            return Some(w);
        }
        pts.pop();
    }
    None
}

fn find_shattered(a: &GroupSubset, d: usize, meter: &Meter) -> Option<Witness> {
    let spec = a.spec();
    let order = spec.order();
    // Shattering is translation invariant, so one point may be taken to be 0.
    let base: Vec<u32> = (0..order).map(|t| a.contains(t) as u32).collect();
    if base.iter().all(|&b| b == base[0]) {
        return None;
    }
    let pts = if d == 1 {
        Some(vec![0])
    } else {
        (1..order).into_par_iter().find_map_first(|z| {
            if !meter.tick() {
                return None;
            }
            let mut pts = vec![0, z];
            let next: Vec<u32> = (0..order).map(|t| base[t] | (a.contains(spec.add(z, t)) as u32) << 1).collect();
            let mut seen = [false; 4];
            next.iter().for_each(|&p| seen[p as usize] = true);
            if seen.iter().any(|s| !s) {
                return None;
            }
            shatter_dfs(spec, a, meter, d, &mut pts, &next)
        })
    }?;
    let mut translates = vec![usize::MAX; 1 << d];
    for t in 0..order {
        let mask = pts.iter().enumerate().fold(0, |m, (i, &z)| m | (a.contains(spec.add(z, t)) as usize) << i);
        if translates[mask] == usize::MAX {
            translates[mask] = t;
        }
    }
    Some(Witness::new(WitnessKind::Vc, d, spec, vec![("points", pts), ("translates", translates)]))
}

/// VC-dimension of the translates of `A`, searched up to `kmax`.
pub fn vc_dim(a: &GroupSubset, kmax: usize, budget: &SearchBudget) -> Result<DimResult> {
    if kmax > 20 {
        return Err(invalid("vc_dim supports kmax <= 20"));
    }
    let meter = Meter::new(budget);
    let mut best = DimResult { dim: 0, witness: None, exact: true, capped: false };
    for d in 1..=kmax {
        match find_shattered(a, d, &meter) {
            Some(w) => {
                best.dim = d;
                best.witness = Some(w);
            }
            None => {
                best.exact = !meter.stopped();
                return Ok(best);
            }
        }
    }
    best.capped = true;
    Ok(best)
}

fn find_vc2(a: &GroupSubset, k: usize, meter: &Meter, symmetry: bool) -> Option<Witness> {
    let spec = a.spec();
    let order = spec.order();
    let free = if symmetry { 2 * k - 2 } else { 2 * k };
    let total = (order as u64).checked_pow(free as u32)?;
    let npat = 1usize << (k * k);
    (0..total).into_par_iter().find_map_first(|code| {
        if !meter.tick() {
            return None;
        }
        let mut c = code;
        let mut digits = vec![0usize; free];
        for d in digits.iter_mut().rev() {
            *d = (c % order as u64) as usize;
            c /= order as u64;
        }
        let (bs, cs): (Vec<usize>, Vec<usize>) = if symmetry {
            let mut bs = vec![0];
            bs.extend(&digits[..k - 1]);
            let mut cs = vec![0];
            cs.extend(&digits[k - 1..]);
            (bs, cs)
        } else {
            (digits[..k].to_vec(), digits[k..].to_vec())
        };
        for i in 0..k {
            for j in 0..i {
                if bs[i] == bs[j] || cs[i] == cs[j] {
                    return None;
                }
            }
        }
        let sums: Vec<usize> = (0..k * k).map(|t| spec.add(bs[t / k], cs[t % k])).collect();
        let mut realiser = vec![usize::MAX; npat];
        let mut hit = 0;
        for x in 0..order {
            let pat = sums.iter().enumerate().fold(0, |m, (t, &s)| m | (a.contains(spec.add(x, s)) as usize) << t);
            if realiser[pat] == usize::MAX {
                realiser[pat] = x;
                hit += 1;
                if hit == npat {
                    break;
                }
            }
        }
        (hit == npat).then(|| Witness::new(WitnessKind::Vc2, k, spec, vec![("a", realiser), ("b", bs), ("c", cs)]))
    })
}

/// VC2-dimension of `A`, searched up to `kmax` (at most 4).
pub fn vc2_dim(a: &GroupSubset, kmax: usize, budget: &SearchBudget) -> Result<DimResult> {
    if kmax > 4 {
        return Err(invalid("vc2_dim supports kmax <= 4"));
    }
    let meter = Meter::new(budget);
    let mut best = DimResult { dim: 0, witness: None, exact: true, capped: false };
    for k in 1..=kmax {
        match find_vc2(a, k, &meter, budget.symmetry) {
            Some(w) => {
                best.dim = k;
                best.witness = Some(w);
            }
            None => {
                best.exact = !meter.stopped();
                return Ok(best);
            }
        }
    }
    best.capped = true;
    Ok(best)
}

/// Eight sums `x_i + y_j + z_k`; a violating cube has the first seven in `A`
/// and `x_2 + y_2 + z_2` outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub x: [usize; 2],
    pub y: [usize; 2],
    pub z: [usize; 2],
}

impl Cube {
    pub fn is_violation(&self, a: &GroupSubset) -> bool {
        let spec = a.spec();
        let mut ok = true;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let inside = a.contains(spec.add(spec.add(self.x[i], self.y[j]), self.z[k]));
                    ok &= if (i, j, k) == (1, 1, 1) { !inside } else { inside };
                }
            }
        }
        ok
    }

    /// The same eight elements read as a 2-HOP2 configuration: swapping the
    /// indices of `y` and `z` moves the missing corner to `x_2 + y_1 + z_1`.
    pub fn to_hop2(&self, spec: &GroupSpec) -> Witness {
        Witness::new(
            WitnessKind::Hop2,
            2,
            spec,
            vec![("x", self.x.to_vec()), ("y", vec![self.y[1], self.y[0]]), ("z", vec![self.z[1], self.z[0]])],
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cap2Outcome {
    Holds,
    Violated(Cube),
    BoundOnly { nodes: u64 },
}

/// Whether every cube with seven sums in `A` has the eighth in `A` too.
///
/// Cubes are `s + {0,u} + {0,v} + {0,w}`; this covers every choice of
/// `x_1, x_2, y_1, y_2, z_1, z_2` up to translation.
pub fn cap2_check(a: &GroupSubset, budget: &SearchBudget) -> Result<Cap2Outcome> {
    let spec = a.spec();
    let (in_t, _) = tables(a)?;
    let meter = Meter::new(budget);
    let members = a.members();
    let found = members.par_iter().find_map_first(|&s| {
        // u, v, w with s+u, s+v, s+w in A
        let nbrs: Vec<usize> = bits::ones(in_t.row(s)).collect();
        for &u in &nbrs {
            for &v in &nbrs {
                if !meter.tick() {
                    return None;
                }
                let suv = spec.add(spec.add(s, u), v);
                if !a.contains(suv) {
                    continue;
                }
                for &w in &nbrs {
                    let (su, sv) = (spec.add(s, u), spec.add(s, v));
                    if a.contains(spec.add(su, w)) && a.contains(spec.add(sv, w)) && !a.contains(spec.add(suv, w)) {
                        // x = (0, u), y = (0, v), z = (s, s + w)
                        return Some(Cube { x: [0, u], y: [0, v], z: [s, spec.add(s, w)] });
                    }
                }
            }
        }
        None
    });
    Ok(match found {
        Some(c) => Cap2Outcome::Violated(c),
        None if meter.stopped() => Cap2Outcome::BoundOnly { nodes: meter.nodes() },
        None => Cap2Outcome::Holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gs, standard_quadric};
    use crate::fp::GroupSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b() -> SearchBudget {
        SearchBudget::default()
    }

    fn vecs(spec: &GroupSpec, digits: &[&str]) -> Vec<usize> {
        digits
            .iter()
            .map(|d| spec.index(&d.bytes().map(|c| (c - b'0') as u32).collect::<Vec<_>>()))
            .collect()
    }

    #[test]
    fn op_on_gs_and_cosets() {
        let a = gs(4, 3).unwrap();
        let w = find_op(&a, 3, &b()).unwrap();
        w.witness().unwrap().revalidate(&a).unwrap();
        let spec = GroupSpec::new(3, 3).unwrap();
        let coset = GroupSubset::from_fn(&spec, |i| spec.coords(i)[0] == 1);
        assert!(find_op(&coset, 2, &b()).unwrap().is_none());
        assert!(find_op(&GroupSubset::empty(&spec), 1, &b()).unwrap().is_none());
    }

    #[test]
    fn gs_order_construction_reindexes() {
        // a_i = e_i, b_j = 2 e_j gives a_i + b_j in A iff i < j; shifting
        // the b indices by one turns this into the i <= j pattern.
        let n = 5;
        let a = gs(n, 3).unwrap();
        let spec = a.spec().clone();
        let k = n - 1;
        let av: Vec<usize> = (0..k).map(|i| spec.basis(i)).collect();
        let bv: Vec<usize> = (1..=k).map(|j| spec.scale(2, spec.basis(j))).collect();
        let w = Witness::new(WitnessKind::Op, k, &spec, vec![("a", av), ("b", bv)]);
        w.revalidate(&a).unwrap();
    }

    #[test]
    fn hop2_listed_witness_and_search() {
        let a = gs(4, 3).unwrap();
        let spec = a.spec().clone();
        let w = Witness::new(
            WitnessKind::Hop2,
            3,
            &spec,
            vec![
                ("x", vecs(&spec, &["2220", "2210", "2120"])),
                ("y", vecs(&spec, &["2220", "2200", "0220"])),
                ("z", vecs(&spec, &["2221", "2011", "2021"])),
            ],
        );
        w.revalidate(&a).unwrap();
        let found = find_hop2(&a, 3, &b()).unwrap();
        found.witness().unwrap().revalidate(&a).unwrap();
    }

    #[test]
    fn hop2_none_on_small_gs() {
        for n in [2, 3] {
            let a = gs(n, 3).unwrap();
            assert!(find_hop2(&a, 4, &b()).unwrap().is_none(), "n={n}");
        }
        let q = standard_quadric(3, 3, 0).unwrap();
        assert!(find_hop2(&q, 2, &b()).unwrap().is_none());
    }

    #[test]
    fn hop2_symmetry_agrees_with_full_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = GroupSpec::new(3, 2).unwrap();
        let full = SearchBudget { symmetry: false, ..b() };
        for _ in 0..20 {
            let a = GroupSubset::from_fn(&spec, |_| false);
            let a = (0..9).fold(a, |mut s, i| {
                if rng.gen_bool(0.5) {
                    s.insert(i);
                }
                s
            });
            for k in 1..=2 {
                let x = find_hop2(&a, k, &b()).unwrap();
                let y = find_hop2(&a, k, &full).unwrap();
                assert_eq!(x.is_none(), y.is_none());
                if let Some(w) = y.witness() {
                    w.revalidate(&a).unwrap();
                }
            }
        }
    }

    #[test]
    fn fop2_cases() {
        let q = standard_quadric(2, 3, 0).unwrap();
        assert!(find_fop2(&q, 2, &b()).unwrap().is_none());
        let spec = q.spec().clone();
        assert!(find_fop2(&GroupSubset::empty(&spec), 2, &b()).unwrap().is_none());
        assert!(find_fop2(&GroupSubset::full(&spec), 2, &b()).unwrap().is_none());
        // k = 1 only needs one member
        let w = find_fop2(&q, 1, &b()).unwrap();
        w.witness().unwrap().revalidate(&q).unwrap();
    }

    #[test]
    fn vc_dimensions() {
        let a = gs(3, 3).unwrap();
        let r = vc_dim(&a, 5, &b()).unwrap();
        assert_eq!((r.dim, r.exact), (3, true));
        r.witness.unwrap().revalidate(&a).unwrap();
        let spec = GroupSpec::new(3, 2).unwrap();
        assert_eq!(vc_dim(&GroupSubset::empty(&spec), 3, &b()).unwrap().dim, 0);
        let q = standard_quadric(3, 3, 0).unwrap();
        let r2 = vc2_dim(&q, 2, &b()).unwrap();
        assert!(r2.dim <= 1 && r2.exact);
    }

    #[test]
    fn listed_shattering_in_gs33() {
        let a = gs(3, 3).unwrap();
        let spec = a.spec().clone();
        let z = vecs(&spec, &["000", "012", "021"]);
        // every subset is realised by some translate
        let mut seen = [false; 8];
        for t in 0..spec.order() {
            let m = z.iter().enumerate().fold(0, |m, (i, &zi)| m | (a.contains(spec.add(zi, t)) as usize) << i);
            seen[m] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn cap2_matches_hop2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = GroupSpec::new(3, 2).unwrap();
        for _ in 0..30 {
            let a = (0..9).fold(GroupSubset::empty(&spec), |mut s, i| {
                if rng.gen_bool(0.6) {
                    s.insert(i);
                }
                s
            });
            let cap = cap2_check(&a, &b()).unwrap();
            let hop = find_hop2(&a, 2, &b()).unwrap();
            match cap {
                Cap2Outcome::Holds => assert!(hop.is_none()),
                Cap2Outcome::Violated(c) => {
                    assert!(c.is_violation(&a));
                    c.to_hop2(&spec).revalidate(&a).unwrap();
                    assert!(hop.witness().is_some());
                }
                Cap2Outcome::BoundOnly { .. } => panic!("budget"),
            }
        }
        let q = standard_quadric(3, 3, 0).unwrap();
        assert_eq!(cap2_check(&q, &b()).unwrap(), Cap2Outcome::Holds);
    }

    fn naive_hop2_exists(a: &GroupSubset, k: usize) -> bool {
        let spec = a.spec();
        let ord = spec.order();
        let total = (ord as u64).pow(3 * k as u32);
        (0..total).any(|code| {
            let mut c = code;
            let mut v = vec![0usize; 3 * k];
            for e in v.iter_mut() {
                *e = (c % ord as u64) as usize;
                c /= ord as u64;
            }
            let w = Witness::new(
                WitnessKind::Hop2,
                k,
                spec,
                vec![("x", v[..k].to_vec()), ("y", v[k..2 * k].to_vec()), ("z", v[2 * k..].to_vec())],
            );
            w.revalidate(a).is_ok()
        })
    }

    fn naive_op_exists(a: &GroupSubset, k: usize) -> bool {
        let spec = a.spec();
        let ord = spec.order();
        let total = (ord as u64).pow(2 * k as u32);
        (0..total).any(|code| {
            let mut c = code;
            let mut v = vec![0usize; 2 * k];
            for e in v.iter_mut() {
                *e = (c % ord as u64) as usize;
                c /= ord as u64;
            }
            let w = Witness::new(WitnessKind::Op, k, spec, vec![("a", v[..k].to_vec()), ("b", v[k..].to_vec())]);
            w.revalidate(a).is_ok()
        })
    }

    #[test]
    fn searches_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let spec = GroupSpec::new(3, 2).unwrap();
        for round in 0..12 {
            let density = [0.3, 0.5, 0.7][round % 3];
            let a = (0..9).fold(GroupSubset::empty(&spec), |mut s, i| {
                if rng.gen_bool(density) {
                    s.insert(i);
                }
                s
            });
            assert_eq!(find_hop2(&a, 2, &b()).unwrap().witness().is_some(), naive_hop2_exists(&a, 2));
            for k in 2..=3 {
                assert_eq!(find_op(&a, k, &b()).unwrap().witness().is_some(), naive_op_exists(&a, k));
            }
        }
    }
}
