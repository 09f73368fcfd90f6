//! Maps between witnesses of different patterns.
//!
//! Each map only rearranges (and sums) elements of the input witness; the
//! caller revalidates the output against the target set.

use super::{fop2_code, fop2_function, Witness, WitnessKind};
use crate::error::{invalid, Result};
use crate::fp::GroupSpec;

fn expect(w: &Witness, kind: WitnessKind, min_k: usize) -> Result<GroupSpec> {
    if w.kind != kind {
        return Err(invalid(format!("expected a {kind:?} witness, got {:?}", w.kind)));
    }
    if w.k < min_k {
        return Err(invalid(format!("{kind:?} witness needs k >= {min_k}")));
    }
    GroupSpec::new(w.p, w.n)
}

/// A witness for `x'_u + y_v + z_w in A` iff `u + v + w >= k + 2` becomes a
/// `u < v + w` witness by reversing the `x` indices.
pub fn hop2_from_reindexed(x_rev: &[usize], y: &[usize], z: &[usize], spec: &GroupSpec) -> Result<Witness> {
    let k = x_rev.len();
    if y.len() != k || z.len() != k || k == 0 {
        return Err(invalid("reindexed HOP2 roles must have equal positive length"));
    }
    let x: Vec<usize> = x_rev.iter().rev().copied().collect();
    Ok(Witness::new(WitnessKind::Hop2, k, spec, vec![("x", x), ("y", y.to_vec()), ("z", z.to_vec())]))
}

/// From an `l`-HOP2 witness for `A`, a `floor(l/2)`-HOP2 witness for the complement.
///
/// With `h = floor(l/2)`, `x_{h+i} + y_{h-j+1} + z_k` lies outside `A`
/// exactly when `k < i + j`, so `(z_k, x_{h+i}, y_{h-j+1})` plays `(x, y, z)`.
pub fn hop2_complement(w: &Witness) -> Result<Witness> {
    let spec = expect(w, WitnessKind::Hop2, 2)?;
    let h = w.k / 2;
    let (x, y, z) = (w.role("x"), w.role("y"), w.role("z"));
    let nx: Vec<usize> = (0..h).map(|k| z[k]).collect();
    let ny: Vec<usize> = (1..=h).map(|i| x[h + i - 1]).collect();
    let nz: Vec<usize> = (1..=h).map(|j| y[h - j]).collect();
    Ok(Witness::new(WitnessKind::Hop2, h, &spec, vec![("x", nx), ("y", ny), ("z", nz)]))
}

/// From an `l`-HOP2 witness, an `l`-OP witness for the same set:
/// `a_i = x_l + y_{l-i+1}` and `b_j = z_j`.
pub fn hop2_to_op(w: &Witness) -> Result<Witness> {
    let spec = expect(w, WitnessKind::Hop2, 1)?;
    let l = w.k;
    let (x, y, z) = (w.role("x"), w.role("y"), w.role("z"));
    let a: Vec<usize> = (1..=l).map(|i| spec.add(x[l - 1], y[l - i])).collect();
    Ok(Witness::new(WitnessKind::Op, l, &spec, vec![("a", a), ("b", z.to_vec())]))
}

/// From an `l`-FOP2 witness for `A`, an `(l-1)`-FOP2 witness for the complement.
///
/// Uses `u_s = z_{l-s+1}`, `v_i = x_i` and `w^f_j = y^g_j` with
/// `g = l - f` on `[l-1]^2` and `g = 1` elsewhere.
pub fn fop2_complement(w: &Witness) -> Result<Witness> {
    let spec = expect(w, WitnessKind::Fop2, 2)?;
    let l = w.k;
    let m = l - 1;
    let (x, y, z) = (w.role("x"), w.role("y"), w.role("z"));
    let nx = x[..m].to_vec();
    let nz: Vec<usize> = (1..=m).map(|s| z[l - s]).collect();
    let mut ny = Vec::with_capacity(m.pow((m * m) as u32) * m);
    for f in 0..m.pow((m * m) as u32) {
        let fv = fop2_function(f, m);
        let mut g = vec![1usize; l * l];
        for i in 0..m {
            for j in 0..m {
                g[i * l + j] = l - fv[i * m + j];
            }
        }
        let gc = fop2_code(&g, l);
        for j in 0..m {
            ny.push(y[gc * l + j]);
        }
    }
    Ok(Witness::new(WitnessKind::Fop2, m, &spec, vec![("x", nx), ("y", ny), ("z", nz)]))
}

/// From an `l`-FOP2 witness (`l >= 2`), a shattered set of size `l`.
///
/// Points are `x_i + z_2`; the translate for `S` is `y^{f_S}_2` where
/// `f_S(i, 2) = 2` for `i` in `S` and `f_S = 1` everywhere else.
pub fn fop2_to_shattering(w: &Witness) -> Result<Witness> {
    let spec = expect(w, WitnessKind::Fop2, 2)?;
    let l = w.k;
    let (x, y, z) = (w.role("x"), w.role("y"), w.role("z"));
    let points: Vec<usize> = (0..l).map(|i| spec.add(x[i], z[1])).collect();
    let translates: Vec<usize> = (0..1usize << l)
        .map(|mask| {
            let mut f = vec![1usize; l * l];
            for i in 0..l {
                if mask >> i & 1 == 1 {
                    f[i * l + 1] = 2;
                }
            }
            y[fop2_code(&f, l) * l + 1]
        })
        .collect();
    Ok(Witness::new(WitnessKind::Vc, l, &spec, vec![("points", points), ("translates", translates)]))
}

/// From a VC2 witness of size `l`, an `l`-FOP2 witness:
/// `x_i = c_i`, `z_s = b_s` and `y^f_j = a_U` with `U = {(u, v) : u <= f(v, j)}`.
pub fn vc2_to_fop2(w: &Witness) -> Result<Witness> {
    let spec = expect(w, WitnessKind::Vc2, 1)?;
    let l = w.k;
    let (a, b, c) = (w.role("a"), w.role("b"), w.role("c"));
    let nf = l.pow((l * l) as u32);
    let mut ny = Vec::with_capacity(nf * l);
    for f in 0..nf {
        let fv = fop2_function(f, l);
        for j in 0..l {
            let mut mask = 0usize;
            for u in 0..l {
                for v in 0..l {
                    if u < fv[v * l + j] {
                        mask |= 1 << (u * l + v);
                    }
                }
            }
            ny.push(a[mask]);
        }
    }
    Ok(Witness::new(WitnessKind::Fop2, l, &spec, vec![("x", c.to_vec()), ("y", ny), ("z", b.to_vec())]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::gs;
    use crate::detectors::{find_hop2, SearchBudget};
    use crate::fp::GroupSubset;

    #[test]
    fn gs_hop2_transforms() {
        let a = gs(4, 3).unwrap();
        let w = find_hop2(&a, 3, &SearchBudget::default()).unwrap().witness().unwrap().clone();
        hop2_to_op(&w).unwrap().revalidate(&a).unwrap();
        hop2_complement(&w).unwrap().revalidate(&a.complement()).unwrap();
        let rev: Vec<usize> = w.role("x").iter().rev().copied().collect();
        let back = hop2_from_reindexed(&rev, w.role("y"), w.role("z"), a.spec()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn planted_vc2_gives_fop2() {
        // b_i = e_i, c_j = e_{2+j}, a_S encodes S in coordinates 5..8, and
        // A collects exactly the sums a_S + b_i + c_j with (i, j) in S.
        let spec = GroupSpec::new(3, 8).unwrap();
        let b = [spec.basis(0), spec.basis(1)];
        let c = [spec.basis(2), spec.basis(3)];
        let mut a_of = Vec::new();
        let mut set = GroupSubset::empty(&spec);
        for mask in 0..16usize {
            let coords: Vec<u32> = (0..8).map(|t| if t >= 4 { (mask >> (t - 4) & 1) as u32 } else { 0 }).collect();
            let a = spec.index(&coords);
            a_of.push(a);
            for i in 0..2 {
                for j in 0..2 {
                    if mask >> (i * 2 + j) & 1 == 1 {
                        set.insert(spec.add(spec.add(a, b[i]), c[j]));
                    }
                }
            }
        }
        let w = Witness::new(WitnessKind::Vc2, 2, &spec, vec![("a", a_of), ("b", b.to_vec()), ("c", c.to_vec())]);
        w.revalidate(&set).unwrap();
        let f = vc2_to_fop2(&w).unwrap();
        f.revalidate(&set).unwrap();
        fop2_to_shattering(&f).unwrap().revalidate(&set).unwrap();
        fop2_complement(&f).unwrap().revalidate(&set.complement()).unwrap();
    }
}
