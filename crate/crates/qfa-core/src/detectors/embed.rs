//! Affine embeddings between pairs `(F_p^m, A')` and `(F_p^n, A)`.

use serde::{Deserialize, Serialize};

use super::{Meter, SearchBudget};
use crate::error::{invalid, QfaError, Result};
use crate::fp::{GroupSpec, GroupSubset};

/// `x -> offset + sum_i x_i * columns[i]`, with independent columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    pub offset: usize,
    pub columns: Vec<usize>,
}

impl AffineMap {
    pub fn apply(&self, target: &GroupSpec, x: &[u32]) -> usize {
        x.iter().zip(&self.columns).fold(self.offset, |acc, (&xi, &c)| target.add(acc, target.scale(xi, c)))
    }

    /// Whether the map is injective and `x in A'` iff `f(x) in A`.
    pub fn is_embedding(&self, small: &GroupSubset, large: &GroupSubset) -> bool {
        let (hs, gs) = (small.spec(), large.spec());
        if self.columns.len() != hs.n() {
            return false;
        }
        let mut seen = GroupSubset::empty(gs);
        for x in 0..hs.order() {
            let y = self.apply(gs, &hs.coords(x));
            if seen.contains(y) || small.contains(x) != large.contains(y) {
                return false;
            }
            seen.insert(y);
        }
        true
    }
}

/// Exhaustive search over the offset and injective linear parts.
///
/// Columns are added one at a time; after each addition every point of
/// the span built so far is checked, so bad prefixes die early.
pub fn affine_embedding_exists(
    small: &GroupSubset,
    large: &GroupSubset,
    budget: &SearchBudget,
) -> Result<Option<AffineMap>> {
    let (hs, gs) = (small.spec(), large.spec());
    if hs.p() != gs.p() {
        return Err(invalid("affine embeddings need a common prime"));
    }
    if hs.n() > gs.n() {
        return Ok(None);
    }
    if hs.order() > 729 {
        return Err(invalid("the embedded group must have order at most p^6 here"));
    }
    let meter = Meter::new(budget);
    let p = hs.p();
    // points of F_p^t with last coordinate nonzero, as coordinate vectors of length t
    fn new_points(p: u32, t: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let total = (p as usize).pow(t as u32 - 1);
        for last in 1..p {
            for c in 0..total {
                let mut v = Vec::with_capacity(t);
                let mut c = c;
                for _ in 0..t - 1 {
                    v.push((c % p as usize) as u32);
                    c /= p as usize;
                }
                v.push(last);
                out.push(v);
            }
        }
        out
    }
    let layers: Vec<Vec<Vec<u32>>> = (1..=hs.n()).map(|t| new_points(p, t)).collect();
    let embed = |x: &[u32]| {
        let mut full = x.to_vec();
        full.resize(hs.n(), 0);
        hs.index(&full)
    };
    fn dfs(
        gs: &GroupSpec,
        small: &GroupSubset,
        large: &GroupSubset,
        layers: &[Vec<Vec<u32>>],
        embed: &dyn Fn(&[u32]) -> usize,
        map: &mut AffineMap,
        image: &mut GroupSubset,
        meter: &Meter,
    ) -> Option<AffineMap> {
        let t = map.columns.len();
        if t == layers.len() {
            return Some(map.clone());
        }
        for c in 0..gs.order() {
            if !meter.tick() {
                return None;
            }
            map.columns.push(c);
            let mut added = Vec::new();
            let mut ok = true;
            for x in &layers[t] {
                let y = map.apply(gs, x);
                if image.contains(y) || small.contains(embed(x)) != large.contains(y) {
                    ok = false;
                    break;
                }
                image.insert(y);
                added.push(y);
            }
            if ok {
                if let Some(m) = dfs(gs, small, large, layers, embed, map, image, meter) {
                    return Some(m);
                }
            }
            for y in added {
                image.remove(y);
            }
            map.columns.pop();
        }
        None
    }
    for g in 0..gs.order() {
        if small.contains(0) != large.contains(g) {
            continue;
        }
        let mut map = AffineMap { offset: g, columns: vec![] };
        let mut image = GroupSubset::empty(gs);
        image.insert(g);
        if let Some(m) = dfs(gs, small, large, &layers, &embed, &mut map, &mut image, &meter) {
            return Ok(Some(m));
        }
        if meter.stopped() {
            return Err(QfaError::Budget(format!("affine embedding search stopped after {} nodes", meter.nodes())));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::gs;

    #[test]
    fn identity_and_line_cases() {
        let a = gs(2, 3).unwrap();
        let b = SearchBudget::default();
        let m = affine_embedding_exists(&a, &a, &b).unwrap().unwrap();
        assert!(m.is_embedding(&a, &a));

        let line = GroupSpec::new(3, 1).unwrap();
        let one = GroupSubset::from_indices(&line, [1]).unwrap();
        let m = affine_embedding_exists(&one, &a, &b).unwrap().unwrap();
        assert!(m.is_embedding(&one, &a));

        let full_line = GroupSubset::full(&line);
        let empty = GroupSubset::empty(a.spec());
        assert!(affine_embedding_exists(&full_line, &empty, &b).unwrap().is_none());
    }
}
