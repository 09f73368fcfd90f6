//! Atomicity of partitions, with and without linear error.

use serde::Serialize;

use crate::error::{invalid, shape, Result};
use crate::factors::{atom_codes, partition_refines, Factor, QuadraticFactor};
use crate::fp::GroupSubset;
use crate::uniformity::LabelClass;

/// Whether `hits / size` lies in `[0, eps) U (1 - eps, 1]`.
///
/// At `eps = 0` only densities exactly 0 or 1 count, so that "0-atomic"
/// means every part lies inside or outside the set.
pub fn part_class(hits: u64, size: u64, eps: f64) -> LabelClass {
    if size == 0 {
        return LabelClass::Error;
    }
    let d = hits as f64 / size as f64;
    if hits == size || d > 1.0 - eps {
        LabelClass::NearOne
    } else if hits == 0 || d < eps {
        LabelClass::NearZero
    } else {
        LabelClass::Error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicityVerdict {
    pub eps: f64,
    pub delta: f64,
    /// Part ids in first-appearance order, with sizes, hits and classes.
    pub part_ids: Vec<usize>,
    pub sizes: Vec<u64>,
    pub hits: Vec<u64>,
    pub classes: Vec<LabelClass>,
    pub error_parts: usize,
    /// Elements lying in error parts, and their share of the group.
    pub error_mass: u64,
    pub error_fraction: f64,
    /// No error parts at all.
    pub atomic: bool,
    /// Error parts cover at most `delta |G|`.
    pub almost_atomic: bool,
}

impl AtomicityVerdict {
    pub fn parts(&self) -> usize {
        self.part_ids.len()
    }

    pub fn class_of(&self, id: usize) -> Option<LabelClass> {
        self.part_ids.iter().position(|&x| x == id).map(|i| self.classes[i])
    }
}

/// Classify every part of `partition` (a part id per element) by the density of `set` on it.
pub fn atomicity_check(partition: &[usize], set: &GroupSubset, eps: f64, delta: f64) -> Result<AtomicityVerdict> {
    if partition.len() != set.spec().order() {
        return Err(shape(format!("partition of length {} on a group of order {}", partition.len(), set.spec().order())));
    }
    if !(0.0..=1.0).contains(&eps) || !(0.0..=1.0).contains(&delta) {
        return Err(invalid("eps and delta must lie in [0, 1]"));
    }
    let mut slot = std::collections::HashMap::new();
    let (mut part_ids, mut sizes, mut hits) = (Vec::new(), Vec::new(), Vec::new());
    for (x, &id) in partition.iter().enumerate() {
        let s = *slot.entry(id).or_insert_with(|| {
            part_ids.push(id);
            sizes.push(0u64);
            hits.push(0u64);
            part_ids.len() - 1
        });
        sizes[s] += 1;
        hits[s] += set.contains(x) as u64;
    }
    let classes: Vec<LabelClass> = sizes.iter().zip(&hits).map(|(&s, &h)| part_class(h, s, eps)).collect();
    let error_mass: u64 = classes.iter().zip(&sizes).filter(|(c, _)| **c == LabelClass::Error).map(|(_, s)| s).sum();
    let order = partition.len() as f64;
    let error_parts = classes.iter().filter(|&&c| c == LabelClass::Error).count();
    Ok(AtomicityVerdict {
        eps,
        delta,
        part_ids,
        sizes,
        hits,
        classes,
        error_parts,
        error_mass,
        error_fraction: error_mass as f64 / order,
        atomic: error_parts == 0,
        almost_atomic: error_mass as f64 <= delta * order + 1e-9,
    })
}

/// Atomicity of the atoms of a factor.
pub fn factor_atomicity<F: Factor + ?Sized>(b: &F, set: &GroupSubset, eps: f64, delta: f64) -> Result<AtomicityVerdict> {
    atomicity_check(&atom_codes(set.spec(), b)?, set, eps, delta)
}

/// Linear-error atomicity of a quadratic factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AqaleVerdict {
    pub eps: f64,
    pub delta: f64,
    pub ell: usize,
    pub q: usize,
    /// Linear labels (codes in `F_p^ell`) with some non-`eps`-atomic `L cap Q`.
    pub bad_linear: Vec<usize>,
    /// `delta p^ell`.
    pub bound: f64,
    /// Per linear label: the largest `min(d, 1 - d)` over its nonempty `L cap Q`;
    /// `None` for empty linear atoms.
    pub most_balanced: Vec<Option<f64>>,
    pub pass: bool,
}

impl AqaleVerdict {
    /// Every nonempty linear atom has an intersection with density in `(t, 1 - t)`.
    pub fn every_linear_atom_has_density_strictly_within(&self, t: f64) -> bool {
        self.most_balanced.iter().flatten().all(|&m| m > t)
    }
}

/// Whether at most `delta p^ell` linear atoms hold all non-`eps`-atomic intersections `L cap Q`.
pub fn aqale_check(b: &QuadraticFactor, set: &GroupSubset, eps: f64, delta: f64) -> Result<AqaleVerdict> {
    let codes = atom_codes(set.spec(), b)?;
    let (ell, q) = (b.ell(), b.q());
    let lin = (b.p() as usize).pow(ell as u32);
    let mut sizes = vec![0u64; b.num_labels()];
    let mut hits = vec![0u64; b.num_labels()];
    for (x, &c) in codes.iter().enumerate() {
        sizes[c] += 1;
        hits[c] += set.contains(x) as u64;
    }
    let mut bad = vec![false; lin];
    let mut most_balanced: Vec<Option<f64>> = vec![None; lin];
    for c in 0..b.num_labels() {
        if sizes[c] == 0 {
            continue;
        }
        let l = c % lin;
        if part_class(hits[c], sizes[c], eps) == LabelClass::Error {
            bad[l] = true;
        }
        let d = hits[c] as f64 / sizes[c] as f64;
        let m = d.min(1.0 - d);
        most_balanced[l] = Some(most_balanced[l].map_or(m, |x| x.max(m)));
    }
    let bad_linear: Vec<usize> = (0..lin).filter(|&l| bad[l]).collect();
    let bound = delta * lin as f64;
    Ok(AqaleVerdict {
        eps,
        delta,
        ell,
        q,
        pass: bad_linear.len() as f64 <= bound + 1e-9,
        bad_linear,
        bound,
        most_balanced,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementCheck {
    pub coarse: AtomicityVerdict,
    /// The fine partition judged at `2 sqrt(eps)`.
    pub fine: AtomicityVerdict,
    /// Coarse almost `eps`-atomic implies fine almost `2 sqrt(eps)`-atomic.
    pub holds: bool,
}

/// Check the averaging bound: an almost `eps`-atomic partition into near-equal
/// parts, refined into near-equal subparts, is almost `2 sqrt(eps)`-atomic.
///
/// Preconditions (reported as errors): `fine` refines `coarse`, `mu < eps / 2`,
/// every coarse part splits into the same number `s` of fine parts, coarse
/// sizes differ by at most `mu |X| / t` and fine sizes by at most `mu |X| / (t s)`.
pub fn refinement_stability_check(coarse: &[usize], fine: &[usize], set: &GroupSubset, eps: f64, mu: f64) -> Result<RefinementCheck> {
    if !partition_refines(fine, coarse) {
        return Err(invalid("the fine partition does not refine the coarse one"));
    }
    if mu >= eps / 2.0 {
        return Err(invalid("the size slack mu must be below eps / 2"));
    }
    let c = atomicity_check(coarse, set, eps, eps)?;
    let eps2 = (2.0 * eps.sqrt()).min(1.0);
    let f = atomicity_check(fine, set, eps2, eps2)?;
    let order = coarse.len() as f64;
    let t = c.parts() as f64;
    let spread = |s: &[u64]| s.iter().max().copied().unwrap_or(0) - s.iter().min().copied().unwrap_or(0);
    if spread(&c.sizes) as f64 > mu * order / t + 1e-9 {
        return Err(invalid("coarse part sizes are not within mu |X| / t of each other"));
    }
    let mut per_coarse: std::collections::HashMap<usize, Vec<u64>> = std::collections::HashMap::new();
    let mut seen = std::collections::HashSet::new();
    for (x, &id) in fine.iter().enumerate() {
        if seen.insert(id) {
            let i = f.part_ids.iter().position(|&y| y == id).unwrap();
            per_coarse.entry(coarse[x]).or_default().push(f.sizes[i]);
        }
    }
    let s = per_coarse.values().next().map_or(0, Vec::len);
    if per_coarse.values().any(|v| v.len() != s) {
        return Err(invalid("coarse parts split into different numbers of fine parts"));
    }
    if per_coarse.values().any(|v| spread(v) as f64 > mu * order / (t * s as f64) + 1e-9) {
        return Err(invalid("fine part sizes are not within mu |X| / (t s) of each other"));
    }
    let holds = !c.almost_atomic || f.almost_atomic;
    Ok(RefinementCheck { coarse: c, fine: f, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gs, qgs, trace_factor, union_of_atoms};
    use crate::factors::{AtomLabel, LinearFactor};
    use crate::fp::GroupSpec;

    fn linear_partition(spec: &GroupSpec, l: &LinearFactor) -> Vec<usize> {
        atom_codes(spec, &QuadraticFactor::new(l.clone(), vec![]).unwrap()).unwrap()
    }

    #[test]
    fn union_of_atoms_is_zero_atomic() {
        let spec = GroupSpec::new(3, 4).unwrap();
        let b = trace_factor(4, 3, 1, 1).unwrap();
        let a = union_of_atoms(&spec, &b, &[AtomLabel::new(vec![0], vec![1]), AtomLabel::new(vec![2], vec![0])]).unwrap();
        let v = factor_atomicity(&b, &a, 0.0, 0.0).unwrap();
        assert!(v.atomic && v.almost_atomic);
    }

    #[test]
    fn gs_zero_coset_is_never_atomic() {
        for n in 2..=6 {
            let a = gs(n, 3).unwrap();
            let spec = a.spec().clone();
            for k in 1..=2.min(n - 1) {
                let l = LinearFactor::standard(3, n, k);
                let part = linear_partition(&spec, &l);
                let v = atomicity_check(&part, &a, 1.0 / 3.0 - 1e-9, 0.0).unwrap();
                assert_eq!(v.class_of(0), Some(LabelClass::Error), "n = {n}, k = {k}");
                let d = v.hits[0] as f64 / v.sizes[0] as f64;
                assert!((1.0 / 3.0..=2.0 / 3.0).contains(&d));
            }
        }
    }

    #[test]
    fn qgs_defeats_linear_error() {
        let (a, _) = qgs(4, 3).unwrap();
        let b = trace_factor(4, 3, 1, 1).unwrap();
        let v = aqale_check(&b, &a, 1.0 / 6.0, 0.0).unwrap();
        assert!(!v.pass);
        assert_eq!(v.bad_linear.len(), 3);
    }

    #[test]
    fn refinement_of_zero_atomic_is_zero_atomic() {
        let spec = GroupSpec::new(3, 4).unwrap();
        let coarse = linear_partition(&spec, &LinearFactor::standard(3, 4, 1));
        let fine = linear_partition(&spec, &LinearFactor::standard(3, 4, 2));
        let a = GroupSubset::from_fn(&spec, |x| spec.coords(x)[0] == 1);
        let r = refinement_stability_check(&coarse, &fine, &a, 0.01, 0.0).unwrap();
        assert!(r.coarse.atomic && r.fine.atomic && r.holds);
        let same = refinement_stability_check(&coarse, &coarse, &a, 0.01, 0.0).unwrap();
        assert_eq!(same.coarse.classes, same.fine.classes);
    }

    #[test]
    fn gs_refinement_chain_holds() {
        let spec = GroupSpec::new(3, 6).unwrap();
        let a = gs(6, 3).unwrap();
        let coarse = linear_partition(&spec, &LinearFactor::standard(3, 6, 1));
        let fine = linear_partition(&spec, &LinearFactor::standard(3, 6, 2));
        for eps in [0.05, 0.2, 0.34, 0.4] {
            let r = refinement_stability_check(&coarse, &fine, &a, eps, 0.0).unwrap();
            assert!(r.holds, "eps = {eps}");
        }
        assert!(refinement_stability_check(&fine, &coarse, &a, 0.1, 0.0).is_err());
    }
}
