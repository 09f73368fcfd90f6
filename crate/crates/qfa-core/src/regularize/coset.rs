//! Uniform dense cosets and dense subspaces.

use serde::Serialize;

use crate::detectors::{count_tree_encodings, find_tree_encoding, SearchBudget, Witness};
use crate::error::{invalid, shape, Result};
use crate::factors::LinearFactor;
use crate::fp::{dft, ComplexValue, FpVector, GroupSpec, GroupSubset};
use crate::linalg;

/// A coset `shift + span(basis)` with an independent basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coset {
    pub p: u32,
    pub n: usize,
    pub basis: Vec<Vec<u32>>,
    pub shift: usize,
}

impl Coset {
    /// The subgroup cut out by `h` (its common kernel).
    pub fn subgroup(h: &LinearFactor) -> Self {
        Self { p: h.p, n: h.n, basis: linalg::kernel(&h.rows(), h.n, h.p), shift: 0 }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> usize {
        (self.p as usize).pow(self.dim() as u32)
    }

    /// `shift + sum_i c_i basis_i`, with `c` read little-endian from `code`.
    pub fn element(&self, spec: &GroupSpec, mut code: usize) -> usize {
        let p = self.p as usize;
        let mut v = spec.coords(self.shift);
        for b in &self.basis {
            let c = (code % p) as u32;
            code /= p;
            if c != 0 {
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = (*vi + c * bi) % self.p;
                }
            }
        }
        spec.index(&v)
    }

    pub fn members(&self, spec: &GroupSpec) -> Vec<usize> {
        (0..self.size()).map(|c| self.element(spec, c)).collect()
    }

    pub fn to_subset(&self, spec: &GroupSpec) -> Result<GroupSubset> {
        GroupSubset::from_indices(spec, self.members(spec))
    }

    /// Linear functionals whose common kernel is the underlying subgroup.
    pub fn annihilator(&self) -> Result<LinearFactor> {
        let rows = if self.basis.is_empty() {
            (0..self.n).map(|i| FpVector::basis(self.p, self.n, i).coords).collect()
        } else {
            linalg::kernel(&self.basis, self.n, self.p)
        };
        LinearFactor::new(self.p, self.n, rows.into_iter().map(|r| FpVector::new(self.p, r)).collect())
    }

    pub fn density(&self, set: &GroupSubset) -> f64 {
        let spec = set.spec();
        let hits = (0..self.size()).filter(|&c| set.contains(self.element(spec, c))).count();
        hits as f64 / self.size() as f64
    }
}

/// Largest nontrivial Fourier coefficient of the balanced function of `set`
/// localized to the coset, with its character in basis coordinates (least index on ties).
pub fn coset_uniformity(set: &GroupSubset, coset: &Coset) -> Result<(f64, Option<usize>)> {
    let spec = set.spec();
    if coset.dim() == 0 {
        return Ok((0.0, None));
    }
    let local = GroupSpec::new(coset.p, coset.dim())?;
    let vals: Vec<f64> = (0..coset.size()).map(|c| set.contains(coset.element(spec, c)) as u8 as f64).collect();
    let alpha = vals.iter().sum::<f64>() / vals.len() as f64;
    let f: Vec<ComplexValue> = vals.iter().map(|&v| ComplexValue::new(v - alpha, 0.0)).collect();
    let fhat = dft(&local, &f)?;
    let mut best = (0.0, None);
    for (t, z) in fhat.iter().enumerate().skip(1) {
        if z.norm() > best.0 + 1e-12 {
            best = (z.norm(), Some(t));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformCoset {
    pub coset: Coset,
    /// Codimension of the returned subgroup in the starting one.
    pub codim: usize,
    pub start_density: f64,
    pub density: f64,
    pub uniformity: f64,
    pub steps: usize,
}

impl UniformCoset {
    /// The three guarantees: codimension, density, uniformity.
    pub fn postconditions(&self, eps: f64) -> [bool; 3] {
        [self.codim <= (2.0 / eps).floor() as usize, self.density >= self.start_density - 1e-12, self.uniformity <= eps + 1e-12]
    }
}

/// A coset `H' + y` of a subgroup `H' <= H` (with `y in H`) on which `set` is
/// `eps`-uniform and at least as dense as on `H`.
///
/// Each step takes the largest localized coefficient, cuts the current
/// subgroup by its kernel and moves to the densest of the `p` sub-cosets.
/// Every step raises the density by more than `eps / 2`, so at most
/// `floor(2 / eps)` steps are taken.
pub fn find_uniform_dense_coset(set: &GroupSubset, h: &LinearFactor, eps: f64) -> Result<UniformCoset> {
    let spec = set.spec();
    if h.p != spec.p() || h.n != spec.n() {
        return Err(shape("subgroup and set live in different groups"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid("eps must lie in (0, 1]"));
    }
    let p = spec.p();
    let mut cur = Coset::subgroup(h);
    let start_dim = cur.dim();
    let start_density = cur.density(set);
    let mut density = start_density;
    let mut steps = 0;
    loop {
        let (u, t) = coset_uniformity(set, &cur)?;
        if u <= eps + 1e-12 {
            return Ok(UniformCoset { codim: start_dim - cur.dim(), coset: cur, start_density, density, uniformity: u, steps });
        }
        let t = t.expect("a nonzero coefficient has a character");
        if steps >= (2.0 / eps).floor() as usize {
            return Err(invalid("uniform-coset refinement exceeded floor(2 / eps) steps"));
        }
        let s = GroupSpec::new(p, cur.dim())?.coords(t);
        // new basis: kernel of c -> s . c inside the current basis coordinates
        let ker = linalg::kernel(&[s.clone()], cur.dim(), p);
        let to_ambient = |c: &[u32]| -> Vec<u32> {
            let mut v = vec![0u32; spec.n()];
            for (ci, b) in c.iter().zip(&cur.basis) {
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = (*vi + ci * bi) % p;
                }
            }
            v
        };
        let basis: Vec<Vec<u32>> = ker.iter().map(|c| to_ambient(c)).collect();
        let pivot = s.iter().position(|&x| x != 0).unwrap();
        let mut step = vec![0u32; cur.dim()];
        step[pivot] = linalg::inv_mod(s[pivot], p);
        let step = spec.index(&to_ambient(&step));
        let mut best: Option<(f64, Coset)> = None;
        let mut shift = cur.shift;
        for _ in 0..p {
            let c = Coset { p, n: spec.n(), basis: basis.clone(), shift };
            let d = c.density(set);
            if best.as_ref().is_none_or(|(bd, _)| d > *bd + 1e-12) {
                best = Some((d, c));
            }
            shift = spec.add(shift, step);
        }
        let (d, c) = best.unwrap();
        density = d;
        cur = c;
        steps += 1;
    }
}

/// Evidence that no dense subspace was found: counted tree encodings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodingEvidence {
    pub depth: usize,
    pub witness: Witness,
    /// Encodings with leaves in the uniform subgroup and nodes in its coset.
    pub count: u128,
    /// `count / |H|^(2^(d+1) - 1)`.
    pub normalized: f64,
    pub uniform: UniformCoset,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DenseSubspace {
    Found { coset: Coset, codim: usize, density: f64 },
    Evidence(Box<EncodingEvidence>),
}

/// A translate `H' + y` of a subgroup of `H` on which `set` has density at
/// least `1 - eps`, or counted encodings of `T(depth)` inside `H`.
///
/// The uniform coset is taken at uniformity `eps^2`. When it is not dense
/// enough, the evidence is searched with leaves in `H'` and nodes in `H' + y`,
/// then anywhere in `H`. If there are no encodings at all, the densest
/// single point of `set` in `H` is returned.
pub fn find_dense_subspace(set: &GroupSubset, h: &LinearFactor, eps: f64, depth: usize, budget: &SearchBudget) -> Result<DenseSubspace> {
    let spec = set.spec();
    let hsub = Coset::subgroup(h);
    let hset = hsub.to_subset(spec)?;
    let inside = set.intersection(&hset);
    if (inside.len() as f64) < eps * hset.len() as f64 {
        return Err(invalid("set is not eps-dense in the subgroup"));
    }
    let uniform = find_uniform_dense_coset(set, h, (eps * eps).max(1e-6))?;
    if uniform.density >= 1.0 - eps {
        return Ok(DenseSubspace::Found { codim: uniform.codim, density: uniform.density, coset: uniform.coset });
    }
    let sub = Coset { shift: 0, ..uniform.coset.clone() }.to_subset(spec)?;
    let cos = uniform.coset.to_subset(spec)?;
    let total_slots = (1u32 << (depth + 1)) - 1;
    for (leaves, nodes) in [(&sub, &cos), (&hset, &hset)] {
        if let Some(w) = find_tree_encoding(&inside, depth, leaves, nodes, budget)?.witness() {
            let count = count_tree_encodings(&inside, depth, leaves, nodes)?;
            return Ok(DenseSubspace::Evidence(Box::new(EncodingEvidence {
                depth,
                witness: w.clone(),
                count,
                normalized: count as f64 / (hset.len() as f64).powi(total_slots as i32),
                uniform,
            })));
        }
    }
    let y = inside.iter().next().ok_or_else(|| invalid("set misses the subgroup"))?;
    Ok(DenseSubspace::Found { coset: Coset { p: spec.p(), n: spec.n(), basis: vec![], shift: y }, codim: hsub.dim(), density: 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::gs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_set_needs_no_refinement() {
        let spec = GroupSpec::new(3, 4).unwrap();
        let r = find_uniform_dense_coset(&GroupSubset::full(&spec), &LinearFactor::empty(3, 4), 0.1).unwrap();
        assert_eq!((r.codim, r.coset.shift, r.steps), (0, 0, 0));
    }

    #[test]
    fn index_p_subgroup_is_found() {
        for n in 2..=8 {
            let spec = GroupSpec::new(3, n).unwrap();
            let a = GroupSubset::from_fn(&spec, |x| spec.coords(x)[n - 1] == 0);
            let r = find_uniform_dense_coset(&a, &LinearFactor::empty(3, n), 0.4).unwrap();
            assert!(r.postconditions(0.4).iter().all(|&b| b));
            assert!(r.density >= 1.0 / 3.0 && r.codim <= 5);
        }
    }

    #[test]
    fn random_half_set_is_usually_uniform() {
        let spec = GroupSpec::new(3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = GroupSubset::from_fn(&spec, |_| false);
        let a = GroupSubset::from_indices(&spec, (0..spec.order()).filter(|_| rng.gen_bool(0.5))).unwrap_or(a);
        let r = find_uniform_dense_coset(&a, &LinearFactor::empty(3, 8), 0.1).unwrap();
        assert_eq!(r.codim, 0);
        assert!(r.uniformity < 0.05);
    }

    #[test]
    fn random_inputs_meet_postconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = GroupSpec::new(3, 5).unwrap();
        for _ in 0..30 {
            let k = rng.gen_range(0..3);
            let h = LinearFactor::new(3, 5, (0..k).map(|_| FpVector::new(3, (0..5).map(|_| rng.gen_range(0..3)).collect())).collect()).unwrap();
            let dens = rng.gen_range(0.05..0.95);
            let a = GroupSubset::from_indices(&spec, (0..spec.order()).filter(|_| rng.gen_bool(dens))).unwrap();
            let eps = [0.2, 0.3, 0.5][rng.gen_range(0..3)];
            let r = find_uniform_dense_coset(&a, &h, eps).unwrap();
            assert!(r.postconditions(eps).iter().all(|&b| b));
            // the returned coset sits inside H
            let hs = Coset::subgroup(&h).to_subset(&spec).unwrap();
            assert!(r.coset.to_subset(&spec).unwrap().is_subset(&hs));
        }
    }

    #[test]
    fn annihilator_roundtrip() {
        let spec = GroupSpec::new(3, 4).unwrap();
        let h = LinearFactor::standard(3, 4, 2);
        let c = Coset::subgroup(&h);
        let back = Coset::subgroup(&c.annihilator().unwrap());
        assert_eq!(c.to_subset(&spec).unwrap(), back.to_subset(&spec).unwrap());
    }

    #[test]
    fn dense_subspace_cases() {
        let spec = GroupSpec::new(3, 4).unwrap();
        let full = GroupSubset::full(&spec);
        let h = LinearFactor::empty(3, 4);
        match find_dense_subspace(&full, &h, 0.2, 1, &SearchBudget::default()).unwrap() {
            DenseSubspace::Found { codim, density, .. } => assert_eq!((codim, density), (0, 1.0)),
            e => panic!("{e:?}"),
        }
        let coset = GroupSubset::from_fn(&spec, |x| spec.coords(x)[0] == 1);
        match find_dense_subspace(&coset, &h, 0.2, 1, &SearchBudget::default()).unwrap() {
            DenseSubspace::Found { codim, density, .. } => assert!(codim <= 25 && density >= 0.8),
            e => panic!("{e:?}"),
        }
        let g = gs(6, 3).unwrap();
        match find_dense_subspace(&g, &LinearFactor::empty(3, 6), 0.1, 1, &SearchBudget::default()).unwrap() {
            DenseSubspace::Found { density, .. } => assert!(density >= 0.9),
            DenseSubspace::Evidence(e) => {
                e.witness.revalidate(&g).unwrap();
                assert!(e.count >= 1);
            }
        }
    }
}
