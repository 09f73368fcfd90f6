//! The reduced pair of a set and a factor: which atom labels are nearly
//! full, nearly empty, or neither.

use serde::Serialize;

use crate::detectors::{find_good_copy, CopyPattern, SearchBudget, SearchOutcome};
use crate::error::{invalid, Result};
use crate::factors::{atom_codes, Factor};
use crate::fp::{GroupSpec, GroupSubset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LabelClass {
    /// Density at least `1 - eps`.
    NearOne,
    /// Density at most `eps`.
    NearZero,
    /// Anything else, including empty atoms.
    Error,
}

/// Classification of every label of the factor, indexed by label code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedPair {
    pub p: u32,
    pub ell: usize,
    pub q: usize,
    pub eps: f64,
    pub classes: Vec<LabelClass>,
    pub sizes: Vec<u64>,
    pub hits: Vec<u64>,
}

/// Classify every atom of `b` by the density of `set` on it.
///
/// Empty atoms have no density and are put with the error labels, so no
/// good copy can route a sum through them.
pub fn reduced_pair<F: Factor + ?Sized>(set: &GroupSubset, b: &F, eps: f64) -> Result<ReducedPair> {
    if !(0.0..0.5).contains(&eps) {
        return Err(invalid("the reduced pair needs 0 <= eps < 1/2 so the classes are disjoint"));
    }
    let codes = atom_codes(set.spec(), b)?;
    let mut sizes = vec![0u64; b.num_labels()];
    let mut hits = vec![0u64; b.num_labels()];
    for (x, &c) in codes.iter().enumerate() {
        sizes[c] += 1;
        hits[c] += set.contains(x) as u64;
    }
    // slack keeps exact boundary densities such as 1/3 at eps = 1/3 on the right side
    let tol = 1e-12;
    let classes = sizes
        .iter()
        .zip(&hits)
        .map(|(&s, &h)| {
            if s == 0 {
                LabelClass::Error
            } else {
                let d = h as f64 / s as f64;
                if d >= 1.0 - eps - tol {
                    LabelClass::NearOne
                } else if d <= eps + tol {
                    LabelClass::NearZero
                } else {
                    LabelClass::Error
                }
            }
        })
        .collect();
    Ok(ReducedPair { p: b.p(), ell: b.ell(), q: b.q(), eps, classes, sizes, hits })
}

impl ReducedPair {
    /// The label space `F_p^(ell + q)`, indexed by label code.
    pub fn label_spec(&self) -> Result<GroupSpec> {
        GroupSpec::new(self.p, self.ell + self.q)
    }

    fn class_set(&self, class: LabelClass) -> Result<GroupSubset> {
        let spec = self.label_spec()?;
        Ok(GroupSubset::from_fn(&spec, |c| self.classes[c] == class))
    }

    pub fn near_one(&self) -> Result<GroupSubset> {
        self.class_set(LabelClass::NearOne)
    }

    pub fn near_zero(&self) -> Result<GroupSubset> {
        self.class_set(LabelClass::NearZero)
    }

    pub fn error(&self) -> Result<GroupSubset> {
        self.class_set(LabelClass::Error)
    }

    /// Labels whose linear part is zero.
    pub fn h_b(&self) -> Result<GroupSubset> {
        let spec = self.label_spec()?;
        let lin = (self.p as usize).pow(self.ell as u32);
        Ok(GroupSubset::from_fn(&spec, |c| c % lin == 0))
    }

    pub fn error_labels(&self) -> usize {
        self.classes.iter().filter(|&&c| c == LabelClass::Error).count()
    }

    /// Fraction of group elements lying in error atoms.
    pub fn error_mass(&self) -> f64 {
        let total: u64 = self.sizes.iter().sum();
        let err: u64 = self.classes.iter().zip(&self.sizes).filter(|(c, _)| **c == LabelClass::Error).map(|(_, s)| s).sum();
        err as f64 / total.max(1) as f64
    }

    /// Search for a good copy of `pattern`, optionally with its right side in `H_B`.
    pub fn good_copy(&self, pattern: CopyPattern, right_in_hb: bool, budget: &SearchBudget) -> Result<SearchOutcome> {
        let side = if right_in_hb { Some(self.h_b()?) } else { None };
        find_good_copy(&self.near_one()?, &self.near_zero()?, pattern, side.as_ref(), budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gs, qgs, trace_sym_space, union_of_atoms};
    use crate::detectors::{revalidate_good_copy, Witness, WitnessKind};
    use crate::factors::{AtomLabel, LinearFactor, QuadraticFactor};

    #[test]
    fn union_of_atoms_has_no_error() {
        let b = crate::constructions::trace_factor(4, 3, 1, 1).unwrap();
        let spec = GroupSpec::new(3, 4).unwrap();
        let labels = [AtomLabel::new(vec![1], vec![0]), AtomLabel::new(vec![2], vec![2])];
        let a = union_of_atoms(&spec, &b, &labels).unwrap();
        for eps in [0.0, 0.01, 0.3] {
            let r = reduced_pair(&a, &b, eps).unwrap();
            assert_eq!(r.error_labels(), 0);
        }
    }

    #[test]
    fn qgs_atoms_are_trivial_off_zero() {
        let n = 4;
        let (a, _) = qgs(n, 3).unwrap();
        let mats = trace_sym_space(n, 3).unwrap();
        for d in 1..n {
            let b = QuadraticFactor::purely_quadratic(3, n, mats[..d].to_vec()).unwrap();
            let r = reduced_pair(&a, &b, 0.0).unwrap();
            for (c, &class) in r.classes.iter().enumerate() {
                if c != 0 && r.sizes[c] > 0 {
                    assert_ne!(class, LabelClass::Error, "label {c} with D = {d}");
                }
            }
        }
    }

    #[test]
    fn gs_zero_atom_is_error_for_linear_factors() {
        for n in 3..=5 {
            let a = gs(n, 3).unwrap();
            for k in 1..n {
                let b = QuadraticFactor::new(LinearFactor::standard(3, n, k), vec![]).unwrap();
                let r = reduced_pair(&a, &b, 0.33).unwrap();
                assert_eq!(r.classes[0], LabelClass::Error);
            }
        }
    }

    #[test]
    fn qgs_good_copy_with_right_side_in_hb() {
        // labels a_i = e_i + e_{i+1}, b_j = (p-1) e_j in the quadratic coordinates
        let n = 6;
        let (a, _) = qgs(n, 3).unwrap();
        let mats = trace_sym_space(n, 3).unwrap();
        let b = QuadraticFactor::purely_quadratic(3, n, mats[..4].to_vec()).unwrap();
        let r = reduced_pair(&a, &b, 0.0).unwrap();
        let ls = r.label_spec().unwrap();
        let left: Vec<usize> = (0..3).map(|i| ls.add(ls.basis(i), ls.basis(i + 1))).collect();
        let right: Vec<usize> = (0..3).map(|j| ls.scale(2, ls.basis(j))).collect();
        let w = Witness::new(WitnessKind::GoodCopy, 3, &ls, vec![("a", left), ("b", right)]);
        revalidate_good_copy(&w, &r.near_one().unwrap(), &r.near_zero().unwrap(), Some(&r.h_b().unwrap())).unwrap();
        let found = r.good_copy(CopyPattern::Half(3), true, &SearchBudget::default()).unwrap();
        assert!(found.witness().is_some());
    }
}
