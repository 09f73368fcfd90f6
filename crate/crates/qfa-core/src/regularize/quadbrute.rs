//! Exhaustive search for an atomic quadratic factor in small groups.

use std::collections::HashSet;

use super::atomicity::factor_atomicity;
use crate::error::{invalid, Result};
use crate::factors::{LinearFactor, QuadraticFactor};
use crate::fp::{FpSymMatrix, FpVector, GroupSubset};
use crate::linalg;

pub const BRUTE_MAX_N: usize = 3;
pub const BRUTE_MAX_Q: usize = 2;

/// Nonzero symmetric matrices whose first nonzero upper-triangle entry is 1.
fn projective_matrices(p: u32, n: usize) -> Vec<FpSymMatrix> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let total = (p as usize).pow(slots.len() as u32);
    (1..total)
        .filter_map(|code| {
            let mut c = code;
            let vals: Vec<u32> = (0..slots.len())
                .map(|_| {
                    let v = (c % p as usize) as u32;
                    c /= p as usize;
                    v
                })
                .collect();
            if vals.iter().find(|&&v| v != 0) != Some(&1) {
                return None;
            }
            let mut e = vec![0u32; n * n];
            for (&(i, j), &v) in slots.iter().zip(&vals) {
                e[i * n + j] = v;
                e[j * n + i] = v;
            }
            FpSymMatrix::new(p, n, e).ok()
        })
        .collect()
}

/// One spanning set per subspace of dimension `ell` of `F_p^n`, as row-reduced rows.
fn subspaces(p: u32, n: usize, ell: usize) -> Vec<Vec<Vec<u32>>> {
    let vecs: Vec<Vec<u32>> = (1..(p as usize).pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let v = (c % p as usize) as u32;
                    c /= p as usize;
                    v
                })
                .collect()
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    fn go(vecs: &[Vec<u32>], p: u32, n: usize, ell: usize, from: usize, cur: &mut Vec<Vec<u32>>, seen: &mut HashSet<Vec<Vec<u32>>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if cur.len() == ell {
            let e = linalg::echelon(cur, n, p);
            if seen.insert(e.rows.clone()) {
                out.push(e.rows);
            }
            return;
        }
        for i in from..vecs.len() {
            cur.push(vecs[i].clone());
            if linalg::rank(cur, n, p) == cur.len() {
                go(vecs, p, n, ell, i + 1, cur, seen, out);
            }
            cur.pop();
        }
    }
    go(&vecs, p, n, ell, 0, &mut Vec::new(), &mut seen, &mut out);
    out
}

/// An `eps`-atomic quadratic factor of least `ell + q`, with `q <= 2`.
///
/// Complexities are tried in increasing order of `ell + q`, then increasing
/// `q`; within one complexity, subspaces and matrix sets in enumeration order.
/// Matrices are taken up to scalar multiples, which leaves the atoms unchanged.
/// `None` means no factor with `ell + q <= max_complexity` works.
pub fn brute_quad_atomize(set: &GroupSubset, eps: f64, max_complexity: usize) -> Result<Option<QuadraticFactor>> {
    let spec = set.spec();
    let (p, n) = (spec.p(), spec.n());
    if n > BRUTE_MAX_N {
        return Err(invalid(format!("exhaustive quadratic search is limited to n <= {BRUTE_MAX_N}")));
    }
    let mats = projective_matrices(p, n);
    for c in 0..=max_complexity {
        for q in 0..=c.min(BRUTE_MAX_Q) {
            let ell = c - q;
            if ell > n {
                continue;
            }
            let linears = subspaces(p, n, ell);
            let mut sets: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..q {
                sets = sets
                    .into_iter()
                    .flat_map(|s| {
                        let from = s.last().map_or(0, |&x| x + 1);
                        (from..mats.len()).map(move |i| {
                            let mut t = s.clone();
                            t.push(i);
                            t
                        })
                    })
                    .collect();
            }
            for rows in &linears {
                let linear = LinearFactor::new(p, n, rows.iter().map(|r| FpVector::new(p, r.clone())).collect())?;
                for s in &sets {
                    let b = QuadraticFactor::new(linear.clone(), s.iter().map(|&i| mats[i].clone()).collect())?;
                    if factor_atomicity(&b, set, eps, 0.0)?.atomic {
                        return Ok(Some(b));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gs, standard_quadric};
    use crate::factors::{atom_codes, same_partition};
    use crate::fp::GroupSpec;

    #[test]
    fn enumeration_sizes() {
        assert_eq!(projective_matrices(3, 2).len(), 13);
        assert_eq!(subspaces(3, 3, 1).len(), 13);
        assert_eq!(subspaces(3, 3, 2).len(), 13);
        assert_eq!(subspaces(3, 3, 3).len(), 1);
    }

    #[test]
    fn empty_set_takes_the_trivial_factor() {
        let spec = GroupSpec::new(3, 3).unwrap();
        let b = brute_quad_atomize(&GroupSubset::empty(&spec), 0.0, 3).unwrap().unwrap();
        assert_eq!(b.complexity(), (0, 0));
    }

    #[test]
    fn quadric_is_its_own_atom() {
        let a = standard_quadric(3, 3, 0).unwrap();
        let b = brute_quad_atomize(&a, 0.0, 3).unwrap().unwrap();
        assert_eq!(b.complexity(), (0, 1));
        let spec = a.spec();
        let ident = QuadraticFactor::purely_quadratic(3, 3, vec![FpSymMatrix::identity(3, 3)]).unwrap();
        assert!(same_partition(&atom_codes(spec, &b).unwrap(), &atom_codes(spec, &ident).unwrap()));
    }

    #[test]
    fn gs3_needs_all_coordinates() {
        // quadratic phases are even and each line through 0 meets GS(3,3) once
        let a = gs(3, 3).unwrap();
        let b = brute_quad_atomize(&a, 0.1, 3).unwrap().unwrap();
        assert_eq!(b.complexity(), (3, 0));
        assert!(brute_quad_atomize(&a, 0.1, 2).unwrap().is_none());
    }
}
