//! Canonical example sets and matrix families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, shape, Result};
use crate::factors::{atom_codes, projective_tuples, AtomLabel, Factor, FactorRank, LinearFactor, QuadraticFactor};
use crate::fp::{quad_raw, FpSymMatrix, FpVector, GroupSpec, GroupSubset};
use crate::linalg;

/// Green-Sanders set: `x` is a member iff its first nonzero coordinate equals 1.
pub fn gs(n: usize, p: u32) -> Result<GroupSubset> {
    let spec = GroupSpec::new(p, n)?;
    Ok(gs_in(&spec))
}

pub fn gs_in(spec: &GroupSpec) -> GroupSubset {
    GroupSubset::from_fn(spec, |i| {
        let c = spec.coords(i);
        c.iter().find(|&&x| x != 0) == Some(&1)
    })
}

/// 1-based index of the first nonzero coordinate; `n` for the zero vector.
pub fn first_nonzero(x: &[u32]) -> usize {
    x.iter().position(|&c| c != 0).map(|i| i + 1).unwrap_or(x.len())
}

/// `(lambda, d)`: `lambda` is the length of the common prefix, `d = 1/(lambda+1)`.
pub fn gs_metric(x: &[u32], y: &[u32]) -> (usize, f64) {
    let lambda = x.iter().zip(y).take_while(|(a, b)| a == b).count();
    (lambda, 1.0 / (lambda as f64 + 1.0))
}

/// `alpha e_i - a` for 1-based `i`.
pub fn tau(i: usize, alpha: u32, a: &FpVector) -> FpVector {
    let mut v = a.neg();
    let p = a.p;
    v.coords[i - 1] = (v.coords[i - 1] + alpha) % p;
    v
}

fn poly_rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    // f monic, coefficients little-endian
    let mut r = a.to_vec();
    let d = f.len() - 1;
    while r.len() > d {
        let lead = r.pop().unwrap();
        if lead == 0 {
            continue;
        }
        let off = r.len() - d;
        for k in 0..d {
            r[off + k] = (r[off + k] + p - lead * f[k] % p) % p;
        }
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        let total = (p as usize).pow(d as u32);
        for code in 0..total {
            let mut g: Vec<u32> = crate::factors::decode(code, p, d);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree `n`
/// (coefficients of `t^0..t^{n-1}` compared as a base-`p` number, little-endian).
pub fn least_irreducible(n: usize, p: u32) -> Vec<u32> {
    let total = (p as usize).pow(n as u32);
    for code in 0..total {
        let mut f = crate::factors::decode(code, p, n);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// `Tr(t^k)` in `F_p[t]/(f)` for `k < count`.
fn power_traces(f: &[u32], p: u32, count: usize) -> Vec<u32> {
    let n = f.len() - 1;
    let mul_by_t = |v: &[u32]| -> Vec<u32> {
        let mut w = vec![0u32];
        w.extend_from_slice(v);
        poly_rem(&w, f, p)
    };
    let mut pow = vec![0u32; n];
    pow[0] = 1;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        // trace of multiplication by `pow`: sum over basis t^j of coefficient j of pow * t^j
        let mut basis = pow.clone();
        let mut tr = 0u32;
        for j in 0..n {
            tr = (tr + basis[j]) % p;
            basis = mul_by_t(&basis);
        }
        out.push(tr);
        pow = mul_by_t(&pow);
    }
    out
}

/// `n` symmetric matrices every nontrivial combination of which has rank `n`.
///
/// Identify `F_p^n` with `F_{p^n}` through the least irreducible polynomial and
/// take the trace forms `(x, y) -> Tr(t^k x y)` for `k < n`. The family is
/// validated exhaustively for `n <= 8` and on 2000 sampled combinations above.
pub fn trace_sym_space(n: usize, p: u32) -> Result<Vec<FpSymMatrix>> {
    let f = least_irreducible(n, p);
    let tr = power_traces(&f, p, 3 * n);
    let mats: Vec<FpSymMatrix> =
        (0..n).map(|k| FpSymMatrix::from_fn(p, n, |i, j| tr[k + i + j])).collect::<Result<_>>()?;
    let bad = |coeffs: &[u32]| FpSymMatrix::combination(p, n, &mats, coeffs).rank() != n;
    if n <= 8 {
        if projective_tuples(p, n).any(|c| bad(&c)) {
            return Err(invalid("trace construction produced a degenerate combination"));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7ACE);
        for _ in 0..2000 {
            let c: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
            if c.iter().any(|&x| x != 0) && bad(&c) {
                return Err(invalid("trace construction produced a degenerate combination"));
            }
        }
    }
    Ok(mats)
}

/// Linear part `e_1..e_ell`, quadratic part the first `q` trace matrices.
pub fn trace_factor(n: usize, p: u32, ell: usize, q: usize) -> Result<QuadraticFactor> {
    if ell > n || q > n {
        return Err(invalid("trace factor needs ell, q <= n"));
    }
    let mats = trace_sym_space(n, p)?;
    QuadraticFactor::new(LinearFactor::standard(p, n, ell), mats[..q].to_vec())
}

/// Quadratic Green-Sanders set and the factor generating it.
///
/// A member is an `x` whose first nonzero value among `x^T M_i x` equals 1.
pub fn qgs(n: usize, p: u32) -> Result<(GroupSubset, QuadraticFactor)> {
    let spec = GroupSpec::new(p, n)?;
    let mats = trace_sym_space(n, p)?;
    let set = GroupSubset::from_fn(&spec, |i| {
        let c = spec.coords(i);
        mats.iter().map(|m| quad_raw(m, &c)).find(|&v| v != 0) == Some(1)
    });
    Ok((set, QuadraticFactor::purely_quadratic(p, n, mats)?))
}

/// The `i`-th piece (1-based) of the quadratic Green-Sanders set.
pub fn qgs_piece(spec: &GroupSpec, mats: &[FpSymMatrix], i: usize) -> GroupSubset {
    GroupSubset::from_fn(spec, |x| {
        let c = spec.coords(x);
        mats[..i - 1].iter().all(|m| quad_raw(m, &c) == 0) && quad_raw(&mats[i - 1], &c) == 1
    })
}

/// `{x : x^T M x = c}`.
pub fn quadric(spec: &GroupSpec, m: &FpSymMatrix, c: u32) -> Result<GroupSubset> {
    if m.n() != spec.n() || m.p() != spec.p() {
        return Err(shape("quadric matrix does not match the group"));
    }
    let c = c % spec.p();
    Ok(GroupSubset::from_fn(spec, |i| quad_raw(m, &spec.coords(i)) == c))
}

pub fn standard_quadric(n: usize, p: u32, c: u32) -> Result<GroupSubset> {
    let spec = GroupSpec::new(p, n)?;
    quadric(&spec, &FpSymMatrix::identity(p, n), c)
}

/// `{e_i + e_j : 1 <= i <= n/2, n/2 + 1 <= j <= n/2 + i}`.
pub fn sparse_example(n: usize, p: u32) -> Result<GroupSubset> {
    if n % 2 != 0 {
        return Err(invalid("the sparse example needs even n"));
    }
    let spec = GroupSpec::new(p, n)?;
    let h = n / 2;
    let mut set = GroupSubset::empty(&spec);
    for i in 1..=h {
        for j in h + 1..=h + i {
            set.insert(spec.add(spec.basis(i - 1), spec.basis(j - 1)));
        }
    }
    Ok(set)
}

/// Union of the cosets `K + r` where `K` is the common kernel of `h`.
pub fn union_of_cosets(spec: &GroupSpec, h: &LinearFactor, reps: &[FpVector]) -> Result<GroupSubset> {
    let kernel = h.kernel(spec);
    let mut set = GroupSubset::empty(spec);
    for r in reps {
        let ri = spec.index_of(r)?;
        for &k in &kernel {
            set.insert(spec.add(k, ri));
        }
    }
    Ok(set)
}

pub fn union_of_atoms<F: Factor + ?Sized>(spec: &GroupSpec, b: &F, labels: &[AtomLabel]) -> Result<GroupSubset> {
    let p = b.p();
    let wanted: std::collections::HashSet<usize> = labels.iter().map(|l| l.code(p)).collect();
    let codes = atom_codes(spec, b)?;
    Ok(GroupSubset::from_fn(spec, |i| wanted.contains(&codes[i])))
}

/// Which of the case conditions of the two translate-intersection identities hold.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GsIntersection {
    /// 1-based first coordinate where `b` and `c` differ.
    pub m: usize,
    /// `c_m - b_m mod p`.
    pub delta: u32,
    /// Mixed intersection `(A-b) & (notA-c)`: cases 1..=3 whose condition holds.
    pub mixed_cases: Vec<u8>,
    /// `(A-b) & (A-c)`: cases 1..=3.
    pub inside_cases: Vec<u8>,
    /// `(notA-b) & (notA-c)`: cases 4..=6.
    pub outside_cases: Vec<u8>,
    /// Printed right-hand sides, per fired case.
    pub printed_mixed: bool,
    pub printed_inside: bool,
    pub printed_outside: bool,
    /// Corrected right-hand sides.
    pub corrected_mixed: bool,
    pub corrected_inside: bool,
    pub corrected_outside: bool,
}

impl GsIntersection {
    pub fn corrected_all(&self) -> bool {
        self.corrected_mixed && self.corrected_inside && self.corrected_outside
    }

    pub fn trichotomies_exact(&self) -> bool {
        self.mixed_cases.len() == 1 && self.inside_cases.len() == 1 && self.outside_cases.len() == 1
    }
}

/// Check the closed forms of `(A-b)&(notA-c)`, `(A-b)&(A-c)` and `(notA-b)&(notA-c)`
/// for the Green-Sanders set by enumerating both sides.
pub fn verify_gs_intersection(b: &FpVector, c: &FpVector, n: usize, p: u32) -> Result<GsIntersection> {
    let spec = GroupSpec::new(p, n)?;
    if b.len() != n || c.len() != n {
        return Err(shape("translates must lie in F_p^n"));
    }
    if b == c {
        return Err(invalid("b and c must differ"));
    }
    let a = gs_in(&spec);
    let (lambda, _) = gs_metric(&b.coords, &c.coords);
    let m = lambda + 1;
    let delta = (c.coords[m - 1] + p - b.coords[m - 1]) % p;
    let neg1 = p - 1;

    // C_i^alpha(w) membership for 1-based i.
    let cell = |x: &[u32], i: usize, alpha: u32, w: &[u32]| {
        (0..i - 1).all(|j| (x[j] + w[j]) % p == 0) && (x[i - 1] + w[i - 1]) % p == alpha % p
    };
    let betas: Vec<u32> = (2..p).collect();
    let any_beta = |x: &[u32], i: usize, w: &[u32]| betas.iter().any(|&bt| cell(x, i, bt, w));
    let (bw, cw) = (&b.coords, &c.coords);
    let is_neg = |x: &[u32], w: &[u32]| x.iter().zip(w).all(|(a, b)| (a + b) % p == 0);

    let lhs = |f: &dyn Fn(bool, bool) -> bool| -> Vec<bool> {
        (0..spec.order())
            .map(|x| {
                let xb = a.contains(spec.add(x, spec.index(bw)));
                let xc = a.contains(spec.add(x, spec.index(cw)));
                f(xb, xc)
            })
            .collect()
    };
    let rhs = |f: &dyn Fn(&[u32]) -> bool| -> Vec<bool> { (0..spec.order()).map(|x| f(&spec.coords(x))).collect() };

    let mixed = lhs(&|xb, xc| xb && !xc);
    let inside = lhs(&|xb, xc| xb && xc);
    let outside = lhs(&|xb, xc| !xb && !xc);

    let mut mixed_cases = Vec::new();
    if delta == 1 {
        mixed_cases.push(1);
    }
    if delta != 0 && delta != 1 && delta != neg1 {
        mixed_cases.push(2);
    }
    if delta == neg1 {
        mixed_cases.push(3);
    }
    let mut inside_cases = Vec::new();
    if delta == neg1 {
        inside_cases.push(1);
    }
    if delta == 1 {
        inside_cases.push(2);
    }
    if delta != 1 && delta != neg1 {
        inside_cases.push(3);
    }
    let mut outside_cases = Vec::new();
    if delta != 0 && delta != neg1 {
        outside_cases.push(4);
    }
    if delta != 0 && delta != 1 {
        outside_cases.push(5);
    }
    if delta == 0 {
        outside_cases.push(6);
    }

    let hi_one = |x: &[u32], w: &[u32], from: usize| (from..=n).any(|i| cell(x, i, 1, w));
    let lo_one = |x: &[u32]| (1..m).any(|i| cell(x, i, 1, bw));
    let hi_beta = |x: &[u32], w: &[u32], from: usize| (from..=n).any(|i| any_beta(x, i, w));
    let lo_beta = |x: &[u32], w: &[u32]| (1..m).any(|i| any_beta(x, i, w));

    let printed_mixed_rhs = rhs(&|x| match mixed_cases[0] {
        1 => cell(x, m, 1, bw),
        2 => hi_one(x, bw, m),
        _ => hi_beta(x, cw, m + 1),
    });
    let corrected_mixed_rhs = rhs(&|x| match mixed_cases[0] {
        1 => cell(x, m, 1, bw),
        2 => hi_one(x, bw, m),
        _ => hi_beta(x, cw, m + 1) || is_neg(x, cw) || hi_one(x, bw, m + 1),
    });

    let printed_inside_rhs = rhs(&|x| match inside_cases[0] {
        1 => (1..m).any(|i| cell(x, i, 1, cw)) || hi_one(x, bw, m),
        2 => lo_one(x) || hi_one(x, cw, m),
        _ => lo_one(x),
    });
    let corrected_inside_rhs = rhs(&|x| match inside_cases[0] {
        1 => lo_one(x) || hi_one(x, cw, m + 1),
        2 => lo_one(x) || hi_one(x, bw, m + 1),
        _ => lo_one(x),
    });

    let printed_outside_ok = outside_cases.iter().all(|&k| {
        let r = rhs(&|x| match k {
            4 => lo_beta(x, cw) || hi_beta(x, bw, m + 1),
            5 => lo_beta(x, bw) || hi_beta(x, cw, m + 1),
            _ => lo_beta(x, cw),
        });
        r == outside
    });
    let d = delta;
    let corrected_outside_rhs = rhs(&|x| {
        let s = (x[m - 1] + bw[m - 1]) % p;
        let prefix = (0..m - 1).all(|j| (x[j] + bw[j]) % p == 0);
        lo_beta(x, bw)
            || (prefix && s != 0 && s != 1 && s != (p - d) % p && s != (p + 1 - d) % p)
            || (d != 1 && (hi_beta(x, bw, m + 1) || is_neg(x, bw)))
            || (d != neg1 && (hi_beta(x, cw, m + 1) || is_neg(x, cw)))
    });

    Ok(GsIntersection {
        m,
        delta,
        printed_mixed: printed_mixed_rhs == mixed,
        printed_inside: printed_inside_rhs == inside,
        printed_outside: printed_outside_ok,
        corrected_mixed: corrected_mixed_rhs == mixed,
        corrected_inside: corrected_inside_rhs == inside,
        corrected_outside: corrected_outside_rhs == outside,
        mixed_cases,
        inside_cases,
        outside_cases,
    })
}

/// Rank of every prefix family `{M_1..M_i}`.
pub fn prefix_ranks(mats: &[FpSymMatrix]) -> Result<Vec<FactorRank>> {
    (1..=mats.len()).map(|i| crate::factors::matrices_rank(&mats[..i])).collect()
}

/// Dimension of the span of the given elements.
pub fn span_dim(spec: &GroupSpec, elems: &[usize]) -> usize {
    let rows: Vec<Vec<u32>> = elems.iter().map(|&e| spec.coords(e)).collect();
    linalg::rank(&rows, spec.n(), spec.p())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[u32]) -> FpVector {
        FpVector::new(3, c.to_vec())
    }

    #[test]
    fn gs_small() {
        let a = gs(2, 3).unwrap();
        let spec = a.spec().clone();
        let want: Vec<usize> = [[1, 0], [1, 1], [1, 2], [0, 1]].iter().map(|c| spec.index(c)).collect();
        let mut got = a.members();
        got.sort();
        let mut w = want.clone();
        w.sort();
        assert_eq!(got, w);
        for n in 1..=8 {
            assert_eq!(gs(n, 3).unwrap().len(), (3usize.pow(n as u32) - 1) / 2);
        }
    }

    #[test]
    fn gs_membership_by_first_nonzero() {
        for n in 1..=6 {
            let a = gs(n, 3).unwrap();
            let spec = a.spec();
            for x in 0..spec.order() {
                let c = spec.coords(x);
                let f = first_nonzero(&c);
                assert_eq!(a.contains(x), c[f - 1] == 1);
            }
        }
    }

    #[test]
    fn helper_functions() {
        assert_eq!(first_nonzero(&[0, 0, 1]), 3);
        assert_eq!(first_nonzero(&[1, 2, 0]), 1);
        assert_eq!(first_nonzero(&[0, 0, 0]), 3);
        let (l, d) = gs_metric(&[1, 2, 0], &[1, 1, 0]);
        assert_eq!(l, 1);
        assert_eq!(d, 0.5);
        assert_eq!(gs_metric(&[1, 2, 0], &[1, 2, 0]).0, 3);
        assert_eq!(tau(1, 1, &v(&[0, 0])), v(&[1, 0]));
    }

    #[test]
    fn trace_family_full_rank() {
        for n in [4usize, 5] {
            let mats = trace_sym_space(n, 3).unwrap();
            assert_eq!(mats.len(), n);
            let ranks: Vec<usize> = projective_tuples(3, n)
                .map(|c| FpSymMatrix::combination(3, n, &mats, &c).rank())
                .collect();
            assert!(ranks.iter().all(|&r| r == n));
            assert_eq!(ranks.len(), (3usize.pow(n as u32) - 1) / 2);
        }
        assert!(trace_sym_space(3, 5).is_ok());
    }

    #[test]
    fn irreducible_choice() {
        // t^2 + 1 is the least monic irreducible quadratic over F_3.
        assert_eq!(least_irreducible(2, 3), vec![1, 0, 1]);
        assert_eq!(least_irreducible(1, 3), vec![0, 1]);
    }

    #[test]
    fn quadric_small() {
        assert_eq!(standard_quadric(3, 3, 0).unwrap().len(), 9);
        let q2 = standard_quadric(2, 3, 0).unwrap();
        assert_eq!(q2.members(), vec![0]);
    }

    #[test]
    fn sparse_small() {
        let a = sparse_example(4, 3).unwrap();
        let s = a.spec().clone();
        let e = |i: usize| s.basis(i - 1);
        let mut want = vec![s.add(e(1), e(3)), s.add(e(2), e(3)), s.add(e(2), e(4))];
        want.sort();
        assert_eq!(a.members(), want);
        assert!(sparse_example(5, 3).is_err());
    }

    #[test]
    fn qgs_pieces_disjoint() {
        let (a, f) = qgs(4, 3).unwrap();
        let spec = a.spec().clone();
        let pieces: Vec<GroupSubset> = (1..=4).map(|i| qgs_piece(&spec, &f.quadratic, i)).collect();
        let mut union = GroupSubset::empty(&spec);
        for (i, pi) in pieces.iter().enumerate() {
            for pj in &pieces[i + 1..] {
                assert!(pi.intersection(pj).is_empty());
            }
            union = union.union(pi);
        }
        assert_eq!(union, a);
    }

    #[test]
    fn gs_intersection_case_examples() {
        // c_m - b_m = 1 is the single-translate case.
        let r = verify_gs_intersection(&v(&[0, 1, 0]), &v(&[0, 2, 2]), 3, 3).unwrap();
        assert_eq!(r.mixed_cases, vec![1]);
        assert!(r.corrected_all());
        assert!(r.printed_mixed);
    }

    #[test]
    fn printed_forms_fail_where_expected() {
        // c_m - b_m = -1: the printed mixed form drops the zero vector and the b-branch.
        let r = verify_gs_intersection(&v(&[1, 0, 0]), &v(&[0, 0, 0]), 3, 3).unwrap();
        assert_eq!(r.mixed_cases, vec![3]);
        assert!(r.corrected_all());
        assert!(!r.printed_mixed);
    }

    #[test]
    fn unions() {
        let spec = GroupSpec::new(3, 3).unwrap();
        let h = LinearFactor::standard(3, 3, 1);
        let u = union_of_cosets(&spec, &h, &[v(&[0, 0, 0]), v(&[1, 0, 0])]).unwrap();
        assert_eq!(u.len(), 18);
        let b = QuadraticFactor::purely_quadratic(3, 3, vec![FpSymMatrix::identity(3, 3)]).unwrap();
        let w = union_of_atoms(&spec, &b, &[AtomLabel::new(vec![], vec![0])]).unwrap();
        assert_eq!(w, standard_quadric(3, 3, 0).unwrap());
    }
}
