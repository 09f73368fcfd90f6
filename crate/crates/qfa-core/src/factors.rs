//! Linear, quadratic and general quadratic factors, their atoms and rank.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{invalid, shape, QfaError, Result};
use crate::formula::RankFunction;
use crate::fp::{bilin_raw, format_digits, parse_digits, quad_raw, FpSymMatrix, FpVector, GroupSpec, GroupSubset};
use crate::linalg;

/// Largest number of matrices for which factor rank is computed exhaustively.
pub const MAX_RANK_Q: usize = 8;

/// Rank of a factor; the empty factor has infinite rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum FactorRank {
    Finite(usize),
    Infinite,
}

impl FactorRank {
    pub fn at_least(self, r: usize) -> bool {
        match self {
            FactorRank::Finite(x) => x >= r,
            FactorRank::Infinite => true,
        }
    }
}

impl std::fmt::Display for FactorRank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FactorRank::Finite(r) => write!(f, "{r}"),
            FactorRank::Infinite => f.write_str("inf"),
        }
    }
}

/// Label of an atom: linear values followed by quadratic values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct AtomLabel {
    pub linear: Vec<u32>,
    pub quadratic: Vec<u32>,
}

impl AtomLabel {
    pub fn new(linear: Vec<u32>, quadratic: Vec<u32>) -> Self {
        Self { linear, quadratic }
    }

    pub fn flat(&self) -> Vec<u32> {
        let mut v = self.linear.clone();
        v.extend(&self.quadratic);
        v
    }

    pub fn from_flat(flat: &[u32], ell: usize) -> Self {
        Self { linear: flat[..ell].to_vec(), quadratic: flat[ell..].to_vec() }
    }

    /// Little-endian base-`p` code of the flat label.
    pub fn code(&self, p: u32) -> usize {
        code_of(&self.flat(), p)
    }

    pub fn from_code(code: usize, p: u32, ell: usize, q: usize) -> Self {
        Self::from_flat(&decode(code, p, ell + q), ell)
    }
}

pub(crate) fn code_of(flat: &[u32], p: u32) -> usize {
    flat.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

pub(crate) fn decode(mut code: usize, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (code % p as usize) as u32;
            code /= p as usize;
            d
        })
        .collect()
}

/// Anything whose level sets partition `F_p^n`.
pub trait Factor: Sync {
    fn p(&self) -> u32;
    fn n(&self) -> usize;
    /// Number of linear coordinates of a label (stored vectors, not span dimension).
    fn ell(&self) -> usize;
    fn q(&self) -> usize;
    fn label_of_coords(&self, x: &[u32]) -> AtomLabel;

    fn label_len(&self) -> usize {
        self.ell() + self.q()
    }

    fn num_labels(&self) -> usize {
        (self.p() as usize).pow(self.label_len() as u32)
    }
}

/// A finite list of vectors; atoms are the joint level sets of `x . v_j`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LinearFactor {
    pub p: u32,
    pub n: usize,
    pub vectors: Vec<FpVector>,
}

impl LinearFactor {
    pub fn new(p: u32, n: usize, vectors: Vec<FpVector>) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != n || v.p != p) {
            return Err(shape("linear factor vector of the wrong length"));
        }
        Ok(Self { p, n, vectors })
    }

    pub fn empty(p: u32, n: usize) -> Self {
        Self { p, n, vectors: Vec::new() }
    }

    /// `e_1, ..., e_k`.
    pub fn standard(p: u32, n: usize, k: usize) -> Self {
        Self { p, n, vectors: (0..k).map(|i| FpVector::basis(p, n, i)).collect() }
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.vectors.iter().map(|v| v.coords.clone()).collect()
    }

    /// Dimension of the span.
    pub fn complexity(&self) -> usize {
        linalg::rank(&self.rows(), self.n, self.p)
    }

    /// The common kernel `{x : x . v_j = 0 for all j}`, as sorted indices.
    pub fn kernel(&self, spec: &GroupSpec) -> Vec<usize> {
        let k = linalg::kernel(&self.rows(), self.n, self.p);
        spec.span(&k)
    }
}

impl Factor for LinearFactor {
    fn p(&self) -> u32 {
        self.p
    }
    fn n(&self) -> usize {
        self.n
    }
    fn ell(&self) -> usize {
        self.vectors.len()
    }
    fn q(&self) -> usize {
        0
    }
    fn label_of_coords(&self, x: &[u32]) -> AtomLabel {
        AtomLabel::new(self.vectors.iter().map(|v| dot_raw(x, &v.coords, self.p)).collect(), Vec::new())
    }
}

pub(crate) fn dot_raw(x: &[u32], v: &[u32], p: u32) -> u32 {
    (x.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() % p as u64) as u32
}

/// A quadratic factor `(L, Q)`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct QuadraticFactor {
    pub linear: LinearFactor,
    pub quadratic: Vec<FpSymMatrix>,
}

impl QuadraticFactor {
    pub fn new(linear: LinearFactor, quadratic: Vec<FpSymMatrix>) -> Result<Self> {
        if quadratic.iter().any(|m| m.n() != linear.n || m.p() != linear.p) {
            return Err(shape("matrix dimension does not match the linear part"));
        }
        Ok(Self { linear, quadratic })
    }

    pub fn trivial(p: u32, n: usize) -> Self {
        Self { linear: LinearFactor::empty(p, n), quadratic: Vec::new() }
    }

    pub fn purely_quadratic(p: u32, n: usize, quadratic: Vec<FpSymMatrix>) -> Result<Self> {
        Self::new(LinearFactor::empty(p, n), quadratic)
    }

    /// `(dim span L, q)`.
    pub fn complexity(&self) -> (usize, usize) {
        (self.linear.complexity(), self.quadratic.len())
    }

    pub fn rank(&self) -> Result<FactorRank> {
        factor_rank(self)
    }
}

impl Factor for QuadraticFactor {
    fn p(&self) -> u32 {
        self.linear.p
    }
    fn n(&self) -> usize {
        self.linear.n
    }
    fn ell(&self) -> usize {
        self.linear.vectors.len()
    }
    fn q(&self) -> usize {
        self.quadratic.len()
    }
    fn label_of_coords(&self, x: &[u32]) -> AtomLabel {
        let mut l = self.linear.label_of_coords(x);
        l.quadratic = self.quadratic.iter().map(|m| quad_raw(m, x)).collect();
        l
    }
}

/// A factor whose quadratic constraints carry a linear shift, `x^T M x + x . u`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GeneralQuadraticFactor {
    pub linear: LinearFactor,
    pub quadratic: Vec<(FpSymMatrix, FpVector)>,
}

impl GeneralQuadraticFactor {
    pub fn new(linear: LinearFactor, quadratic: Vec<(FpSymMatrix, FpVector)>) -> Result<Self> {
        let (p, n) = (linear.p, linear.n);
        if quadratic.iter().any(|(m, u)| m.n() != n || u.len() != n || m.p() != p) {
            return Err(shape("general factor component of the wrong dimension"));
        }
        Ok(Self { linear, quadratic })
    }

    pub fn is_purely_linear(&self) -> bool {
        self.quadratic.is_empty()
    }

    pub fn complexity(&self) -> (usize, usize) {
        (self.linear.complexity(), self.quadratic.len())
    }

    /// The plain quadratic factor, when every shift is zero.
    pub fn as_quadratic(&self) -> Option<QuadraticFactor> {
        if self.quadratic.iter().any(|(_, u)| !u.is_zero()) {
            return None;
        }
        Some(QuadraticFactor { linear: self.linear.clone(), quadratic: self.quadratic.iter().map(|(m, _)| m.clone()).collect() })
    }

    /// Rank of the matrix parts.
    pub fn rank(&self) -> Result<FactorRank> {
        let f = QuadraticFactor::new(self.linear.clone(), self.quadratic.iter().map(|(m, _)| m.clone()).collect())?;
        factor_rank(&f)
    }
}

impl From<&QuadraticFactor> for GeneralQuadraticFactor {
    fn from(b: &QuadraticFactor) -> Self {
        let zero = FpVector::zero(b.p(), b.n());
        Self { linear: b.linear.clone(), quadratic: b.quadratic.iter().map(|m| (m.clone(), zero.clone())).collect() }
    }
}

impl Factor for GeneralQuadraticFactor {
    fn p(&self) -> u32 {
        self.linear.p
    }
    fn n(&self) -> usize {
        self.linear.n
    }
    fn ell(&self) -> usize {
        self.linear.vectors.len()
    }
    fn q(&self) -> usize {
        self.quadratic.len()
    }
    fn label_of_coords(&self, x: &[u32]) -> AtomLabel {
        let p = self.p();
        let mut l = self.linear.label_of_coords(x);
        l.quadratic = self.quadratic.iter().map(|(m, u)| (quad_raw(m, x) + dot_raw(x, &u.coords, p)) % p).collect();
        l
    }
}

fn check_spec<F: Factor + ?Sized>(spec: &GroupSpec, b: &F) -> Result<()> {
    if spec.p() != b.p() || spec.n() != b.n() {
        return Err(shape(format!("factor over F_{}^{} used in {:?}", b.p(), b.n(), spec)));
    }
    Ok(())
}

pub fn atom_label<F: Factor + ?Sized>(x: &FpVector, b: &F) -> Result<AtomLabel> {
    if x.len() != b.n() || x.p != b.p() {
        return Err(shape("vector and factor dimensions differ"));
    }
    Ok(b.label_of_coords(&x.coords))
}

/// Label code of every element, indexed by element.
pub fn atom_codes<F: Factor + ?Sized>(spec: &GroupSpec, b: &F) -> Result<Vec<usize>> {
    check_spec(spec, b)?;
    let p = b.p();
    Ok((0..spec.order()).into_par_iter().map(|i| b.label_of_coords(&spec.coords(i)).code(p)).collect())
}

pub fn atom_members<F: Factor + ?Sized>(spec: &GroupSpec, b: &F, label: &AtomLabel) -> Result<GroupSubset> {
    check_spec(spec, b)?;
    if label.linear.len() != b.ell() || label.quadratic.len() != b.q() {
        return Err(shape("label length does not match the factor"));
    }
    Ok(GroupSubset::from_fn(spec, |i| &b.label_of_coords(&spec.coords(i)) == label))
}

/// Size of every atom, indexed by label code; empty atoms included.
pub fn atom_sizes<F: Factor + ?Sized>(spec: &GroupSpec, b: &F) -> Result<Vec<u64>> {
    let codes = atom_codes(spec, b)?;
    let mut sizes = vec![0u64; b.num_labels()];
    for c in codes {
        sizes[c] += 1;
    }
    Ok(sizes)
}

/// Nonempty atoms as member lists, in label-code order.
pub fn atoms<F: Factor + ?Sized>(spec: &GroupSpec, b: &F) -> Result<Vec<(usize, Vec<usize>)>> {
    let codes = atom_codes(spec, b)?;
    let mut by: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, c) in codes.into_iter().enumerate() {
        by.entry(c).or_default().push(i);
    }
    let mut out: Vec<_> = by.into_iter().collect();
    out.sort_unstable_by_key(|(c, _)| *c);
    Ok(out)
}

/// Normalized coefficient tuples: nonzero, first nonzero entry equal to 1.
pub(crate) fn projective_tuples(p: u32, q: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as usize).pow(q as u32);
    (1..total).map(move |c| decode(c, p, q)).filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
}

pub fn factor_rank(b: &QuadraticFactor) -> Result<FactorRank> {
    matrices_rank(&b.quadratic)
}

/// Minimum rank over nontrivial combinations of `mats`.
pub fn matrices_rank(mats: &[FpSymMatrix]) -> Result<FactorRank> {
    Ok(match lowest_rank_combination(mats)? {
        None => FactorRank::Infinite,
        Some((r, _)) => FactorRank::Finite(r),
    })
}

/// A nontrivial combination of least rank (first in enumeration order among ties).
pub fn lowest_rank_combination(mats: &[FpSymMatrix]) -> Result<Option<(usize, Vec<u32>)>> {
    if mats.is_empty() {
        return Ok(None);
    }
    if mats.len() > MAX_RANK_Q {
        return Err(QfaError::Budget(format!("factor rank over {} matrices exceeds the cap of {MAX_RANK_Q}", mats.len())));
    }
    let (p, n) = (mats[0].p(), mats[0].n());
    let tuples: Vec<Vec<u32>> = projective_tuples(p, mats.len()).collect();
    let best = tuples
        .par_iter()
        .enumerate()
        .map(|(k, l)| (FpSymMatrix::combination(p, n, mats, l).rank(), k))
        .min()
        .unwrap();
    Ok(Some((best.0, tuples[best.1].clone())))
}

/// Whether the atoms of `b1` refine those of `b2`.
pub fn refines<F1: Factor + ?Sized, F2: Factor + ?Sized>(spec: &GroupSpec, b1: &F1, b2: &F2) -> Result<bool> {
    let c1 = atom_codes(spec, b1)?;
    let c2 = atom_codes(spec, b2)?;
    Ok(partition_refines(&c1, &c2))
}

/// `fine` refines `coarse` as labelings of the same element set.
pub fn partition_refines(fine: &[usize], coarse: &[usize]) -> bool {
    let mut map: HashMap<usize, usize> = HashMap::new();
    fine.iter().zip(coarse).all(|(&f, &c)| *map.entry(f).or_insert(c) == c)
}

/// The two labelings induce the same partition.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    partition_refines(a, b) && partition_refines(b, a)
}

/// Outcome of [`make_high_rank`].
#[derive(Debug, Clone)]
pub struct RankRepair {
    pub factor: QuadraticFactor,
    pub rank: FactorRank,
    pub target: usize,
    /// Indices (into the input) of the matrices that were dropped, in drop order.
    pub dropped: Vec<usize>,
}

/// Repair a factor to high rank.
///
/// Whenever some nontrivial combination has rank below `r(l' + q')`, the
/// matrix of largest index in it is dropped and a basis of the combination's
/// row space joins the linear part, which keeps the dropped value measurable.
pub fn make_high_rank(b: &QuadraticFactor, r: &RankFunction, bound: usize) -> Result<RankRepair> {
    let (l0, q0) = b.complexity();
    if l0 + q0 > bound {
        return Err(invalid(format!("complexity {} exceeds the bound {bound}", l0 + q0)));
    }
    let (p, n) = (b.p(), b.n());
    let mut linear = b.linear.clone();
    let mut mats: Vec<(usize, FpSymMatrix)> = b.quadratic.iter().cloned().enumerate().collect();
    let mut dropped = Vec::new();
    loop {
        let target = r.target(linear.complexity() + mats.len());
        let only: Vec<FpSymMatrix> = mats.iter().map(|(_, m)| m.clone()).collect();
        match lowest_rank_combination(&only)? {
            Some((rk, lambda)) if rk < target => {
                let pos = (0..lambda.len()).rev().find(|&i| lambda[i] != 0).unwrap();
                let comb = FpSymMatrix::combination(p, n, &only, &lambda);
                let rows = comb.rows();
                for i in linalg::independent_subset(&rows, n, p) {
                    let v = FpVector::new(p, rows[i].clone());
                    let mut ext = linear.rows();
                    ext.push(v.coords.clone());
                    if linalg::rank(&ext, n, p) > linear.complexity() {
                        linear.vectors.push(v);
                    }
                }
                dropped.push(mats.remove(pos).0);
            }
            _ => {
                let factor = QuadraticFactor::new(linear, mats.into_iter().map(|(_, m)| m).collect())?;
                let rank = factor_rank(&factor)?;
                let (l, q) = factor.complexity();
                return Ok(RankRepair { factor, rank, target: r.target(l + q), dropped });
            }
        }
    }
}

/// Extend `q` by `count` matrices from `family` without lowering the rank below
/// `min(rank(q), n)`. Greedy in family order with backtracking.
pub fn pad_with_high_rank(q: &[FpSymMatrix], family: &[FpSymMatrix], count: usize) -> Result<Option<Vec<FpSymMatrix>>> {
    if family.is_empty() {
        return if count == 0 { Ok(Some(q.to_vec())) } else { Ok(None) };
    }
    let n = family[0].n();
    if matrices_rank(family)? != FactorRank::Finite(n) {
        return Err(invalid("padding family does not have factor rank n"));
    }
    let target = match matrices_rank(q)? {
        FactorRank::Infinite => n,
        FactorRank::Finite(r) => r.min(n),
    };
    fn go(cur: &mut Vec<FpSymMatrix>, family: &[FpSymMatrix], from: usize, left: usize, target: usize) -> Result<bool> {
        if left == 0 {
            return Ok(true);
        }
        for i in from..family.len() {
            if cur.contains(&family[i]) {
                continue;
            }
            cur.push(family[i].clone());
            if matrices_rank(cur)?.at_least(target) && go(cur, family, i + 1, left - 1, target)? {
                return Ok(true);
            }
            cur.pop();
        }
        Ok(false)
    }
    let mut cur = q.to_vec();
    Ok(if go(&mut cur, family, 0, count, target)? { Some(cur) } else { None })
}

/// Which conclusion of the pullback construction holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PullbackCase {
    /// Some quadratic constraints survive and the rank is at least the input's.
    HighRank,
    /// Everything collapsed into linear constraints from the span of the input's linear part.
    PurelyLinear,
}

#[derive(Debug, Clone)]
pub struct Pullback {
    pub factor: GeneralQuadraticFactor,
    pub case: PullbackCase,
}

/// Pull a linear factor on the label space of `b` back to `F_p^n`.
///
/// Each label functional `r` gives the constraint `x . t + x^T M x` with
/// `t = sum_i r_i s_i` and `M = sum_j r_{l+j} M_j`. While the surviving
/// matrices are linearly dependent, one dependent constraint is traded for the
/// linear functional that the dependency leaves behind.
pub fn pullback_factor(b: &QuadraticFactor, r: &LinearFactor) -> Result<Pullback> {
    let (p, n) = (b.p(), b.n());
    let ell = b.ell();
    if r.n != ell + b.q() || r.p != p {
        return Err(shape(format!("label-space factor has length {}, expected {}", r.n, ell + b.q())));
    }
    let mut pairs: Vec<(FpSymMatrix, FpVector)> = r
        .vectors
        .iter()
        .map(|rv| {
            let mut t = FpVector::zero(p, n);
            for (i, s) in b.linear.vectors.iter().enumerate() {
                t = t.add(&s.scale(rv.coords[i]));
            }
            let m = FpSymMatrix::combination(p, n, &b.quadratic, &rv.coords[ell..]);
            (m, t)
        })
        .collect();
    let mut linear: Vec<FpVector> = Vec::new();
    loop {
        // Columns are the vectorized matrices; a kernel vector is a dependency.
        let k = pairs.len();
        let rows: Vec<Vec<u32>> = (0..n * n).map(|e| pairs.iter().map(|(m, _)| m.entries()[e]).collect()).collect();
        let ker = if k == 0 { Vec::new() } else { linalg::kernel(&rows, k, p) };
        let Some(lambda) = ker.into_iter().next() else { break };
        let i = (0..k).rev().find(|&i| lambda[i] != 0).unwrap();
        let mut t = FpVector::zero(p, n);
        for (a, (_, ta)) in pairs.iter().enumerate() {
            t = t.add(&ta.scale(lambda[a]));
        }
        linear.push(t);
        pairs.remove(i);
    }
    let case = if pairs.is_empty() { PullbackCase::PurelyLinear } else { PullbackCase::HighRank };
    let factor = GeneralQuadraticFactor::new(LinearFactor::new(p, n, linear)?, pairs)?;
    Ok(Pullback { factor, case })
}

/// Labeling of `F_p^n` by the cells `X_R` of the pulled-back partition.
pub fn pullback_partition(spec: &GroupSpec, b: &QuadraticFactor, r: &LinearFactor) -> Result<Vec<usize>> {
    check_spec(spec, b)?;
    let p = b.p();
    Ok((0..spec.order())
        .into_par_iter()
        .map(|i| {
            let lab = b.label_of_coords(&spec.coords(i)).flat();
            code_of(&r.label_of_coords(&lab).linear, p)
        })
        .collect())
}

/// `x^T M y` over element indices.
pub fn bilinear_at(spec: &GroupSpec, m: &FpSymMatrix, x: usize, y: usize) -> u32 {
    bilin_raw(m, &spec.coords(x), &spec.coords(y))
}

/// Parse the factor file format: a header `p n ell q`, then `ell` vector
/// lines, then `q` matrices of `n` rows each, then optionally `q` shift
/// vectors. Blank lines and `#` comments are skipped.
pub fn parse_factor(text: &str) -> Result<GeneralQuadraticFactor> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let header = lines.first().ok_or_else(|| QfaError::Parse("empty factor file".into()))?;
    let t: Vec<usize> = header
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| QfaError::Parse(format!("bad header field {x:?}"))))
        .collect::<Result<_>>()?;
    let [p, n, ell, q] = t[..] else {
        return Err(QfaError::Parse(format!("expected header \"p n ell q\", got {header:?}")));
    };
    let p = p as u32;
    GroupSpec::new(p, n)?;
    let body = &lines[1..];
    let plain = ell + q * n;
    if body.len() != plain && body.len() != plain + q {
        return Err(QfaError::Parse(format!("expected {plain} or {} body lines, found {}", plain + q, body.len())));
    }
    let vec_at = |i: usize| -> Result<FpVector> {
        let d = parse_digits(body[i], p)?;
        if d.len() != n {
            return Err(QfaError::Parse(format!("line {} has {} digits, expected {n}", i + 2, d.len())));
        }
        Ok(FpVector::new(p, d))
    };
    let linear = LinearFactor::new(p, n, (0..ell).map(vec_at).collect::<Result<_>>()?)?;
    let mut quadratic = Vec::with_capacity(q);
    for j in 0..q {
        let rows: Vec<u32> = (0..n).map(|r| vec_at(ell + j * n + r).map(|v| v.coords)).collect::<Result<Vec<_>>>()?.concat();
        let m = FpSymMatrix::new(p, n, rows)?;
        let u = if body.len() > plain { vec_at(plain + j)? } else { FpVector::zero(p, n) };
        quadratic.push((m, u));
    }
    GeneralQuadraticFactor::new(linear, quadratic)
}

/// Inverse of [`parse_factor`]; shift lines are written only when some shift is nonzero.
pub fn write_factor(b: &GeneralQuadraticFactor) -> String {
    let (p, n) = (b.p(), b.n());
    let mut out = format!("{p} {n} {} {}\n", b.ell(), b.q());
    for v in &b.linear.vectors {
        out += &format_digits(&v.coords, p);
        out.push('\n');
    }
    for (m, _) in &b.quadratic {
        for r in m.rows() {
            out += &format_digits(&r, p);
            out.push('\n');
        }
    }
    if b.as_quadratic().is_none() {
        for (_, u) in &b.quadratic {
            out += &format_digits(&u.coords, p);
            out.push('\n');
        }
    }
    out
}

/// Uniformly random symmetric matrix.
pub fn random_sym_matrix<R: rand::Rng + ?Sized>(p: u32, n: usize, rng: &mut R) -> FpSymMatrix {
    let mut e = vec![0u32; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(0..p);
            e[i * n + j] = v;
            e[j * n + i] = v;
        }
    }
    FpSymMatrix::new(p, n, e).expect("entries reduced mod p")
}

/// Random factor with `ell` independent functionals and `q` random matrices.
pub fn random_factor<R: rand::Rng + ?Sized>(p: u32, n: usize, ell: usize, q: usize, rng: &mut R) -> Result<QuadraticFactor> {
    if ell > n {
        return Err(invalid("more functionals than coordinates"));
    }
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(ell);
    while rows.len() < ell {
        let v: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        rows.push(v);
        if linalg::rank(&rows, n, p) < rows.len() {
            rows.pop();
        }
    }
    let linear = LinearFactor::new(p, n, rows.into_iter().map(|r| FpVector::new(p, r)).collect())?;
    QuadraticFactor::new(linear, (0..q).map(|_| random_sym_matrix(p, n, rng)).collect())
}
