//! Exact arithmetic over `F_p^n`.
//!
//! Group elements are addressed by their little-endian base-`p` index,
//! `index = sum_i v_i p^i`. Everything that enumerates the group works on
//! indices; [`FpVector`] is the explicit coordinate form.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, shape, QfaError, Result};
use crate::linalg;

pub type ComplexValue = Complex64;

pub const DEFAULT_MAX_GROUP_BITS: u32 = 24;

/// Complex values closer than this are treated as equal.
pub const COMPLEX_TOL: f64 = 1e-9;

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The enumeration cap, `2^QFA_MAX_GROUP_BITS` when that variable is set.
pub fn max_group_order() -> u64 {
    let bits = std::env::var("QFA_MAX_GROUP_BITS")
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .unwrap_or(DEFAULT_MAX_GROUP_BITS)
        .min(40);
    1u64 << bits
}

pub(crate) fn check_cap(order: u128) -> Result<()> {
    let cap = max_group_order();
    if order > cap as u128 {
        return Err(QfaError::Capacity { order, cap });
    }
    Ok(())
}

struct Tables {
    chunk: usize,
    nchunks: usize,
    add: Vec<u16>,
    neg: Vec<u16>,
    // scale[s * chunk + x]
    scale: Vec<u16>,
    pow: Vec<usize>,
}

/// The ambient group `F_p^n`.
#[derive(Clone)]
pub struct GroupSpec {
    p: u32,
    n: usize,
    order: usize,
    tables: Arc<Tables>,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n
    }
}
impl Eq for GroupSpec {}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.n)
    }
}

impl GroupSpec {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if !is_odd_prime(p as u64) {
            return Err(QfaError::Prime(p as u64));
        }
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let order = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        check_cap(order)?;
        let order = order as usize;

        // Chunks of c digits with p^c <= 256 keep the addition table at 64K entries.
        let mut c = 1;
        while (p as usize).pow(c as u32 + 1) <= 256 && c < n {
            c += 1;
        }
        let c = c.min(n);
        let cs = (p as usize).pow(c as u32);
        let digits = |mut x: usize| {
            let mut d = vec![0u32; c];
            for slot in d.iter_mut() {
                *slot = (x % p as usize) as u32;
                x /= p as usize;
            }
            d
        };
        let undigits = |d: &[u32]| d.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize);
        let dig: Vec<Vec<u32>> = (0..cs).map(digits).collect();
        let mut add = vec![0u16; cs * cs];
        for a in 0..cs {
            for b in 0..cs {
                let s: Vec<u32> = dig[a].iter().zip(&dig[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * cs + b] = undigits(&s) as u16;
            }
        }
        let neg = (0..cs)
            .map(|a| undigits(&dig[a].iter().map(|x| (p - x) % p).collect::<Vec<_>>()) as u16)
            .collect();
        let mut scale = vec![0u16; p as usize * cs];
        for s in 0..p {
            for a in 0..cs {
                scale[s as usize * cs + a] =
                    undigits(&dig[a].iter().map(|x| x * s % p).collect::<Vec<_>>()) as u16;
            }
        }
        let pow = (0..=n).map(|i| (p as usize).pow(i as u32)).collect();
        let tables = Tables { chunk: cs, nchunks: n.div_ceil(c), add, neg, scale, pow };
        Ok(Self { p, n, order, tables: Arc::new(tables) })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `p^i` for `i <= n`.
    pub fn pow(&self, i: usize) -> usize {
        self.tables.pow[i]
    }

    pub fn index_of(&self, v: &FpVector) -> Result<usize> {
        if v.len() != self.n || v.p != self.p {
            return Err(shape(format!("vector of length {} over F_{} in {:?}", v.len(), v.p, self)));
        }
        Ok(self.index(&v.coords))
    }

    pub fn vector_of(&self, index: usize) -> Result<FpVector> {
        if index >= self.order {
            return Err(QfaError::Range { index: index as u64, order: self.order as u64 });
        }
        Ok(FpVector { p: self.p, coords: self.coords(index) })
    }

    /// Coordinates of `index`, unchecked.
    pub fn coords(&self, mut index: usize) -> Vec<u32> {
        let p = self.p as usize;
        (0..self.n)
            .map(|_| {
                let d = index % p;
                index /= p;
                d as u32
            })
            .collect()
    }

    pub fn index(&self, coords: &[u32]) -> usize {
        coords.iter().rev().fold(0usize, |acc, &x| acc * self.p as usize + (x % self.p) as usize)
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        let t = &*self.tables;
        let cs = t.chunk;
        if t.nchunks == 1 {
            return t.add[a * cs + b] as usize;
        }
        let (mut a, mut b, mut mul, mut r) = (a, b, 1usize, 0usize);
        for _ in 0..t.nchunks {
            r += t.add[(a % cs) * cs + b % cs] as usize * mul;
            a /= cs;
            b /= cs;
            mul *= cs;
        }
        r
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        let t = &*self.tables;
        let cs = t.chunk;
        let (mut a, mut mul, mut r) = (a, 1usize, 0usize);
        for _ in 0..t.nchunks {
            r += t.neg[a % cs] as usize * mul;
            a /= cs;
            mul *= cs;
        }
        r
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn scale(&self, s: u32, a: usize) -> usize {
        let t = &*self.tables;
        let cs = t.chunk;
        let s = (s % self.p) as usize;
        let (mut a, mut mul, mut r) = (a, 1usize, 0usize);
        for _ in 0..t.nchunks {
            r += t.scale[s * cs + a % cs] as usize * mul;
            a /= cs;
            mul *= cs;
        }
        r
    }

    /// Index of the standard basis vector `e_{i+1}` (0-based `i`).
    pub fn basis(&self, i: usize) -> usize {
        self.pow(i)
    }

    /// `x . v` for an element given by index.
    pub fn dot(&self, index: usize, v: &[u32]) -> u32 {
        let p = self.p as u64;
        let mut x = index;
        let mut s = 0u64;
        for &vi in v {
            let d = (x % self.p as usize) as u64;
            x /= self.p as usize;
            s += d * vi as u64;
        }
        (s % p) as u32
    }

    /// Every element of the span of `gens`, as sorted indices.
    pub fn span(&self, gens: &[Vec<u32>]) -> Vec<usize> {
        let basis: Vec<usize> = linalg::independent_subset(gens, self.n, self.p)
            .into_iter()
            .map(|i| self.index(&gens[i]))
            .collect();
        let mut out = vec![0usize];
        for b in basis {
            let prev = out.clone();
            for s in 1..self.p {
                let t = self.scale(s, b);
                out.extend(prev.iter().map(|&x| self.add(x, t)));
            }
        }
        out.sort_unstable();
        out
    }
}

/// A vector in `F_p^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct FpVector {
    pub p: u32,
    pub coords: Vec<u32>,
}

impl FpVector {
    pub fn new(p: u32, coords: Vec<u32>) -> Self {
        Self { p, coords: coords.into_iter().map(|x| x % p).collect() }
    }

    pub fn zero(p: u32, n: usize) -> Self {
        Self { p, coords: vec![0; n] }
    }

    /// `e_{i+1}` for 0-based `i`.
    pub fn basis(p: u32, n: usize, i: usize) -> Self {
        let mut v = Self::zero(p, n);
        v.coords[i] = 1;
        v
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.p;
        Self { p, coords: self.coords.iter().zip(&other.coords).map(|(a, b)| (a + b) % p).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        Self { p, coords: self.coords.iter().map(|a| (p - a) % p).collect() }
    }

    pub fn scale(&self, s: u32) -> Self {
        let p = self.p;
        Self { p, coords: self.coords.iter().map(|a| (a * (s % p)) % p).collect() }
    }

    pub fn dot(&self, other: &Self) -> u32 {
        let s: u64 = self.coords.iter().zip(&other.coords).map(|(&a, &b)| a as u64 * b as u64).sum();
        (s % self.p as u64) as u32
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p <= 10 {
            for c in &self.coords {
                write!(f, "{c}")?;
            }
            Ok(())
        } else {
            let s: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", s.join(","))
        }
    }
}

/// A symmetric `n x n` matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct FpSymMatrix {
    p: u32,
    n: usize,
    entries: Vec<u32>,
}

impl FpSymMatrix {
    pub fn new(p: u32, n: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(shape(format!("{} entries for a {n}x{n} matrix", entries.len())));
        }
        let entries: Vec<u32> = entries.into_iter().map(|x| x % p).collect();
        for i in 0..n {
            for j in 0..i {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(invalid(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { p, n, entries })
    }

    pub fn from_fn(p: u32, n: usize, f: impl Fn(usize, usize) -> u32) -> Result<Self> {
        Self::new(p, n, (0..n * n).map(|k| f(k / n, k % n)).collect())
    }

    pub fn zero(p: u32, n: usize) -> Self {
        Self { p, n, entries: vec![0; n * n] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zero(p, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// The matrix with a single 1 at `(i, i)`.
    pub fn unit_diag(p: u32, n: usize, i: usize) -> Self {
        let mut m = Self::zero(p, n);
        m.entries[i * n + i] = 1;
        m
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.p;
        Self {
            p,
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| (a + b) % p).collect(),
        }
    }

    pub fn scale(&self, s: u32) -> Self {
        let p = self.p;
        Self { p, n: self.n, entries: self.entries.iter().map(|a| a * (s % p) % p).collect() }
    }

    /// `sum_i coeffs[i] * mats[i]`; an empty family gives the zero matrix.
    pub fn combination(p: u32, n: usize, mats: &[FpSymMatrix], coeffs: &[u32]) -> Self {
        let mut acc = Self::zero(p, n);
        for (m, &c) in mats.iter().zip(coeffs) {
            if c % p != 0 {
                acc = acc.add(&m.scale(c));
            }
        }
        acc
    }

    pub fn rank(&self) -> usize {
        matrix_rank(self)
    }

    /// `M x`.
    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        linalg::mat_vec(&self.rows(), x, self.p)
    }
}

pub fn matrix_rank(m: &FpSymMatrix) -> usize {
    linalg::rank(&m.rows(), m.n, m.p)
}

fn check_dims(m: &FpSymMatrix, v: &FpVector) -> Result<()> {
    if m.n != v.len() || m.p != v.p {
        return Err(shape(format!("{}x{} matrix against vector of length {}", m.n, m.n, v.len())));
    }
    Ok(())
}

/// `x^T M x mod p`.
pub fn quad_eval(m: &FpSymMatrix, x: &FpVector) -> Result<u32> {
    check_dims(m, x)?;
    Ok(quad_raw(m, &x.coords))
}

/// `x^T M y mod p`.
pub fn bilin_eval(m: &FpSymMatrix, x: &FpVector, y: &FpVector) -> Result<u32> {
    check_dims(m, x)?;
    check_dims(m, y)?;
    Ok(bilin_raw(m, &x.coords, &y.coords))
}

pub(crate) fn quad_raw(m: &FpSymMatrix, x: &[u32]) -> u32 {
    bilin_raw(m, x, x)
}

pub(crate) fn bilin_raw(m: &FpSymMatrix, x: &[u32], y: &[u32]) -> u32 {
    let n = m.n;
    let mut s = 0u64;
    for i in 0..n {
        if x[i] == 0 {
            continue;
        }
        let row = &m.entries[i * n..(i + 1) * n];
        let r: u64 = row.iter().zip(y).map(|(&a, &b)| a as u64 * b as u64).sum();
        s += x[i] as u64 * (r % m.p as u64);
    }
    (s % m.p as u64) as u32
}

/// A subset of `F_p^n` stored as a bitset over element indices.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupSubset {
    spec: GroupSpec,
    bits: Vec<u64>,
}

impl fmt::Debug for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSubset({:?}, {} members)", self.spec, self.len())
    }
}

impl GroupSubset {
    pub fn empty(spec: &GroupSpec) -> Self {
        Self { spec: spec.clone(), bits: vec![0; spec.order().div_ceil(64)] }
    }

    pub fn full(spec: &GroupSpec) -> Self {
        Self::empty(spec).complement()
    }

    pub fn from_fn(spec: &GroupSpec, f: impl Fn(usize) -> bool + Sync) -> Self {
        let order = spec.order();
        let bits = (0..order.div_ceil(64))
            .into_par_iter()
            .map(|w| {
                let mut word = 0u64;
                for b in 0..64 {
                    let i = w * 64 + b;
                    if i < order && f(i) {
                        word |= 1 << b;
                    }
                }
                word
            })
            .collect();
        Self { spec: spec.clone(), bits }
    }

    pub fn from_indices(spec: &GroupSpec, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(spec);
        for i in members {
            if i >= spec.order() {
                return Err(QfaError::Range { index: i as u64, order: spec.order() as u64 });
            }
            s.insert(i);
        }
        Ok(s)
    }

    pub fn from_vectors(spec: &GroupSpec, members: &[FpVector]) -> Result<Self> {
        let idx: Result<Vec<usize>> = members.iter().map(|v| spec.index_of(v)).collect();
        Self::from_indices(spec, idx?)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn contains_vector(&self, v: &FpVector) -> bool {
        self.spec.index_of(v).map(|i| self.contains(i)).unwrap_or(false)
    }

    pub fn insert(&mut self, i: usize) {
        self.bits[i >> 6] |= 1 << (i & 63);
    }

    pub fn remove(&mut self, i: usize) {
        self.bits[i >> 6] &= !(1 << (i & 63));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn density(&self) -> f64 {
        self.len() as f64 / self.spec.order() as f64
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        let order = self.spec.order();
        let mut bits: Vec<u64> = self.bits.iter().map(|w| !w).collect();
        if order % 64 != 0 {
            let last = bits.len() - 1;
            bits[last] &= (1u64 << (order % 64)) - 1;
        }
        Self { spec: self.spec.clone(), bits }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.spec, other.spec, "subsets of different groups");
        Self { spec: self.spec.clone(), bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.bits.iter().zip(&other.bits).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// `{a + t : a in self}`.
    pub fn translate(&self, t: usize) -> Self {
        let mut out = Self::empty(&self.spec);
        for a in self.iter() {
            out.insert(self.spec.add(a, t));
        }
        out
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

/// `f_hat(t) = E_x f(x) w^{-x.t}`, one length-`p` transform per axis.
pub fn dft(spec: &GroupSpec, f: &[ComplexValue]) -> Result<Vec<ComplexValue>> {
    let mut out = axis_transforms(spec, f, -1.0)?;
    let inv = 1.0 / spec.order() as f64;
    out.par_iter_mut().for_each(|z| *z *= inv);
    Ok(out)
}

/// Fourier inversion: `f(x) = sum_t f_hat(t) w^{x.t}`.
pub fn idft(spec: &GroupSpec, fhat: &[ComplexValue]) -> Result<Vec<ComplexValue>> {
    axis_transforms(spec, fhat, 1.0)
}

pub fn dft_real(spec: &GroupSpec, f: &[f64]) -> Result<Vec<ComplexValue>> {
    let c: Vec<ComplexValue> = f.iter().map(|&x| ComplexValue::new(x, 0.0)).collect();
    dft(spec, &c)
}

/// `w^k` for `k < p`, with `w = e^{2 pi i / p}`.
pub fn roots_of_unity(p: u32) -> Vec<ComplexValue> {
    (0..p)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / p as f64;
            ComplexValue::new(th.cos(), th.sin())
        })
        .collect()
}

fn axis_transforms(spec: &GroupSpec, f: &[ComplexValue], sign: f64) -> Result<Vec<ComplexValue>> {
    if f.len() != spec.order() {
        return Err(shape(format!("function table of length {} on a group of order {}", f.len(), spec.order())));
    }
    let p = spec.p() as usize;
    let roots = roots_of_unity(spec.p());
    let mut cur = f.to_vec();
    for axis in 0..spec.n() {
        let stride = spec.pow(axis);
        let block = stride * p;
        let src = cur.clone();
        cur.par_chunks_mut(block).enumerate().for_each(|(bi, chunk)| {
            let base = bi * block;
            for off in 0..stride {
                for j in 0..p {
                    let mut acc = Neumaier::default();
                    for k in 0..p {
                        let e = (j * k) % p;
                        let w = if sign < 0.0 { roots[e].conj() } else { roots[e] };
                        acc.add(src[base + off + k * stride] * w);
                    }
                    chunk[off + j * stride] = acc.sum();
                }
            }
        });
    }
    Ok(cur)
}

/// Compensated complex summation.
#[derive(Default)]
pub(crate) struct Neumaier {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, z: ComplexValue) {
        fn step(s: &mut f64, c: &mut f64, x: f64) {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
        step(&mut self.re, &mut self.re_c, z.re);
        step(&mut self.im, &mut self.im_c, z.im);
    }

    pub(crate) fn sum(&self) -> ComplexValue {
        ComplexValue::new(self.re + self.re_c, self.im + self.im_c)
    }
}

/// `E_x w^{x^T M x + b.x}`.
pub fn gauss_sum(m: &FpSymMatrix, b: &FpVector) -> Result<ComplexValue> {
    check_dims(m, b)?;
    let spec = GroupSpec::new(m.p(), m.n())?;
    let p = m.p() as usize;
    let hist = (0..spec.order())
        .into_par_iter()
        .fold(
            || vec![0u64; p],
            |mut h, x| {
                let c = spec.coords(x);
                let e = (quad_raw(m, &c) as usize + spec.dot(x, &b.coords) as usize) % p;
                h[e] += 1;
                h
            },
        )
        .reduce(|| vec![0u64; p], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let roots = roots_of_unity(m.p());
    let mut acc = Neumaier::default();
    for (r, &c) in hist.iter().enumerate() {
        acc.add(roots[r] * c as f64);
    }
    Ok(acc.sum() / spec.order() as f64)
}

/// Parse the subset file format: a header line `p n`, then one member per
/// line written as `n` base-`p` digits, first coordinate first.
pub fn parse_subset(text: &str) -> Result<GroupSubset> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| QfaError::Parse("empty subset file".into()))?;
    let (p, n) = parse_header2(header)?;
    let spec = GroupSpec::new(p, n)?;
    let mut set = GroupSubset::empty(&spec);
    for (k, line) in lines.enumerate() {
        let coords = parse_digits(line, p)?;
        if coords.len() != n {
            return Err(QfaError::Parse(format!("member {} has {} digits, expected {n}", k + 1, coords.len())));
        }
        set.insert(spec.index(&coords));
    }
    Ok(set)
}

pub fn write_subset(set: &GroupSubset) -> String {
    let spec = set.spec();
    let mut out = format!("{} {}\n", spec.p(), spec.n());
    for i in set.iter() {
        out.push_str(&format_digits(&spec.coords(i), spec.p()));
        out.push('\n');
    }
    out
}

/// Matrix file: `n` rows of `n` digits each.
pub fn parse_matrix(text: &str, p: u32) -> Result<FpSymMatrix> {
    let rows: Vec<Vec<u32>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_digits(l, p))
        .collect::<Result<_>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(QfaError::Parse("matrix rows must have n entries each".into()));
    }
    FpSymMatrix::new(p, n, rows.concat())
}

pub(crate) fn parse_header2(line: &str) -> Result<(u32, usize)> {
    let t: Vec<&str> = line.split_whitespace().collect();
    if t.len() != 2 {
        return Err(QfaError::Parse(format!("expected header \"p n\", got {line:?}")));
    }
    let p = t[0].parse().map_err(|_| QfaError::Parse(format!("bad prime {:?}", t[0])))?;
    let n = t[1].parse().map_err(|_| QfaError::Parse(format!("bad dimension {:?}", t[1])))?;
    Ok((p, n))
}

/// Digits either packed (`0122`) or whitespace separated (`0 1 12`).
pub fn parse_digits(line: &str, p: u32) -> Result<Vec<u32>> {
    let parse_one = |s: &str| -> Result<u32> {
        let d: u32 = s.parse().map_err(|_| QfaError::Parse(format!("bad digit {s:?}")))?;
        if d >= p {
            return Err(QfaError::Parse(format!("digit {d} out of range for p = {p}")));
        }
        Ok(d)
    };
    if line.contains(char::is_whitespace) || line.contains(',') {
        line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).map(parse_one).collect()
    } else {
        line.chars().map(|c| parse_one(&c.to_string())).collect()
    }
}

pub fn format_digits(coords: &[u32], p: u32) -> String {
    if p <= 10 {
        coords.iter().map(|d| char::from_digit(*d, 10).unwrap()).collect()
    } else {
        coords.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(p: u32, c: &[u32]) -> FpVector {
        FpVector::new(p, c.to_vec())
    }

    #[test]
    fn little_endian_indexing() {
        let g = GroupSpec::new(3, 2).unwrap();
        assert_eq!(g.index_of(&v(3, &[0, 0])).unwrap(), 0);
        assert_eq!(g.index_of(&v(3, &[1, 0])).unwrap(), 1);
        assert_eq!(g.index_of(&v(3, &[0, 1])).unwrap(), 3);
        for i in 0..9 {
            assert_eq!(g.index_of(&g.vector_of(i).unwrap()).unwrap(), i);
        }
        assert!(matches!(g.vector_of(9), Err(QfaError::Range { .. })));
        assert!(matches!(g.index_of(&v(3, &[1, 1, 1])), Err(QfaError::Shape(_))));
    }

    #[test]
    fn rejects_bad_groups() {
        assert!(matches!(GroupSpec::new(2, 3), Err(QfaError::Prime(2))));
        assert!(matches!(GroupSpec::new(9, 3), Err(QfaError::Prime(9))));
        assert!(matches!(GroupSpec::new(3, 40), Err(QfaError::Capacity { .. })));
    }

    #[test]
    fn table_arithmetic_matches_coordinates() {
        for (p, n) in [(3u32, 1usize), (3, 7), (5, 4), (7, 3), (11, 2)] {
            let g = GroupSpec::new(p, n).unwrap();
            let step = (g.order() / 97).max(1);
            for a in (0..g.order()).step_by(step) {
                for b in (0..g.order()).step_by(step + 3) {
                    let (va, vb) = (g.vector_of(a).unwrap(), g.vector_of(b).unwrap());
                    assert_eq!(g.add(a, b), g.index_of(&va.add(&vb)).unwrap());
                    assert_eq!(g.sub(a, b), g.index_of(&va.sub(&vb)).unwrap());
                    for s in 0..p {
                        assert_eq!(g.scale(s, a), g.index_of(&va.scale(s)).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn quad_examples() {
        let i3 = FpSymMatrix::identity(3, 3);
        assert_eq!(quad_eval(&i3, &v(3, &[1, 1, 1])).unwrap(), 0);
        assert_eq!(quad_eval(&i3, &v(3, &[1, 0, 0])).unwrap(), 1);
        let h = FpSymMatrix::new(3, 2, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(quad_eval(&h, &v(3, &[1, 1])).unwrap(), 2);
        assert!(quad_eval(&i3, &v(3, &[1, 1])).is_err());
        assert!(FpSymMatrix::new(3, 2, vec![0, 1, 2, 0]).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(matrix_rank(&FpSymMatrix::identity(3, 5)), 5);
        assert_eq!(matrix_rank(&FpSymMatrix::zero(3, 4)), 0);
        assert_eq!(matrix_rank(&FpSymMatrix::new(3, 2, vec![1, 1, 1, 1]).unwrap()), 1);
    }

    #[test]
    fn gauss_sum_examples() {
        let z = FpSymMatrix::zero(3, 3);
        let g = gauss_sum(&z, &FpVector::zero(3, 3)).unwrap();
        assert!((g - ComplexValue::new(1.0, 0.0)).norm() < COMPLEX_TOL);
        let g = gauss_sum(&z, &v(3, &[0, 1, 0])).unwrap();
        assert!(g.norm() < COMPLEX_TOL);
        for n in 1..=8 {
            let g = gauss_sum(&FpSymMatrix::identity(3, n), &FpVector::zero(3, n)).unwrap();
            assert!((g.norm() - 3f64.powf(-(n as f64) / 2.0)).abs() < COMPLEX_TOL, "n={n}");
        }
    }

    #[test]
    fn dft_examples() {
        let g = GroupSpec::new(3, 3).unwrap();
        let mut delta = vec![ComplexValue::new(0.0, 0.0); 27];
        delta[0] = ComplexValue::new(1.0, 0.0);
        for z in dft(&g, &delta).unwrap() {
            assert!((z - ComplexValue::new(1.0 / 27.0, 0.0)).norm() < COMPLEX_TOL);
        }
        let one = vec![ComplexValue::new(1.0, 0.0); 27];
        let h = dft(&g, &one).unwrap();
        assert!((h[0] - ComplexValue::new(1.0, 0.0)).norm() < COMPLEX_TOL);
        assert!(h[1..].iter().all(|z| z.norm() < COMPLEX_TOL));
    }

    #[test]
    fn dft_matches_direct_sum() {
        let g = GroupSpec::new(5, 2).unwrap();
        let f: Vec<ComplexValue> = (0..25).map(|i| ComplexValue::new((i * 7 % 11) as f64, (i % 3) as f64)).collect();
        let h = dft(&g, &f).unwrap();
        let roots = roots_of_unity(5);
        for t in 0..25 {
            let tc = g.coords(t);
            let mut s = ComplexValue::new(0.0, 0.0);
            for x in 0..25 {
                let e = g.dot(x, &tc) as usize;
                s += f[x] * roots[(5 - e) % 5];
            }
            assert!((h[t] - s / 25.0).norm() < 1e-12);
        }
    }

    #[test]
    fn subset_file_roundtrip() {
        let g = GroupSpec::new(3, 3).unwrap();
        let s = GroupSubset::from_indices(&g, [0, 5, 26]).unwrap();
        let text = write_subset(&s);
        assert_eq!(parse_subset(&text).unwrap(), s);
        assert!(parse_subset("3 2\n013\n").is_err());
        let m = parse_matrix("01\n10\n", 3).unwrap();
        assert_eq!(m.get(0, 1), 1);
        assert!(parse_matrix("01\n20\n", 3).is_err());
    }

    #[test]
    fn subset_ops() {
        let g = GroupSpec::new(3, 4).unwrap();
        let a = GroupSubset::from_fn(&g, |i| i % 5 == 0);
        let c = a.complement();
        assert_eq!(a.len() + c.len(), 81);
        assert!(a.intersection(&c).is_empty());
        assert_eq!(a.union(&c), GroupSubset::full(&g));
        assert_eq!(a.translate(7).len(), a.len());
        assert_eq!(a.iter().collect::<Vec<_>>(), (0..81).filter(|i| i % 5 == 0).collect::<Vec<_>>());
    }

    #[test]
    fn span_sizes() {
        let g = GroupSpec::new(3, 4).unwrap();
        let s = g.span(&[vec![1, 0, 0, 0], vec![0, 1, 1, 0], vec![1, 1, 1, 0]]);
        assert_eq!(s.len(), 9);
    }
}
