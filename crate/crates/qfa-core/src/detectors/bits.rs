//! Raw bitset helpers shared by the searches.

use rayon::prelude::*;

use crate::fp::{GroupSpec, GroupSubset};

pub(crate) type Bits = Vec<u64>;

/// For every group element `t`, the bitset of `S - t = {x : x + t in S}`.
pub(crate) struct ShiftTable {
    words: usize,
    data: Vec<u64>,
}

impl ShiftTable {
    pub(crate) fn new(set: &GroupSubset) -> Self {
        let spec = set.spec();
        let order = spec.order();
        let words = order.div_ceil(64);
        let mut data = vec![0u64; words * order];
        data.par_chunks_mut(words).enumerate().for_each(|(t, row)| {
            for s in set.iter() {
                let x = spec.sub(s, t);
                row[x >> 6] |= 1 << (x & 63);
            }
        });
        Self { words, data }
    }

    #[inline]
    pub(crate) fn row(&self, t: usize) -> &[u64] {
        &self.data[t * self.words..(t + 1) * self.words]
    }
}

pub(crate) fn full(order: usize) -> Bits {
    let mut v = vec![!0u64; order.div_ceil(64)];
    if order % 64 != 0 {
        *v.last_mut().unwrap() = (1u64 << (order % 64)) - 1;
    }
    v
}

pub(crate) fn and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

pub(crate) fn and_assign(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x &= y;
    }
}

pub(crate) fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&w| w == 0)
}

pub(crate) fn first(a: &[u64]) -> Option<usize> {
    a.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

#[inline]
pub(crate) fn get(a: &[u64], i: usize) -> bool {
    a[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
pub(crate) fn set(a: &mut [u64], i: usize) {
    a[i >> 6] |= 1 << (i & 63);
}

pub(crate) fn count(a: &[u64]) -> u64 {
    a.iter().map(|w| w.count_ones() as u64).sum()
}

pub(crate) fn ones(a: &[u64]) -> impl Iterator<Item = usize> + '_ {
    a.iter().enumerate().flat_map(|(w, &word)| {
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

/// `{s - z : s in a}`.
pub(crate) fn shift_down(spec: &GroupSpec, a: &[u64], z: usize) -> Bits {
    let mut out = vec![0u64; a.len()];
    for s in ones(a) {
        set(&mut out, spec.sub(s, z));
    }
    out
}
