//! Dense linear algebra over a prime field.
//!
//! Rows are plain `Vec<u32>` with entries already reduced mod `p`.

pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = (a % p) as u64;
    let m = p as u64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u32
}

/// Reduced row echelon form.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn echelon(rows: &[Vec<u32>], ncols: usize, p: u32) -> Echelon {
    let mut m: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = inv_mod(m[r][c], p) as u64;
        for x in m[r].iter_mut() {
            *x = (*x as u64 * inv % p as u64) as u32;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c] as u64;
                for j in 0..ncols {
                    let sub = f * m[r][j] as u64 % p as u64;
                    m[i][j] = ((m[i][j] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Echelon { rows: m, pivots }
}

pub fn rank(rows: &[Vec<u32>], ncols: usize, p: u32) -> usize {
    echelon(rows, ncols, p).rank()
}

/// Basis of the right kernel `{x : Ax = 0}`.
pub fn kernel(rows: &[Vec<u32>], ncols: usize, p: u32) -> Vec<Vec<u32>> {
    let e = echelon(rows, ncols, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !e.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u32; ncols];
            v[f] = 1;
            for (row, &pc) in e.rows.iter().zip(&e.pivots) {
                v[pc] = (p - row[f]) % p;
            }
            v
        })
        .collect()
}

/// Whether `v` lies in the row span of `rows`.
pub fn in_span(rows: &[Vec<u32>], v: &[u32], p: u32) -> bool {
    let n = v.len();
    let base = rank(rows, n, p);
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    rank(&ext, n, p) == base
}

/// A maximal linearly independent subfamily, as indices into `rows`, greedy in order.
pub fn independent_subset(rows: &[Vec<u32>], ncols: usize, p: u32) -> Vec<usize> {
    let mut kept: Vec<Vec<u32>> = Vec::new();
    let mut idx = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        kept.push(r.clone());
        if rank(&kept, ncols, p) == kept.len() {
            idx.push(i);
        } else {
            kept.pop();
        }
    }
    idx
}

/// Extend an independent family to a basis of `F_p^ncols` using standard vectors.
pub fn complete_basis(rows: &[Vec<u32>], ncols: usize, p: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = rows.to_vec();
    for i in 0..ncols {
        let mut e = vec![0u32; ncols];
        e[i] = 1;
        out.push(e);
        if rank(&out, ncols, p) < out.len() {
            out.pop();
        }
    }
    out
}

/// Solve `x A = b` for a row vector `x`, where `A` has the given rows.
pub fn solve_left(rows: &[Vec<u32>], b: &[u32], p: u32) -> Option<Vec<u32>> {
    let k = rows.len();
    let n = b.len();
    // Transpose: columns of A^T are the rows of A; augment with b.
    let t: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            let mut r: Vec<u32> = rows.iter().map(|row| row[j] % p).collect();
            r.push(b[j] % p);
            r
        })
        .collect();
    if t.is_empty() {
        return Some(vec![0; k]);
    }
    let e = echelon(&t, k + 1, p);
    if e.pivots.contains(&k) {
        return None;
    }
    let mut x = vec![0u32; k];
    for (row, &pc) in e.rows.iter().zip(&e.pivots) {
        x[pc] = row[k];
    }
    Some(x)
}

pub fn mat_vec(rows: &[Vec<u32>], v: &[u32], p: u32) -> Vec<u32> {
    rows.iter()
        .map(|r| (r.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() % p as u64) as u32)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel_agree() {
        let rows = vec![vec![1, 2, 0], vec![2, 1, 0]];
        // second row is 2x the first mod 3
        assert_eq!(rank(&rows, 3, 3), 1);
        let k = kernel(&rows, 3, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&rows, v, 3).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn inverses() {
        for p in [3u32, 5, 7, 11] {
            for a in 1..p {
                assert_eq!(a * inv_mod(a, p) % p, 1);
            }
        }
    }

    #[test]
    fn solve_left_roundtrip() {
        let rows = vec![vec![1, 0, 2], vec![0, 1, 1]];
        let b = vec![2, 1, 2];
        let x = solve_left(&rows, &b, 3).unwrap();
        let mut acc = vec![0u32; 3];
        for (xi, r) in x.iter().zip(&rows) {
            for j in 0..3 {
                acc[j] = (acc[j] + xi * r[j]) % 3;
            }
        }
        assert_eq!(acc, b);
        assert!(solve_left(&rows, &[0, 0, 1], 3).is_none());
    }

    #[test]
    fn complete_basis_is_full_rank() {
        let b = complete_basis(&[vec![1, 1, 1, 0]], 4, 3);
        assert_eq!(b.len(), 4);
        assert_eq!(rank(&b, 4, 3), 4);
    }
}
