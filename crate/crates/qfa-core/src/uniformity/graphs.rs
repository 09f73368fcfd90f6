//! Explicit bipartite and multipartite graphs with deviation, octahedron
//! and homomorphism counts.
//!
//! Vertices carry the group element they stand for, so parts may overlap
//! as element sets. Rows are bitsets over the indices of the other part.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use super::MeasureReport;
use crate::detectors::bits::{self, Bits};
use crate::error::{invalid, shape, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: Vec<usize>,
    right: Vec<usize>,
    rows: Vec<Bits>,
}

impl BipartiteGraph {
    /// `edge` receives element ids, not part indices.
    pub fn from_fn(left: Vec<usize>, right: Vec<usize>, edge: impl Fn(usize, usize) -> bool + Sync) -> Self {
        let words = right.len().div_ceil(64);
        let rows = left
            .par_iter()
            .map(|&x| {
                let mut row = vec![0u64; words];
                for (j, &y) in right.iter().enumerate() {
                    if edge(x, y) {
                        bits::set(&mut row, j);
                    }
                }
                row
            })
            .collect();
        Self { left, right, rows }
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        bits::get(&self.rows[i], j)
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i]
    }

    pub fn degree(&self, i: usize) -> u64 {
        bits::count(&self.rows[i])
    }

    pub fn edge_count(&self) -> u64 {
        self.rows.iter().map(|r| bits::count(r)).sum()
    }

    /// Edge density; 0 for an empty part.
    pub fn density(&self) -> f64 {
        let total = self.left.len() as f64 * self.right.len() as f64;
        if total == 0.0 {
            0.0
        } else {
            self.edge_count() as f64 / total
        }
    }

    pub fn transpose(&self) -> Self {
        let words = self.left.len().div_ceil(64);
        let mut rows = vec![vec![0u64; words]; self.right.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for j in bits::ones(row) {
                bits::set(&mut rows[j], i);
            }
        }
        Self { left: self.right.clone(), right: self.left.clone(), rows }
    }

    /// Bitset over left indices of the neighbours of right vertex `j`.
    fn column(&self, j: usize) -> Bits {
        let mut out = vec![0u64; self.left.len().div_ceil(64)];
        for (i, row) in self.rows.iter().enumerate() {
            if bits::get(row, j) {
                bits::set(&mut out, i);
            }
        }
        out
    }
}

/// Parts plus bipartite graphs between some pairs `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartiteGraph {
    parts: Vec<Vec<usize>>,
    pairs: BTreeMap<(usize, usize), BipartiteGraph>,
}

impl PartiteGraph {
    pub fn new(parts: Vec<Vec<usize>>) -> Self {
        Self { parts, pairs: BTreeMap::new() }
    }

    /// Three parts with all three pair graphs, given as `12`, `13`, `23`.
    pub fn tripartite(g12: BipartiteGraph, g13: BipartiteGraph, g23: BipartiteGraph) -> Result<Self> {
        let mut g = Self::new(vec![g12.left.clone(), g12.right.clone(), g13.right.clone()]);
        g.set_pair(0, 1, g12)?;
        g.set_pair(0, 2, g13)?;
        g.set_pair(1, 2, g23)?;
        Ok(g)
    }

    pub fn set_pair(&mut self, i: usize, j: usize, g: BipartiteGraph) -> Result<()> {
        if i >= j || j >= self.parts.len() {
            return Err(invalid(format!("pair ({i}, {j}) is not an ordered pair of parts")));
        }
        if g.left != self.parts[i] || g.right != self.parts[j] {
            return Err(shape(format!("graph for pair ({i}, {j}) does not span those parts")));
        }
        self.pairs.insert((i, j), g);
        Ok(())
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&BipartiteGraph> {
        self.pairs.get(&(i, j))
    }

    fn triad(&self) -> Result<[&BipartiteGraph; 3]> {
        match (self.parts.len(), self.pair(0, 1), self.pair(0, 2), self.pair(1, 2)) {
            (3, Some(a), Some(b), Some(c)) => Ok([a, b, c]),
            _ => Err(invalid("expected three parts with all three pair graphs")),
        }
    }

    /// Calls `f(x, y, z)` (part indices) on every triangle.
    fn for_each_triangle(&self, mut f: impl FnMut(usize, usize, usize)) -> Result<()> {
        let [g12, g13, g23] = self.triad()?;
        for x in 0..self.parts[0].len() {
            for y in bits::ones(g12.row(x)) {
                for z in bits::ones(&bits::and(g13.row(x), g23.row(y))) {
                    f(x, y, z);
                }
            }
        }
        Ok(())
    }
}

/// Number of triangles of a three-part graph.
pub fn triangles(g: &PartiteGraph) -> Result<u64> {
    let [g12, g13, g23] = g.triad()?;
    Ok((0..g.parts[0].len())
        .into_par_iter()
        .map(|x| bits::ones(g12.row(x)).map(|y| bits::count(&bits::and(g13.row(x), g23.row(y)))).sum::<u64>())
        .sum())
}

/// Deviation of a bipartite graph from its own density.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Dev2 {
    /// `sum g(x0,y0) g(x0,y1) g(x1,y0) g(x1,y1) / (|X|^2 |Y|^2)`.
    pub deviation: f64,
    pub density: f64,
    pub edges: u64,
    pub left: usize,
    pub right: usize,
    /// The unnormalized sum scaled by `(|X||Y|)^4`, when it fits in `i128`.
    pub exact: Option<i128>,
}

impl Dev2 {
    /// The graph has `dev_2(eps)`, and `dev_2(eps, d)` when `d` is given.
    pub fn holds(&self, eps: f64, d: Option<f64>) -> bool {
        self.deviation <= eps && d.is_none_or(|d| (self.density - d).abs() < eps)
    }
}

fn dev2_from_sum(g: &BipartiteGraph, exact: Option<i128>, approx: f64) -> Dev2 {
    let n = (g.left.len() * g.right.len()) as f64;
    let deviation = if n == 0.0 {
        0.0
    } else {
        exact.map_or(approx, |e| e as f64) / n.powi(6)
    };
    Dev2 { deviation, density: g.density(), edges: g.edge_count(), left: g.left.len(), right: g.right.len(), exact }
}

/// `dev_2` through codegrees: `sum_{x0,x1} (sum_y g(x0,y) g(x1,y))^2`, in `O(|X|^2 |Y| / 64)`.
///
/// With `N = |X||Y|` and `E` edges, `N g` is the integer `N [xy in E] - E`,
/// so each inner sum is `N^2 codeg - N E (deg0 + deg1) + E^2 |Y|`.
pub fn dev2_measure(g: &BipartiteGraph) -> Result<Dev2> {
    let n = (g.left.len() * g.right.len()) as i128;
    let e = g.edge_count() as i128;
    let ny = g.right.len() as i128;
    let deg: Vec<i128> = (0..g.left.len()).map(|i| g.degree(i) as i128).collect();
    let rows: Vec<(Option<i128>, f64)> = (0..g.left.len())
        .into_par_iter()
        .map(|x0| {
            let mut exact = Some(0i128);
            let mut approx = 0.0f64;
            for x1 in 0..g.left.len() {
                let codeg = g.rows[x0].iter().zip(&g.rows[x1]).map(|(a, b)| (a & b).count_ones() as i128).sum::<i128>();
                let c = n * n * codeg - n * e * (deg[x0] + deg[x1]) + e * e * ny;
                approx += (c as f64) * (c as f64);
                exact = exact.and_then(|s| c.checked_mul(c).and_then(|cc| s.checked_add(cc)));
            }
            (exact, approx)
        })
        .collect();
    let exact = rows.iter().try_fold(0i128, |s, (r, _)| r.and_then(|r| s.checked_add(r)));
    let approx = rows.iter().map(|(_, a)| a).sum();
    Ok(dev2_from_sum(g, exact, approx))
}

/// The four-fold deviation sum evaluated term by term; parts of at most 40 vertices.
pub fn dev2_naive(g: &BipartiteGraph) -> Result<Dev2> {
    if g.left.len() > 40 || g.right.len() > 40 {
        return Err(invalid("the naive deviation sum is limited to parts of 40 vertices"));
    }
    let n = (g.left.len() * g.right.len()) as i128;
    let e = g.edge_count() as i128;
    let w = |x: usize, y: usize| if g.has_edge(x, y) { n - e } else { -e };
    let mut total = 0i128;
    for x0 in 0..g.left.len() {
        for x1 in 0..g.left.len() {
            for y0 in 0..g.right.len() {
                for y1 in 0..g.right.len() {
                    total += w(x0, y0) * w(x0, y1) * w(x1, y0) * w(x1, y1);
                }
            }
        }
    }
    Ok(dev2_from_sum(g, Some(total), total as f64))
}

/// An octahedron sum for a function `weight / scale` supported on triangles.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OctValue {
    /// Sum of the integer weights' eight-fold products, when it fits in `i128`.
    pub exact: Option<i128>,
    pub scale: i64,
    /// `oct(f)` for `f = weight / scale`.
    pub value: f64,
    /// `oct(f) / (|X|^2 |Y|^2 |Z|^2)`.
    pub normalized: f64,
}

fn oct_value(g: &PartiteGraph, exact: Option<i128>, approx: f64, scale: i64) -> OctValue {
    let value = exact.map_or(approx, |e| e as f64) / (scale as f64).powi(8);
    let denom: f64 = g.parts.iter().map(|p| (p.len() as f64).powi(2)).product();
    let normalized = if denom == 0.0 { 0.0 } else { value / denom };
    OctValue { exact, scale, value, normalized }
}

/// `oct(f) = sum_{x,x',y,y'} (sum_z f(x,y,z) f(x,y',z) f(x',y,z) f(x',y',z))^2`.
///
/// `weight(x, y, z)` takes part indices and is only consulted on triangles;
/// off triangles the function is zero, which prunes the inner loops to
/// common neighbourhoods.
pub fn oct_measure_weights(g: &PartiteGraph, weight: &(dyn Fn(usize, usize, usize) -> i64 + Sync), scale: i64) -> Result<OctValue> {
    if scale <= 0 {
        return Err(invalid("the weight scale must be positive"));
    }
    let [g12, g13, g23] = g.triad()?;
    let nx = g.parts[0].len();
    let rows: Vec<(Option<i128>, f64)> = (0..nx)
        .into_par_iter()
        .map(|x0| {
            let mut exact = Some(0i128);
            let mut approx = 0.0f64;
            for x1 in 0..nx {
                let ys = bits::and(g12.row(x0), g12.row(x1));
                if bits::is_zero(&ys) {
                    continue;
                }
                let zs = bits::and(g13.row(x0), g13.row(x1));
                for y0 in bits::ones(&ys) {
                    let zs0 = bits::and(&zs, g23.row(y0));
                    if bits::is_zero(&zs0) {
                        continue;
                    }
                    for y1 in bits::ones(&ys) {
                        let mut s = Some(0i128);
                        let mut sa = 0.0f64;
                        for z in bits::ones(&bits::and(&zs0, g23.row(y1))) {
                            let w = [weight(x0, y0, z), weight(x0, y1, z), weight(x1, y0, z), weight(x1, y1, z)];
                            sa += w.iter().map(|&v| v as f64).product::<f64>();
                            s = s.and_then(|s| {
                                w.iter().try_fold(1i128, |acc, &v| acc.checked_mul(v as i128)).and_then(|t| s.checked_add(t))
                            });
                        }
                        approx += sa * sa;
                        exact = exact.and_then(|e| s.and_then(|s| s.checked_mul(s)).and_then(|ss| e.checked_add(ss)));
                    }
                }
            }
            (exact, approx)
        })
        .collect();
    let exact = rows.iter().try_fold(0i128, |s, (r, _)| r.and_then(|r| s.checked_add(r)));
    let approx = rows.iter().map(|(_, a)| a).sum();
    Ok(oct_value(g, exact, approx, scale))
}

/// The six-fold octahedron sum term by term; parts of at most 8 vertices.
pub fn oct_naive(g: &PartiteGraph, weight: &(dyn Fn(usize, usize, usize) -> i64 + Sync), scale: i64) -> Result<OctValue> {
    let [g12, g13, g23] = g.triad()?;
    if g.parts.iter().any(|p| p.len() > 8) {
        return Err(invalid("the naive octahedron sum is limited to parts of 8 vertices"));
    }
    let f = |x: usize, y: usize, z: usize| -> i128 {
        if g12.has_edge(x, y) && g13.has_edge(x, z) && g23.has_edge(y, z) {
            weight(x, y, z) as i128
        } else {
            0
        }
    };
    let (nx, ny, nz) = (g.parts[0].len(), g.parts[1].len(), g.parts[2].len());
    let mut total = 0i128;
    for x in 0..nx {
        for x1 in 0..nx {
            for y in 0..ny {
                for y1 in 0..ny {
                    for z in 0..nz {
                        for z1 in 0..nz {
                            total += f(x, y, z)
                                * f(x, y1, z)
                                * f(x1, y, z)
                                * f(x1, y1, z)
                                * f(x, y, z1)
                                * f(x, y1, z1)
                                * f(x1, y, z1)
                                * f(x1, y1, z1);
                        }
                    }
                }
            }
        }
    }
    Ok(oct_value(g, Some(total), total as f64, scale))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Ternary quasirandomness of a 3-graph `H` relative to a three-part graph `G`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Dev23 {
    pub triangles: u64,
    pub hyperedges: u64,
    pub d3: f64,
    /// Densities of the pair graphs `12`, `13`, `23`.
    pub densities: [f64; 3],
    /// Common pair density: the mean of `densities`.
    pub d2: f64,
    pub dev2: [f64; 3],
    /// Smallest `eps_2` for which every pair has `dev_2(eps_2; d2)`.
    pub eps2: f64,
    pub oct: OctValue,
    /// `oct(h) / (d2^12 |V1|^2 |V2|^2 |V3|^2)`.
    pub eps1: f64,
}

impl Dev23 {
    pub fn holds(&self, eps1: f64, eps2: f64) -> bool {
        self.eps1 <= eps1 && self.eps2 <= eps2
    }
}

/// `dev_{2,3}` of `(H, G)` where `H` keeps the triangles of `G` on which `h`
/// (element ids) holds.
///
/// The balanced function is `1 - d3` on hyperedges, `-d3` on the other
/// triangles and zero elsewhere; it is scaled to integers by the triangle count.
pub fn dev23_measure(g: &PartiteGraph, h: &(dyn Fn(usize, usize, usize) -> bool + Sync)) -> Result<Dev23> {
    let pairs = g.triad()?;
    let parts = &g.parts;
    let mut t = 0i64;
    let mut r = 0i64;
    g.for_each_triangle(|x, y, z| {
        t += 1;
        if h(parts[0][x], parts[1][y], parts[2][z]) {
            r += 1;
        }
    })?;
    let d = gcd(t, r).max(1);
    let (scale, hit, miss) = (t.max(1) / d, (t - r) / d, -r / d);
    let weight = move |x: usize, y: usize, z: usize| if h(parts[0][x], parts[1][y], parts[2][z]) { hit } else { miss };
    let oct = oct_measure_weights(g, &weight, scale)?;
    let densities = pairs.map(|p| p.density());
    let d2 = densities.iter().sum::<f64>() / 3.0;
    let dev2 = [dev2_measure(pairs[0])?.deviation, dev2_measure(pairs[1])?.deviation, dev2_measure(pairs[2])?.deviation];
    let eps2 = (0..3).map(|i| dev2[i].max((densities[i] - d2).abs())).fold(0.0, f64::max);
    let eps1 = if d2 > 0.0 {
        oct.normalized / d2.powi(12)
    } else if oct.normalized > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(Dev23 {
        triangles: t as u64,
        hyperedges: r as u64,
        d3: if t == 0 { 0.0 } else { r as f64 / t as f64 },
        densities,
        d2,
        dev2,
        eps2,
        oct,
        eps1,
    })
}

/// Triples `(u1, v1, w1)` such that all eight `(u_a, v_b, w_c)` are triangles.
///
/// `base` holds part indices; a base that is not a triangle gives zero.
pub fn k222_count(g: &PartiteGraph, base: (usize, usize, usize)) -> Result<u64> {
    let [g12, g13, g23] = g.triad()?;
    let (u0, v0, w0) = base;
    if u0 >= g.parts[0].len() || v0 >= g.parts[1].len() || w0 >= g.parts[2].len() {
        return Err(invalid("base triple out of range"));
    }
    if !(g12.has_edge(u0, v0) && g13.has_edge(u0, w0) && g23.has_edge(v0, w0)) {
        return Ok(0);
    }
    let v_to_w0 = g23.column(w0);
    let mut total = 0u64;
    for u1 in 0..g.parts[0].len() {
        if !(g12.has_edge(u1, v0) && g13.has_edge(u1, w0)) {
            continue;
        }
        let mut vs = bits::and(g12.row(u0), g12.row(u1));
        bits::and_assign(&mut vs, &v_to_w0);
        let zs = bits::and(g13.row(u0), g13.row(u1));
        let zs0 = bits::and(&zs, g23.row(v0));
        for v1 in bits::ones(&vs) {
            total += bits::count(&bits::and(&zs0, g23.row(v1)));
        }
    }
    Ok(total)
}

/// Number of tuples `(v_i in V_i)` with `v_i v_j` an edge for every pattern pair.
pub fn hom_count(g: &PartiteGraph, pattern: &[(usize, usize)]) -> Result<u64> {
    let t = g.parts.len();
    let mut by_target: Vec<Vec<(usize, &BipartiteGraph)>> = vec![Vec::new(); t];
    for &(a, b) in pattern {
        let (i, j) = (a.min(b), a.max(b));
        let pg = g.pair(i, j).ok_or_else(|| invalid(format!("no graph on the pattern pair ({i}, {j})")))?;
        by_target[j].push((i, pg));
    }
    if t == 0 {
        return Ok(1);
    }
    fn go(g: &PartiteGraph, by_target: &[Vec<(usize, &BipartiteGraph)>], chosen: &mut Vec<usize>) -> u64 {
        let j = chosen.len();
        let mut cands = bits::full(g.parts[j].len());
        for &(i, pg) in &by_target[j] {
            bits::and_assign(&mut cands, pg.row(chosen[i]));
        }
        if j + 1 == g.parts.len() {
            return bits::count(&cands);
        }
        let mut total = 0;
        for v in bits::ones(&cands) {
            chosen.push(v);
            total += go(g, by_target, chosen);
            chosen.pop();
        }
        total
    }
    Ok(go(g, &by_target, &mut Vec::new()))
}

/// Compares a homomorphism count with `prod d_ij * prod |V_i|`; the measured
/// value is `|count / predicted - 1|`.
pub fn hom_count_check(g: &PartiteGraph, pattern: &[(usize, usize)], tolerance: f64) -> Result<MeasureReport> {
    let start = Instant::now();
    let count = hom_count(g, pattern)?;
    let mut predicted: f64 = g.parts.iter().map(|p| p.len() as f64).product();
    for &(a, b) in pattern {
        predicted *= g.pair(a.min(b), a.max(b)).map_or(0.0, BipartiteGraph::density);
    }
    let measured = if predicted == 0.0 {
        if count == 0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (count as f64 / predicted - 1.0).abs()
    };
    Ok(MeasureReport::new("hom-count", measured, tolerance, format!("|count/prediction - 1| <= {tolerance}"), start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(rng: &mut ChaCha8Rng, nl: usize, nr: usize, d: f64) -> BipartiteGraph {
        let edges: Vec<Vec<bool>> = (0..nl).map(|_| (0..nr).map(|_| rng.gen_bool(d)).collect()).collect();
        BipartiteGraph::from_fn((0..nl).collect(), (0..nr).collect(), |x, y| edges[x][y])
    }

    fn random_triad(rng: &mut ChaCha8Rng, sizes: [usize; 3], d: f64) -> PartiteGraph {
        let g12 = random_graph(rng, sizes[0], sizes[1], d);
        let g13 = random_graph(rng, sizes[0], sizes[2], d);
        let g23 = random_graph(rng, sizes[1], sizes[2], d);
        PartiteGraph::tripartite(g12, g13, g23).unwrap()
    }

    fn complete(a: usize, b: usize) -> BipartiteGraph {
        BipartiteGraph::from_fn((0..a).collect(), (0..b).collect(), |_, _| true)
    }

    #[test]
    fn complete_and_empty_graphs_have_no_deviation() {
        let full = complete(7, 9);
        assert_eq!(dev2_measure(&full).unwrap().exact, Some(0));
        let empty = BipartiteGraph::from_fn((0..7).collect(), (0..9).collect(), |_, _| false);
        assert_eq!(dev2_measure(&empty).unwrap().exact, Some(0));
        assert_eq!(empty.density(), 0.0);
    }

    #[test]
    fn complete_triad_counts() {
        let g = PartiteGraph::tripartite(complete(3, 4), complete(3, 5), complete(4, 5)).unwrap();
        assert_eq!(triangles(&g).unwrap(), 60);
        assert_eq!(hom_count(&g, &[(0, 1), (0, 2), (1, 2)]).unwrap(), 60);
        for base in [(0, 0, 0), (2, 3, 4)] {
            assert_eq!(k222_count(&g, base).unwrap(), 60);
        }
        let r = hom_count_check(&g, &[(0, 1), (0, 2), (1, 2)], 1e-12).unwrap();
        assert_eq!(r.status, super::super::Status::Pass);
    }

    #[test]
    fn balanced_function_of_full_hypergraph_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_triad(&mut rng, [6, 6, 6], 0.6);
        let d = dev23_measure(&g, &|_, _, _| true).unwrap();
        assert_eq!(d.oct.exact, Some(0));
        assert_eq!(d.d3, 1.0);
        let d = dev23_measure(&g, &|_, _, _| false).unwrap();
        assert_eq!(d.oct.exact, Some(0));
        assert_eq!(d.hyperedges, 0);
    }

    #[test]
    fn k222_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = random_triad(&mut rng, [5, 6, 4], 0.7);
        let [g12, g13, g23] = g.triad().unwrap();
        let tri = |u: usize, v: usize, w: usize| g12.has_edge(u, v) && g13.has_edge(u, w) && g23.has_edge(v, w);
        for u0 in 0..5 {
            for v0 in 0..6 {
                for w0 in 0..4 {
                    let mut brute = 0;
                    for u1 in 0..5 {
                        for v1 in 0..6 {
                            for w1 in 0..4 {
                                let all = (0..8).all(|e: usize| {
                                    tri(
                                        if e & 1 == 0 { u0 } else { u1 },
                                        if e & 2 == 0 { v0 } else { v1 },
                                        if e & 4 == 0 { w0 } else { w1 },
                                    )
                                });
                                brute += all as u64;
                            }
                        }
                    }
                    assert_eq!(k222_count(&g, (u0, v0, w0)).unwrap(), brute);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn dev2_fast_equals_naive(seed in any::<u64>(), nl in 1usize..=20, nr in 1usize..=20, d in 0.05f64..0.95) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_graph(&mut rng, nl, nr, d);
            let fast = dev2_measure(&g).unwrap();
            let slow = dev2_naive(&g).unwrap();
            prop_assert_eq!(fast.exact, slow.exact);
            prop_assert!(fast.deviation >= 0.0);
        }

        #[test]
        fn oct_fast_equals_naive(seed in any::<u64>(), a in 1usize..=8, b in 1usize..=8, c in 1usize..=8, d in 0.3f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_triad(&mut rng, [a, b, c], d);
            let table: Vec<i64> = (0..a * b * c).map(|_| rng.gen_range(-3..=3)).collect();
            let w = |x: usize, y: usize, z: usize| table[(x * b + y) * c + z];
            let fast = oct_measure_weights(&g, &w, 3).unwrap();
            let slow = oct_naive(&g, &w, 3).unwrap();
            prop_assert_eq!(fast.exact, slow.exact);
            prop_assert!(fast.exact.unwrap() >= 0);
        }

        #[test]
        fn hom_count_triangles_agree(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_triad(&mut rng, [7, 5, 6], 0.5);
            prop_assert_eq!(hom_count(&g, &[(0, 1), (1, 2), (0, 2)]).unwrap(), triangles(&g).unwrap());
        }
    }
}
