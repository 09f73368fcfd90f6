//! Sum graphs, bilinear-level graphs between atoms, and the label of the
//! atom that receives all pair or triad sums.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graphs::{oct_measure_weights, BipartiteGraph, OctValue, PartiteGraph};
use super::MeasureReport;
use crate::error::{invalid, shape, Result};
use crate::factors::{atom_codes, code_of, decode, AtomLabel, Factor, QuadraticFactor};
use crate::fp::{GroupSpec, GroupSubset};

/// `(x, y)` is an edge iff `x + y in A`.
#[derive(Debug, Clone)]
pub struct SumGraph2<'a> {
    set: &'a GroupSubset,
}

impl SumGraph2<'_> {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.set.contains(self.set.spec().add(x, y))
    }

    pub fn restrict(&self, left: Vec<usize>, right: Vec<usize>) -> BipartiteGraph {
        BipartiteGraph::from_fn(left, right, |x, y| self.contains(x, y))
    }
}

/// `(x, y, z)` is an edge iff `x + y + z in A`.
#[derive(Debug, Clone)]
pub struct SumGraph3<'a> {
    set: &'a GroupSubset,
}

impl SumGraph3<'_> {
    pub fn contains(&self, x: usize, y: usize, z: usize) -> bool {
        let spec = self.set.spec();
        self.set.contains(spec.add(spec.add(x, y), z))
    }
}

pub fn sum_graph2(set: &GroupSubset) -> SumGraph2<'_> {
    SumGraph2 { set }
}

pub fn sum_graph3(set: &GroupSubset) -> SumGraph3<'_> {
    SumGraph3 { set }
}

/// Atom codes, coordinates and `M_i y` for every element, so that label and
/// bilinear lookups are table reads plus `q` dot products.
#[derive(Debug, Clone)]
pub struct BilinearTable {
    spec: GroupSpec,
    ell: usize,
    q: usize,
    codes: Vec<usize>,
    coords: Vec<u32>,
    images: Vec<u32>,
}

impl BilinearTable {
    pub fn new(spec: &GroupSpec, b: &QuadraticFactor) -> Result<Self> {
        let codes = atom_codes(spec, b)?;
        let n = spec.n();
        let coords: Vec<u32> = (0..spec.order()).flat_map(|x| spec.coords(x)).collect();
        let images: Vec<u32> = (0..spec.order())
            .into_par_iter()
            .flat_map_iter(|y| {
                let c = spec.coords(y);
                b.quadratic.iter().flat_map(move |m| m.apply(&c)).collect::<Vec<_>>()
            })
            .collect();
        debug_assert_eq!(images.len(), spec.order() * b.q() * n);
        Ok(Self { spec: spec.clone(), ell: b.ell(), q: b.q(), codes, coords, images })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `p^(ell + q)`.
    pub fn num_labels(&self) -> usize {
        (self.spec.p() as usize).pow((self.ell + self.q) as u32)
    }

    pub fn label_code(&self, x: usize) -> usize {
        self.codes[x]
    }

    pub fn atom(&self, code: usize) -> Vec<usize> {
        (0..self.spec.order()).filter(|&x| self.codes[x] == code).collect()
    }

    /// Code of `(x^T M_1 y, ..., x^T M_q y)`.
    pub fn beta_code(&self, x: usize, y: usize) -> usize {
        let (n, p) = (self.spec.n(), self.spec.p() as u64);
        let xc = &self.coords[x * n..(x + 1) * n];
        let mut code = 0usize;
        for i in (0..self.q).rev() {
            let img = &self.images[(y * self.q + i) * n..(y * self.q + i + 1) * n];
            let v = xc.iter().zip(img).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() % p;
            code = code * p as usize + v as usize;
        }
        code
    }

    fn check_label(&self, l: &AtomLabel) -> Result<()> {
        let p = self.spec.p();
        if l.linear.len() != self.ell || l.quadratic.len() != self.q || l.flat().iter().any(|&v| v >= p) {
            return Err(shape("label does not match the factor"));
        }
        Ok(())
    }

    fn check_values(&self, b: &[u32]) -> Result<()> {
        if b.len() != self.q || b.iter().any(|&v| v >= self.spec.p()) {
            return Err(shape("bilinear label does not match the factor"));
        }
        Ok(())
    }
}

/// Code of the sum label: every atom label added, plus twice every bilinear label
/// on the quadratic coordinates.
fn sigma_code(p: u32, ell: usize, atoms: &[&[u32]], betas: &[&[u32]]) -> usize {
    let len = atoms[0].len();
    let mut code = 0usize;
    for i in (0..len).rev() {
        let mut v: u64 = atoms.iter().map(|a| a[i] as u64).sum();
        if i >= ell {
            v += 2 * betas.iter().map(|b| b[i - ell] as u64).sum::<u64>();
        }
        code = code * p as usize + (v % p as u64) as usize;
    }
    code
}

/// Two atoms and a bilinear label `b12`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairDescriptor {
    pub atoms: [AtomLabel; 2],
    pub b12: Vec<u32>,
}

impl PairDescriptor {
    /// Label of the atom holding every `x + y` over edges:
    /// linear part `a1 + a2`, quadratic part `b1 + b2 + 2 b12`.
    pub fn sigma(&self, p: u32) -> AtomLabel {
        let ell = self.atoms[0].linear.len();
        let flat = self.atoms.clone().map(|a| a.flat());
        let code = sigma_code(p, ell, &[&flat[0], &flat[1]], &[&self.b12]);
        AtomLabel::from_code(code, p, ell, self.b12.len())
    }

    /// `code(a1) + P code(a2) + P^2 code(b12)` with `P = p^(ell + q)`.
    pub fn code(&self, p: u32) -> usize {
        let big = (p as usize).pow(self.atoms[0].flat().len() as u32);
        self.atoms[0].code(p) + big * (self.atoms[1].code(p) + big * code_of(&self.b12, p))
    }

    pub fn from_code(code: usize, p: u32, ell: usize, q: usize) -> Self {
        let big = (p as usize).pow((ell + q) as u32);
        Self {
            atoms: [AtomLabel::from_code(code % big, p, ell, q), AtomLabel::from_code(code / big % big, p, ell, q)],
            b12: decode(code / big / big, p, q),
        }
    }

    pub fn count(p: u32, ell: usize, q: usize) -> usize {
        (p as usize).pow((2 * ell + 3 * q) as u32)
    }
}

/// Three atoms and bilinear labels for the pairs `12`, `13`, `23`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriadDescriptor {
    pub atoms: [AtomLabel; 3],
    pub b12: Vec<u32>,
    pub b13: Vec<u32>,
    pub b23: Vec<u32>,
}

impl TriadDescriptor {
    /// Linear part `a1 + a2 + a3`, quadratic part `b1 + b2 + b3 + 2(b12 + b13 + b23)`.
    pub fn sigma(&self, p: u32) -> AtomLabel {
        let ell = self.atoms[0].linear.len();
        let flat = self.atoms.clone().map(|a| a.flat());
        let code = sigma_code(p, ell, &[&flat[0], &flat[1], &flat[2]], &[&self.b12, &self.b13, &self.b23]);
        AtomLabel::from_code(code, p, ell, self.b12.len())
    }

    pub fn code(&self, p: u32) -> usize {
        let big = (p as usize).pow(self.atoms[0].flat().len() as u32);
        let pq = (p as usize).pow(self.b12.len() as u32);
        let b = code_of(&self.b12, p) + pq * (code_of(&self.b13, p) + pq * code_of(&self.b23, p));
        self.atoms[0].code(p) + big * (self.atoms[1].code(p) + big * (self.atoms[2].code(p) + big * b))
    }

    pub fn from_code(code: usize, p: u32, ell: usize, q: usize) -> Self {
        let big = (p as usize).pow((ell + q) as u32);
        let pq = (p as usize).pow(q as u32);
        let atom = |c: usize| AtomLabel::from_code(c % big, p, ell, q);
        let b = code / big / big / big;
        Self {
            atoms: [atom(code), atom(code / big), atom(code / big / big)],
            b12: decode(b % pq, p, q),
            b13: decode(b / pq % pq, p, q),
            b23: decode(b / pq / pq, p, q),
        }
    }

    pub fn count(p: u32, ell: usize, q: usize) -> usize {
        (p as usize).pow((3 * ell + 6 * q) as u32)
    }
}

/// Pairs `(x, y)` with `x in B(atom1)`, `y in B(atom2)` and `x^T M_i y = b_i` for all `i`.
pub fn beta_graph(table: &BilinearTable, atom1: &AtomLabel, atom2: &AtomLabel, b: &[u32]) -> Result<BipartiteGraph> {
    table.check_label(atom1)?;
    table.check_label(atom2)?;
    table.check_values(b)?;
    let p = table.spec.p();
    let want = code_of(b, p);
    Ok(BipartiteGraph::from_fn(table.atom(atom1.code(p)), table.atom(atom2.code(p)), |x, y| table.beta_code(x, y) == want))
}

/// The bipartite graph of a pair descriptor.
pub fn pair_graph(table: &BilinearTable, e: &PairDescriptor) -> Result<BipartiteGraph> {
    beta_graph(table, &e.atoms[0], &e.atoms[1], &e.b12)
}

/// The three-part graph of a triad descriptor.
pub fn triad_graph(table: &BilinearTable, d: &TriadDescriptor) -> Result<PartiteGraph> {
    let [l1, l2, l3] = &d.atoms;
    PartiteGraph::tripartite(beta_graph(table, l1, l2, &d.b12)?, beta_graph(table, l1, l3, &d.b13)?, beta_graph(table, l2, l3, &d.b23)?)
}

/// Outcome of checking that pair and triple sums land in the predicted atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MembershipCount {
    pub pairs: u64,
    pub pair_failures: u64,
    pub triples: u64,
    pub triple_failures: u64,
}

/// Every pair and every triple of elements lies in exactly one descriptor's
/// graph; checks that its sum carries that descriptor's sum label.
pub fn sigma_membership_exhaustive(table: &BilinearTable) -> Result<MembershipCount> {
    let spec = &table.spec;
    let order = spec.order();
    if (order as u128).pow(3) > 20_000_000 {
        return Err(invalid("exhaustive triple check is limited to groups of order at most 271"));
    }
    let p = spec.p();
    let (ell, q) = (table.ell, table.q);
    let labels: Vec<Vec<u32>> = (0..order).map(|x| decode(table.codes[x], p, ell + q)).collect();
    let betas: Vec<Vec<u32>> =
        (0..order * order).into_par_iter().map(|xy| decode(table.beta_code(xy / order, xy % order), p, q)).collect();
    let beta = |x: usize, y: usize| betas[x * order + y].as_slice();
    let mut out = MembershipCount { pairs: 0, pair_failures: 0, triples: 0, triple_failures: 0 };
    for x in 0..order {
        for y in 0..order {
            out.pairs += 1;
            if sigma_code(p, ell, &[&labels[x], &labels[y]], &[beta(x, y)]) != table.codes[spec.add(x, y)] {
                out.pair_failures += 1;
            }
        }
    }
    let fails: u64 = (0..order)
        .into_par_iter()
        .map(|x| {
            let mut fails = 0u64;
            for y in 0..order {
                let xy = spec.add(x, y);
                for z in 0..order {
                    let code = sigma_code(p, ell, &[&labels[x], &labels[y], &labels[z]], &[beta(x, y), beta(x, z), beta(y, z)]);
                    if code != table.codes[spec.add(xy, z)] {
                        fails += 1;
                    }
                }
            }
            fails
        })
        .sum();
    out.triples = (order as u64).pow(3);
    out.triple_failures = fails;
    Ok(out)
}

/// Edge counts of the sum graph on one pair descriptor's graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTransfer {
    pub descriptor: PairDescriptor,
    pub edges: u64,
    pub hits: u64,
    /// Density of `A` on the atom labelled by the descriptor's sum label.
    pub atom_density: f64,
}

impl PairTransfer {
    /// `|hits / edges - atom density|`, or 0 for an empty graph.
    pub fn difference(&self) -> f64 {
        if self.edges == 0 {
            0.0
        } else {
            (self.hits as f64 / self.edges as f64 - self.atom_density).abs()
        }
    }
}

fn atom_densities(set: &GroupSubset, table: &BilinearTable) -> Vec<f64> {
    let mut size = vec![0u64; table.num_labels()];
    let mut hit = vec![0u64; table.num_labels()];
    for x in 0..table.spec.order() {
        size[table.codes[x]] += 1;
        hit[table.codes[x]] += set.contains(x) as u64;
    }
    size.iter().zip(&hit).map(|(&s, &h)| if s == 0 { 0.0 } else { h as f64 / s as f64 }).collect()
}

/// Relative density of `E_A^(2)` on every pair descriptor's graph, in one
/// pass over `G x G`.
pub fn density_transfer_pairs(set: &GroupSubset, table: &BilinearTable) -> Result<Vec<PairTransfer>> {
    let spec = &table.spec;
    if set.spec() != spec {
        return Err(shape("set and factor live in different groups"));
    }
    let p = spec.p();
    let (ell, q) = (table.ell, table.q);
    let count = PairDescriptor::count(p, ell, q);
    let big = table.num_labels();
    let (edges, hits) = (0..spec.order())
        .into_par_iter()
        .fold(
            || (vec![0u64; count], vec![0u64; count]),
            |(mut e, mut h), x| {
                let cx = table.codes[x];
                for y in 0..spec.order() {
                    let c = cx + big * (table.codes[y] + big * table.beta_code(x, y));
                    e[c] += 1;
                    h[c] += set.contains(spec.add(x, y)) as u64;
                }
                (e, h)
            },
        )
        .reduce(
            || (vec![0u64; count], vec![0u64; count]),
            |(mut e, mut h), (e2, h2)| {
                e.iter_mut().zip(&e2).for_each(|(a, b)| *a += b);
                h.iter_mut().zip(&h2).for_each(|(a, b)| *a += b);
                (e, h)
            },
        );
    let dens = atom_densities(set, table);
    Ok((0..count)
        .map(|c| {
            let descriptor = PairDescriptor::from_code(c, p, ell, q);
            let atom_density = dens[descriptor.sigma(p).code(p)];
            PairTransfer { descriptor, edges: edges[c], hits: hits[c], atom_density }
        })
        .collect())
}

/// Density of `E_A^(3)` on the triangles of the triad against the density
/// of `A` on its sum atom; `measured` is the absolute difference.
pub fn density_transfer_check(set: &GroupSubset, table: &BilinearTable, d: &TriadDescriptor, bound: f64) -> Result<MeasureReport> {
    let start = Instant::now();
    let g = triad_graph(table, d)?;
    let [g12, g13, g23] = [g.pair(0, 1).unwrap(), g.pair(0, 2).unwrap(), g.pair(1, 2).unwrap()];
    let parts = g.parts();
    let sg = sum_graph3(set);
    let (mut tri, mut hit) = (0u64, 0u64);
    for x in 0..parts[0].len() {
        for y in crate::detectors::bits::ones(g12.row(x)) {
            let zs = crate::detectors::bits::and(g13.row(x), g23.row(y));
            for z in crate::detectors::bits::ones(&zs) {
                tri += 1;
                hit += sg.contains(parts[0][x], parts[1][y], parts[2][z]) as u64;
            }
        }
    }
    let p = table.spec.p();
    let alpha = atom_densities(set, table)[d.sigma(p).code(p)];
    let measured = if tri == 0 { 0.0 } else { (hit as f64 / tri as f64 - alpha).abs() };
    Ok(MeasureReport::new("density-transfer", measured, bound, format!("|d(E_A^3 | triad) - d(A | sum atom)| <= {bound}"), start))
}

/// `oct` of the balanced function `(1_A(x+y+z) - alpha) 1_triad`, with
/// `alpha` the density of `A` on the sum atom.
pub fn balanced_oct(set: &GroupSubset, table: &BilinearTable, d: &TriadDescriptor) -> Result<OctValue> {
    let g = triad_graph(table, d)?;
    let p = table.spec.p();
    let sigma = d.sigma(p).code(p);
    let atom = table.atom(sigma);
    let den = atom.len().max(1) as i64;
    let num = atom.iter().filter(|&&x| set.contains(x)).count() as i64;
    let parts = g.parts().to_vec();
    let sg = sum_graph3(set);
    let weight = move |x: usize, y: usize, z: usize| {
        if sg.contains(parts[0][x], parts[1][y], parts[2][z]) {
            den - num
        } else {
            -num
        }
    };
    oct_measure_weights(&g, &weight, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gs, trace_factor};

    fn table(n: usize, ell: usize, q: usize) -> BilinearTable {
        let spec = GroupSpec::new(3, n).unwrap();
        BilinearTable::new(&spec, &trace_factor(n, 3, ell, q).unwrap()).unwrap()
    }

    #[test]
    fn sigma_arithmetic() {
        let zero = AtomLabel::new(vec![], vec![0]);
        let d = TriadDescriptor { atoms: [zero.clone(), zero.clone(), zero.clone()], b12: vec![0], b13: vec![0], b23: vec![0] };
        assert_eq!(d.sigma(3), zero);
        let one = AtomLabel::new(vec![], vec![1]);
        let d = TriadDescriptor { atoms: [one.clone(), one.clone(), one], b12: vec![1], b13: vec![1], b23: vec![1] };
        // 1 + 1 + 1 + 2 + 2 + 2 = 9
        assert_eq!(d.sigma(3).quadratic, vec![0]);
        assert_eq!(d.sigma(5).quadratic, vec![4]);
    }

    #[test]
    fn descriptor_codes_roundtrip() {
        for c in 0..PairDescriptor::count(3, 1, 1) {
            assert_eq!(PairDescriptor::from_code(c, 3, 1, 1).code(3), c);
        }
        for c in (0..TriadDescriptor::count(3, 1, 1)).step_by(37) {
            assert_eq!(TriadDescriptor::from_code(c, 3, 1, 1).code(3), c);
        }
    }

    #[test]
    fn sum_graph_examples() {
        let spec = GroupSpec::new(3, 2).unwrap();
        let zero = GroupSubset::from_indices(&spec, [0]).unwrap();
        let g = sum_graph2(&zero).restrict((0..9).collect(), (0..9).collect());
        for x in 0..9 {
            assert_eq!(g.degree(x), 1);
            assert!(g.has_edge(x, spec.neg(x)));
        }
        let full = GroupSubset::full(&spec);
        assert!((0..9).all(|x| sum_graph3(&full).contains(x, 4, 7)));
    }

    #[test]
    fn coset_pair_density_equals_sum_coset_density() {
        // cosets of H = {x : x_1 = 0}
        let spec = GroupSpec::new(3, 3).unwrap();
        let a = gs(3, 3).unwrap();
        let coset = |r: u32| (0..27).filter(|&x| spec.coords(x)[0] == r).collect::<Vec<_>>();
        for (r1, r2) in [(0, 1), (1, 1), (2, 0)] {
            let g = sum_graph2(&a).restrict(coset(r1), coset(r2));
            let sum = coset((r1 + r2) % 3);
            let dens = sum.iter().filter(|&&x| a.contains(x)).count() as f64 / sum.len() as f64;
            assert!((g.density() - dens).abs() < 1e-15);
        }
    }

    #[test]
    fn membership_exhaustive_small() {
        let t = table(4, 1, 1);
        let m = sigma_membership_exhaustive(&t).unwrap();
        assert_eq!((m.pair_failures, m.triple_failures), (0, 0));
        assert_eq!(m.triples, 81u64.pow(3));
    }

    #[test]
    fn printed_pair_sum_label_fails() {
        // b1 + b2 + b12 instead of b1 + b2 + 2 b12
        let t = table(3, 0, 1);
        let spec = t.spec().clone();
        let bad = (0..27)
            .flat_map(|x| (0..27).map(move |y| (x, y)))
            .filter(|&(x, y)| {
                let s = (t.label_code(x) + t.label_code(y) + t.beta_code(x, y)) % 3;
                s != t.label_code(spec.add(x, y))
            })
            .count();
        assert!(bad > 0);
    }

    #[test]
    fn transfer_trivial_cases() {
        let t = table(4, 1, 1);
        let spec = t.spec().clone();
        // A = B(sigma) for the descriptor with all labels zero
        let zero = AtomLabel::new(vec![0], vec![0]);
        let e = PairDescriptor { atoms: [zero.clone(), zero.clone()], b12: vec![0] };
        let target = e.sigma(3).code(3);
        let a = GroupSubset::from_fn(&spec, |x| t.label_code(x) == target);
        let all = density_transfer_pairs(&a, &t).unwrap();
        let row = &all[e.code(3)];
        assert_eq!(row.hits, row.edges);
        assert_eq!(row.difference(), 0.0);
        let b = a.complement();
        let row = &density_transfer_pairs(&b, &t).unwrap()[e.code(3)];
        assert_eq!((row.hits, row.difference()), (0, 0.0));
        assert_eq!(all.iter().map(|r| r.edges).sum::<u64>(), 81 * 81);
    }

    #[test]
    fn balanced_oct_vanishes_on_sum_atom() {
        let t = table(4, 0, 1);
        let spec = t.spec().clone();
        let one = AtomLabel::new(vec![], vec![1]);
        let d = TriadDescriptor { atoms: [one.clone(), one.clone(), one], b12: vec![0], b13: vec![1], b23: vec![2] };
        let target = d.sigma(3).code(3);
        let a = GroupSubset::from_fn(&spec, |x| t.label_code(x) == target);
        assert_eq!(balanced_oct(&a, &t, &d).unwrap().exact, Some(0));
        let r = density_transfer_check(&a, &t, &d, 0.0).unwrap();
        assert_eq!(r.measured, 0.0);
    }
}
