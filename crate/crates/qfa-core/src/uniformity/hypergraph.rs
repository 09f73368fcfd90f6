//! Regularity of the 3-graph `x + y + z in A` over the triads of a factor.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::graphs::dev23_measure;
use super::triads::{triad_graph, BilinearTable, TriadDescriptor};
use super::MeasureReport;
use crate::error::{shape, Result};
use crate::fp::GroupSubset;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub triads_total: usize,
    pub triads_examined: usize,
    pub triads_passing: usize,
    /// Triangles over all examined triads, and over the passing ones.
    pub triangles: u64,
    pub passing_triangles: u64,
    /// `passing_triangles / triangles`; exact when every triad was examined.
    pub passing_fraction: f64,
    pub sampled: bool,
    /// `1 - passing_fraction` against `eps1`.
    pub report: MeasureReport,
}

/// Fraction of vertex triples lying in triads where `(x + y + z in A, triad graph)`
/// has `dev_{2,3}(eps1, eps2)`.
///
/// With `sample = Some(m)` only `m` triads drawn without replacement are
/// measured and the fraction is the triangle-weighted ratio over those.
pub fn hypergraph_decomposition_check(
    set: &GroupSubset,
    table: &BilinearTable,
    eps1: f64,
    eps2: f64,
    sample: Option<usize>,
    seed: u64,
) -> Result<DecompositionReport> {
    let start = Instant::now();
    if set.spec() != table.spec() {
        return Err(shape("set and factor live on different groups"));
    }
    let spec = table.spec();
    let (p, ell, q) = (spec.p(), table.ell(), table.q());
    let total = TriadDescriptor::count(p, ell, q);
    let codes: Vec<usize> = match sample {
        Some(m) if m < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = rand::seq::index::sample(&mut rng, total, m).into_vec();
            v.sort_unstable();
            v
        }
        _ => (0..total).collect(),
    };
    let h = |x: usize, y: usize, z: usize| set.contains(spec.add(spec.add(x, y), z));
    let (mut tri, mut good_tri, mut good) = (0u64, 0u64, 0usize);
    for &c in &codes {
        let d = TriadDescriptor::from_code(c, p, ell, q);
        let g = triad_graph(table, &d)?;
        let m = dev23_measure(&g, &h)?;
        tri += m.triangles;
        if m.holds(eps1, eps2) {
            good += 1;
            good_tri += m.triangles;
        }
    }
    let fraction = if tri == 0 { 1.0 } else { good_tri as f64 / tri as f64 };
    Ok(DecompositionReport {
        triads_total: total,
        triads_examined: codes.len(),
        triads_passing: good,
        triangles: tri,
        passing_triangles: good_tri,
        passing_fraction: fraction,
        sampled: codes.len() < total,
        report: MeasureReport::new(
            "hypergraph-decomposition",
            1.0 - fraction,
            eps1,
            format!("1 - (triples in dev23({eps1}, {eps2}) triads) / (all triples)"),
            start,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{trace_factor, union_of_atoms};
    use crate::factors::AtomLabel;
    use crate::fp::GroupSpec;
    use crate::uniformity::Status;

    #[test]
    fn every_triple_is_counted_once() {
        let spec = GroupSpec::new(3, 3).unwrap();
        let b = trace_factor(3, 3, 1, 0).unwrap();
        let table = BilinearTable::new(&spec, &b).unwrap();
        let r = hypergraph_decomposition_check(&GroupSubset::empty(&spec), &table, 0.1, 0.1, None, 0).unwrap();
        assert_eq!(r.triangles, 27u64.pow(3));
        assert_eq!(r.report.status, Status::Pass);
    }

    #[test]
    fn union_of_atoms_is_regular() {
        let spec = GroupSpec::new(3, 3).unwrap();
        let b = trace_factor(3, 3, 1, 1).unwrap();
        let a = union_of_atoms(&spec, &b, &[AtomLabel::new(vec![1], vec![2]), AtomLabel::new(vec![0], vec![1])]).unwrap();
        let table = BilinearTable::new(&spec, &b).unwrap();
        let r = hypergraph_decomposition_check(&a, &table, 0.2, 1.0, None, 0).unwrap();
        // each triad sum lands in one atom, so the balanced function vanishes
        assert_eq!(r.passing_fraction, 1.0);
        let s = hypergraph_decomposition_check(&a, &table, 0.2, 1.0, Some(20), 7).unwrap();
        assert!(s.sampled && s.triads_examined == 20);
    }
}
