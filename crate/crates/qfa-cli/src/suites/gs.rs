//! Green-Sanders sets: shattering, VC dimension, `HOP_2` witnesses and
//! linear irregularity.

use std::collections::HashSet;

use qfa_core::constructions::{gs, verify_gs_intersection};
use qfa_core::detectors::{find_hop2, vc_dim, SearchBudget, Witness, WitnessKind};
use qfa_core::fp::{parse_digits, FpVector, GroupSpec};
use qfa_core::linalg;
use rand::Rng;
use serde_json::json;

use super::{rng, CheckDef, CheckError, Outcome};
use crate::config::SuiteConfig;

pub(super) fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef { id: "gs.shatter", anchor: "GS(3,3) shatters {000, 012, 021} via eight listed translates", run: shatter },
        CheckDef { id: "gs.vc-dim", anchor: "GS(n,3) has VC dimension 3", run: vc },
        CheckDef { id: "gs.hop2-witness", anchor: "nine listed vectors form a 3-HOP2 in GS(4,3)", run: hop2_witness },
        CheckDef { id: "gs.no-4-hop2", anchor: "GS(n,3) has no 4-HOP2", run: no_hop2 },
        CheckDef { id: "gs.linear-density", anchor: "density of GS on L(0) stays in [1/p, 1-1/p]", run: linear_density },
        CheckDef { id: "gs.intersections", anchor: "closed forms for intersections of GS translates", run: intersections },
    ]
}

fn vecs(spec: &GroupSpec, digits: &[&str]) -> Result<Vec<usize>, CheckError> {
    digits.iter().map(|d| Ok(spec.index(&parse_digits(d, spec.p())?))).collect()
}

fn shatter(_: &SuiteConfig) -> Result<Outcome, CheckError> {
    let a = gs(3, 3)?;
    let spec = a.spec();
    let z = vecs(spec, &["000", "012", "021"])?;
    let translates = vecs(spec, &["011", "020", "000", "010", "001", "022", "100", "200"])?;
    // z_i lies in A - t  iff  z_i + t lies in A
    let patterns: Vec<usize> =
        translates.iter().map(|&t| z.iter().enumerate().fold(0, |m, (i, &zi)| m | (a.contains(spec.add(zi, t)) as usize) << i)).collect();
    let distinct: HashSet<usize> = patterns.iter().copied().collect();
    Ok(Outcome::new(distinct.len() == 8, json!({ "patterns": patterns, "distinct": distinct.len() }), json!({ "distinct": 8 })))
}

fn vc(_: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut dims = Vec::new();
    let mut ok = true;
    for n in [3, 4] {
        let r = vc_dim(&gs(n, 3)?, 4, &SearchBudget::default())?;
        ok &= r.dim == 3 && r.exact && !r.capped;
        dims.push(json!({ "n": n, "dim": r.dim, "exact": r.exact }));
    }
    Ok(Outcome::new(ok, json!(dims), json!({ "dim": 3 })))
}

fn hop2_witness(_: &SuiteConfig) -> Result<Outcome, CheckError> {
    let a = gs(4, 3)?;
    let spec = a.spec();
    // digits are listed first coordinate first
    let w = Witness::new(
        WitnessKind::Hop2,
        3,
        spec,
        vec![
            ("x", vecs(spec, &["2220", "2210", "2120"])?),
            ("y", vecs(spec, &["2220", "2200", "0220"])?),
            ("z", vecs(spec, &["2221", "2011", "2021"])?),
        ],
    );
    let r = w.revalidate(&a);
    Ok(Outcome::new(r.is_ok(), json!(r.err().map_or("revalidated".to_string(), |e| e.to_string())), json!("all 27 sums")).with_witness(w.vectors()))
}

fn no_hop2(_: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in [2, 3] {
        let out = find_hop2(&gs(n, 3)?, 4, &SearchBudget::default())?;
        ok &= out.is_none();
        rows.push(json!({ "n": n, "outcome": out.label() }));
    }
    Ok(Outcome::new(ok, json!(rows), json!("NONE for n in {2, 3}")))
}

/// Reduced row echelon forms of every subspace of dimension `dim` in the dual of `F_p^n`.
fn dual_subspaces(p: u32, n: usize, dim: usize) -> Vec<Vec<Vec<u32>>> {
    let spec = GroupSpec::new(p, n).expect("small group");
    let vectors: Vec<Vec<u32>> = (1..spec.order()).map(|i| spec.coords(i)).filter(|c| c.iter().find(|&&x| x != 0) == Some(&1)).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<Vec<u32>>)> = vec![(0, Vec::new())];
    while let Some((from, rows)) = stack.pop() {
        if rows.len() == dim {
            let e = linalg::echelon(&rows, n, p);
            if seen.insert(e.rows.clone()) {
                out.push(e.rows);
            }
            continue;
        }
        for (i, v) in vectors.iter().enumerate().skip(from) {
            let mut next = rows.clone();
            next.push(v.clone());
            if linalg::rank(&next, n, p) == next.len() {
                stack.push((i + 1, next));
            }
        }
    }
    out
}

fn linear_density(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let n = cfg.n.unwrap_or(6);
    let p = 3;
    let a = gs(n, p)?;
    let spec = a.spec();
    let (lo, hi) = (1.0 / p as f64, 1.0 - 1.0 / p as f64);
    let mut factors = 0usize;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut worst: Option<Vec<String>> = None;
    for dim in 0..=2.min(n) {
        let subspaces = if dim == 0 { vec![vec![]] } else { dual_subspaces(p, n, dim) };
        for rows in subspaces {
            factors += 1;
            let kernel = spec.span(&linalg::kernel(&rows, n, p));
            let d = kernel.iter().filter(|&&x| a.contains(x)).count() as f64 / kernel.len() as f64;
            min = min.min(d);
            max = max.max(d);
            if (d < lo - 1e-12 || d > hi + 1e-12) && worst.is_none() {
                worst = Some(rows.iter().map(|r| qfa_core::fp::format_digits(r, p)).collect());
            }
        }
    }
    let ok = worst.is_none();
    let out = Outcome::new(ok, json!({ "factors": factors, "min": min, "max": max }), json!([lo, hi]));
    Ok(match worst {
        Some(w) => out.with_witness(w),
        None => out,
    })
}

fn intersections(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut r = rng(cfg, 11);
    let (n, p) = (3, 3);
    let (mut pairs, mut corrected, mut exact_cases, mut printed) = (0, 0, 0, 0);
    let mut first_bad = None;
    while pairs < 500 {
        let b = FpVector::new(p, (0..n).map(|_| r.gen_range(0..p)).collect());
        let c = FpVector::new(p, (0..n).map(|_| r.gen_range(0..p)).collect());
        if b == c {
            continue;
        }
        pairs += 1;
        let g = verify_gs_intersection(&b, &c, n, p)?;
        corrected += g.corrected_all() as usize;
        exact_cases += g.trichotomies_exact() as usize;
        printed += (g.printed_mixed && g.printed_inside && g.printed_outside) as usize;
        if (!g.corrected_all() || !g.trichotomies_exact()) && first_bad.is_none() {
            first_bad = Some(json!({ "b": b.coords, "c": c.coords, "cases": g }));
        }
    }
    let out = Outcome::new(
        corrected == pairs && exact_cases == pairs,
        json!({ "pairs": pairs, "identities_hold": corrected, "one_case_each": exact_cases, "as_printed_hold": printed }),
        json!({ "identities_hold": pairs }),
    );
    Ok(match first_bad {
        Some(w) => out.with_witness(w),
        None => out,
    })
}
