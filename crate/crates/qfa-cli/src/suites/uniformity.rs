//! Fourier and Gowers-norm identities, quasirandomness of bilinear graphs,
//! and the factor operations they rest on.

use qfa_core::constructions::{gs, trace_factor};
use qfa_core::factors::{
    atom_codes, atom_sizes, make_high_rank, pullback_factor, pullback_partition, random_factor, random_sym_matrix, refines,
    same_partition, LinearFactor,
};
use qfa_core::formula::RankFunction;
use qfa_core::fp::{gauss_sum, quad_eval, roots_of_unity, ComplexValue, FpSymMatrix, FpVector, GroupSpec};
use qfa_core::uniformity::{
    dev2_measure, dev2_naive, density_transfer_pairs, oct_measure_weights, oct_naive, pair_graph, sigma_membership_exhaustive,
    u2_direct, u2_norm, u3_direct, u3_norm, BilinearTable, BipartiteGraph, PairDescriptor, PartiteGraph,
};
use rand::Rng;
use serde_json::json;

use super::{rng, CheckDef, CheckError, Outcome};
use crate::config::SuiteConfig;

pub(super) fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef { id: "uniformity.gauss", anchor: "|E w^(x^T M x + b.x)| <= p^(-rank M / 2)", run: gauss },
        CheckDef { id: "uniformity.u2", anchor: "||f||_U2^4 equals the sum of |f_hat|^4", run: u2 },
        CheckDef { id: "uniformity.u3-phase", anchor: "a quadratic phase has U3 norm 1", run: u3_phase },
        CheckDef { id: "uniformity.dev2", anchor: "bilinear graphs between high-rank atoms are quasirandom", run: dev2_trace },
        CheckDef { id: "uniformity.density-transfer", anchor: "sum-graph densities approach atom densities", run: transfer },
        CheckDef { id: "uniformity.fast-vs-naive", anchor: "dev2 and oct contractions equal their defining sums", run: fast_vs_naive },
        CheckDef { id: "uniformity.sigma-labels", anchor: "pair and triple sums land in the predicted atom", run: sigma_labels },
        CheckDef { id: "factors.make-high-rank", anchor: "rank repair refines its input and reaches the target", run: high_rank },
        CheckDef { id: "factors.pullback", anchor: "atoms of the pulled-back factor are the preimages of R", run: pullback },
        CheckDef { id: "factors.atom-sizes", anchor: "atoms of a high-rank factor have size (1 +- p^(-tau)) p^(n-l-q)", run: sizes },
    ]
}

fn gauss(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let (p, n) = (cfg.p, cfg.n.unwrap_or(6));
    let mut r = rng(cfg, 41);
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for _ in 0..1000 {
        let m = random_sym_matrix(p, n, &mut r);
        let b = FpVector::new(p, (0..n).map(|_| r.gen_range(0..p)).collect());
        let g = gauss_sum(&m, &b)?.norm();
        let bound = (p as f64).powf(-(m.rank() as f64) / 2.0) + 1e-9;
        // slack is measured minus bound; positive means violated
        if g - bound > worst {
            worst = g - bound;
            if worst > 0.0 {
                witness = Some(json!({ "matrix": m.rows(), "b": b.coords, "value": g }));
            }
        }
    }
    let out = Outcome::new(worst <= 0.0, json!({ "trials": 1000, "max_excess": worst }), json!({ "max_excess": 0.0 }));
    Ok(match witness {
        Some(w) => out.with_witness(w),
        None => out,
    })
}

fn random_fn(spec: &GroupSpec, r: &mut impl Rng) -> Vec<ComplexValue> {
    (0..spec.order()).map(|_| ComplexValue::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
}

fn u2(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let max_n = cfg.n.unwrap_or(8);
    let mut r = rng(cfg, 42);
    let mut worst = 0.0f64;
    for t in 0..200 {
        let n = 1 + t % max_n;
        let spec = GroupSpec::new(cfg.p, n)?;
        let f = random_fn(&spec, &mut r);
        worst = worst.max((u2_norm(&spec, &f)?.powi(4) - u2_direct(&spec, &f)?).abs());
    }
    Ok(Outcome::new(worst <= 1e-9, json!({ "functions": 200, "max_difference": worst }), json!(1e-9)))
}

fn u3_phase(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let p = cfg.p;
    let w = roots_of_unity(p);
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 1..=3 {
        let spec = GroupSpec::new(p, n)?;
        let id = FpSymMatrix::identity(p, n);
        let f = (0..spec.order())
            .map(|x| Ok(w[quad_eval(&id, &spec.vector_of(x)?)? as usize]))
            .collect::<qfa_core::Result<Vec<ComplexValue>>>()?;
        let nested = u3_norm(&spec, &f)?;
        let direct = if n <= 2 { Some(u3_direct(&spec, &f)?.powf(1.0 / 8.0)) } else { None };
        ok &= (nested - 1.0).abs() <= 1e-9 && direct.is_none_or(|d| (d - 1.0).abs() <= 1e-9 && (d - nested).abs() <= 1e-9);
        rows.push(json!({ "n": n, "nested": nested, "direct": direct }));
    }
    Ok(Outcome::new(ok, json!(rows), json!({ "norm": 1.0, "tolerance": 1e-9 })))
}

fn dev2_trace(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let (p, n, q) = (3u32, cfg.n.unwrap_or(8), 1);
    let b = trace_factor(n, p, 0, q)?;
    let table = BilinearTable::new(&GroupSpec::new(p, n)?, &b)?;
    let target = (p as f64).powi(-(q as i32));
    let (mut max_dev, mut max_off) = (0.0f64, 0.0f64);
    let mut worst = None;
    let count = PairDescriptor::count(p, 0, q);
    for code in 0..count {
        let e = PairDescriptor::from_code(code, p, 0, q);
        let d = dev2_measure(&pair_graph(&table, &e)?)?;
        let off = (d.density - target).abs();
        if (d.deviation > 0.05 || off > 0.02) && worst.is_none() {
            worst = Some(json!({ "descriptor": e, "deviation": d.deviation, "density": d.density }));
        }
        max_dev = max_dev.max(d.deviation);
        max_off = max_off.max(off);
    }
    let out = Outcome::new(
        worst.is_none(),
        json!({ "graphs": count, "max_deviation": max_dev, "max_density_offset": max_off }),
        json!({ "deviation": 0.05, "density": target, "density_tolerance": 0.02 }),
    );
    Ok(match worst {
        Some(w) => out.with_witness(w),
        None => out,
    })
}

fn transfer(_: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut maxima = Vec::new();
    for n in [6, 7, 8] {
        let a = gs(n, 3)?;
        let table = BilinearTable::new(a.spec(), &trace_factor(n, 3, 1, 1)?)?;
        let m = density_transfer_pairs(&a, &table)?.iter().map(|t| t.difference()).fold(0.0, f64::max);
        maxima.push(m);
    }
    let ok = maxima.windows(2).all(|w| w[1] < w[0]) && maxima[2] <= 0.05;
    Ok(Outcome::new(ok, json!({ "n": [6, 7, 8], "max_difference": maxima }), json!("strictly decreasing, and <= 0.05 at n = 8")))
}

fn random_graph(r: &mut impl Rng, nl: usize, nr: usize, offset: usize) -> BipartiteGraph {
    let d = r.gen_range(0.2..0.8);
    let edges: Vec<bool> = (0..nl * nr).map(|_| r.gen_bool(d)).collect();
    BipartiteGraph::from_fn((0..nl).collect(), (offset..offset + nr).collect(), move |x, y| edges[x * nr + y - offset])
}

fn fast_vs_naive(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut r = rng(cfg, 43);
    let (mut dev_cases, mut oct_cases, mut mismatches) = (0, 0, Vec::new());
    for _ in 0..20 {
        let (nl, nr) = (r.gen_range(1..=20), r.gen_range(1..=20));
        let g = random_graph(&mut r, nl, nr, 0);
        let (fast, naive) = (dev2_measure(&g)?, dev2_naive(&g)?);
        dev_cases += 1;
        if fast.exact != naive.exact {
            mismatches.push(json!({ "kind": "dev2", "fast": fast.exact.map(|v| v.to_string()), "naive": naive.exact.map(|v| v.to_string()) }));
        }
    }
    for _ in 0..20 {
        let s: Vec<usize> = (0..3).map(|_| r.gen_range(1..=8)).collect();
        // parts hold the vertices 0.., 100.., 200..
        let g12 = random_graph(&mut r, s[0], s[1], 100);
        let mut g13 = random_graph(&mut r, s[0], s[2], 200);
        let mut g23 = random_graph(&mut r, s[1], s[2], 200);
        g13 = BipartiteGraph::from_fn(g12.left().to_vec(), g13.right().to_vec(), |x, y| g13.has_edge(x, y - 200));
        g23 = BipartiteGraph::from_fn(g12.right().to_vec(), g23.right().to_vec(), |x, y| g23.has_edge(x - 100, y - 200));
        let g = PartiteGraph::tripartite(g12, g13, g23)?;
        let table: Vec<i64> = (0..512).map(|_| r.gen_range(-4..=4)).collect();
        let weight = move |x: usize, y: usize, z: usize| table[x * 64 + y * 8 + z];
        let (fast, naive) = (oct_measure_weights(&g, &weight, 4)?, oct_naive(&g, &weight, 4)?);
        oct_cases += 1;
        if fast.exact != naive.exact {
            mismatches.push(json!({ "kind": "oct", "fast": fast.exact.map(|v| v.to_string()), "naive": naive.exact.map(|v| v.to_string()) }));
        }
    }
    let out = Outcome::new(mismatches.is_empty(), json!({ "dev2_cases": dev_cases, "oct_cases": oct_cases, "mismatches": mismatches.len() }), json!({ "mismatches": 0 }));
    Ok(if mismatches.is_empty() { out } else { out.with_witness(mismatches) })
}

fn sigma_labels(_: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut rows = Vec::new();
    let mut ok = true;
    for (n, ell, q) in [(2, 1, 1), (3, 1, 2), (4, 2, 1), (5, 1, 1)] {
        let b = trace_factor(n, 3, ell, q)?;
        let c = sigma_membership_exhaustive(&BilinearTable::new(&GroupSpec::new(3, n)?, &b)?)?;
        ok &= c.pair_failures == 0 && c.triple_failures == 0;
        rows.push(json!({ "n": n, "ell": ell, "q": q, "counts": c }));
    }
    Ok(Outcome::new(ok, json!(rows), json!({ "failures": 0 })))
}

fn high_rank(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let (p, n) = (3, 5);
    let spec = GroupSpec::new(p, n)?;
    let rfn = RankFunction::parse("x+1")?;
    let mut r = rng(cfg, 61);
    let (mut repaired, mut bad) = (0, Vec::new());
    for t in 0..50 {
        let b = random_factor(p, n, r.gen_range(0..=2), r.gen_range(1..=3), &mut r)?;
        let out = make_high_rank(&b, &rfn, 8)?;
        repaired += !out.dropped.is_empty() as usize;
        let refined = refines(&spec, &out.factor, &b)?;
        if !refined || !out.rank.at_least(out.target) {
            bad.push(json!({ "case": t, "refines": refined, "rank": out.rank.to_string(), "target": out.target }));
        }
    }
    let out = Outcome::new(bad.is_empty(), json!({ "factors": 50, "repaired": repaired, "failing": bad.len() }), json!("refines input and rank >= r(l' + q')"));
    Ok(if bad.is_empty() { out } else { out.with_witness(bad) })
}

fn pullback(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let (p, n) = (3, 5);
    let spec = GroupSpec::new(p, n)?;
    let mut r = rng(cfg, 62);
    let mut bad = Vec::new();
    let mut cases = [0usize; 2];
    for t in 0..50 {
        let (ell, q) = [(1, 1), (0, 2), (1, 2), (2, 1)][t % 4];
        let b = random_factor(p, n, ell, q, &mut r)?;
        let k = r.gen_range(1..=ell + q);
        let rows: Vec<FpVector> = (0..k).map(|_| FpVector::new(p, (0..ell + q).map(|_| r.gen_range(0..p)).collect())).collect();
        let rf = LinearFactor::new(p, ell + q, rows)?;
        let pb = pullback_factor(&b, &rf)?;
        cases[pb.factor.is_purely_linear() as usize] += 1;
        if !same_partition(&atom_codes(&spec, &pb.factor)?, &pullback_partition(&spec, &b, &rf)?) {
            bad.push(json!({ "case": t, "ell": ell, "q": q }));
        }
    }
    let out = Outcome::new(
        bad.is_empty(),
        json!({ "cases": 50, "with_quadratic_part": cases[0], "purely_linear": cases[1], "mismatches": bad.len() }),
        json!({ "mismatches": 0 }),
    );
    Ok(if bad.is_empty() { out } else { out.with_witness(bad) })
}

fn sizes(_: &SuiteConfig) -> Result<Outcome, CheckError> {
    let (p, n, ell, q) = (3u32, 8, 1, 1);
    let s = atom_sizes(&GroupSpec::new(p, n)?, &trace_factor(n, p, ell, q)?)?;
    let ideal = (p as f64).powi((n - ell - q) as i32);
    let tol = 1.0 / 9.0;
    let (min, max) = (*s.iter().min().unwrap_or(&0), *s.iter().max().unwrap_or(&0));
    let ok = s.iter().all(|&x| (x as f64 - ideal).abs() <= tol * ideal);
    Ok(Outcome::new(ok, json!({ "atoms": s.len(), "min": min, "max": max }), json!({ "ideal": ideal, "relative_tolerance": tol })))
}
