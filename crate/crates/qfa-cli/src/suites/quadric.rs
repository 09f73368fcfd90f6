//! The quadric `x^T x = 0`: stability, `CAP_2` and no `FOP_2`.

use qfa_core::constructions::standard_quadric;
use qfa_core::detectors::{cap2_check, find_fop2, find_hop2, vc2_dim, Cap2Outcome, SearchBudget};
use serde_json::json;

use super::{CheckDef, CheckError, Outcome};
use crate::config::SuiteConfig;

pub(super) fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef { id: "quadric.cap2", anchor: "the quadric has CAP2 and no 2-HOP2", run: cap2 },
        CheckDef { id: "quadric.no-fop2", anchor: "the quadric has no 2-FOP2", run: no_fop2 },
        CheckDef { id: "quadric.vc2", anchor: "the quadric has VC2 dimension at most 1", run: vc2 },
        CheckDef { id: "quadric.count", anchor: "the quadric in F_3^3 has 9 points", run: count },
    ]
}

fn max_n(cfg: &SuiteConfig) -> usize {
    cfg.n.unwrap_or(3).clamp(1, 3)
}

fn cap2(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 1..=max_n(cfg) {
        let q = standard_quadric(n, cfg.p, 0)?;
        let cap = cap2_check(&q, &SearchBudget::default())?;
        let hop = find_hop2(&q, 2, &SearchBudget::default())?;
        ok &= cap == Cap2Outcome::Holds && hop.is_none();
        rows.push(json!({ "n": n, "cap2": matches!(cap, Cap2Outcome::Holds), "hop2": hop.label() }));
    }
    Ok(Outcome::new(ok, json!(rows), json!("CAP2 holds and 2-HOP2 is NONE")))
}

fn no_fop2(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let q = standard_quadric(2, cfg.p, 0)?;
    let out = find_fop2(&q, 2, &SearchBudget::default())?;
    let res = Outcome::new(out.is_none(), json!(out.label()), json!("NONE"));
    Ok(match out.witness() {
        Some(w) => res.with_witness(w.vectors()),
        None => res,
    })
}

fn vc2(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 1..=max_n(cfg) {
        let r = vc2_dim(&standard_quadric(n, cfg.p, 0)?, 2, &SearchBudget::default())?;
        ok &= r.dim <= 1 && r.exact;
        rows.push(json!({ "n": n, "dim": r.dim, "exact": r.exact }));
    }
    Ok(Outcome::new(ok, json!(rows), json!({ "max_dim": 1 })))
}

fn count(_: &SuiteConfig) -> Result<Outcome, CheckError> {
    let q = standard_quadric(3, 3, 0)?;
    Ok(Outcome::new(q.len() == 9, json!(q.len()), json!(9)))
}
