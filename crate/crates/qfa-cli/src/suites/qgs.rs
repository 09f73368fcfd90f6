//! Quadratic Green-Sanders sets: density, the good copy of `H(3)`, and the
//! failure of atomicity with linear error.

use qfa_core::constructions::{qgs, trace_sym_space};
use qfa_core::detectors::{revalidate_good_copy, Witness, WitnessKind};
use qfa_core::factors::{factor_rank, random_factor, QuadraticFactor};
use qfa_core::regularize::aqale_check;
use qfa_core::uniformity::reduced_pair;
use serde_json::json;

use super::{rng, CheckDef, CheckError, Outcome};
use crate::config::SuiteConfig;

/// Random factors tried per complexity `(ell, q)`.
const FACTORS_PER_COMPLEXITY: usize = 8;

pub(super) fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef { id: "qgs.density", anchor: "QGS(n,p) has density 1/(p-1) + O(p^(-n/3))", run: density },
        CheckDef { id: "qgs.good-copy", anchor: "labels e_i + e_(i+1) and (p-1) e_j give a good copy of H(3)", run: good_copy },
        CheckDef { id: "qgs.aqale-fails", anchor: "every linear atom has a quadratic piece of density in (1/2p, 1-1/2p)", run: aqale },
    ]
}

fn density(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let n = cfg.n.unwrap_or(8);
    let (a, _) = qgs(n, 3)?;
    let d = a.density();
    Ok(Outcome::new((0.4..=0.6).contains(&d), json!({ "n": n, "density": d }), json!([0.4, 0.6])))
}

fn good_copy(_: &SuiteConfig) -> Result<Outcome, CheckError> {
    let (k, n) = (3, 6);
    let (a, _) = qgs(n, 3)?;
    // the copy uses e_(k+1), so the factor needs k + 1 quadratic coordinates
    let mats = trace_sym_space(n, 3)?;
    let b = QuadraticFactor::purely_quadratic(3, n, mats[..k + 1].to_vec())?;
    let r = reduced_pair(&a, &b, 0.1)?;
    let ls = r.label_spec()?;
    let left: Vec<usize> = (0..k).map(|i| ls.add(ls.basis(i), ls.basis(i + 1))).collect();
    let right: Vec<usize> = (0..k).map(|j| ls.scale(2, ls.basis(j))).collect();
    let w = Witness::new(WitnessKind::GoodCopy, k, &ls, vec![("a", left), ("b", right)]);
    let res = revalidate_good_copy(&w, &r.near_one()?, &r.near_zero()?, Some(&r.h_b()?));
    Ok(Outcome::new(
        res.is_ok(),
        json!({ "revalidation": res.err().map_or("ok".to_string(), |e| e.to_string()), "error_labels": r.error_labels() }),
        json!("edges in near-one labels, non-edges in near-zero labels, right side in H_B"),
    )
    .with_witness(w.vectors()))
}

/// Random factors of every complexity up to `(2, 2)` whose rank is at least
/// `n - 2`; each must leave a balanced quadratic piece in every linear atom.
fn aqale(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let n = cfg.n.unwrap_or(6);
    let threshold = n.saturating_sub(2);
    let (a, _) = qgs(n, 3)?;
    let mut r = rng(cfg, 31);
    let (mut tested, mut skipped) = (0usize, 0usize);
    let mut failures = Vec::new();
    // least balanced of the most balanced pieces, as min(d, 1 - d)
    let mut weakest = 0.5f64;
    for ell in 0..=2 {
        for q in 0..=2 {
            let mut got = 0;
            while got < FACTORS_PER_COMPLEXITY {
                let b = random_factor(3, n, ell, q, &mut r)?;
                if !factor_rank(&b)?.at_least(threshold) {
                    skipped += 1;
                    continue;
                }
                got += 1;
                tested += 1;
                let v = aqale_check(&b, &a, 1.0 / 6.0, 0.0)?;
                for &m in v.most_balanced.iter().flatten() {
                    weakest = weakest.min(m);
                }
                if !v.every_linear_atom_has_density_strictly_within(1.0 / 6.0) && failures.len() < 3 {
                    failures.push(json!({ "ell": ell, "q": q, "rank": format!("{}", factor_rank(&b)?), "most_balanced": v.most_balanced }));
                }
            }
        }
    }
    let out = Outcome::new(
        failures.is_empty(),
        json!({ "tested": tested, "below_rank_threshold": skipped, "failing": failures.len(), "weakest_balance": weakest }),
        json!({ "rank_at_least": threshold, "interval": [1.0 / 6.0, 5.0 / 6.0] }),
    );
    Ok(if failures.is_empty() { out } else { out.with_witness(failures) })
}
