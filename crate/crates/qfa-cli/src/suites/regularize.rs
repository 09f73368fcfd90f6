//! The linear regularization engine and its certificates.

use std::time::Duration;

use qfa_core::constructions::{gs, union_of_cosets};
use qfa_core::factors::{random_factor, LinearFactor};
use qfa_core::formula::GrowthFunction;
use qfa_core::fp::{FpVector, GroupSpec, GroupSubset};
use qfa_core::regularize::{factor_chain_check, find_uniform_dense_coset, stable_linear_decomposition, EngineBudget, StableDecomposition};
use rand::Rng;
use serde_json::json;

use super::{random_set, rng, CheckDef, CheckError, Outcome};
use crate::config::SuiteConfig;
use crate::setspec::random_union;

pub(super) fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef { id: "regularize.stable-input", anchor: "a union of few cosets is resolved with no error atoms", run: stable_input },
        CheckDef { id: "regularize.uniform-coset", anchor: "a dense coset of codim <= 2/eps on which A is eps-uniform exists", run: uniform_coset },
        CheckDef { id: "regularize.gs", anchor: "GS becomes almost atomic after a few linear refinements", run: gs_rounds },
        CheckDef { id: "regularize.chains", anchor: "emitted factor chains satisfy the chain conditions", run: chains },
    ]
}

fn n_of(cfg: &SuiteConfig) -> usize {
    cfg.n.unwrap_or(8)
}

fn eps_of(cfg: &SuiteConfig) -> f64 {
    cfg.eps.unwrap_or(0.1)
}

fn engine(set: &GroupSubset, eps: f64, max_codim: usize) -> Result<StableDecomposition, CheckError> {
    let spec = set.spec();
    let psi = GrowthFunction::parse("2*x")?;
    let budget = EngineBudget { max_codim, time_limit: Some(Duration::from_secs(600)), ..EngineBudget::default() };
    Ok(stable_linear_decomposition(set, &LinearFactor::empty(spec.p(), spec.n()), &[], 1, eps, &psi, &budget)?)
}

/// Eight unions of `count <= 3` cosets of random subgroups of codimension 1 or 2.
fn stable_inputs(cfg: &SuiteConfig) -> Result<Vec<(usize, usize, GroupSubset)>, CheckError> {
    let n = n_of(cfg);
    let spec = GroupSpec::new(cfg.p, n)?;
    let mut out = Vec::new();
    for i in 0..8u64 {
        let codim = 1 + (i % 2) as usize;
        let count = (1 + i as usize % 3).min((cfg.p as usize).pow(codim as u32) - 1);
        let (h, reps) = random_union(cfg.p, n, codim, count, cfg.seed.wrapping_add(i));
        out.push((codim, count, union_of_cosets(&spec, &h, &reps)?));
    }
    Ok(out)
}

fn stable_input(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut rows = Vec::new();
    let mut ok = true;
    for (codim, count, a) in stable_inputs(cfg)? {
        let r = engine(&a, eps_of(cfg), 4)?;
        let good = r.conclusion && r.error_cosets.is_empty() && r.codim <= 2;
        ok &= good;
        rows.push(json!({ "subgroup_codim": codim, "cosets": count, "codim": r.codim, "error_atoms": r.error_cosets.len(), "pass": good }));
    }
    Ok(Outcome::new(ok, json!(rows), json!({ "error_atoms": 0, "codim": "<= 2" })))
}

fn uniform_coset(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let n = n_of(cfg);
    let spec = GroupSpec::new(cfg.p, n)?;
    let mut r = rng(cfg, 71);
    let gs_set = gs(n, cfg.p)?;
    let mut bad = Vec::new();
    let mut max_codim = 0;
    for i in 0..100 {
        let eps = [0.2, 0.3, 0.5][i % 3];
        // random sets, noisy cosets and translates of GS in turn
        let a = match i % 3 {
            0 => random_set(&spec, r.gen_range(0.1..0.9), &mut r),
            1 => {
                let h = random_factor(cfg.p, n, r.gen_range(1..=3), 0, &mut r)?.linear;
                let base = union_of_cosets(&spec, &h, &[FpVector::new(cfg.p, vec![0; n])])?;
                let noise = random_set(&spec, 0.05, &mut r);
                base.union(&noise)
            }
            _ => gs_set.translate(r.gen_range(0..spec.order())),
        };
        let h = random_factor(cfg.p, n, r.gen_range(0..=2), 0, &mut r)?.linear;
        let u = find_uniform_dense_coset(&a, &h, eps)?;
        max_codim = max_codim.max(u.codim);
        let post = u.postconditions(eps);
        if post.contains(&false) {
            bad.push(json!({ "case": i, "eps": eps, "codim": u.codim, "density": u.density, "start_density": u.start_density, "uniformity": u.uniformity }));
        }
    }
    let out = Outcome::new(bad.is_empty(), json!({ "inputs": 100, "max_codim": max_codim, "failing": bad.len() }), json!("codim <= floor(2/eps), density non-decreasing, uniformity <= eps"));
    Ok(if bad.is_empty() { out } else { out.with_witness(bad) })
}

fn gs_rounds(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let a = gs(n_of(cfg), cfg.p)?;
    let r = engine(&a, eps_of(cfg), 6)?;
    let hit = r.rounds.iter().find(|x| x.codim <= 6 && x.error_fraction <= 0.2);
    let fractions: Vec<f64> = r.rounds.iter().map(|x| x.error_fraction).collect();
    Ok(Outcome::new(
        hit.is_some(),
        json!({ "error_fraction_by_codim": fractions, "first_codim_at_or_below": hit.map(|x| x.codim) }),
        json!({ "error_fraction": 0.2, "codim": "<= 6" }),
    ))
}

fn chains(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut inputs: Vec<(String, GroupSubset, usize)> =
        stable_inputs(cfg)?.into_iter().map(|(c, k, a)| (format!("union codim {c} count {k}"), a, 4)).collect();
    inputs.push(("GS".into(), gs(n_of(cfg), cfg.p)?, 6));
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, a, max_codim) in inputs {
        let r = engine(&a, eps_of(cfg), max_codim)?;
        let v = factor_chain_check(&r.chain, &a)?;
        ok &= v.all();
        rows.push(json!({ "input": name, "steps": r.chain.steps.len(), "verdict": v }));
    }
    Ok(Outcome::new(ok, json!(rows), json!("refinement, growth, classes and error counts all hold")))
}
