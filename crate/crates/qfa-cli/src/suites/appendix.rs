//! The sparse example, affine embeddings and tree-encoding counts.

use qfa_core::constructions::{gs, sparse_example, span_dim};
use qfa_core::detectors::{affine_embedding_exists, count_tree_encodings, count_tree_encodings_naive, SearchBudget};
use qfa_core::fp::{GroupSpec, GroupSubset};
use serde_json::json;

use super::{random_set, rng, CheckDef, CheckError, Outcome};
use crate::config::SuiteConfig;

pub(super) fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef { id: "appendix.sparse-span", anchor: "every X in the sparse example spans dimension >= |X|^(1/2)", run: sparse_span },
        CheckDef { id: "appendix.embedding", anchor: "affine embeddings are found exactly when they exist", run: embedding },
        CheckDef { id: "appendix.tree-count", anchor: "the tree-encoding count factors over branches", run: tree_count },
    ]
}

fn sparse_span(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let n = cfg.n.unwrap_or(8);
    let a = sparse_example(n, cfg.p)?;
    let members = a.members();
    let spec = a.spec();
    let max_size = 8.min(members.len());
    let (mut subsets, mut worst, mut bad) = (0u64, f64::INFINITY, None);
    // every nonempty subset of size <= max_size, by bitmask
    for mask in 1u64..1 << members.len() {
        let size = mask.count_ones() as usize;
        if size > max_size {
            continue;
        }
        subsets += 1;
        let x: Vec<usize> = (0..members.len()).filter(|&i| mask >> i & 1 == 1).map(|i| members[i]).collect();
        let d = span_dim(spec, &x);
        let margin = d as f64 - (size as f64).sqrt();
        if margin < worst {
            worst = margin;
        }
        if margin < 0.0 && bad.is_none() {
            bad = Some(json!({ "subset": x.iter().map(|&e| spec.coords(e)).collect::<Vec<_>>(), "span_dim": d }));
        }
    }
    let out = Outcome::new(bad.is_none(), json!({ "set_size": members.len(), "subsets": subsets, "min_margin": worst }), json!("dim span(X) - |X|^(1/2) >= 0"));
    Ok(match bad {
        Some(w) => out.with_witness(w),
        None => out,
    })
}

fn embedding(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let p = cfg.p;
    let (s1, s2) = (GroupSpec::new(p, 1)?, GroupSpec::new(p, 2)?);
    let gs2 = gs(2, p)?;
    let one = GroupSubset::from_indices(&s1, [s1.index(&[1])])?;
    let cases = [
        ("GS(2) into itself", gs2.clone(), gs2.clone(), true),
        ("{1} in F_p into GS(2)", one, gs2, true),
        ("F_p into the empty set of F_p^2", GroupSubset::full(&s1), GroupSubset::empty(&s2), false),
    ];
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, small, large, expect) in cases {
        let found = affine_embedding_exists(&small, &large, &SearchBudget::default())?;
        let valid = found.as_ref().is_none_or(|m| m.is_embedding(&small, &large));
        ok &= found.is_some() == expect && valid;
        rows.push(json!({ "case": name, "found": found.is_some(), "expected": expect, "map_valid": valid }));
    }
    Ok(Outcome::new(ok, json!(rows), json!("found iff expected, and found maps are embeddings")))
}

fn tree_count(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let spec = GroupSpec::new(cfg.p, 2)?;
    let mut r = rng(cfg, 81);
    let mut rows = Vec::new();
    let mut ok = true;
    for i in 0..12 {
        let d = 1 + i % 2;
        let a = random_set(&spec, 0.5, &mut r);
        // restricted leaf and node sets every other pair of instances
        let (leaves, nodes) = if i % 4 < 2 {
            (GroupSubset::full(&spec), GroupSubset::full(&spec))
        } else {
            (random_set(&spec, 0.6, &mut r), random_set(&spec, 0.6, &mut r))
        };
        let fast = count_tree_encodings(&a, d, &leaves, &nodes)?;
        let naive = count_tree_encodings_naive(&a, d, &leaves, &nodes)?;
        ok &= fast == naive;
        rows.push(json!({ "d": d, "dp": fast.to_string(), "naive": naive.to_string() }));
    }
    Ok(Outcome::new(ok, json!(rows), json!("dp == naive")))
}
