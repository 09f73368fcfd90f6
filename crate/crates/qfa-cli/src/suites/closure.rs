//! Witness transforms and closure facts, fuzzed over small random sets.

use qfa_core::constructions::quadric;
use qfa_core::detectors::{
    fop2_complement, fop2_to_shattering, find_fop2, find_hop2, hop2_complement, hop2_to_op, vc2_dim, vc2_to_fop2, vc_dim,
    SearchBudget, SearchOutcome, Witness,
};
use qfa_core::factors::random_sym_matrix;
use qfa_core::fp::{GroupSpec, GroupSubset};
use rand::Rng;
use serde_json::json;

use super::{random_set, rng, CheckDef, CheckError, Outcome};
use crate::config::SuiteConfig;

const FUZZ_SETS: usize = 200;

pub(super) fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef { id: "closure.complement", anchor: "an l-HOP2 for A gives a floor(l/2)-HOP2 for its complement; FOP2 likewise", run: complement },
        CheckDef { id: "closure.hop2-to-op", anchor: "an l-HOP2 witness yields an l-OP witness", run: hop2_op },
        CheckDef { id: "closure.fop2-to-vc", anchor: "an l-FOP2 witness yields a shattered set of size l", run: fop2_vc },
        CheckDef { id: "closure.vc2-to-fop2", anchor: "a VC2 witness of size l yields an l-FOP2 witness", run: vc2_fop2 },
        CheckDef { id: "closure.vc2-le-vc", anchor: "VC2 dimension never exceeds VC dimension", run: vc2_le_vc },
        CheckDef { id: "closure.intersection", anchor: "no l-HOP2 intersected with no 2-HOP2 has no l-HOP2", run: intersection },
    ]
}

/// The fuzzing corpus: `FUZZ_SETS` random sets alternating between `n = 2` and `n = 3`.
fn corpus(cfg: &SuiteConfig, stream: u64) -> Result<Vec<GroupSubset>, CheckError> {
    let mut r = rng(cfg, stream);
    let specs = [GroupSpec::new(cfg.p, 2)?, GroupSpec::new(cfg.p, 3)?];
    Ok((0..FUZZ_SETS)
        .map(|i| {
            let d = r.gen_range(0.15..0.85);
            random_set(&specs[i % 2], d, &mut r)
        })
        .collect())
}

#[derive(Default)]
struct Tally {
    searched: usize,
    witnesses: usize,
    bound_only: usize,
    failures: Vec<serde_json::Value>,
}

impl Tally {
    /// Revalidate `out` (or the error producing it) against `target`.
    fn record(&mut self, case: usize, source: &Witness, out: qfa_core::Result<Witness>, target: &GroupSubset) {
        self.witnesses += 1;
        if let Err(e) = out.and_then(|w| w.revalidate(target).map(|_| w)) {
            self.failures.push(json!({ "case": case, "source": source.vectors(), "error": e.to_string() }));
        }
    }

    fn outcome(self) -> Outcome {
        let pass = self.failures.is_empty() && self.witnesses > 0;
        let measured = json!({
            "sets": self.searched,
            "witnesses": self.witnesses,
            "bound_only": self.bound_only,
            "failures": self.failures.len(),
        });
        let out = Outcome::new(pass, measured, json!({ "failures": 0, "witnesses": ">= 1" }));
        if self.failures.is_empty() {
            out
        } else {
            out.with_witness(self.failures)
        }
    }
}

fn bound_only(o: &SearchOutcome) -> usize {
    matches!(o, SearchOutcome::BoundOnly { .. }) as usize
}

fn complement(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut t = Tally::default();
    for (i, a) in corpus(cfg, 51)?.iter().enumerate() {
        t.searched += 1;
        let not_a = a.complement();
        for k in [2, 3] {
            let h = find_hop2(a, k, &SearchBudget::default())?;
            t.bound_only += bound_only(&h);
            if let Some(w) = h.witness() {
                t.record(i, w, hop2_complement(w), &not_a);
            }
        }
        let f = find_fop2(a, 2, &SearchBudget::default())?;
        t.bound_only += bound_only(&f);
        if let Some(w) = f.witness() {
            t.record(i, w, fop2_complement(w), &not_a);
        }
    }
    Ok(t.outcome())
}

fn hop2_op(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut t = Tally::default();
    for (i, a) in corpus(cfg, 52)?.iter().enumerate() {
        t.searched += 1;
        for k in [2, 3] {
            let h = find_hop2(a, k, &SearchBudget::default())?;
            t.bound_only += bound_only(&h);
            if let Some(w) = h.witness() {
                t.record(i, w, hop2_to_op(w), a);
            }
        }
    }
    Ok(t.outcome())
}

fn fop2_vc(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut t = Tally::default();
    for (i, a) in corpus(cfg, 53)?.iter().enumerate() {
        t.searched += 1;
        let f = find_fop2(a, 2, &SearchBudget::default())?;
        t.bound_only += bound_only(&f);
        if let Some(w) = f.witness() {
            t.record(i, w, fop2_to_shattering(w), a);
        }
    }
    Ok(t.outcome())
}

fn vc2_fop2(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut t = Tally::default();
    for (i, a) in corpus(cfg, 54)?.iter().enumerate() {
        t.searched += 1;
        let d = vc2_dim(a, 2, &SearchBudget::default())?;
        t.bound_only += !d.exact as usize;
        if let Some(w) = &d.witness {
            t.record(i, w, vc2_to_fop2(w), a);
        }
    }
    Ok(t.outcome())
}

fn vc2_le_vc(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let (mut compared, mut bad) = (0, Vec::new());
    for (i, a) in corpus(cfg, 55)?.iter().enumerate() {
        let d2 = vc2_dim(a, 2, &SearchBudget::default())?;
        let d1 = vc_dim(a, 4, &SearchBudget::default())?;
        if !(d2.exact && d1.exact) {
            continue;
        }
        compared += 1;
        // a capped VC2 value is only a lower bound, which still must not exceed VC
        if d2.dim > d1.dim {
            bad.push(json!({ "case": i, "vc2": d2.dim, "vc": d1.dim }));
        }
    }
    let out = Outcome::new(bad.is_empty() && compared > 0, json!({ "compared": compared, "violations": bad.len() }), json!({ "violations": 0 }));
    Ok(if bad.is_empty() { out } else { out.with_witness(bad) })
}

/// A random quadric level set `{x : x^T M x = c}`.
fn random_quadric(spec: &GroupSpec, r: &mut impl Rng) -> Result<GroupSubset, CheckError> {
    let m = random_sym_matrix(spec.p(), spec.n(), r);
    Ok(quadric(spec, &m, r.gen_range(0..spec.p()))?)
}

fn intersection(cfg: &SuiteConfig) -> Result<Outcome, CheckError> {
    let mut r = rng(cfg, 56);
    let budget = SearchBudget::default();
    let (mut tested, mut premise_failed, mut bad) = (0, 0, Vec::new());
    for i in 0..60 {
        let spec = GroupSpec::new(cfg.p, 2 + i % 2)?;
        let ell = 2 + (i / 2) % 2;
        // A is a quadric level set, a union of two, or a random set; B a level set
        let a = match i % 3 {
            0 => random_quadric(&spec, &mut r)?,
            1 => random_quadric(&spec, &mut r)?.union(&random_quadric(&spec, &mut r)?),
            _ => random_set(&spec, r.gen_range(0.1..0.5), &mut r),
        };
        let b = random_quadric(&spec, &mut r)?;
        if !find_hop2(&a, ell, &budget)?.is_none() || !find_hop2(&b, 2, &budget)?.is_none() {
            premise_failed += 1;
            continue;
        }
        tested += 1;
        let both = a.intersection(&b);
        let out = find_hop2(&both, ell, &budget)?;
        if !out.is_none() {
            bad.push(json!({ "case": i, "n": spec.n(), "ell": ell, "outcome": out.label(), "witness": out.witness().map(|w| w.vectors()) }));
        }
    }
    let out = Outcome::new(
        bad.is_empty() && tested > 0,
        json!({ "pairs_tested": tested, "premise_not_met": premise_failed, "violations": bad.len() }),
        json!("find_hop2(A and B, l) is NONE"),
    );
    Ok(if bad.is_empty() { out } else { out.with_witness(bad) })
}
