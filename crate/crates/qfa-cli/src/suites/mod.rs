//! Named verification suites. Each suite is a fixed catalogue of checks;
//! checks run concurrently and are reported in catalogue order.

mod appendix;
mod closure;
mod gs;
mod qgs;
mod quadric;
mod regularize;
mod uniformity;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::Value;
use thiserror::Error;

use crate::config::SuiteConfig;
use crate::report::{CheckResult, CheckStatus, SuiteResult};

pub const SUITES: [&str; 7] = ["gs", "quadric", "qgs", "uniformity", "closure", "regularize", "appendix"];

pub type CheckError = Box<dyn std::error::Error + Send + Sync>;

/// What a check found. `measured` and `bound` carry the offending values on failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub measured: Value,
    pub bound: Value,
    pub witness: Option<Value>,
}

impl Outcome {
    pub fn new(pass: bool, measured: impl Into<Value>, bound: impl Into<Value>) -> Self {
        Self { pass, measured: measured.into(), bound: bound.into(), witness: None }
    }

    pub fn with_witness(mut self, w: impl serde::Serialize) -> Self {
        self.witness = serde_json::to_value(w).ok();
        self
    }
}

pub struct CheckDef {
    pub id: &'static str,
    pub anchor: &'static str,
    pub run: fn(&SuiteConfig) -> Result<Outcome, CheckError>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown suite {0:?}; expected one of gs, quadric, qgs, uniformity, closure, regularize, appendix")]
pub struct UnknownSuite(pub String);

pub fn catalogue(suite: &str) -> Result<Vec<CheckDef>, UnknownSuite> {
    Ok(match suite {
        "gs" => gs::checks(),
        "quadric" => quadric::checks(),
        "qgs" => qgs::checks(),
        "uniformity" => uniformity::checks(),
        "closure" => closure::checks(),
        "regularize" => regularize::checks(),
        "appendix" => appendix::checks(),
        other => return Err(UnknownSuite(other.to_string())),
    })
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into())
}

fn run_check(def: &CheckDef, cfg: &SuiteConfig) -> CheckResult {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| (def.run)(cfg)));
    let runtime_ms = start.elapsed().as_millis() as u64;
    let (status, measured, bound, witness) = match outcome {
        Ok(Ok(o)) => (if o.pass { CheckStatus::Pass } else { CheckStatus::Fail }, o.measured, o.bound, o.witness),
        Ok(Err(e)) => (CheckStatus::Error, Value::String(e.to_string()), Value::Null, None),
        Err(p) => (CheckStatus::Error, Value::String(format!("panicked: {}", panic_message(p))), Value::Null, None),
    };
    CheckResult { id: def.id.to_string(), anchor: def.anchor.to_string(), status, measured, bound, witness, runtime_ms }
}

/// Run every check of `suite`, optionally only those whose id is listed.
pub fn run_checks(suite: &str, cfg: &SuiteConfig, only: Option<&[&str]>) -> Result<SuiteResult, UnknownSuite> {
    let defs: Vec<CheckDef> = catalogue(suite)?.into_iter().filter(|d| only.is_none_or(|o| o.contains(&d.id))).collect();
    let checks: Vec<CheckResult> = defs.par_iter().map(|d| run_check(d, cfg)).collect();
    let mut config = cfg.to_map();
    config.insert("suite".into(), suite.to_string());
    Ok(SuiteResult::new(suite, checks, config))
}

pub fn run_suite(suite: &str, cfg: &SuiteConfig) -> Result<SuiteResult, UnknownSuite> {
    run_checks(suite, cfg, None)
}

pub(crate) fn rng(cfg: &SuiteConfig, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

pub(crate) fn random_set(spec: &qfa_core::fp::GroupSpec, density: f64, rng: &mut impl rand::Rng) -> qfa_core::fp::GroupSubset {
    qfa_core::fp::GroupSubset::from_indices(spec, (0..spec.order()).filter(|_| rng.gen_bool(density))).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert_eq!(run_suite("nope", &SuiteConfig::default()).unwrap_err(), UnknownSuite("nope".into()));
    }

    #[test]
    fn catalogue_ids_are_unique() {
        for s in SUITES {
            let defs = catalogue(s).unwrap();
            let mut ids: Vec<_> = defs.iter().map(|d| d.id).collect();
            ids.sort_unstable();
            ids.dedup();
            assert_eq!(ids.len(), defs.len(), "{s}");
        }
    }

    #[test]
    fn errors_and_panics_become_error_status() {
        let cfg = SuiteConfig::default();
        let failing = CheckDef { id: "e", anchor: "", run: |_| Err("boom".into()) };
        let r = run_check(&failing, &cfg);
        assert_eq!((r.status, r.measured), (CheckStatus::Error, Value::String("boom".into())));
        let panicking = CheckDef { id: "p", anchor: "", run: |_| panic!("bad") };
        assert_eq!(run_check(&panicking, &cfg).status, CheckStatus::Error);
    }
}
