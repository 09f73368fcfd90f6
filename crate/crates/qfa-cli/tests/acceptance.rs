//! End-to-end acceptance: every suite, one PASS/FAIL line per criterion.

use qfa_cli::config::SuiteConfig;
use qfa_cli::report::{CheckStatus, SuiteResult};
use qfa_cli::suites::run_suite;

struct Criterion {
    number: u32,
    name: &'static str,
    suite: &'static str,
    /// Check id prefix within the suite.
    prefix: &'static str,
}

const CRITERIA: [Criterion; 8] = [
    Criterion { number: 1, name: "Green-Sanders example", suite: "gs", prefix: "gs." },
    Criterion { number: 2, name: "quadric stability", suite: "quadric", prefix: "quadric." },
    Criterion { number: 3, name: "quadratic Green-Sanders example", suite: "qgs", prefix: "qgs." },
    Criterion { number: 4, name: "uniformity numerics", suite: "uniformity", prefix: "uniformity." },
    Criterion { number: 5, name: "closure and transfer", suite: "closure", prefix: "closure." },
    Criterion { number: 6, name: "factors", suite: "uniformity", prefix: "factors." },
    Criterion { number: 7, name: "regularization", suite: "regularize", prefix: "regularize." },
    Criterion { number: 8, name: "appendix", suite: "appendix", prefix: "appendix." },
];

#[test]
fn acceptance_criteria() {
    let cfg = SuiteConfig::default();
    let mut results: Vec<SuiteResult> = Vec::new();
    let mut failed = Vec::new();
    for c in &CRITERIA {
        if !results.iter().any(|r| r.suite == c.suite) {
            results.push(run_suite(c.suite, &cfg).expect("known suite"));
        }
        let r = results.iter().find(|r| r.suite == c.suite).unwrap();
        let checks: Vec<_> = r.checks.iter().filter(|k| k.id.starts_with(c.prefix)).collect();
        let bad: Vec<String> = checks.iter().filter(|k| k.status != CheckStatus::Pass).map(|k| format!("{} {}", k.id, k.status.label())).collect();
        let pass = !checks.is_empty() && bad.is_empty();
        let ms: u64 = checks.iter().map(|k| k.runtime_ms).sum();
        println!("criterion {} ({}): {} [{} checks, {} ms]", c.number, c.name, if pass { "PASS" } else { "FAIL" }, checks.len(), ms);
        for b in &bad {
            println!("    {b}");
        }
        if !pass {
            failed.push(c.number);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
