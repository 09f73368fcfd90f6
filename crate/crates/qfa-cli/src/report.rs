//! Suite results and their JSON and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
}

impl CheckStatus {
    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    /// The claim the check reproduces.
    pub anchor: String,
    pub status: CheckStatus,
    pub measured: Value,
    pub bound: Value,
    pub witness: Option<Value>,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub verdict: CheckStatus,
    /// Everything needed to rerun the suite.
    pub config: BTreeMap<String, String>,
}

impl SuiteResult {
    pub fn new(suite: &str, checks: Vec<CheckResult>, config: BTreeMap<String, String>) -> Self {
        let verdict = if checks.iter().all(|c| c.status == CheckStatus::Pass) { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { suite: suite.to_string(), checks, verdict, config }
    }

    pub fn passed(&self) -> bool {
        self.verdict == CheckStatus::Pass
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

pub fn emit_report(result: &SuiteResult, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(result).expect("reports serialize");
            v.push(b'\n');
            v
        }
        Format::Text => render_text(result).into_bytes(),
    }
}

fn compact(v: &Value, width: usize) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    };
    if s.chars().count() > width {
        let cut: String = s.chars().take(width - 3).collect();
        format!("{cut}...")
    } else {
        s
    }
}

fn render_text(r: &SuiteResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "suite {}  verdict {}", r.suite, r.verdict.label());
    let _ = writeln!(out, "{:<24} {:<6} {:>9}  {:<28} {:<28}", "check", "status", "ms", "measured", "bound");
    for c in &r.checks {
        let _ = writeln!(
            out,
            "{:<24} {:<6} {:>9}  {:<28} {:<28}",
            c.id,
            c.status.label(),
            c.runtime_ms,
            compact(&c.measured, 28),
            compact(&c.bound, 28)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn check(status: CheckStatus) -> CheckResult {
        CheckResult {
            id: "x".into(),
            anchor: "a".into(),
            status,
            measured: json!(1.5),
            bound: json!({"max": 2}),
            witness: None,
            runtime_ms: 3,
        }
    }

    #[test]
    fn verdicts() {
        assert!(SuiteResult::new("empty", vec![], BTreeMap::new()).passed());
        let r = SuiteResult::new("s", vec![check(CheckStatus::Pass), check(CheckStatus::Fail)], BTreeMap::new());
        assert_eq!(r.verdict, CheckStatus::Fail);
        assert!(!SuiteResult::new("s", vec![check(CheckStatus::Error)], BTreeMap::new()).passed());
    }

    #[test]
    fn json_round_trips() {
        let r = SuiteResult::new("s", vec![check(CheckStatus::Pass)], BTreeMap::from([("seed".into(), "0x1".into())]));
        let back: SuiteResult = serde_json::from_slice(&emit_report(&r, Format::Json)).unwrap();
        assert_eq!(back, r);
        let v: Value = serde_json::from_slice(&emit_report(&r, Format::Json)).unwrap();
        for key in ["suite", "checks", "verdict", "config"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["checks"][0]["status"], "PASS");
    }

    #[test]
    fn text_table_is_fixed_width() {
        let r = SuiteResult::new("s", vec![check(CheckStatus::Pass), check(CheckStatus::Fail)], BTreeMap::new());
        let text = String::from_utf8(emit_report(&r, Format::Text)).unwrap();
        let widths: Vec<usize> = text.lines().skip(1).map(|l| l.trim_end().len()).collect();
        assert!(widths.windows(2).skip(1).all(|w| w[0] == w[1]), "{text}");
        assert!(text.contains("FAIL"));
    }
}
