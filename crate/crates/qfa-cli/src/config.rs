//! Flat `key=value` configuration. Flags given on the command line win.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("config key {key}: {message}")]
    Value { key: String, message: String },
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

/// Blank lines and `#` comments are ignored; later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
        };
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub const DEFAULT_SEED: u64 = 0xF0F2;

/// Parameters every suite receives. `n` and `eps`, when set, replace the
/// defaults of the checks that take them.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub p: u32,
    pub n: Option<usize>,
    pub eps: Option<f64>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { p: 3, n: None, eps: None, seed: DEFAULT_SEED }
    }
}

fn parse_seed(v: &str) -> Option<u64> {
    match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => v.parse().ok(),
    }
}

impl SuiteConfig {
    /// Apply `key=value` pairs on top of `self`. Unknown keys are errors.
    pub fn apply(mut self, kv: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let bad = |key: &str, message: &str| ConfigError::Value { key: key.to_string(), message: message.to_string() };
        for (k, v) in kv {
            match k.as_str() {
                "p" => self.p = v.parse().map_err(|_| bad(k, "expected an integer"))?,
                "n" => self.n = Some(v.parse().map_err(|_| bad(k, "expected an integer"))?),
                "eps" => self.eps = Some(v.parse().map_err(|_| bad(k, "expected a number"))?),
                "seed" => self.seed = parse_seed(v).ok_or_else(|| bad(k, "expected a decimal or 0x-prefixed integer"))?,
                // recorded in reports for information only
                "suite" => {}
                _ => return Err(bad(k, "unknown key")),
            }
        }
        Ok(self)
    }

    /// The recorded form; [`SuiteConfig::apply`] reads it back.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("p".into(), self.p.to_string());
        if let Some(n) = self.n {
            m.insert("n".into(), n.to_string());
        }
        if let Some(e) = self.eps {
            m.insert("eps".into(), format!("{e:?}"));
        }
        m.insert("seed".into(), format!("{:#x}", self.seed));
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = parse_config("# defaults\np = 3\nseed=0x10\n\nn=5\n").unwrap();
        let cfg = SuiteConfig::default().apply(&file).unwrap();
        assert_eq!((cfg.n, cfg.seed), (Some(5), 16));
        let mut flags = BTreeMap::new();
        flags.insert("n".to_string(), "4".to_string());
        assert_eq!(cfg.apply(&flags).unwrap().n, Some(4));
    }

    #[test]
    fn round_trip_and_errors() {
        let cfg = SuiteConfig { p: 5, n: Some(3), eps: Some(0.1), seed: 77 };
        assert_eq!(SuiteConfig::default().apply(&cfg.to_map()).unwrap(), cfg);
        assert!(matches!(parse_config("novalue"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(SuiteConfig::default().apply(&parse_config("colour=red").unwrap()).is_err());
    }
}
