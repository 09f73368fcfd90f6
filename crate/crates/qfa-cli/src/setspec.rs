//! The set-spec mini-language: `name(:key=value(,key=value)*)?`.
//!
//! ```text
//! gs:p=3,n=4
//! qgs:p=3,n=6
//! quadric:p=3,n=5,c=0
//! sparse:p=3,n=6
//! union-cosets:p=3,n=4,h=1200/0110,reps=0000/1000
//! union-cosets:p=3,n=8,codim=2,count=3,seed=7
//! file:sets/a.txt
//! ```
//!
//! Vectors are digit strings, first coordinate first; lists use `/`.

use std::collections::BTreeMap;

use qfa_core::constructions::{gs, qgs, sparse_example, standard_quadric, union_of_cosets};
use qfa_core::factors::LinearFactor;
use qfa_core::fp::{parse_digits, parse_subset, FpVector, GroupSpec, GroupSubset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("set spec error at column {column}: {message}")]
pub struct SetSpecError {
    /// 1-based column in the spec text.
    pub column: usize,
    pub message: String,
}

fn err<T>(column: usize, message: impl Into<String>) -> Result<T, SetSpecError> {
    Err(SetSpecError { column, message: message.into() })
}

struct Params {
    values: BTreeMap<String, (usize, String)>,
    end: usize,
}

impl Params {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.values.get(key)
    }

    fn int(&self, key: &str, default: Option<u64>) -> Result<u64, SetSpecError> {
        match (self.raw(key), default) {
            (Some((col, v)), _) => v.parse().or_else(|_| err(*col, format!("{key} must be a decimal integer, got {v:?}"))),
            (None, Some(d)) => Ok(d),
            (None, None) => err(self.end, format!("missing key {key}")),
        }
    }

    fn vectors(&self, key: &str, p: u32, n: usize) -> Result<Vec<FpVector>, SetSpecError> {
        let Some((col, v)) = self.raw(key) else {
            return err(self.end, format!("missing key {key}"));
        };
        v.split('/')
            .map(|d| match parse_digits(d, p) {
                Ok(c) if c.len() == n => Ok(FpVector::new(p, c)),
                Ok(c) => err(*col, format!("vector {d:?} has {} digits, expected {n}", c.len())),
                Err(e) => err(*col, e.to_string()),
            })
            .collect()
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), SetSpecError> {
        match self.values.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, (col, _))) => err(*col, format!("unknown key {k}; expected one of {}", allowed.join(", "))),
            None => Ok(()),
        }
    }
}

fn split_params(text: &str, offset: usize) -> Result<Params, SetSpecError> {
    let mut values = BTreeMap::new();
    let mut col = offset;
    for part in text.split(',') {
        let Some((k, v)) = part.split_once('=') else {
            return err(col, format!("expected key=value, got {part:?}"));
        };
        if values.insert(k.trim().to_string(), (col, v.trim().to_string())).is_some() {
            return err(col, format!("duplicate key {k}"));
        }
        col += part.len() + 1;
    }
    Ok(Params { values, end: offset + text.len() })
}

fn group(params: &Params) -> Result<(u32, usize), SetSpecError> {
    let p = params.int("p", Some(3))?;
    let n = params.int("n", None)?;
    let col = params.raw("p").map_or(params.end, |r| r.0);
    match GroupSpec::new(p as u32, n as usize) {
        Ok(_) => Ok((p as u32, n as usize)),
        Err(e) => err(col, e.to_string()),
    }
}

/// Build the set a spec describes. Every name is deterministic; the random
/// union of cosets takes its seed from the spec.
pub fn parse_set_spec(text: &str) -> Result<GroupSubset, SetSpecError> {
    let text = text.trim();
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (text, None),
    };
    let offset = name.len() + 2;
    if name == "file" {
        let Some(path) = rest.filter(|r| !r.is_empty()) else {
            return err(offset - 1, "file needs a path");
        };
        let body = std::fs::read_to_string(path).or_else(|e| err(offset, format!("cannot read {path}: {e}")))?;
        return parse_subset(&body).or_else(|e| err(offset, e.to_string()));
    }
    let params = match rest {
        Some(r) => split_params(r, offset)?,
        None => Params { values: BTreeMap::new(), end: offset },
    };
    let built = match name {
        "gs" | "qgs" | "sparse" => {
            params.reject_unknown(&["p", "n"])?;
            let (p, n) = group(&params)?;
            match name {
                "gs" => gs(n, p),
                "qgs" => qgs(n, p).map(|(s, _)| s),
                _ => sparse_example(n, p),
            }
        }
        "quadric" => {
            params.reject_unknown(&["p", "n", "c"])?;
            let (p, n) = group(&params)?;
            standard_quadric(n, p, params.int("c", Some(0))? as u32 % p)
        }
        "union-cosets" => {
            params.reject_unknown(&["p", "n", "h", "reps", "codim", "count", "seed"])?;
            let (p, n) = group(&params)?;
            let spec = GroupSpec::new(p, n).expect("validated above");
            let (h, reps) = if params.raw("h").is_some() {
                (LinearFactor::new(p, n, params.vectors("h", p, n)?).expect("lengths checked"), params.vectors("reps", p, n)?)
            } else {
                random_cosets(&params, p, n)?
            };
            union_of_cosets(&spec, &h, &reps)
        }
        other => return err(1, format!("unknown set name {other:?}; expected gs, qgs, quadric, sparse, union-cosets or file")),
    };
    built.or_else(|e| err(offset, e.to_string()))
}

/// A union of `count` distinct cosets of a random subgroup of codimension `codim`.
fn random_cosets(params: &Params, p: u32, n: usize) -> Result<(LinearFactor, Vec<FpVector>), SetSpecError> {
    let codim = params.int("codim", Some(1))? as usize;
    let count = params.int("count", Some(1))? as usize;
    let seed = params.int("seed", Some(0))?;
    if codim > n {
        return err(params.raw("codim").map_or(params.end, |r| r.0), "codim exceeds n");
    }
    if count as u128 > (p as u128).pow(codim as u32) {
        return err(params.raw("count").map_or(params.end, |r| r.0), "more cosets than the quotient has");
    }
    Ok(random_union(p, n, codim, count, seed))
}

/// Random functionals of full rank `codim` and `count` representatives in distinct cosets.
pub fn random_union(p: u32, n: usize, codim: usize, count: usize, seed: u64) -> (LinearFactor, Vec<FpVector>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = qfa_core::factors::random_factor(p, n, codim, 0, &mut rng).expect("codim <= n").linear;
    let mut reps: Vec<FpVector> = Vec::new();
    let mut labels: Vec<Vec<u32>> = Vec::new();
    while reps.len() < count {
        let v = FpVector::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        let label: Vec<u32> = h.vectors.iter().map(|r| r.dot(&v)).collect();
        if !labels.contains(&label) {
            labels.push(label);
            reps.push(v);
        }
    }
    (h, reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_constructions() {
        assert_eq!(parse_set_spec("gs:p=3,n=4").unwrap().len(), 40);
        assert_eq!(parse_set_spec("quadric:p=3,n=3,c=0").unwrap().len(), 9);
        assert_eq!(parse_set_spec("sparse:n=6").unwrap().len(), 6);
        let u = parse_set_spec("union-cosets:p=3,n=4,h=1200/0110,reps=0000/1000").unwrap();
        assert_eq!(u.len(), 18);
        let r = parse_set_spec("union-cosets:p=3,n=6,codim=2,count=3,seed=9").unwrap();
        assert_eq!(r.len(), 3 * 81);
    }

    #[test]
    fn file_sets() {
        let dir = std::env::temp_dir().join(format!("qfa-setspec-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a.txt");
        std::fs::write(&path, "3 2\n01\n22\n").unwrap();
        assert_eq!(parse_set_spec(&format!("file:{}", path.display())).unwrap().len(), 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_set_spec("cube:n=3").unwrap_err().column, 1);
        assert_eq!(parse_set_spec("gs:p=4,n=3").unwrap_err().column, 4);
        assert_eq!(parse_set_spec("gs:p=3,n=x").unwrap_err().column, 8);
        assert!(parse_set_spec("gs:p=3").unwrap_err().message.contains("missing key n"));
        assert!(parse_set_spec("gs:p=3,n=40").is_err());
        assert!(parse_set_spec("quadric:n=3,d=1").unwrap_err().message.contains("unknown key d"));
    }
}
