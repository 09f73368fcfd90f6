//! The non-suite subcommands. Each returns the JSON value to print.

use std::time::{Duration, Instant};

use qfa_core::detectors::{
    cap2_check, count_tree_encodings, find_fop2, find_hop2, find_op, find_tree_encoding, vc2_dim, vc_dim, Cap2Outcome,
    SearchBudget, SearchOutcome, Witness,
};
use qfa_core::factors::{
    make_high_rank, parse_factor, Factor, pullback_factor, write_factor, GeneralQuadraticFactor, LinearFactor,
    QuadraticFactor,
};
use qfa_core::formula::{GrowthFunction, RankFunction};
use qfa_core::fp::{parse_digits, ComplexValue, FpVector, GroupSubset};
use qfa_core::regularize::{stable_linear_decomposition, EngineBudget};
use qfa_core::uniformity::{
    balanced_oct, dev23_measure, dev2_measure, density_transfer_check, k222_count, pair_graph, triad_graph, u2_norm, u3_norm,
    BilinearTable, MeasureReport, PairDescriptor, TriadDescriptor,
};
use serde_json::{json, Value};

pub type CmdError = Box<dyn std::error::Error + Send + Sync>;

fn fail<T>(msg: impl Into<String>) -> Result<T, CmdError> {
    Err(msg.into().into())
}

pub fn witness_json(w: &Witness) -> Value {
    json!({ "kind": w.kind, "k": w.k, "p": w.p, "n": w.n, "roles": w.vectors() })
}

fn outcome_json(o: &SearchOutcome, with_witness: bool) -> Value {
    let mut v = json!({ "outcome": o.label() });
    if let SearchOutcome::BoundOnly { nodes } = o {
        v["nodes"] = json!(nodes);
    }
    if let (true, Some(w)) = (with_witness, o.witness()) {
        v["witness"] = witness_json(w);
    }
    v
}

pub struct DetectArgs<'a> {
    pub pattern: &'a str,
    pub k: usize,
    pub witness: bool,
    pub exhaustive: bool,
    pub node_limit: Option<u64>,
}

pub fn detect(set: &GroupSubset, args: &DetectArgs) -> Result<Value, CmdError> {
    let budget = match (args.exhaustive, args.node_limit) {
        (true, _) => SearchBudget::nodes(u64::MAX),
        (false, Some(n)) => SearchBudget::nodes(n),
        (false, None) => SearchBudget::default(),
    };
    let start = Instant::now();
    let k = args.k;
    let mut out = match args.pattern {
        "op" => outcome_json(&find_op(set, k, &budget)?, args.witness),
        "hop2" => outcome_json(&find_hop2(set, k, &budget)?, args.witness),
        "fop2" => outcome_json(&find_fop2(set, k, &budget)?, args.witness),
        "vc" | "vc2" => {
            let d = if args.pattern == "vc" { vc_dim(set, k, &budget)? } else { vc2_dim(set, k, &budget)? };
            let mut v = json!({ "dim": d.dim, "exact": d.exact, "capped": d.capped });
            if let (true, Some(w)) = (args.witness, &d.witness) {
                v["witness"] = witness_json(w);
            }
            v
        }
        "cap2" => match cap2_check(set, &budget)? {
            Cap2Outcome::Holds => json!({ "outcome": "HOLDS" }),
            Cap2Outcome::Violated(c) => {
                let spec = set.spec();
                let vecs = |xs: [usize; 2]| xs.map(|x| qfa_core::fp::format_digits(&spec.coords(x), spec.p()));
                json!({ "outcome": "VIOLATED", "cube": { "x": vecs(c.x), "y": vecs(c.y), "z": vecs(c.z) } })
            }
            Cap2Outcome::BoundOnly { nodes } => json!({ "outcome": "BOUND-ONLY", "nodes": nodes }),
        },
        "tree" => {
            let full = GroupSubset::full(set.spec());
            let count = count_tree_encodings(set, k, &full, &full)?;
            let mut v = json!({ "depth": k, "encodings": count.to_string() });
            if args.witness {
                v["search"] = outcome_json(&find_tree_encoding(set, k, &full, &full, &budget)?, true);
            }
            v
        }
        other => return fail(format!("unknown pattern {other:?}; expected op, hop2, fop2, vc, vc2, cap2 or tree")),
    };
    out["pattern"] = json!(args.pattern);
    out["k"] = json!(k);
    out["runtime_ms"] = json!(start.elapsed().as_millis() as u64);
    Ok(out)
}

pub fn load_factor(path: &str) -> Result<GeneralQuadraticFactor, CmdError> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read factor file {path}: {e}"))?;
    Ok(parse_factor(&text)?)
}

fn homogeneous(g: &GeneralQuadraticFactor) -> Result<QuadraticFactor, CmdError> {
    match g.as_quadratic() {
        Some(b) => Ok(b),
        None => fail("this operation needs a factor without shift vectors"),
    }
}

/// Pair (two atoms) or triad (three atoms) descriptor JSON.
pub enum Descriptor {
    Pair(PairDescriptor),
    Triad(TriadDescriptor),
}

pub fn parse_descriptor(text: &str) -> Result<Descriptor, CmdError> {
    let v: Value = serde_json::from_str(text)?;
    match v.get("atoms").and_then(Value::as_array).map(Vec::len) {
        Some(2) => Ok(Descriptor::Pair(serde_json::from_value(v)?)),
        Some(3) => Ok(Descriptor::Triad(serde_json::from_value(v)?)),
        _ => fail("descriptor needs an \"atoms\" array of length 2 or 3"),
    }
}

pub struct MeasureArgs<'a> {
    pub name: &'a str,
    pub factor: Option<&'a str>,
    pub triad: Option<&'a str>,
    pub bound: Option<f64>,
    pub base: (usize, usize, usize),
}

/// `1_A - density(A)` as a complex function on the group.
fn balanced(set: &GroupSubset) -> Vec<ComplexValue> {
    let spec = set.spec();
    let alpha = set.len() as f64 / spec.order() as f64;
    (0..spec.order()).map(|x| ComplexValue::new(set.contains(x) as u8 as f64 - alpha, 0.0)).collect()
}

pub fn measure(set: &GroupSubset, args: &MeasureArgs) -> Result<MeasureReport, CmdError> {
    let start = Instant::now();
    let spec = set.spec();
    let name = args.name;
    if name == "u2" || name == "u3" {
        let f = balanced(set);
        let v = if name == "u2" { u2_norm(spec, &f)? } else { u3_norm(spec, &f)? };
        let bound = args.bound.unwrap_or(1.0);
        return Ok(MeasureReport::new(name, v, bound, format!("||1_A - alpha||_{} <= {bound}", name.to_uppercase()), start));
    }
    let Some(fpath) = args.factor else {
        return fail(format!("{name} needs --factor"));
    };
    let Some(triad) = args.triad else {
        return fail(format!("{name} needs --triad"));
    };
    let b = homogeneous(&load_factor(fpath)?)?;
    let table = BilinearTable::new(spec, &b)?;
    let desc = parse_descriptor(triad)?;
    let q = b.q() as i32;
    let p = spec.p() as f64;
    match (name, desc) {
        ("dev2", Descriptor::Pair(e)) => {
            let d = dev2_measure(&pair_graph(&table, &e)?)?;
            let bound = args.bound.unwrap_or(0.05);
            Ok(MeasureReport::new("dev2", d.deviation, bound, format!("dev2 deviation <= {bound} (density {:.6})", d.density), start))
        }
        ("dev23", Descriptor::Triad(d)) => {
            let g = triad_graph(&table, &d)?;
            let member = |x: usize, y: usize, z: usize| set.contains(spec.add(spec.add(x, y), z));
            let r = dev23_measure(&g, &member)?;
            let bound = args.bound.unwrap_or(0.1);
            Ok(MeasureReport::new("dev23", r.eps1, bound, format!("eps1 <= {bound} (eps2 {:.6}, d2 {:.6}, d3 {:.6})", r.eps2, r.d2, r.d3), start))
        }
        ("oct", Descriptor::Triad(d)) => {
            let o = balanced_oct(set, &table, &d)?;
            let bound = args.bound.unwrap_or(0.1 * p.powi(-12 * q));
            Ok(MeasureReport::new("oct", o.normalized, bound, format!("normalized oct <= {bound:e}"), start))
        }
        ("density-transfer", Descriptor::Triad(d)) => Ok(density_transfer_check(set, &table, &d, args.bound.unwrap_or(0.05))?),
        ("k222", Descriptor::Triad(d)) => {
            let g = triad_graph(&table, &d)?;
            let count = k222_count(&g, args.base)?;
            let full: f64 = g.parts().iter().map(|x| x.len() as f64).product();
            let bound = args.bound.unwrap_or(full);
            Ok(MeasureReport::new("k222", count as f64, bound, format!("K222 count at base {:?} <= {bound}", args.base), start))
        }
        ("dev2", _) => fail("dev2 needs a pair descriptor (two atoms)"),
        ("dev23" | "oct" | "density-transfer" | "k222", _) => fail(format!("{name} needs a triad descriptor (three atoms)")),
        _ => fail(format!("unknown measure {name:?}; expected u2, u3, dev2, dev23, oct, density-transfer or k222")),
    }
}

pub fn factor_rank_cmd(g: &GeneralQuadraticFactor) -> Result<Value, CmdError> {
    let (ell, q) = g.complexity();
    Ok(json!({ "p": g.linear.p, "n": g.linear.n, "ell": ell, "q": q, "rank": g.rank()?.to_string() }))
}

pub fn factor_repair(g: &GeneralQuadraticFactor, rank_fn: &str, bound: usize) -> Result<Value, CmdError> {
    let b = homogeneous(g)?;
    let r = make_high_rank(&b, &RankFunction::parse(rank_fn)?, bound)?;
    let out = GeneralQuadraticFactor::from(&r.factor);
    Ok(json!({
        "rank": r.rank.to_string(),
        "target": r.target,
        "dropped": r.dropped,
        "complexity": r.factor.complexity(),
        "factor": write_factor(&out),
    }))
}

/// `R` is given as `/`-separated digit strings over the label space.
pub fn factor_pullback(g: &GeneralQuadraticFactor, r: &str) -> Result<Value, CmdError> {
    let b = homogeneous(g)?;
    let (p, m) = (b.p(), b.ell() + b.q());
    let rows = r
        .split('/')
        .filter(|s| !s.is_empty())
        .map(|d| {
            let c = parse_digits(d, p)?;
            if c.len() != m {
                return fail(format!("R row {d:?} must have {m} digits"));
            }
            Ok(FpVector::new(p, c))
        })
        .collect::<Result<Vec<_>, CmdError>>()?;
    let pb = pullback_factor(&b, &LinearFactor::new(p, m, rows)?)?;
    Ok(json!({ "case": pb.case, "factor": write_factor(&pb.factor) }))
}

pub struct RegularizeArgs<'a> {
    pub eps: f64,
    pub psi: &'a str,
    pub max_codim: usize,
    pub depth: usize,
    pub time_limit: Option<u64>,
}

/// The decomposition summary and the chain, serialized.
pub fn regularize(set: &GroupSubset, args: &RegularizeArgs) -> Result<(Value, Value), CmdError> {
    let spec = set.spec();
    let psi = GrowthFunction::parse(args.psi)?;
    let budget = EngineBudget {
        max_codim: args.max_codim,
        time_limit: args.time_limit.map(Duration::from_secs),
        ..EngineBudget::default()
    };
    let start = Instant::now();
    let r = stable_linear_decomposition(set, &LinearFactor::empty(spec.p(), spec.n()), &[], args.depth, args.eps, &psi, &budget)?;
    let summary = json!({
        "codim": r.codim,
        "conclusion": r.conclusion,
        "partial": r.partial,
        "error_cosets": r.error_cosets.len(),
        "rounds": r.rounds,
        "chain_steps": r.chain.steps.len(),
        "runtime_ms": start.elapsed().as_millis() as u64,
    });
    Ok((summary, serde_json::to_value(&r.chain)?))
}
