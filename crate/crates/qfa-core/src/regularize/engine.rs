//! Greedy linear regularization with factor chains.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::atomicity::{atomicity_check, part_class, AtomicityVerdict};
use crate::detectors::count_tree_encodings;
use crate::error::{invalid, shape, Result};
use crate::factors::{atom_codes, Factor, LinearFactor, QuadraticFactor};
use crate::formula::GrowthFunction;
use crate::fp::{dft_real, FpVector, GroupSpec, GroupSubset};
use crate::linalg;
use crate::uniformity::LabelClass;

/// One step of a linear factor chain: the factor and its atom classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub factor: LinearFactor,
    /// Atom codes of the factor in each class; codes are little-endian base `p`.
    pub ones: Vec<usize>,
    pub zeros: Vec<usize>,
    pub errors: Vec<usize>,
}

/// Parameters and steps of a linear factor chain. `steps[0]` is the base factor;
/// its classes are not constrained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorChain {
    pub eps: f64,
    pub max_growth: usize,
    pub g: String,
    pub f: String,
    pub steps: Vec<ChainStep>,
}

/// Per-condition outcome of [`factor_chain_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainVerdict {
    pub refinement: bool,
    pub growth: bool,
    pub classes: bool,
    pub error_count: bool,
}

impl ChainVerdict {
    pub fn all(&self) -> bool {
        self.refinement && self.growth && self.classes && self.error_count
    }
}

fn is_syntactic_extension(coarse: &LinearFactor, fine: &LinearFactor) -> bool {
    coarse.vectors.len() <= fine.vectors.len() && coarse.vectors.iter().zip(&fine.vectors).all(|(a, b)| a == b)
}

/// Check the four chain conditions against exact densities of `set`.
///
/// Writing `l_i` for the number of functionals of step `i` and
/// `t_i = eps p^(-g(l_(i-1) - l_0))`:
/// 1. every factor extends the previous one (its functionals come first);
/// 2. `f(l_(i-1) - l_0) <= l_i - l_0 <= D`;
/// 3. atoms labelled one (zero) have density at least `1 - t_i` (at most `t_i`);
/// 4. each atom of step `i - 1` contains at most `t_i p^(l_i - l_(i-1))` error atoms of step `i`.
pub fn factor_chain_check(chain: &FactorChain, set: &GroupSubset) -> Result<ChainVerdict> {
    let spec = set.spec();
    let g = GrowthFunction::parse(&chain.g)?;
    let f = GrowthFunction::parse(&chain.f)?;
    let p = spec.p();
    let mut v = ChainVerdict { refinement: true, growth: true, classes: true, error_count: true };
    let Some(base) = chain.steps.first() else {
        return Ok(v);
    };
    let l0 = base.factor.vectors.len();
    for w in chain.steps.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        if cur.factor.p != p || cur.factor.n != spec.n() {
            return Err(shape("chain factor lives in a different group"));
        }
        let (lp, li) = (prev.factor.vectors.len(), cur.factor.vectors.len());
        v.refinement &= is_syntactic_extension(&prev.factor, &cur.factor);
        v.growth &= li >= l0 && f.eval(lp - l0) <= li - l0 && li - l0 <= chain.max_growth;
        let t = chain.eps * (p as f64).powi(-(g.eval(lp.saturating_sub(l0)) as i32));
        let qf = QuadraticFactor::new(cur.factor.clone(), vec![])?;
        let codes = atom_codes(spec, &qf)?;
        let mut sizes = vec![0u64; qf.num_labels()];
        let mut hits = vec![0u64; qf.num_labels()];
        for (x, &c) in codes.iter().enumerate() {
            sizes[c] += 1;
            hits[c] += set.contains(x) as u64;
        }
        for &c in &cur.ones {
            v.classes &= c < sizes.len() && sizes[c] > 0 && hits[c] as f64 >= (1.0 - t) * sizes[c] as f64 - 1e-9;
        }
        for &c in &cur.zeros {
            v.classes &= c < sizes.len() && sizes[c] > 0 && hits[c] as f64 <= t * sizes[c] as f64 + 1e-9;
        }
        // every nonempty atom must be classified exactly once
        let mut seen = vec![0u8; sizes.len()];
        for &c in cur.ones.iter().chain(&cur.zeros).chain(&cur.errors) {
            if c < seen.len() {
                seen[c] += 1;
            }
        }
        v.classes &= (0..sizes.len()).all(|c| sizes[c] == 0 || seen[c] == 1);
        if li >= lp && v.refinement {
            // with a syntactic extension the parent atom is the code's low part
            let parent = (p as usize).pow(lp as u32);
            let mut per = std::collections::HashMap::new();
            for &c in &cur.errors {
                *per.entry(c % parent).or_insert(0usize) += 1;
            }
            let cap = t * (p as f64).powi((li - lp) as i32);
            v.error_count &= per.values().all(|&k| k as f64 <= cap + 1e-9);
        } else {
            v.error_count = false;
        }
    }
    Ok(v)
}

/// Limits for the engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineBudget {
    /// Largest codimension in the starting subgroup.
    pub max_codim: usize,
    pub time_limit: Option<Duration>,
    /// Count tree encodings with leaves in the starting subgroup when the
    /// node tuples number at most this many.
    pub encoding_tuple_limit: f64,
}

impl Default for EngineBudget {
    fn default() -> Self {
        Self { max_codim: 8, time_limit: None, encoding_tuple_limit: 1e8 }
    }
}

/// State after each refinement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub codim: usize,
    /// `eps p^(-psi(m))`.
    pub threshold: f64,
    pub error_cosets: usize,
    /// Error cosets over all cosets.
    pub error_fraction: f64,
    /// `(mu + threshold) p^(m + l)`.
    pub bound: f64,
    pub meets_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableDecomposition {
    /// Functionals cutting out the final subgroup, the starting ones first.
    pub factor: LinearFactor,
    pub codim: usize,
    /// Codes of the error cosets.
    pub error_cosets: Vec<usize>,
    pub verdict: AtomicityVerdict,
    pub rounds: Vec<RoundRecord>,
    /// The conclusion shape holds at the final codimension.
    pub conclusion: bool,
    /// The budget ran out before the conclusion was reached.
    pub partial: bool,
    /// Encodings of `T(d)` with leaves in the starting subgroup, and that count over `|H|^(2^d) |G|^(2^d - 1)`.
    pub encodings: Option<(u128, f64)>,
    pub chain: FactorChain,
}

/// Energy gain of adding the functional `t`: the Fourier mass on the new
/// part of the annihilator.
fn gain(spec: &GroupSpec, power: &[f64], span: &[usize], in_span: &[bool], t: usize) -> f64 {
    let p = spec.p();
    let mut acc = 0.0;
    for &s in span {
        let mut x = s;
        for _ in 1..p {
            x = spec.add(x, t);
            if !in_span[x] {
                acc += power[x];
            }
        }
    }
    acc
}

fn linear_codes(spec: &GroupSpec, l: &LinearFactor) -> Result<Vec<usize>> {
    atom_codes(spec, &QuadraticFactor::new(l.clone(), vec![])?)
}

fn coset_classes(codes: &[usize], set: &GroupSubset, labels: usize, eps: f64) -> (Vec<u64>, Vec<LabelClass>) {
    let mut sizes = vec![0u64; labels];
    let mut hits = vec![0u64; labels];
    for (x, &c) in codes.iter().enumerate() {
        sizes[c] += 1;
        hits[c] += set.contains(x) as u64;
    }
    let classes = sizes.iter().zip(&hits).map(|(&s, &h)| if s == 0 { LabelClass::Error } else { part_class(h, s, eps) }).collect();
    (sizes, classes)
}

fn chain_step(factor: &LinearFactor, sizes: &[u64], classes: &[LabelClass]) -> ChainStep {
    let pick = |k: LabelClass| (0..classes.len()).filter(|&c| sizes[c] > 0 && classes[c] == k).collect();
    ChainStep { factor: factor.clone(), ones: pick(LabelClass::NearOne), zeros: pick(LabelClass::NearZero), errors: pick(LabelClass::Error) }
}

/// Greedy linear regularization of `set` inside the subgroup cut out by `h0`.
///
/// Each round adds the functional of largest energy gain (least index on
/// ties) and stops once at most `(mu + eps p^(-psi(m))) p^(m + l)` cosets of the
/// current subgroup fail to be `eps p^(-psi(m))`-atomic, where `m` is the
/// codimension gained, `l` that of `h0` and `mu = |omega0| / p^l`. Rounds
/// are grouped into chain steps: a step closes as soon as its error atoms
/// satisfy the per-parent count with `g = psi` and `f = 0`.
pub fn stable_linear_decomposition(
    set: &GroupSubset,
    h0: &LinearFactor,
    omega0: &[usize],
    depth: usize,
    eps: f64,
    psi: &GrowthFunction,
    budget: &EngineBudget,
) -> Result<StableDecomposition> {
    let spec = set.spec();
    let (p, n) = (spec.p(), spec.n());
    if h0.p != p || h0.n != n {
        return Err(shape("starting subgroup and set live in different groups"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps must lie in (0, 1)"));
    }
    let start = Instant::now();
    // keep an independent starting family so the coset codes are a bijection
    let rows = h0.rows();
    let keep = linalg::independent_subset(&rows, n, p);
    let mut factor = LinearFactor::new(p, n, keep.iter().map(|&i| h0.vectors[i].clone()).collect())?;
    let ell = factor.vectors.len();
    let mu = omega0.len() as f64 / (p as f64).powi(ell as i32);

    let encodings = if depth >= 1 {
        let hset = GroupSubset::from_fn(spec, |x| factor.vectors.iter().all(|v| spec.dot(x, &v.coords) == 0));
        let tuples = (spec.order() as f64).powi((1 << depth) - 1);
        if tuples <= budget.encoding_tuple_limit {
            let c = count_tree_encodings(set, depth, &hset, &GroupSubset::full(spec))?;
            let norm = (hset.len() as f64).powi(1 << depth) * (spec.order() as f64).powi((1 << depth) - 1);
            Some((c, c as f64 / norm))
        } else {
            None
        }
    } else {
        None
    };

    let ind: Vec<f64> = (0..spec.order()).map(|x| set.contains(x) as u8 as f64).collect();
    let power: Vec<f64> = dft_real(spec, &ind)?.iter().map(|z| z.norm_sqr()).collect();
    let mut span: Vec<usize> = spec.span(&factor.rows());
    let mut in_span = vec![false; spec.order()];
    for &s in &span {
        in_span[s] = true;
    }

    let threshold = |m: usize| eps * (p as f64).powi(-(psi.eval(m) as i32));
    let chain_g = psi.formula().text().to_string();
    let mut rounds = Vec::new();
    let mut chain_steps = vec![{
        let codes = linear_codes(spec, &factor)?;
        let labels = (p as usize).pow(ell as u32);
        let (sizes, classes) = coset_classes(&codes, set, labels, eps);
        chain_step(&factor, &sizes, &classes)
    }];
    let mut step_base = ell;
    let mut partial = false;
    loop {
        let m = factor.vectors.len() - ell;
        let codes = linear_codes(spec, &factor)?;
        let labels = (p as usize).pow(factor.vectors.len() as u32);
        let th = threshold(m);
        let (_, classes) = coset_classes(&codes, set, labels, th);
        let errors: Vec<usize> = (0..labels).filter(|&c| classes[c] == LabelClass::Error).collect();
        let bound = (mu + th) * (p as f64).powi((m + ell) as i32);
        let meets = errors.len() as f64 <= bound + 1e-9;
        rounds.push(RoundRecord {
            codim: m,
            threshold: th,
            error_cosets: errors.len(),
            error_fraction: errors.len() as f64 / labels as f64,
            bound,
            meets_bound: meets,
        });

        // close a chain step when the per-parent error count allows it
        if m > step_base - ell {
            let prev = chain_steps.last().unwrap();
            let lp = prev.factor.vectors.len();
            let t = eps * (p as f64).powi(-(psi.eval(lp - ell) as i32));
            let (csizes, cclasses) = coset_classes(&codes, set, labels, t);
            let step = chain_step(&factor, &csizes, &cclasses);
            let parent = (p as usize).pow(lp as u32);
            let mut per = std::collections::HashMap::new();
            for &c in &step.errors {
                *per.entry(c % parent).or_insert(0usize) += 1;
            }
            let cap = t * (p as f64).powi((factor.vectors.len() - lp) as i32);
            if per.values().all(|&k| k as f64 <= cap + 1e-9) && m <= budget.max_codim {
                chain_steps.push(step);
                step_base = factor.vectors.len();
            }
        }

        if meets {
            break;
        }
        if m >= budget.max_codim || m + ell >= n || budget.time_limit.is_some_and(|t| start.elapsed() > t) {
            partial = true;
            break;
        }
        // best new functional: largest gain, least index; skip the current span
        let mut best: Option<(f64, usize)> = None;
        for t in 1..spec.order() {
            if in_span[t] {
                continue;
            }
            let g = gain(spec, &power, &span, &in_span, t);
            if best.is_none_or(|(bg, _)| g > bg + 1e-12) {
                best = Some((g, t));
            }
        }
        let Some((g, t)) = best else {
            partial = true;
            break;
        };
        if g <= 1e-15 {
            // no Fourier mass left: every coset already has its final density
            partial = true;
            break;
        }
        factor.vectors.push(FpVector::new(p, spec.coords(t)));
        let mut grown = Vec::with_capacity(span.len() * p as usize);
        for &s in &span {
            let mut x = s;
            for _ in 0..p {
                grown.push(x);
                x = spec.add(x, t);
            }
        }
        grown.sort_unstable();
        grown.dedup();
        span = grown;
        for &s in &span {
            in_span[s] = true;
        }
    }

    let m = factor.vectors.len() - ell;
    let codes = linear_codes(spec, &factor)?;
    let th = threshold(m);
    let verdict = atomicity_check(&codes, set, th, 1.0)?;
    let error_cosets: Vec<usize> =
        verdict.part_ids.iter().zip(&verdict.classes).filter(|(_, c)| **c == LabelClass::Error).map(|(&id, _)| id).collect();
    let conclusion = rounds.last().is_some_and(|r| r.meets_bound);
    Ok(StableDecomposition {
        codim: m,
        error_cosets,
        verdict,
        conclusion,
        partial: partial && !conclusion,
        encodings,
        chain: FactorChain { eps, max_growth: budget.max_codim, g: chain_g, f: "0".into(), steps: chain_steps },
        rounds,
        factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gs, union_of_cosets};

    fn psi() -> GrowthFunction {
        GrowthFunction::parse("2*x").unwrap()
    }

    #[test]
    fn empty_set_passes_immediately() {
        let spec = GroupSpec::new(3, 4).unwrap();
        let r = stable_linear_decomposition(&GroupSubset::empty(&spec), &LinearFactor::empty(3, 4), &[], 1, 0.1, &psi(), &EngineBudget::default())
            .unwrap();
        assert!(r.conclusion && r.codim == 0 && r.error_cosets.is_empty());
        assert!(factor_chain_check(&r.chain, &GroupSubset::empty(&spec)).unwrap().all());
    }

    #[test]
    fn union_of_cosets_is_resolved_exactly() {
        let spec = GroupSpec::new(3, 6).unwrap();
        let h = LinearFactor::new(3, 6, vec![FpVector::new(3, vec![1, 2, 0, 1, 0, 0]), FpVector::new(3, vec![0, 1, 1, 0, 0, 2])]).unwrap();
        let reps: Vec<FpVector> = [[0u32, 0, 0, 0, 0, 1], [1, 0, 0, 0, 0, 0]].iter().map(|r| FpVector::new(3, r.to_vec())).collect();
        let a = union_of_cosets(&spec, &h, &reps).unwrap();
        let r = stable_linear_decomposition(&a, &LinearFactor::empty(3, 6), &[], 1, 0.1, &psi(), &EngineBudget::default()).unwrap();
        assert!(r.conclusion && r.error_cosets.is_empty() && r.codim <= 2, "{:?}", r.rounds);
        assert!(factor_chain_check(&r.chain, &a).unwrap().all());
        let again = stable_linear_decomposition(&a, &LinearFactor::empty(3, 6), &[], 1, 0.1, &psi(), &EngineBudget::default()).unwrap();
        assert_eq!(again.chain, r.chain);
    }

    #[test]
    fn gs_error_fraction_drops() {
        let a = gs(6, 3).unwrap();
        let budget = EngineBudget { max_codim: 4, ..EngineBudget::default() };
        let r = stable_linear_decomposition(&a, &LinearFactor::empty(3, 6), &[], 1, 0.1, &psi(), &budget).unwrap();
        assert!(r.rounds.iter().any(|x| x.codim <= 4 && x.error_fraction <= 0.2), "{:?}", r.rounds);
        assert!(factor_chain_check(&r.chain, &a).unwrap().all());
    }

    #[test]
    fn single_step_chain_and_forged_label() {
        let spec = GroupSpec::new(3, 3).unwrap();
        let l = LinearFactor::standard(3, 3, 1);
        let a = GroupSubset::from_fn(&spec, |x| spec.coords(x)[0] == 1);
        let step = ChainStep { factor: l.clone(), ones: vec![1], zeros: vec![0, 2], errors: vec![] };
        let chain = FactorChain { eps: 0.1, max_growth: 2, g: "0".into(), f: "0".into(), steps: vec![step.clone(), step] };
        assert!(factor_chain_check(&chain, &a).unwrap().all());
        // half-density atom forged as a one
        let half = GroupSubset::from_fn(&spec, |x| spec.coords(x)[0] == 1 || spec.coords(x)[0] == 0 && spec.coords(x)[1] == 0);
        let mut forged = chain.clone();
        forged.steps[1] = ChainStep { factor: l.clone(), ones: vec![1, 0], zeros: vec![2], errors: vec![] };
        let v = factor_chain_check(&forged, &half).unwrap();
        assert!(!v.classes && v.refinement && v.growth);
    }
}
