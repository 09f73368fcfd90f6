//! Cross-module invariants as property tests.

use proptest::prelude::*;
use qfa_core::constructions::{first_nonzero, gs, gs_metric, union_of_cosets};
use qfa_core::detectors::{
    find_fop2, find_hop2, fop2_complement, fop2_to_shattering, hop2_complement, hop2_to_op, vc2_dim, vc2_to_fop2, vc_dim,
    SearchBudget,
};
use qfa_core::factors::{
    atom_codes, atom_sizes, factor_rank, make_high_rank, pullback_factor, pullback_partition, random_factor, random_sym_matrix,
    refines, same_partition, LinearFactor, QuadraticFactor,
};
use qfa_core::formula::{GrowthFunction, RankFunction};
use qfa_core::fp::{bilin_eval, dft, idft, quad_eval, ComplexValue, FpVector, GroupSpec, GroupSubset};
use qfa_core::regularize::{factor_chain_check, find_uniform_dense_coset, stable_linear_decomposition, EngineBudget};
use qfa_core::uniformity::{dev2_measure, dev2_naive, gowers_inner, u2_norm, u3_norm, BipartiteGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn subset(spec: &GroupSpec, rng: &mut ChaCha8Rng, density: f64) -> GroupSubset {
    GroupSubset::from_indices(spec, (0..spec.order()).filter(|_| rng.gen_bool(density))).unwrap()
}

fn vector(p: u32, n: usize, rng: &mut ChaCha8Rng) -> FpVector {
    FpVector::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect())
}

fn complex_fn(spec: &GroupSpec, rng: &mut ChaCha8Rng) -> Vec<ComplexValue> {
    (0..spec.order()).map(|_| ComplexValue::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn index_round_trip(n in 1usize..=6, raw in any::<usize>()) {
        let spec = GroupSpec::new(3, n).unwrap();
        let i = raw % spec.order();
        prop_assert_eq!(spec.index(&spec.coords(i)), i);
    }

    #[test]
    fn polarization(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let m = random_sym_matrix(3, n, &mut r);
        let (x, y) = (vector(3, n, &mut r), vector(3, n, &mut r));
        let lhs = quad_eval(&m, &x.add(&y)).unwrap();
        let rhs = (quad_eval(&m, &x).unwrap() + 2 * bilin_eval(&m, &x, &y).unwrap() + quad_eval(&m, &y).unwrap()) % 3;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn parseval_and_inversion(seed in any::<u64>(), n in 1usize..=5) {
        let spec = GroupSpec::new(3, n).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let f = complex_fn(&spec, &mut r);
        let fhat = dft(&spec, &f).unwrap();
        let mean_sq = f.iter().map(|z| z.norm_sqr()).sum::<f64>() / spec.order() as f64;
        prop_assert!((mean_sq - fhat.iter().map(|z| z.norm_sqr()).sum::<f64>()).abs() < 1e-9);
        let back = idft(&spec, &fhat).unwrap();
        prop_assert!(f.iter().zip(&back).all(|(a, b)| (a - b).norm() < 1e-9));
    }

    #[test]
    fn u2_below_u3_and_gowers_cauchy_schwarz(seed in any::<u64>(), n in 1usize..=3) {
        let spec = GroupSpec::new(3, n).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let f = complex_fn(&spec, &mut r);
        prop_assert!(u2_norm(&spec, &f).unwrap() <= u3_norm(&spec, &f).unwrap() + 1e-9);
        let fs: Vec<Vec<ComplexValue>> = (0..8).map(|_| complex_fn(&spec, &mut r)).collect();
        let bound: f64 = fs.iter().map(|g| u3_norm(&spec, g).unwrap()).product();
        prop_assert!(gowers_inner(&spec, &fs).unwrap().norm() <= bound + 1e-7);
    }

    #[test]
    fn atoms_partition_the_group(seed in any::<u64>(), n in 1usize..=5, ell in 0usize..=2, q in 0usize..=2) {
        prop_assume!(ell <= n);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let b = random_factor(3, n, ell, q, &mut r).unwrap();
        let spec = GroupSpec::new(3, n).unwrap();
        let sizes = atom_sizes(&spec, &b).unwrap();
        prop_assert_eq!(sizes.len(), 3usize.pow((ell + q) as u32));
        prop_assert_eq!(sizes.iter().sum::<u64>(), spec.order() as u64);
    }

    #[test]
    fn rank_never_grows_with_more_matrices(seed in any::<u64>(), n in 1usize..=4, q in 1usize..=3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let b = random_factor(3, n, 0, q, &mut r).unwrap();
        let mut more = b.quadratic.clone();
        more.push(random_sym_matrix(3, n, &mut r));
        let bigger = QuadraticFactor::new(b.linear.clone(), more).unwrap();
        prop_assert!(factor_rank(&bigger).unwrap() <= factor_rank(&b).unwrap());
    }

    #[test]
    fn repair_refines_and_reaches_target(seed in any::<u64>(), n in 2usize..=5, ell in 0usize..=2, q in 1usize..=3, c in 0usize..=2) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let b = random_factor(3, n, ell.min(n), q, &mut r).unwrap();
        let f = RankFunction::parse(&format!("x+{c}")).unwrap();
        let out = make_high_rank(&b, &f, 12).unwrap();
        prop_assert!(refines(&GroupSpec::new(3, n).unwrap(), &out.factor, &b).unwrap());
        prop_assert!(out.rank.at_least(out.target));
    }

    #[test]
    fn pullback_atoms_are_preimages(seed in any::<u64>(), n in 2usize..=5, ell in 0usize..=2, q in 1usize..=2, k in 1usize..=3) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let b = random_factor(3, n, ell.min(n), q, &mut r).unwrap();
        let m = b.linear.vectors.len() + q;
        let rows = (0..k).map(|_| vector(3, m, &mut r)).collect();
        let rf = LinearFactor::new(3, m, rows).unwrap();
        let pb = pullback_factor(&b, &rf).unwrap();
        let spec = GroupSpec::new(3, n).unwrap();
        prop_assert!(same_partition(&atom_codes(&spec, &pb.factor).unwrap(), &pullback_partition(&spec, &b, &rf).unwrap()));
    }

    #[test]
    fn gs_membership_by_first_nonzero(n in 1usize..=5, raw in any::<usize>()) {
        let a = gs(n, 3).unwrap();
        let spec = a.spec();
        let x = raw % spec.order();
        let c = spec.coords(x);
        let expect = c[first_nonzero(&c) - 1] == 1;
        prop_assert_eq!(a.contains(x), expect);
    }

    #[test]
    fn common_prefix_is_ultrametric(x in prop::collection::vec(0u32..3, 6), y in prop::collection::vec(0u32..3, 6), z in prop::collection::vec(0u32..3, 6)) {
        let (xz, _) = gs_metric(&x, &z);
        let (xy, _) = gs_metric(&x, &y);
        let (yz, _) = gs_metric(&y, &z);
        prop_assert!(xz >= xy.min(yz));
    }

    #[test]
    fn dev2_codegree_matches_naive(seed in any::<u64>(), nl in 1usize..=20, nr in 1usize..=20) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<bool> = (0..nl * nr).map(|_| r.gen_bool(0.5)).collect();
        let g = BipartiteGraph::from_fn((0..nl).collect(), (0..nr).collect(), |x, y| edges[x * nr + y]);
        prop_assert_eq!(dev2_measure(&g).unwrap().exact, dev2_naive(&g).unwrap().exact);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transforms_revalidate(seed in any::<u64>(), n in 2usize..=3, density in 0.2f64..0.8) {
        let spec = GroupSpec::new(3, n).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = subset(&spec, &mut r, density);
        let not_a = a.complement();
        let budget = SearchBudget::default();
        if let Some(w) = find_hop2(&a, 2, &budget).unwrap().witness() {
            hop2_complement(w).unwrap().revalidate(&not_a).unwrap();
            hop2_to_op(w).unwrap().revalidate(&a).unwrap();
        }
        if let Some(w) = find_fop2(&a, 2, &budget).unwrap().witness() {
            fop2_complement(w).unwrap().revalidate(&not_a).unwrap();
            fop2_to_shattering(w).unwrap().revalidate(&a).unwrap();
        }
        let d2 = vc2_dim(&a, 2, &budget).unwrap();
        if let Some(w) = &d2.witness {
            vc2_to_fop2(w).unwrap().revalidate(&a).unwrap();
        }
        let d1 = vc_dim(&a, 4, &budget).unwrap();
        if d1.exact && d2.exact {
            prop_assert!(d2.dim <= d1.dim);
        }
    }

    #[test]
    fn uniform_coset_postconditions(seed in any::<u64>(), n in 3usize..=6, eps_i in 0usize..3, codim in 0usize..=2) {
        let spec = GroupSpec::new(3, n).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let density = r.gen_range(0.05..0.95);
        let a = subset(&spec, &mut r, density);
        let h = random_factor(3, n, codim, 0, &mut r).unwrap().linear;
        let eps = [0.2, 0.3, 0.5][eps_i];
        let u = find_uniform_dense_coset(&a, &h, eps).unwrap();
        prop_assert_eq!(u.postconditions(eps), [true; 3]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn unions_of_cosets_resolve_deterministically(seed in any::<u64>(), codim in 1usize..=2, count in 1usize..=3) {
        let (n, p) = (4, 3);
        let spec = GroupSpec::new(p, n).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let h = random_factor(p, n, codim, 0, &mut r).unwrap().linear;
        let reps: Vec<FpVector> = (0..count).map(|_| vector(p, n, &mut r)).collect();
        let a = union_of_cosets(&spec, &h, &reps).unwrap();
        let psi = GrowthFunction::parse("2*x").unwrap();
        let run = || stable_linear_decomposition(&a, &LinearFactor::empty(p, n), &[], 1, 0.1, &psi, &EngineBudget::default()).unwrap();
        let out = run();
        prop_assert!(out.conclusion && out.error_cosets.is_empty());
        prop_assert!(out.codim <= codim);
        prop_assert!(factor_chain_check(&out.chain, &a).unwrap().all());
        prop_assert_eq!(run().chain, out.chain);
    }
}
