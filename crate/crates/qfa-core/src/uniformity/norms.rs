//! `U^2` and `U^3` norms and the `U^3` inner product.
//!
//! The fast routines go through the Fourier transform; the `*_direct`
//! versions average over cubes and exist as cross-checks on small groups.

use rayon::prelude::*;

use crate::error::{invalid, shape, Result};
use crate::fp::{dft, ComplexValue, GroupSpec, Neumaier};

fn check_len(spec: &GroupSpec, f: &[ComplexValue]) -> Result<()> {
    if f.len() != spec.order() {
        return Err(shape(format!("function table of length {} on a group of order {}", f.len(), spec.order())));
    }
    Ok(())
}

fn root(x: f64, k: i32) -> f64 {
    x.max(0.0).powf(1.0 / k as f64)
}

fn sum_fourth_powers(fhat: &[ComplexValue]) -> f64 {
    let mut acc = Neumaier::default();
    for z in fhat {
        acc.add(ComplexValue::new(z.norm_sqr() * z.norm_sqr(), 0.0));
    }
    acc.sum().re
}

/// `||f||_{U^2}`, from `||f||^4 = sum_t |f_hat(t)|^4`.
pub fn u2_norm(spec: &GroupSpec, f: &[ComplexValue]) -> Result<f64> {
    check_len(spec, f)?;
    Ok(root(sum_fourth_powers(&dft(spec, f)?), 4))
}

/// `||f||_{U^2}^4` as `E_a |E_x f(x) conj(f(x + a))|^2`, in `O(|G|^2)`.
pub fn u2_direct(spec: &GroupSpec, f: &[ComplexValue]) -> Result<f64> {
    check_len(spec, f)?;
    let order = spec.order();
    let per_shift: Vec<f64> = (0..order)
        .into_par_iter()
        .map(|a| {
            let mut acc = Neumaier::default();
            for x in 0..order {
                acc.add(f[x] * f[spec.add(x, a)].conj());
            }
            (acc.sum() / order as f64).norm_sqr()
        })
        .collect();
    let mut acc = Neumaier::default();
    for v in per_shift {
        acc.add(ComplexValue::new(v, 0.0));
    }
    Ok(acc.sum().re / order as f64)
}

fn multiplicative_derivative(spec: &GroupSpec, f: &[ComplexValue], c: usize) -> Vec<ComplexValue> {
    (0..spec.order()).map(|x| f[x] * f[spec.add(x, c)].conj()).collect()
}

/// `||f||_{U^3}`, from `||f||^8 = E_c ||f(x) conj(f(x + c))||_{U^2}^4`.
pub fn u3_norm(spec: &GroupSpec, f: &[ComplexValue]) -> Result<f64> {
    check_len(spec, f)?;
    let per_shift: Vec<f64> = (0..spec.order())
        .map(|c| Ok(sum_fourth_powers(&dft(spec, &multiplicative_derivative(spec, f, c))?)))
        .collect::<Result<_>>()?;
    let mut acc = Neumaier::default();
    for v in per_shift {
        acc.add(ComplexValue::new(v, 0.0));
    }
    Ok(root(acc.sum().re / spec.order() as f64, 8))
}

fn cube_sign_conj(eps: usize) -> bool {
    eps.count_ones() % 2 == 1
}

/// Gowers `U^3` inner product; `fs[i + 2j + 4k]` sits at `x + i a + j b + k c`.
///
/// Computed as `E_c` of the `U^2` inner product of `F_ij(y) = f_ij0(y) conj(f_ij1(y + c))`.
pub fn gowers_inner(spec: &GroupSpec, fs: &[Vec<ComplexValue>]) -> Result<ComplexValue> {
    if fs.len() != 8 {
        return Err(invalid("the U^3 inner product takes eight functions"));
    }
    for f in fs {
        check_len(spec, f)?;
    }
    let order = spec.order();
    let mut acc = Neumaier::default();
    for c in 0..order {
        let hats: Vec<Vec<ComplexValue>> = (0..4)
            .map(|ij| {
                let (f0, f1) = (&fs[ij], &fs[ij + 4]);
                let g: Vec<ComplexValue> = (0..order).map(|y| f0[y] * f1[spec.add(y, c)].conj()).collect();
                dft(spec, &g)
            })
            .collect::<Result<_>>()?;
        let mut inner = Neumaier::default();
        for t in 0..order {
            inner.add(hats[0][t] * hats[1][t].conj() * hats[2][t].conj() * hats[3][t]);
        }
        acc.add(inner.sum());
    }
    Ok(acc.sum() / order as f64)
}

const DIRECT_LIMIT: usize = 81;

/// `E_{x,a,b,c}` over all cubes; groups of order at most 81.
pub fn gowers_inner_direct(spec: &GroupSpec, fs: &[Vec<ComplexValue>]) -> Result<ComplexValue> {
    if fs.len() != 8 {
        return Err(invalid("the U^3 inner product takes eight functions"));
    }
    for f in fs {
        check_len(spec, f)?;
    }
    let order = spec.order();
    if order > DIRECT_LIMIT {
        return Err(invalid(format!("direct cube averages are limited to groups of order {DIRECT_LIMIT}")));
    }
    let mut acc = Neumaier::default();
    for x in 0..order {
        for a in 0..order {
            let xa = spec.add(x, a);
            for b in 0..order {
                let (xb, xab) = (spec.add(x, b), spec.add(xa, b));
                for c in 0..order {
                    let corner = [x, xa, xb, xab];
                    let mut prod = ComplexValue::new(1.0, 0.0);
                    for eps in 0..8usize {
                        let base = corner[eps & 3];
                        let pt = if eps & 4 != 0 { spec.add(base, c) } else { base };
                        let v = fs[eps][pt];
                        prod *= if cube_sign_conj(eps) { v.conj() } else { v };
                    }
                    acc.add(prod);
                }
            }
        }
    }
    Ok(acc.sum() / (order as f64).powi(4))
}

/// `||f||_{U^3}^8` by direct cube averaging; groups of order at most 81.
pub fn u3_direct(spec: &GroupSpec, f: &[ComplexValue]) -> Result<f64> {
    let fs = vec![f.to_vec(); 8];
    Ok(gowers_inner_direct(spec, &fs)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::roots_of_unity;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_fn(spec: &GroupSpec, rng: &mut ChaCha8Rng) -> Vec<ComplexValue> {
        (0..spec.order()).map(|_| ComplexValue::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    fn quadratic_phase(spec: &GroupSpec) -> Vec<ComplexValue> {
        let w = roots_of_unity(spec.p());
        let p = spec.p();
        (0..spec.order()).map(|x| w[(spec.coords(x).iter().map(|&c| c * c).sum::<u32>() % p) as usize]).collect()
    }

    #[test]
    fn constant_and_linear_phase() {
        let spec = GroupSpec::new(3, 3).unwrap();
        let one = vec![ComplexValue::new(1.0, 0.0); spec.order()];
        assert!((u2_norm(&spec, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!((u3_norm(&spec, &one).unwrap() - 1.0).abs() < 1e-12);
        let w = roots_of_unity(3);
        let lin: Vec<ComplexValue> = (0..spec.order()).map(|x| w[spec.dot(x, &[1, 2, 0]) as usize]).collect();
        assert!((u2_norm(&spec, &lin).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_phase_has_unit_u3_norm() {
        for n in 1..=3 {
            let spec = GroupSpec::new(3, n).unwrap();
            let f = quadratic_phase(&spec);
            assert!((u3_norm(&spec, &f).unwrap() - 1.0).abs() < 1e-9);
            if n <= 2 {
                assert!((u3_direct(&spec, &f).unwrap() - 1.0).abs() < 1e-9);
            }
            // a nondegenerate quadratic phase is Fourier-flat: U^2 norm p^{-n/4}
            let expect = 3f64.powf(-(n as f64) / 4.0);
            assert!((u2_norm(&spec, &f).unwrap() - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn nested_and_direct_inner_products_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=2 {
            let spec = GroupSpec::new(3, n).unwrap();
            let fs: Vec<_> = (0..8).map(|_| random_fn(&spec, &mut rng)).collect();
            let a = gowers_inner(&spec, &fs).unwrap();
            let b = gowers_inner_direct(&spec, &fs).unwrap();
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn u2_identity_and_fourier_sandwich(seed in any::<u64>(), n in 1usize..=4) {
            let spec = GroupSpec::new(3, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f: Vec<ComplexValue> = random_fn(&spec, &mut rng).into_iter().map(|z| z / 2f64.sqrt()).collect();
            let fast = u2_norm(&spec, &f).unwrap().powi(4);
            prop_assert!((fast - u2_direct(&spec, &f).unwrap()).abs() < 1e-9);
            let sup = dft(&spec, &f).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(sup.powi(4) <= fast + 1e-12);
            prop_assert!(fast <= sup.powi(2) + 1e-12);
        }

        #[test]
        fn norms_are_nested(seed in any::<u64>(), n in 1usize..=3) {
            let spec = GroupSpec::new(3, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_fn(&spec, &mut rng);
            prop_assert!(u2_norm(&spec, &f).unwrap() <= u3_norm(&spec, &f).unwrap() + 1e-12);
        }

        #[test]
        fn gowers_cauchy_schwarz(seed in any::<u64>()) {
            let spec = GroupSpec::new(3, 2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fs: Vec<_> = (0..8).map(|_| random_fn(&spec, &mut rng)).collect();
            let lhs = gowers_inner(&spec, &fs).unwrap().norm();
            let rhs: f64 = fs.iter().map(|f| u3_norm(&spec, f).unwrap()).product();
            prop_assert!(lhs <= rhs + 1e-7);
        }
    }
}
