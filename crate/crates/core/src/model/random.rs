//! Seeded generators. Every generator derives its stream from a ChaCha8 RNG
//! seeded with the caller's 64-bit seed, so outputs are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FractionalSolution, Instance, Solution, Variant, MAGNITUDE_LIMIT};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Uniform over the feasible set: every entry independent and uniform.
pub fn random_solution(inst: &Instance, seed: u64) -> Solution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_solution_with(inst, &mut rng)
}

pub(crate) fn random_solution_with<R: Rng>(inst: &Instance, rng: &mut R) -> Solution {
    let sigma = (0..inst.m())
        .map(|_| rng.random_range(0..inst.x_choices()))
        .collect();
    let tau = (0..inst.n())
        .map(|_| rng.random_range(0..inst.y_choices()))
        .collect();
    Solution { sigma, tau }
}

/// Instance with every cost entry i.i.d. uniform in `lo..=hi`.
pub fn random_instance(
    variant: Variant,
    m: usize,
    n: usize,
    lo: i64,
    hi: i64,
    seed: u64,
) -> Result<Instance> {
    if lo > hi {
        return Err(Error::Parameter(format!("lo = {lo} exceeds hi = {hi}")));
    }
    if m == 0 {
        return Err(Error::Dimension { name: "m", value: m });
    }
    if n == 0 {
        return Err(Error::Dimension { name: "n", value: n });
    }
    let amax = lo.unsigned_abs().max(hi.unsigned_abs()) as i128;
    let bound = ((m * n) as i128 + m as i128 + n as i128) * amax;
    if bound > MAGNITUDE_LIMIT {
        return Err(Error::Overflow {
            bound,
            allowed: MAGNITUDE_LIMIT,
        });
    }
    let xc = variant.x_choices(m, n);
    let yc = variant.y_choices(m, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |len: usize| -> Vec<i64> { (0..len).map(|_| rng.random_range(lo..=hi)).collect() };
    let q = draw(m * xc * yc * n);
    let c = draw(m * xc);
    let d = draw(yc * n);
    Instance::new(variant, m, n, q, c, d)
}

/// A random feasible point of the relaxation.
///
/// Each row of `x` (column of `y`) gets integer weights drawn from
/// `0..=granularity`, normalized to sum to one.
pub fn random_fractional(inst: &Instance, seed: u64, granularity: u32) -> FractionalSolution {
    let granularity = granularity.max(1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stochastic = |len: usize| -> Vec<Rational> {
        let mut w: Vec<i64> = (0..len).map(|_| rng.random_range(0..=granularity)).collect();
        if w.iter().all(|&v| v == 0) {
            let at = rng.random_range(0..len);
            w[at] = 1;
        }
        let total: i64 = w.iter().sum();
        w.into_iter()
            .map(|v| Rational::new(v, total).expect("positive total"))
            .collect()
    };
    let x: Vec<Vec<Rational>> = (0..inst.m()).map(|_| stochastic(inst.x_choices())).collect();
    let columns: Vec<Vec<Rational>> = (0..inst.n()).map(|_| stochastic(inst.y_choices())).collect();
    let y = (0..inst.y_choices())
        .map(|k| columns.iter().map(|col| col[k].clone()).collect())
        .collect();
    FractionalSolution::new(inst, x, y).expect("generated point is feasible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn degenerate_range_gives_zero_instance() {
        let inst = random_instance(Variant::Bqap1, 3, 2, 0, 0, 9).unwrap();
        assert_eq!(inst, Instance::zeros(Variant::Bqap1, 3, 2).unwrap());
    }

    #[test]
    fn seeds_are_deterministic() {
        let a = random_instance(Variant::Bqap2, 3, 2, -5, 5, 17).unwrap();
        let b = random_instance(Variant::Bqap2, 3, 2, -5, 5, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(random_solution(&a, 3), random_solution(&a, 3));
        assert_eq!(random_fractional(&a, 3, 5), random_fractional(&a, 3, 5));
    }

    #[test]
    fn generated_instance_validates() {
        let inst = random_instance(Variant::Bqap1, 3, 3, -5, 5, 1).unwrap();
        let raw = super::super::RawInstance::from(&inst);
        assert_eq!(super::super::validate_instance(&raw).unwrap(), inst);
        assert!(inst.q_flat().iter().all(|v| (-5..=5).contains(v)));
    }

    #[test]
    fn bad_ranges_rejected() {
        assert!(random_instance(Variant::Bqap1, 2, 2, 3, 1, 0).is_err());
        assert!(matches!(
            random_instance(Variant::Bqap1, 2, 2, 0, i64::MAX / 8, 0),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn solutions_are_uniform() {
        let inst = Instance::zeros(Variant::Bqap1, 2, 2).unwrap();
        let draws = 100_000u64;
        let mut counts: HashMap<Solution, u64> = HashMap::new();
        for seed in 0..draws {
            let sol = random_solution(&inst, seed);
            inst.check_solution(&sol).unwrap();
            *counts.entry(sol).or_default() += 1;
        }
        assert_eq!(counts.len(), 16);
        for (sol, count) in counts {
            let freq = count as f64 / draws as f64;
            assert!((freq - 1.0 / 16.0).abs() < 0.01, "{sol}: {freq}");
        }
    }

    #[test]
    fn fractional_points_are_feasible() {
        let inst = random_instance(Variant::Bqap2, 3, 2, -3, 3, 2).unwrap();
        for seed in 0..20 {
            random_fractional(&inst, seed, 4).check(&inst).unwrap();
        }
    }
}
