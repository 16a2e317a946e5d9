//! Closed-form average objective value and the structures built around it:
//! constant ("canonical") solutions, cyclic-shift equivalence classes and
//! domination-ratio arithmetic.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Instance, Solution};
use crate::rational::Rational;

/// `m*n` times the average objective value, which is always an integer.
///
/// Comparisons `value >= average` reduce to `m*n*value >= scaled`, so the
/// average never has to be materialized as a fraction in hot loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AverageThreshold {
    pub scaled: i128,
    pub scale: i128,
}

impl AverageThreshold {
    pub fn new(inst: &Instance) -> Self {
        let mn = (inst.m() * inst.n()) as i128;
        // c appears in mn/X of the mn shifts of a class, d in mn/Y of them.
        let c_weight = mn / inst.x_choices() as i128;
        let d_weight = mn / inst.y_choices() as i128;
        AverageThreshold {
            scaled: inst.q_sum() + c_weight * inst.c_sum() + d_weight * inst.d_sum(),
            scale: mn,
        }
    }

    /// Ordering of `value` relative to the average.
    #[inline]
    pub fn cmp_value(&self, value: i64) -> Ordering {
        (value as i128 * self.scale).cmp(&self.scaled)
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.scaled, self.scale).expect("scale = m*n > 0")
    }
}

/// Exact average objective value over the whole feasible set.
///
/// BQAP1: `sum(q)/(mn) + sum(c)/n + sum(d)/m`; BQAP2: `sum(q)/(mn) + sum(c)/m + sum(d)/n`.
pub fn average_value(inst: &Instance) -> Rational {
    let mn = BigInt::from(inst.m() * inst.n());
    let q = Rational::new(inst.q_sum(), mn).expect("mn > 0");
    let c = Rational::new(inst.c_sum(), inst.x_choices() as i64).expect("X > 0");
    let d = Rational::new(inst.d_sum(), inst.y_choices() as i64).expect("Y > 0");
    q + c + d
}

/// The solution with every row of `x` in column `a` and every column of `y` in row `b`.
pub fn canonical_solution(inst: &Instance, a: usize, b: usize) -> Result<Solution> {
    if a >= inst.x_choices() || b >= inst.y_choices() {
        return Err(Error::IndexOutOfRange(format!(
            "canonical pair ({a}, {b}) outside 0..{} x 0..{}",
            inst.x_choices(),
            inst.y_choices()
        )));
    }
    Ok(Solution::new(vec![a; inst.m()], vec![b; inst.n()]))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalSweep {
    pub best: Solution,
    pub worst: Solution,
    pub best_value: i64,
    pub worst_value: i64,
}

/// Values of all canonical solutions, indexed `a * Y + b`.
pub fn canonical_values(inst: &Instance) -> Vec<i64> {
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    let mut values = vec![0i64; xc * yc];
    // Walk q in storage order; entry (i, a, b, l) contributes to pair (a, b).
    for i in 0..m {
        for a in 0..xc {
            for b in 0..yc {
                let s: i64 = inst.q_row(i, a, b).iter().sum();
                values[a * yc + b] += s;
            }
        }
    }
    for a in 0..xc {
        let ca: i64 = (0..m).map(|i| inst.c(i, a)).sum();
        for b in 0..yc {
            let db: i64 = (0..n).map(|l| inst.d(b, l)).sum();
            values[a * yc + b] += ca + db;
        }
    }
    values
}

/// Best and worst canonical solutions; they bracket the average value.
///
/// Ties go to the lexicographically smallest `(a, b)`.
pub fn canonical_sweep(inst: &Instance) -> CanonicalSweep {
    let yc = inst.y_choices();
    let values = canonical_values(inst);
    let mut best = 0;
    let mut worst = 0;
    for (idx, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = idx;
        }
        if v > values[worst] {
            worst = idx;
        }
    }
    let sol = |idx: usize| Solution::new(vec![idx / yc; inst.m()], vec![idx % yc; inst.n()]);
    CanonicalSweep {
        best: sol(best),
        worst: sol(worst),
        best_value: values[best],
        worst_value: values[worst],
    }
}

/// Cyclic shift: `sigma[i] += a (mod X)`, `tau[l] += b (mod Y)`.
pub fn shift_solution(inst: &Instance, sol: &Solution, a: usize, b: usize) -> Result<Solution> {
    let (xc, yc) = (inst.x_choices(), inst.y_choices());
    if a >= xc || b >= yc {
        return Err(Error::IndexOutOfRange(format!(
            "shift ({a}, {b}) outside 0..{xc} x 0..{yc}"
        )));
    }
    inst.check_solution(sol)?;
    Ok(shift_unchecked(sol, a, b, xc, yc))
}

fn shift_unchecked(sol: &Solution, a: usize, b: usize, xc: usize, yc: usize) -> Solution {
    Solution::new(
        sol.sigma.iter().map(|&j| (j + a) % xc).collect(),
        sol.tau.iter().map(|&k| (k + b) % yc).collect(),
    )
}

/// The member of `sol`'s class with `sigma[0] = 0` and `tau[0] = 0`.
pub fn class_key(inst: &Instance, sol: &Solution) -> Solution {
    let (xc, yc) = (inst.x_choices(), inst.y_choices());
    let a = (xc - sol.sigma[0]) % xc;
    let b = (yc - sol.tau[0]) % yc;
    shift_unchecked(sol, a, b, xc, yc)
}

/// Number of equivalence classes, `|F| / (mn)`. This is also the guaranteed
/// number of solutions whose value is at least the average.
pub fn class_count(inst: &Instance) -> BigUint {
    inst.solution_space_size() / BigUint::from(inst.m() * inst.n())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceClass {
    /// All `m*n` shifts, ordered by `(a, b)`.
    pub members: Vec<Solution>,
    pub base: Solution,
}

impl EquivalenceClass {
    pub fn value_sum(&self, inst: &Instance) -> i128 {
        self.members
            .iter()
            .map(|s| inst.objective(&s.sigma, &s.tau) as i128)
            .sum()
    }
}

pub fn equivalence_class(inst: &Instance, sol: &Solution) -> Result<EquivalenceClass> {
    inst.check_solution(sol)?;
    let (xc, yc) = (inst.x_choices(), inst.y_choices());
    let members: Vec<Solution> = (0..xc)
        .flat_map(|a| (0..yc).map(move |b| (a, b)))
        .map(|(a, b)| shift_unchecked(sol, a, b, xc, yc))
        .collect();
    debug_assert_eq!(
        members
            .iter()
            .collect::<std::collections::BTreeSet<_>>()
            .len(),
        inst.m() * inst.n()
    );
    Ok(EquivalenceClass {
        members,
        base: sol.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominationFigures {
    #[serde(serialize_with = "crate::serde_big::to_decimal")]
    pub dominated_count: BigUint,
    #[serde(serialize_with = "crate::serde_big::to_decimal")]
    pub space_size: BigUint,
    pub ratio: Rational,
}

impl DominationFigures {
    pub fn new(dominated_count: BigUint, space_size: BigUint) -> Result<Self> {
        let ratio = domination_ratio(&dominated_count, &space_size)?;
        Ok(DominationFigures {
            dominated_count,
            space_size,
            ratio,
        })
    }
}

pub fn domination_ratio(dominated_count: &BigUint, space_size: &BigUint) -> Result<Rational> {
    if dominated_count.is_zero() || dominated_count > space_size {
        return Err(Error::Parameter(format!(
            "dominated count {dominated_count} must lie in 1..={space_size}"
        )));
    }
    Rational::new(
        BigInt::from(dominated_count.clone()),
        BigInt::from(space_size.clone()),
    )
}
