//! Exhaustive enumeration of the feasible set.
//!
//! Everything here is exact and brute force: it is the reference the
//! closed forms and heuristics are checked against, so it stays independent
//! of the `heuristics` module. Enumeration order is lexicographic in
//! `(sigma, tau)`; the work is split by `sigma[0]` across rayon workers and
//! the per-block results are merged in block order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{class_key, AverageThreshold};
use crate::error::{Error, Result};
use crate::model::{Instance, Solution};
use crate::rational::Rational;

/// Default cap on the number of solutions an enumeration may visit.
pub const DEFAULT_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborhoodKind {
    Swap,
    ConcurrentSwap,
    OptimizedSwap,
}

impl fmt::Display for NeighborhoodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NeighborhoodKind::Swap => "swap",
            NeighborhoodKind::ConcurrentSwap => "concurrent-swap",
            NeighborhoodKind::OptimizedSwap => "optimized-swap",
        })
    }
}

impl FromStr for NeighborhoodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap" => Ok(NeighborhoodKind::Swap),
            "concurrent-swap" | "cswap" => Ok(NeighborhoodKind::ConcurrentSwap),
            "optimized-swap" | "oswap" => Ok(NeighborhoodKind::OptimizedSwap),
            other => Err(Error::Parameter(format!("unknown neighborhood `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    #[serde(serialize_with = "crate::serde_big::to_decimal")]
    pub count: BigUint,
    pub min_value: i64,
    pub max_value: i64,
    #[serde(serialize_with = "crate::serde_big::to_decimal")]
    pub sum: BigInt,
    pub mean: Rational,
    /// The `ceil(count/2)`-th smallest value.
    pub lower_median: i64,
    /// The `(floor(count/2)+1)`-th smallest value.
    pub upper_median: i64,
    pub optimum_solution: Solution,
}

/// Iterator over all vectors of length `len` with entries in `0..choices`,
/// in lexicographic order.
#[derive(Clone, Debug)]
pub struct Assignments {
    current: Option<Vec<usize>>,
    choices: usize,
}

impl Assignments {
    pub fn new(len: usize, choices: usize) -> Self {
        Assignments {
            current: (choices > 0 || len == 0).then(|| vec![0; len]),
            choices,
        }
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            if cur[pos] + 1 < self.choices {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 0;
        }
        Some(out)
    }
}

fn check_limit(inst: &Instance, limit: u64) -> Result<()> {
    let size = inst.solution_space_size();
    if size > BigUint::from(limit) {
        return Err(Error::SpaceTooLarge {
            required: size,
            limit,
        });
    }
    Ok(())
}

/// Visits every solution with `sigma[0] == first`, in lexicographic order.
///
/// For each `sigma` the column contributions `w[l][k] = d[k,l] + sum_i q[i,sigma[i],k,l]`
/// are tabulated once and the `tau` odometer updates the value incrementally.
fn visit_block<F>(inst: &Instance, first: usize, mut visit: F)
where
    F: FnMut(&[usize], &[usize], i64),
{
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    let mut sigma = vec![0usize; m];
    sigma[0] = first;
    let mut tau = vec![0usize; n];
    let mut w = vec![0i64; n * yc];
    loop {
        let base: i64 = sigma.iter().enumerate().map(|(i, &j)| inst.c(i, j)).sum();
        for l in 0..n {
            for k in 0..yc {
                w[l * yc + k] = inst.d(k, l);
            }
        }
        for (i, &j) in sigma.iter().enumerate() {
            for k in 0..yc {
                for (l, &qv) in inst.q_row(i, j, k).iter().enumerate() {
                    w[l * yc + k] += qv;
                }
            }
        }
        tau.iter_mut().for_each(|t| *t = 0);
        let mut total = base + (0..n).map(|l| w[l * yc]).sum::<i64>();
        'tau: loop {
            visit(&sigma, &tau, total);
            let mut pos = n;
            loop {
                if pos == 0 {
                    break 'tau;
                }
                pos -= 1;
                let row = &w[pos * yc..(pos + 1) * yc];
                if tau[pos] + 1 < yc {
                    total += row[tau[pos] + 1] - row[tau[pos]];
                    tau[pos] += 1;
                    break;
                }
                total += row[0] - row[tau[pos]];
                tau[pos] = 0;
            }
        }
        // advance sigma[1..]
        let mut pos = m;
        loop {
            if pos <= 1 {
                return;
            }
            pos -= 1;
            if sigma[pos] + 1 < xc {
                sigma[pos] += 1;
                break;
            }
            sigma[pos] = 0;
        }
    }
}

/// Runs `visit` over the whole feasible set, one accumulator per `sigma[0]`
/// block, and returns the accumulators in block order.
fn par_blocks<T, I, V>(inst: &Instance, limit: u64, init: I, visit: V) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> T + Sync,
    V: Fn(&mut T, &[usize], &[usize], i64) + Sync,
{
    check_limit(inst, limit)?;
    Ok((0..inst.x_choices())
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            visit_block(inst, first, |s, t, v| visit(&mut acc, s, t, v));
            acc
        })
        .collect())
}

/// Sequential visit of every solution in lexicographic order.
pub fn for_each_solution<F>(inst: &Instance, limit: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize], &[usize], i64),
{
    check_limit(inst, limit)?;
    for first in 0..inst.x_choices() {
        visit_block(inst, first, &mut visit);
    }
    Ok(())
}

/// Multiset of objective values as `value -> multiplicity`.
pub fn value_histogram(inst: &Instance, limit: u64) -> Result<BTreeMap<i64, u64>> {
    let blocks = par_blocks(inst, limit, HashMap::<i64, u64>::new, |h, _, _, v| {
        *h.entry(v).or_default() += 1;
    })?;
    let mut hist = BTreeMap::new();
    for block in blocks {
        for (v, c) in block {
            *hist.entry(v).or_default() += c;
        }
    }
    Ok(hist)
}

/// The `rank`-th smallest value (1-based) of a histogram.
fn nth_value(hist: &BTreeMap<i64, u64>, rank: u64) -> i64 {
    let mut seen = 0u64;
    for (&v, &c) in hist {
        seen += c;
        if seen >= rank {
            return v;
        }
    }
    unreachable!("rank {rank} exceeds histogram size {seen}")
}

pub fn enumerate_report(inst: &Instance, limit: u64) -> Result<EnumerationReport> {
    struct Block {
        hist: HashMap<i64, u64>,
        sum: i128,
        best: Option<(i64, Solution)>,
    }
    let blocks = par_blocks(
        inst,
        limit,
        || Block {
            hist: HashMap::new(),
            sum: 0,
            best: None,
        },
        |b, sigma, tau, v| {
            *b.hist.entry(v).or_default() += 1;
            b.sum += v as i128;
            if b.best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                b.best = Some((v, Solution::new(sigma.to_vec(), tau.to_vec())));
            }
        },
    )?;

    let mut hist = BTreeMap::new();
    let mut sum = 0i128;
    let mut best: Option<(i64, Solution)> = None;
    for block in blocks {
        for (v, c) in block.hist {
            *hist.entry(v).or_default() += c;
        }
        sum += block.sum;
        // strict: earlier blocks win ties
        if let Some((v, s)) = block.best {
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, s));
            }
        }
    }
    let count: u64 = hist.values().sum();
    let (min_value, optimum_solution) = best.expect("feasible set is never empty");
    Ok(EnumerationReport {
        count: BigUint::from(count),
        min_value,
        max_value: *hist.keys().next_back().expect("non-empty"),
        sum: BigInt::from(sum),
        mean: Rational::new(sum, count as i128).expect("count > 0"),
        lower_median: nth_value(&hist, count.div_ceil(2)),
        upper_median: nth_value(&hist, count / 2 + 1),
        optimum_solution,
    })
}

/// Number of feasible solutions whose value is at least that of `sol`.
pub fn domination_count(inst: &Instance, sol: &Solution, limit: u64) -> Result<BigUint> {
    let target = inst.evaluate(sol)?;
    count_where(inst, limit, |v| v >= target)
}

/// Number of feasible solutions whose value is at least the average.
pub fn count_at_least_average(inst: &Instance, limit: u64) -> Result<BigUint> {
    let th = AverageThreshold::new(inst);
    count_where(inst, limit, |v| th.cmp_value(v) != Ordering::Less)
}

fn count_where<P: Fn(i64) -> bool + Sync>(inst: &Instance, limit: u64, pred: P) -> Result<BigUint> {
    let blocks = par_blocks(inst, limit, || 0u64, |acc, _, _, v| {
        if pred(v) {
            *acc += 1;
        }
    })?;
    Ok(BigUint::from(blocks.into_iter().sum::<u64>()))
}

/// Exact optimum without visiting every `tau`: for each `sigma`, the best
/// `tau` decomposes into independent per-column minima (and symmetrically).
///
/// Enumerates whichever side fits in `limit`. Ties: first `sigma` in
/// lexicographic order with per-column smallest row (or the symmetric rule
/// when enumerating `tau`).
pub fn exact_optimum(inst: &Instance, limit: u64) -> Result<(i64, Solution)> {
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    let sigma_space = (xc as u64).checked_pow(m as u32);
    let tau_space = (yc as u64).checked_pow(n as u32);
    let mut best: Option<(i64, Solution)> = None;
    let mut consider = |v: i64, sigma: Vec<usize>, tau: Vec<usize>| {
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, Solution::new(sigma, tau)));
        }
    };
    if sigma_space.is_some_and(|s| s <= limit) {
        for sigma in Assignments::new(m, xc) {
            let mut v: i64 = sigma.iter().enumerate().map(|(i, &j)| inst.c(i, j)).sum();
            let mut tau = vec![0; n];
            for (l, t) in tau.iter_mut().enumerate() {
                let col = (0..yc).map(|k| {
                    inst.d(k, l) + sigma.iter().enumerate().map(|(i, &j)| inst.q(i, j, k, l)).sum::<i64>()
                });
                let (k, cv) = argmin(col);
                *t = k;
                v += cv;
            }
            consider(v, sigma, tau);
        }
    } else if tau_space.is_some_and(|s| s <= limit) {
        for tau in Assignments::new(n, yc) {
            let mut v: i64 = tau.iter().enumerate().map(|(l, &k)| inst.d(k, l)).sum();
            let mut sigma = vec![0; m];
            for (i, s) in sigma.iter_mut().enumerate() {
                let row = (0..xc).map(|j| {
                    inst.c(i, j) + tau.iter().enumerate().map(|(l, &k)| inst.q(i, j, k, l)).sum::<i64>()
                });
                let (j, rv) = argmin(row);
                *s = j;
                v += rv;
            }
            consider(v, sigma, tau);
        }
    } else {
        let required = BigUint::from(xc).pow(m as u32).min(BigUint::from(yc).pow(n as u32));
        return Err(Error::SpaceTooLarge { required, limit });
    }
    Ok(best.expect("at least one assignment"))
}

fn argmin(values: impl Iterator<Item = i64>) -> (usize, i64) {
    values
        .enumerate()
        .fold(None, |best: Option<(usize, i64)>, (i, v)| match best {
            Some((_, bv)) if bv <= v => best,
            _ => Some((i, v)),
        })
        .expect("non-empty range")
}

/// The one-swap variants of an assignment vector, identity first.
fn one_swaps(v: &[usize], choices: usize) -> Vec<Vec<usize>> {
    let mut out = vec![v.to_vec()];
    for pos in 0..v.len() {
        for val in (0..choices).filter(|&val| val != v[pos]) {
            let mut w = v.to_vec();
            w[pos] = val;
            out.push(w);
        }
    }
    out
}

/// `Sx` (one swap on `x`, arbitrary `y`) and `Sy` (arbitrary `x`, one swap on `y`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SwapSets {
    pub sx: BTreeSet<Solution>,
    pub sy: BTreeSet<Solution>,
}

impl SwapSets {
    pub fn union(&self) -> BTreeSet<Solution> {
        self.sx.union(&self.sy).cloned().collect()
    }

    pub fn intersection_len(&self) -> usize {
        self.sx.intersection(&self.sy).count()
    }
}

pub fn swap_sets(inst: &Instance, sol: &Solution, limit: u64) -> Result<SwapSets> {
    inst.check_solution(sol)?;
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    let sx_len = BigUint::from(m * (xc - 1) + 1) * BigUint::from(yc).pow(n as u32);
    let sy_len = BigUint::from(n * (yc - 1) + 1) * BigUint::from(xc).pow(m as u32);
    let required = sx_len + sy_len;
    if required > BigUint::from(limit) {
        return Err(Error::SpaceTooLarge { required, limit });
    }
    let mut sets = SwapSets::default();
    for sigma in one_swaps(&sol.sigma, xc) {
        for tau in Assignments::new(n, yc) {
            sets.sx.insert(Solution::new(sigma.clone(), tau));
        }
    }
    for tau in one_swaps(&sol.tau, yc) {
        for sigma in Assignments::new(m, xc) {
            sets.sy.insert(Solution::new(sigma, tau.clone()));
        }
    }
    Ok(sets)
}

/// The distinct solutions reachable by one move of the given kind, the
/// unchanged solution included.
pub fn neighborhood_enumerate(
    inst: &Instance,
    sol: &Solution,
    kind: NeighborhoodKind,
    limit: u64,
) -> Result<BTreeSet<Solution>> {
    inst.check_solution(sol)?;
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    let mut set = BTreeSet::new();
    match kind {
        NeighborhoodKind::Swap => {
            for sigma in one_swaps(&sol.sigma, xc) {
                set.insert(Solution::new(sigma, sol.tau.clone()));
            }
            for tau in one_swaps(&sol.tau, yc) {
                set.insert(Solution::new(sol.sigma.clone(), tau));
            }
        }
        NeighborhoodKind::ConcurrentSwap => {
            let required = BigUint::from(xc).pow(m as u32) + BigUint::from(yc).pow(n as u32);
            if required > BigUint::from(limit) {
                return Err(Error::SpaceTooLarge { required, limit });
            }
            for sigma in Assignments::new(m, xc) {
                set.insert(Solution::new(sigma, sol.tau.clone()));
            }
            for tau in Assignments::new(n, yc) {
                set.insert(Solution::new(sol.sigma.clone(), tau));
            }
        }
        NeighborhoodKind::OptimizedSwap => {
            set = swap_sets(inst, sol, limit)?.union();
        }
    }
    Ok(set)
}

/// Solutions provably no better than anything at or below the average,
/// plus the optimized-swap sets around `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSets {
    /// One maximum-value member per equivalence class; each is at or above the average.
    pub representatives: BTreeSet<Solution>,
    pub swaps: SwapSets,
}

impl WitnessSets {
    pub fn union_len(&self) -> usize {
        let mut all = self.swaps.union();
        all.extend(self.representatives.iter().cloned());
        all.len()
    }
}

pub fn witness_sets(inst: &Instance, start: &Solution, limit: u64) -> Result<WitnessSets> {
    let swaps = swap_sets(inst, start, limit)?;
    let mut best: BTreeMap<Solution, (i64, Solution)> = BTreeMap::new();
    for_each_solution(inst, limit, |sigma, tau, v| {
        let sol = Solution::new(sigma.to_vec(), tau.to_vec());
        let key = class_key(inst, &sol);
        match best.get(&key) {
            Some((bv, _)) if *bv >= v => {}
            _ => {
                best.insert(key, (v, sol));
            }
        }
    })?;
    Ok(WitnessSets {
        representatives: best.into_values().map(|(_, s)| s).collect(),
        swaps,
    })
}
