//! Polynomial-time procedures: conditional optimization of one side, rounding
//! of relaxation points, alternating descent, swap-family local searches and
//! the guaranteed-domination procedure.
//!
//! Determinism: ties always go to the smallest index, `x` moves are scanned
//! before `y` moves, and only strictly improving moves are ever applied.

use std::cmp::Ordering;
use std::ops::{AddAssign, Mul};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::analytics::{canonical_sweep, AverageThreshold};
use crate::error::{Error, Result};
use crate::model::{FractionalSolution, Instance, ScaledMatrix, Solution};
use crate::oracle::NeighborhoodKind;
use crate::rational::Rational;

/// Iteration cap used when the caller does not provide one.
pub const DEFAULT_MAX_ITERS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Single,
    Concurrent,
    Optimized,
}

/// A change of assignments on one side, optionally followed by a
/// re-optimization of the other side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    pub side: Side,
    pub kind: MoveKind,
    /// `(position, new value)` pairs on `side`.
    pub assignments: Vec<(usize, usize)>,
    /// `(position, new value)` pairs on the opposite side (optimized moves only).
    pub reoptimized: Vec<(usize, usize)>,
    /// Value after minus value before.
    pub delta: i64,
}

impl Move {
    pub fn apply(&self, sol: &mut Solution) {
        let (own, other) = match self.side {
            Side::X => (&mut sol.sigma, &mut sol.tau),
            Side::Y => (&mut sol.tau, &mut sol.sigma),
        };
        for &(p, v) in &self.assignments {
            own[p] = v;
        }
        for &(p, v) in &self.reoptimized {
            other[p] = v;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchTrace {
    pub start_value: i64,
    pub end_value: i64,
    pub iterations: usize,
    pub moves: Vec<Move>,
    /// The iteration cap stopped the search before a local optimum was certified.
    pub truncated: bool,
}

impl SearchTrace {
    fn new(start_value: i64) -> Self {
        SearchTrace {
            start_value,
            end_value: start_value,
            iterations: 0,
            moves: Vec::new(),
            truncated: false,
        }
    }

    fn push(&mut self, mv: Move) {
        debug_assert!(mv.delta < 0);
        self.end_value += mv.delta;
        self.iterations += 1;
        self.moves.push(mv);
    }
}

/// `r[i*X + j] = c[i,j] + sum_l q[i,j,tau[l],l]`: the cost of putting row `i` in column `j`.
fn row_costs(inst: &Instance, tau: &[usize]) -> Vec<i64> {
    let (m, xc) = (inst.m(), inst.x_choices());
    let mut r = vec![0i64; m * xc];
    for i in 0..m {
        for j in 0..xc {
            r[i * xc + j] = inst.c(i, j)
                + tau
                    .iter()
                    .enumerate()
                    .map(|(l, &k)| inst.q(i, j, k, l))
                    .sum::<i64>();
        }
    }
    r
}

/// `w[l*Y + k] = d[k,l] + sum_i q[i,sigma[i],k,l]`: the cost of putting column `l` in row `k`.
fn column_costs(inst: &Instance, sigma: &[usize]) -> Vec<i64> {
    let (n, yc) = (inst.n(), inst.y_choices());
    let mut w = vec![0i64; n * yc];
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
    w
}

/// Index of the first minimum.
fn argmin<T: Ord>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn optimal_tau(inst: &Instance, sigma: &[usize]) -> (Vec<usize>, i64) {
    let yc = inst.y_choices();
    let w = column_costs(inst, sigma);
    let mut value: i64 = sigma.iter().enumerate().map(|(i, &j)| inst.c(i, j)).sum();
    let tau = w
        .chunks(yc)
        .map(|col| {
            let k = argmin(col);
            value += col[k];
            k
        })
        .collect();
    (tau, value)
}

fn optimal_sigma(inst: &Instance, tau: &[usize]) -> (Vec<usize>, i64) {
    let xc = inst.x_choices();
    let r = row_costs(inst, tau);
    let mut value: i64 = tau.iter().enumerate().map(|(l, &k)| inst.d(k, l)).sum();
    let sigma = r
        .chunks(xc)
        .map(|row| {
            let j = argmin(row);
            value += row[j];
            j
        })
        .collect();
    (sigma, value)
}

/// Value of the best `tau` for `sigma`, using `w` as scratch.
fn tau_value(inst: &Instance, sigma: &[usize], w: &mut [i64]) -> i64 {
    let yc = inst.y_choices();
    for (l, col) in w.chunks_mut(yc).enumerate() {
        for (k, e) in col.iter_mut().enumerate() {
            *e = inst.d(k, l);
        }
    }
    let mut value = 0;
    for (i, &j) in sigma.iter().enumerate() {
        value += inst.c(i, j);
        for k in 0..yc {
            for (l, &qv) in inst.q_row(i, j, k).iter().enumerate() {
                w[l * yc + k] += qv;
            }
        }
    }
    value + w.chunks(yc).map(|col| *col.iter().min().expect("Y > 0")).sum::<i64>()
}

/// Value of the best `sigma` for `tau`, using `r` as scratch.
fn sigma_value(inst: &Instance, tau: &[usize], r: &mut [i64]) -> i64 {
    let xc = inst.x_choices();
    for (i, row) in r.chunks_mut(xc).enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = inst.c(i, j) + tau.iter().enumerate().map(|(l, &k)| inst.q(i, j, k, l)).sum::<i64>();
        }
    }
    let value: i64 = tau.iter().enumerate().map(|(l, &k)| inst.d(k, l)).sum();
    value + r.chunks(xc).map(|row| *row.iter().min().expect("X > 0")).sum::<i64>()
}

fn check_sigma(inst: &Instance, sigma: &[usize]) -> Result<()> {
    if sigma.len() != inst.m() || sigma.iter().any(|&j| j >= inst.x_choices()) {
        return Err(Error::InvalidSolution(format!(
            "sigma must have {} entries in 0..{}",
            inst.m(),
            inst.x_choices()
        )));
    }
    Ok(())
}

fn check_tau(inst: &Instance, tau: &[usize]) -> Result<()> {
    if tau.len() != inst.n() || tau.iter().any(|&k| k >= inst.y_choices()) {
        return Err(Error::InvalidSolution(format!(
            "tau must have {} entries in 0..{}",
            inst.n(),
            inst.y_choices()
        )));
    }
    Ok(())
}

/// Best `tau` for a fixed `sigma`; each column independently takes its cheapest row.
pub fn optimize_y_given_x(inst: &Instance, sigma: &[usize]) -> Result<Vec<usize>> {
    check_sigma(inst, sigma)?;
    Ok(optimal_tau(inst, sigma).0)
}

/// Best `sigma` for a fixed `tau`; each row independently takes its cheapest column.
pub fn optimize_x_given_y(inst: &Instance, tau: &[usize]) -> Result<Vec<usize>> {
    check_tau(inst, tau)?;
    Ok(optimal_sigma(inst, tau).0)
}

/// Scaled scores of a linearized side, in `i128` when the scale allows and
/// `BigInt` otherwise.
trait Score: Clone + Ord + Zero + AddAssign + Mul<Output = Self> + From<i64> {}
impl<T: Clone + Ord + Zero + AddAssign + Mul<Output = T> + From<i64>> Score for T {}

/// `scale * c[i,j] + sum_{k,l} q[i,j,k,l] * y[k,l]`, then the row-wise argmin.
fn round_rows<T: Score>(inst: &Instance, scale: T, y: &[T]) -> Vec<usize> {
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    (0..m)
        .map(|i| {
            let scores: Vec<T> = (0..xc)
                .map(|j| {
                    let mut s = scale.clone() * T::from(inst.c(i, j));
                    for k in 0..yc {
                        for (l, &qv) in inst.q_row(i, j, k).iter().enumerate() {
                            let ykl = &y[k * n + l];
                            if qv != 0 && !ykl.is_zero() {
                                s += T::from(qv) * ykl.clone();
                            }
                        }
                    }
                    s
                })
                .collect();
            argmin(&scores)
        })
        .collect()
}

/// `scale * d[k,l] + sum_{i,j} q[i,j,k,l] * x[i,j]`, then the column-wise argmin.
fn round_columns<T: Score>(inst: &Instance, scale: T, x: &[T]) -> Vec<usize> {
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    let mut scores: Vec<T> = (0..n * yc)
        .map(|idx| scale.clone() * T::from(inst.d(idx % yc, idx / yc)))
        .collect();
    for i in 0..m {
        for j in 0..xc {
            let xij = &x[i * xc + j];
            if xij.is_zero() {
                continue;
            }
            for k in 0..yc {
                for (l, &qv) in inst.q_row(i, j, k).iter().enumerate() {
                    if qv != 0 {
                        scores[l * yc + k] += T::from(qv) * xij.clone();
                    }
                }
            }
        }
    }
    scores.chunks(yc).map(argmin).collect()
}

/// Round-x optimize-y: each row of `x` goes to its cheapest column against the
/// fractional `y`, then `y` is re-optimized exactly. Never worse than the
/// fractional point.
pub fn round_x_optimize_y(inst: &Instance, fsol: &FractionalSolution) -> Result<Solution> {
    fsol.check(inst)?;
    let y = ScaledMatrix::new(fsol.y());
    let sigma = match y.narrow() {
        Some((scale, entries)) => round_rows(inst, scale, &entries),
        None => round_rows::<BigInt>(inst, y.scale.clone(), &y.entries),
    };
    let (tau, _) = optimal_tau(inst, &sigma);
    Ok(Solution::new(sigma, tau))
}

/// Round-y optimize-x, the mirror of [`round_x_optimize_y`].
pub fn round_y_optimize_x(inst: &Instance, fsol: &FractionalSolution) -> Result<Solution> {
    fsol.check(inst)?;
    let x = ScaledMatrix::new(fsol.x());
    let tau = match x.narrow() {
        Some((scale, entries)) => round_columns(inst, scale, &entries),
        None => round_columns::<BigInt>(inst, x.scale.clone(), &x.entries),
    };
    let (sigma, _) = optimal_sigma(inst, &tau);
    Ok(Solution::new(sigma, tau))
}

/// Rounds the uniform relaxation point both ways and keeps the better result
/// (RxOy on ties). The value is at most the average.
pub fn below_average_rounding(inst: &Instance) -> Solution {
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    // uniform entries 1/Y and 1/X, scaled to all ones
    let sigma = round_rows(inst, yc as i128, &vec![1i128; yc * n]);
    let a = Solution::new(sigma.clone(), optimal_tau(inst, &sigma).0);
    let tau = round_columns(inst, xc as i128, &vec![1i128; m * xc]);
    let b = Solution::new(optimal_sigma(inst, &tau).0, tau);
    if inst.objective(&b.sigma, &b.tau) < inst.objective(&a.sigma, &a.tau) {
        b
    } else {
        a
    }
}

fn diff(old: &[usize], new: &[usize]) -> Vec<(usize, usize)> {
    old.iter()
        .zip(new)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(p, (_, &b))| (p, b))
        .collect()
}

/// Alternates exact optimization of `y` given `x` and of `x` given `y`,
/// accepting a step only when it strictly improves, until neither does.
pub fn alternating(inst: &Instance, start: &Solution) -> Result<(Solution, SearchTrace)> {
    inst.check_solution(start)?;
    let mut sol = start.clone();
    let mut value = inst.objective(&sol.sigma, &sol.tau);
    let mut trace = SearchTrace::new(value);
    loop {
        let mut improved = false;
        let (tau, v) = optimal_tau(inst, &sol.sigma);
        if v < value {
            trace.push(Move {
                side: Side::Y,
                kind: MoveKind::Concurrent,
                assignments: diff(&sol.tau, &tau),
                reoptimized: vec![],
                delta: v - value,
            });
            sol.tau = tau;
            value = v;
            improved = true;
        }
        let (sigma, v) = optimal_sigma(inst, &sol.tau);
        if v < value {
            trace.push(Move {
                side: Side::X,
                kind: MoveKind::Concurrent,
                assignments: diff(&sol.sigma, &sigma),
                reoptimized: vec![],
                delta: v - value,
            });
            sol.sigma = sigma;
            value = v;
            improved = true;
        }
        if !improved {
            return Ok((sol, trace));
        }
    }
}

/// The most improving single reassignment of one row of `x` or one column of `y`.
pub fn best_swap(inst: &Instance, sol: &Solution) -> Result<Option<Move>> {
    inst.check_solution(sol)?;
    let (xc, yc) = (inst.x_choices(), inst.y_choices());
    let mut best: Option<Move> = None;
    let mut consider = |side, pos, val, delta: i64| {
        if delta < 0 && best.as_ref().is_none_or(|b| delta < b.delta) {
            best = Some(Move {
                side,
                kind: MoveKind::Single,
                assignments: vec![(pos, val)],
                reoptimized: vec![],
                delta,
            });
        }
    };
    let r = row_costs(inst, &sol.tau);
    for (i, row) in r.chunks(xc).enumerate() {
        for (j, &cost) in row.iter().enumerate() {
            consider(Side::X, i, j, cost - row[sol.sigma[i]]);
        }
    }
    let w = column_costs(inst, &sol.sigma);
    for (l, col) in w.chunks(yc).enumerate() {
        for (k, &cost) in col.iter().enumerate() {
            consider(Side::Y, l, k, cost - col[sol.tau[l]]);
        }
    }
    Ok(best)
}

/// Per-row (per-column) strictly improving reassignments applied together.
fn concurrent(costs: &[i64], width: usize, current: &[usize]) -> (Vec<(usize, usize)>, i64) {
    let mut assignments = Vec::new();
    let mut delta = 0;
    for (p, chunk) in costs.chunks(width).enumerate() {
        let j = argmin(chunk);
        let gain = chunk[j] - chunk[current[p]];
        if gain < 0 {
            assignments.push((p, j));
            delta += gain;
        }
    }
    (assignments, delta)
}

/// The best concurrent swap on `x` or on `y`; equals the exact optimum of one
/// side with the other held fixed.
pub fn best_concurrent_swap(inst: &Instance, sol: &Solution) -> Result<Option<Move>> {
    inst.check_solution(sol)?;
    let (ax, dx) = concurrent(&row_costs(inst, &sol.tau), inst.x_choices(), &sol.sigma);
    let (ay, dy) = concurrent(&column_costs(inst, &sol.sigma), inst.y_choices(), &sol.tau);
    let (side, assignments, delta) = if dx <= dy {
        (Side::X, ax, dx)
    } else {
        (Side::Y, ay, dy)
    };
    Ok((delta < 0).then_some(Move {
        side,
        kind: MoveKind::Concurrent,
        assignments,
        reoptimized: vec![],
        delta,
    }))
}

/// Full scan of the optimized-swap neighborhood, returning its best member
/// even when it does not improve. The identity swap on each side (pure
/// re-optimization of the other side) is part of the scan.
fn scan_optimized(inst: &Instance, sol: &Solution) -> (Move, Solution) {
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    let mut best: Option<(Side, usize, usize, i64)> = None;
    let mut consider = |side, pos, val, value: i64| {
        if best.is_none_or(|(.., bv)| value < bv) {
            best = Some((side, pos, val, value));
        }
    };
    let mut sigma = sol.sigma.clone();
    let mut w = vec![0i64; n * yc];
    for i in 0..m {
        for j in 0..xc {
            if j == sol.sigma[i] && i > 0 {
                continue;
            }
            sigma[i] = j;
            consider(Side::X, i, j, tau_value(inst, &sigma, &mut w));
        }
        sigma[i] = sol.sigma[i];
    }
    let mut tau = sol.tau.clone();
    let mut r = vec![0i64; m * xc];
    for l in 0..n {
        for k in 0..yc {
            if k == sol.tau[l] && l > 0 {
                continue;
            }
            tau[l] = k;
            consider(Side::Y, l, k, sigma_value(inst, &tau, &mut r));
        }
        tau[l] = sol.tau[l];
    }

    let (side, pos, val, value) = best.expect("identity move is always scanned");
    let current = inst.objective(&sol.sigma, &sol.tau);
    let (own, result) = match side {
        Side::X => {
            sigma[pos] = val;
            let (tau, _) = optimal_tau(inst, &sigma);
            (&sol.sigma, Solution::new(sigma, tau))
        }
        Side::Y => {
            tau[pos] = val;
            let (sigma, _) = optimal_sigma(inst, &tau);
            (&sol.tau, Solution::new(sigma, tau))
        }
    };
    let reoptimized = match side {
        Side::X => diff(&sol.tau, &result.tau),
        Side::Y => diff(&sol.sigma, &result.sigma),
    };
    let mv = Move {
        side,
        kind: MoveKind::Optimized,
        assignments: if own[pos] == val { vec![] } else { vec![(pos, val)] },
        reoptimized,
        delta: value - current,
    };
    (mv, result)
}

/// The best strictly improving optimized swap: one swap on a side followed by
/// exact re-optimization of the other side.
pub fn best_optimized_swap(inst: &Instance, sol: &Solution) -> Result<Option<(Solution, i64)>> {
    Ok(best_optimized_move(inst, sol)?.map(|(mv, s)| (s, mv.delta)))
}

fn best_optimized_move(inst: &Instance, sol: &Solution) -> Result<Option<(Move, Solution)>> {
    inst.check_solution(sol)?;
    let (mv, result) = scan_optimized(inst, sol);
    Ok((mv.delta < 0).then_some((mv, result)))
}

/// Best-improvement descent in the given neighborhood.
pub fn local_search(
    inst: &Instance,
    start: &Solution,
    kind: NeighborhoodKind,
    max_iters: usize,
) -> Result<(Solution, SearchTrace)> {
    inst.check_solution(start)?;
    let mut sol = start.clone();
    let mut trace = SearchTrace::new(inst.objective(&sol.sigma, &sol.tau));
    loop {
        let step = match kind {
            NeighborhoodKind::Swap => best_swap(inst, &sol)?,
            NeighborhoodKind::ConcurrentSwap => best_concurrent_swap(inst, &sol)?,
            NeighborhoodKind::OptimizedSwap => best_optimized_move(inst, &sol)?.map(|(mv, _)| mv),
        };
        let Some(mv) = step else {
            return Ok((sol, trace));
        };
        if trace.iterations >= max_iters {
            trace.truncated = true;
            return Ok((sol, trace));
        }
        mv.apply(&mut sol);
        trace.push(mv);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StartMethod {
    Canonical,
    Rounding,
}

/// What [`dominate`] did: its at-or-below-average start and the optimized
/// swap it applied, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominationCertificate {
    pub start: Solution,
    pub start_value: i64,
    pub start_method: StartMethod,
    pub average: Rational,
    pub chosen_move: Option<Move>,
    pub value: i64,
}

/// A solution at or below the average whose value is also no worse than any
/// member of the optimized-swap neighborhood of its start.
///
/// The start is the better of the canonical sweep and the uniform rounding;
/// one full optimized-swap scan follows.
pub fn dominate(inst: &Instance) -> (Solution, DominationCertificate) {
    let sweep = canonical_sweep(inst);
    let rounded = below_average_rounding(inst);
    let rounded_value = inst.objective(&rounded.sigma, &rounded.tau);
    let (start, start_value, start_method) = if rounded_value < sweep.best_value {
        (rounded, rounded_value, StartMethod::Rounding)
    } else {
        (sweep.best, sweep.best_value, StartMethod::Canonical)
    };
    let th = AverageThreshold::new(inst);
    debug_assert_ne!(th.cmp_value(start_value), Ordering::Greater);

    let (mv, candidate) = scan_optimized(inst, &start);
    let (result, chosen_move) = if mv.delta < 0 {
        (candidate, Some(mv))
    } else {
        (start.clone(), None)
    };
    let value = inst.objective(&result.sigma, &result.tau);
    let cert = DominationCertificate {
        start,
        start_value,
        start_method,
        average: th.to_rational(),
        chosen_move,
        value,
    };
    (result, cert)
}
