//! Instances, solutions and exact objective evaluation for both problem variants.
//!
//! Indices are 0-based throughout. For an instance with dimensions `m` and `n`,
//! a solution is a pair of assignment vectors:
//!
//! * `sigma` has length `m`; `sigma[i]` is the column holding the single 1 in
//!   row `i` of `x` (range `0..n` for [`Variant::Bqap1`], `0..m` for
//!   [`Variant::Bqap2`]).
//! * `tau` has length `n`; `tau[l]` is the row holding the single 1 in column
//!   `l` of `y` (range `0..m` for `Bqap1`, `0..n` for `Bqap2`).
//!
//! The objective is
//! `sum_i c[i, sigma[i]] + sum_l d[tau[l], l] + sum_{i,l} q[i, sigma[i], tau[l], l]`.

mod codec;
mod fractional;
mod random;

pub use codec::{
    decode_instance, decode_solution, encode_instance, encode_solution, RawInstance, SolutionFile,
};
pub use fractional::FractionalSolution;
pub(crate) use fractional::ScaledMatrix;
pub use random::{random_fractional, random_instance, random_solution};

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible value of `m*n*max|q| + m*max|c| + n*max|d|`.
pub const MAGNITUDE_LIMIT: i128 = (i64::MAX / 4) as i128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// `x` and `y` are both `m x n`; rows of `x` and columns of `y` are assigned.
    Bqap1,
    /// `x` is `m x m`, `y` is `n x n`.
    Bqap2,
}

impl Variant {
    pub fn code(self) -> u8 {
        match self {
            Variant::Bqap1 => 1,
            Variant::Bqap2 => 2,
        }
    }

    pub fn from_code(code: i64) -> Result<Self> {
        match code {
            1 => Ok(Variant::Bqap1),
            2 => Ok(Variant::Bqap2),
            other => Err(Error::Parse(format!(
                "field `variant`: expected 1 or 2, got {other}"
            ))),
        }
    }

    /// Range of each `sigma` entry, i.e. the number of columns of `x`.
    pub fn x_choices(self, m: usize, n: usize) -> usize {
        match self {
            Variant::Bqap1 => n,
            Variant::Bqap2 => m,
        }
    }

    /// Range of each `tau` entry, i.e. the number of rows of `y`.
    pub fn y_choices(self, m: usize, n: usize) -> usize {
        match self {
            Variant::Bqap1 => m,
            Variant::Bqap2 => n,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BQAP{}", self.code())
    }
}

/// A checked problem instance with dense row-major cost arrays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    variant: Variant,
    m: usize,
    n: usize,
    xc: usize,
    yc: usize,
    q: Vec<i64>,
    c: Vec<i64>,
    d: Vec<i64>,
}

impl Instance {
    /// Builds an instance from flat row-major arrays.
    ///
    /// `q` has shape `m x X x Y x n`, `c` is `m x X` and `d` is `Y x n`, where
    /// `X`/`Y` are [`Variant::x_choices`]/[`Variant::y_choices`].
    pub fn new(
        variant: Variant,
        m: usize,
        n: usize,
        q: Vec<i64>,
        c: Vec<i64>,
        d: Vec<i64>,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension { name: "m", value: m });
        }
        if n == 0 {
            return Err(Error::Dimension { name: "n", value: n });
        }
        let xc = variant.x_choices(m, n);
        let yc = variant.y_choices(m, n);
        check_len("q", m * xc * yc * n, q.len(), || format!("{m}x{xc}x{yc}x{n}"))?;
        check_len("c", m * xc, c.len(), || format!("{m}x{xc}"))?;
        check_len("d", yc * n, d.len(), || format!("{yc}x{n}"))?;

        let max_abs = |v: &[i64]| v.iter().map(|x| x.unsigned_abs() as i128).max().unwrap_or(0);
        let bound = (m * n) as i128 * max_abs(&q) + m as i128 * max_abs(&c) + n as i128 * max_abs(&d);
        if bound > MAGNITUDE_LIMIT {
            return Err(Error::Overflow {
                bound,
                allowed: MAGNITUDE_LIMIT,
            });
        }
        Ok(Instance {
            variant,
            m,
            n,
            xc,
            yc,
            q,
            c,
            d,
        })
    }

    /// All-zero costs.
    pub fn zeros(variant: Variant, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Instance::new(variant, m, n, vec![], vec![], vec![]);
        }
        let xc = variant.x_choices(m, n);
        let yc = variant.y_choices(m, n);
        Instance::new(
            variant,
            m,
            n,
            vec![0; m * xc * yc * n],
            vec![0; m * xc],
            vec![0; yc * n],
        )
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Range of `sigma` entries.
    pub fn x_choices(&self) -> usize {
        self.xc
    }

    /// Range of `tau` entries.
    pub fn y_choices(&self) -> usize {
        self.yc
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize, k: usize, l: usize) -> i64 {
        self.q[self.q_index(i, j, k, l)]
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize) -> i64 {
        self.c[i * self.xc + j]
    }

    #[inline]
    pub fn d(&self, k: usize, l: usize) -> i64 {
        self.d[k * self.n + l]
    }

    #[inline]
    pub(crate) fn q_index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.xc + j) * self.yc + k) * self.n + l
    }

    /// The `n` entries `q[i, j, k, 0..n]`.
    #[inline]
    pub(crate) fn q_row(&self, i: usize, j: usize, k: usize) -> &[i64] {
        let start = self.q_index(i, j, k, 0);
        &self.q[start..start + self.n]
    }

    pub fn q_flat(&self) -> &[i64] {
        &self.q
    }

    pub fn c_flat(&self) -> &[i64] {
        &self.c
    }

    pub fn d_flat(&self) -> &[i64] {
        &self.d
    }

    pub fn q_sum(&self) -> i128 {
        self.q.iter().map(|&v| v as i128).sum()
    }

    pub fn c_sum(&self) -> i128 {
        self.c.iter().map(|&v| v as i128).sum()
    }

    pub fn d_sum(&self) -> i128 {
        self.d.iter().map(|&v| v as i128).sum()
    }

    /// Sum of absolute values of every cost entry.
    pub fn total_magnitude(&self) -> i128 {
        self.q
            .iter()
            .chain(&self.c)
            .chain(&self.d)
            .map(|v| v.unsigned_abs() as i128)
            .sum()
    }

    /// `|F| = X^m * Y^n`: `n^m m^n` for BQAP1, `m^m n^n` for BQAP2.
    pub fn solution_space_size(&self) -> BigUint {
        BigUint::from(self.xc).pow(self.m as u32) * BigUint::from(self.yc).pow(self.n as u32)
    }

    /// Same as [`solution_space_size`](Self::solution_space_size) when it fits.
    pub fn solution_space_size_u64(&self) -> Option<u64> {
        (self.xc as u64)
            .checked_pow(self.m as u32)?
            .checked_mul((self.yc as u64).checked_pow(self.n as u32)?)
    }

    pub fn check_solution(&self, sol: &Solution) -> Result<()> {
        if sol.sigma.len() != self.m {
            return Err(Error::InvalidSolution(format!(
                "sigma has length {}, expected {}",
                sol.sigma.len(),
                self.m
            )));
        }
        if sol.tau.len() != self.n {
            return Err(Error::InvalidSolution(format!(
                "tau has length {}, expected {}",
                sol.tau.len(),
                self.n
            )));
        }
        if let Some((i, &v)) = sol.sigma.iter().enumerate().find(|(_, &v)| v >= self.xc) {
            return Err(Error::InvalidSolution(format!(
                "sigma[{i}] = {v} is outside 0..{}",
                self.xc
            )));
        }
        if let Some((l, &v)) = sol.tau.iter().enumerate().find(|(_, &v)| v >= self.yc) {
            return Err(Error::InvalidSolution(format!(
                "tau[{l}] = {v} is outside 0..{}",
                self.yc
            )));
        }
        Ok(())
    }

    /// Objective value of a feasible solution.
    pub fn evaluate(&self, sol: &Solution) -> Result<i64> {
        self.check_solution(sol)?;
        Ok(self.objective(&sol.sigma, &sol.tau))
    }

    /// Objective value without feasibility checks.
    pub(crate) fn objective(&self, sigma: &[usize], tau: &[usize]) -> i64 {
        let mut total = 0i64;
        for (i, &j) in sigma.iter().enumerate() {
            total += self.c(i, j);
            for (l, &k) in tau.iter().enumerate() {
                total += self.q(i, j, k, l);
            }
        }
        for (l, &k) in tau.iter().enumerate() {
            total += self.d(k, l);
        }
        total
    }
}

fn check_len(
    field: &str,
    expected: usize,
    found: usize,
    shape: impl FnOnce() -> String,
) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Shape {
            field: field.to_string(),
            expected: format!("{} ({expected} entries)", shape()),
            found: format!("{found} entries"),
        })
    }
}

/// Assignment-vector encoding of a feasible 0-1 pair `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Solution {
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
}

impl Solution {
    pub fn new(sigma: Vec<usize>, tau: Vec<usize>) -> Self {
        Solution { sigma, tau }
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma={:?} tau={:?}", self.sigma, self.tau)
    }
}

/// Converts nested candidate data into a checked [`Instance`].
pub fn validate_instance(raw: &RawInstance) -> Result<Instance> {
    let variant = Variant::from_code(raw.variant)?;
    let (m, n) = (raw.m, raw.n);
    if m == 0 {
        return Err(Error::Dimension { name: "m", value: m });
    }
    if n == 0 {
        return Err(Error::Dimension { name: "n", value: n });
    }
    let xc = variant.x_choices(m, n);
    let yc = variant.y_choices(m, n);

    let mut q = Vec::with_capacity(m * xc * yc * n);
    expect_dim("q", &[], raw.q.len(), m)?;
    for (i, a) in raw.q.iter().enumerate() {
        expect_dim("q", &[i], a.len(), xc)?;
        for (j, b) in a.iter().enumerate() {
            expect_dim("q", &[i, j], b.len(), yc)?;
            for (k, row) in b.iter().enumerate() {
                expect_dim("q", &[i, j, k], row.len(), n)?;
                q.extend_from_slice(row);
            }
        }
    }
    let c = flatten_matrix("c", &raw.c, m, xc)?;
    let d = flatten_matrix("d", &raw.d, yc, n)?;
    Instance::new(variant, m, n, q, c, d)
}

fn flatten_matrix(field: &str, rows: &[Vec<i64>], nrows: usize, ncols: usize) -> Result<Vec<i64>> {
    expect_dim(field, &[], rows.len(), nrows)?;
    let mut out = Vec::with_capacity(nrows * ncols);
    for (i, row) in rows.iter().enumerate() {
        expect_dim(field, &[i], row.len(), ncols)?;
        out.extend_from_slice(row);
    }
    Ok(out)
}

fn expect_dim(field: &str, path: &[usize], found: usize, expected: usize) -> Result<()> {
    if found == expected {
        return Ok(());
    }
    let mut name = field.to_string();
    for p in path {
        name.push_str(&format!("[{p}]"));
    }
    Err(Error::Shape {
        field: name,
        expected: format!("length {expected}"),
        found: format!("length {found}"),
    })
}
