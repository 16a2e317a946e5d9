use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Instance, Solution};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A feasible point of the bilinear relaxation: `x` is row-stochastic
/// (`m x X`), `y` is column-stochastic (`Y x n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalSolution {
    x: Vec<Vec<Rational>>,
    y: Vec<Vec<Rational>>,
}

impl FractionalSolution {
    pub fn new(inst: &Instance, x: Vec<Vec<Rational>>, y: Vec<Vec<Rational>>) -> Result<Self> {
        let fsol = FractionalSolution { x, y };
        fsol.check(inst)?;
        Ok(fsol)
    }

    /// `x = 1/X`, `y = 1/Y` everywhere; its objective equals the average value.
    pub fn uniform(inst: &Instance) -> Self {
        let xc = inst.x_choices();
        let yc = inst.y_choices();
        let xv = Rational::new(1, xc as i64).expect("x_choices >= 1");
        let yv = Rational::new(1, yc as i64).expect("y_choices >= 1");
        FractionalSolution {
            x: vec![vec![xv; xc]; inst.m()],
            y: vec![vec![yv; inst.n()]; yc],
        }
    }

    /// The 0-1 expansion of an integral solution.
    pub fn from_solution(inst: &Instance, sol: &Solution) -> Result<Self> {
        inst.check_solution(sol)?;
        let mut x = vec![vec![Rational::zero(); inst.x_choices()]; inst.m()];
        for (i, &j) in sol.sigma.iter().enumerate() {
            x[i][j] = Rational::one();
        }
        let mut y = vec![vec![Rational::zero(); inst.n()]; inst.y_choices()];
        for (l, &k) in sol.tau.iter().enumerate() {
            y[k][l] = Rational::one();
        }
        Ok(FractionalSolution { x, y })
    }

    pub fn x(&self) -> &[Vec<Rational>] {
        &self.x
    }

    pub fn y(&self) -> &[Vec<Rational>] {
        &self.y
    }

    pub fn check(&self, inst: &Instance) -> Result<()> {
        let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
        let bad = |msg: String| Err(Error::InfeasibleFractional(msg));
        if self.x.len() != m || self.x.iter().any(|r| r.len() != xc) {
            return bad(format!("x must be {m}x{xc}"));
        }
        if self.y.len() != yc || self.y.iter().any(|r| r.len() != n) {
            return bad(format!("y must be {yc}x{n}"));
        }
        for (name, mat) in [("x", &self.x), ("y", &self.y)] {
            for (i, row) in mat.iter().enumerate() {
                if let Some(j) = row.iter().position(Rational::is_negative) {
                    return bad(format!("{name}[{i}][{j}] is negative"));
                }
            }
        }
        for (i, row) in self.x.iter().enumerate() {
            let s = row.iter().fold(Rational::zero(), |acc, v| &acc + v);
            if s != Rational::one() {
                return bad(format!("row {i} of x sums to {s}"));
            }
        }
        for l in 0..n {
            let s = self.y.iter().fold(Rational::zero(), |acc, row| &acc + &row[l]);
            if s != Rational::one() {
                return bad(format!("column {l} of y sums to {s}"));
            }
        }
        Ok(())
    }
}

/// A rational matrix rewritten as integer entries over one common denominator.
pub(crate) struct ScaledMatrix {
    pub scale: BigInt,
    pub entries: Vec<BigInt>,
    pub cols: usize,
}

impl ScaledMatrix {
    pub fn new(mat: &[Vec<Rational>]) -> Self {
        let scale = mat
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let cols = mat.first().map_or(0, Vec::len);
        let entries = mat
            .iter()
            .flatten()
            .map(|v| v.numer() * (&scale / v.denom()))
            .collect();
        ScaledMatrix {
            scale,
            entries,
            cols,
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    /// Entries and scale as `i128` when the scale fits in an `i64`.
    ///
    /// Entries lie in `[0, scale]`, so against cost bounds of the instance all
    /// weighted sums stay far inside `i128`.
    pub fn narrow(&self) -> Option<(i128, Vec<i128>)> {
        let scale = self.scale.to_i64()? as i128;
        let entries = self
            .entries
            .iter()
            .map(|v| v.to_i64().map(i128::from))
            .collect::<Option<Vec<_>>>()?;
        Some((scale, entries))
    }
}

impl Instance {
    /// Exact bilinear objective at a fractional point.
    pub fn evaluate_fractional(&self, fsol: &FractionalSolution) -> Result<Rational> {
        fsol.check(self)?;
        let x = ScaledMatrix::new(&fsol.x);
        let y = ScaledMatrix::new(&fsol.y);
        let (m, n, xc, yc) = (self.m, self.n, self.xc, self.yc);

        // numerator = sum q X Y + Dy * sum c X + Dx * sum d Y, over Dx * Dy
        let mut quad = BigInt::zero();
        for k in 0..yc {
            for l in 0..n {
                let ykl = y.get(k, l);
                if ykl.is_zero() {
                    continue;
                }
                let mut w = BigInt::zero();
                for i in 0..m {
                    for j in 0..xc {
                        let xij = x.get(i, j);
                        let qv = self.q(i, j, k, l);
                        if qv != 0 && !xij.is_zero() {
                            w += xij * qv;
                        }
                    }
                }
                quad += w * ykl;
            }
        }
        let mut lin_c = BigInt::zero();
        for i in 0..m {
            for j in 0..xc {
                lin_c += x.get(i, j) * self.c(i, j);
            }
        }
        let mut lin_d = BigInt::zero();
        for k in 0..yc {
            for l in 0..n {
                lin_d += y.get(k, l) * self.d(k, l);
            }
        }
        let numer = quad + &y.scale * lin_c + &x.scale * lin_d;
        let denom = &x.scale * &y.scale;
        debug_assert!(denom.is_positive());
        Rational::new(numer, denom)
    }
}
