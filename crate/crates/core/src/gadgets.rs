//! Structured instances with known behavior: a single-entry instance meeting
//! the at-least-average count exactly, an instance whose swap local optimum is
//! arbitrarily bad, a subset-sum instance whose median decides PARTITION, and
//! a padded embedding whose optimum coincides with the original one.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::analytics::class_count;
use crate::error::{Error, Result};
use crate::model::{Instance, Solution, Variant};

/// Largest `q` array (in entries) an embedding may allocate.
const MAX_EMBEDDED_Q: usize = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetBundle {
    pub instance: Instance,
    pub distinguished_solution: Option<Solution>,
    pub metadata: BTreeMap<String, BigInt>,
}

impl GadgetBundle {
    fn new(instance: Instance) -> Self {
        GadgetBundle {
            instance,
            distinguished_solution: None,
            metadata: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: impl Into<BigInt>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn meta(&self, key: &str) -> Option<&BigInt> {
        self.metadata.get(key)
    }

    fn meta_usize(&self, key: &str) -> Result<usize> {
        self.meta(key)
            .and_then(ToPrimitive::to_usize)
            .ok_or_else(|| Error::Parameter(format!("bundle metadata lacks `{key}`")))
    }

    /// Sidecar JSON object; values are decimal strings.
    pub fn encode_metadata(&self) -> Vec<u8> {
        let map: serde_json::Map<String, serde_json::Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.to_string())))
            .collect();
        let mut out = serde_json::to_vec_pretty(&map).expect("string map serializes");
        out.push(b'\n');
        out
    }
}

fn dims(variant: Variant, m: usize, n: usize) -> (usize, usize) {
    (variant.x_choices(m, n), variant.y_choices(m, n))
}

/// All-zero costs except `q[at] = 1`. Exactly one member per shift class is at
/// or above the average, so the at-least-average count equals the class count.
pub fn tightness_instance(
    variant: Variant,
    m: usize,
    n: usize,
    at: [usize; 4],
) -> Result<GadgetBundle> {
    let mut zero = Instance::zeros(variant, m, n)?;
    let (xc, yc) = dims(variant, m, n);
    let [i, j, k, l] = at;
    if i >= m || j >= xc || k >= yc || l >= n {
        return Err(Error::IndexOutOfRange(format!(
            "q index {at:?} outside {m}x{xc}x{yc}x{n}"
        )));
    }
    let mut q = zero.q_flat().to_vec();
    q[zero.q_index(i, j, k, l)] = 1;
    zero = Instance::new(variant, m, n, q, zero.c_flat().to_vec(), zero.d_flat().to_vec())?;
    let target = class_count(&zero);
    Ok(GadgetBundle::new(zero).with("target_count", target))
}

/// Zero costs except `c[0,1] = d[1,0] = -eps` and `q[0,0,0,0] = -big_l`.
///
/// The distinguished solution (`sigma = tau = 1` everywhere) has value
/// `-2*eps` and is a local optimum for single and concurrent swaps, while the
/// optimum is `-big_l`.
pub fn adversarial_instance(
    variant: Variant,
    m: usize,
    n: usize,
    big_l: i64,
    eps: i64,
) -> Result<GadgetBundle> {
    if m < 2 || n < 2 {
        return Err(Error::Parameter(format!("need m, n >= 2, got {m}x{n}")));
    }
    if eps <= 0 || big_l <= 0 || big_l / 2 <= eps {
        return Err(Error::Parameter(format!(
            "need L > 2*eps > 0, got L = {big_l}, eps = {eps}"
        )));
    }
    let zero = Instance::zeros(variant, m, n)?;
    let mut q = zero.q_flat().to_vec();
    let mut c = zero.c_flat().to_vec();
    let mut d = zero.d_flat().to_vec();
    q[zero.q_index(0, 0, 0, 0)] = -big_l;
    c[1] = -eps; // c[0,1]
    d[n] = -eps; // d[1,0]
    let instance = Instance::new(variant, m, n, q, c, d)?;
    let mut bundle = GadgetBundle::new(instance)
        .with("L", big_l)
        .with("eps", eps)
        .with("bad_value", -2 * eps)
        .with("optimal_value", -big_l);
    bundle.distinguished_solution = Some(Solution::new(vec![1; m], vec![1; n]));
    Ok(bundle)
}

/// Square instance (`m = n = |a|`) whose only costs are `c[i,j] = a[i]` for
/// `j < n/2`. Every value is a subset sum of `a`, and the value multiset is
/// symmetric about `sum(a)/2`.
pub fn partition_gadget(a: &[i64]) -> Result<GadgetBundle> {
    let n = a.len();
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "partition input needs an even length >= 2, got {n}"
        )));
    }
    if let Some(bad) = a.iter().find(|&&v| v <= 0) {
        return Err(Error::Parameter(format!(
            "partition elements must be positive, got {bad}"
        )));
    }
    let zero = Instance::zeros(Variant::Bqap1, n, n)?;
    let c = (0..n)
        .flat_map(|i| (0..n).map(move |j| if j < n / 2 { a[i] } else { 0 }))
        .collect();
    let instance = Instance::new(
        Variant::Bqap1,
        n,
        n,
        zero.q_flat().to_vec(),
        c,
        zero.d_flat().to_vec(),
    )?;
    let sum: i128 = a.iter().map(|&v| v as i128).sum();
    let mut bundle = GadgetBundle::new(instance).with("sum", sum);
    if sum % 2 == 0 {
        bundle = bundle.with("target", sum / 2);
    }
    Ok(bundle)
}

/// Smallest penalty that keeps every padded optimum inside the original block.
pub fn default_penalty(inst: &Instance) -> i64 {
    (inst.total_magnitude() + 1)
        .try_into()
        .expect("magnitude bounded by the overflow guard")
}

/// Pads `inst` to dimensions `(a*b*m, a*b*n)`.
///
/// `q` is copied on the original index block and zero elsewhere; `c` and `d`
/// are copied on the original block, zero where both indices are outside it,
/// and `big_l` where exactly one index is inside.
pub fn embed_instance(inst: &Instance, a: usize, b: usize, big_l: i64) -> Result<GadgetBundle> {
    if b == 0 || a <= b {
        return Err(Error::Parameter(format!("need a > b >= 1, got a = {a}, b = {b}")));
    }
    let min_l = default_penalty(inst);
    if big_l < min_l {
        return Err(Error::Parameter(format!(
            "penalty L = {big_l} is below 1 + sum of |costs| = {min_l}"
        )));
    }
    let variant = inst.variant();
    let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
    let factor = a * b;
    let (em, en) = (factor * m, factor * n);
    let (exc, eyc) = dims(variant, em, en);
    if em
        .checked_mul(exc)
        .and_then(|v| v.checked_mul(eyc))
        .and_then(|v| v.checked_mul(en))
        .is_none_or(|size| size > MAX_EMBEDDED_Q)
    {
        return Err(Error::Parameter(format!(
            "embedded instance {em}x{en} is too large to materialize"
        )));
    }
    let mut q = vec![0i64; em * exc * eyc * en];
    for i in 0..m {
        for j in 0..xc {
            for k in 0..yc {
                for l in 0..n {
                    q[((i * exc + j) * eyc + k) * en + l] = inst.q(i, j, k, l);
                }
            }
        }
    }
    let pad = |rows: usize, cols: usize, inside_rows: usize, inside_cols: usize, orig: &dyn Fn(usize, usize) -> i64| {
        let mut out = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in 0..cols {
                out.push(match (r < inside_rows, col < inside_cols) {
                    (true, true) => orig(r, col),
                    (false, false) => 0,
                    _ => big_l,
                });
            }
        }
        out
    };
    let c = pad(em, exc, m, xc, &|i, j| inst.c(i, j));
    let d = pad(eyc, en, yc, n, &|k, l| inst.d(k, l));
    let instance = Instance::new(variant, em, en, q, c, d)?;
    Ok(GadgetBundle::new(instance)
        .with("a", a)
        .with("b", b)
        .with("L", big_l)
        .with("original_m", m)
        .with("original_n", n))
}

/// Extends an original solution with padding rows and columns assigned to the
/// zero-cost outside block.
pub fn embed_solution(bundle: &GadgetBundle, original: &Solution) -> Result<Solution> {
    let inst = &bundle.instance;
    let (m, n) = (bundle.meta_usize("original_m")?, bundle.meta_usize("original_n")?);
    let (xc, yc) = dims(inst.variant(), m, n);
    if original.sigma.len() != m
        || original.tau.len() != n
        || original.sigma.iter().any(|&j| j >= xc)
        || original.tau.iter().any(|&k| k >= yc)
    {
        return Err(Error::InvalidSolution(format!(
            "not a solution of the original {m}x{n} instance"
        )));
    }
    let mut sigma = original.sigma.clone();
    sigma.resize(inst.m(), xc);
    let mut tau = original.tau.clone();
    tau.resize(inst.n(), yc);
    Ok(Solution::new(sigma, tau))
}

/// Restricts an embedded solution to the original index ranges.
///
/// The embedded solution must avoid every penalty entry: original rows stay in
/// original columns, padding rows in padding columns, and likewise for `tau`.
pub fn extract_embedded_solution(bundle: &GadgetBundle, embedded: &Solution) -> Result<Solution> {
    let inst = &bundle.instance;
    inst.check_solution(embedded)?;
    let (m, n) = (bundle.meta_usize("original_m")?, bundle.meta_usize("original_n")?);
    let (xc, yc) = dims(inst.variant(), m, n);
    for (i, &j) in embedded.sigma.iter().enumerate() {
        if (i < m) != (j < xc) {
            return Err(Error::InvalidSolution(format!(
                "sigma[{i}] = {j} uses a penalty entry of c"
            )));
        }
    }
    for (l, &k) in embedded.tau.iter().enumerate() {
        if (l < n) != (k < yc) {
            return Err(Error::InvalidSolution(format!(
                "tau[{l}] = {k} uses a penalty entry of d"
            )));
        }
    }
    Ok(Solution::new(
        embedded.sigma[..m].to_vec(),
        embedded.tau[..n].to_vec(),
    ))
}
