//! JSON file formats.
//!
//! Instance: `{"variant": 1|2, "m": .., "n": .., "q": [[[[..]]]], "c": [[..]], "d": [[..]]}`
//! with `q` nested in `(i, j, k, l)` order. Solution: `{"variant": 1|2, "sigma": [..],
//! "tau": [..]}` with 0-based entries.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{validate_instance, Instance, Solution, Variant};
use crate::error::{Error, Result};

/// Unchecked instance data as it appears on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub variant: i64,
    pub m: usize,
    pub n: usize,
    pub q: Vec<Vec<Vec<Vec<i64>>>>,
    pub c: Vec<Vec<i64>>,
    pub d: Vec<Vec<i64>>,
}

impl From<&Instance> for RawInstance {
    fn from(inst: &Instance) -> Self {
        let (m, n, xc, yc) = (inst.m(), inst.n(), inst.x_choices(), inst.y_choices());
        let q = (0..m)
            .map(|i| {
                (0..xc)
                    .map(|j| (0..yc).map(|k| inst.q_row(i, j, k).to_vec()).collect())
                    .collect()
            })
            .collect();
        RawInstance {
            variant: inst.variant().code() as i64,
            m,
            n,
            q,
            c: inst.c_flat().chunks(xc).map(<[i64]>::to_vec).collect(),
            d: inst.d_flat().chunks(n).map(<[i64]>::to_vec).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub variant: i64,
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
}

fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse(format!(
            "at `{path}` (line {}, column {}): {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

pub fn encode_instance(inst: &Instance) -> Vec<u8> {
    let mut out = serde_json::to_vec(&RawInstance::from(inst)).expect("plain data serializes");
    out.push(b'\n');
    out
}

pub fn decode_instance(bytes: &[u8]) -> Result<Instance> {
    let raw: RawInstance = parse_json(bytes)?;
    validate_instance(&raw)
}

pub fn encode_solution(variant: Variant, sol: &Solution) -> Vec<u8> {
    let file = SolutionFile {
        variant: variant.code() as i64,
        sigma: sol.sigma.clone(),
        tau: sol.tau.clone(),
    };
    let mut out = serde_json::to_vec(&file).expect("plain data serializes");
    out.push(b'\n');
    out
}

/// Parses a solution file. Range checks against an instance are left to
/// [`Instance::check_solution`].
pub fn decode_solution(bytes: &[u8]) -> Result<(Variant, Solution)> {
    let file: SolutionFile = parse_json(bytes)?;
    let variant = Variant::from_code(file.variant)?;
    Ok((variant, Solution::new(file.sigma, file.tau)))
}
