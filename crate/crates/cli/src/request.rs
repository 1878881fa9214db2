//! The JSON request record and its expansion into monomials.

use std::collections::BTreeMap;

use ihpair_core::exact::{rint, Rat};
use ihpair_core::pairing::{gamma_expand, Combination, PairingSpec, Target};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

fn is_zero(z: &u32) -> bool {
    *z == 0
}

/// One pairing request. `b` lists odd classes in multiplication order; `gamma` is a power of
/// the rank-two class `sum_j b_2^j b_2^{j+g}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub target: Target,
    pub r: usize,
    pub g: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub z: u32,
    #[serde(default)]
    pub a: BTreeMap<usize, u32>,
    #[serde(default)]
    pub f: BTreeMap<usize, u32>,
    #[serde(default)]
    pub b: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Request {
    pub fn new(target: Target, r: usize, g: usize) -> Self {
        Request { target, r, g, z: 0, a: BTreeMap::new(), f: BTreeMap::new(), b: Vec::new(), gamma: None, label: None }
    }

    fn base_spec(&self) -> PairingSpec {
        let mut s = PairingSpec::new(self.r, self.g).with_z(self.z);
        for (&k, &m) in &self.a {
            s = s.with_a(k, m);
        }
        for (&k, &n) in &self.f {
            s = s.with_f(k, n);
        }
        s
    }

    /// Expands into signed monomials with odd classes in canonical order. Products with a
    /// repeated odd class vanish and are dropped.
    pub fn combination(&self, index: usize) -> Result<Combination> {
        let err = |m: String| CliError::schema(index, self.label.as_deref(), m);
        let base = self.base_spec();
        base.validate(self.target).map_err(|e| err(e.to_string()))?;
        for &(k, j) in &self.b {
            if !(2..=self.r).contains(&k) || !(1..=2 * self.g).contains(&j) {
                return Err(err(format!("odd class [{k},{j}] outside k in 2..={}, j in 1..={}", self.r, 2 * self.g)));
            }
        }
        let gamma_terms = match self.gamma {
            None | Some(0) => vec![(rint(1), Default::default())],
            Some(p) if self.r == 2 => gamma_expand(p, self.g),
            Some(_) => return Err(err("gamma is only defined in rank two".into())),
        };
        let mut out = Combination::new();
        for (c, set) in gamma_terms {
            let mut order = self.b.clone();
            order.extend(set.iter().copied());
            if let Some(sign) = sort_sign(&mut order) {
                let mut s = base.clone();
                s.b = order.into_iter().collect();
                out.push((c * sign, s.normalized()));
            }
        }
        Ok(out)
    }
}

/// Sorts the odd classes and returns the sign of the reordering, or `None` on a repeat.
fn sort_sign(order: &mut [(usize, usize)]) -> Option<Rat> {
    let mut swaps = 0usize;
    for i in 0..order.len() {
        for j in 0..order.len() - 1 - i {
            if order[j] > order[j + 1] {
                order.swap(j, j + 1);
                swaps += 1;
            }
        }
    }
    if order.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(if swaps.is_multiple_of(2) { rint(1) } else { rint(-1) })
}

/// Parses a batch file: a JSON array of requests. Errors name the offending record.
pub fn parse_batch(text: &str) -> Result<Vec<Request>> {
    let raw: Vec<serde_json::Value> =
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("batch file is not a JSON array: {e}")))?;
    raw.into_iter()
        .enumerate()
        .map(|(i, v)| {
            let label = v.get("label").and_then(|l| l.as_str()).map(str::to_string);
            let req: Request =
                serde_json::from_value(v).map_err(|e| CliError::schema(i, label.as_deref(), e.to_string()))?;
            req.combination(i)?;
            Ok(req)
        })
        .collect()
}
