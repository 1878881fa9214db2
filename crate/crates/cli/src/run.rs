//! Cache-aware evaluation of requests and the three output formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ihpair_core::exact::{format_rat, rat_serde, rint, Rat};
use ihpair_core::pairing::{evaluate, EvalOptions, PairingResult, PairingSpec, Target, ENGINE_VERSION};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{cache_key, Cache};
use crate::error::{CliError, Result};
use crate::request::Request;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// A request together with its value and bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestResult {
    pub request: Request,
    #[serde(with = "rat_serde")]
    pub value: Rat,
    pub degree_ok: bool,
    /// Series windows per monomial of the expanded request.
    pub windows: BTreeMap<String, Vec<Vec<i64>>>,
    pub family_index: usize,
    pub ms: u64,
    pub engine: String,
}

#[derive(Clone, Debug)]
pub struct Evaluator {
    pub opts: EvalOptions,
    pub cache: Option<Cache>,
}

impl Evaluator {
    pub fn new(opts: EvalOptions, cache: Option<Cache>) -> Self {
        Evaluator { opts, cache }
    }

    /// One monomial, served from the cache when present.
    pub fn monomial(&self, spec: &PairingSpec, target: Target) -> Result<PairingResult> {
        let key = cache_key(spec, target, &self.opts);
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            return Ok(hit);
        }
        let res = evaluate(spec, target, &self.opts)?;
        if let Some(c) = &self.cache {
            c.put(&key, &res)?;
        }
        Ok(res)
    }

    /// Evaluates all requests; every distinct monomial is computed once. Output order is input order.
    pub fn run(&self, requests: &[Request]) -> Result<Vec<RequestResult>> {
        let combos = requests.iter().enumerate().map(|(i, r)| r.combination(i)).collect::<Result<Vec<_>>>()?;
        let mut unique: BTreeMap<String, (PairingSpec, Target)> = BTreeMap::new();
        for (req, combo) in requests.iter().zip(&combos) {
            for (_, s) in combo {
                unique.entry(cache_key(s, req.target, &self.opts)).or_insert_with(|| (s.clone(), req.target));
            }
        }
        let computed: BTreeMap<String, PairingResult> = unique
            .into_par_iter()
            .map(|(key, (s, t))| self.monomial(&s, t).map(|res| (key, res)))
            .collect::<Result<_>>()?;
        let results = requests
            .iter()
            .zip(combos)
            .map(|(req, combo)| {
                let mut value = rint(0);
                let mut windows = BTreeMap::new();
                let mut ms = 0;
                let mut degree_ok = true;
                for (c, s) in combo {
                    let res = &computed[&cache_key(&s, req.target, &self.opts)];
                    value += c * &res.value;
                    ms += res.elapsed_ms;
                    degree_ok &= res.degree_ok;
                    windows.insert(s.to_string(), res.windows.clone());
                }
                RequestResult {
                    request: req.clone(),
                    value,
                    degree_ok,
                    windows,
                    family_index: self.opts.family_index.unwrap_or(req.r),
                    ms,
                    engine: ENGINE_VERSION.to_string(),
                }
            })
            .collect();
        Ok(results)
    }
}

/// Human-readable monomial of a request, odd classes in the given order.
pub fn describe(req: &Request) -> String {
    let mut parts = Vec::new();
    if req.z > 0 {
        parts.push(if req.z == 1 { "z".to_string() } else { format!("z^{}", req.z) });
    }
    for (name, map) in [("a", &req.a), ("f", &req.f)] {
        for (k, e) in map {
            match e {
                0 => {}
                1 => parts.push(format!("{name}{k}")),
                _ => parts.push(format!("{name}{k}^{e}")),
            }
        }
    }
    parts.extend(req.b.iter().map(|(k, j)| format!("b{k}[{j}]")));
    match req.gamma {
        None | Some(0) => {}
        Some(1) => parts.push("gamma".into()),
        Some(p) => parts.push(format!("gamma^{p}")),
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

pub fn render(results: &[RequestResult], format: Format, single: bool) -> Result<String> {
    Ok(match format {
        Format::Text => {
            if single && results.len() == 1 {
                format!("{}\n", format_rat(&results[0].value))
            } else {
                let mut out = String::new();
                for r in results {
                    let label = r.request.label.as_deref().unwrap_or("-");
                    let q = &r.request;
                    let _ = writeln!(
                        out,
                        "{label}\t{} r={} g={}\t{}\t{}",
                        q.target,
                        q.r,
                        q.g,
                        describe(q),
                        format_rat(&r.value)
                    );
                }
                out
            }
        }
        Format::Json => {
            let mut s = if single && results.len() == 1 {
                serde_json::to_string_pretty(&results[0])?
            } else {
                serde_json::to_string_pretty(results)?
            };
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["label", "target", "r", "g", "monomial", "value", "degree_ok", "family_index", "ms"])
                .map_err(csv_err)?;
            for r in results {
                let q = &r.request;
                w.write_record([
                    q.label.clone().unwrap_or_default(),
                    q.target.to_string(),
                    q.r.to_string(),
                    q.g.to_string(),
                    describe(q),
                    format_rat(&r.value),
                    r.degree_ok.to_string(),
                    r.family_index.to_string(),
                    r.ms.to_string(),
                ])
                .map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Usage(e.to_string()))?
        }
    })
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
