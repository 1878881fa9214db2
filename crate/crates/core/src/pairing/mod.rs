//! Intersection pairings on the three moduli spaces, assembled from per-basis residues.

mod rank2;
mod spec;

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, rat, rat_serde, rint, Poly, Rat};
use crate::grassmann::torus_factor;
use crate::iber::{iber, IberInput, IberOptions, IberOutput};
use crate::roots::{hamiltonian_family, lattice_reduce, orthonormal_basis, RootBasis, WeightVector};
use crate::symfun::{tau_poly, truncate_deltas, x_nvars, QSpec};

pub use rank2::{
    fundamental_class_check, fundamental_class_combination, gamma_expand, gamma_power_combination, kappa, kiem_pairing,
    rank2_one_variable, rank2_residue_form,
};
pub use spec::{degree_check, dimension, PairingSpec, Target};

/// Version tag stored with every result.
pub const ENGINE_VERSION: &str = concat!("ihpair-core/", env!("CARGO_PKG_VERSION"));

/// Evaluation switches. The value never depends on them; they exist for verification.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Hamiltonian family index `m` (bases with `sigma(1) = m`); defaults to `r`.
    pub family_index: Option<usize>,
    /// Keep the Hessian and measure Jacobian as separate factors.
    pub keep_hessian: bool,
    /// Extra precision on every truncation window.
    pub window_bump: i64,
    /// Run the engine even when the degree does not match (the result must then vanish).
    pub force_engine: bool,
    /// Evaluate the bases of a family in parallel.
    pub parallel: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { family_index: None, keep_hessian: false, window_bump: 0, force_engine: false, parallel: true }
    }
}

/// Outcome of one pairing evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingResult {
    pub target: Target,
    pub spec: PairingSpec,
    #[serde(with = "rat_serde")]
    pub value: Rat,
    pub degree_ok: bool,
    pub family_index: usize,
    /// Series window used for each basis of the family.
    pub windows: Vec<Vec<i64>>,
    pub elapsed_ms: u64,
    pub engine: String,
}

/// Number of widening retries after a truncation failure.
const RETRIES: i64 = 3;

/// `(-1)^{C(r,2)(g-1)}`.
fn global_sign(r: usize, g: usize) -> Rat {
    if (r * (r - 1) / 2 * (g - 1)).is_multiple_of(2) {
        rint(1)
    } else {
        rint(-1)
    }
}

/// The integrand shared by all bases: numerator in x and pole orders.
struct Integrand {
    numerator: Poly,
    poles: BTreeMap<(usize, usize), u32>,
}

fn build_integrand(spec: &PairingSpec, target: Target, q: &QSpec) -> Result<Integrand> {
    let (r, g) = (spec.r, spec.g);
    let nv = x_nvars(r);
    let caps = spec.delta_caps();
    let ortho = orthonormal_basis(r);
    let mut num = torus_factor(q, &ortho, &spec.b, g, &caps)?;
    for (&k, &m) in &spec.a {
        num = truncate_deltas(&(&num * &tau_poly(k, r).pow(m)), r, &caps);
    }
    let mean = Poly::linear(nv, &vec![rat(1, r as i64); r]);
    let last = Poly::var(nv, r - 1);
    let mut poles = BTreeMap::new();
    for i in 0..r {
        for j in i + 1..r {
            poles.insert((i, j), 2 * g as u32 - 2);
        }
    }
    match target {
        Target::M1 => {}
        Target::P0 | Target::IH => {
            let extra = match target {
                Target::P0 => (&last - &mean).pow(spec.z),
                _ => (&mean - &last).pow(r as u32 - 1),
            };
            num = &num * &extra;
            // prod_{i<r} (x_r - x_i) = (-1)^{r-1} prod_{i<r} (x_i - x_r)
            if r % 2 == 0 {
                num = -&num;
            }
            for i in 0..r - 1 {
                *poles.get_mut(&(i, r - 1)).expect("pole present") += 1;
            }
        }
    }
    Ok(Integrand { numerator: num, poles })
}

/// Weight at which the residue of basis `b` is taken.
pub fn evaluation_weight(target: Target, r: usize, basis: &RootBasis) -> WeightVector {
    let c = WeightVector::c_vector(r);
    let (int, frac) = lattice_reduce(&c, basis);
    match target {
        Target::M1 => frac,
        Target::P0 | Target::IH => int.scale(&-Rat::one()),
    }
}

fn run_family(spec: &PairingSpec, target: Target, opts: &EvalOptions, bump: i64) -> Result<(Rat, Vec<Vec<i64>>)> {
    let r = spec.r;
    let q = QSpec::standard(r);
    let integrand = build_integrand(spec, target, &q)?;
    let family = hamiltonian_family(r, opts.family_index.unwrap_or(r))?;
    let iopts = IberOptions { keep_hessian: opts.keep_hessian, window_bump: bump };
    let eval = |basis: &RootBasis| -> Result<IberOutput> {
        let input = IberInput {
            numerator: integrand.numerator.clone(),
            poles: integrand.poles.clone(),
            weight: evaluation_weight(target, r, basis),
            basis: basis.clone(),
            q: q.clone(),
            divide_by_hessian: true,
            delta_caps: spec.delta_caps(),
        };
        iber(&input, &iopts)
    };
    let outputs: Vec<Result<IberOutput>> =
        if opts.parallel { family.par_iter().map(eval).collect() } else { family.iter().map(eval).collect() };
    let mut total = Poly::zero(r - 1);
    let mut windows = Vec::new();
    for out in outputs {
        let out = out?;
        total = &total + &out.value;
        windows.push(out.window);
    }
    let coeff = total.coeff(&spec.f_exponents());
    let f_fact: Rat = spec.f.values().map(|&n| factorial(n)).product();
    let denom = match target {
        Target::M1 => factorial(r as u32),
        Target::P0 | Target::IH => factorial(r as u32 - 1),
    };
    Ok((coeff * global_sign(r, spec.g) * f_fact / denom, windows))
}

/// Evaluates the monomial integral on the given target.
pub fn evaluate(spec: &PairingSpec, target: Target, opts: &EvalOptions) -> Result<PairingResult> {
    spec.validate(target)?;
    let spec = spec.normalized();
    let start = Instant::now();
    let degree_ok = degree_check(&spec, target);
    let family_index = opts.family_index.unwrap_or(spec.r);
    let finish = |value: Rat, windows: Vec<Vec<i64>>| PairingResult {
        target,
        spec: spec.clone(),
        value,
        degree_ok,
        family_index,
        windows,
        elapsed_ms: start.elapsed().as_millis() as u64,
        engine: ENGINE_VERSION.to_string(),
    };
    if !degree_ok && !opts.force_engine {
        return Ok(finish(Rat::zero(), Vec::new()));
    }
    let mut last_err = None;
    for attempt in 0..=RETRIES {
        match run_family(&spec, target, opts, opts.window_bump + 2 * attempt) {
            Ok((value, windows)) => return Ok(finish(value, windows)),
            Err(e @ Error::TruncationTooSmall(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Integral over the smooth moduli space of degree-one bundles.
pub fn integrate_m1(spec: &PairingSpec, opts: &EvalOptions) -> Result<PairingResult> {
    evaluate(spec, Target::M1, opts)
}

/// Integral over the parabolic moduli space of degree zero.
pub fn integrate_p0(spec: &PairingSpec, opts: &EvalOptions) -> Result<PairingResult> {
    evaluate(spec, Target::P0, opts)
}

/// Intersection pairing on the degree-zero moduli space.
pub fn ih_pairing(spec: &PairingSpec, opts: &EvalOptions) -> Result<PairingResult> {
    evaluate(spec, Target::IH, opts)
}

/// A rational linear combination of monomials.
pub type Combination = Vec<(Rat, PairingSpec)>;

/// Evaluates `sum c_i <spec_i>` on one target.
pub fn evaluate_combination(terms: &Combination, target: Target, opts: &EvalOptions) -> Result<Rat> {
    let mut acc = Rat::zero();
    for (c, s) in terms {
        if c.is_zero() {
            continue;
        }
        acc += c * evaluate(s, target, opts)?.value;
    }
    Ok(acc)
}
