//! Rank-two closed forms, the class gamma, and an independent one-variable evaluator.

use itertools::Itertools;
use num_traits::Zero;

use super::spec::{degree_check, PairingSpec, Target};
use super::{evaluate_combination, Combination, EvalOptions};
use crate::error::{Error, Result};
use crate::exact::{bernoulli, factorial, rat, rint, Laurent, Rat};
use crate::grassmann::OddClasses;

fn pow2(e: i64) -> Rat {
    rint(2).pow(e as i32)
}

fn sign(odd: bool) -> Rat {
    if odd {
        rint(-1)
    } else {
        rint(1)
    }
}

/// `gamma^p` with `gamma = sum_{j<=g} b_2^j b_2^{j+g}`, as odd-class sets in canonical order.
/// Each set `S` contributes `p! (-1)^{p(p-1)/2} prod_{j in S} b_2^j ... b_2^{j+g}`.
pub fn gamma_expand(p: usize, g: usize) -> Vec<(Rat, OddClasses)> {
    if p > g {
        return Vec::new();
    }
    let coeff = factorial(p as u32) * sign((p * p.saturating_sub(1) / 2) % 2 == 1);
    (1..=g)
        .combinations(p)
        .map(|s| {
            let l: OddClasses = s.iter().flat_map(|&j| [(2, j), (2, j + g)]).collect();
            (coeff.clone(), l)
        })
        .collect()
}

/// `a_2^m f_2^n gamma^p` in genus `g` as a combination of monomials.
pub fn gamma_power_combination(g: usize, m: u32, n: u32, p: usize) -> Combination {
    gamma_expand(p, g)
        .into_iter()
        .map(|(c, l)| {
            let mut s = PairingSpec::new(2, g).with_a(2, m).with_f(2, n);
            s.b = l;
            (c, s.normalized())
        })
        .collect()
}

/// `Res_{y=0} y^k / (1 - e^{-y})`.
fn residue_power(k: i64) -> Rat {
    if k > 0 {
        return Rat::zero();
    }
    let n = (-k) as usize;
    sign(k % 2 != 0) * bernoulli(n) / factorial(n as u32)
}

/// Closed rank-two pairing `<a_2^m f_2^n gamma^p>` for `2m + n + 3p = 3g - 3`.
pub fn rank2_residue_form(g: usize, m: u32, n: u32, p: usize) -> Result<Rat> {
    if g < 2 || 2 * m as usize + n as usize + 3 * p != 3 * g - 3 {
        return Err(Error::InvalidSpec(format!(
            "rank-two form needs 2m + n + 3p = 3g - 3 (g={g}, m={m}, n={n}, p={p})"
        )));
    }
    if p > g {
        return Ok(Rat::zero());
    }
    let (gi, mi, pi) = (g as i64, m as i64, p as i64);
    let pre = sign((gi + mi) % 2 != 0) / pow2(1 + 2 * mi + pi - gi);
    let comb = factorial(n) * factorial(g as u32) / factorial((g - p) as u32);
    Ok(pre * comb * residue_power(2 + 2 * mi + 2 * pi - 2 * gi))
}

/// Coefficients of `t / tanh t = sum_j kappa_j t^{2j}`.
pub fn kappa(j: usize) -> Rat {
    pow2(2 * j as i64) * bernoulli(2 * j) / factorial(2 * j as u32)
}

/// Pairing of classes whose product is `beta^m alpha^n`, for `2m + n = 3g - 3`, `m < g - 1`.
pub fn kiem_pairing(g: usize, m: u32, n: u32) -> Result<Rat> {
    if g < 2 || 2 * m as usize + n as usize != 3 * g - 3 || m as usize >= g - 1 {
        return Err(Error::InvalidSpec(format!("needs 2m + n = 3g - 3 and m < g - 1 (g={g}, m={m}, n={n})")));
    }
    Ok(sign(g % 2 == 1) * factorial(n) * pow2(2 * g as i64 - 2) * kappa(g - 1 - m as usize))
}

/// `alpha^{g-2} beta^{g-2} psi / ((g-2)! (-4)^{g-1})` with `psi = alpha beta - 4 gamma`,
/// `alpha = 2 f_2`, `beta = -4 a_2`, expanded into monomials.
pub fn fundamental_class_combination(g: usize) -> Combination {
    let gg = g as i64;
    let norm = factorial(g as u32 - 2) * rint(-4).pow(gg as i32 - 1);
    let mut out = Combination::new();
    let lead = pow2(gg - 1) * rint(-4).pow(gg as i32 - 1) / &norm;
    out.push((lead, PairingSpec::new(2, g).with_a(2, g as u32 - 1).with_f(2, g as u32 - 1).normalized()));
    let sub = rint(-4) * pow2(gg - 2) * rint(-4).pow(gg as i32 - 2) / &norm;
    for (c, s) in gamma_power_combination(g, g as u32 - 2, g as u32 - 2, 1) {
        out.push((&sub * c, s));
    }
    out
}

/// Pairing of the fundamental-class representative with 1; equals 1.
pub fn fundamental_class_check(g: usize, opts: &EvalOptions) -> Result<Rat> {
    if g < 2 {
        return Err(Error::InvalidSpec("genus below 2".into()));
    }
    evaluate_combination(&fundamental_class_combination(g), Target::IH, opts)
}

/// Rank-two evaluation in the single coordinate `y = x_1 - x_2`, written out by hand:
/// the torus integral is a product over the pairs `(j, j+g)`, and the residue is read off a
/// one-variable Laurent series after rescaling `y` by the parameter.
pub fn rank2_one_variable(spec: &PairingSpec, target: Target) -> Result<Rat> {
    spec.validate(target)?;
    if spec.r != 2 {
        return Err(Error::InvalidSpec("one-variable path is rank two only".into()));
    }
    if !degree_check(spec, target) {
        return Ok(Rat::zero());
    }
    let g = spec.g as i64;
    let m = spec.a.get(&2).copied().unwrap_or(0) as i64;
    let n = spec.f.get(&2).copied().unwrap_or(0) as i64;
    // torus: odd classes must come in pairs (j, j+g); each carries tau_2' = -y
    let js: Vec<usize> = spec.b.iter().map(|&(_, j)| j).collect();
    let low: Vec<usize> = js.iter().copied().filter(|&j| j <= spec.g).collect();
    if low.len() * 2 != js.len() || low.iter().any(|j| !js.contains(&(j + spec.g))) {
        return Ok(Rat::zero());
    }
    let p = low.len() as i64;
    // y^d * C * delta^(g-p) * e^{-w delta y} / (1 - e^{-delta y})
    let mut c = sign((p * (p - 1) / 2) % 2 == 1) * pow2(g - p);
    let mut d = 2 * m + 2 * p - (2 * g - 2);
    c *= rat(-1, 4).pow(m as i32);
    let w = match target {
        Target::M1 => {
            c /= rint(2);
            rat(1, 2)
        }
        Target::P0 => {
            let z = spec.z as i64;
            c *= rat(-1, 2).pow(z as i32) * rint(-1);
            d += z - 1;
            Rat::zero()
        }
        Target::IH => {
            c *= rat(-1, 2);
            Rat::zero()
        }
    };
    c *= sign((g - 1) % 2 == 1);
    // Res_y y^d e^{-w d y}/(1 - e^{-d y}) = delta^{-d-1} Res_t t^d e^{-w t}/(1 - e^{-t})
    if g - p - d - 1 != n {
        return Ok(Rat::zero());
    }
    let want = -1 - d;
    let prec = want.max(0) as i32 + 1;
    // 1/(1 - e^{-t}) = f(-t) with f(u) = 1/(1 - e^u)
    let f = Laurent::one_minus_exp_inv(prec);
    let flipped = Laurent::new(-1, (-1..=prec).map(|k| f.coeff(k) * sign(k % 2 != 0)).collect());
    let series = flipped.mul(&Laurent::exp_linear(&-w, prec + 1));
    let res = if want < series.low() as i64 { Rat::zero() } else { series.coeff(want as i32) };
    Ok(c * res * factorial(n as u32))
}
