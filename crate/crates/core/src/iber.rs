//! The iterated residue transform of a rational integrand over one root basis.
//!
//! For a numerator `p(x)`, poles `prod (x_i - x_j)^{e_ij}` and a weight `a`, it evaluates
//! `Res_{y_{r-1}} ... Res_{y_1}` of
//! `p exp(Q_a) / (prod (x_i - x_j)^{e_ij} prod_k (1 - exp(Q_{beta_k})))` against the form
//! `dQ_{beta_1} ... dQ_{beta_{r-1}}`, optionally divided by `det Hess_B(Q)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{factorial, residue_of_product, Exps, ILSeries, Laurent, Poly, SeriesRing};
use crate::roots::{RootBasis, WeightVector};
use crate::symfun::{hessian_det, measure_jacobian, q_directional_y, truncate_deltas, QSpec};

/// Rewrites a translation-invariant polynomial in x in the root coordinates of `basis`.
pub fn to_y_coordinates(p: &Poly, basis: &RootBasis) -> Result<Poly> {
    basis.to_y(p)
}

pub use crate::exact::iterated_residue;

/// One iterated residue evaluation.
#[derive(Clone, Debug)]
pub struct IberInput {
    /// Numerator in the x layout.
    pub numerator: Poly,
    /// `(i, j) -> e`: the denominator contains `(x_i - x_j)^e` (0-based indices).
    pub poles: BTreeMap<(usize, usize), u32>,
    pub weight: WeightVector,
    pub basis: RootBasis,
    pub q: QSpec,
    /// Whether the integrand is divided by `det Hess_B(Q)`.
    pub divide_by_hessian: bool,
    /// Exponent caps of `delta_3, ..., delta_r`.
    pub delta_caps: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IberOptions {
    /// Keep the Hessian and the measure Jacobian as separate factors instead of cancelling them.
    pub keep_hessian: bool,
    /// Extra precision added to every truncation window.
    pub window_bump: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IberOutput {
    /// Polynomial in `delta_2, ..., delta_r` (Laurent in `delta_2`).
    pub value: Poly,
    /// Window of the series product, in valuation coordinates.
    pub window: Vec<i64>,
}

enum Factor {
    /// `1/(1 - exp(u0 + eps))` with `u0 = coef * mono` and the powers of the nilpotent `eps`.
    Bernoulli {
        coef: crate::exact::Rat,
        mono: Exps,
        eps_powers: Vec<ILSeries>,
    },
    Exp(Poly),
    Inverse(Poly),
}

struct Planned {
    factor: Factor,
    low: Vec<i64>,
}

fn scale_vec(v: &[i64], k: i64) -> Vec<i64> {
    v.iter().map(|x| x * k).collect()
}

impl Planned {
    fn build(&self, ring: &Arc<SeriesRing>, prec: &[i64]) -> Result<ILSeries> {
        match &self.factor {
            Factor::Bernoulli { coef, mono, eps_powers } => {
                let mut acc: Option<ILSeries> = None;
                for (k, eps_k) in eps_powers.iter().enumerate() {
                    let make = |p_lim: i32| {
                        let mut f = Laurent::one_minus_exp_inv(p_lim + k as i32);
                        for _ in 0..k {
                            f = f.deriv();
                        }
                        f
                    };
                    let term = ILSeries::compose_monomial(ring, make, coef, mono, prec)?
                        .mul(eps_k)
                        .scale(&factorial(k as u32).recip())
                        .truncated(prec);
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a.add(&term),
                    });
                }
                Ok(acc.expect("at least the zeroth power"))
            }
            Factor::Exp(p) => ILSeries::from_poly(ring, p).truncated(prec).exp(),
            Factor::Inverse(p) => {
                let lead = scale_vec(&self.low, -2);
                let wide: Vec<i64> = prec.iter().zip(&lead).map(|(a, b)| a + b).collect();
                let s = ILSeries::from_poly(ring, p).truncated(&wide);
                if s.is_zero() {
                    // the window lies below the leading term of the inverse
                    return Ok(ILSeries::zero(ring).with_window(&self.low, prec));
                }
                s.invert()
            }
        }
    }
}

/// Evaluates the iterated residue transform.
pub fn iber(input: &IberInput, opts: &IberOptions) -> Result<IberOutput> {
    let r = input.q.r;
    let n = r - 1;
    let basis = &input.basis;
    let caps = &input.delta_caps;
    let ring = SeriesRing::new(n, r - 1, caps.clone());
    let trunc = |p: &Poly| truncate_deltas(p, n, caps);
    let target: Vec<i32> = vec![-1; n];
    let e_star = ring.valuation(&target).to_vec();

    let num_y = trunc(&to_y_coordinates(&input.numerator, basis)?);
    if num_y.is_zero() {
        return Ok(IberOutput { value: Poly::zero(r - 1), window: e_star });
    }
    let q_y = trunc(&input.q.in_y(basis)?);

    let mut p = num_y;
    if !input.divide_by_hessian || opts.keep_hessian {
        p = trunc(&(&p * &measure_jacobian(&q_y, basis)));
    }
    let p_series = ILSeries::from_poly(&ring, &p);
    if p_series.is_zero() {
        return Ok(IberOutput { value: Poly::zero(r - 1), window: e_star });
    }

    let mut plan: Vec<Planned> = Vec::new();
    for j in 0..n {
        let u = trunc(&q_directional_y(&q_y, basis, &basis.root(j)));
        let free = u.filter(|e| e[n + 1..].iter().all(|&d| d == 0));
        let nil = &u - &free;
        let mut free_terms = free.terms();
        let (mono, coef) = match (free_terms.next(), free_terms.next()) {
            (Some((e, c)), None) => (e.clone(), c.clone()),
            _ => return Err(Error::NonUnitLeadingTerm(format!("Q along root {j} is not a monomial at leading order"))),
        };
        let v = ring.valuation(&mono);
        let eps = ILSeries::from_poly(&ring, &nil);
        let mut eps_powers = vec![ILSeries::one(&ring)];
        loop {
            let next = eps_powers.last().unwrap().mul(&eps);
            if next.is_zero() {
                break;
            }
            eps_powers.push(next);
        }
        let kk = eps_powers.len() as i64 - 1;
        plan.push(Planned { factor: Factor::Bernoulli { coef, mono, eps_powers }, low: scale_vec(&v, -(kk + 1)) });
    }
    let qa = trunc(&q_directional_y(&q_y, basis, &input.weight));
    if !qa.is_zero() {
        plan.push(Planned { factor: Factor::Exp(qa), low: vec![0; n] });
    }
    for (&(i, j), &e) in &input.poles {
        if e == 0 {
            continue;
        }
        let nv = input.numerator.nvars();
        let root = &Poly::var(nv, i) - &Poly::var(nv, j);
        let rho = to_y_coordinates(&root, basis)?.pow(e);
        let l = ILSeries::from_poly(&ring, &rho).actual_low();
        plan.push(Planned { factor: Factor::Inverse(rho), low: scale_vec(&l, -1) });
    }
    if input.divide_by_hessian && opts.keep_hessian {
        let h = trunc(&hessian_det(&input.q, basis)?);
        let l = ILSeries::from_poly(&ring, &h).actual_low();
        plan.push(Planned { factor: Factor::Inverse(h), low: scale_vec(&l, -1) });
    }

    // Every factor needs precision `e* - low(P) - sum of the other factors' lows`.
    let l_p = p_series.low().to_vec();
    let total_low: Vec<i64> = (0..n).map(|c| plan.iter().map(|f| f.low[c]).sum()).collect();
    let mut s = ILSeries::one(&ring);
    for f in &plan {
        let prec: Vec<i64> =
            (0..n).map(|c| e_star[c] - l_p[c] - (total_low[c] - f.low[c]) + opts.window_bump).collect();
        s = s.mul(&f.build(&ring, &prec)?);
    }
    let value = residue_of_product(&p_series, &s)?;
    Ok(IberOutput { value, window: s.prec().to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn rank_two_denominator_residue() {
        // Res_y y^-2 exp(-d y/2) / (1 - exp(-d y)) = -d/24
        let q = QSpec::standard(2);
        let basis = RootBasis::new(2, vec![(0, 1)]).unwrap();
        let input = IberInput {
            numerator: Poly::one(3),
            poles: [((0, 1), 2)].into_iter().collect(),
            weight: WeightVector::c_vector(2),
            basis,
            q,
            divide_by_hessian: true,
            delta_caps: vec![],
        };
        let out = iber(&input, &IberOptions::default()).unwrap();
        assert_eq!(out.value, Poly::monomial(1, smallvec::smallvec![1], rat(-1, 24)));
        let kept = iber(&input, &IberOptions { keep_hessian: true, window_bump: 0 }).unwrap();
        assert_eq!(kept.value, out.value);
        let wide = iber(&input, &IberOptions { keep_hessian: false, window_bump: 2 }).unwrap();
        assert_eq!(wide.value, out.value);
    }

    #[test]
    fn without_hessian_division_the_measure_stays() {
        let q = QSpec::standard(2);
        let basis = RootBasis::new(2, vec![(0, 1)]).unwrap();
        let input = IberInput {
            numerator: Poly::one(3),
            poles: [((0, 1), 1)].into_iter().collect(),
            weight: WeightVector::zero(2),
            basis,
            q,
            divide_by_hessian: false,
            delta_caps: vec![],
        };
        // -d * Res_y 1/(y (1 - e^{-d y})) = -d * (1/2) = -d/2
        let out = iber(&input, &IberOptions::default()).unwrap();
        assert_eq!(out.value, Poly::monomial(1, smallvec::smallvec![1], rat(-1, 2)));
    }
}
