//! Exterior algebra over polynomial coefficients and the torus (Jacobian) factor of the integrands.
//!
//! Generators `eta_a^j` (a = 1..r-1, j = 1..2g) are indexed `(j - 1)(r - 1) + (a - 1)`.
//! They are the odd coordinates along the orthogonal vectors `w_a` of [`orthonormal_basis`];
//! `zeta_a^j = sqrt(q_a) eta_a^j` are the coordinates along unit vectors.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{factorial, rint, Poly, Rat};
use crate::roots::OrthoVector;
use crate::symfun::{tau_poly, truncate_deltas, QSpec};

/// Element of an exterior algebra on at most 64 generators; monomials are bitmasks read in
/// increasing generator order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassElem {
    n_gens: usize,
    coeff_nvars: usize,
    terms: BTreeMap<u64, Poly>,
}

fn reorder_sign(a: u64, b: u64) -> bool {
    // parity of pairs (x in a, y in b) with x > y
    let mut count = 0u32;
    let mut bb = b;
    while bb != 0 {
        let y = bb.trailing_zeros();
        count += (a >> (y + 1)).count_ones();
        bb &= bb - 1;
    }
    count % 2 == 1
}

/// Sign of the permutation sorting `order` increasingly.
pub fn sort_sign(order: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                odd = !odd;
            }
        }
    }
    odd
}

impl GrassElem {
    pub fn zero(n_gens: usize, coeff_nvars: usize) -> Self {
        assert!(n_gens <= 64);
        GrassElem { n_gens, coeff_nvars, terms: BTreeMap::new() }
    }

    pub fn scalar(n_gens: usize, c: Poly) -> Self {
        let mut e = Self::zero(n_gens, c.nvars());
        e.add_term(0, c);
        e
    }

    /// `c * gen_i`.
    pub fn generator(n_gens: usize, i: usize, c: Poly) -> Self {
        let mut e = Self::zero(n_gens, c.nvars());
        e.add_term(1 << i, c);
        e
    }

    pub fn n_gens(&self) -> usize {
        self.n_gens
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &Poly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mask: u64, c: Poly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(|| Poly::zero(self.coeff_nvars));
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Poly) -> Self {
        let mut out = Self::zero(self.n_gens, self.coeff_nvars);
        for (m, x) in &self.terms {
            out.add_term(*m, x * c);
        }
        out
    }

    /// Applies `f` to every coefficient (used to truncate nilpotent parameters).
    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        let mut out = Self::zero(self.n_gens, self.coeff_nvars);
        for (m, x) in &self.terms {
            out.add_term(*m, f(x));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_gens, self.coeff_nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let c = ca * cb;
                out.add_term(ma | mb, if reorder_sign(*ma, *mb) { -&c } else { c });
            }
        }
        out
    }

    /// Exponential of an even nilpotent element (no scalar part).
    pub fn exp_even(&self) -> Result<Self> {
        if self.terms.keys().any(|m| m.count_ones() % 2 == 1 || *m == 0) {
            return Err(Error::NonNilpotentExp("exterior exponential of a non-even or non-nilpotent element".into()));
        }
        let mut acc = Self::scalar(self.n_gens, Poly::one(self.coeff_nvars));
        let mut power = acc.clone();
        let mut k = 1u32;
        loop {
            power = power.wedge(self);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&Poly::constant(self.coeff_nvars, factorial(k).recip())));
            k += 1;
        }
        Ok(acc)
    }

    /// Coefficient of the product of all generators taken in the order `order`.
    pub fn top_coeff(&self, order: &[usize]) -> Poly {
        assert_eq!(order.len(), self.n_gens);
        let full = if self.n_gens == 64 { u64::MAX } else { (1u64 << self.n_gens) - 1 };
        let c = self.terms.get(&full).cloned().unwrap_or_else(|| Poly::zero(self.coeff_nvars));
        if sort_sign(order) {
            -&c
        } else {
            c
        }
    }
}

/// Index of `eta_a^j` (1-based `a`, `j`).
pub fn gen_index(r: usize, a: usize, j: usize) -> usize {
    (j - 1) * (r - 1) + (a - 1)
}

/// Reference top monomial `prod_{j=1}^g prod_a (zeta_a^j zeta_a^{g+j})`.
pub fn reference_order(r: usize, g: usize) -> Vec<usize> {
    let mut order = Vec::new();
    for j in 1..=g {
        for a in 1..r {
            order.push(gen_index(r, a, j));
            order.push(gen_index(r, a, j + g));
        }
    }
    order
}

/// Normalised integral over the torus: `r^g` times the coefficient of the reference top monomial,
/// for an element written in the unit-vector generators `zeta`.
pub fn berezin_integral(u: &GrassElem, r: usize, g: usize) -> Poly {
    let c = u.top_coeff(&reference_order(r, g));
    c.scale(&rint(r as i64).pow(g as i32))
}

/// The integral of an element written in the `eta` generators: `r^g (prod_a q_a)^{-g}` times its top coefficient.
pub fn berezin_integral_scaled(u: &GrassElem, r: usize, g: usize, ortho: &[OrthoVector]) -> Poly {
    let qprod: Rat = ortho.iter().map(|o| o.q.clone()).product();
    berezin_integral(u, r, g).scale(&qprod.pow(g as i32).recip())
}

/// Odd classes `b_k^j` present in a pairing, in canonical `(k, j)` order.
pub type OddClasses = BTreeSet<(usize, usize)>;

fn check_odd(r: usize, g: usize, l: &OddClasses) -> Result<()> {
    for &(k, j) in l {
        if !(2..=r).contains(&k) || !(1..=2 * g).contains(&j) {
            return Err(Error::OutOfRange(format!("odd class b_{k}^{j} outside k in 2..={r}, j in 1..={}", 2 * g)));
        }
    }
    Ok(())
}

struct TorusData {
    /// `Q_{w_a w_b}`
    hess: Vec<Vec<Poly>>,
    /// `(tau_k)_{w_a}` indexed by `k` then `a`
    grads: BTreeMap<usize, Vec<Poly>>,
}

fn torus_data(q: &QSpec, ortho: &[OrthoVector], l: &OddClasses, caps: &[u32]) -> TorusData {
    let r = q.r;
    let trunc = |p: Poly| truncate_deltas(&p, r, caps);
    let hess = ortho
        .iter()
        .map(|ua| ortho.iter().map(|ub| trunc(q.q.directional(&ua.w).directional(&ub.w))).collect())
        .collect();
    let mut grads = BTreeMap::new();
    for &(k, _) in l {
        grads.entry(k).or_insert_with(|| {
            let t = tau_poly(k, r);
            ortho.iter().map(|u| t.directional(&u.w)).collect::<Vec<_>>()
        });
    }
    TorusData { hess, grads }
}

fn block_exponent(
    n_gens: usize,
    nv: usize,
    data: &TorusData,
    index: impl Fn(usize, usize) -> usize,
    j_lo: usize,
    j_hi: usize,
) -> GrassElem {
    let n = data.hess.len();
    let mut x = GrassElem::zero(n_gens, nv);
    for a in 0..n {
        for b in 0..n {
            let gab = GrassElem::generator(n_gens, index(a, j_lo), Poly::one(nv)).wedge(&GrassElem::generator(
                n_gens,
                index(b, j_hi),
                -&data.hess[a][b],
            ));
            x = x.add(&gab);
        }
    }
    x
}

fn odd_factor(n_gens: usize, nv: usize, data: &TorusData, k: usize, index: impl Fn(usize) -> usize) -> GrassElem {
    let mut x = GrassElem::zero(n_gens, nv);
    for (a, grad) in data.grads[&k].iter().enumerate() {
        x = x.add(&GrassElem::generator(n_gens, index(a), grad.clone()));
    }
    x
}

/// Torus factor `int exp(-sum_{a,b} sum_{j<=g} zeta_a^j zeta_b^{j+g} Q_{u_a u_b}) prod_{(k,j)} sum_a zeta_a^j (tau_k)_{u_a}`
/// as a polynomial in x, computed block by block over `j = 1..g`. Parameters `delta_k` (k >= 3)
/// above `caps[k-3]` are dropped.
pub fn torus_factor(q: &QSpec, ortho: &[OrthoVector], l: &OddClasses, g: usize, caps: &[u32]) -> Result<Poly> {
    let r = q.r;
    check_odd(r, g, l)?;
    let n = r - 1;
    let nv = 2 * r - 1;
    let data = torus_data(q, ortho, l, caps);
    let trunc = |p: &Poly| truncate_deltas(p, r, caps);
    // block index of each odd factor, and the sign of grouping them by block (stable within blocks)
    let block_of = |j: usize| if j > g { j - g } else { j };
    let keyed: Vec<(usize, usize)> = l.iter().map(|&(k, j)| (block_of(j), k * 1000 + j)).collect();
    let mut grouped = keyed.clone();
    grouped.sort();
    let positions: Vec<usize> = keyed.iter().map(|key| grouped.iter().position(|x| x == key).unwrap()).collect();
    let mut total = Poly::constant(nv, if sort_sign(&positions) { rint(-1) } else { rint(1) });
    let n_gens = 2 * n;
    // block generators: eta_a^j -> a, eta_a^{j+g} -> n + a
    let order: Vec<usize> = (0..n).flat_map(|a| [a, n + a]).collect();
    for jb in 1..=g {
        let x = block_exponent(n_gens, nv, &data, |a, hi| if hi == 0 { a } else { n + a }, 0, 1).map_coeffs(trunc);
        let mut elem = x.exp_even()?.map_coeffs(trunc);
        for &(k, j) in l.iter().filter(|&&(_, j)| block_of(j) == jb) {
            let off = if j > g { n } else { 0 };
            elem = elem.wedge(&odd_factor(n_gens, nv, &data, k, |a| off + a)).map_coeffs(trunc);
        }
        let top = elem.top_coeff(&order);
        total = trunc(&(&total * &top));
        if total.is_zero() {
            break;
        }
    }
    let qprod: Rat = ortho.iter().map(|o| o.q.clone()).product();
    Ok(total.scale(&(rint(r as i64).pow(g as i32) / qprod.pow(g as i32))))
}

/// Same value computed in the full exterior algebra on `2g(r-1)` generators.
pub fn torus_factor_unfactorized(
    q: &QSpec,
    ortho: &[OrthoVector],
    l: &OddClasses,
    g: usize,
    caps: &[u32],
) -> Result<Poly> {
    let r = q.r;
    check_odd(r, g, l)?;
    let nv = 2 * r - 1;
    let n_gens = 2 * g * (r - 1);
    if n_gens > 64 {
        return Err(Error::OutOfRange("too many odd generators".into()));
    }
    let data = torus_data(q, ortho, l, caps);
    let trunc = |p: &Poly| truncate_deltas(p, r, caps);
    let mut x = GrassElem::zero(n_gens, nv);
    for j in 1..=g {
        x = x.add(&block_exponent(
            n_gens,
            nv,
            &data,
            |a, hi| gen_index(r, a + 1, if hi == 0 { j } else { j + g }),
            0,
            1,
        ));
    }
    let mut elem = x.map_coeffs(trunc).exp_even()?.map_coeffs(trunc);
    for &(k, j) in l {
        elem = elem.wedge(&odd_factor(n_gens, nv, &data, k, |a| gen_index(r, a + 1, j))).map_coeffs(trunc);
    }
    Ok(berezin_integral_scaled(&elem, r, g, ortho))
}

/// Checks that the integral of `exp(sum_{j,a} zeta_a^j zeta_a^{g+j})` equals `r^g`.
pub fn unit_volume(r: usize, g: usize) -> Rat {
    let n_gens = 2 * g * (r - 1);
    let mut x = GrassElem::zero(n_gens, 0);
    for j in 1..=g {
        for a in 1..r {
            let t = GrassElem::generator(n_gens, gen_index(r, a, j), Poly::one(0)).wedge(&GrassElem::generator(
                n_gens,
                gen_index(r, a, j + g),
                Poly::one(0),
            ));
            x = x.add(&t);
        }
    }
    let e = x.exp_even().expect("even element");
    berezin_integral(&e, r, g).as_constant().unwrap_or_else(Rat::zero)
}
