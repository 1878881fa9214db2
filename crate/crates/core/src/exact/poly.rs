use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::rat::{format_rat, rint, Rat};

/// Exponent vector. Negative entries are allowed so that Laurent monomials can be stored.
pub type Exps = SmallVec<[i32; 8]>;

/// Sparse multivariate (Laurent) polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exps, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, rint(1))
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::monomial(nvars, Exps::from_elem(0, nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = Exps::from_elem(0, nvars);
        e[i] = 1;
        Self::monomial(nvars, e, rint(1))
    }

    pub fn monomial(nvars: usize, exps: Exps, c: Rat) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    /// Linear form sum_i coeffs[i] * var_i.
    pub fn linear(nvars: usize, coeffs: &[Rat]) -> Self {
        let mut p = Self::zero(nvars);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = Exps::from_elem(0, nvars);
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Rat)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Exps, Rat)> {
        self.terms.into_iter()
    }

    pub fn add_term(&mut self, exps: Exps, c: Rat) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, exps: &[i32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    /// The constant coefficient if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative in variable `i`.
    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * rint(e[i] as i64));
            }
        }
        out
    }

    /// Directional derivative sum_i v_i d/dvar_i over the first `v.len()` variables.
    pub fn directional(&self, v: &[Rat]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                out = &out + &self.deriv(i).scale(vi);
            }
        }
        out
    }

    /// Keeps the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Exps) -> bool) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Substitutes `images[i]` for variable `i`. All images share one variable set.
    /// Negative exponents are only allowed when the image is a single monomial.
    pub fn substitute(&self, images: &[Poly]) -> Self {
        assert_eq!(images.len(), self.nvars);
        let out_n = images.first().map_or(0, |p| p.nvars);
        let mut cache: Vec<BTreeMap<i32, Poly>> = vec![BTreeMap::new(); self.nvars];
        let mut out = Self::zero(out_n);
        for (e, c) in &self.terms {
            let mut term = Self::constant(out_n, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let power = cache[i].entry(k).or_insert_with(|| images[i].int_pow(k)).clone();
                term = &term * &power;
                if term.is_zero() {
                    break;
                }
            }
            out = &out + &term;
        }
        out
    }

    fn int_pow(&self, k: i32) -> Self {
        if k >= 0 {
            return self.pow(k as u32);
        }
        assert_eq!(self.terms.len(), 1, "negative power of a non-monomial");
        let (e, c) = self.terms.iter().next().unwrap();
        let m = -k;
        let exps: Exps = e.iter().map(|x| x * k).collect();
        let mut coeff = rint(1);
        for _ in 0..m {
            coeff /= c;
        }
        Self::monomial(self.nvars, exps, coeff)
    }

    /// Reindexes variables: variable `i` of `self` becomes variable `map[i]` of the result.
    pub fn embed(&self, out_nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(out_nvars);
        for (e, c) in &self.terms {
            let mut f = Exps::from_elem(0, out_nvars);
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    /// Coefficient of the monomial `exps` in the trailing variables, as a polynomial in the leading ones.
    pub fn coeff_tail(&self, exps: &[i32]) -> Self {
        let head = self.nvars - exps.len();
        let mut out = Self::zero(head);
        for (e, c) in &self.terms {
            if &e[head..] == exps {
                out.add_term(e[..head].iter().copied().collect(), c.clone());
            }
        }
        out
    }

    pub fn total_degree(&self) -> Option<i32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Maps every coefficient; zero results are dropped.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Rat) -> Rat) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Renders with the given variable names.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(i, &k)| {
                    let name = names.get(i).map_or_else(|| format!("v{i}"), |n| n.to_string());
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                s.push_str(&format_rat(&abs));
            } else {
                if !abs.is_one() {
                    s.push_str(&format_rat(&abs));
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exps = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
