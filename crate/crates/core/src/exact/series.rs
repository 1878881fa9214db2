use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use smallvec::SmallVec;

use super::bernoulli::bernoulli_table;
use super::laurent::Laurent;
use super::poly::{Exps, Poly};
use super::rat::{factorial, Rat};
use crate::error::{Error, Result};

/// Precision of a component that is known exactly.
pub const UNBOUNDED: i64 = i64::MAX / 8;

type Val = SmallVec<[i64; 8]>;

/// Variable layout of an iterated Laurent series: `n_y` root coordinates ordered
/// `y_1 >> y_2 >> ... >> y_n`, followed by `n_delta` formal parameters. The first parameter
/// is a Laurent variable; the others are nilpotent with the given exponent caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesRing {
    pub n_y: usize,
    pub n_delta: usize,
    pub delta_caps: Vec<u32>,
}

impl SeriesRing {
    pub fn new(n_y: usize, n_delta: usize, delta_caps: Vec<u32>) -> Arc<Self> {
        assert_eq!(delta_caps.len(), n_delta.saturating_sub(1), "one cap per nilpotent parameter");
        Arc::new(SeriesRing { n_y, n_delta, delta_caps })
    }

    pub fn nvars(&self) -> usize {
        self.n_y + self.n_delta
    }

    /// Valuation of a monomial: with `y_k = t_1 ... t_k`, the exponent of `t_j` is `sum_{k >= j} e_k`.
    pub fn valuation(&self, e: &[i32]) -> Val {
        let mut v: Val = SmallVec::from_elem(0, self.n_y);
        let mut acc = 0i64;
        for j in (0..self.n_y).rev() {
            acc += e[j] as i64;
            v[j] = acc;
        }
        v
    }

    fn within_caps(&self, e: &[i32]) -> bool {
        self.delta_caps.iter().enumerate().all(|(k, &cap)| e[self.n_y + 1 + k] <= cap as i32)
    }

    fn nilpotent_degree(&self, e: &[i32]) -> i32 {
        (1..self.n_delta).map(|k| e[self.n_y + k]).sum()
    }
}

fn leq(v: &[i64], w: &[i64]) -> bool {
    v.iter().zip(w).all(|(a, b)| a <= b)
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a >= UNBOUNDED || b >= UNBOUNDED {
        UNBOUNDED
    } else {
        a + b
    }
}

/// Truncated iterated Laurent series in the root coordinates with polynomial dependence on
/// the formal parameters. Terms are keyed by exponents of `(y, delta)`; the window `prec`
/// (in valuation coordinates) is the box in which every coefficient is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ILSeries {
    ring: Arc<SeriesRing>,
    terms: BTreeMap<Exps, Rat>,
    low: Vec<i64>,
    prec: Vec<i64>,
}

impl ILSeries {
    pub fn zero(ring: &Arc<SeriesRing>) -> Self {
        let n = ring.n_y;
        ILSeries { ring: ring.clone(), terms: BTreeMap::new(), low: vec![UNBOUNDED; n], prec: vec![UNBOUNDED; n] }
    }

    /// Exact series from a polynomial over `(y, delta)`; parameters above their caps vanish.
    pub fn from_poly(ring: &Arc<SeriesRing>, p: &Poly) -> Self {
        assert_eq!(p.nvars(), ring.nvars());
        let mut s = Self::zero(ring);
        for (e, c) in p.terms() {
            if ring.within_caps(e) {
                s.terms.insert(e.clone(), c.clone());
            }
        }
        s.low = s.actual_low();
        s
    }

    /// Single monomial `c * y^e delta^d`, exact.
    pub fn monomial(ring: &Arc<SeriesRing>, exps: Exps, c: Rat) -> Self {
        Self::from_poly(ring, &Poly::monomial(ring.nvars(), exps, c))
    }

    pub fn one(ring: &Arc<SeriesRing>) -> Self {
        Self::from_poly(ring, &Poly::one(ring.nvars()))
    }

    pub fn ring(&self) -> &Arc<SeriesRing> {
        &self.ring
    }

    pub fn prec(&self) -> &[i64] {
        &self.prec
    }

    pub fn low(&self) -> &[i64] {
        &self.low
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

    pub fn is_exact(&self) -> bool {
        self.prec.iter().all(|&p| p >= UNBOUNDED)
    }

    /// Componentwise minimum valuation over the stored terms.
    pub fn actual_low(&self) -> Vec<i64> {
        let mut low = vec![UNBOUNDED; self.ring.n_y];
        for e in self.terms.keys() {
            let v = self.ring.valuation(e);
            for (l, x) in low.iter_mut().zip(v.iter()) {
                *l = (*l).min(*x);
            }
        }
        low
    }

    /// Replaces the valuation bound and window (for a series known to vanish on `prec`).
    pub fn with_window(mut self, low: &[i64], prec: &[i64]) -> Self {
        self.low = low.to_vec();
        self.prec = prec.to_vec();
        self.truncated(prec)
    }

    /// Restricts the window to `prec` (componentwise minimum with the current one).
    pub fn truncated(&self, prec: &[i64]) -> Self {
        let prec: Vec<i64> = self.prec.iter().zip(prec).map(|(a, b)| *a.min(b)).collect();
        let ring = &self.ring;
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| leq(&ring.valuation(e), &prec))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        ILSeries { ring: ring.clone(), terms, low: self.low.clone(), prec }
    }

    /// Coefficient of `y^y_exps` as a polynomial in the parameters.
    pub fn coeff_at(&self, y_exps: &[i32]) -> Result<Poly> {
        let v = self.ring.valuation(y_exps);
        if !leq(&v, &self.prec) {
            return Err(Error::TruncationTooSmall(format!("coefficient at {y_exps:?} outside window {:?}", self.prec)));
        }
        Ok(self.coeff_unchecked(y_exps))
    }

    fn coeff_unchecked(&self, y_exps: &[i32]) -> Poly {
        let nd = self.ring.n_delta;
        let mut lo: Exps = y_exps.iter().copied().collect();
        let mut hi = lo.clone();
        lo.extend(std::iter::repeat_n(i32::MIN, nd));
        hi.extend(std::iter::repeat_n(i32::MAX, nd));
        let mut out = Poly::zero(nd);
        for (e, c) in self.terms.range(lo..=hi) {
            out.add_term(e[self.ring.n_y..].iter().copied().collect(), c.clone());
        }
        out
    }

    /// Coefficient of `y^y_exps delta^d_exps`.
    pub fn coeff(&self, y_exps: &[i32], d_exps: &[i32]) -> Result<Rat> {
        Ok(self.coeff_at(y_exps)?.coeff(d_exps))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return ILSeries { terms: BTreeMap::new(), ..self.clone() };
        }
        ILSeries { terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(), ..self.clone() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn add(&self, other: &ILSeries) -> Self {
        let prec: Vec<i64> = self.prec.iter().zip(&other.prec).map(|(a, b)| *a.min(b)).collect();
        let low: Vec<i64> = self.low.iter().zip(&other.low).map(|(a, b)| *a.min(b)).collect();
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        ILSeries { ring: self.ring.clone(), terms, low, prec }.truncated(&vec![UNBOUNDED; self.ring.n_y])
    }

    pub fn sub(&self, other: &ILSeries) -> Self {
        self.add(&other.neg())
    }

    /// Product; the window is the largest box where both factors determine the result.
    pub fn mul(&self, other: &ILSeries) -> Self {
        let ring = &self.ring;
        let n = ring.n_y;
        let low: Vec<i64> = (0..n).map(|c| sat_add(self.low[c], other.low[c])).collect();
        let prec: Vec<i64> =
            (0..n).map(|c| sat_add(self.prec[c], other.low[c]).min(sat_add(other.prec[c], self.low[c]))).collect();
        let a: Vec<(Val, &Exps, &Rat)> = self.terms.iter().map(|(e, c)| (ring.valuation(e), e, c)).collect();
        let b: Vec<(Val, &Exps, &Rat)> = other.terms.iter().map(|(e, c)| (ring.valuation(e), e, c)).collect();
        let mut terms: BTreeMap<Exps, Rat> = BTreeMap::new();
        for (va, ea, ca) in &a {
            for (vb, eb, cb) in &b {
                if !(0..n).all(|c| va[c] + vb[c] <= prec[c]) {
                    continue;
                }
                let e: Exps = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                if !ring.within_caps(&e) {
                    continue;
                }
                *terms.entry(e).or_insert_with(Rat::zero) += *ca * *cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        ILSeries { ring: ring.clone(), terms, low, prec }
    }

    /// Whether repeated multiplication by `self` (no constant term) terminates inside the window.
    fn powers_terminate(&self) -> bool {
        self.terms.keys().all(|e| {
            let v = self.ring.valuation(e);
            self.ring.nilpotent_degree(e) > 0 || v.iter().zip(&self.prec).any(|(x, p)| *x > 0 && *p < UNBOUNDED)
        })
    }

    /// Sum of `coeffs[i] * self^i`, truncated to the window. `self` must have nonnegative valuation.
    fn power_series(&self, coeffs: impl Fn(usize) -> Option<Rat>) -> Self {
        let ring = &self.ring;
        let mut base = self.clone();
        base.low = vec![0; ring.n_y];
        let mut power = ILSeries::one(ring).truncated(&base.prec);
        let mut acc = ILSeries::zero(ring).truncated(&base.prec);
        acc.low = vec![0; ring.n_y];
        let mut i = 0;
        while let Some(c) = coeffs(i) {
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&c));
            power = power.mul(&base);
            i += 1;
        }
        acc.low = vec![0; ring.n_y];
        acc
    }

    /// Leading monomial `c * y^e * delta_2^k`, where `e` attains the componentwise minimum valuation.
    fn leading(&self) -> Result<(Exps, Rat)> {
        let ring = &self.ring;
        if self.terms.is_empty() {
            return Err(Error::NonUnitLeadingTerm("zero series".into()));
        }
        let low = self.actual_low();
        let mut lead: Option<(Exps, Rat)> = None;
        for (e, c) in &self.terms {
            let v = ring.valuation(e);
            if v.as_slice() != low.as_slice() || ring.nilpotent_degree(e) > 0 {
                continue;
            }
            if lead.is_some() {
                return Err(Error::NonUnitLeadingTerm(format!("several leading terms at valuation {low:?}")));
            }
            lead = Some((e.clone(), c.clone()));
        }
        lead.ok_or_else(|| Error::NonUnitLeadingTerm(format!("minimum valuation {low:?} not attained by a unit")))
    }

    /// Multiplicative inverse. The leading term must be a monomial times a rational.
    pub fn invert(&self) -> Result<Self> {
        let ring = &self.ring;
        let n = ring.n_y;
        let (lead_e, lead_c) = self.leading()?;
        let l = ring.valuation(&lead_e);
        let inv_lead: Exps = lead_e.iter().map(|x| -x).collect();
        let unit_prec: Vec<i64> =
            (0..n).map(|c| if self.prec[c] >= UNBOUNDED { UNBOUNDED } else { self.prec[c] - l[c] }).collect();
        let mut h = ILSeries { ring: ring.clone(), terms: BTreeMap::new(), low: vec![0; n], prec: unit_prec.clone() };
        let inv_c = lead_c.recip();
        for (e, c) in &self.terms {
            if *e == lead_e {
                continue;
            }
            let f: Exps = e.iter().zip(&inv_lead).map(|(a, b)| a + b).collect();
            h.terms.insert(f, -(c * &inv_c));
        }
        if !h.powers_terminate() {
            return Err(Error::TruncationTooSmall("inverse needs a bounded window".into()));
        }
        // 1/(1 - h') with h' = -(u - 1)
        let inv_unit = h.power_series(|_| Some(Rat::one()));
        let shift = ILSeries::monomial(ring, inv_lead, inv_c);
        let mut out = inv_unit.mul(&shift);
        out.low = (0..n).map(|c| -l[c]).collect();
        out.prec = (0..n).map(|c| if unit_prec[c] >= UNBOUNDED { UNBOUNDED } else { unit_prec[c] - l[c] }).collect();
        Ok(out.truncated(&vec![UNBOUNDED; n]))
    }

    /// Exponential of a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        let ring = &self.ring;
        for e in self.terms.keys() {
            let v = ring.valuation(e);
            if v.iter().any(|&x| x < 0) {
                return Err(Error::NonNilpotentExp(format!("term with negative valuation {v:?}")));
            }
            if v.iter().all(|&x| x == 0) && ring.nilpotent_degree(e) == 0 {
                return Err(Error::NonNilpotentExp("constant term".into()));
            }
        }
        if !self.powers_terminate() {
            return Err(Error::NonNilpotentExp("exponential needs a bounded window".into()));
        }
        Ok(self.power_series(|i| Some(factorial(i as u32).recip())))
    }

    /// `1/(1 - e^u) = -(1/u) sum_{n <= order} B_n u^n / n!`. The window is shrunk so that the
    /// omitted Bernoulli terms lie outside it.
    pub fn one_minus_exp_inv(&self, order: usize) -> Result<Self> {
        let ring = &self.ring;
        let n = ring.n_y;
        let (lead_e, _) = self.leading()?;
        let l = ring.valuation(&lead_e);
        let inv = self.invert()?;
        let b = bernoulli_table(order + 1);
        let mut base = self.clone();
        base.low = l.to_vec();
        let mut sum = ILSeries::zero(ring);
        sum.low = vec![0; n];
        let mut power = ILSeries::one(ring);
        for (k, bk) in b.iter().enumerate() {
            if !bk.is_zero() {
                sum = sum.add(&power.scale(&(bk / factorial(k as u32))));
            }
            power = power.mul(&base);
        }
        sum.low = vec![0; n];
        let mut out = inv.mul(&sum).neg();
        if let Some(c) = (0..n).find(|&c| l[c] > 0) {
            let cap = order as i64 * l[c] - 1;
            let mut p = out.prec.clone();
            p[c] = p[c].min(cap);
            out = out.truncated(&p);
        } else {
            return Err(Error::NonUnitLeadingTerm("argument has no positive valuation".into()));
        }
        Ok(out)
    }

    /// `g(coef * m)` for the Laurent series `g` produced by `make(max_power)`, where `m` is a
    /// monomial of nonnegative, nonzero valuation. The result is exact on `prec`.
    pub fn compose_monomial(
        ring: &Arc<SeriesRing>,
        make: impl Fn(i32) -> Laurent,
        coef: &Rat,
        mono: &Exps,
        prec: &[i64],
    ) -> Result<Self> {
        let n = ring.n_y;
        let v = ring.valuation(mono);
        if v.iter().any(|&x| x < 0) || v.iter().all(|&x| x == 0) {
            return Err(Error::NonUnitLeadingTerm(format!("composition with monomial of valuation {v:?}")));
        }
        let p_lim = (0..n)
            .filter(|&c| v[c] > 0 && prec[c] < UNBOUNDED)
            .map(|c| prec[c].div_euclid(v[c]))
            .min()
            .ok_or_else(|| Error::TruncationTooSmall("composition needs a bounded window".into()))?
            .max(-1) as i32;
        let g = make(p_lim);
        let mut s = ILSeries::zero(ring);
        s.prec = prec.to_vec();
        s.low = (0..n).map(|c| g.low() as i64 * v[c]).collect();
        for (k, a) in g.terms() {
            if k > p_lim {
                break;
            }
            let exps: Exps = mono.iter().map(|x| x * k).collect();
            if !ring.within_caps(&exps) || !leq(&ring.valuation(&exps), prec) {
                continue;
            }
            let mut ck = Rat::one();
            for _ in 0..k.unsigned_abs() {
                ck *= coef;
            }
            if k < 0 {
                ck = ck.recip();
            }
            s.terms.insert(exps, a * ck);
        }
        Ok(s)
    }

    /// Renders with `y1.. d2..` variable names.
    pub fn display(&self) -> String {
        let names: Vec<String> = (1..=self.ring.n_y)
            .map(|i| format!("y{i}"))
            .chain((2..=self.ring.n_delta + 1).map(|k| format!("d{k}")))
            .collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let mut p = Poly::zero(self.ring.nvars());
        for (e, c) in &self.terms {
            p.add_term(e.clone(), c.clone());
        }
        format!("{} [window {:?}]", p.display_with(&refs), self.prec)
    }
}

/// Iterated residue `Res_{y_1} ... Res_{y_n}`: the coefficient of `(y_1 ... y_n)^-1`.
pub fn iterated_residue(s: &ILSeries) -> Result<Poly> {
    s.coeff_at(&vec![-1; s.ring.n_y])
}

/// `iterated_residue(p * s)` without forming the product.
pub fn residue_of_product(p: &ILSeries, s: &ILSeries) -> Result<Poly> {
    let ring = &s.ring;
    let n = ring.n_y;
    let target = vec![-1i32; n];
    let vt = ring.valuation(&target);
    for c in 0..n {
        let bound = sat_add(p.prec[c], s.low[c]).min(sat_add(s.prec[c], p.low[c]));
        if vt[c] > bound {
            return Err(Error::TruncationTooSmall(format!("residue outside product window (component {c})")));
        }
    }
    let mut out = Poly::zero(ring.n_delta);
    let mut cache: BTreeMap<Exps, Poly> = BTreeMap::new();
    for (e, c) in &p.terms {
        let rest: Exps = target.iter().zip(e.iter()).map(|(t, x)| t - x).collect();
        let sc = cache.entry(rest.clone()).or_insert_with(|| s.coeff_unchecked(&rest));
        for (d, x) in sc.terms() {
            let dd: Exps = e[n..].iter().zip(d.iter()).map(|(a, b)| a + b).collect();
            let mut full: Exps = SmallVec::from_elem(0, n);
            full.extend(dd.iter().copied());
            if ring.within_caps(&full) {
                out.add_term(dd, c * x);
            }
        }
    }
    Ok(out)
}
