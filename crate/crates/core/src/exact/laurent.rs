use num_traits::Zero;

use super::bernoulli::bernoulli_table;
use super::rat::{factorial, rint, Rat};

/// Truncated univariate Laurent series `sum_k coeffs[k] u^(low + k)`, known through `u^prec()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    low: i32,
    coeffs: Vec<Rat>,
}

impl Laurent {
    pub fn new(low: i32, coeffs: Vec<Rat>) -> Self {
        Laurent { low, coeffs }
    }

    /// `c u^k`, known through `u^prec`.
    pub fn monomial(k: i32, c: Rat, prec: i32) -> Self {
        if prec < k {
            return Laurent { low: prec + 1, coeffs: Vec::new() };
        }
        let mut coeffs = vec![Rat::zero(); (prec - k + 1) as usize];
        coeffs[0] = c;
        Laurent { low: k, coeffs }
    }

    pub fn low(&self) -> i32 {
        self.low
    }

    /// Highest exponent whose coefficient is known.
    pub fn prec(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, k: i32) -> Rat {
        assert!(k <= self.prec(), "coefficient u^{k} beyond precision {}", self.prec());
        if k < self.low {
            return Rat::zero();
        }
        self.coeffs[(k - self.low) as usize].clone()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rat)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.low + i as i32, c))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Laurent { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, other: &Laurent) -> Self {
        let low = self.low + other.low;
        let prec = (self.prec() + other.low).min(other.prec() + self.low);
        if prec < low {
            return Laurent { low: prec + 1, coeffs: Vec::new() };
        }
        let mut coeffs = vec![Rat::zero(); (prec - low + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= coeffs.len() {
                    break;
                }
                coeffs[k] += a * b;
            }
        }
        Laurent { low, coeffs }
    }

    pub fn deriv(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * rint((self.low + i as i32) as i64)).collect();
        Laurent { low: self.low - 1, coeffs }
    }

    /// `1/(1 - e^u) = -sum_n B_n u^(n-1)/n!`, known through `u^prec`.
    pub fn one_minus_exp_inv(prec: i32) -> Self {
        let len = (prec + 2).max(0) as usize;
        let b = bernoulli_table(len);
        let coeffs = b.iter().enumerate().map(|(n, bn)| -bn / factorial(n as u32)).collect();
        Laurent { low: -1, coeffs }
    }

    /// `e^(w u)`, known through `u^prec`.
    pub fn exp_linear(w: &Rat, prec: i32) -> Self {
        let mut coeffs = Vec::new();
        let mut term = rint(1);
        for n in 0..=prec.max(-1) {
            coeffs.push(term.clone());
            term = term * w / rint(n as i64 + 1);
        }
        Laurent { low: 0, coeffs }
    }
}
