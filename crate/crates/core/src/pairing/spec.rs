use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which integral is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Smooth moduli space of degree-one bundles.
    M1,
    /// Parabolic moduli space of degree zero.
    P0,
    /// Intersection pairing of the degree-zero moduli space.
    IH,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::M1 => "m1",
            Target::P0 => "p0",
            Target::IH => "ih",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m1" => Ok(Target::M1),
            "p0" => Ok(Target::P0),
            "ih" => Ok(Target::IH),
            other => Err(Error::InvalidSpec(format!("unknown target {other:?}"))),
        }
    }
}

/// Monomial `z^z prod_k a_k^{a[k]} f_k^{f[k]} prod_{(k,j) in b} b_k^j` in rank `r`, genus `g`.
/// Odd classes multiply in increasing `(k, j)` order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairingSpec {
    pub r: usize,
    pub g: usize,
    #[serde(default)]
    pub z: u32,
    #[serde(default)]
    pub a: BTreeMap<usize, u32>,
    #[serde(default)]
    pub f: BTreeMap<usize, u32>,
    #[serde(default)]
    pub b: BTreeSet<(usize, usize)>,
}

impl PairingSpec {
    pub fn new(r: usize, g: usize) -> Self {
        PairingSpec { r, g, ..Default::default() }
    }

    pub fn with_a(mut self, k: usize, m: u32) -> Self {
        *self.a.entry(k).or_insert(0) += m;
        self
    }

    pub fn with_f(mut self, k: usize, n: u32) -> Self {
        *self.f.entry(k).or_insert(0) += n;
        self
    }

    pub fn with_b(mut self, k: usize, j: usize) -> Self {
        self.b.insert((k, j));
        self
    }

    pub fn with_z(mut self, m: u32) -> Self {
        self.z += m;
        self
    }

    /// Drops zero exponents so that equal monomials compare equal.
    pub fn normalized(&self) -> Self {
        let mut s = self.clone();
        s.a.retain(|_, m| *m > 0);
        s.f.retain(|_, n| *n > 0);
        s
    }

    pub fn validate(&self, target: Target) -> Result<()> {
        let (r, g) = (self.r, self.g);
        if r < 2 {
            return Err(Error::InvalidSpec(format!("rank {r} < 2")));
        }
        if g < 2 {
            return Err(Error::InvalidSpec(format!("genus {g} < 2")));
        }
        for &k in self.a.keys().chain(self.f.keys()) {
            if !(2..=r).contains(&k) {
                return Err(Error::InvalidSpec(format!("class index {k} outside 2..={r}")));
            }
        }
        for &(k, j) in &self.b {
            if !(2..=r).contains(&k) || !(1..=2 * g).contains(&j) {
                return Err(Error::InvalidSpec(format!(
                    "odd class b_{k}^{j} outside k in 2..={r}, j in 1..={}",
                    2 * g
                )));
            }
        }
        if self.z > 0 && target != Target::P0 {
            return Err(Error::InvalidSpec("the class z only exists on the parabolic space".into()));
        }
        Ok(())
    }

    /// Real cohomological degree of the monomial.
    pub fn real_degree(&self) -> u64 {
        let a: u64 = self.a.iter().map(|(&k, &m)| 2 * k as u64 * m as u64).sum();
        let f: u64 = self.f.iter().map(|(&k, &n)| (2 * k as u64 - 2) * n as u64).sum();
        let b: u64 = self.b.iter().map(|&(k, _)| 2 * k as u64 - 1).sum();
        a + f + b + 2 * self.z as u64
    }

    /// Exponents `(n_2, ..., n_r)` of the classes `f_k`.
    pub fn f_exponents(&self) -> Vec<i32> {
        (2..=self.r).map(|k| self.f.get(&k).copied().unwrap_or(0) as i32).collect()
    }

    /// Caps on `delta_3, ..., delta_r`.
    pub fn delta_caps(&self) -> Vec<u32> {
        (3..=self.r).map(|k| self.f.get(&k).copied().unwrap_or(0)).collect()
    }
}

impl fmt::Display for PairingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.z > 0 {
            parts.push(if self.z == 1 { "z".to_string() } else { format!("z^{}", self.z) });
        }
        for (k, m) in &self.a {
            if *m > 0 {
                parts.push(if *m == 1 { format!("a{k}") } else { format!("a{k}^{m}") });
            }
        }
        for (k, n) in &self.f {
            if *n > 0 {
                parts.push(if *n == 1 { format!("f{k}") } else { format!("f{k}^{n}") });
            }
        }
        for (k, j) in &self.b {
            parts.push(format!("b{k}[{j}]"));
        }
        let mono = if parts.is_empty() { "1".to_string() } else { parts.join(" ") };
        write!(f, "r={} g={} <{}>", self.r, self.g, mono)
    }
}

/// Complex dimension of the space carrying the integral.
pub fn dimension(target: Target, r: usize, g: usize) -> u64 {
    let base = (r as u64 * r as u64 - 1) * (g as u64 - 1);
    match target {
        Target::M1 | Target::IH => base,
        Target::P0 => base + r as u64 - 1,
    }
}

/// Whether the monomial has top degree.
pub fn degree_check(spec: &PairingSpec, target: Target) -> bool {
    spec.real_degree() == 2 * dimension(target, spec.r, spec.g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        let s = PairingSpec::new(2, 2).with_f(2, 3);
        assert!(degree_check(&s, Target::IH));
        assert!(degree_check(&s, Target::M1));
        assert!(!degree_check(&s, Target::P0));
        assert!(degree_check(&s.clone().with_z(1), Target::P0));
        let t = PairingSpec::new(3, 2).with_f(2, 4).with_f(3, 2);
        assert_eq!(t.real_degree(), 16);
        assert!(degree_check(&t, Target::IH));
        let u = PairingSpec::new(2, 2).with_b(2, 1).with_b(2, 3);
        assert_eq!(u.real_degree(), 6);
    }

    #[test]
    fn validation() {
        assert!(PairingSpec::new(2, 2).with_z(1).validate(Target::IH).is_err());
        assert!(PairingSpec::new(2, 2).with_f(3, 1).validate(Target::IH).is_err());
        assert!(PairingSpec::new(2, 2).with_b(2, 5).validate(Target::IH).is_err());
        assert!(PairingSpec::new(2, 1).validate(Target::IH).is_err());
        assert!(PairingSpec::new(3, 2).with_a(3, 1).validate(Target::M1).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let s = PairingSpec::new(3, 2).with_a(2, 1).with_f(3, 2).with_b(2, 1).with_b(3, 3);
        let j = serde_json::to_string(&s).unwrap();
        let back: PairingSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        assert_eq!(serde_json::to_string(&back).unwrap(), j);
    }
}
