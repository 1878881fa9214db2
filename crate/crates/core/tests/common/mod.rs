#![allow(dead_code)]

use std::collections::BTreeMap;

use ihpair_core::exact::{factorial, rat, rint, Poly, Rat};
use ihpair_core::iber::{iber, IberInput, IberOptions};
use ihpair_core::pairing::{degree_check, evaluate, EvalOptions, PairingSpec, Target};
use ihpair_core::roots::{lattice_reduce, RootBasis, WeightVector};
use ihpair_core::symfun::{complete_homogeneous, truncate_deltas, vandermonde, x_nvars, QSpec};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_weight(rng: &mut StdRng, r: usize) -> WeightVector {
    let den = 2 * r as i64;
    let mut c: Vec<Rat> = (0..r - 1).map(|_| rat(rng.gen_range(-2 * den..=2 * den), den)).collect();
    let s: Rat = c.iter().sum();
    c.push(-s);
    WeightVector::new(c).unwrap()
}

pub fn random_lattice_vector(rng: &mut StdRng, r: usize) -> WeightVector {
    let mut acc = WeightVector::zero(r);
    for i in 0..r - 1 {
        acc = acc.add(&WeightVector::root(r, i, i + 1).scale(&rint(rng.gen_range(-2..=2))));
    }
    acc
}

pub fn random_basis(rng: &mut StdRng, r: usize) -> RootBasis {
    loop {
        let roots: Vec<(usize, usize)> = (0..r - 1)
            .map(|_| {
                let mut p: Vec<usize> = (0..r).collect();
                p.shuffle(rng);
                (p[0], p[1])
            })
            .collect();
        if let Ok(b) = RootBasis::new(r, roots) {
            return b;
        }
    }
}

/// Sum of products of random root differences, with a random delta monomial on each term.
pub fn random_numerator(rng: &mut StdRng, r: usize) -> Poly {
    let nv = x_nvars(r);
    let mut num = Poly::zero(nv);
    for _ in 0..rng.gen_range(1..=2) {
        let mut t = Poly::constant(nv, rint(rng.gen_range(1..=3)));
        for _ in 0..rng.gen_range(0..=3) {
            let i = rng.gen_range(0..r);
            let j = (i + rng.gen_range(1..r)) % r;
            t = &t * &(&Poly::var(nv, i) - &Poly::var(nv, j));
        }
        for k in 2..=r {
            let e = rng.gen_range(0..=1);
            if e > 0 {
                t = &t * &Poly::var(nv, r + k - 2);
            }
        }
        num = &num + &t;
    }
    num
}

pub fn random_poles(rng: &mut StdRng, r: usize) -> BTreeMap<(usize, usize), u32> {
    let mut poles = BTreeMap::new();
    for i in 0..r {
        for j in i + 1..r {
            let e = rng.gen_range(0..=2);
            if e > 0 {
                let key = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
                poles.insert(key, e);
            }
        }
    }
    poles
}

pub fn random_instance(rng: &mut StdRng, r: usize) -> IberInput {
    let caps = (3..=r).map(|_| rng.gen_range(0..=2)).collect();
    IberInput {
        numerator: random_numerator(rng, r),
        poles: random_poles(rng, r),
        weight: random_weight(rng, r),
        basis: random_basis(rng, r),
        q: QSpec::standard(r),
        divide_by_hessian: rng.gen_bool(0.5),
        delta_caps: caps,
    }
}

fn run(input: &IberInput) -> Result<Poly, String> {
    iber(input, &IberOptions::default()).map(|o| o.value).map_err(|e| e.to_string())
}

/// `sum_{k <= n} p^k / k!` with the delta caps applied after every product.
fn truncated_exp(p: &Poly, n: u32, first_delta: usize, caps: &[u32]) -> Poly {
    let mut acc = Poly::one(p.nvars());
    let mut pw = Poly::one(p.nvars());
    for k in 1..=n {
        pw = truncate_deltas(&(&pw * p), first_delta, caps);
        acc = &acc + &pw.scale(&factorial(k).recip());
    }
    acc
}

/// Shifting the weight by a lattice vector `v` equals multiplying the numerator by `exp(Q_v)`.
pub fn shift_identity(rng: &mut StdRng, r: usize) -> Result<(), String> {
    let base = random_instance(rng, r);
    let v = random_lattice_vector(rng, r);
    let shifted = IberInput { weight: base.weight.add(&v), ..base.clone() };
    let lhs = run(&shifted)?;
    // terms of exp(Q_v) of y-degree above the total pole order leave no residue
    let order: u32 = base.poles.values().sum::<u32>() + r as u32;
    let qv = base.q.q.directional(v.coords());
    let e = truncated_exp(&qv, order, r, &base.delta_caps);
    let twisted =
        IberInput { numerator: truncate_deltas(&(&base.numerator * &e), r, &base.delta_caps), ..base.clone() };
    let rhs = run(&twisted)?;
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("r={r} v={:?}: {lhs:?} != {rhs:?}", v.coords()))
    }
}

/// `(sigma . f)(x) = f(sigma x)` with `(sigma x)_i = x_{sigma^{-1}(i)}`.
fn act(p: &Poly, sigma: &[usize]) -> Poly {
    let r = sigma.len();
    let nv = p.nvars();
    let mut inv = vec![0; r];
    for (i, &s) in sigma.iter().enumerate() {
        inv[s] = i;
    }
    let images: Vec<Poly> = (0..nv).map(|i| Poly::var(nv, if i < r { inv[i] } else { i })).collect();
    p.substitute(&images)
}

/// `iBer_{sigma B}[f](sigma a - [sigma c]_{sigma B}) = iBer_B[sigma . f](a - [c]_B)`.
pub fn permutation_identity(rng: &mut StdRng, r: usize) -> Result<(), String> {
    let base = random_instance(rng, r);
    let mut sigma: Vec<usize> = (0..r).collect();
    sigma.shuffle(rng);
    let mut inv = vec![0; r];
    for (i, &s) in sigma.iter().enumerate() {
        inv[s] = i;
    }
    let c = WeightVector::c_vector(r);
    let a = base.weight.clone();
    let sb = base.basis.permute(&sigma).map_err(|e| e.to_string())?;
    let lhs_in = IberInput {
        weight: a.permute(&sigma).sub(&lattice_reduce(&c.permute(&sigma), &sb).0),
        basis: sb,
        ..base.clone()
    };
    let rhs_in = IberInput {
        numerator: act(&base.numerator, &sigma),
        poles: base.poles.iter().map(|(&(i, j), &e)| ((inv[i], inv[j]), e)).collect(),
        weight: a.sub(&lattice_reduce(&c, &base.basis).0),
        ..base.clone()
    };
    let lhs = run(&lhs_in)?;
    let rhs = run(&rhs_in)?;
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("r={r} sigma={sigma:?}: {lhs:?} != {rhs:?}"))
    }
}

/// `h_{m-r+1} V = sum_i (-1)^{i-1} x_i^m V_{without i}`, the cleared form of
/// `h_{m-r+1}(x) = sum_i x_i^m / prod_{j != i} (x_i - x_j)`.
pub fn lemma_identity(r: usize, m: u32) -> Result<(), String> {
    let vars: Vec<usize> = (0..r).collect();
    let v = vandermonde(&vars, r);
    let lhs = if m + 1 >= r as u32 { &complete_homogeneous(m + 1 - r as u32, r, r) * &v } else { Poly::zero(r) };
    let mut rhs = Poly::zero(r);
    for i in 0..r {
        let rest: Vec<usize> = vars.iter().copied().filter(|&j| j != i).collect();
        let t = &Poly::var(r, i).pow(m) * &vandermonde(&rest, r);
        rhs = if i % 2 == 0 { &rhs + &t } else { &rhs - &t };
    }
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("r={r} m={m}"))
    }
}

/// A random monomial whose degree differs from the dimension of the target.
pub fn random_mismatched_spec(rng: &mut StdRng) -> (PairingSpec, Target) {
    loop {
        let r = rng.gen_range(2..=3);
        let target = *[Target::M1, Target::P0, Target::IH].choose(rng).unwrap();
        let mut s = PairingSpec::new(r, 2);
        for k in 2..=r {
            s = s.with_a(k, rng.gen_range(0..=1)).with_f(k, rng.gen_range(0..=if r == 2 { 4 } else { 6 }));
            if rng.gen_bool(0.3) {
                s = s.with_b(k, rng.gen_range(1..=4));
            }
        }
        if target == Target::P0 {
            s = s.with_z(rng.gen_range(0..=2));
        }
        if !degree_check(&s, target) {
            return (s, target);
        }
    }
}

pub fn degree_vanishing(rng: &mut StdRng) -> Result<(), String> {
    let (s, target) = random_mismatched_spec(rng);
    let opts = EvalOptions { keep_hessian: true, force_engine: true, ..Default::default() };
    let v = evaluate(&s, target, &opts).map_err(|e| format!("{target} {s}: {e}"))?.value;
    if v == rint(0) {
        Ok(())
    } else {
        Err(format!("{target} {s}: {v}"))
    }
}
