//! Verification suites: engine results against closed forms and structural identities.

use std::collections::BTreeMap;
use std::time::Instant;

use clap::ValueEnum;
use ihpair_core::exact::{factorial, rat, rint, Poly, Rat};
use ihpair_core::grassmann::{torus_factor, torus_factor_unfactorized, unit_volume, OddClasses};
use ihpair_core::iber::{iber, IberInput, IberOptions};
use ihpair_core::pairing::{
    degree_check, dimension, evaluate, evaluate_combination, fundamental_class_check, gamma_power_combination,
    kiem_pairing, rank2_one_variable, rank2_residue_form, EvalOptions, PairingSpec, Target,
};
use ihpair_core::roots::{lattice_reduce, orthonormal_basis, RootBasis, WeightVector};
use ihpair_core::symfun::{complete_homogeneous, truncate_deltas, vandermonde, x_nvars, QSpec};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Rank2,
    Kiem,
    Fundamental,
    Berezin,
    BasisIndependence,
    Identities,
    Lemma,
    DegreeVanishing,
    Stability,
    All,
}

const ALL: [Suite; 9] = [
    Suite::Rank2,
    Suite::Kiem,
    Suite::Fundamental,
    Suite::Berezin,
    Suite::BasisIndependence,
    Suite::Identities,
    Suite::Lemma,
    Suite::DegreeVanishing,
    Suite::Stability,
];

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub failures: Vec<String>,
    pub ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn error(&mut self, what: String) {
        self.cases += 1;
        self.failures.push(what);
    }

    fn compare(&mut self, got: Result<Rat, String>, want: Result<Rat, String>, what: impl Fn() -> String) {
        match (got, want) {
            (Ok(a), Ok(b)) => self.check(a == b, || format!("{}: {a} != {b}", what())),
            (Err(e), _) | (_, Err(e)) => self.error(format!("{}: {e}", what())),
        }
    }
}

/// Runs `suite` (every suite for `All`); `r` and `g` narrow the default ranges.
pub fn run(suite: Suite, r: Option<usize>, g: Option<usize>, opts: &EvalOptions) -> Vec<SuiteReport> {
    let suites: Vec<Suite> = if suite == Suite::All { ALL.to_vec() } else { vec![suite] };
    suites
        .into_iter()
        .map(|s| {
            let start = Instant::now();
            let mut t = Tally::default();
            match s {
                Suite::Rank2 => rank2(&mut t, g, opts),
                Suite::Kiem => kiem(&mut t, g, opts),
                Suite::Fundamental => fundamental(&mut t, g, opts),
                Suite::Berezin => berezin(&mut t, r, g),
                Suite::BasisIndependence => basis_independence(&mut t, r, g, opts),
                Suite::Identities => identities(&mut t, r),
                Suite::Lemma => lemma(&mut t, r),
                Suite::DegreeVanishing => degree_vanishing(&mut t, opts),
                Suite::Stability => stability(&mut t, r, g, opts),
                Suite::All => unreachable!("expanded above"),
            }
            SuiteReport { suite: s, cases: t.cases, failures: t.failures, ms: start.elapsed().as_millis() }
        })
        .collect()
}

fn genera(g: Option<usize>, default: &[usize]) -> Vec<usize> {
    g.map(|g| vec![g]).unwrap_or_else(|| default.to_vec())
}

fn value(s: &PairingSpec, t: Target, opts: &EvalOptions) -> Result<Rat, String> {
    evaluate(s, t, opts).map(|r| r.value).map_err(|e| e.to_string())
}

fn rank2(t: &mut Tally, g: Option<usize>, opts: &EvalOptions) {
    for g in genera(g, &[2, 3, 4]) {
        let top = 3 * g - 3;
        for p in 0..=top / 3 {
            for m in 0..=(top - 3 * p) / 2 {
                let (m, n) = (m as u32, (top - 3 * p - 2 * m) as u32);
                let combo = gamma_power_combination(g, m, n, p);
                for (_, s) in &combo {
                    t.compare(
                        value(s, Target::IH, opts),
                        rank2_one_variable(s, Target::IH).map_err(|e| e.to_string()),
                        || format!("one-variable path {s}"),
                    );
                }
                t.compare(
                    evaluate_combination(&combo, Target::IH, opts).map_err(|e| e.to_string()),
                    rank2_residue_form(g, m, n, p).map_err(|e| e.to_string()),
                    || format!("g={g} m={m} n={n} p={p}"),
                );
            }
        }
    }
}

fn kiem(t: &mut Tally, g: Option<usize>, opts: &EvalOptions) {
    for g in genera(g, &[2, 3, 4]) {
        for m in 0..(g as u32).saturating_sub(1) {
            let n = 3 * g as u32 - 3 - 2 * m;
            let scaled = value(&PairingSpec::new(2, g).with_a(2, m).with_f(2, n), Target::IH, opts)
                .map(|v| rint(-4).pow(m as i32) * rint(2).pow(n as i32) * v);
            t.compare(scaled, kiem_pairing(g, m, n).map_err(|e| e.to_string()), || format!("g={g} m={m} n={n}"));
        }
    }
}

fn fundamental(t: &mut Tally, g: Option<usize>, opts: &EvalOptions) {
    for g in genera(g, &[2, 3]) {
        t.compare(fundamental_class_check(g, opts).map_err(|e| e.to_string()), Ok(rint(1)), || format!("g={g}"));
    }
}

fn berezin(t: &mut Tally, r: Option<usize>, g: Option<usize>) {
    let ranks = r.map(|r| vec![r]).unwrap_or_else(|| vec![2, 3, 4]);
    let gs = genera(g, &[1, 2, 3]);
    for &r in &ranks {
        for &g in &gs {
            let v = unit_volume(r, g);
            t.check(v == rint(r as i64).pow(g as i32), || format!("r={r} g={g}: {v}"));
        }
    }
    for &r in ranks.iter().filter(|&&r| r <= 3) {
        for &g in gs.iter().filter(|&&g| g <= 2) {
            let q = QSpec::standard(r);
            let o = orthonormal_basis(r);
            let caps = vec![2; r - 2];
            let all: Vec<(usize, usize)> = (2..=r).flat_map(|k| (1..=2 * g).map(move |j| (k, j))).collect();
            for mask in 0u32..1 << all.len() {
                let l: OddClasses =
                    all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| *c).collect();
                match (torus_factor(&q, &o, &l, g, &caps), torus_factor_unfactorized(&q, &o, &l, g, &caps)) {
                    (Ok(a), Ok(b)) => t.check(a == b, || format!("r={r} g={g} {l:?}")),
                    (Err(e), _) | (_, Err(e)) => t.error(format!("r={r} g={g} {l:?}: {e}")),
                }
            }
        }
    }
}

/// Monomials in `z`, `a_k`, `f_k` of top degree for `target`, in a fixed order.
pub fn top_degree_monomials(r: usize, g: usize, target: Target) -> Vec<PairingSpec> {
    // (class, k, complex degree)
    let mut classes: Vec<(char, usize, u64)> = Vec::new();
    if target == Target::P0 {
        classes.push(('z', 1, 1));
    }
    for k in 2..=r {
        classes.push(('a', k, k as u64));
        classes.push(('f', k, k as u64 - 1));
    }
    let mut out = Vec::new();
    fn rec(classes: &[(char, usize, u64)], left: u64, acc: PairingSpec, out: &mut Vec<PairingSpec>) {
        let Some((&(c, k, d), rest)) = classes.split_first() else {
            if left == 0 {
                out.push(acc.normalized());
            }
            return;
        };
        for e in 0..=left / d {
            let s = match c {
                'z' => acc.clone().with_z(e as u32),
                'a' => acc.clone().with_a(k, e as u32),
                _ => acc.clone().with_f(k, e as u32),
            };
            rec(rest, left - e * d, s, out);
        }
    }
    rec(&classes, dimension(target, r, g), PairingSpec::new(r, g), &mut out);
    out
}

fn basis_independence(t: &mut Tally, r: Option<usize>, g: Option<usize>, opts: &EvalOptions) {
    let ranks = r.map(|r| vec![r]).unwrap_or_else(|| vec![2, 3]);
    for r in ranks {
        for g in genera(g, &[2]) {
            for target in [Target::IH, Target::M1, Target::P0] {
                for s in top_degree_monomials(r, g, target).into_iter().take(12) {
                    let vals: Result<Vec<Rat>, String> = (1..=r)
                        .map(|m| value(&s, target, &EvalOptions { family_index: Some(m), ..opts.clone() }))
                        .collect();
                    match vals {
                        Ok(v) => t.check(v.iter().all(|x| *x == v[0]), || format!("{target} {s}: {v:?}")),
                        Err(e) => t.error(format!("{target} {s}: {e}")),
                    }
                }
            }
        }
    }
}

fn random_instance(rng: &mut StdRng, r: usize) -> IberInput {
    let nv = x_nvars(r);
    let mut numerator = Poly::zero(nv);
    for _ in 0..rng.gen_range(1..=2) {
        let mut term = Poly::constant(nv, rint(rng.gen_range(1..=3)));
        for _ in 0..rng.gen_range(0..=3) {
            let i = rng.gen_range(0..r);
            let j = (i + rng.gen_range(1..r)) % r;
            term = &term * &(&Poly::var(nv, i) - &Poly::var(nv, j));
        }
        for k in 2..=r {
            if rng.gen_bool(0.5) {
                term = &term * &Poly::var(nv, r + k - 2);
            }
        }
        numerator = &numerator + &term;
    }
    let mut poles = BTreeMap::new();
    for i in 0..r {
        for j in i + 1..r {
            let e = rng.gen_range(0..=2);
            if e > 0 {
                poles.insert(if rng.gen_bool(0.5) { (i, j) } else { (j, i) }, e);
            }
        }
    }
    let den = 2 * r as i64;
    let mut w: Vec<Rat> = (0..r - 1).map(|_| rat(rng.gen_range(-2 * den..=2 * den), den)).collect();
    w.push(-w.iter().sum::<Rat>());
    let basis = loop {
        let roots = (0..r - 1)
            .map(|_| {
                let mut p: Vec<usize> = (0..r).collect();
                p.shuffle(rng);
                (p[0], p[1])
            })
            .collect();
        if let Ok(b) = RootBasis::new(r, roots) {
            break b;
        }
    };
    IberInput {
        numerator,
        poles,
        weight: WeightVector::new(w).expect("coordinates sum to zero"),
        basis,
        q: QSpec::standard(r),
        divide_by_hessian: rng.gen_bool(0.5),
        delta_caps: (3..=r).map(|_| rng.gen_range(0..=2)).collect(),
    }
}

fn identities(t: &mut Tally, r: Option<usize>) {
    let ranks = r.map(|r| vec![r]).unwrap_or_else(|| vec![2, 3]);
    let mut rng = StdRng::seed_from_u64(7);
    let run = |input: &IberInput| iber(input, &IberOptions::default()).map(|o| o.value).map_err(|e| e.to_string());
    for &r in &ranks {
        for _ in 0..20 {
            let base = random_instance(&mut rng, r);
            let mut v = WeightVector::zero(r);
            for i in 0..r - 1 {
                v = v.add(&WeightVector::root(r, i, i + 1).scale(&rint(rng.gen_range(-2..=2))));
            }
            let shifted = IberInput { weight: base.weight.add(&v), ..base.clone() };
            let order = base.poles.values().sum::<u32>() + r as u32;
            let qv = base.q.q.directional(v.coords());
            let mut e = Poly::one(qv.nvars());
            let mut pw = Poly::one(qv.nvars());
            for k in 1..=order {
                pw = truncate_deltas(&(&pw * &qv), r, &base.delta_caps);
                e = &e + &pw.scale(&factorial(k).recip());
            }
            let twisted =
                IberInput { numerator: truncate_deltas(&(&base.numerator * &e), r, &base.delta_caps), ..base.clone() };
            match (run(&shifted), run(&twisted)) {
                (Ok(a), Ok(b)) => t.check(a == b, || format!("shift r={r} v={:?}", v.coords())),
                (Err(e), _) | (_, Err(e)) => t.error(format!("shift r={r}: {e}")),
            }
        }
        for _ in 0..20 {
            let base = random_instance(&mut rng, r);
            let mut sigma: Vec<usize> = (0..r).collect();
            sigma.shuffle(&mut rng);
            let mut inv = vec![0; r];
            for (i, &s) in sigma.iter().enumerate() {
                inv[s] = i;
            }
            let c = WeightVector::c_vector(r);
            let Ok(sb) = base.basis.permute(&sigma) else {
                t.error(format!("permuted basis r={r} {sigma:?}"));
                continue;
            };
            let nv = base.numerator.nvars();
            let images: Vec<Poly> = (0..nv).map(|i| Poly::var(nv, if i < r { inv[i] } else { i })).collect();
            let lhs = IberInput {
                weight: base.weight.permute(&sigma).sub(&lattice_reduce(&c.permute(&sigma), &sb).0),
                basis: sb,
                ..base.clone()
            };
            let rhs = IberInput {
                numerator: base.numerator.substitute(&images),
                poles: base.poles.iter().map(|(&(i, j), &e)| ((inv[i], inv[j]), e)).collect(),
                weight: base.weight.sub(&lattice_reduce(&c, &base.basis).0),
                ..base.clone()
            };
            match (run(&lhs), run(&rhs)) {
                (Ok(a), Ok(b)) => t.check(a == b, || format!("permutation r={r} sigma={sigma:?}")),
                (Err(e), _) | (_, Err(e)) => t.error(format!("permutation r={r}: {e}")),
            }
        }
    }
}

fn lemma(t: &mut Tally, r: Option<usize>) {
    let ranks = r.map(|r| vec![r]).unwrap_or_else(|| vec![2, 3, 4]);
    for r in ranks {
        let vars: Vec<usize> = (0..r).collect();
        let v = vandermonde(&vars, r);
        for m in 0..=r as u32 + 3 {
            let lhs =
                if m + 1 >= r as u32 { &complete_homogeneous(m + 1 - r as u32, r, r) * &v } else { Poly::zero(r) };
            let mut rhs = Poly::zero(r);
            for i in 0..r {
                let rest: Vec<usize> = vars.iter().copied().filter(|&j| j != i).collect();
                let term = &Poly::var(r, i).pow(m) * &vandermonde(&rest, r);
                rhs = if i % 2 == 0 { &rhs + &term } else { &rhs - &term };
            }
            t.check(lhs == rhs, || format!("r={r} m={m}"));
        }
    }
}

fn degree_vanishing(t: &mut Tally, opts: &EvalOptions) {
    let mut rng = StdRng::seed_from_u64(5);
    let forced = EvalOptions { keep_hessian: true, force_engine: true, ..opts.clone() };
    let mut done = 0;
    while done < 20 {
        let r = rng.gen_range(2..=3);
        let target = *[Target::M1, Target::P0, Target::IH].choose(&mut rng).expect("nonempty");
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
        if degree_check(&s, target) {
            continue;
        }
        done += 1;
        match value(&s, target, &forced) {
            Ok(v) => t.check(v == rint(0), || format!("{target} {s}: {v}")),
            Err(e) => t.error(format!("{target} {s}: {e}")),
        }
    }
}

fn stability(t: &mut Tally, r: Option<usize>, g: Option<usize>, opts: &EvalOptions) {
    let (r, g) = (r.unwrap_or(3), g.unwrap_or(2));
    let spec = if (r, g) == (3, 2) {
        PairingSpec::new(3, 2).with_a(2, 1).with_f(2, 4).with_f(3, 1)
    } else {
        match top_degree_monomials(r, g, Target::IH).into_iter().last() {
            Some(s) => s,
            None => return t.error(format!("no top-degree monomial for r={r} g={g}")),
        }
    };
    let base = value(&spec, Target::IH, opts);
    t.compare(
        value(&spec, Target::IH, &EvalOptions { window_bump: opts.window_bump + 2, ..opts.clone() }),
        base.clone(),
        || format!("{spec} widened"),
    );
    for m in 1..=r {
        t.compare(
            value(&spec, Target::IH, &EvalOptions { family_index: Some(m), ..opts.clone() }),
            base.clone(),
            || format!("{spec} family {m}"),
        );
    }
}

pub fn render_table(reports: &[SuiteReport]) -> String {
    let mut out = format!("{:<20} {:>6} {:>6} {:>9}  status\n", "suite", "cases", "failed", "ms");
    for rep in reports {
        let name = rep.suite.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        let status = if rep.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{name:<20} {:>6} {:>6} {:>9}  {status}\n", rep.cases, rep.failures.len(), rep.ms));
        for f in &rep.failures {
            out.push_str(&format!("    {f}\n"));
        }
    }
    out
}
