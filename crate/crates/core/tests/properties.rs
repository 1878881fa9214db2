use ihpair_core::exact::{bernoulli, rat, rint, Exps, ILSeries, Laurent, Poly, Rat, SeriesRing};
use ihpair_core::pairing::{evaluate, EvalOptions, PairingResult, PairingSpec, Target};
use ihpair_core::roots::{basis_from_permutation, lattice_reduce, WeightVector};
use ihpair_core::symfun::{tau_poly, x_nvars, QSpec};
use num_traits::{One, Zero};
use proptest::prelude::*;
use smallvec::smallvec;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-5i64..=5, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn poly3() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0i32..3, 0i32..3, 0i32..3), small_rat()), 0..5).prop_map(|terms| {
        let mut p = Poly::zero(3);
        for ((a, b, c), k) in terms {
            p.add_term(smallvec![a, b, c], k);
        }
        p
    })
}

fn permutation(r: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..r).collect::<Vec<usize>>()).prop_shuffle()
}

/// Series in `y_1, y_2, delta` with a unique leading monomial and positive-valuation corrections.
fn unit_series() -> impl Strategy<Value = (Exps, Rat, Vec<(Exps, Rat)>)> {
    let lead = ((-2i32..=2, -2i32..=2, -1i32..=1), small_rat().prop_filter("nonzero", |c| !c.is_zero()));
    let tail = prop::collection::vec(((0i32..=2, 0i32..=2, -1i32..=1), small_rat()), 0..4);
    (lead, tail).prop_map(|((l, c), tail)| {
        let lead: Exps = smallvec![l.0, l.1, l.2];
        let tail = tail
            .into_iter()
            .filter(|((d2, s, _), _)| *d2 + *s > 0)
            .map(|((d2, s, dd), k)| {
                // shift of valuation (s, d2), nonnegative and nonzero
                let d1 = s - d2;
                (smallvec![l.0 + d1, l.1 + d2, l.2 + dd], k)
            })
            .collect();
        (lead, c, tail)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn poly_ring_laws(a in poly3(), b in poly3(), c in poly3()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn product_rule(a in poly3(), b in poly3(), i in 0usize..3) {
        prop_assert_eq!((&a * &b).deriv(i), &(&a.deriv(i) * &b) + &(&a * &b.deriv(i)));
    }

    #[test]
    fn series_inverse((lead, c, tail) in unit_series(), w1 in 1i64..5, w2 in 1i64..5) {
        let ring = SeriesRing::new(2, 1, vec![]);
        let mut p = Poly::monomial(3, lead.clone(), c);
        for (e, k) in tail {
            p.add_term(e, k);
        }
        // window above the lead valuation so the lead survives truncation
        let v = ring.valuation(&lead);
        let s = ILSeries::from_poly(&ring, &p).truncated(&[v[0] + w1, v[1] + w2]);
        let inv = s.invert().unwrap();
        let prod = inv.mul(&s);
        let window = prod.prec().to_vec();
        prop_assert!(window.iter().all(|&x| x >= 0));
        prop_assert_eq!(prod.truncated(&window), ILSeries::one(&ring).truncated(&window));
    }

    #[test]
    fn series_exp_is_a_homomorphism(a in prop::collection::vec(((0i32..=2, 0i32..=2), small_rat()), 1..4),
                                    b in prop::collection::vec(((0i32..=2, 0i32..=2), small_rat()), 1..4)) {
        let ring = SeriesRing::new(2, 2, vec![2]);
        // every term carries delta_3 or a positive y valuation
        let build = |terms: &[((i32, i32), Rat)]| {
            let mut p = Poly::zero(4);
            for ((u, v), k) in terms {
                let d3 = if u + v == 0 { 1 } else { 0 };
                p.add_term(smallvec![*u, *v, 0, d3], k.clone());
            }
            ILSeries::from_poly(&ring, &p).truncated(&[5, 5])
        };
        let (sa, sb) = (build(&a), build(&b));
        let lhs = sa.add(&sb).exp().unwrap();
        let rhs = sa.exp().unwrap().mul(&sb.exp().unwrap());
        let window: Vec<i64> = lhs.prec().iter().zip(rhs.prec()).map(|(x, y)| *x.min(y)).collect();
        prop_assert_eq!(lhs.truncated(&window), rhs.truncated(&window));
    }

    #[test]
    fn laurent_bernoulli_inverse(w in small_rat().prop_filter("nonzero", |c| !c.is_zero()), prec in 2i32..10) {
        // f(w u) (1 - e^(w u)) = 1 with f(u) = 1/(1 - e^u)
        let f = Laurent::one_minus_exp_inv(prec);
        let f_w = Laurent::new(-1, (-1..=prec).map(|k| f.coeff(k) * w.pow(k)).collect());
        let e = Laurent::exp_linear(&w, prec + 2);
        let one_minus = Laurent::new(1, (1..=prec + 2).map(|k| -e.coeff(k)).collect());
        let prod = f_w.mul(&one_minus);
        prop_assert!(prod.prec() >= prec);
        for k in 0..=prod.prec() {
            prop_assert_eq!(prod.coeff(k), if k == 0 { Rat::one() } else { Rat::zero() });
        }
    }

    #[test]
    fn lattice_reduction(sigma in permutation(4), num in prop::collection::vec(-12i64..=12, 3)) {
        let basis = basis_from_permutation(&sigma).unwrap();
        let mut coords: Vec<Rat> = num.iter().map(|&n| rat(n, 4)).collect();
        coords.push(-coords.iter().sum::<Rat>());
        let a = WeightVector::new(coords).unwrap();
        let (int, frac) = lattice_reduce(&a, &basis);
        prop_assert_eq!(int.add(&frac), a);
        prop_assert!(basis.coords(&int).iter().all(|c| c.is_integer()));
        prop_assert!(basis.coords(&frac).iter().all(|c| *c >= Rat::zero() && *c < Rat::one()));
    }

    #[test]
    fn q_is_symmetric(sigma in permutation(4)) {
        let q = QSpec::standard(4);
        let nv = x_nvars(4);
        let images: Vec<Poly> = (0..nv).map(|i| Poly::var(nv, if i < 4 { sigma[i] } else { i })).collect();
        prop_assert_eq!(q.q.substitute(&images), q.q.clone());
    }

    #[test]
    fn basis_change_round_trip(sigma in permutation(3), k in 2usize..=3) {
        // to_y followed by y_k = <beta_k, x> recovers the polynomial
        let basis = basis_from_permutation(&sigma).unwrap();
        let t = tau_poly(k, 3);
        let ty = basis.to_y(&t).unwrap();
        let nv = x_nvars(3);
        let mut images: Vec<Poly> = (0..basis.len())
            .map(|j| Poly::linear(nv, &basis.root(j).coords().iter().cloned().chain(std::iter::repeat_n(Rat::zero(), nv - 3)).collect::<Vec<_>>()))
            .collect();
        images.extend((3..nv).map(|i| Poly::var(nv, i)));
        prop_assert_eq!(ty.substitute(&images), t);
    }

    #[test]
    fn spec_json_round_trip(r in 2usize..=4, g in 2usize..=4, z in 0u32..3,
                            a in prop::collection::btree_map(2usize..=4, 0u32..4, 0..3),
                            f in prop::collection::btree_map(2usize..=4, 0u32..6, 0..3),
                            b in prop::collection::btree_set((2usize..=4, 1usize..=8), 0..3)) {
        let s = PairingSpec { r, g, z, a, f, b };
        let text = serde_json::to_string(&s).unwrap();
        let back: PairingSpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn result_json_round_trip(n in -1_000_000_000_000i64..1_000_000_000_000, d in 1i64..1_000_000, big in 0u32..40) {
        let value = rat(n, d) * Rat::from_integer(num_bigint::BigInt::from(10).pow(big));
        let res = PairingResult {
            target: Target::IH,
            spec: PairingSpec::new(2, 2).with_f(2, 3),
            value,
            degree_ok: true,
            family_index: 2,
            windows: vec![vec![1, 2]],
            elapsed_ms: 0,
            engine: "e".into(),
        };
        let text = serde_json::to_string(&res).unwrap();
        let back: PairingResult = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &res);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

#[test]
fn bernoulli_recurrence() {
    // sum_{k < n} C(n, k) B_k = 0 for n >= 2
    for n in 2..20u32 {
        let mut binom = Rat::one();
        let mut acc = Rat::zero();
        for k in 0..n {
            acc += &binom * bernoulli(k as usize);
            binom = binom * rint((n - k) as i64) / rint(k as i64 + 1);
        }
        assert!(acc.is_zero(), "n = {n}");
    }
}

#[test]
fn odd_class_relabelling() {
    // only the symplectic pairing of the odd indices matters
    let g = 3;
    let base = |j: usize, k: usize| PairingSpec::new(2, g).with_b(2, j).with_b(2, k).with_f(2, 3);
    let v = |s: &PairingSpec| evaluate(s, Target::IH, &EvalOptions::default()).unwrap().value;
    let reference = v(&base(1, 1 + g));
    assert!(!reference.is_zero());
    for j in 2..=g {
        assert_eq!(v(&base(j, j + g)), reference);
    }
    assert!(v(&base(1, 2)).is_zero());
    assert!(v(&base(1, 2 + g)).is_zero());
}

#[test]
fn spec_json_accepts_missing_fields() {
    let s: PairingSpec = serde_json::from_str(r#"{"r": 2, "g": 3}"#).unwrap();
    assert_eq!(s, PairingSpec::new(2, 3));
}
