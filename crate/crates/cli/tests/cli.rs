use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ihpair_cli::cache::{Cache, CACHE_ENV};
use ihpair_cli::request::Request;
use ihpair_cli::run::{Evaluator, RequestResult};
use ihpair_cli::verify::top_degree_monomials;
use ihpair_core::exact::{rat, rint};
use ihpair_core::pairing::{evaluate, EvalOptions, Target};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn ihpair(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ihpair")).env(CACHE_ENV, cache).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn pair_prints_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = ihpair(dir.path(), &["pair", "--target", "ih", "-r", "2", "-g", "2", "--f", "2=3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
    let o = ihpair(dir.path(), &["pair", "--target", "ih", "-r", "2", "-g", "2", "--f", "2=4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("degree mismatch"));
    let o = ihpair(dir.path(), &["pair", "--target", "ih", "-r", "2", "-g", "2", "--a", "2=1", "--f", "2=1"]);
    assert_eq!(stdout(&o), "-1/2\n");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["pair", "--target", "ih", "-r", "2", "-g", "2", "--f", "2:3"],
        vec!["pair", "--target", "ih", "-r", "2", "-g", "2", "--f", "7=1"],
        vec!["pair", "--target", "ih", "-r", "2", "-g", "2", "--z", "1"],
        vec!["pair", "--target", "ih", "-r", "3", "-g", "2", "--gamma", "1"],
        vec!["--hamiltonian-index", "5", "pair", "--target", "ih", "-r", "2", "-g", "2"],
        vec!["frobnicate"],
    ] {
        assert_eq!(ihpair(dir.path(), &args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn empty_batch() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("empty.json");
    fs::write(&file, "[]").unwrap();
    let o = ihpair(dir.path(), &["--format", "json", "batch", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[]");
}

const THREE: &str = r#"[
  {"target": "ih", "r": 2, "g": 2, "f": {"2": 3}, "label": "f^3"},
  {"target": "ih", "r": 2, "g": 2, "a": {"2": 1}, "f": {"2": 1}, "label": "a f"},
  {"target": "ih", "r": 2, "g": 2, "gamma": 1, "label": "gamma"}
]"#;

#[test]
fn batch_of_rank_two_monomials() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("three.json");
    fs::write(&file, THREE).unwrap();
    let o = ihpair(&dir.path().join("cache"), &["--format", "json", "batch", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let results: Vec<RequestResult> = serde_json::from_str(&stdout(&o)).unwrap();
    let values: Vec<_> = results.iter().map(|r| r.value.clone()).collect();
    assert_eq!(values, vec![rint(1), rat(-1, 2), rint(2)]);
    let labels: Vec<_> = results.iter().map(|r| r.request.label.clone().unwrap()).collect();
    assert_eq!(labels, ["f^3", "a f", "gamma"]);

    let csv = ihpair(&dir.path().join("cache"), &["--format", "csv", "batch", file.to_str().unwrap()]);
    let rows: Vec<String> = stdout(&csv).lines().skip(1).map(|l| l.split(',').nth(5).unwrap().to_string()).collect();
    assert_eq!(rows, ["1", "-1/2", "2"]);
}

#[test]
fn rerun_is_served_from_cache_with_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let file = dir.path().join("three.json");
    fs::write(&file, THREE).unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = ihpair(&cache, &["--format", "json", "batch", file.to_str().unwrap(), "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let stats = stdout(&ihpair(&cache, &["cache", "stats"]));
    assert!(stats.contains("4 entries"), "{stats}");
    assert_eq!(stdout(&ihpair(&cache, &["cache", "clear"])), "removed 4 entries\n");
    assert!(stdout(&ihpair(&cache, &["cache", "stats"])).contains("0 entries"));
}

#[test]
fn schema_violation_names_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(&file, r#"[{"target": "ih", "r": 2, "g": 2}, {"target": "ih", "r": 2, "g": "two", "label": "second"}]"#)
        .unwrap();
    let o = ihpair(dir.path(), &["batch", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("record 1 (second)"));
}

#[test]
fn verify_suites_report_status() {
    let dir = tempfile::tempdir().unwrap();
    let o = ihpair(dir.path(), &["verify", "--suite", "rank2", "-g", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rank2"));
    let o = ihpair(dir.path(), &["verify", "--suite", "basis-independence", "-r", "2", "-g", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("basis-independence"));
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cached = Evaluator::new(EvalOptions::default(), Some(Cache::new(dir.path())));
    let mut rng = StdRng::seed_from_u64(50);
    let mut pool = Vec::new();
    for (r, g) in [(2, 2), (2, 3), (2, 4), (3, 2)] {
        for target in [Target::IH, Target::M1, Target::P0] {
            pool.extend(top_degree_monomials(r, g, target).into_iter().map(|s| (s, target)));
        }
    }
    for _ in 0..50 {
        let (mut spec, target) = pool.choose(&mut rng).unwrap().clone();
        if rng.gen_bool(0.2) {
            spec = spec.with_f(2, 1);
        }
        let mut req = Request::new(target, spec.r, spec.g);
        req.z = spec.z;
        req.a = spec.a.clone();
        req.f = spec.f.clone();
        let fresh = evaluate(&spec, target, &EvalOptions::default()).unwrap().value;
        let first = cached.run(std::slice::from_ref(&req)).unwrap();
        let second = cached.run(std::slice::from_ref(&req)).unwrap();
        assert_eq!(first[0].value, fresh, "{target} {spec}");
        assert_eq!(second, first, "{target} {spec}");
    }
}

fn request_strategy() -> impl Strategy<Value = Request> {
    (
        prop_oneof![Just(Target::IH), Just(Target::M1), Just(Target::P0)],
        2usize..=4,
        2usize..=4,
        0u32..3,
        prop::collection::btree_map(2usize..=4, 0u32..5, 0..3),
        prop::collection::btree_map(2usize..=4, 0u32..5, 0..3),
        prop::collection::vec((2usize..=4, 1usize..=8), 0..3),
        prop::option::of(0usize..3),
        prop::option::of("[a-z ,\"]{0,8}"),
    )
        .prop_map(|(target, r, g, z, a, f, b, gamma, label)| Request { target, r, g, z, a, f, b, gamma, label })
}

proptest! {
    #[test]
    fn json_round_trip(req in request_strategy(), n in any::<i64>(), d in 1i64..1_000_000, ms in any::<u32>()) {
        let res = RequestResult {
            request: req,
            value: rat(n, d),
            degree_ok: true,
            windows: [("m".to_string(), vec![vec![1, -2]])].into_iter().collect(),
            family_index: 1,
            ms: ms as u64,
            engine: "e".into(),
        };
        let text = serde_json::to_string(&res).unwrap();
        let back: RequestResult = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &res);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
