use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_congruence-lab"));
    c.env_remove("CONGRUENCE_LAB_CACHE");
    c
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn")
}

fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn classes_single_trace() {
    let o = run(&["classes", "--trace", "3", "--format", "json"]);
    assert!(o.status.success());
    let rows = json_lines(&o);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["mu0"], 1);
    let classes = rows[0]["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 1);
    let rep: Vec<i64> = serde_json::from_value(classes[0]["representative"].clone()).unwrap();
    assert_eq!(rep[0] + rep[3], 3);
    assert_eq!(rep[0] * rep[3] - rep[1] * rep[2], 1);
}

#[test]
fn classes_range_csv_and_warm_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("mu0.csv");
    let args = ["--cache", cache.to_str().unwrap(), "classes", "--range", "3..10", "--format", "csv"];
    let cold = run_in(dir.path(), &args);
    assert!(cold.status.success());
    let text = stdout(&cold);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trace,mu0,discriminant,n_cycles");
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[1], "3,1,5,1");
    assert!(cache.exists());
    let warm = run_in(dir.path(), &args);
    assert_eq!(warm.stdout, cold.stdout);
    assert!(String::from_utf8_lossy(&warm.stderr).contains("loaded 8 rows"));
}

#[test]
fn corrupt_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("mu0.csv");
    std::fs::write(&cache, "trace,mu0,discriminant,n_cycles\n3,99,5,1\n").unwrap();
    let o = run_in(dir.path(), &["--cache", cache.to_str().unwrap(), "classes", "--range", "3..5"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("rejected"));
    assert!(stdout(&o).contains("\n3,1,5,1\n"));
    let rewritten = std::fs::read_to_string(&cache).unwrap();
    assert!(rewritten.starts_with("trace,mu0,discriminant,n_cycles\n3,1,5,1\n"));
}

#[test]
fn cache_env_var_sets_path() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("from_env.csv");
    let o = bin()
        .current_dir(dir.path())
        .env("CONGRUENCE_LAB_CACHE", &cache)
        .args(["classes", "--trace", "5"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(cache.exists());
}

#[test]
fn bounds_rows_and_formats() {
    let csv = run(&["--no-cache", "bounds", "--n", "5..20", "--epsilon", "0.5"]);
    assert!(csv.status.success());
    let text = stdout(&csv);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,setting,mu0,index,area,sys_lower,kiss_lower,epsilon,verdict_kiss,verdict_sys"
    );
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r[9] == "true"));

    let json = run(&["--no-cache", "bounds", "--n", "5..20", "--epsilon", "0.5", "--format", "json"]);
    let objs = json_lines(&json);
    assert_eq!(objs.len(), 16);
    for (row, obj) in rows.iter().zip(&objs) {
        let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
        assert_eq!(keys[0], "N");
        assert_eq!(row[0].parse::<u64>().unwrap(), obj["N"].as_u64().unwrap());
        assert_eq!(row[2].parse::<u64>().unwrap(), obj["mu0"].as_u64().unwrap());
        assert_eq!(row[4].parse::<f64>().unwrap(), obj["area"].as_f64().unwrap());
        assert_eq!(row[5].parse::<f64>().unwrap(), obj["sys_lower"].as_f64().unwrap());
        assert_eq!(row[6].parse::<u64>().unwrap(), obj["kiss_lower"].as_u64().unwrap());
        assert_eq!(row[7].parse::<f64>().unwrap(), obj["epsilon"].as_f64().unwrap());
    }
}

#[test]
fn bounds_rejects_small_levels() {
    let o = run(&["--no-cache", "bounds", "--n", "4", "--epsilon", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

fn rat(s: &str) -> (i128, i128) {
    match s.split_once('/') {
        Some((n, d)) => (n.parse().unwrap(), d.parse().unwrap()),
        None => (s.parse().unwrap(), 1),
    }
}

#[test]
fn isotropy_verdicts() {
    let o = run(&["isotropy", "--a", "1", "--b", "1", "--format", "json"]);
    assert!(o.status.success());
    let v = &json_lines(&o)[0];
    assert_eq!(v["verdict"], "split");
    // re-evaluate x0^2 - x1^2 - x2^2 + x3^2 on the printed witness
    let w: Vec<(i128, i128)> = v["witness"].as_array().unwrap().iter().map(|x| rat(x.as_str().unwrap())).collect();
    let den: i128 = w.iter().map(|x| x.1).product();
    let scaled: Vec<i128> = w.iter().map(|x| x.0 * den / x.1).collect();
    assert_eq!(scaled[0].pow(2) - scaled[1].pow(2) - scaled[2].pow(2) + scaled[3].pow(2), 0);
    assert!(scaled.iter().any(|&x| x != 0));

    let o = run(&["isotropy", "--a", "3", "--b", "-1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "division ramified=2,3");

    let o = run(&["isotropy", "--a", "7/4", "--b", "-1"]);
    assert!(stdout(&o).starts_with("division"));

    let o = run(&["isotropy", "--a", "3/0", "--b", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["isotropy", "--a", "abc", "--b", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["isotropy", "--a", "0", "--b", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

fn verify(args: &[&str]) -> (Option<i32>, Value) {
    let o = run(args);
    let v = serde_json::from_str(stdout(&o).trim()).unwrap_or(Value::Null);
    (o.status.code(), v)
}

#[test]
fn verify_suites_pass() {
    let (code, v) = verify(&["verify", "--suite", "lemma-sn", "--n", "5..12", "--height", "10000"]);
    assert_eq!(code, Some(0), "{v}");
    assert_eq!(v["passed"], true);
    let (code, v) = verify(&["verify", "--suite", "order-formula", "--n", "2..12"]);
    assert_eq!(code, Some(0), "{v}");
    let (code, v) = verify(&["verify", "--suite", "quat-gap", "--p", "3", "--n", "3,5,7", "--height", "200"]);
    assert_eq!(code, Some(0), "{v}");
    assert_eq!(v["details"].as_array().unwrap().len(), 3);
    let (code, v) = verify(&["verify", "--suite", "hilbert-reciprocity"]);
    assert_eq!(code, Some(0), "{v}");
}

#[test]
fn verify_usage_errors() {
    assert_eq!(verify(&["verify", "--suite", "nope"]).0, Some(2));
    assert_eq!(verify(&["verify", "--suite", "quat-gap", "--p", "5"]).0, Some(2));
    assert_eq!(verify(&["verify", "--suite", "order-formula", "--n", "9..3"]).0, Some(2));
    assert_eq!(run(&["verify", "--bogus-flag"]).status.code(), Some(2));
}

#[test]
fn enumerate_stream() {
    let o = run(&["enumerate", "--p", "3", "--height", "2"]);
    assert!(o.status.success());
    let rows = json_lines(&o);
    let coords: Vec<Vec<i64>> = rows.iter().map(|r| serde_json::from_value(r["coords"].clone()).unwrap()).collect();
    let mut sorted = coords.clone();
    sorted.sort();
    assert_eq!(coords, sorted);
    let hit = rows.iter().find(|r| r["coords"] == serde_json::json!([2, 0, 0, 1])).unwrap();
    assert_eq!(hit["trace"], 4);
    assert_eq!(hit["kind"], "hyperbolic");
    let l = hit["length"].as_f64().unwrap();
    assert!((2.0 * (l / 2.0).cosh() - 4.0).abs() < 1e-9);
    let keys: Vec<&String> = hit.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["setting", "N", "coords", "trace", "kind", "length"]);

    let o = run(&["enumerate", "--p", "3", "--height", "30", "--level", "3"]);
    for r in json_lines(&o) {
        let c: Vec<i64> = serde_json::from_value(r["coords"].clone()).unwrap();
        assert_eq!((c[0] - 1).rem_euclid(3), 0);
        assert!(c[1..].iter().all(|x| x % 3 == 0));
        assert_eq!(r["N"], 3);
    }
    assert_eq!(run(&["enumerate", "--p", "5"]).status.code(), Some(2));
    let a = run(&["enumerate", "--p", "7", "--height", "10"]);
    let b = run(&["enumerate", "--p", "7", "--height", "10"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn enumerate_modular_level() {
    let o = run(&["enumerate", "--setting", "modular", "--level", "5", "--height", "100"]);
    assert!(o.status.success());
    let rows = json_lines(&o);
    assert!(rows.iter().any(|r| r["coords"] == serde_json::json!([1, 5, 0, 1])));
    for r in &rows {
        let t = r["trace"].as_i64().unwrap().abs();
        assert!(t == 2 || t >= 23);
    }
    assert_eq!(run(&["enumerate", "--setting", "modular"]).status.code(), Some(2));
}

#[test]
fn pgt_table() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("mu0.csv");
    let c = cache.to_str().unwrap();
    let o = run_in(dir.path(), &["--cache", c, "pgt", "--tmax", "200"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,mu0,cumulative,reference,ratio,exp_len_over_len");
    assert_eq!(lines.len(), 199);
    let rows: Vec<Vec<&str>> = lines[1..].iter().map(|l| l.split(',').collect()).collect();
    let cum: Vec<u64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(cum.windows(2).all(|w| w[0] <= w[1]));

    let classes = run_in(dir.path(), &["--cache", c, "classes", "--range", "3..200"]);
    let counts: Vec<String> = stdout(&classes)
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(","))
        .collect();
    let pgt_counts: Vec<String> = rows.iter().map(|r| format!("{},{}", r[0], r[1])).collect();
    assert_eq!(counts, pgt_counts);

    assert_eq!(run(&["pgt", "--tmax", "9"]).status.code(), Some(2));
}
