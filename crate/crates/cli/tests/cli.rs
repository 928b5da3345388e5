use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn slnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slnet"))
        .args(args)
        .env("SLNET_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slnet-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--kind", "ndbd", "--n", "5", "--m", "10", "--seed", "1"];
    let a = slnet(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, slnet(&args).stdout);
    assert!(stdout(&a).starts_with("p ndbd 5 10 "));
    let other = slnet(&["gen", "--kind", "ndbd", "--n", "5", "--m", "10", "--seed", "2"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn gen_rejects_short_bound() {
    let o = slnet(&["gen", "--kind", "ndbd", "--n", "5", "--m", "10", "--bound", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsatisfiable"));
}

#[test]
fn solve_ndbd_two_cycle_and_verify() {
    let dir = scratch("c2");
    let input = dir.join("c2.txt");
    fs::write(&input, "c two-cycle\np ndbd 2 2 1\na 1 2 3 1\na 2 1 4 1\n").unwrap();
    let report = dir.join("r.json");
    let o = slnet(&["solve-ndbd", "--input", s(&input), "--seed", "4", "--out", s(&report)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&report).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["cost"], 7);
    assert_eq!(v["edges"], serde_json::json!([1, 2]));
    assert_eq!(v["max_violation_factor"], 1.0);
    assert_eq!(v["params"]["seed"], 4);

    let again = dir.join("r2.json");
    slnet(&["solve-ndbd", "--input", s(&input), "--seed", "4", "--out", s(&again)]);
    assert_eq!(fs::read(&report).unwrap(), fs::read(&again).unwrap());

    assert!(slnet(&["verify", "--input", s(&input), "--solution", s(&report)]).status.success());
    let partial = dir.join("partial.json");
    fs::write(&partial, text.replace("\"edges\": [\n    1,\n    2\n  ]", "\"edges\": [\n    1\n  ]")).unwrap();
    let o = slnet(&["verify", "--input", s(&input), "--solution", s(&partial)]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["offending"][0]["from"], 1);
    assert_eq!(v["offending"][0]["to"], 0);
}

#[test]
fn solve_ndbd_infeasible_is_an_error() {
    let dir = scratch("chain");
    let input = dir.join("chain.txt");
    fs::write(&input, "p ndbd 3 2 9\na 1 2 1 1\na 2 3 1 1\n").unwrap();
    let o = slnet(&["solve-ndbd", "--input", s(&input)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = scratch("bad");
    let input = dir.join("bad.txt");
    fs::write(&input, "p ndbd 2 1 1\na 1 3 1 1\n").unwrap();
    let o = slnet(&["oracle", "--input", s(&input), "--problem", "ndbd"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn slst_solve_and_oracle() {
    let dir = scratch("diamond");
    let input = dir.join("d1.txt");
    fs::write(&input, "p slst 4 4 1 1\nt 4 4\na 1 2 1 5\na 2 4 1 5\na 1 3 10 1\na 3 4 10 1\n").unwrap();
    let o = slnet(&["solve-slst", "--input", s(&input), "--eps", "0.25", "--level", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cost"], 20);
    assert_eq!(v["edges"], serde_json::json!([3, 4]));
    assert_eq!(v["terminal_violation"]["4"], 0.5);

    let o = slnet(&["oracle", "--input", s(&input), "--problem", "slst"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cost"], 20);
}

#[test]
fn rsp_modes_on_g1() {
    let dir = scratch("g1");
    let input = dir.join("g1.txt");
    fs::write(&input, "p spanner 3 3 2\na 1 2 1 2\na 2 3 1 2\na 1 3 5 1\n").unwrap();
    let run = |mode: &str, bound: &str| {
        let o = slnet(&["rsp", "--input", s(&input), "--from", "1", "--to", "3", "--bound", bound, "--mode", mode]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()
    };
    assert_eq!(run("exact", "2")["cost"], 5);
    assert_eq!(run("exact", "4")["cost"], 2);
    assert_eq!(run("hassin", "4")["edges"], serde_json::json!([1, 2]));
    assert!(run("relaxed", "2")["cost"].as_u64().unwrap() <= 5);

    let o = slnet(&["solve-spanner", "--input", s(&input)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["edges"].as_array().unwrap().contains(&serde_json::json!(3)));
}

#[test]
fn lp_and_classify() {
    let dir = scratch("lp");
    let input = dir.join("c2.txt");
    fs::write(&input, "p ndbd 2 2 1\na 1 2 3 1\na 2 1 4 1\n").unwrap();
    let o = slnet(&["lp", "--input", s(&input), "--seed", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["objective"].as_f64().unwrap() - 7.0).abs() < 1e-6);
    assert_eq!(v["rounded"]["edges"], serde_json::json!([1, 2]));

    let chain = dir.join("chain.txt");
    fs::write(&chain, "p spanner 3 2 1\na 1 2 1 1\na 2 3 1 1\n").unwrap();
    let o = slnet(&["classify", "--input", s(&chain), "--bound", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let pair = v["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["from"] == 1 && p["to"] == 3)
        .unwrap();
    assert_eq!(pair["candidates"], 3);
    assert!(slnet(&["classify", "--input", s(&chain)]).status.code() == Some(2));
}

#[test]
fn bench_is_reproducible() {
    let dir = scratch("bench");
    let cfg = dir.join("suite.json");
    fs::write(
        &cfg,
        r#"{"problem": "slst", "sizes": [[6, 10], [7, 12]], "count": 3, "seed": 11, "terminals": 3}"#,
    )
    .unwrap();
    let (a, b, j) = (dir.join("a.csv"), dir.join("b.csv"), dir.join("a.json"));
    assert!(slnet(&["bench", "--config", s(&cfg), "--csv", s(&a), "--json", s(&j)]).status.success());
    assert!(slnet(&["bench", "--config", s(&cfg), "--csv", s(&b)]).status.success());
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv, fs::read_to_string(&b).unwrap());
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.starts_with("n,m,seed,approx_cost,oracle_cost,ratio,violation,bound,runtime_ms,error\n"));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[5]["seed"], 16);

    let empty = dir.join("empty.json");
    fs::write(&empty, r#"{"problem": "ndbd", "sizes": [], "count": 5}"#).unwrap();
    let o = slnet(&["bench", "--config", s(&empty)]);
    assert_eq!(stdout(&o), "n,m,seed,approx_cost,oracle_cost,ratio,violation,bound,runtime_ms,error\n");
}
