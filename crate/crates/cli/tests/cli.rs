use assert_cmd::Command;
use predicates::prelude::*;
use serde_json::Value;

fn bin() -> Command {
    Command::cargo_bin("padic-hilbert").unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = bin().args(args).assert().success().get_output().stdout.clone();
    serde_json::from_slice(&out).unwrap()
}

#[test]
fn encode_first_curve() {
    bin()
        .args(["encode", "--p", "2", "--n", "2", "--k", "1", "3"])
        .assert()
        .success()
        .stdout(predicate::str::contains("cell   (1,0)"))
        .stdout(predicate::str::contains("coord  (0.5,0) on axes (1,0)"));
}

#[test]
fn encode_decode_round_trip() {
    for (p, n, k) in [("2", "3", "3"), ("3", "2", "2"), ("5", "2", "2")] {
        let total = p
            .parse::<u64>()
            .unwrap()
            .pow((n.parse::<u32>().unwrap()) * k.parse::<u32>().unwrap());
        for i in [0, 1, total / 2, total - 1] {
            let enc = json(&[
                "encode",
                "--p",
                p,
                "--n",
                n,
                "--k",
                k,
                &i.to_string(),
                "--format",
                "json",
            ]);
            let cells: Vec<String> = enc["cells"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| {
                    c.as_array()
                        .unwrap()
                        .iter()
                        .map(|d| d.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            let dec = json(&[
                "decode",
                "--p",
                p,
                "--n",
                n,
                "--k",
                k,
                "--cell",
                &cells.join(";"),
                "--format",
                "json",
            ]);
            assert_eq!(dec["index"], Value::String(i.to_string()));
            // the cell centre decodes to the same index
            let side = enc["side"].as_f64().unwrap();
            let point: Vec<String> = enc["coord"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| (c.as_f64().unwrap() + side / 2.0).to_string())
                .collect();
            let dec = json(&[
                "decode",
                "--p",
                p,
                "--n",
                n,
                "--k",
                k,
                "--point",
                &point.join(","),
                "--format",
                "json",
            ]);
            assert_eq!(dec["index"], Value::String(i.to_string()));
        }
    }
}

#[test]
fn encode_by_limbs() {
    let a = json(&["encode", "--p", "3", "--n", "2", "--k", "2", "40", "--format", "json"]);
    let b = json(&[
        "encode", "--p", "3", "--n", "2", "--k", "2", "--limbs", "4,4", "--format", "json",
    ]);
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_2() {
    bin()
        .args(["encode", "--p", "2", "--n", "2", "--k", "1", "abc"])
        .assert()
        .code(2);
    bin()
        .args(["encode", "--p", "2", "--n", "2", "--k", "2", "--limbs", "1"])
        .assert()
        .code(2);
    bin().args(["frobnicate"]).assert().code(2);
}

#[test]
fn domain_errors_exit_4() {
    bin()
        .args(["encode", "--p", "4", "--n", "2", "--k", "1", "0"])
        .assert()
        .code(4)
        .stderr(predicate::str::contains("error:"));
    bin()
        .args(["encode", "--p", "2", "--n", "2", "--k", "1", "4"])
        .assert()
        .code(4);
    bin().args(["trace", "--n", "3", "--k", "1"]).assert().code(4);
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "0.1,0.2\n0.3,x\n").unwrap();
    bin()
        .args(["index", "build", "--input", bad.to_str().unwrap()])
        .assert()
        .code(3)
        .stderr(predicate::str::contains("row 2"));
    bin()
        .args([
            "index",
            "build",
            "--input",
            dir.path().join("missing.csv").to_str().unwrap(),
        ])
        .assert()
        .code(3);
    bin()
        .args(["sparsity", "--iris", "bch", "--data-dir", dir.path().to_str().unwrap()])
        .assert()
        .code(3)
        .stderr(predicate::str::contains("iris_bch.csv"));
}

#[test]
fn trace_svg_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("h.svg");
    bin()
        .args([
            "trace",
            "--p",
            "3",
            "--n",
            "2",
            "--k",
            "2",
            "--output",
            svg.to_str().unwrap(),
        ])
        .assert()
        .success();
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    let pts = text.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    assert_eq!(pts.split(' ').count(), 81);

    let out = bin()
        .args(["trace", "--p", "2", "--n", "3", "--k", "2", "--format", "csv"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,x2,x1,x0");
    assert_eq!(lines.len(), 65);
    // consecutive centres are one cell apart along one axis
    let rows: Vec<Vec<f64>> = lines[1..]
        .iter()
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    for w in rows.windows(2) {
        let d: f64 = w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).sum();
        assert!((d - 0.25).abs() < 1e-12);
    }
}

#[test]
fn index_on_iris() {
    let s1 = json(&["index", "build", "--iris", "--bucket", "1"]);
    assert_eq!(s1["stats"]["leaves"], 147);
    assert_eq!(s1["stats"]["points"], 150);
    let s16 = json(&["index", "build", "--iris", "--bucket", "16", "--variant", "ring"]);
    assert_eq!(s16["stats"]["leaves"], 20);
    let found = json(&[
        "index",
        "find",
        "--iris",
        "--bucket",
        "16",
        "--point",
        "0.2,0.5,0.1,0.1",
    ]);
    assert!(found["found"]["node"]["is_leaf"].as_bool().unwrap());
    assert!(!found["found"]["ids"].as_array().unwrap().is_empty());
    let ins = json(&[
        "index",
        "insert",
        "--iris",
        "--bucket",
        "1",
        "--point",
        "0.99,0.01,0.5,0.5",
    ]);
    assert_eq!(ins["before"]["points"], 150);
    assert_eq!(ins["stats"]["points"], 151);
    let rem = json(&["index", "remove", "--iris", "--bucket", "1", "--id", "0"]);
    assert_eq!(rem["stats"]["points"], 149);
    bin()
        .args(["index", "remove", "--iris", "--id", "999"])
        .assert()
        .code(4);
}

#[test]
fn index_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("pts.csv");
    std::fs::write(&f, "a;b;c\n1;10;5\n2;20;5\n3;30;5\n4;40;5\n").unwrap();
    let out = json(&[
        "index",
        "build",
        "--input",
        f.to_str().unwrap(),
        "--header",
        "--delimiter",
        ";",
        "--columns",
        "0,1",
    ]);
    assert_eq!(out["n"], 2);
    assert_eq!(out["stats"]["leaves"], 4);
}

#[test]
fn sparsity_outputs() {
    bin()
        .args(["sparsity", "--iris", "--bucket", "1,4"])
        .assert()
        .success()
        .stdout(predicate::str::contains("0.79"));
    let rows = json(&[
        "sparsity",
        "--iris",
        "--bucket",
        "1,2",
        "--variant",
        "bubble",
        "--format",
        "json",
    ]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["leaves_scaled"], 147);
    assert_eq!(rows[0]["k_static"], 2);
    let out = bin()
        .args([
            "sparsity", "--dist", "uniform", "--count", "2000", "--n", "2", "--format", "csv", "--bucket", "1,8",
        ])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("dataset,variant,p,n,size,s,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn sparsity_reps_need_generated_data() {
    bin().args(["sparsity", "--iris", "--reps", "3"]).assert().code(2);
    bin()
        .args([
            "sparsity", "--dist", "normal", "--count", "3000", "--reps", "3", "--bucket", "1,2",
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("reps"));
}

#[test]
fn generated_data_is_seeded() {
    let a = json(&[
        "sparsity", "--dist", "normal", "--count", "500", "--seed", "9", "--format", "json",
    ]);
    let b = json(&[
        "sparsity", "--dist", "normal", "--count", "500", "--seed", "9", "--format", "json",
    ]);
    assert_eq!(a, b);
}

#[test]
fn bench_runs_both_modes() {
    bin()
        .args(["bench", "--count", "2000", "--reps", "1"])
        .assert()
        .success()
        .stdout(predicate::str::contains("sequential").and(predicate::str::contains("parallel")));
}

#[test]
fn threads_flag() {
    bin()
        .args([
            "--threads",
            "1",
            "sparsity",
            "--iris",
            "--bucket",
            "1",
            "--format",
            "json",
        ])
        .assert()
        .success();
    bin().args(["--threads", "0", "encode", "0"]).assert().code(2);
}
