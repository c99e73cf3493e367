use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thickness-lab"))
        .args(args)
        .env_remove("THICKNESS_LAB_BUDGET_SECONDS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_doc(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn write_complete(dir: &Path, n: &str, minus_edge: bool) -> PathBuf {
    let name = if minus_edge {
        format!("K{n}-e.json")
    } else {
        format!("K{n}.json")
    };
    let out = dir.join(name);
    let mut args = vec!["complete", "-n", n, "--out", path_str(&out)];
    if minus_edge {
        args.push("--minus-edge");
    }
    assert_eq!(code(&run(&args)), 0);
    out
}

#[test]
fn product_counts() {
    for (n, m, v, e) in [("5", "2", 10, 25), ("2", "2", 4, 4), ("7", "3", 21, 77)] {
        let o = run(&["product", "-n", n, "-m", m]);
        assert_eq!(code(&o), 0);
        let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(doc["host"]["vertices"].as_array().unwrap().len(), v);
        assert_eq!(doc["host"]["edges"].as_array().unwrap().len(), e);
        assert_eq!(doc["pages"].as_array().unwrap().len(), 0);
    }
    assert_eq!(code(&run(&["product", "-n", "0", "-m", "2"])), 64);
    assert_eq!(code(&run(&["product", "-n", "2", "-m", "0"])), 64);
}

#[test]
fn bounds_reports() {
    let o = run(&["bounds", "-n", "7", "-m", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("thickness: exact 2 (multi_layer_formula)"));

    let o = run(&["bounds", "-n", "10", "-m", "2", "--json"]);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["thickness"]["status"], "open");
    assert_eq!(
        (
            report["thickness"]["lo"].as_u64(),
            report["thickness"]["hi"].as_u64()
        ),
        (Some(2), Some(3))
    );
    assert_eq!(report["lower_bound"]["provenance"], "product_lower");

    let o = run(&["bounds", "-n", "9", "-m", "2"]);
    assert!(stdout(&o).contains("exact 3"));
    // stable across runs
    assert_eq!(
        stdout(&run(&["bounds", "-n", "10", "-m", "2", "--json"])),
        stdout(&run(&["bounds", "-n", "10", "-m", "2", "--json"]))
    );
}

#[test]
fn construct_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k5p2.json");
    let o = run(&[
        "construct",
        "-n",
        "5",
        "-m",
        "2",
        "--search-bases",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_doc(&out);
    assert_eq!(doc["pages"].as_array().unwrap().len(), 2);
    assert_eq!(doc["host"]["edges"].as_array().unwrap().len(), 25);
    assert_eq!(doc["metadata"]["verification"]["valid"], true);
    assert_eq!(code(&run(&["verify", path_str(&out)])), 0);

    let o = run(&["construct", "-n", "1", "-m", "2"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["pages"].as_array().unwrap().len(), 1);
    assert_eq!(doc["host"]["edges"].as_array().unwrap().len(), 1);

    let o = run(&["construct", "-n", "3", "-m", "4", "--deterministic"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["pages"].as_array().unwrap().len(), 1);
}

#[test]
fn construct_from_base_files() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_complete(dir.path(), "6", false);
    let base = dir.path().join("k6-base.json");
    assert_eq!(
        code(&run(&[
            "search",
            "--graph",
            path_str(&graph),
            "-k",
            "2",
            "--deterministic",
            "--out",
            path_str(&base)
        ])),
        0
    );
    let out = dir.path().join("k5p2.json");
    let o = run(&[
        "construct",
        "-n",
        "5",
        "-m",
        "2",
        "--end-base",
        path_str(&base),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_doc(&out)["pages"].as_array().unwrap().len(), 2);
    // wrong size for n
    assert_eq!(
        code(&run(&[
            "construct",
            "-n",
            "4",
            "-m",
            "2",
            "--end-base",
            path_str(&base)
        ])),
        1
    );

    let mid_graph = write_complete(dir.path(), "6", true);
    let mid = dir.path().join("mid.json");
    assert_eq!(
        code(&run(&[
            "search",
            "--graph",
            path_str(&mid_graph),
            "-k",
            "2",
            "--deterministic",
            "--out",
            path_str(&mid)
        ])),
        0
    );
    let o = run(&[
        "construct",
        "-n",
        "4",
        "-m",
        "5",
        "--mid-base",
        path_str(&mid),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["host"]["vertices"].as_array().unwrap().len(), 20);
    assert_eq!(
        code(&run(&[
            "construct",
            "-n",
            "4",
            "-m",
            "5",
            "--end-base",
            path_str(&base)
        ])),
        1
    );
}

#[test]
fn verify_reports_problems() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    assert_eq!(
        code(&run(&[
            "construct",
            "-n",
            "3",
            "-m",
            "2",
            "--out",
            path_str(&good)
        ])),
        0
    );
    let text = std::fs::read_to_string(&good).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();

    // put the first edge on a second page as well
    let first = doc["pages"][0][0].clone();
    doc["pages"]
        .as_array_mut()
        .unwrap()
        .push(Value::Array(vec![first.clone()]));
    let dup = dir.path().join("dup.json");
    std::fs::write(&dup, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = run(&["verify", path_str(&dup)]);
    assert_eq!(code(&o), 1);
    let label = format!(
        "{}-{}",
        first[0].as_str().unwrap(),
        first[1].as_str().unwrap()
    );
    assert!(
        stdout(&o).contains(&format!("duplicated edge {label}")),
        "{}",
        stdout(&o)
    );

    // one page holding all of K5
    let k5 = write_complete(dir.path(), "5", false);
    let mut doc = read_doc(&k5);
    doc["pages"] = Value::Array(vec![doc["host"]["edges"].clone()]);
    let bad = dir.path().join("k5-one-page.json");
    std::fs::write(&bad, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let o = run(&["verify", path_str(&bad), "--json"]);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["pages"][0]["planar"], false);
    assert_eq!(report["pages"][0]["kuratowski"]["kind"], "K5");
    assert_eq!(
        report["pages"][0]["kuratowski"]["edges"]
            .as_array()
            .unwrap()
            .len(),
        10
    );

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&run(&["verify", path_str(&garbage)])), 1);
}

#[test]
fn search_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let k9e = write_complete(dir.path(), "9", true);
    let cert = dir.path().join("cert.json");
    let o = run(&[
        "search",
        "--graph",
        path_str(&k9e),
        "-k",
        "2",
        "--deterministic",
        "--out",
        path_str(&cert),
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["status"], "found");
    assert_eq!(code(&run(&["verify", path_str(&cert)])), 0);
    // certificates are reproducible with --deterministic
    let again = dir.path().join("again.json");
    run(&[
        "search",
        "--graph",
        path_str(&k9e),
        "-k",
        "2",
        "--deterministic",
        "--out",
        path_str(&again),
    ]);
    assert_eq!(
        std::fs::read(&cert).unwrap(),
        std::fs::read(&again).unwrap()
    );

    let k5 = write_complete(dir.path(), "5", false);
    assert_eq!(
        code(&run(&["search", "--graph", path_str(&k5), "-k", "1"])),
        1
    );

    let o = run(&[
        "search",
        "-n",
        "4",
        "-m",
        "2",
        "--exact",
        "--deterministic",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["status"], "exact");
    assert_eq!(report["lo"], 2);

    let o = run(&[
        "search",
        "--graph",
        path_str(&k9e),
        "-k",
        "2",
        "--hub-symmetric",
        "x8",
        "x9",
        "--max-nodes",
        "1000",
    ]);
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_thickness-lab"))
        .args([
            "search",
            "--graph",
            path_str(&k9e),
            "-k",
            "2",
            "--hub-symmetric",
            "x8",
            "x9",
            "--json",
        ])
        .env("THICKNESS_LAB_BUDGET_SECONDS", "0.2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("inconclusive"));

    let o = run(&[
        "search",
        "--graph",
        path_str(&k5),
        "-k",
        "2",
        "--pin",
        "x1",
        "x2",
        "1",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        code(&run(&[
            "search",
            "--graph",
            path_str(&k5),
            "-k",
            "2",
            "--pin",
            "x1",
            "x2",
            "5"
        ])),
        1
    );
    assert_eq!(code(&run(&["search", "-k", "2"])), 64);
    assert_eq!(code(&run(&["search", "-n", "3", "-m", "2"])), 64);
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("k5p2.json");
    run(&["construct", "-n", "5", "-m", "2", "--out", path_str(&doc)]);
    let o = run(&["export-dot", path_str(&doc)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).matches("subgraph cluster_page_").count(), 2);

    let graph = dir.path().join("g.json");
    run(&["product", "-n", "2", "-m", "2", "--out", path_str(&graph)]);
    let dot = stdout(&run(&["export-dot", path_str(&graph)]));
    assert!(!dot.contains("subgraph"));
    assert_eq!(dot.matches(" -- ").count(), 4);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&[])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(
        code(&run(&[
            "search",
            "-n",
            "2",
            "-m",
            "2",
            "-k",
            "1",
            "--budget-seconds",
            "-1"
        ])),
        64
    );
}
