use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groupshift"))
        .current_dir(corpus())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn counts_on_windows() {
    assert_eq!(
        stdout(&[
            "sft",
            "count",
            "--sft",
            "full2.json",
            "--window",
            "window4.json"
        ]),
        "16\n"
    );
    assert_eq!(
        stdout(&[
            "sft",
            "count",
            "--sft",
            "golden.json",
            "--window",
            "window4.json"
        ]),
        "8\n"
    );
    assert_eq!(
        stdout(&["sft", "count", "--sft", "golden.json", "--box", "6"]),
        "21\n"
    );
    assert_eq!(
        stdout(&["sft", "count", "--sft", "hard_square.json", "--box", "2x2"]),
        "7\n"
    );
    assert_eq!(
        stdout(&["sft", "count", "--sft", "full2_z2.json", "--ball", "1"]),
        "32\n"
    );
    let listed = stdout(&[
        "sft",
        "count",
        "--sft",
        "golden.json",
        "--box",
        "2",
        "--list",
    ]);
    assert_eq!(listed.lines().count(), 4);
}

#[test]
fn window_flags_conflict() {
    assert_eq!(
        code(&[
            "sft",
            "count",
            "--sft",
            "golden.json",
            "--box",
            "3",
            "--ball",
            "1"
        ]),
        2
    );
}

#[test]
fn validate_corpus() {
    let docs = [
        "z.json",
        "z2.json",
        "lamplighter.json",
        "heisenberg.json",
        "golden.json",
        "hard_square.json",
        "full2_z2.json",
        "pattern.json",
        "shift_chart.json",
    ];
    let out = stdout(&[&["validate"][..], &docs[..]].concat());
    assert_eq!(
        out.lines().filter(|l| l.starts_with("ok ")).count(),
        docs.len()
    );
    assert!(stdout(&["validate", "cross.json", "--group", "z2.json"]).contains("5 cells"));
    assert!(stdout(&[
        "validate",
        "box3_tiling.json",
        "--group",
        "z2.json",
        "--tiles",
        "box3_tiles.json"
    ])
    .starts_with("ok"));
}

#[test]
fn validate_failures_and_warnings() {
    let out = run(&["validate", "bad_generator.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains('c'));
    let out = run(&["validate", "coding_clash.json"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(code(&["validate", "cross.json"]), 2);
    assert_eq!(code(&["validate", "missing.json"]), 2);
}

#[test]
fn resource_limit_exit_code() {
    assert_eq!(
        code(&[
            "--budget-nodes",
            "10",
            "sft",
            "count",
            "--sft",
            "hard_square.json",
            "--box",
            "4x4"
        ]),
        3
    );
}

#[test]
fn exact_and_strip_values() {
    let v: f64 = stdout(&["entropy", "exact-z", "--sft", "golden.json"])
        .trim()
        .parse()
        .unwrap();
    assert!((v - 0.481211825).abs() < 1e-9);
    let bits: f64 = stdout(&["--bits", "entropy", "exact-z", "--sft", "full2.json"])
        .trim()
        .parse()
        .unwrap();
    assert!((bits - 1.0).abs() < 1e-9);
    let s: f64 = stdout(&[
        "entropy",
        "strip-bound",
        "--sft",
        "hard_square.json",
        "--width",
        "2",
    ])
    .trim()
    .parse()
    .unwrap();
    assert!((s - (1.0 + 2f64.sqrt()).ln() / 2.0).abs() < 1e-9);
}

#[test]
fn estimate_csv() {
    let csv = stdout(&[
        "--no-timing",
        "entropy",
        "estimate",
        "--sft",
        "golden.json",
        "--n-max",
        "3",
    ]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,ball,family,h_n_num,h_n_den,raw,ms"));
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[6] == "0"));
    let balls = stdout(&[
        "--no-timing",
        "entropy",
        "estimate",
        "--sft",
        "golden.json",
        "--n-max",
        "2",
        "--family",
        "balls",
    ]);
    assert_eq!(balls.lines().count(), 4);
}

#[test]
fn emitted_sft_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let tiling = dir.path().join("domino_sft.json");
    stdout(&[
        "sft",
        "tiling",
        "--tiles",
        "domino.json",
        "--group",
        "z.json",
        "-o",
        tiling.to_str().unwrap(),
    ]);
    assert!(stdout(&["validate", tiling.to_str().unwrap()]).starts_with("ok"));
    assert_eq!(
        stdout(&[
            "sft",
            "count",
            "--sft",
            tiling.to_str().unwrap(),
            "--box",
            "4"
        ]),
        "2\n"
    );

    let embedded = dir.path().join("embedded.json");
    stdout(&[
        "chart",
        "embed",
        "--snake",
        "--y",
        "full2_s.json",
        "-o",
        embedded.to_str().unwrap(),
    ]);
    assert!(stdout(&["validate", embedded.to_str().unwrap()]).starts_with("ok"));
    let again = dir.path().join("again.json");
    let text = std::fs::read_to_string(&embedded).unwrap();
    std::fs::write(&again, &text).unwrap();
    assert_eq!(
        stdout(&[
            "sft",
            "count",
            "--sft",
            embedded.to_str().unwrap(),
            "--box",
            "2x1"
        ]),
        stdout(&[
            "sft",
            "count",
            "--sft",
            again.to_str().unwrap(),
            "--box",
            "2x1"
        ])
    );
}

#[test]
fn charts() {
    let rep = stdout(&["chart", "check-cocycle", "--snake", "--samples", "50"]);
    assert!(rep.contains("cocycle checks") && rep.contains("failures 0"));
    let free = stdout(&[
        "chart",
        "freeness",
        "--snake",
        "--box",
        "2x2",
        "--max-len",
        "4",
    ]);
    assert!(!free.contains(" 0 violation"));
    assert!(free.lines().any(|l| l.starts_with("word ")));
    let shift = stdout(&[
        "chart",
        "freeness",
        "--chart",
        "shift_chart.json",
        "--ball",
        "1",
        "--max-len",
        "3",
    ]);
    assert!(!shift.lines().any(|l| l.starts_with("word ")));
    assert!(
        stdout(&["chart", "check-cocycle", "--chart", "shift_chart.json"]).contains("failures 0")
    );
}

#[test]
fn reductions() {
    assert_eq!(
        stdout(&[
            "reduce",
            "core",
            "--group",
            "z2.json",
            "--set",
            "box3.json",
            "--K",
            "cross.json"
        ]),
        "[\"1\"]\n"
    );
    assert_eq!(
        stdout(&[
            "reduce",
            "core",
            "--group",
            "z.json",
            "--set",
            "set6.json",
            "--K",
            "k01.json"
        ])
        .trim(),
        "[\"1\",\"a\",\"a a\",\"a a a\",\"a a a a\"]"
    );
    let dir = tempfile::tempdir().unwrap();
    let lang = dir.path().join("lang.json");
    stdout(&[
        "reduce",
        "language",
        "--sft",
        "golden.json",
        "--box",
        "3",
        "--tiling",
        "domino_tiling.json",
        "--tiles",
        "domino.json",
        "-o",
        lang.to_str().unwrap(),
    ]);
    assert!(stdout(&["validate", lang.to_str().unwrap()]).starts_with("ok"));

    let tiling = dir.path().join("t.json");
    stdout(&[
        "sft",
        "tiling",
        "--tiles",
        "domino.json",
        "--group",
        "z.json",
        "-o",
        tiling.to_str().unwrap(),
    ]);
    let ov = dir.path().join("ov.json");
    let fm = dir.path().join("fm.json");
    stdout(&[
        "reduce",
        "overlay",
        "--sft",
        "golden.json",
        "--tiles",
        "domino.json",
        "--tiling",
        tiling.to_str().unwrap(),
        "--K",
        "k3.json",
        "-o",
        ov.to_str().unwrap(),
        "--factor-map",
        fm.to_str().unwrap(),
    ]);
    assert!(stdout(&["validate", ov.to_str().unwrap()]).starts_with("ok"));
    let map: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&fm).unwrap()).unwrap();
    assert_eq!(map["tiles"][0]["table"].as_array().unwrap().len(), 3);
    assert_eq!(
        code(&[
            "reduce",
            "overlay",
            "--sft",
            "golden.json",
            "--tiles",
            "domino.json",
            "--tiling",
            tiling.to_str().unwrap(),
            "--K",
            "k01.json"
        ]),
        2
    );
}
