//! CLI acceptance: repeated runs with an identical configuration must
//! produce byte-identical outputs, and the failure paths must exit with the
//! documented codes and name the failing level.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geronimus"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).expect("output dir") {
        let entry = entry.unwrap();
        files.insert(
            entry.file_name().to_string_lossy().into_owned(),
            std::fs::read(entry.path()).unwrap(),
        );
    }
    files
}

#[test]
fn acceptance_10_deterministic_outputs() {
    let work = tempfile::tempdir().unwrap();
    let configs: Vec<Vec<String>> = vec![
        vec![
            "transform",
            "--measure",
            "laguerre",
            "--alpha",
            "1",
            "--single",
            "--s0star",
            "1",
            "--n",
            "10",
            "--format",
            "csv",
        ],
        vec![
            "transform",
            "--measure",
            "laguerre",
            "--alpha",
            "2",
            "--double",
            "--corner",
            "1/2,1/2,1",
            "--n",
            "10",
            "--format",
            "latex",
        ],
        vec![
            "factorize",
            "--measure",
            "laguerre",
            "--alpha",
            "1/2",
            "--single",
            "--s0star",
            "2",
            "--n",
            "8",
        ],
        vec![
            "factorize",
            "--measure",
            "laguerre",
            "--alpha",
            "2",
            "--double",
            "--corner",
            "1/2,1/2,1",
            "--n",
            "8",
            "--decimal",
            "12",
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();

    for (idx, config) in configs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rerun in 0..2 {
            let dir = work.path().join(format!("cfg{idx}_run{rerun}"));
            let mut args: Vec<String> = config.clone();
            args.push("--out".into());
            args.push(dir.to_string_lossy().into_owned());
            let out = bin().args(&args).output().expect("binary runs");
            assert!(
                out.status.success(),
                "config {idx} failed: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            outputs.push((snapshot(&dir), out.stdout));
        }
        let (files_a, _stdout_a) = &outputs[0];
        let (files_b, _stdout_b) = &outputs[1];
        assert_eq!(
            files_a.keys().collect::<Vec<_>>(),
            files_b.keys().collect::<Vec<_>>(),
            "config {idx}: different file sets"
        );
        for (name, bytes) in files_a {
            assert_eq!(
                bytes, &files_b[name],
                "config {idx}: file {name} differs between reruns"
            );
        }
    }
    println!("criterion 10 PASS: byte-identical outputs across reruns for 4 configurations");
}

#[test]
fn transform_writes_expected_tables() {
    let work = tempfile::tempdir().unwrap();
    let dir = work.path().join("out");
    let out = run(&[
        "transform",
        "--measure",
        "laguerre",
        "--alpha",
        "1",
        "--single",
        "--s0star",
        "1",
        "--n",
        "10",
        "--format",
        "csv",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("transform_single.csv")).unwrap();
    let a_column: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|line| line.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(
        a_column,
        (1..=10)
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>()
    );

    let out = run(&[
        "transform",
        "--measure",
        "laguerre",
        "--alpha",
        "2",
        "--double",
        "--corner",
        "1/2,1/2,1",
        "--n",
        "10",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("transform_double.csv")).unwrap();
    for (i, line) in csv.lines().skip(1).enumerate() {
        let n = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1], (2 * n).to_string(), "B_{n}");
        if n >= 2 {
            assert_eq!(fields[2], (n * (n - 1)).to_string(), "C_{n}");
        }
    }
    // The mu_2-matching corner reports a zero mass matrix.
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("transform_double.json")).unwrap())
            .unwrap();
    assert_eq!(json["mass_matrix"][0][0], "0");
    assert_eq!(json["mass_matrix"][1][1], "0");
}

#[test]
fn failure_exit_codes() {
    let work = tempfile::tempdir().unwrap();
    let dir = work.path().join("out");

    // Degenerate parameter: exit 3 naming DegenerateDenominator(1).
    let out = run(&[
        "transform",
        "--measure",
        "laguerre",
        "--alpha",
        "1",
        "--single",
        "--s0star",
        "0",
        "--n",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DegenerateDenominator(1)"));

    // Singular 2x2 system at the predicted level: exit 3.
    let out = run(&[
        "transform",
        "--measure",
        "laguerre",
        "--alpha",
        "0",
        "--double",
        "--corner",
        "1,2,4",
        "--n",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DegenerateDeterminant(2)"));

    // Corrupt input file: exit 2.
    let bad = work.path().join("bad.json");
    std::fs::write(&bad, "not json at all").unwrap();
    let out = run(&[
        "verify",
        "--measure",
        "custom",
        "--file",
        bad.to_str().unwrap(),
        "--single",
        "--s0star",
        "1",
        "--n",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Non-regular custom moments: exit 3 naming the minor.
    std::fs::write(&bad, r#"["1","1","1","1","1","1","1","1","1"]"#).unwrap();
    let out = run(&[
        "verify",
        "--measure",
        "custom",
        "--file",
        bad.to_str().unwrap(),
        "--single",
        "--s0star",
        "1",
        "--n",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotRegular(2)"));

    // Undersized truncation: exit 2 with a message.
    let out = run(&[
        "factorize",
        "--measure",
        "laguerre",
        "--alpha",
        "1",
        "--single",
        "--s0star",
        "1",
        "--n",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown flags are a usage error: exit 2.
    let out = run(&["transform", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupt_flag_fails_with_named_identity() {
    for (args, needle) in [
        (
            vec![
                "verify",
                "--measure",
                "laguerre",
                "--alpha",
                "1",
                "--single",
                "--s0star",
                "1",
                "--n",
                "8",
                "--corrupt",
                "a:3",
            ],
            "J_mon = U_mon L_mon",
        ),
        (
            vec![
                "verify",
                "--measure",
                "laguerre",
                "--alpha",
                "2",
                "--double",
                "--corner",
                "1/2,1/2,1",
                "--n",
                "8",
                "--corrupt",
                "b:3",
            ],
            "J_mon^2 = U_mon L_mon",
        ),
        (
            vec![
                "verify",
                "--measure",
                "laguerre",
                "--alpha",
                "2",
                "--double",
                "--corner",
                "1/2,1/2,1",
                "--n",
                "8",
                "--corrupt",
                "c:4",
            ],
            "J_mon^2 = U_mon L_mon",
        ),
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "args: {args:?}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains("MismatchAt"), "stderr: {stderr}");
        assert!(stderr.contains(needle), "stderr: {stderr}");
    }
}

#[test]
fn precision_env_and_flag() {
    // Flag wins over the environment variable; too-small precision is a
    // configuration error.
    let out = bin()
        .args([
            "verify",
            "--measure",
            "laguerre",
            "--alpha",
            "1",
            "--single",
            "--s0star",
            "1",
            "--n",
            "4",
            "--precision",
            "32",
        ])
        .env("GERONIMUS_PRECISION", "128")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args([
            "verify",
            "--measure",
            "laguerre",
            "--alpha",
            "1",
            "--single",
            "--s0star",
            "1",
            "--n",
            "4",
        ])
        .env("GERONIMUS_PRECISION", "128")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("2^-64"));
}
