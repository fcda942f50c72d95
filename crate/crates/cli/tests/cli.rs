use std::fs;
use std::process::{Command, Output};

const A5: &str = "(1 2 3 4 5);(1 2 3)";
const S3: &str = "(1 2 3);(1 2)";

fn pzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pzeta"))
        .args(args)
        .env_remove("PZETA_BOUND")
        .env_remove("PZETA_CACHE_DIR")
        .env_remove("PZETA_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(out: &Output) -> Vec<(u64, String)> {
    stdout(out)
        .lines()
        .skip(1)
        .map(|l| {
            let (n, c) = l.split_once(',').unwrap();
            (n.parse().unwrap(), c.to_string())
        })
        .collect()
}

fn rows(pairs: &[(u64, &str)]) -> Vec<(u64, String)> {
    pairs.iter().map(|(n, c)| (*n, c.to_string())).collect()
}

#[test]
fn series_of_a5() {
    let out = pzeta(&["series", A5, "--bound", "60", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        csv_rows(&out),
        rows(&[
            (1, "1"),
            (5, "-5"),
            (6, "-6"),
            (10, "-10"),
            (20, "20"),
            (30, "60"),
            (60, "-60")
        ])
    );
}

#[test]
fn series_of_trivial_and_s3() {
    let trivial = pzeta(&["series", "()", "--format", "csv"]);
    assert_eq!(csv_rows(&trivial), rows(&[(1, "1")]));
    let s3 = pzeta(&["series", S3, "--format", "csv"]);
    assert_eq!(
        csv_rows(&s3),
        rows(&[(1, "1"), (2, "-1"), (3, "-3"), (6, "3")])
    );
}

#[test]
fn invert_from_series_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a5.json");
    let json = pzeta(&["series", A5, "--bound", "60", "--format", "json"]);
    fs::write(&path, stdout(&json)).unwrap();
    let out = pzeta(&["invert", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let inv = csv_rows(&out);
    assert!(inv.contains(&(5, "5".to_string())));
    assert!(inv.contains(&(20, "-20".to_string())));
    let unit = pzeta(&[
        "invert",
        r#"{"bound":10,"terms":[[1,"1"]]}"#,
        "--format",
        "csv",
    ]);
    assert_eq!(csv_rows(&unit), rows(&[(1, "1")]));
}

#[test]
fn mul_matches_brown_recipe() {
    let recipe = r#"{"variant":"brown","factors":[{"variant":"lattice","degree":3,"generators":["(1 2 3)","(1 2)"]},{"variant":"cyclic","order":5}]}"#;
    let product = pzeta(&[
        "mul",
        S3,
        r#"{"variant":"cyclic","order":5}"#,
        "--bound",
        "30",
        "--format",
        "csv",
    ]);
    let brown = pzeta(&["series", recipe, "--bound", "30", "--format", "csv"]);
    let lattice = pzeta(&[
        "series",
        "(1 2 3);(1 2);(4 5 6 7 8)",
        "--bound",
        "30",
        "--format",
        "csv",
    ]);
    assert_eq!(stdout(&product), stdout(&brown));
    assert_eq!(stdout(&brown), stdout(&lattice));
}

#[test]
fn construct_trace() {
    let out = pzeta(&["construct", A5, "--bound", "380", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], r#"{"k":1,"m":5,"f":"1","frontier":19}"#);
    assert_eq!(lines[1], r#"{"k":2,"m":20,"f":"1","frontier":119}"#);
    let none = pzeta(&[
        "construct",
        A5,
        "--bound",
        "380",
        "--max-steps",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(stdout(&none).lines().count(), 1);
    let s3 = pzeta(&["construct", S3, "--bound", "100", "--format", "json"]);
    assert_eq!(s3.status.code(), Some(0));
    assert_eq!(stdout(&s3).lines().count(), 1);
    let exhausted = pzeta(&["construct", A5, "--bound", "1000"]);
    assert_eq!(exhausted.status.code(), Some(3));
}

#[test]
fn example_report() {
    let out = pzeta(&["example-50000", "--format", "json"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["recurrence_agrees"], true);
    assert_eq!(report["first_negative_2_5_smooth"]["index"], 50000);
    assert_eq!(report["first_negative_2_5_smooth"]["value"], "-365899");
    // Over all indices the first negative coefficient is at 750, so the
    // claim is reported as falsified.
    assert_eq!(report["first_negative"]["index"], 750);
    assert_eq!(report["claim_verified"], false);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(pzeta(&["series", "not a group"]).status.code(), Some(2));
    assert_eq!(
        pzeta(&["series", r#"{"variant":"cyclic","order":5}"#])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pzeta(&["series", A5, "--bound", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(pzeta(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        pzeta(&["series", A5, "--order-limit", "59"]).status.code(),
        Some(3)
    );
    assert_eq!(
        pzeta(&["series", A5, "--lattice-limit", "10"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn cache_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let plain = pzeta(&["series", A5, "--format", "json"]);
    let cold = pzeta(&["series", A5, "--format", "json", "--cache-dir", cache]);
    let warm = pzeta(&["series", A5, "--format", "json", "--cache-dir", cache]);
    let off = pzeta(&[
        "series",
        A5,
        "--format",
        "json",
        "--cache-dir",
        cache,
        "--no-cache",
    ]);
    assert_eq!(plain.stdout, cold.stdout);
    assert_eq!(plain.stdout, warm.stdout);
    assert_eq!(plain.stdout, off.stdout);
    let cleared = pzeta(&["cache", "clear", "--cache-dir", cache]);
    assert_eq!(stdout(&cleared).split_whitespace().nth(1), Some("1"));
}

#[test]
fn output_is_deterministic() {
    for format in ["json", "csv", "table"] {
        let a = pzeta(&["invert", A5, "--bound", "2000", "--format", format]);
        let b = pzeta(&["invert", A5, "--bound", "2000", "--format", format]);
        assert_eq!(a.stdout, b.stdout);
    }
}
