//! End-to-end tests of the installed binary: exit codes, byte determinism of
//! the emitted files, and the documented output schemas.

use std::path::Path;
use std::process::{Command, Output};

fn qrgitf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrgitf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn measure_prints_the_record() {
    let out = qrgitf(&["measure", "--measure", "neg", "--g", "1", "--steps", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("value=0.353553391"), "{text}");

    let out = qrgitf(&["measure", "--measure", "qde", "--g", "0", "--steps", "0"]);
    assert!(stdout(&out).contains("value=0.693147181"));

    let out = qrgitf(&["measure", "--measure", "chsh", "--g", "0", "--steps", "0"]);
    assert!(stdout(&out).contains("value=2.82842712"));
}

#[test]
fn unknown_measure_is_a_usage_error() {
    let out = qrgitf(&["measure", "--measure", "entropy", "--g", "1"]);
    assert_eq!(out.status.code(), Some(64));
    let out = qrgitf(&["scaling", "--measure", "neg", "--steps", "9..4", "--out", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn sweep_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = qrgitf(&[
            "sweep",
            "--measure",
            "all",
            "--g-min",
            "0",
            "--g-max",
            "2.5",
            "--points",
            "101",
            "--steps",
            "0..3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    let text = String::from_utf8(bytes_a).unwrap();
    assert_eq!(text.lines().count(), 1 + 7 * 4 * 101);
    assert!(text.starts_with("g,step,measure,value,dvalue_dg\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn scaling_emits_schema_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("neg.json");
    let out = qrgitf(&[
        "scaling",
        "--measure",
        "neg",
        "--steps",
        "4..10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["measure"], "neg");
    assert_eq!(v["chsh_convention"], "horodecki");
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 7);
    for (i, p) in points.iter().enumerate() {
        let n = 4 + i as u64;
        assert_eq!(p["n"].as_u64().unwrap(), n);
        assert_eq!(p["N"].as_u64().unwrap(), 2u64 << n);
    }
    let theta = v["theta"].as_f64().unwrap();
    assert!((0.95..=1.05).contains(&theta), "theta = {theta}");
    assert!(v["r_squared"].as_f64().unwrap() >= 0.999);
}

#[test]
fn scaling_theta_agrees_between_discord_and_negativity() {
    let dir = tempfile::tempdir().unwrap();
    let mut thetas = Vec::new();
    for m in ["qd", "neg"] {
        let path = dir.path().join(format!("{m}.json"));
        let out = qrgitf(&[
            "scaling",
            "--measure",
            m,
            "--steps",
            "4..10",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        thetas.push(v["theta"].as_f64().unwrap());
    }
    // equal to two decimals
    assert_eq!(
        (thetas[0] * 100.0).round(),
        (thetas[1] * 100.0).round(),
        "{thetas:?}"
    );
}

#[test]
fn poor_fit_quality_exits_2_but_writes_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("low.json");
    // the first three steps are still transient: r^2 < 0.999
    let out = qrgitf(&[
        "scaling",
        "--measure",
        "neg",
        "--steps",
        "0..2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(Path::new(&path).exists());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["r_squared"].as_f64().unwrap() < 0.999);
}

#[test]
fn verify_passes_at_default_tolerances() {
    let out = qrgitf(&["verify"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("VERIFY: PASS"), "{text}");
    assert!(text.contains("projection g=1"), "{text}");
}

#[test]
fn verify_reports_the_discord_search_at_impossible_tolerance() {
    let out = qrgitf(&["verify", "--tol", "1e-15"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(1), "{text}");
    // the optimization-limited discord comparison must be among the failures
    assert!(
        text.lines()
            .any(|l| l.contains("closed-vs-oracle qd") && l.contains("FAIL")),
        "{text}"
    );
}
