use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scmem_core::report::Summary;
use scmem_core::ConfigFile;

fn scmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scmem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn shipped_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json")
}

#[test]
fn mac_worked_example() {
    let o = scmem(&["mac", "--in", "110,111", "--w", "+100,-110", "--m", "3", "--vdd", "1.0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("V = 0.357142857 V"), "{out}");
    assert!(out.contains("decoded = -1"), "{out}");
}

#[test]
fn shipped_config_is_the_default() {
    let text = std::fs::read_to_string(shipped_config()).unwrap();
    assert_eq!(ConfigFile::parse(&text).unwrap(), ConfigFile::default());
}

#[test]
fn compare_with_shipped_config_reports_reduction() {
    let cfg = shipped_config();
    let o = scmem(&["--config", cfg.to_str().unwrap(), "compare", "--trials", "4"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("reduction: 82.1%"), "{out}");
    assert!(out.contains("power:      9.10 uW"), "{out}");
}

#[test]
fn compare_outputs_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = scmem(&[
            "--out",
            dir.path().to_str().unwrap(),
            "--seed",
            "7",
            "compare",
            "--n-inputs",
            "16",
            "--trials",
            "32",
        ]);
        assert!(o.status.success());
    }
    for name in [
        "trials_conventional.csv",
        "trials_proposed.csv",
        "energy.csv",
        "summary.json",
    ] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn seed_changes_trials() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, seed) in [(&a, "1"), (&b, "2")] {
        let o = scmem(&[
            "--out",
            dir.path().to_str().unwrap(),
            "--seed",
            seed,
            "compare",
            "--trials",
            "4",
        ]);
        assert!(o.status.success());
    }
    let x = std::fs::read(a.path().join("trials_conventional.csv")).unwrap();
    let y = std::fs::read(b.path().join("trials_conventional.csv")).unwrap();
    assert_ne!(x, y);
}

#[test]
fn summary_json_reproduces_printed_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = scmem(&[
        "--out",
        dir.path().to_str().unwrap(),
        "compare",
        "--m",
        "7",
        "--trials",
        "8",
    ]);
    assert!(o.status.success());
    let json = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    let summary = Summary::from_json(&json).unwrap();
    assert_eq!(summary.render(), stdout(&o));
}

#[test]
fn format_selects_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = scmem(&[
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
        "compare",
        "--trials",
        "2",
    ]);
    assert!(o.status.success());
    assert!(dir.path().join("summary.json").exists());
    assert!(!dir.path().join("energy.csv").exists());
}

#[test]
fn sweep_writes_one_directory_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = scmem(&[
        "--out",
        dir.path().to_str().unwrap(),
        "sweep",
        "--m",
        "3,7",
        "--flip-p",
        "0,0.01",
        "--n-inputs",
        "8",
        "--trials",
        "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    for i in 0..4 {
        assert!(dir.path().join(format!("point-{i:04}/summary.json")).exists());
    }
    let leftovers: Vec<_> = walk(dir.path())
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn asc_stats_runs() {
    let o = scmem(&["asc-stats", "--m", "15", "--sigma", "0.15"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("uniform"));
    assert!(out.contains("zero_peaked_gaussian(sigma=0.15)"));
}

#[test]
fn selftest_passes() {
    let o = scmem(&["selftest"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"pipeline": {"nope": 1}}"#).unwrap();
    assert_eq!(
        scmem(&["--config", bad.to_str().unwrap(), "compare"]).status.code(),
        Some(2)
    );

    let invalid = dir.path().join("invalid.json");
    std::fs::write(&invalid, r#"{"mac": {"m": 0, "n_inputs": 4, "vdd": 1.0}}"#).unwrap();
    assert_eq!(
        scmem(&["--config", invalid.to_str().unwrap(), "compare"]).status.code(),
        Some(2)
    );

    let missing = dir.path().join("missing.json");
    assert_eq!(
        scmem(&["--config", missing.to_str().unwrap(), "compare"]).status.code(),
        Some(4)
    );

    assert_eq!(
        scmem(&["mac", "--in", "110,11", "--w", "+100,-110"]).status.code(),
        Some(3)
    );
    assert_eq!(
        scmem(&["mac", "--in", "110", "--w", "+100,-110"]).status.code(),
        Some(3)
    );

    // unknown flag
    assert_eq!(scmem(&["compare", "--bogus"]).status.code(), Some(2));
}
