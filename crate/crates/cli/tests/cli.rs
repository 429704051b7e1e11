use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scopeshield"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).env_remove("SCOPESHIELD_THREADS").output().unwrap()
}

fn project(root: &Path) {
    fs::create_dir_all(root.join("src/lib")).unwrap();
    fs::write(root.join("src/lib/util.js"), "function double(value) { return value * 2 }\nconsole.log(double(21));\n")
        .unwrap();
    fs::write(root.join("src/readme.txt"), "hello").unwrap();
}

#[test]
fn usage_errors_exit_64_with_help() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("obfuscate") && err.contains("verify"), "{err}");
    assert_eq!(run(&["obfuscate", "--threads", "many"], dir.path()).status.code(), Some(64));
    assert_eq!(run(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn obfuscate_mirrors_tree_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    project(dir.path());
    let out = run(&["obfuscate", "--in", "src", "--out", "dist", "--threads", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "dist.report.json");
    assert_eq!(fs::read_to_string(dir.path().join("dist/readme.txt")).unwrap(), "hello");
    assert!(dir.path().join("dist/lib/util.js").exists());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("dist.report.json")).unwrap()).unwrap();
    for key in [
        "files_total",
        "files_transformed",
        "files_copied",
        "cut_weight",
        "peak_memory_bytes",
        "output_bytes",
        "input_bytes",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    for key in ["parse", "pasa", "rename", "transform", "emit"] {
        assert!(report["phase_times_ms"].get(key).is_some(), "missing phase {key}");
    }
    assert_eq!(report["files_total"], 2);
    assert_eq!(report["config"]["threads"], 3);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    project(dir.path());
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"input": "src", "output": "out", "threads": 2, "strings": false, "dump_renames": true}"#,
    )
    .unwrap();
    let out = run(&["obfuscate", "--config", "cfg.json", "--threads", "5", "--no-prop-access"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out.report.json")).unwrap()).unwrap();
    let c = &report["config"];
    assert_eq!(c["threads"], 5);
    assert_eq!(c["strings"], false);
    assert_eq!(c["prop_access"], false);
    assert_eq!(c["rename"], true);
    let renames = fs::read_to_string(dir.path().join("out.renames.tsv")).unwrap();
    assert!(renames.lines().any(|l| l.ends_with("\tdouble\ta")), "{renames}");
}

#[test]
fn bad_config_and_missing_input_are_fatal() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"threds": 2}"#).unwrap();
    assert_eq!(run(&["obfuscate", "--config", "cfg.json"], dir.path()).status.code(), Some(3));
    assert_eq!(run(&["obfuscate", "--in", "nowhere", "--out", "x"], dir.path()).status.code(), Some(3));
    assert_eq!(run(&["obfuscate", "--in", "same", "--out", "same"], dir.path()).status.code(), Some(3));
}

#[test]
fn syntax_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    project(dir.path());
    fs::write(dir.path().join("src/broken.js"), "let = = 3;").unwrap();
    let out = run(&["obfuscate", "--in", "src", "--out", "dist"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(fs::read_to_string(dir.path().join("dist/broken.js")).unwrap(), "let = = 3;");
}

#[test]
fn analyze_and_metrics_print_tables() {
    let dir = tempfile::tempdir().unwrap();
    project(dir.path());
    let out = run(&["analyze", "--in", "src", "--threads", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("file 0 lib/util.js"), "{text}");
    assert!(text.contains("# files=1 edges=0"), "{text}");

    assert_eq!(run(&["obfuscate", "--in", "src", "--out", "dist"], dir.path()).status.code(), Some(0));
    let out = run(&["metrics", "--orig", "src", "--obf", "dist", "--json", "m.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("total"));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(m["compressor"], "xz");
    assert_eq!(m["aggregate"]["files"], 1);
}

#[test]
fn verify_reports_rate() {
    if Command::new("node").arg("--version").output().is_err() {
        eprintln!("node not found; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    project(dir.path());
    fs::write(dir.path().join("cases.json"), r#"[{"entry": "lib/util.js"}]"#).unwrap();
    assert_eq!(run(&["obfuscate", "--in", "src", "--out", "dist"], dir.path()).status.code(), Some(0));
    let out = run(
        &[
            "verify",
            "--orig",
            "src",
            "--obf",
            "dist",
            "--cases",
            "cases.json",
            "--engine",
            "node {file}",
            "--verdicts",
            "v.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "equivalent 1/1 (100.00%)");
    assert!(fs::read_to_string(dir.path().join("v.jsonl")).unwrap().contains("\"verdict\":\"equivalent\""));

    fs::write(dir.path().join("dist/lib/util.js"), "console.log(41)").unwrap();
    let out = run(&["verify", "--orig", "src", "--obf", "dist", "--cases", "cases.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threads_default_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    project(dir.path());
    let out = bin()
        .args(["obfuscate", "--in", "src", "--out", "dist"])
        .current_dir(dir.path())
        .env("SCOPESHIELD_THREADS", "6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("dist.report.json")).unwrap()).unwrap();
    assert_eq!(report["threads"], 6);
}
