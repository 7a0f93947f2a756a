use std::path::Path;
use std::process::{Command, Output};

use kpp_halfline::io::Table;

const SMALL: &[&str] = &["--L", "40", "--nx", "400", "--dt", "0.05"];

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpp-halfline")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend_from_slice(SMALL);
    v
}

#[test]
fn wave_writes_profile_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("w1");
    let o = bin(&["wave", "--reaction", "logistic", "--c", "2.5", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = Table::read(&out.join("wave_c2.5.csv")).unwrap();
    t.expect_columns(&["z", "phi"]).unwrap();
    assert_eq!(t.get_meta("critical"), Some("false"));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["task"]["command"], "wave");
    assert_eq!(m["status"], "complete");
    assert_eq!(m["config"]["c"][0], 2.5);
    assert_eq!(m["files"]["wave_c2.5.csv"].as_str().unwrap().len(), 64);
}

#[test]
fn usage_errors_exit_2_with_text_on_stderr() {
    let o = bin(&["frobnicate"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert!(o.stdout.is_empty());
    assert_eq!(code(&bin(&["wave", "--speed", "3"])), 2);
    assert_eq!(code(&bin(&["wave", "--reaction", "quartic"])), 2);
    assert_eq!(code(&bin(&["--help"])), 0);
}

#[test]
fn invalid_config_exits_2_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("slow");
    let o = bin(&["wave", "--c", "1.5", "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("minimal speed"));
    assert!(!out.exists());
    assert_eq!(code(&bin(&["type2", "--m", "0.99", "--out", p(&out)])), 2);
    assert_eq!(code(&bin(&["simulate", "--nx", "10", "--out", p(&out)])), 2);
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"grid": {"L": 40, "nx": 400, "dt": 0.05}, "colour": 1}"#).unwrap();
    assert_eq!(code(&bin(&["stationary", "--config", p(&cfg), "--out", p(&out)])), 2);
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    std::fs::write(&cfg, r#"{"grid": {"L": 40, "nx": 400, "dt": 0.05}, "t_end": 2.0, "out_interval": 0.5}"#).unwrap();
    let out = tmp.path().join("sim");
    let o = bin(&["simulate", "--config", p(&cfg), "--t-end", "1", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let snaps: Vec<_> = std::fs::read_dir(out.join("snapshots")).unwrap().collect();
    assert_eq!(snaps.len(), 3);
    let diag = Table::read(&out.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.rows.len(), 21);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["t_end"], 1.0);
    assert_eq!(m["config"]["grid"]["nx"], 400);

    // the echoed config reproduces the run
    let echo = tmp.path().join("echo.json");
    std::fs::write(&echo, m["config"].to_string()).unwrap();
    let again = tmp.path().join("again");
    assert_eq!(code(&bin(&["simulate", "--config", p(&echo), "--out", p(&again)])), 0);
    assert_eq!(std::fs::read(out.join("manifest.json")).unwrap(), std::fs::read(again.join("manifest.json")).unwrap());
}

#[test]
fn resume_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(code(&bin(&["resume", p(&empty)])), 2);

    let full = tmp.path().join("full");
    let args = with_small(&["simulate", "--t-end", "4", "--out", p(&full)]);
    assert_eq!(code(&bin(&args)), 0);
    let before = std::fs::read(full.join("manifest.json")).unwrap();
    let o = bin(&["resume", p(&full)]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("nothing to resume"));
    assert_eq!(std::fs::read(full.join("manifest.json")).unwrap(), before);

    let half = tmp.path().join("half");
    let args = with_small(&["simulate", "--t-end", "4", "--halt-at", "1.5", "--out", p(&half)]);
    assert_eq!(code(&bin(&args)), 0);
    assert!(std::fs::read_to_string(half.join("manifest.json")).unwrap().contains("\"partial\""));
    assert!(!half.join("snapshots/snap_00004.csv").exists());
    assert_eq!(code(&bin(&["resume", p(&half)])), 0);
    assert_eq!(std::fs::read(half.join("manifest.json")).unwrap(), before);
    for j in 0..=4 {
        let name = format!("snapshots/snap_{j:05}.csv");
        assert_eq!(std::fs::read(full.join(&name)).unwrap(), std::fs::read(half.join(&name)).unwrap());
    }
}

#[test]
fn tampered_run_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let args = with_small(&["simulate", "--t-end", "3", "--halt-at", "1", "--out", p(&dir)]);
    assert_eq!(code(&bin(&args)), 0);
    let snap = dir.join("snapshots/snap_00000.csv");
    let mut text = std::fs::read_to_string(&snap).unwrap();
    text.push('\n');
    std::fs::write(&snap, text).unwrap();
    let o = bin(&["resume", p(&dir)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum"));
}

#[test]
fn verify_profiles_passes_and_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = bin(&["verify", "--suite", "profiles", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(rep["pass"], true);
}

#[test]
fn failed_verification_exits_1() {
    // two members cannot establish any trend
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t2");
    let args = ["type2", "--n", "8", "16", "--L", "60", "--nx", "1200", "--dt", "0.025", "--out", p(&out)];
    let o = bin(&args);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let m = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(m.contains("failed_verification"));
    for f in ["type2.csv", "n8/diagnostics.csv", "n16/snap_000.csv", "levelset_m0.5.csv", "report.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = tmp.path().join("plan.json");
    let small = r#"{"L": 40, "nx": 400, "dt": 0.05}"#;
    std::fs::write(
        &plan,
        format!(
            r#"[{{"task": {{"command": "wave"}}, "config": {{"c": [2.5, 3.0]}}}},
                {{"task": {{"command": "simulate"}}, "config": {{"grid": {small}, "t_end": 2}}}},
                {{"task": {{"command": "stationary"}}, "config": {{"grid": {small}}}}},
                {{"task": {{"command": "verify", "suite": "profiles"}}}}]"#
        ),
    )
    .unwrap();
    let one = tmp.path().join("one");
    let four = tmp.path().join("four");
    assert_eq!(code(&bin(&["sweep", "--plan", p(&plan), "--jobs", "1", "--out", p(&one)])), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_kpp-halfline"))
        .args(["sweep", "--plan", p(&plan), "--out", p(&four)])
        .env("KPP_HALFLINE_JOBS", "4")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(one.join("manifest.json")).unwrap(), std::fs::read(four.join("manifest.json")).unwrap());
    assert!(one.join("001-simulate/diagnostics.csv").exists());
    assert_eq!(code(&bin(&["sweep", "--plan", p(&plan), "--jobs", "0", "--out", p(&one)])), 2);

    std::fs::write(&plan, r#"[{"task": {"command": "wave"}, "config": {"c": [1.0]}}]"#).unwrap();
    assert_eq!(code(&bin(&["sweep", "--plan", p(&plan), "--out", p(&one)])), 2);
}

#[test]
fn plot_renders_known_schemas_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("st");
    assert_eq!(code(&bin(&with_small(&["stationary", "--out", p(&out)]))), 0);
    let svg = tmp.path().join("v.svg");
    assert_eq!(code(&bin(&["plot", "--input", p(&out.join("stationary.csv")), "--out", p(&svg)])), 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.matches("<polyline").count() == 1);
    let svg2 = tmp.path().join("v2.svg");
    assert_eq!(code(&bin(&["plot", "--input", p(&out.join("stationary.csv")), "--out", p(&svg2)])), 0);
    assert_eq!(text, std::fs::read_to_string(&svg2).unwrap());

    let odd = tmp.path().join("odd.csv");
    std::fs::write(&odd, "a,b\n1,2\n").unwrap();
    assert_eq!(code(&bin(&["plot", "--input", p(&odd), "--out", p(&svg)])), 2);
    assert_eq!(code(&bin(&["plot", "--input", p(&out.join("manifest.json")), "--out", p(&svg)])), 2);
}
