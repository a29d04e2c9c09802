use std::fs;
use std::path::Path;
use std::process::Command;

const DEFAULT: &str = include_str!("../../../configs/default.toml");

fn holoext(args: &[&str], config: &Path, out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_holoext"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env_remove("HOLOEXT_SEED")
        .env_remove("HOLOEXT_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DEFAULT);
    let out = dir.path().join("out");
    let res = holoext(&["weight-table"], &cfg, &out);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("weight-table.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["pass"], true);
    assert!(json["config_digest"].as_str().unwrap().starts_with("sha256:"));
    let legendre = fs::read_to_string(out.join("legendre.csv")).unwrap();
    assert!(legendre.starts_with("n,ln_k,recovered,abs_error,optimal_radius\n"));
}

#[test]
fn unknown_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{DEFAULT}\nmystery = 3\n"));
    let res = holoext(&["lemma-scan"], &cfg, &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("mystery"));
}

#[test]
fn missing_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let res = holoext(&["lemma-scan"], &dir.path().join("absent.toml"), &dir.path().join("out"));
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn corrupted_dual_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{DEFAULT}\n[dual]\nlog_terms = [0.0, 0.0, 5.0, 1.0, 9.0, 20.0]\nln_t1 = 0.1\nln_t2 = 0.1\n");
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("out");
    let res = holoext(&["lemma-scan"], &cfg, &out);
    assert_eq!(res.status.code(), Some(1));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("lemma-scan.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], false);
    assert_eq!(json["checks"][0]["name"], "error");
}

#[test]
fn seed_override_changes_digest_only_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DEFAULT);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(holoext(&["phi-check"], &cfg, &a).status.code(), Some(0));
    assert_eq!(holoext(&["phi-check", "--seed", "11"], &cfg, &b).status.code(), Some(0));
    let read = |p: &Path| -> serde_json::Value {
        serde_json::from_str(&fs::read_to_string(p.join("phi-check.json")).unwrap()).unwrap()
    };
    let (ja, jb) = (read(&a), read(&b));
    assert_eq!(jb["seed"], 11);
    assert_ne!(ja["config_digest"], jb["config_digest"]);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DEFAULT);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(holoext(&["extend-eval", "--threads", "1"], &cfg, &a).status.code(), Some(0));
    assert_eq!(holoext(&["extend-eval", "--threads", "3"], &cfg, &b).status.code(), Some(0));
    for name in ["extend-eval.json", "extend.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}
