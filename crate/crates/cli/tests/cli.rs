use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FEKETE: &str = r#"{"command":"fekete","set":{"kind":"ComplexBall","center":[[0.0,0.0]],"radius":1.0},"degrees":[5],"seeds":[2]}"#;

fn pllab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pllab"))
        .current_dir(dir)
        .args(args)
        .env_remove("PLLAB_CACHE")
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn write_manifest(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("m.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(name).display()))
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(pllab(dir, &["fekete"]).status.code(), Some(2));
    assert_eq!(pllab(dir, &["--bogus"]).status.code(), Some(2));
    let m = write_manifest(dir, r#"{"command":"fekete","set":{"kind":"Interval","a":-1,"b":1},"degrees":[0]}"#);
    let out = pllab(dir, &["--manifest", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degrees[0]"));
    let m = write_manifest(dir, FEKETE);
    let out = pllab(dir, &["extremal", "--manifest", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "command mismatch");
    // four samples cannot carry a degree-5 configuration
    let m = write_manifest(
        dir,
        r#"{"command":"fekete","set":{"kind":"Interval","a":-1,"b":1},"degrees":[5],"cloud_size":4}"#,
    );
    assert_eq!(pllab(dir, &["--manifest", m.to_str().unwrap(), "--no-cache"]).status.code(), Some(3));
}

#[test]
fn verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pllab(tmp.path(), &["verify", "--out", "v"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("11 of 11 checks passed"));
    let csv = String::from_utf8(read(&tmp.path().join("v"), "verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn cache_hits_and_no_cache_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let m = write_manifest(dir, FEKETE);
    let m = m.to_str().unwrap();
    let first = pllab(dir, &["--manifest", m, "--out", "a", "--cache", "c"]);
    assert!(first.status.success());
    assert!(!String::from_utf8_lossy(&first.stderr).contains("cache hit"));
    let second = pllab(dir, &["--manifest", m, "--out", "b", "--cache", "c"]);
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));
    let third = pllab(dir, &["--manifest", m, "--out", "n", "--no-cache"]);
    assert!(third.status.success());
    for name in ["manifest.json", "fekete_d5_s2.json", "fekete_d5_s2_nodes.csv", "fekete.csv", "version.txt"] {
        let a = read(&dir.join("a"), name);
        assert_eq!(a, read(&dir.join("b"), name), "{name}");
        assert_eq!(a, read(&dir.join("n"), name), "{name}");
    }
}

#[test]
fn corrupt_cache_entries_are_recomputed() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let m = write_manifest(dir, FEKETE);
    let m = m.to_str().unwrap();
    assert!(pllab(dir, &["--manifest", m, "--out", "a", "--cache", "c"]).status.success());
    let mut entries = Vec::new();
    for shard in std::fs::read_dir(dir.join("c")).unwrap() {
        for e in std::fs::read_dir(shard.unwrap().path()).unwrap() {
            entries.push(e.unwrap().path());
        }
    }
    assert_eq!(entries.len(), 1);
    std::fs::write(&entries[0], b"{ not json").unwrap();
    let out = pllab(dir, &["--manifest", m, "--out", "b", "--cache", "c"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrupt cache entry"));
    assert_eq!(read(&dir.join("a"), "fekete.csv"), read(&dir.join("b"), "fekete.csv"));
}

#[test]
fn default_output_dir_and_stored_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let m = write_manifest(dir, FEKETE);
    assert!(pllab(dir, &["--manifest", m.to_str().unwrap(), "--no-cache"]).status.success());
    let outs: Vec<_> = std::fs::read_dir(dir.join("pllab-out")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(outs.len(), 1);
    let name = outs[0].to_string_lossy().into_owned();
    assert!(name.starts_with("fekete-") && name.len() == "fekete-".len() + 12, "{name}");
    let stored: serde_json::Value =
        serde_json::from_slice(&read(&dir.join("pllab-out").join(&name), "manifest.json")).unwrap();
    let hash = stored["hash"].as_str().unwrap();
    assert!(name.ends_with(&hash[..12]));
    assert_eq!(stored["seeds"], serde_json::json!([2]));
}
