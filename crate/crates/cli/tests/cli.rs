use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qsg-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn qsg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsg")).args(args).env_remove("QSG_CACHE_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn export(dir: &Path, builtin: &str) -> String {
    let o = qsg(&["export", builtin]);
    assert_eq!(o.status.code(), Some(0));
    let path = dir.join(format!("{builtin}.qsg"));
    std::fs::write(&path, &o.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_exported_builtins() {
    let dir = scratch("verify");
    for name in ["qmap-x3", "qmap-m2", "m2-commutant"] {
        let file = export(&dir, name);
        let o = qsg(&["verify", &file]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
}

#[test]
fn cyclic_commutant_recognizes_z4() {
    let o = qsg(&["commutant", "--space", "xn", "--n", "4", "--perm", "(1 2 3 4)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cyclic group Z4"));
}

#[test]
fn commutant_out_file_verifies() {
    let dir = scratch("out");
    let out = dir.join("swap.qsg");
    let o = qsg(&["commutant", "--space", "m2", "--auto", "swap", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = qsg(&["verify", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn scenario_prints_the_identity() {
    let o = qsg(&["scenario", "y-central"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nf(Y^3 - Y) = 0"));
    for name in ["y2-is-1", "reduced"] {
        assert_eq!(qsg(&["scenario", name]).status.code(), Some(0));
    }
}

#[test]
fn normal_forms_and_bases() {
    let dir = scratch("nf");
    let file = export(&dir, "qmap-x2");
    let o = qsg(&["nf", &file, "a11 a12 + a11"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "a11");
    let o = qsg(&["basis", &file, "--max-deg", "2", "--machine"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("stabilized=false"));
    let o = qsg(&["nf", &file, "a11 +"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn characters_of_the_swap_commutant() {
    let dir = scratch("chars");
    let file = export(&dir, "m2-commutant");
    let o = qsg(&["abelianize", &file]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("# variables: alpha_re alpha_im beta_re gamma_re"));
    let o = qsg(&["characters", &file, "--samples", "200", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("alpha_im"));
    let o = qsg(&["characters", &file, "--param", "nope"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn representation_search() {
    let dir = scratch("rep");
    let file = export(&dir, "qmap-x2");
    let o = qsg(&["rep", &file, "--dim", "2", "--restarts", "4", "--seed", "2", "--noncommute", "a11", "a21"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("dim 2") && text.contains("matrix a11"));
    let file = export(&dir, "qmap-x3");
    assert_eq!(qsg(&["rep", &file, "--dim", "1", "--restarts", "2"]).status.code(), Some(0));
}

#[test]
fn machine_output_is_reproducible() {
    let args = ["--machine", "commutant", "--space", "xn", "--n", "3", "--perm", "(1 2)"];
    let a = qsg(&args);
    let b = qsg(&args);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("subject="));
}

#[test]
fn cache_directory_is_used() {
    let dir = scratch("cache");
    let file = export(&dir, "qmap-m2");
    let cache = dir.join("cache");
    std::fs::create_dir_all(&cache).unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qsg"))
            .args(["--machine", "verify", &file])
            .env("QSG_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = scratch("errors");
    assert_eq!(qsg(&[]).status.code(), Some(64));
    assert_eq!(qsg(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(qsg(&["scenario", "nope"]).status.code(), Some(64));
    assert_eq!(qsg(&["export", "qmap-x0"]).status.code(), Some(64));
    assert_eq!(qsg(&["commutant", "--space", "xn", "--perm", "(1 2)"]).status.code(), Some(64));
    assert_eq!(qsg(&["verify", dir.join("missing.qsg").to_str().unwrap()]).status.code(), Some(66));
    let bad = dir.join("bad.qsg");
    std::fs::write(&bad, "presentation p;\ngenerators { a, b; }\nrelations { a + ; }\n").unwrap();
    let o = qsg(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(66));
    assert!(stderr(&o).contains(":3:17:"), "{}", stderr(&o));
    assert_eq!(qsg(&["--help"]).status.code(), Some(0));
}
