use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn outdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_outdyn")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(outdyn(&["pf"]).status.code(), Some(2));
    assert_eq!(outdyn(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(outdyn(&["pf", "--threads", "many"]).status.code(), Some(2));
    let missing = outdyn(&["run", "--config", "/nonexistent/experiment.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown = outdyn(&["run", "--config", path_str(&config("frobnicate.toml"))]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("frobnicate"));
}

#[test]
fn subcommand_overrides_the_configured_kind() {
    let out = outdyn(&["train-track", "--config", path_str(&config("rank3_pf.toml"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("automorphism,train_track,illegal_turn,generator\n"), "{text}");
}

#[test]
fn illegal_turns_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tt.toml");
    std::fs::write(
        &cfg,
        "rank = 2\n[automorphisms.f]\nimages = [\"Ba\", \"a\"]\ninverse = [\"b\", \"bA\"]\n[experiment]\nkind = \"train-track\"\nphi = \"f\"\n",
    )
    .unwrap();
    let out = outdyn(&["run", "--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("f,false,ab,1"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("shift{i}.csv"));
        let status = outdyn(&["run", "--config", path_str(&config("rank3_height_shift.toml")), "--out", path_str(&out)]);
        assert_eq!(status.status.code(), Some(0));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn sidecars_land_next_to_the_main_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fib.csv");
    let status = outdyn(&["eigencurrent", "--config", path_str(&config("fib_eigencurrent.toml")), "--out", path_str(&out)]);
    assert_eq!(status.status.code(), Some(0));
    let weights = std::fs::read_to_string(dir.path().join("fib.weights.csv")).unwrap();
    assert!(weights.starts_with("word,weight\n"));
}

#[test]
fn tampered_certificates_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("flare.csv");
    let made = outdyn(&["flare-cert", "--config", path_str(&config("rank3_flare.toml")), "--out", path_str(&out)]);
    assert_eq!(made.status.code(), Some(0));
    let cert = dir.path().join("flare.cert");
    assert_eq!(outdyn(&["verify-cert", path_str(&cert)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&cert).unwrap();
    let forged = text.replace("words-checked: 868", "words-checked: 869");
    assert_ne!(forged, text);
    std::fs::write(&cert, forged).unwrap();
    assert_ne!(outdyn(&["verify-cert", path_str(&cert)]).status.code(), Some(0));
}
