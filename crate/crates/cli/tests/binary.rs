use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_quasiprox"));
    c.env_remove("QUASIPROX_OUT").env_remove("QUASIPROX_WORKERS");
    c
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(code(&bin().arg("--help").output().unwrap()), 0);
    assert_eq!(code(&bin().arg("--version").output().unwrap()), 0);
    assert_eq!(code(&bin().args(["run", "--bogus"]).output().unwrap()), 1);
    let o = bin().arg("run").output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--config"));
}

#[test]
fn validate_reports_every_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "regime = \"gradient\"\nx0 = [9.0]\n[objective]\nkind = \"x\"\nlower = [-1.0]\nupper = [1.0]\n[gamma]\nalpha = 1.0\n",
    )
    .unwrap();
    let o = bin().args(["validate", "--config"]).arg(&path).output().unwrap();
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    for key in ["regime", "x0", "objective.kind", "gamma.alpha"] {
        assert!(err.contains(&format!("{key}:")), "{key} in {err}");
    }
    assert!(err.contains("bad.toml"));

    let o = bin().args(["validate", "--config"]).arg(scenario("quadratic.toml")).output().unwrap();
    assert_eq!(code(&o), 0);
    let missing = bin().args(["validate", "--config", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(code(&missing), 1);
}

#[test]
fn run_honours_the_output_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run", "--quiet", "--config"])
        .arg(scenario("quadratic.toml"))
        .env("QUASIPROX_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("exit_code = 0"));

    let flag = dir.path().join("flag");
    let o = bin()
        .args(["run", "--config"])
        .arg(scenario("quadratic.toml"))
        .arg("--out")
        .arg(&flag)
        .env("QUASIPROX_OUT", dir.path().join("env"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(flag.join("trace.csv").is_file() && !dir.path().join("env").exists());
    assert!(String::from_utf8_lossy(&o.stdout).contains("trap = strong"));
}

#[test]
fn seed_flag_overrides_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, sub: &str| {
        let o = bin()
            .args(["run", "--quiet", "--seed", seed, "--config"])
            .arg(scenario("double_well_random.toml"))
            .arg("--out")
            .arg(dir.path().join(sub))
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        fs::read(dir.path().join(sub).join("trace.csv")).unwrap()
    };
    assert_eq!(run("5", "a"), run("5", "b"));
    assert_ne!(run("5", "a"), run("6", "c"));
}

#[test]
fn sweep_and_certify_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["sweep", "--quiet", "--config"])
        .arg(scenario("double_well.toml"))
        .arg("--out")
        .arg(dir.path())
        .env("QUASIPROX_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let o = bin()
        .args(["certify", "--quiet", "--config"])
        .arg(scenario("double_well.toml"))
        .arg("--trace")
        .arg(dir.path().join("run_0001/trace.csv"))
        .arg("--out")
        .arg(dir.path().join("cert"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(dir.path().join("cert/certificate.txt")).unwrap().contains("kind = strong"));
}
