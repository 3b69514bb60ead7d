use std::path::Path;
use std::process::{Command, Output};

use stqrf::acceptance::run_criterion;

fn stqrf(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stqrf"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env(stqrf::THREADS_ENV, n),
        None => cmd.env_remove(stqrf::THREADS_ENV),
    };
    cmd.output().expect("spawn stqrf")
}

fn run_into(source: &str, dir: &Path, threads: Option<&str>) -> Output {
    stqrf(&["run", source, "--out", dir.to_str().unwrap()], threads)
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn list_scenarios_names_every_bundled_config() {
    let out = stqrf(&["list-scenarios"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for (name, _) in stqrf::BUNDLED {
        assert!(
            text.lines().any(|l| l.starts_with(name)),
            "{name} missing from\n{text}"
        );
    }
}

#[test]
fn csv_is_byte_identical_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    assert!(run_into("salecker-wigner", a.path(), Some("1"))
        .status
        .success());
    assert!(run_into("salecker-wigner", b.path(), Some("4"))
        .status
        .success());
    assert!(run_into("salecker-wigner", c.path(), None).status.success());
    let csv = read(&a.path().join("salecker-wigner.csv"));
    assert_eq!(csv, read(&b.path().join("salecker-wigner.csv")));
    assert_eq!(csv, read(&c.path().join("salecker-wigner.csv")));
    assert_eq!(
        read(&a.path().join("salecker-wigner.svg")),
        read(&b.path().join("salecker-wigner.svg"))
    );
}

#[test]
fn csv_provenance_regenerates_identical_bytes() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    assert!(run_into("tradeoff", first.path(), None).status.success());
    let csv = first.path().join("tradeoff.csv");
    let out = run_into(csv.to_str().unwrap(), second.path(), None);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(read(&csv), read(&second.path().join("tradeoff.csv")));
}

#[test]
fn tampered_provenance_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_into("tradeoff", dir.path(), None).status.success());
    let csv = dir.path().join("tradeoff.csv");
    let text = String::from_utf8(read(&csv))
        .unwrap()
        .replacen("lambda = [", "lambda = [0.5, ", 1);
    let edited = dir.path().join("edited.csv");
    std::fs::write(&edited, text).unwrap();
    let out = run_into(edited.to_str().unwrap(), dir.path(), None);
    assert_eq!(out.status.code(), Some(stqrf::EXIT_CONFIG_INVALID));
}

#[test]
fn malformed_config_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown-field.toml", "name = \"x\"\noutput = \"moments\"\nunits = \"natural\"\nbogus = 1\n[state]\nfamily = \"gaussian\"\nlambda = 0.1\nmomentum_spread = 0.02\n"),
        ("bad-lambda.toml", "name = \"x\"\noutput = \"moments\"\nunits = \"natural\"\n[state]\nfamily = \"gaussian\"\nlambda = -1.0\nmomentum_spread = 0.02\n[time]\nstart = 0.0\nstop = 1.0\npoints = 3\n"),
        ("not-toml.toml", "this is = = not toml"),
    ];
    let out_dir = dir.path().join("out");
    for (file, text) in cases {
        let path = dir.path().join(file);
        std::fs::write(&path, text).unwrap();
        let out = run_into(path.to_str().unwrap(), &out_dir, None);
        assert_eq!(
            out.status.code(),
            Some(stqrf::EXIT_CONFIG_INVALID),
            "{file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    let missing = run_into(
        dir.path().join("absent.toml").to_str().unwrap(),
        &out_dir,
        None,
    );
    assert_eq!(missing.status.code(), Some(stqrf::EXIT_CONFIG_INVALID));
    assert!(!out_dir.exists());
}

#[test]
fn invalid_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into("salecker-wigner", dir.path(), Some("zero"));
    assert_eq!(out.status.code(), Some(stqrf::EXIT_CONFIG_INVALID));
    assert!(!dir.path().join("salecker-wigner.csv").exists());
}

#[test]
fn acceptance_json_is_deterministic() {
    let a = run_criterion(1, stqrf::acceptance::DEFAULT_SEED).unwrap();
    let b = run_criterion(1, stqrf::acceptance::DEFAULT_SEED).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    assert!(run_criterion(99, 0).is_none());
}

#[test]
fn regime_violation_exits_3_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tight-clock.toml");
    let text = "name = \"tight\"\noutput = \"moments\"\nunits = \"natural\"\n[state]\nfamily = \"gaussian\"\nlambda = 0.2\ntheta = 0.01\nmomentum_spread = 0.02\n[time]\nstart = 0.0\nstop = 1.0\npoints = 3\n";
    std::fs::write(&path, text).unwrap();
    let out_dir = dir.path().join("out");
    let out = run_into(path.to_str().unwrap(), &out_dir, None);
    assert_eq!(
        out.status.code(),
        Some(stqrf::EXIT_REGIME_VIOLATION),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!out_dir.exists());
}
