use std::path::Path;
use std::process::{Command, Output};

fn meuq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meuq"))
        .args(args)
        .current_dir(dir)
        .env_remove("MEUQ_THREADS")
        .output()
        .expect("failed to launch meuq")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn run_writes_statistics_report_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sod.toml", "[problem]\nname = \"sod_1d\"\n[grid]\ncells = 100\n");
    let out = meuq(&["run", "--config", &cfg, "--output", "out", "--threads", "2"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out_dir = dir.path().join("out");
    let stats = std::fs::read_to_string(out_dir.join("statistics.csv")).unwrap();
    assert_eq!(stats.lines().next().unwrap(), "x,E_rho,Var_rho,E_mx,Var_mx,E_E,Var_E");
    assert_eq!(stats.lines().count(), 101);
    assert!(out_dir.join("reference.csv").exists());

    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.lines().all(|l| l.contains(": ")));
    assert!(report.contains("method: me_hsg"));

    let errors = std::fs::read_to_string(out_dir.join("errors.csv")).unwrap();
    let mut lines = errors.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,K,N_Xi,cells,errE_rho,errVar_rho,wall_s,dual_solve_s"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..4], &["me_hsg", "4", "3", "100"]);
    let err: f64 = row[4].parse().unwrap();
    assert!(err > 0.0 && err < 0.05);
}

#[test]
fn several_configs_get_their_own_directories() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.toml", "[grid]\ncells = 40\n[reference]\nkind = \"none\"\n");
    let b = write(
        dir.path(),
        "b.toml",
        "[grid]\ncells = 40\n[method]\nname = \"me_ipm\"\n[reference]\nkind = \"none\"\n",
    );
    let out = meuq(&["run", "--config", &a, "--config", &b, "--output", "batch"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for (name, method) in [("a", "me_hsg"), ("b", "me_ipm")] {
        let errors = std::fs::read_to_string(dir.path().join("batch").join(name).join("errors.csv")).unwrap();
        let row = errors.lines().nth(1).unwrap();
        assert!(row.starts_with(method), "{row}");
        // No reference: the error columns stay empty.
        assert_eq!(row.split(',').nth(4), Some(""));
    }
}

#[test]
fn config_output_directory_is_used_without_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[grid]\ncells = 20\n[output]\ndirectory = \"from_config\"\nstatistics = \"s.csv\"\n[reference]\nkind = \"none\"\n",
    );
    let out = meuq(&["run", "--config", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("from_config/s.csv").exists());
}

#[test]
fn invalid_config_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[method]\nname = \"me_fhsg\"\n");
    let out = meuq(&["run", "--config", &cfg], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.toml") && err.contains("filter"), "{err}");

    let cfg = write(dir.path(), "typo.toml", "[grid]\ncels = 10\n");
    let out = meuq(&["run", "--config", &cfg], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = meuq(&["run", "--config", "missing.toml"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.toml"));
}

#[test]
fn solver_failure_gives_nonzero_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "nolimit.toml",
        "[grid]\ncells = 50\n[basis]\nelements = 1\ndegree = 6\n[limiter]\nenabled = false\n",
    );
    let out = meuq(&["run", "--config", &cfg, "--output", "o"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("inadmissible"));
}

#[test]
fn zero_threads_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sod.toml", "[grid]\ncells = 20\n");
    let out = meuq(&["run", "--config", &cfg, "--threads", "0"], dir.path());
    assert!(!out.status.success());
}
