use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_d2dcast"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn d2dcast")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CONFIG: &str = "\
# small sweep
sweep_variable = D
sweep_values = 30, 60
schemes = all, fixed(2):musca
n_scenarios = 6
num_groups = 5
";

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn run_csv(cfg: &str, out: &Path, parallel: &str) -> String {
    let o = run(&[
        "run",
        "--config",
        cfg,
        "--out",
        out.to_str().unwrap(),
        "--parallel",
        parallel,
        "--seed",
        "42",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn count_prints_both_totals() {
    let o = run(&["count", "7", "3", "all"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let total = s.lines().find(|l| l.starts_with("total")).unwrap();
    let nums: Vec<&str> = total.split_whitespace().skip(1).collect();
    assert_eq!(nums, ["1841", "1701"]);
    assert!(s.contains("[3,2,2]"));
}

#[test]
fn count_rejects_bad_mode() {
    let o = run(&["count", "7", "3", "fixed(0)"]);
    assert!(!o.status.success());
}

#[test]
fn run_writes_csv_and_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let a = run_csv(&cfg, &dir.path().join("a.csv"), "1");
    let b = run_csv(&cfg, &dir.path().join("b.csv"), "8");
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep_var,sweep_value,scheme,mean_bps_hz,std,degenerate,wall_ms"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn seed_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let a = run_csv(&cfg, &dir.path().join("a.csv"), "1");
    let o = run(&["run", "--config", &cfg, "--seed", "7", "--scenarios", "6"]);
    assert!(o.status.success());
    assert_ne!(a, stdout(&o));
}

#[test]
fn unknown_key_is_reported_with_its_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{CONFIG}bogus_key = 3\n"));
    let o = run(&["run", "--config", &cfg]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus_key"));
}

#[test]
fn validate_lemmas_prints_table() {
    let o = run(&["validate-lemmas", "--trials", "2000"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("PASS") && l.contains("p_high inverts")));
    assert!(s.lines().last().unwrap().ends_with("checks passed"));
}
