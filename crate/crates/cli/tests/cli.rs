use std::path::Path;
use std::process::Command;

fn wavext(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wavext"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn solve_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "solve.cfg",
        "preset = dirichlet-cos\np = 2\nq = 2\nmesh = 4\ntau = 0.25\n",
    );
    let out = dir.path().join("out");
    let o = wavext(&[
        "solve",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "run_id,experiment,method,bc_mode,p,q,h,tau,err_u,err_ustar,err_v,err_gradu,eta,osc_f,effectivity,energy_drift"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..6], &["1", "solve", "gradient", "ptau", "2", "2"]);
    assert_eq!(row[7], "2.50000000000e-1");
    assert!(row[8].parse::<f64>().unwrap() > 0.0);
    assert!(row[12].is_empty());
    assert!(out.join("rates.txt").exists() && out.join("run.log").exists());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "preset = dirichlet-cos\np = 2\n");
    let o = wavext(&[
        "solve",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = wavext(&["solve", "--config", "/nonexistent/config"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimator_on_unsupported_data_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "est.cfg",
        "preset = dirichlet-cos\np = 2\nq = 1\nmesh = 2\ntau = 0.5\n",
    );
    let o = wavext(&[
        "estimate",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missed_thresholds_exit_with_4_under_check() {
    let dir = tempfile::tempdir().unwrap();
    // energy is not conserved when boundary data drive the solution
    let cfg = write(
        dir.path(),
        "energy.cfg",
        "preset = dirichlet-cos\np = 1\nq = 1\nmesh = 2\ntau = 0.5\n",
    );
    let o = wavext(&[
        "energy",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
        "--check",
    ]);
    assert_eq!(o.status.code(), Some(4));
    let conserved = write(
        dir.path(),
        "sw.cfg",
        "preset = standing-wave\np = 2\nq = 2\nmesh = 4\ntau = 0.125\n",
    );
    let o = wavext(&[
        "energy",
        "--config",
        &conserved,
        "--out",
        dir.path().to_str().unwrap(),
        "--check",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn rates_report_lists_each_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "h.cfg",
        "preset = dirichlet-cos\np = 1\nq = 2\nmesh = 2\nmesh = 4\ntau = 0.25\n",
    );
    let o = wavext(&[
        "converge-h",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rates = std::fs::read_to_string(dir.path().join("rates.txt")).unwrap();
    assert!(rates.contains("[method=gradient bc_mode=ptau p=1 q=2 tau=2.50000000000e-1]"));
    assert_eq!(
        rates
            .lines()
            .filter(|l| l.trim_start().starts_with(|c: char| c.is_ascii_digit()))
            .count(),
        2
    );
}
