//! End-to-end tests of the radiance-sweep binary: flag handling, CSV and
//! sidecar format, determinism, and exit codes (0 success, 2 config error,
//! 3 solver failure with partial flush, 4 I/O failure).

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_radiance-sweep");
const HEADER: &str = "delta,mean_n,g2,g3,r,regime,blockade";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary spawns")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn preset_run_writes_csv_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("run.csv");
    let out = run(&[
        "--preset",
        "fig2a",
        "--range=23:25:5",
        "--ncut",
        "4",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = read(&out_path);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 7, "row `{row}`");
        fields[0].parse::<f64>().expect("delta parses");
        assert!(!fields[4].is_empty(), "preset computes the witness");
    }
    assert!(!csv.contains('\r'), "LF line endings only");

    let meta = read(&out_path.with_extension("meta"));
    for key in [
        "system.g",
        "system.phi_z",
        "system.omega_l",
        "system.eta",
        "system.delta_m",
        "system.delta_l",
        "system.delta_cav",
        "system.kappa",
        "system.gamma_gm",
        "system.gamma_me",
        "system.atom_count",
        "system.ncut",
        "sweep.axis",
        "sweep.lo",
        "sweep.hi",
        "sweep.points",
        "sweep.ncut_policy",
        "output.compute_r",
        "run.records",
        "run.ncut_used",
        "run.residual_max",
    ] {
        assert!(meta.contains(&format!("{key} = ")), "meta lacks {key}:\n{meta}");
    }
    assert!(meta.contains("sweep.lo = 23"));
    assert!(meta.contains("sweep.hi = 25"));
    assert!(meta.contains("sweep.points = 5"));
    assert!(meta.contains("run.ncut_used = 4"));
}

#[test]
fn identical_configs_produce_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = |path: &Path, threads: &str| {
        vec![
            "--preset".into(),
            "fig2a".into(),
            "--range=23.5:24.5:3".to_string(),
            "--ncut".into(),
            "4".into(),
            "--threads".into(),
            threads.to_string(),
            "--out".into(),
            path.to_str().unwrap().to_string(),
        ]
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    for (path, threads) in [(&a, "1"), (&b, "1"), (&c, "2")] {
        let out = Command::new(BIN).args(args(path, threads)).output().unwrap();
        assert_eq!(exit_code(&out), 0);
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap(), "rerun changed the output");
    assert_eq!(bytes_a, std::fs::read(&c).unwrap(), "worker count changed the output");
}

#[test]
fn no_r_leaves_witness_and_regime_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("nor.csv");
    let out = run(&[
        "--preset",
        "fig2a",
        "--range=24:24.5:2",
        "--ncut",
        "3",
        "--no-r",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let csv = read(&out_path);
    for row in csv.lines().skip(1) {
        let fields: Vec<&str> = row.split(',').collect();
        assert!(fields[4].is_empty(), "witness skipped: `{row}`");
        assert_eq!(fields[5], "undefined");
    }
}

#[test]
fn config_file_composes_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("sweep.conf");
    let out_path = dir.path().join("out.csv");
    std::fs::write(
        &conf,
        "preset = fig2a\n\n[system]\neta = 3.0\n\n[sweep]\nlo = 23\nhi = 24\npoints = 3\n\n\
         [output]\npath = ignored.csv\n",
    )
    .unwrap();
    let out = run(&[
        "--config",
        conf.to_str().unwrap(),
        "--ncut",
        "3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let meta = read(&out_path.with_extension("meta"));
    assert!(meta.contains("system.eta = 3"), "file key applied over preset");
    assert!(meta.contains("system.g = 20"), "preset fields kept");
    assert!(meta.contains("run.records = 3"));
}

#[test]
fn unknown_preset_in_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "preset = fig9z\n[output]\npath = x.csv\n").unwrap();
    let out = run(&["--config", conf.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn malformed_config_value_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "[sweep]\npoints = banana\n[output]\npath = x.csv\n").unwrap();
    let out = run(&["--config", conf.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("points"));
}

#[test]
fn missing_output_path_is_a_config_error() {
    let out = run(&["--preset", "fig2a", "--range=0:1:2", "--ncut", "2"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn degenerate_system_flushes_partial_results_and_exits_3() {
    // no decay, no drive, no coupling: the steady state is not unique
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("degenerate.conf");
    let out_path = dir.path().join("partial.csv");
    std::fs::write(
        &conf,
        format!(
            "[system]\natom_count = 1\ng = 0\neta = 0\nomega_l = 0\ngamma_gm = 0\n\
             gamma_me = 0\nncut = 1\n\n[sweep]\nlo = 0\nhi = 1\npoints = 2\n\n\
             [output]\npath = {}\n",
            out_path.display()
        ),
    )
    .unwrap();
    let out = run(&["--config", conf.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 3, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solve failed"));
    let csv = read(&out_path);
    assert!(csv.starts_with(HEADER), "partial CSV still written");
}

#[test]
fn unreadable_config_is_an_io_error() {
    let out = run(&["--config", "/nonexistent/sweep.conf"]);
    assert_eq!(exit_code(&out), 4);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let out = run(&[
        "--preset",
        "fig2a",
        "--range=24:24.5:2",
        "--ncut",
        "2",
        "--out",
        "/nonexistent/dir/run.csv",
    ]);
    assert_eq!(exit_code(&out), 4);
}
