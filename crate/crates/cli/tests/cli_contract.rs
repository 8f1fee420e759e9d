//! CLI contract: exit codes, artifact shapes, and error messages.

use std::process::Command;

fn sim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sim"))
}

#[test]
fn run_transient_emits_monotone_time_csv() {
    let dir = tempfile::tempdir().unwrap();
    let output = sim()
        .args(["run", "--builtin", "pixel_3t_log", "--tran", "1n", "40u", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = std::fs::read_to_string(dir.path().join("pixel_3t_log_tran.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("time_s,"));
    let mut prev = f64::NEG_INFINITY;
    for line in lines {
        let t: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(t > prev, "time column must increase strictly");
        prev = t;
    }
    assert!(dir.path().join("pixel_3t_log_tran.svg").exists());
    // Manifest written last and lists the artifacts.
    let manifest = std::fs::read_to_string(dir.path().join("run_manifest.json")).unwrap();
    assert!(manifest.contains("pixel_3t_log_tran.csv"));
}

#[test]
fn run_missing_file_exits_one_naming_it() {
    let output = sim().args(["run", "definitely_missing.cir", "--op"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("definitely_missing.cir"));
}

#[test]
fn op_prints_sense_node_inside_rails() {
    let output = sim().args(["run", "--builtin", "pixel_3tm", "--op"]).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let pd_line = stdout.lines().find(|l| l.starts_with("v(pd)")).expect("pd line");
    let value: f64 = pd_line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(value > -0.6 && value < 1.2, "pd at {value}");
}

#[test]
fn sweep_point_count_and_fit_report() {
    let dir = tempfile::tempdir().unwrap();
    let output = sim()
        .args([
            "sweep",
            "--builtin",
            "pixel_3t_log",
            "--source",
            "pd1",
            "--from",
            "1e-10",
            "--to",
            "1e-5",
            "--ppd",
            "13",
            "--out-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let csv = std::fs::read_to_string(dir.path().join("pixel_3t_log_sweep.csv")).unwrap();
    let data_rows = csv.lines().skip(1).filter(|l| !l.starts_with('#')).count();
    assert_eq!(data_rows, 66); // 5 decades · 13 + 1
    // Fit block appended and printed.
    assert!(csv.lines().any(|l| l.starts_with("# log fit")));
    assert!(String::from_utf8_lossy(&output.stdout).contains("log fit"));
    // Converged flag column present and set.
    let first = csv.lines().nth(1).unwrap();
    assert!(first.ends_with(",1"));
}

#[test]
fn sweep_unknown_source_lists_valid_ones() {
    let output = sim()
        .args([
            "sweep", "--builtin", "pixel_3t_log", "--source", "nope", "--from", "1e-9", "--to",
            "1e-6",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("pd1"), "should name the sweepable sources: {stderr}");
}

#[test]
fn export_roundtrips_and_rejects_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p3.cir");
    let output = sim().args(["export", "--builtin", "pixel_3tm"]).arg(&path).output().unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = mempix::netlist::parse(&text).unwrap();
    assert!(parsed.structurally_equal(&mempix::netlist::Builtin::Pixel3tm.circuit()));

    let output = sim().args(["export", "--builtin", "nope", "x.cir"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("pixel_3t_log") && stderr.contains("pixel_3tm"));

    let output = sim()
        .args(["export", "--builtin", "pixel_2tm", "/nonexistent_dir_zz/x.cir"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn report_config_missing_kind_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("partial.toml");
    // No photodiode entry: the pixels contain photodiodes, so this must
    // fail naming the kind.
    std::fs::write(
        &config,
        "mosfet.overhead = 25\ncapacitor.density_ff_per_um2 = 5\nvsource.area_um2 = 0\nisource.area_um2 = 0\n",
    )
    .unwrap();
    let output = sim()
        .args(["report", "table1", "--area-config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("photodiode"));
}

#[test]
fn report_malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("broken.toml");
    std::fs::write(&config, "mosfet.overhead == 25\n").unwrap();
    let output = sim()
        .args(["report", "table1", "--area-config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn demo_names_are_validated() {
    let output = sim().args(["demo", "fig99"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("fig3"));
}

#[test]
fn run_rejects_both_inputs() {
    let output = sim()
        .args(["run", "a.cir", "--builtin", "pixel_3tm", "--op"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn fig3_demo_reports_swing_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let output = sim().args(["demo", "fig3", "--out-dir"]).arg(dir.path()).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let ratio_line = stdout.lines().find(|l| l.contains("swing ratio")).expect("ratio line");
    let ratio: f64 = ratio_line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(ratio > 1.0);
    assert!(dir.path().join("fig3.svg").exists());
    assert!(dir.path().join("fig3_pixel_2tm.csv").exists());
    assert!(dir.path().join("fig3_pixel_3t_log.csv").exists());
}

#[test]
fn fig6_demo_prints_knee_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let output = sim().args(["demo", "fig6", "--out-dir"]).arg(dir.path()).output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let knee_line = stdout.lines().find(|l| l.starts_with("knee current")).expect("knee line");
    let value: f64 = knee_line
        .split(' ')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!((1e-10..=1e-6).contains(&value), "knee {value}");
}
